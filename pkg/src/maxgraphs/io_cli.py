"""Command line front end: enumerate, generate, verify.

A thin shell over the library: configuration comes from an INI style file
and/or flags (precedence flags > file > defaults), meshes go out as OBJ,
binary PLY or CSV next to a JSON metadata document, and verification
reports are the structured text of the verify module.  Exit codes: 0 on
success, 1 when a verification check fails or a tolerance cannot be met,
2 on configuration errors.
"""
from __future__ import annotations

import argparse
import configparser
import dataclasses
import json
import re
import struct
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import __version__
from .curve import CurveError, make_curve
from .quadrature import ToleranceError
from .surface import (SlitCollapseError, SurfaceMesh, build_graph,
                      default_z0, sample_mesh)
from .verify import VerifySettings, verify_family, verify_surface
from .weierstrass import SpinChoice, build_data, congruence_classes, \
    enumerate_admissible, growth_coefficient


class ConfigError(ValueError):
    """Invalid configuration value or file."""


@dataclass
class JobConfig:
    """Everything a CLI run needs; representable as an INI file."""

    a: tuple = (-1.0, 1.0)
    tau: str = "0"
    theta: float = 0.0
    A: float = 1.0
    tol: float = 1e-10
    rings_per_slit: int = 12
    n_cap: int = 12
    n_edge: int = 12
    far_circles: int = 8
    far_angles: int = 64
    far_radius: float = 50.0
    out: str = "out"
    mesh_format: str = "obj"
    report: str | None = None

    def validate(self):
        curve = make_curve(self.a)  # raises CurveError on bad branch points
        if self.tau != "all":
            if not re.fullmatch(r"[01]+", self.tau):
                raise ConfigError(
                    f"tau must be a bit string or 'all', got {self.tau!r}"
                )
            if len(self.tau) != curve.n + 1:
                raise ConfigError(
                    f"tau needs {curve.n + 1} bits for this curve,"
                    f" got {len(self.tau)}"
                )
        if not self.tol > 0.0:
            raise ConfigError(f"tol must be positive, got {self.tol}")
        for name in ("rings_per_slit", "n_cap", "n_edge", "far_circles",
                     "far_angles"):
            if getattr(self, name) <= 0:
                raise ConfigError(f"{name} must be positive")
        if not self.far_radius > 2.0:
            raise ConfigError("far_radius must exceed 2 (units of rscale)")
        if self.mesh_format not in ("obj", "ply", "csv"):
            raise ConfigError(
                f"mesh_format must be obj, ply or csv, got {self.mesh_format!r}"
            )
        if self.A == 0.0:
            raise ConfigError("A must be nonzero")
        return curve


_SECTIONS = {
    "curve": ("a",),
    "surface": ("tau", "theta", "A"),
    "quadrature": ("tol",),
    "mesh": ("rings_per_slit", "n_cap", "n_edge", "far_circles",
             "far_angles", "far_radius"),
    "output": ("out", "mesh_format", "report"),
}
_INT_KEYS = {"rings_per_slit", "n_cap", "n_edge", "far_circles", "far_angles"}
_FLOAT_KEYS = {"theta", "A", "tol", "far_radius"}


def parse_point_list(text: str) -> tuple:
    toks = [t for t in re.split(r"[,\s]+", text.strip()) if t]
    try:
        return tuple(float(t) for t in toks)
    except ValueError as e:
        raise ConfigError(f"bad branch point list {text!r}: {e}")


def read_config(path) -> JobConfig:
    """Load an INI config; unknown sections or keys are errors."""
    cp = configparser.ConfigParser()
    cp.optionxform = str  # keep 'A' distinct from 'a'
    try:
        with open(path) as fh:
            cp.read_file(fh)
    except OSError as e:
        raise ConfigError(f"cannot read config {path}: {e}")
    except configparser.Error as e:
        raise ConfigError(f"malformed config {path}: {e}")
    cfg = JobConfig()
    for section in cp.sections():
        if section not in _SECTIONS:
            raise ConfigError(f"unknown config section [{section}]")
        for key, raw in cp.items(section):
            if key not in _SECTIONS[section]:
                raise ConfigError(f"unknown key {key!r} in [{section}]")
            if key == "a":
                cfg.a = parse_point_list(raw)
            elif key in _INT_KEYS:
                cfg = _set_num(cfg, key, raw, int)
            elif key in _FLOAT_KEYS:
                cfg = _set_num(cfg, key, raw, float)
            else:
                setattr(cfg, key, raw)
    return cfg


def _set_num(cfg, key, raw, kind):
    try:
        setattr(cfg, key, kind(raw))
    except ValueError:
        raise ConfigError(f"key {key} expects {kind.__name__}, got {raw!r}")
    return cfg


def write_config(cfg: JobConfig, path) -> None:
    """Serialize a config so that read_config(write_config(c)) == c."""
    cp = configparser.ConfigParser()
    cp.optionxform = str
    for section, keys in _SECTIONS.items():
        cp.add_section(section)
        for key in keys:
            val = getattr(cfg, key)
            if val is None:
                continue
            if key == "a":
                val = ", ".join(repr(v) for v in val)
            elif isinstance(val, float):
                val = repr(val)
            cp.set(section, key, str(val))
    with open(path, "w") as fh:
        cp.write(fh)


def merge_flags(cfg: JobConfig, args) -> JobConfig:
    """Apply set flags on top of the config (flags > file > defaults)."""
    cfg = dataclasses.replace(cfg)
    if getattr(args, "a", None) is not None:
        cfg.a = parse_point_list(args.a)
    for flag, key in (("tau", "tau"), ("theta", "theta"), ("A", "A"),
                      ("tol", "tol"), ("out", "out"),
                      ("mesh_format", "mesh_format"), ("report", "report")):
        val = getattr(args, flag, None)
        if val is not None:
            setattr(cfg, key, val)
    return cfg


# ---------------------------------------------------------------------------
# mesh and metadata serialization

_AXIS_NOTE = ("third coordinate is the Lorentzian height u = x3;"
              " viewers may treat it as Euclidean z")


def write_obj(path, mesh: SurfaceMesh) -> None:
    """OBJ text: 'v x1 x2 x3' vertices, quads split into two triangles."""
    with open(path, "w") as fh:
        fh.write(f"# maxgraphs {__version__}\n# {_AXIS_NOTE}\n")
        for v in mesh.vertices:
            fh.write(f"v {v[0]:.17g} {v[1]:.17g} {v[2]:.17g}\n")
        for q in mesh.faces:
            i, j, k, l = (int(x) + 1 for x in q)
            fh.write(f"f {i} {j} {k}\nf {i} {k} {l}\n")


def read_obj(path):
    """(vertices (m,3), triangles (t,3) zero-based) from an OBJ file."""
    verts, tris = [], []
    with open(path) as fh:
        for line in fh:
            parts = line.split()
            if not parts:
                continue
            if parts[0] == "v":
                verts.append([float(x) for x in parts[1:4]])
            elif parts[0] == "f":
                tris.append([int(x.split("/")[0]) - 1 for x in parts[1:4]])
    return np.array(verts), np.array(tris, dtype=np.int64)


def write_ply(path, mesh: SurfaceMesh) -> None:
    """Binary little endian PLY with float64 vertices and quad faces."""
    header = (
        "ply\n"
        "format binary_little_endian 1.0\n"
        f"comment maxgraphs {__version__}\n"
        f"comment {_AXIS_NOTE}\n"
        f"element vertex {len(mesh.vertices)}\n"
        "property double x\n"
        "property double y\n"
        "property double z\n"
        f"element face {len(mesh.faces)}\n"
        "property list uchar int32 vertex_indices\n"
        "end_header\n"
    )
    with open(path, "wb") as fh:
        fh.write(header.encode("ascii"))
        fh.write(np.ascontiguousarray(mesh.vertices,
                                      dtype="<f8").tobytes())
        for q in mesh.faces:
            fh.write(struct.pack("<B4i", 4, *(int(x) for x in q)))


def read_ply(path):
    """(vertices (m,3), quads (k,4)) back from write_ply output."""
    with open(path, "rb") as fh:
        raw = fh.read()
    end = raw.index(b"end_header\n") + len(b"end_header\n")
    header = raw[:end].decode("ascii").splitlines()
    n_vert = n_face = 0
    for line in header:
        parts = line.split()
        if parts[:2] == ["element", "vertex"]:
            n_vert = int(parts[2])
        elif parts[:2] == ["element", "face"]:
            n_face = int(parts[2])
    body = raw[end:]
    verts = np.frombuffer(body, dtype="<f8", count=3 * n_vert)
    verts = verts.reshape(n_vert, 3).copy()
    offset = 24 * n_vert
    faces = np.empty((n_face, 4), dtype=np.int64)
    for i in range(n_face):
        cnt = body[offset]
        vals = struct.unpack_from(f"<{cnt}i", body, offset + 1)
        faces[i] = vals
        offset += 1 + 4 * cnt
    return verts, faces


def write_csv(path, mesh: SurfaceMesh) -> None:
    """Vertex table with parameter provenance columns."""
    with open(path, "w") as fh:
        fh.write("x1,x2,x3,re_z,im_z,bank,region,ring\n")
        for v, z, b, rg, ri in zip(mesh.vertices, mesh.z, mesh.bank,
                                   mesh.region, mesh.ring):
            fh.write(f"{v[0]:.17g},{v[1]:.17g},{v[2]:.17g},"
                     f"{z.real:.17g},{z.imag:.17g},{b},{rg},{ri}\n")


def read_csv(path):
    """(vertices (m,3), z (m,), bank (m,)) back from write_csv output."""
    verts, zs, banks = [], [], []
    with open(path) as fh:
        next(fh)
        for line in fh:
            parts = line.rstrip("\n").split(",")
            verts.append([float(x) for x in parts[:3]])
            zs.append(complex(float(parts[3]), float(parts[4])))
            banks.append(parts[5])
    return np.array(verts), np.array(zs), np.array(banks)


_MESH_WRITERS = {"obj": write_obj, "ply": write_ply, "csv": write_csv}


def write_metadata(path, data, graph, mesh, mesh_file, fmt) -> None:
    doc = {
        "tool": "maxgraphs",
        "version": __version__,
        "curve": {"a": list(data.curve.a), "n": data.curve.n},
        "tau": data.tau.bitstring if data.tau is not None else None,
        "b": list(data.b),
        "c": list(data.c),
        "theta": data.theta,
        "A": data.A,
        "z0": [graph.z0.real, graph.z0.imag],
        "base_point": [float(v) for v in graph.base_point],
        "growth": graph.growth,
        "singularities": [[float(v) for v in row]
                          for row in graph.singularities],
        "mesh": {"file": mesh_file, "format": fmt,
                 "vertices": int(len(mesh.vertices)),
                 "faces": int(len(mesh.faces))},
    }
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")


def read_metadata(path) -> dict:
    with open(path) as fh:
        return json.load(fh)


# ---------------------------------------------------------------------------
# subcommands

def cmd_enumerate(cfg: JobConfig, out=None) -> int:
    out = out or sys.stdout
    # the selection table covers every tau, so any configured one is moot
    cfg = dataclasses.replace(cfg, tau="all")
    curve = cfg.validate()
    choices = enumerate_admissible(curve)
    pairs = congruence_classes(choices)
    class_of = {}
    for idx, (rep, mirror) in enumerate(pairs):
        class_of[rep.bits] = (idx, mirror.bitstring)
        class_of[mirror.bits] = (idx, rep.bitstring)
    print(f"curve a = {tuple(curve.a)}   n = {curve.n}   "
          f"choices = {len(choices)}   classes = {len(pairs)}", file=out)
    print(f"{'bits':<8}{'b':<24}{'c':<24}{'growth':>12}  class  partner",
          file=out)
    for ch in choices:
        d = build_data(curve, ch, theta=cfg.theta, A=cfg.A)
        idx, partner = class_of[ch.bits]
        print(f"{ch.bitstring:<8}{str(ch.b):<24}{str(ch.c):<24}"
              f"{growth_coefficient(d):>12.6g}  {idx:>5}  {partner}",
              file=out)
    return 0


def _single_data(cfg: JobConfig, curve, debug_break_branch=False):
    if cfg.tau == "all":
        raise ConfigError("this command needs a single tau bit string")
    bits = tuple(ch == "1" for ch in cfg.tau)
    data = build_data(curve, SpinChoice(curve, bits), theta=cfg.theta,
                      A=cfg.A)
    if debug_break_branch:
        data = dataclasses.replace(data, debug_break_branch=True)
    return data


def cmd_generate(cfg: JobConfig, out=None) -> int:
    out = out or sys.stdout
    curve = cfg.validate()
    data = _single_data(cfg, curve)
    graph = build_graph(data, tol=cfg.tol)
    mesh = sample_mesh(
        data, z0=graph.z0, tol=max(cfg.tol, 1e-12) * 10.0,
        rings_per_slit=cfg.rings_per_slit, n_cap=cfg.n_cap,
        n_edge=cfg.n_edge, far_circles=cfg.far_circles,
        far_angles=cfg.far_angles, far_radius=cfg.far_radius,
    )
    outdir = Path(cfg.out)
    outdir.mkdir(parents=True, exist_ok=True)
    stem = f"surface_{data.tau.bitstring}"
    mesh_file = f"{stem}.{cfg.mesh_format}"
    _MESH_WRITERS[cfg.mesh_format](outdir / mesh_file, mesh)
    write_metadata(outdir / f"{stem}.json", data, graph, mesh,
                   mesh_file, cfg.mesh_format)
    print(f"wrote {outdir / mesh_file} ({len(mesh.vertices)} vertices,"
          f" {len(mesh.faces)} quads) and {stem}.json", file=out)
    return 0


def cmd_verify(cfg: JobConfig, debug_break_branch=False,
               out=None) -> int:
    out = out or sys.stdout
    curve = cfg.validate()
    settings = VerifySettings(tol=cfg.tol)
    if cfg.tau == "all":
        result = verify_family(curve, theta=cfg.theta, A=cfg.A,
                               settings=settings, per_surface=True)
        text = result.to_text()
        passed = result.passed
    else:
        data = _single_data(cfg, curve, debug_break_branch)
        report = verify_surface(data, settings=settings)
        text = report.to_text()
        passed = report.passed
    if cfg.report:
        Path(cfg.report).parent.mkdir(parents=True, exist_ok=True)
        with open(cfg.report, "w") as fh:
            fh.write(text)
        print(f"report written to {cfg.report}", file=out)
    else:
        print(text, end="", file=out)
    return 0 if passed else 1


# ---------------------------------------------------------------------------
# argument parsing

def _build_parser() -> argparse.ArgumentParser:
    shared = argparse.ArgumentParser(add_help=False)
    shared.add_argument("--config", metavar="PATH",
                        help="INI config file; flags override its values")
    shared.add_argument("--a", metavar="LIST",
                        help="branch points, e.g. '-1, 1'")
    shared.add_argument("--tau", metavar="BITS|all",
                        help="endpoint selection bits, or 'all'")
    shared.add_argument("--theta", type=float, help="rotation angle")
    shared.add_argument("--A", type=float, help="homothety factor")
    shared.add_argument("--tol", type=float, help="quadrature tolerance")
    shared.add_argument("--out", metavar="DIR", help="output directory")
    shared.add_argument("--mesh-format", dest="mesh_format",
                        choices=("obj", "ply", "csv"))
    shared.add_argument("--report", metavar="PATH",
                        help="write the verification report here")
    shared.add_argument("--debug-break-branch", action="store_true",
                        help=argparse.SUPPRESS)

    p = argparse.ArgumentParser(
        prog="maxgraphs",
        description="entire maximal graphs with conelike singularities",
    )
    p.add_argument("--version", action="version",
                   version=f"maxgraphs {__version__}")
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("enumerate", parents=[shared],
                   help="list spin choices, classes and growths")
    sub.add_parser("generate", parents=[shared],
                   help="sample one surface and write mesh plus metadata")
    sub.add_parser("verify", parents=[shared],
                   help="run the numerical check suite")
    return p


def _join_a_flag(argv):
    # argparse mistakes values like '-3,-1,1,3' for options; fuse them
    out, it = [], iter(argv)
    for tok in it:
        if tok == "--a":
            nxt = next(it, None)
            out.append(tok if nxt is None else f"--a={nxt}")
        else:
            out.append(tok)
    return out


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    args = _build_parser().parse_args(_join_a_flag(argv))
    try:
        cfg = read_config(args.config) if args.config else JobConfig()
        cfg = merge_flags(cfg, args)
        if args.command == "enumerate":
            return cmd_enumerate(cfg)
        if args.command == "generate":
            return cmd_generate(cfg)
        return cmd_verify(cfg, debug_break_branch=args.debug_break_branch)
    except (ConfigError, CurveError) as e:
        print(f"config error: {e}", file=sys.stderr)
        return 2
    except (ToleranceError, SlitCollapseError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
