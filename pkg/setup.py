"""Build script: compiles the optional quadrature kernel extension.

The package works without the extension (a numpy fallback is selected at
import time), so any failure here is demoted to a warning.
"""
import sys

from setuptools import setup

ext_modules = []
try:
    import numpy as np
    from Cython.Build import cythonize
    from setuptools import Extension

    ext_modules = cythonize(
        [
            Extension(
                "maxgraphs._kernels",
                ["src/maxgraphs/_kernels.pyx"],
                include_dirs=[np.get_include()],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                # all sqrt arguments are nonnegative by construction, so let
                # the compiler inline sqrt instead of the errno-checking call
                extra_compile_args=["-O3", "-fno-math-errno"],
            )
        ],
        compiler_directives={
            "language_level": 3,
            "boundscheck": False,
            "wraparound": False,
            "cdivision": True,
            "initializedcheck": False,
        },
    )
except Exception as exc:  # pragma: no cover - build environment dependent
    sys.stderr.write(f"maxgraphs: skipping compiled kernels ({exc}); "
                     "falling back to the numpy implementation\n")

setup(ext_modules=ext_modules)
