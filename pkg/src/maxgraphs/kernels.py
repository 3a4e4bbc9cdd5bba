"""Backend selection for the numerical kernels.

Prefers the compiled extension, falls back to the numpy implementation, and
honors MAXGRAPHS_KERNELS=python|compiled for forcing a choice (useful for
benchmarks and for debugging suspected kernel mismatches).
"""
import os

_choice = os.environ.get("MAXGRAPHS_KERNELS", "").strip().lower()

if _choice == "python":
    from . import _kernels_py as _impl
elif _choice == "compiled":
    from . import _kernels as _impl  # ImportError here is intentional: forced
else:
    try:
        from . import _kernels as _impl
    except ImportError:
        from . import _kernels_py as _impl

BACKEND = _impl.BACKEND

branch_prod = _impl.branch_prod
branch_prod_slit = _impl.branch_prod_slit
panel_forms_line = _impl.panel_forms_line
panel_forms_sqrt = _impl.panel_forms_sqrt
