"""Numerical kernel backend selection.

The compiled extension is preferred when importable; the pure-Python module
is the fallback. Set RHOSOLVE_PURE_PYTHON=1 to force the fallback.
"""

import os

from . import _pykernels

if os.environ.get("RHOSOLVE_PURE_PYTHON", "") not in ("", "0"):
    _impl = _pykernels
else:
    try:
        from . import _ckernels as _impl
    except ImportError:
        _impl = _pykernels

BACKEND = _impl.BACKEND_NAME

factorize = _impl.factorize
lower_solve = _impl.lower_solve
upper_solve = _impl.upper_solve
csr_matvec = _impl.csr_matvec


def available_backends():
    """Importable backends keyed by name, for parity tests and benchmarks."""
    out = {"python": _pykernels}
    try:
        from . import _ckernels

        out["c"] = _ckernels
    except ImportError:
        pass
    return out
