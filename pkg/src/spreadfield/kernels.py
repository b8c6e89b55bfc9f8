"""Kernel backend selection.

Prefers the compiled extension (`spreadfield._kernels`, built from Cython)
and falls back to the pure-Python twin with the identical contract.  Set
``SPREADFIELD_PURE_PY=1`` to force the fallback, e.g. for benchmarking.
"""

import os

from spreadfield import _kernels_py

if os.environ.get("SPREADFIELD_PURE_PY"):
    _backend = _kernels_py
    COMPILED = False
else:
    try:
        from spreadfield import _kernels as _backend  # type: ignore
        COMPILED = True
    except ImportError:
        _backend = _kernels_py
        COMPILED = False

BACKEND_NAME = "compiled" if COMPILED else "python"

run_path = _backend.run_path

STATUS_OK = _kernels_py.STATUS_OK
STATUS_STEP_UNDERFLOW = _kernels_py.STATUS_STEP_UNDERFLOW
STATUS_NOT_FINITE = _kernels_py.STATUS_NOT_FINITE
METHOD_RK45 = _kernels_py.METHOD_RK45
METHOD_RK4 = _kernels_py.METHOD_RK4
METHOD_EULER_MARUYAMA = _kernels_py.METHOD_EULER_MARUYAMA
ORDER_DET = _kernels_py.ORDER_DET
ORDER_STOCH1 = _kernels_py.ORDER_STOCH1
ORDER_STOCH2 = _kernels_py.ORDER_STOCH2
SMASS_CONST = _kernels_py.SMASS_CONST
SMASS_SHELL = _kernels_py.SMASS_SHELL
