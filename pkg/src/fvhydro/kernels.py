"""Backend selection for the hot reconstruction kernels.

The numba-compiled kernels are used when numba imports cleanly; setting the
environment variable FVHYDRO_NO_NUMBA=1 forces the pure-numpy fallback.
benchmarks/bench_kernels.py compares the two paths.
"""

import os

from . import _cweno_np

_DISABLED = os.environ.get("FVHYDRO_NO_NUMBA", "").lower() in ("1", "true", "yes")

if not _DISABLED:
    try:
        from . import _cweno_nb as _impl

        _BACKEND = "numba"
    except ImportError:
        _impl = _cweno_np
        _BACKEND = "numpy"
else:
    _impl = _cweno_np
    _BACKEND = "numpy"

cweno3_coeffs = _impl.cweno3_coeffs
cweno5_coeffs = _impl.cweno5_coeffs
reconstruct_eval = _impl.reconstruct_eval


def backend_name() -> str:
    return _BACKEND
