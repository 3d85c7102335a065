"""Kernel backend selection.

The compiled extension is used when it imports; setting the environment
variable ``NEUROCACTUS_PURE=1`` forces the numpy fallback.
"""

import os

from . import _pykernels

python_backend = _pykernels

if os.environ.get("NEUROCACTUS_PURE", "") not in ("", "0"):
    compiled_backend = None
else:
    try:
        from . import _ckernels as compiled_backend
    except ImportError:
        compiled_backend = None

if compiled_backend is not None:
    rk4_slot = compiled_backend.rk4_slot
    hebbian_step = compiled_backend.hebbian_step
    BACKEND = "cython"
else:
    rk4_slot = _pykernels.rk4_slot
    hebbian_step = _pykernels.hebbian_step
    BACKEND = "python"

ZERO = _pykernels.ZERO
CONSTANT = _pykernels.CONSTANT
IMPULSE = _pykernels.IMPULSE
SINUSOID = _pykernels.SINUSOID
PHI_CODES = {
    "tanh": _pykernels.TANH,
    "logistic": _pykernels.LOGISTIC,
    "algebraic": _pykernels.ALGEBRAIC,
}
