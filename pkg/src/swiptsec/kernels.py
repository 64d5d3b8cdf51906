"""Backend selection for the Monte Carlo gain kernel.

The compiled extension is used when it was built; set
``SWIPTSEC_BACKEND=python`` to force the numpy implementation.
"""
import os

from . import _kernels_py

BACKEND = "python"
realization_gains = _kernels_py.realization_gains

if os.environ.get("SWIPTSEC_BACKEND", "").lower() != "python":
    try:
        from . import _kernels
    except ImportError:
        pass
    else:
        BACKEND = "cython"
        realization_gains = _kernels.realization_gains


def python_gains(*args):
    return _kernels_py.realization_gains(*args)
