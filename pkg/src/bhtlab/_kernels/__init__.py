"""Kernel backend selection.

The compiled extension is preferred when it imported cleanly; setting
``BHTLAB_PURE_PYTHON=1`` forces the numpy fallback.  Both backends share
semantics and enumeration order; ``BACKEND`` names the one in use.
"""

import os

from . import _pykernels

BACKEND = _pykernels.BACKEND_NAME
typeclass_atoms = _pykernels.typeclass_atoms
convolve_atoms = _pykernels.convolve_atoms
bucket_merge = _pykernels.bucket_merge
compositions = _pykernels.compositions

if not os.environ.get("BHTLAB_PURE_PYTHON"):
    try:
        from . import _ckernels  # type: ignore[attr-defined]

        BACKEND = _ckernels.BACKEND_NAME
        typeclass_atoms = _ckernels.typeclass_atoms
        convolve_atoms = _ckernels.convolve_atoms
        bucket_merge = _ckernels.bucket_merge
    except ImportError:
        pass

__all__ = [
    "BACKEND",
    "typeclass_atoms",
    "convolve_atoms",
    "bucket_merge",
    "compositions",
]
