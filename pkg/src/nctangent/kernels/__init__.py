"""Kernel backend selection.

The compiled extension is preferred when it was built; the numpy reference
implementation is a drop-in fallback with identical semantics.  Set
``NCTANGENT_KERNELS=fast`` or ``=ref`` to force a backend (``fast`` raises if
the extension is missing).
"""

from __future__ import annotations

import os

import numpy as np

from . import reference

_choice = os.environ.get("NCTANGENT_KERNELS", "auto").strip().lower()

if _choice in ("", "auto"):
    try:
        from . import _cykernels as _impl  # type: ignore[attr-defined]
    except ImportError:
        _impl = reference
elif _choice in ("fast", "cython", "ext"):
    from . import _cykernels as _impl  # type: ignore[attr-defined]
elif _choice in ("ref", "numpy", "reference"):
    _impl = reference
else:
    raise RuntimeError(
        f"unknown NCTANGENT_KERNELS value {_choice!r}; use 'auto', 'fast' or 'ref'"
    )

BACKEND: str = _impl.BACKEND

apply_operator = _impl.apply_operator
compose_operators = _impl.compose_operators
derive_stack = _impl.derive_stack
pairing = _impl.pairing
curvature_blocks = _impl.curvature_blocks
double_contraction = _impl.double_contraction


def derive_blocks(x: np.ndarray, blocks: np.ndarray, scale: complex) -> np.ndarray:
    """Derivation of every block of an operator: out[i, p, q] = scale * [X^i, B^{pq}]."""
    p, q, n, _ = blocks.shape
    flat = derive_stack(x, blocks.reshape(p * q, n, n), scale)
    return flat.reshape(x.shape[0], p, q, n, n)
