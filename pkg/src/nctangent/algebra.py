"""Dense complex matrix realization of algebra elements.

Every algebra element is an immutable N x N complex matrix.  ``@`` is the
algebra product, ``+``/``-`` the linear structure, and scalars act through
``*`` and ``/``.  Equality of elements is never exact: all identity checks in
this package are residual checks against a :class:`ToleranceSpec`.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "AlgebraElement",
    "AlgebraError",
    "DimensionMismatch",
    "ParameterError",
    "ToleranceSpec",
    "DEFAULT_TOLERANCE",
    "identity",
    "zero",
    "commutator",
    "anticommutator",
    "normalized_trace",
    "max_abs_entry",
    "residual",
    "random_element",
]


class AlgebraError(Exception):
    """Base error for misuse of the algebra layer."""


class DimensionMismatch(AlgebraError):
    """Binary operation between elements of different representation dimension."""


class ParameterError(ValueError):
    """Construction parameters outside the supported range."""


@dataclass(frozen=True)
class ToleranceSpec:
    """Absolute/relative allowance for residual checks.

    A check of ``A == B`` passes iff

        max_abs_entry(A - B) <= atol + rtol * max(max_abs_entry(A), max_abs_entry(B))
    """

    atol: float = 1e-10
    rtol: float = 1e-10

    def __post_init__(self):
        if self.atol < 0 or self.rtol < 0:
            raise ParameterError("tolerances must be nonnegative")

    def allowance(self, *scales: float) -> float:
        """Permitted residual for quantities of the given magnitudes."""
        return self.atol + self.rtol * max(scales, default=0.0)

    def matches(self, a: AlgebraElement, b: AlgebraElement) -> bool:
        return residual(a, b) <= self.allowance(max_abs_entry(a), max_abs_entry(b))


DEFAULT_TOLERANCE = ToleranceSpec()


def _as_matrix(entries) -> np.ndarray:
    arr = np.ascontiguousarray(entries, dtype=np.complex128)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise AlgebraError(f"expected a square matrix, got shape {arr.shape}")
    return arr


class AlgebraElement:
    """An N x N complex matrix regarded as an element of a matrix algebra."""

    __slots__ = ("entries",)

    def __init__(self, entries):
        arr = _as_matrix(entries).copy()
        arr.setflags(write=False)
        self.entries = arr

    @classmethod
    def _wrap(cls, arr: np.ndarray) -> AlgebraElement:
        # internal fast path: takes ownership of a freshly computed array
        arr = np.ascontiguousarray(arr, dtype=np.complex128)
        if arr.flags.writeable:
            arr.setflags(write=False)
        obj = object.__new__(cls)
        obj.entries = arr
        return obj

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    def _compatible(self, other: AlgebraElement) -> None:
        if self.dim != other.dim:
            raise DimensionMismatch(
                f"elements live in different algebras (dim {self.dim} vs {other.dim})"
            )

    def __add__(self, other):
        if not isinstance(other, AlgebraElement):
            return NotImplemented
        self._compatible(other)
        return AlgebraElement._wrap(self.entries + other.entries)

    def __sub__(self, other):
        if not isinstance(other, AlgebraElement):
            return NotImplemented
        self._compatible(other)
        return AlgebraElement._wrap(self.entries - other.entries)

    def __neg__(self):
        return AlgebraElement._wrap(-self.entries)

    def __mul__(self, scalar):
        if isinstance(scalar, (int, float, complex, np.integer, np.floating, np.complexfloating)):
            return AlgebraElement._wrap(self.entries * complex(scalar))
        return NotImplemented

    __rmul__ = __mul__

    def __truediv__(self, scalar):
        return self * (1.0 / complex(scalar))

    def __matmul__(self, other):
        if not isinstance(other, AlgebraElement):
            return NotImplemented
        self._compatible(other)
        return AlgebraElement._wrap(self.entries @ other.entries)

    def adjoint(self) -> AlgebraElement:
        """Conjugate transpose; the *-involution of the algebra."""
        return AlgebraElement._wrap(self.entries.conj().T)

    def __repr__(self):
        return f"AlgebraElement(dim={self.dim}, max_abs={max_abs_entry(self):.3e})"


def identity(dim: int) -> AlgebraElement:
    return AlgebraElement._wrap(np.eye(dim, dtype=np.complex128))


def zero(dim: int) -> AlgebraElement:
    return AlgebraElement._wrap(np.zeros((dim, dim), dtype=np.complex128))


def commutator(a: AlgebraElement, b: AlgebraElement) -> AlgebraElement:
    """ab - ba."""
    a._compatible(b)
    return AlgebraElement._wrap(a.entries @ b.entries - b.entries @ a.entries)


def anticommutator(a: AlgebraElement, b: AlgebraElement) -> AlgebraElement:
    """ab + ba."""
    a._compatible(b)
    return AlgebraElement._wrap(a.entries @ b.entries + b.entries @ a.entries)


def normalized_trace(a: AlgebraElement) -> complex:
    """Trace divided by the dimension, so the unit has trace 1."""
    return complex(np.trace(a.entries)) / a.dim


def max_abs_entry(a: AlgebraElement) -> float:
    """Largest complex modulus over the entries; the residual norm used throughout."""
    return float(np.max(np.abs(a.entries))) if a.dim else 0.0


def residual(a: AlgebraElement, b: AlgebraElement) -> float:
    """max_abs_entry(a - b)."""
    a._compatible(b)
    return float(np.max(np.abs(a.entries - b.entries)))


def random_element(dim: int, seed: int, hermitian: bool = False) -> AlgebraElement:
    """Seeded random element with real/imaginary parts i.i.d. uniform on [-1, 1].

    Entries come from a PCG64 stream (real part matrix drawn first, then the
    imaginary part), so equal seeds give bit-identical matrices.  With
    ``hermitian=True`` the draw is symmetrized to (a + a*)/2.
    """
    rng = np.random.Generator(np.random.PCG64(seed))
    entries = _random_matrix(rng, dim)
    if hermitian:
        entries = (entries + entries.conj().T) / 2
    return AlgebraElement(entries)


def _random_matrix(rng: np.random.Generator, dim: int) -> np.ndarray:
    real = rng.uniform(-1.0, 1.0, size=(dim, dim))
    imag = rng.uniform(-1.0, 1.0, size=(dim, dim))
    return real + 1j * imag
