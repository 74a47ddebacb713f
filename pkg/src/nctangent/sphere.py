"""Fuzzy sphere in its N-dimensional matrix realization.

The coordinates are rescaled spin matrices X^i = hbar * J^i with
hbar = 2/sqrt(N^2 - 1), so that [X^i, X^j] = i hbar eps^{ijk} X^k and
sum_i (X^i)^2 = 1 hold exactly.  The module also carries the closed forms
for the projectors, the curvature tensor, its contraction, the scalar
curvature (2 - 3 hbar^2 + hbar^4), and the rank-one free normal module,
all used as oracles against the generic calculus.
"""

from __future__ import annotations

import math

import numpy as np

from .algebra import AlgebraElement, ParameterError
from .calculus import (
    CurvatureTensor,
    ModuleOperator,
    ModuleVector,
    NCGeometry,
    metric,
    random_normal_vector,
)

__all__ = [
    "EPSILON",
    "FuzzySphere",
    "build_fuzzy_sphere",
    "angular_momentum_matrices",
    "tangent_projector_from_brackets",
    "epsilon_identity_residuals",
    "curvature_closed_form",
    "contracted_curvature_closed_form",
    "scalar_curvature_closed_form",
    "coordinate_vector",
    "normal_module_residuals",
]

# totally antisymmetric tensor with EPSILON[0, 1, 2] = 1, stored explicitly
EPSILON = np.zeros((3, 3, 3), dtype=np.int64)
for _even in ((0, 1, 2), (1, 2, 0), (2, 0, 1)):
    EPSILON[_even] = 1
for _odd in ((0, 2, 1), (2, 1, 0), (1, 0, 2)):
    EPSILON[_odd] = -1
EPSILON.setflags(write=False)


def angular_momentum_matrices(dim: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Hermitian spin matrices with [J^a, J^b] = i eps^{abc} J^c and J^3 diagonal.

    Standard ladder construction for spin j = (dim - 1)/2 with weights in
    descending order j, j-1, ..., -j.
    """
    if dim < 2:
        raise ParameterError(f"representation dimension must be >= 2, got {dim}")
    j = (dim - 1) / 2.0
    weights = j - np.arange(dim)
    j3 = np.diag(weights).astype(np.complex128)
    jplus = np.zeros((dim, dim), dtype=np.complex128)
    for row in range(1, dim):
        m = weights[row]
        jplus[row - 1, row] = math.sqrt(j * (j + 1) - m * (m + 1))
    jminus = jplus.conj().T
    j1 = (jplus + jminus) / 2
    j2 = (jplus - jminus) / 2j
    return j1, j2, j3


class FuzzySphere:
    """N-dimensional fuzzy sphere: three rescaled spin matrices and their geometry."""

    __slots__ = ("dim", "hbar", "geometry")

    def __init__(self, dim: int):
        if dim < 2:
            raise ParameterError(f"representation dimension must be >= 2, got {dim}")
        self.dim = dim
        self.hbar = 2.0 / math.sqrt(dim * dim - 1.0)
        spin = angular_momentum_matrices(dim)
        coords = [AlgebraElement._wrap(self.hbar * mat) for mat in spin]
        x = np.stack([c.entries for c in coords])
        eye = np.eye(dim, dtype=np.complex128)
        normal = np.einsum("iab,jbc->ijac", x, x)      # Pi^{ij} = X^i X^j
        tangent = -normal.copy()
        for i in range(3):
            tangent[i, i] += eye                       # D^{ij} = delta^{ij} - X^i X^j
        self.geometry = NCGeometry(coords, self.hbar, tangent, normal, name=f"fuzzy-sphere[{dim}]")

    @property
    def coordinates(self) -> tuple[AlgebraElement, ...]:
        return self.geometry.coordinates

    def __repr__(self):
        return f"FuzzySphere(dim={self.dim}, hbar={self.hbar:.6g})"


def build_fuzzy_sphere(dim: int) -> FuzzySphere:
    return FuzzySphere(dim)


def tangent_projector_from_brackets(fs: FuzzySphere) -> ModuleOperator:
    """D^{ij} = (1/(i hbar)^2) [X^j, X^k][X^i, X^k], the double-commutator form."""
    g = fs.geometry
    x = g.x_stack
    n = g.dim
    scale = 1.0 / (1j * g.hbar) ** 2
    blocks = np.zeros((3, 3, n, n), dtype=np.complex128)
    for i in range(3):
        for j in range(3):
            acc = np.zeros((n, n), dtype=np.complex128)
            for k in range(3):
                acc += (x[j] @ x[k] - x[k] @ x[j]) @ (x[i] @ x[k] - x[k] @ x[i])
            blocks[i, j] = scale * acc
    return ModuleOperator(g, blocks)


def epsilon_identity_residuals(fs: FuzzySphere) -> dict[str, float]:
    """Residuals of the eps-contraction identities, numeric tables included."""
    g = fs.geometry
    x = g.x_stack
    n = g.dim
    ih = 1j * g.hbar
    eye = np.eye(n, dtype=np.complex128)

    vector = 0.0
    for i in range(3):
        acc = np.zeros((n, n), dtype=np.complex128)
        for j in range(3):
            for k in range(3):
                if EPSILON[i, j, k]:
                    acc += EPSILON[i, j, k] * (x[j] @ x[k])
        vector = max(vector, float(np.max(np.abs(acc - ih * x[i]))))

    acc = np.zeros((n, n), dtype=np.complex128)
    for i in range(3):
        for j in range(3):
            for k in range(3):
                if EPSILON[i, j, k]:
                    acc += EPSILON[i, j, k] * (x[i] @ x[j] @ x[k])
    scalar = float(np.max(np.abs(acc - ih * eye)))

    # integer self-tests of the stored table
    double = np.einsum("ikl,jkl->ij", EPSILON, EPSILON) - 2 * np.eye(3, dtype=np.int64)
    single = np.einsum("ijk,imn->jkmn", EPSILON, EPSILON) - (
        np.einsum("jm,kn->jkmn", np.eye(3, dtype=np.int64), np.eye(3, dtype=np.int64))
        - np.einsum("jn,km->jkmn", np.eye(3, dtype=np.int64), np.eye(3, dtype=np.int64))
    )
    return {
        "vector_identity": vector,
        "scalar_identity": scalar,
        "table_double_contraction": float(np.max(np.abs(double))),
        "table_single_contraction": float(np.max(np.abs(single))),
    }


def curvature_closed_form(fs: FuzzySphere) -> CurvatureTensor:
    """The six-term closed form of R^{ijkl} in eps tables and cubic monomials."""
    g = fs.geometry
    x = g.x_stack
    n = g.dim
    ih = 1j * g.hbar
    out = np.zeros((3, 3, 3, 3, n, n), dtype=np.complex128)
    for i in range(3):
        for j in range(3):
            for k in range(3):
                for l in range(3):
                    acc = np.zeros((n, n), dtype=np.complex128)
                    for p in range(3):
                        for q in range(3):
                            coeff = (
                                EPSILON[i, k, p] * EPSILON[j, l, q]
                                - EPSILON[j, k, p] * EPSILON[i, l, q]
                            )
                            if coeff:
                                acc += coeff * (x[p] @ x[q])
                    for q in range(3):
                        if EPSILON[j, l, q]:
                            acc -= ih * EPSILON[j, l, q] * (x[k] @ x[i] @ x[q])
                    for p in range(3):
                        if EPSILON[j, k, p]:
                            acc -= ih * EPSILON[j, k, p] * (x[p] @ x[i] @ x[l])
                    for p in range(3):
                        if EPSILON[i, k, p]:
                            acc += ih * EPSILON[i, k, p] * (x[p] @ x[j] @ x[l])
                    for q in range(3):
                        if EPSILON[i, l, q]:
                            acc += ih * EPSILON[i, l, q] * (x[k] @ x[j] @ x[q])
                    for p in range(3):
                        if EPSILON[i, j, p]:
                            acc += ih * EPSILON[i, j, p] * (x[k] @ x[p] @ x[l])
                    out[i, j, k, l] = acc
    return CurvatureTensor(g, out)


def contracted_curvature_closed_form(fs: FuzzySphere) -> np.ndarray:
    """Closed form of sum_{i,k} P^{ik} R^{ijkl} as a (j, l) block array.

    Equals (1 - hbar^2 - hbar^4) eps^{jlm} X^m + i hbar (1 - 3 hbar^2) X^j X^l
    + i hbar^3 delta^{jl}.
    """
    g = fs.geometry
    x = g.x_stack
    n = g.dim
    h2 = g.hbar**2
    ih = 1j * g.hbar
    eye = np.eye(n, dtype=np.complex128)
    out = np.zeros((3, 3, n, n), dtype=np.complex128)
    for j in range(3):
        for l in range(3):
            acc = np.zeros((n, n), dtype=np.complex128)
            for m in range(3):
                if EPSILON[j, l, m]:
                    acc += (1 - h2 - h2 * h2) * EPSILON[j, l, m] * x[m]
            acc += ih * (1 - 3 * h2) * (x[j] @ x[l])
            if j == l:
                acc += ih * h2 * eye
            out[j, l] = acc
    return out


def scalar_curvature_closed_form(fs: FuzzySphere) -> AlgebraElement:
    """(2 - 3 hbar^2 + hbar^4) times the unit."""
    h2 = fs.hbar**2
    value = 2.0 - 3.0 * h2 + h2 * h2
    return AlgebraElement._wrap(value * np.eye(fs.dim, dtype=np.complex128))


def coordinate_vector(fs: FuzzySphere) -> ModuleVector:
    """X = e_i X^i, the generator of the normal module."""
    return ModuleVector(fs.geometry, fs.geometry.x_stack.copy())


def normal_module_residuals(fs: FuzzySphere, trials: int, seed: int) -> dict[str, float]:
    """Rank-one freeness of the normal module Pi(A^3), generated by e_i X^i.

    generator: Pi fixes e_i X^i.  decomposition: every Pi(random) W equals
    (e_i X^i) * (X^j W^j).  freeness: a = sum_i X^i (X^i a) reconstructs any a,
    so X^i a = 0 for all i forces a = 0.
    """
    g = fs.geometry
    x = g.x_stack
    xvec = coordinate_vector(fs)
    projected = g.normal_projector(xvec)
    generator = float(np.max(np.abs(projected.stack - xvec.stack)))

    decomposition = 0.0
    freeness = 0.0
    for t in range(trials):
        w = random_normal_vector(g, seed + t)
        coeff = metric(xvec, w)  # X^j W^j (X hermitian)
        rebuilt = xvec * coeff
        decomposition = max(decomposition, float(np.max(np.abs(rebuilt.stack - w.stack))))

        a = w.stack[0]
        acc = np.zeros_like(a)
        for i in range(3):
            acc += x[i] @ (x[i] @ a)
        freeness = max(freeness, float(np.max(np.abs(acc - a))))
    return {
        "generator_fixed": generator,
        "decomposition": decomposition,
        "freeness_reconstruction": freeness,
    }
