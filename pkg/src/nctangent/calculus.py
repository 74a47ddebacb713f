"""Free-module calculus over a matrix realization of a noncommutative surface.

A geometry consists of m hermitian coordinate elements X^1..X^m, a nonzero
deformation parameter, and a tangent projector D acting on the free right
module A^m (normal complement Pi = 1 - D).  On top of that this module builds
the metric <U, V> = sum_i (U^i)* V^i, the inner derivations
d^i(a) = [X^i, a]/(i hbar), the projected connection, its curvature, scalar
curvature, divergence, trace closedness, and module ranks.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from . import kernels
from .algebra import (
    DEFAULT_TOLERANCE,
    AlgebraElement,
    AlgebraError,
    ParameterError,
    ToleranceSpec,
    _random_matrix,
)

__all__ = [
    "NCGeometry",
    "ModuleVector",
    "ModuleOperator",
    "CurvatureTensor",
    "GeometryMismatch",
    "NotTangent",
    "NotAProjector",
    "ProjectorReport",
    "identity_operator",
    "metric",
    "derivation",
    "ambient_connection",
    "tangent_connection",
    "ambient_connection_along",
    "inner_connection",
    "curvature_operator",
    "curvature_tensor",
    "poisson_operator",
    "scalar_curvature",
    "divergence",
    "closedness_defect",
    "module_rank",
    "projector_checks",
    "metric_compatibility_defect",
    "is_tangent",
    "require_tangent",
    "random_module_vector",
    "random_tangent_vector",
    "random_normal_vector",
]


class GeometryMismatch(AlgebraError):
    """Operands belong to different geometries."""


class NotTangent(AlgebraError):
    """A vector required to lie in the tangent module D(A^m) does not."""


class NotAProjector(AlgebraError):
    """An operator required to be idempotent is not."""


def _stack(elements: Iterable[AlgebraElement]) -> np.ndarray:
    return np.ascontiguousarray(np.stack([e.entries for e in elements]))


class NCGeometry:
    """m hermitian coordinates, deformation parameter, and projector pair."""

    __slots__ = ("x_stack", "hbar", "tangent_projector", "normal_projector", "name")

    def __init__(
        self,
        coordinates: Sequence[AlgebraElement],
        hbar: float,
        tangent_blocks: np.ndarray,
        normal_blocks: np.ndarray | None = None,
        name: str = "",
    ):
        if not coordinates:
            raise ParameterError("at least one coordinate element is required")
        if hbar == 0.0:
            raise ParameterError("deformation parameter must be nonzero")
        dims = {c.dim for c in coordinates}
        if len(dims) != 1:
            raise GeometryMismatch(f"coordinate elements have mixed dimensions {sorted(dims)}")
        self.x_stack = _stack(coordinates)
        self.x_stack.setflags(write=False)
        self.hbar = float(hbar)
        self.name = name
        m, n = self.m, self.dim
        tangent_blocks = np.array(tangent_blocks, dtype=np.complex128, order="C")
        if tangent_blocks.shape != (m, m, n, n):
            raise ParameterError(
                f"tangent projector blocks must have shape {(m, m, n, n)}, "
                f"got {tangent_blocks.shape}"
            )
        if normal_blocks is None:
            normal_blocks = _identity_blocks(m, n) - tangent_blocks
        else:
            normal_blocks = np.array(normal_blocks, dtype=np.complex128, order="C")
            if normal_blocks.shape != (m, m, n, n):
                raise ParameterError("normal projector blocks have the wrong shape")
        self.tangent_projector = ModuleOperator(self, tangent_blocks)
        self.normal_projector = ModuleOperator(self, normal_blocks)

    @property
    def m(self) -> int:
        return self.x_stack.shape[0]

    @property
    def dim(self) -> int:
        return self.x_stack.shape[1]

    @property
    def coordinates(self) -> tuple[AlgebraElement, ...]:
        return tuple(AlgebraElement._wrap(x) for x in self.x_stack)

    def coordinate(self, i: int) -> AlgebraElement:
        return AlgebraElement._wrap(self.x_stack[i])

    @property
    def derivation_scale(self) -> complex:
        """1/(i hbar), the prefactor of the inner derivations."""
        return complex(0.0, -1.0 / self.hbar)

    def __repr__(self):
        label = self.name or "geometry"
        return f"NCGeometry({label}, m={self.m}, dim={self.dim}, hbar={self.hbar:.6g})"


def _identity_blocks(m: int, n: int) -> np.ndarray:
    blocks = np.zeros((m, m, n, n), dtype=np.complex128)
    eye = np.eye(n, dtype=np.complex128)
    for i in range(m):
        blocks[i, i] = eye
    return blocks


def _same_geometry(a, b) -> None:
    if a.geometry is not b.geometry:
        raise GeometryMismatch("operands belong to different geometries")


class ModuleVector:
    """Element U = e_i U^i of the free right module A^m, stored as an (m, n, n) stack."""

    __slots__ = ("geometry", "stack")

    def __init__(self, geometry: NCGeometry, components):
        if isinstance(components, np.ndarray):
            stack = np.ascontiguousarray(components, dtype=np.complex128)
        else:
            stack = _stack(components)
        if stack.shape != (geometry.m, geometry.dim, geometry.dim):
            raise GeometryMismatch(
                f"expected {geometry.m} components of dimension {geometry.dim}"
            )
        self.geometry = geometry
        self.stack = stack  # treated as immutable

    def component(self, i: int) -> AlgebraElement:
        return AlgebraElement._wrap(self.stack[i])

    @property
    def components(self) -> tuple[AlgebraElement, ...]:
        return tuple(AlgebraElement._wrap(c) for c in self.stack)

    def max_abs(self) -> float:
        return float(np.max(np.abs(self.stack)))

    def __add__(self, other):
        if not isinstance(other, ModuleVector):
            return NotImplemented
        _same_geometry(self, other)
        return ModuleVector(self.geometry, self.stack + other.stack)

    def __sub__(self, other):
        if not isinstance(other, ModuleVector):
            return NotImplemented
        _same_geometry(self, other)
        return ModuleVector(self.geometry, self.stack - other.stack)

    def __neg__(self):
        return ModuleVector(self.geometry, -self.stack)

    def __mul__(self, other):
        # right module: U * a has components U^i a; scalars act entrywise
        if isinstance(other, AlgebraElement):
            if other.dim != self.geometry.dim:
                raise GeometryMismatch("algebra element has the wrong dimension")
            return ModuleVector(self.geometry, self.stack @ other.entries)
        if isinstance(other, (int, float, complex)):
            return ModuleVector(self.geometry, self.stack * complex(other))
        return NotImplemented

    def __rmul__(self, other):
        if isinstance(other, (int, float, complex)):
            return ModuleVector(self.geometry, self.stack * complex(other))
        return NotImplemented

    def __repr__(self):
        return f"ModuleVector(m={self.geometry.m}, dim={self.geometry.dim})"


class ModuleOperator:
    """Endomorphism of A^m acting by (T U)^i = sum_j T^{ij} U^j, blocks on the left."""

    __slots__ = ("geometry", "blocks")

    def __init__(self, geometry: NCGeometry, blocks: np.ndarray):
        blocks = np.ascontiguousarray(blocks, dtype=np.complex128)
        m, n = geometry.m, geometry.dim
        if blocks.shape != (m, m, n, n):
            raise GeometryMismatch(f"expected operator blocks of shape {(m, m, n, n)}")
        self.geometry = geometry
        self.blocks = blocks  # treated as immutable

    def block(self, i: int, j: int) -> AlgebraElement:
        return AlgebraElement._wrap(self.blocks[i, j])

    def __call__(self, vector: ModuleVector) -> ModuleVector:
        _same_geometry(self, vector)
        return ModuleVector(self.geometry, kernels.apply_operator(self.blocks, vector.stack))

    def compose(self, other: ModuleOperator) -> ModuleOperator:
        _same_geometry(self, other)
        return ModuleOperator(
            self.geometry, kernels.compose_operators(self.blocks, other.blocks)
        )

    __matmul__ = compose

    def __add__(self, other):
        if not isinstance(other, ModuleOperator):
            return NotImplemented
        _same_geometry(self, other)
        return ModuleOperator(self.geometry, self.blocks + other.blocks)

    def __sub__(self, other):
        if not isinstance(other, ModuleOperator):
            return NotImplemented
        _same_geometry(self, other)
        return ModuleOperator(self.geometry, self.blocks - other.blocks)

    def __neg__(self):
        return ModuleOperator(self.geometry, -self.blocks)

    def max_abs(self) -> float:
        return float(np.max(np.abs(self.blocks)))

    def block_trace(self) -> AlgebraElement:
        """sum_i T^{ii} as an algebra element."""
        acc = np.zeros((self.geometry.dim, self.geometry.dim), dtype=np.complex128)
        for i in range(self.geometry.m):
            acc += self.blocks[i, i]
        return AlgebraElement._wrap(acc)

    def __repr__(self):
        return f"ModuleOperator(m={self.geometry.m}, dim={self.geometry.dim})"


def identity_operator(geometry: NCGeometry) -> ModuleOperator:
    return ModuleOperator(geometry, _identity_blocks(geometry.m, geometry.dim))


class CurvatureTensor:
    """The m^4 array of algebra elements R^{ijkl} built from derivatives of D."""

    __slots__ = ("geometry", "components")

    def __init__(self, geometry: NCGeometry, components: np.ndarray):
        components = np.ascontiguousarray(components, dtype=np.complex128)
        m, n = geometry.m, geometry.dim
        if components.shape != (m, m, m, m, n, n):
            raise GeometryMismatch("curvature components have the wrong shape")
        self.geometry = geometry
        self.components = components  # treated as immutable

    def component(self, i: int, j: int, k: int, l: int) -> AlgebraElement:
        return AlgebraElement._wrap(self.components[i, j, k, l])

    def operator(self, i: int, j: int) -> ModuleOperator:
        """The module endomorphism U -> e_k R^{ijk}_l U^l for a fixed index pair."""
        return ModuleOperator(self.geometry, self.components[i, j])

    def max_abs(self) -> float:
        return float(np.max(np.abs(self.components)))

    def antisymmetry_residual(self) -> float:
        """max |R^{ijkl} + R^{jikl}| over all components."""
        swapped = self.components.transpose(1, 0, 2, 3, 4, 5)
        return float(np.max(np.abs(self.components + swapped)))

    def __repr__(self):
        return f"CurvatureTensor(m={self.geometry.m}, dim={self.geometry.dim})"


# ---------------------------------------------------------------------------
# metric, derivations, connections
# ---------------------------------------------------------------------------

def metric(u: ModuleVector, v: ModuleVector) -> AlgebraElement:
    """<U, V> = sum_i (U^i)* V^i."""
    _same_geometry(u, v)
    return AlgebraElement._wrap(kernels.pairing(u.stack, v.stack))


def derivation(geometry: NCGeometry, i: int, a: AlgebraElement) -> AlgebraElement:
    """d^i(a) = [X^i, a] / (i hbar)."""
    x = geometry.x_stack[i]
    s = geometry.derivation_scale
    return AlgebraElement._wrap(s * (x @ a.entries) - s * (a.entries @ x))


def _derive_vector_stack(geometry: NCGeometry, i: int, stack: np.ndarray) -> np.ndarray:
    x = geometry.x_stack[i]
    s = geometry.derivation_scale
    return s * (x @ stack) - s * (stack @ x)


def ambient_connection(geometry: NCGeometry, i: int, u: ModuleVector) -> ModuleVector:
    """Componentwise derivation e_k d^i(U^k); the flat connection of A^m."""
    _same_geometry_vec(geometry, u)
    return ModuleVector(geometry, _derive_vector_stack(geometry, i, u.stack))


def tangent_connection(
    geometry: NCGeometry,
    i: int,
    u: ModuleVector,
    tol: ToleranceSpec = DEFAULT_TOLERANCE,
) -> ModuleVector:
    """D applied to the ambient connection; defined on tangent vectors only."""
    require_tangent(geometry, u, tol)
    return geometry.tangent_projector(ambient_connection(geometry, i, u))


def ambient_connection_along(
    geometry: NCGeometry, b: AlgebraElement, u: ModuleVector
) -> ModuleVector:
    """Ambient connection along the inner derivation a -> [b, a]/(i hbar)."""
    _same_geometry_vec(geometry, u)
    s = geometry.derivation_scale
    return ModuleVector(geometry, s * (b.entries @ u.stack) - s * (u.stack @ b.entries))


def inner_connection(
    geometry: NCGeometry, b: AlgebraElement, u: ModuleVector
) -> ModuleVector:
    """Projected connection along the inner derivation generated by b."""
    return geometry.tangent_projector(ambient_connection_along(geometry, b, u))


# ---------------------------------------------------------------------------
# curvature
# ---------------------------------------------------------------------------

def curvature_operator(
    geometry: NCGeometry,
    i: int,
    j: int,
    u: ModuleVector,
    tol: ToleranceSpec = DEFAULT_TOLERANCE,
) -> ModuleVector:
    """nabla^i nabla^j U - nabla^j nabla^i U - nabla_{[d^i, d^j]} U for tangent U.

    The commutator of two inner derivations is the inner derivation generated
    by P^{ij} = [X^i, X^j]/(i hbar), so the third term is the projected
    connection along P^{ij}.
    """
    require_tangent(geometry, u, tol)
    d = geometry.tangent_projector
    grad_i = d(ambient_connection(geometry, i, u))
    grad_j = d(ambient_connection(geometry, j, u))
    term_ij = d(ambient_connection(geometry, i, grad_j))
    term_ji = d(ambient_connection(geometry, j, grad_i))
    p_ij = derivation(geometry, i, geometry.coordinate(j))
    return term_ij - term_ji - inner_connection(geometry, p_ij, u)


def curvature_tensor(geometry: NCGeometry) -> CurvatureTensor:
    """R^{ijkl} = sum_m d^i(D^{km}) d^j(D^{ml}) - d^j(D^{km}) d^i(D^{ml})."""
    dd = kernels.derive_blocks(
        geometry.x_stack, geometry.tangent_projector.blocks, geometry.derivation_scale
    )
    return CurvatureTensor(geometry, kernels.curvature_blocks(dd))


def poisson_operator(geometry: NCGeometry) -> ModuleOperator:
    """Blocks P^{ij} = [X^i, X^j] / (i hbar)."""
    m, n = geometry.m, geometry.dim
    blocks = np.empty((m, m, n, n), dtype=np.complex128)
    for i in range(m):
        blocks[i] = _derive_vector_stack(geometry, i, geometry.x_stack)
    return ModuleOperator(geometry, blocks)


def scalar_curvature(
    geometry: NCGeometry, tensor: CurvatureTensor | None = None
) -> AlgebraElement:
    """S = sum_{ijkl} P^{jl} P^{ik} R^{ijkl}, products taken in the order written."""
    if tensor is None:
        tensor = curvature_tensor(geometry)
    p = poisson_operator(geometry)
    return AlgebraElement._wrap(kernels.double_contraction(p.blocks, tensor.components))


# ---------------------------------------------------------------------------
# divergence and trace closedness
# ---------------------------------------------------------------------------

def divergence(
    geometry: NCGeometry, u: ModuleVector, tol: ToleranceSpec = DEFAULT_TOLERANCE
) -> AlgebraElement:
    """div(U) = sum_{i,k} D^{ik} d^i(U^k) for tangent U."""
    require_tangent(geometry, u, tol)
    d = geometry.tangent_projector.blocks
    m, n = geometry.m, geometry.dim
    acc = np.zeros((n, n), dtype=np.complex128)
    for i in range(m):
        du = _derive_vector_stack(geometry, i, u.stack)
        for k in range(m):
            acc += d[i, k] @ du[k]
    return AlgebraElement._wrap(acc)


def closedness_defect(
    geometry: NCGeometry, u: ModuleVector, tol: ToleranceSpec = DEFAULT_TOLERANCE
) -> complex:
    """Normalized trace of sum_{i,k} [X^i, Pi^{ik}] U^k.

    Vanishing for all tangent U is equivalent to the normalized trace being
    closed; the identity defect = i*hbar*trace(div(U)) ties it to the
    divergence.
    """
    require_tangent(geometry, u, tol)
    pi = geometry.normal_projector.blocks
    m, n = geometry.m, geometry.dim
    acc = np.zeros((n, n), dtype=np.complex128)
    for i in range(m):
        x = geometry.x_stack[i]
        for k in range(m):
            acc += (x @ pi[i, k] - pi[i, k] @ x) @ u.stack[k]
    return complex(np.trace(acc)) / n


# ---------------------------------------------------------------------------
# projector diagnostics and module ranks
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ProjectorReport:
    """Residuals of the projector axioms for one operator (and optional partner)."""

    idempotence: float
    symmetry: float
    complement: float | None = None
    annihilation: float | None = None

    @property
    def worst(self) -> float:
        values = [self.idempotence, self.symmetry]
        if self.complement is not None:
            values.append(self.complement)
        if self.annihilation is not None:
            values.append(self.annihilation)
        return max(values)


def projector_checks(
    geometry: NCGeometry, t: ModuleOperator, partner: ModuleOperator | None = None
) -> ProjectorReport:
    """Idempotence, block symmetry (T^{ij})* = T^{ji}, and complementarity residuals."""
    _same_geometry(t, geometry.tangent_projector)
    blocks = t.blocks
    idem = float(np.max(np.abs(kernels.compose_operators(blocks, blocks) - blocks)))
    sym = float(np.max(np.abs(blocks.conj().transpose(1, 0, 3, 2) - blocks)))
    complement = annihilation = None
    if partner is not None:
        _same_geometry(t, partner)
        ident = _identity_blocks(geometry.m, geometry.dim)
        complement = float(np.max(np.abs(blocks + partner.blocks - ident)))
        forward = kernels.compose_operators(blocks, partner.blocks)
        backward = kernels.compose_operators(partner.blocks, blocks)
        annihilation = float(max(np.max(np.abs(forward)), np.max(np.abs(backward))))
    return ProjectorReport(idem, sym, complement, annihilation)


def module_rank(
    geometry: NCGeometry, t: ModuleOperator, tol: ToleranceSpec = DEFAULT_TOLERANCE
) -> AlgebraElement:
    """Block trace sum_i T^{ii} of a projector; the rank of its image module."""
    report = projector_checks(geometry, t)
    allowance = tol.allowance(t.max_abs() ** 2)
    if report.idempotence > allowance:
        raise NotAProjector(
            f"idempotence residual {report.idempotence:.3e} exceeds {allowance:.3e}"
        )
    return t.block_trace()


# ---------------------------------------------------------------------------
# metric compatibility
# ---------------------------------------------------------------------------

def metric_compatibility_defect(
    geometry: NCGeometry,
    i: int,
    u: ModuleVector,
    v: ModuleVector,
    projected: bool = False,
    tol: ToleranceSpec = DEFAULT_TOLERANCE,
) -> AlgebraElement:
    """d^i<U, V> - <grad U, V> - <U, grad V> for the ambient or projected connection."""
    _same_geometry(u, v)
    _same_geometry_vec(geometry, u)
    if projected:
        grad_u = tangent_connection(geometry, i, u, tol)
        grad_v = tangent_connection(geometry, i, v, tol)
    else:
        grad_u = ambient_connection(geometry, i, u)
        grad_v = ambient_connection(geometry, i, v)
    return derivation(geometry, i, metric(u, v)) - metric(grad_u, v) - metric(u, grad_v)


# ---------------------------------------------------------------------------
# tangency and random vectors
# ---------------------------------------------------------------------------

def _same_geometry_vec(geometry: NCGeometry, u: ModuleVector) -> None:
    if u.geometry is not geometry:
        raise GeometryMismatch("vector belongs to a different geometry")


def tangency_residual(geometry: NCGeometry, u: ModuleVector) -> float:
    projected = geometry.tangent_projector(u)
    return float(np.max(np.abs(projected.stack - u.stack)))


def is_tangent(
    geometry: NCGeometry, u: ModuleVector, tol: ToleranceSpec = DEFAULT_TOLERANCE
) -> bool:
    return tangency_residual(geometry, u) <= tol.allowance(u.max_abs())


def require_tangent(
    geometry: NCGeometry, u: ModuleVector, tol: ToleranceSpec = DEFAULT_TOLERANCE
) -> None:
    _same_geometry_vec(geometry, u)
    res = tangency_residual(geometry, u)
    if res > tol.allowance(u.max_abs()):
        raise NotTangent(f"D(U) - U residual {res:.3e} exceeds tolerance")


def random_module_vector(geometry: NCGeometry, seed: int) -> ModuleVector:
    """Seeded random vector; components drawn sequentially from one PCG64 stream."""
    rng = np.random.Generator(np.random.PCG64(seed))
    stack = np.stack([_random_matrix(rng, geometry.dim) for _ in range(geometry.m)])
    return ModuleVector(geometry, stack)


def random_tangent_vector(geometry: NCGeometry, seed: int) -> ModuleVector:
    """D applied to a random vector; tangent by construction."""
    return geometry.tangent_projector(random_module_vector(geometry, seed))


def random_normal_vector(geometry: NCGeometry, seed: int) -> ModuleVector:
    """Pi applied to a random vector."""
    return geometry.normal_projector(random_module_vector(geometry, seed))
