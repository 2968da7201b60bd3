"""Fields and measure-weighted kernel operators on finite lattices.

Conventions.  The inner product on a lattice with spacing ``eta`` is
``<f, g> = eta**d * sum conj(f) g``.  An operator is stored through its kernel
``K(x, x')`` with the pairing ``(A f)(x) = eta_src**d * sum_x' K(x, x') f(x')``,
so the matrix that acts on plain value vectors is ``eta_src**d * K``.  The
kernel of the adjoint is the conjugate transpose of the kernel; measure
factors for mismatched source/target spacings then come out automatically.

Everything is dense and complex.  Inverses go through LAPACK solves with a
condition estimate; self-adjointness is an error when violated beyond
tolerance, not a warning.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .lattice import (FreePatch, LatticeGeometry, coarse_geometry,
                      patch_sites, scale_geometry, site_to_flat)

SELF_ADJOINT_TOL = 1e-10
CONDITION_LIMIT = 1e13


class OperatorError(ValueError):
    pass


class SingularOperatorError(OperatorError):
    def __init__(self, cond):
        super().__init__(f"operator numerically singular (condition estimate {cond:.3e})")
        self.cond = cond


@dataclass(frozen=True, eq=False)
class Field:
    """Complex-valued function on the sites of a lattice (row-major flat storage)."""

    geometry: LatticeGeometry
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=complex).ravel()
        object.__setattr__(self, "values", v)
        if v.size != self.geometry.site_count:
            raise OperatorError(
                f"value count {v.size} != site count {self.geometry.site_count}")


def constant_field(geom, value=1.0) -> Field:
    return Field(geom, np.full(geom.site_count, value, dtype=complex))


def random_field(geom, rng) -> Field:
    v = rng.standard_normal(geom.site_count) + 1j * rng.standard_normal(geom.site_count)
    return Field(geom, v)


def delta_field(geom, site) -> Field:
    """Dirac delta: value ``eta**-d`` at ``site``, zero elsewhere; ``<delta_x, f> = f(x)``."""
    if not geom.contains(site):
        raise OperatorError(f"site {site} outside lattice")
    v = np.zeros(geom.site_count, dtype=complex)
    v[site_to_flat(geom, site)] = geom.spacing ** (-geom.d)
    return Field(geom, v)


def inner(f: Field, g: Field) -> complex:
    if f.geometry != g.geometry:
        raise OperatorError("inner product requires matching geometries")
    return complex(f.geometry.spacing ** f.geometry.d * np.vdot(f.values, g.values))


def norm(f: Field) -> float:
    return float(np.sqrt(inner(f, f).real))


@dataclass(frozen=True, eq=False)
class KernelOperator:
    """Dense linear map between lattices, stored as the kernel ``K(x_target, x_source)``."""

    source: LatticeGeometry
    target: LatticeGeometry
    kernel: np.ndarray

    def __post_init__(self):
        kk = np.asarray(self.kernel, dtype=complex)
        object.__setattr__(self, "kernel", kk)
        if kk.shape != (self.target.site_count, self.source.site_count):
            raise OperatorError(
                f"kernel shape {kk.shape} != "
                f"({self.target.site_count}, {self.source.site_count})")

    @property
    def matrix(self) -> np.ndarray:
        """Matrix acting on plain value vectors: ``source.spacing**d * kernel``."""
        return self.kernel * self.source.spacing ** self.source.d

    def __matmul__(self, other):
        return compose(self, other)

    def __add__(self, other):
        return add(self, other)

    def __sub__(self, other):
        return add(self, scale(other, -1.0))

    def __rmul__(self, alpha):
        return scale(self, alpha)


def from_matrix(source, target, matrix) -> KernelOperator:
    """Wrap a value-vector matrix as a kernel operator."""
    return KernelOperator(source, target,
                          np.asarray(matrix, dtype=complex) / source.spacing ** source.d)


def identity(geom) -> KernelOperator:
    return from_matrix(geom, geom, np.eye(geom.site_count))


def apply(A: KernelOperator, f: Field) -> Field:
    if f.geometry != A.source:
        raise OperatorError("field geometry does not match operator source")
    return Field(A.target, A.matrix @ f.values)


def compose(A: KernelOperator, B: KernelOperator) -> KernelOperator:
    """A after B; carries the inner lattice's measure factor."""
    if B.target != A.source:
        raise OperatorError("compose: inner geometries do not match")
    return from_matrix(B.source, A.target, A.matrix @ B.matrix)


def adjoint(A: KernelOperator) -> KernelOperator:
    return KernelOperator(A.target, A.source, A.kernel.conj().T)


def add(A: KernelOperator, B: KernelOperator) -> KernelOperator:
    if A.source != B.source or A.target != B.target:
        raise OperatorError("add: geometries do not match")
    return KernelOperator(A.source, A.target, A.kernel + B.kernel)


def scale(A: KernelOperator, alpha) -> KernelOperator:
    return KernelOperator(A.source, A.target, alpha * A.kernel)


def invert(A: KernelOperator) -> KernelOperator:
    """Dense inverse (pivoted LU) with a condition-number report."""
    if A.source != A.target:
        raise OperatorError("invert requires a square operator on one lattice")
    M = A.matrix
    cond = np.linalg.cond(M)
    if not np.isfinite(cond) or cond > CONDITION_LIMIT:
        raise SingularOperatorError(cond)
    return from_matrix(A.source, A.source, np.linalg.inv(M))


def _kron_chain(mats) -> np.ndarray:
    out = mats[0]
    for mm in mats[1:]:
        out = np.kron(out, mm)
    return out


def _axis_operator(geom, mat1d, axis: int) -> np.ndarray:
    """Place a one-axis value matrix on the given axis of the product lattice."""
    mats = [np.eye(geom.sites_per_axis)] * geom.d
    mats[axis] = mat1d
    return _kron_chain(mats)


def _forward_1d(N, eta, neumann):
    D = np.zeros((N, N))
    for i in range(N - 1):
        D[i, i] = -1.0
        D[i, i + 1] = 1.0
    if not neumann:
        D[N - 1, N - 1] = -1.0  # ghost neighbor dropped; last row valid only with data beyond
    return D / eta


def _backward_1d(N, eta, neumann):
    # (backward f)_c = -(f_c - f_{c-1})/eta, Neumann clamps f_{-1} = f_0
    D = np.zeros((N, N))
    for i in range(1, N):
        D[i, i] = -1.0
        D[i, i - 1] = 1.0
    if not neumann:
        D[0, 0] = -1.0
    return D / eta


def forward_diff(geom, axis: int, bc: str = "neumann") -> KernelOperator:
    """Forward difference along ``axis``; ``bc='neumann'`` clamps the ghost value.

    With ``bc='free_interior'`` the stencil simply drops the missing neighbor;
    rows touching the high face are then only meaningful as part of interior
    comparisons on enlarged patches.
    """
    if bc not in ("neumann", "free_interior"):
        raise OperatorError(f"unknown bc {bc!r}")
    N = geom.sites_per_axis
    D1 = _forward_1d(N, geom.spacing, bc == "neumann")
    return from_matrix(geom, geom, _axis_operator(geom, D1, axis))


def backward_diff(geom, axis: int, bc: str = "neumann") -> KernelOperator:
    if bc not in ("neumann", "free_interior"):
        raise OperatorError(f"unknown bc {bc!r}")
    N = geom.sites_per_axis
    D1 = _backward_1d(N, geom.spacing, bc == "neumann")
    return from_matrix(geom, geom, _axis_operator(geom, D1, axis))


def _neumann_lap_1d(N, eta):
    T = np.zeros((N, N))
    for i in range(N):
        T[i, i] = -2.0
        if i > 0:
            T[i, i - 1] = 1.0
        else:
            T[i, i] += 1.0
        if i < N - 1:
            T[i, i + 1] = 1.0
        else:
            T[i, i] += 1.0
    return T / eta**2


def neumann_laplacian(geom) -> KernelOperator:
    """Kronecker-sum Laplacian with ghost-value clamping on every face.

    Self-adjoint, annihilates constants; the quadratic form of the negative
    equals the sum of squared bond differences over 1/eta^2.
    """
    N = geom.sites_per_axis
    T = _neumann_lap_1d(N, geom.spacing)
    total = sum(_axis_operator(geom, T, mu) for mu in range(geom.d))
    return from_matrix(geom, geom, total)


def free_laplacian_patch(patch: FreePatch) -> np.ndarray:
    """Free-stencil Laplacian value matrix on a patch; rows at the patch edge
    are incomplete (missing neighbors dropped) and must be excluded from
    comparisons."""
    sites = patch_sites(patch)
    index = {tuple(s): i for i, s in enumerate(sites)}
    n = len(sites)
    M = np.zeros((n, n))
    eta2 = patch.spacing**2
    for i, s in enumerate(sites):
        M[i, i] -= 2.0 * patch.d / eta2
        for mu in range(patch.d):
            for step in (-1, 1):
                nb = list(s)
                nb[mu] += step
                jj = index.get(tuple(nb))
                if jj is not None:
                    M[i, jj] += 1.0 / eta2
    return M


def patch_interior_mask(patch: FreePatch) -> np.ndarray:
    sites = patch_sites(patch)
    lo = np.asarray(patch.lo)
    hi = np.asarray(patch.hi)
    return np.all((sites > lo) & (sites < hi), axis=1)


def averaging(geom, j: int) -> KernelOperator:
    """Block mean over ``L**j``-sided blocks: ``Q_j : Omega -> Omega_j``.

    ``Q_j Q_j* = 1`` on the coarse lattice and ``Q_j* Q_j`` is the orthogonal
    projection onto block-constant functions.
    """
    if not 0 <= j <= geom.m:
        raise OperatorError(f"averaging level j={j} outside [0, {geom.m}]")
    coarse = coarse_geometry(geom, j)
    N = geom.sites_per_axis
    Lj = geom.L**j
    q1 = np.zeros((N // Lj, N))
    for y in range(N // Lj):
        q1[y, y * Lj:(y + 1) * Lj] = 1.0 / Lj
    Q = _kron_chain([q1] * geom.d)
    return from_matrix(geom, coarse, Q)


def block_projector(geom, j: int) -> KernelOperator:
    """Orthogonal projector ``Q_j* Q_j`` onto block-constant functions."""
    Q = averaging(geom, j)
    return compose(adjoint(Q), Q)


def scaling_unitary(geom, ell: int) -> KernelOperator:
    """Scaling map ``S : L^2(Omega) -> L^2(L**ell Omega)``, ``(Sf)(x) = lam**(-d/2) f(x/lam)``.

    On index vectors this is ``lam**(-d/2)`` times the identity, since the
    scaled lattice shares the index set.
    """
    lam = float(geom.L) ** ell
    target = scale_geometry(geom, ell)
    M = lam ** (-geom.d / 2.0) * np.eye(geom.site_count)
    return from_matrix(geom, target, M)


@dataclass(frozen=True)
class SpectrumReport:
    eigenvalues: np.ndarray
    min_eigenvalue: float
    closed_form: np.ndarray | None = None


def laplacian_spectrum_1d(n: int, eta: float) -> SpectrumReport:
    """Dense spectrum of the 1d Neumann Laplacian next to its closed form.

    The closed form is ``-(4/eta**2) * sin(pi j / (2 n))**2`` for
    ``j = 0 .. n-1``; both lists are sorted ascending.
    """
    if n < 2:
        raise OperatorError("need n >= 2")
    T = _neumann_lap_1d(n, eta)
    ev = np.linalg.eigvalsh(T)
    j = np.arange(n)
    closed = np.sort(-(4.0 / eta**2) * np.sin(np.pi * j / (2 * n)) ** 2)
    return SpectrumReport(eigenvalues=ev, min_eigenvalue=float(ev[0]), closed_form=closed)


def spectrum_rel_error(report: SpectrumReport) -> float:
    """Max relative deviation from the closed form, zero modes judged against
    the spectral scale (entrywise relative is ill-defined at an exact zero)."""
    closed = report.closed_form
    scale = np.max(np.abs(closed))
    denom = np.where(closed == 0.0, scale, np.abs(closed))
    return float(np.max(np.abs(report.eigenvalues - closed) / denom))


def chebyshev_u(n: int, alpha):
    """Chebyshev polynomial of the second kind by the three-term recurrence."""
    alpha = np.asarray(alpha, dtype=float)
    if n == 0:
        return np.ones_like(alpha)
    prev, cur = np.ones_like(alpha), 2 * alpha
    for _ in range(n - 1):
        prev, cur = cur, 2 * alpha * cur - prev
    return cur


def chebyshev_roots(n: int) -> np.ndarray:
    """Roots of U_n: ``cos(j pi / (n+1))``, j = 1..n, ascending."""
    j = np.arange(1, n + 1)
    return np.sort(np.cos(j * np.pi / (n + 1)))


def self_adjointness_defect(A: KernelOperator) -> float:
    M = A.matrix
    denom = np.linalg.norm(M)
    if denom == 0.0:
        return 0.0
    return float(np.linalg.norm(M - M.conj().T) / denom)


def min_eigenvalue(A: KernelOperator, sa_tol: float = SELF_ADJOINT_TOL) -> float:
    """Smallest eigenvalue via dense symmetric eigensolve.

    Inputs failing the self-adjointness tolerance are an error: silent
    symmetrization would mask convention bugs upstream.
    """
    defect = self_adjointness_defect(A)
    if defect > sa_tol:
        raise OperatorError(f"operator not self-adjoint (defect {defect:.3e})")
    return float(np.linalg.eigvalsh(A.matrix)[0])


def rel_frobenius(A: KernelOperator, B: KernelOperator) -> float:
    """Relative Frobenius distance ``|A - B|_F / |B|_F`` (value matrices)."""
    if A.source != B.source or A.target != B.target:
        raise OperatorError("rel_frobenius: geometries do not match")
    return float(np.linalg.norm(A.matrix - B.matrix) / np.linalg.norm(B.matrix))
