"""Lattice geometry: cubes in eta*Z^d, blocks, coarse lattices, reflections, images.

A geometry is a cube with ``L**m`` sites per axis at spacing ``eta = L**-k``.
Sites are stored as integer multi-indices; real coordinates are derived on
demand so that site identity is exact.  Blocks of side ``L**j`` tile the cube
exactly, which is what makes the averaging operators in :mod:`blockrg.operators`
honest partial isometries.

Reflection conventions: the "low" reflection of axis ``mu`` maps index
``c -> -1 - c`` (mirror plane half a spacing outside the first site) and the
"high" one maps ``c -> 2*N - 1 - c``.  Words in these two reflections generate
the image set used by the method of images; every reflected copy of the cube
contains exactly one image of a given site.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

DEFAULT_SITE_CAP = 100_000

Site = tuple[int, ...]


class GeometryError(ValueError):
    """Raised for invalid lattice parameters (desk-scale violations included)."""


@dataclass(frozen=True)
class LatticeGeometry:
    """Cube in ``(L**-k) * Z^d`` with ``L**m`` sites per axis.

    ``k`` may be negative for rescaled lattices (spacing larger than one);
    ``make_geometry`` is the public constructor and restricts to ``k >= 0``.
    """

    d: int
    L: int
    k: int
    m: int

    def __post_init__(self):
        if self.d < 1:
            raise GeometryError(f"dimension must be >= 1, got {self.d}")
        if self.L < 3 or self.L % 2 == 0:
            raise GeometryError(f"L must be odd and >= 3, got {self.L}")
        if self.m < self.k:
            raise GeometryError(f"need m >= k, got m={self.m}, k={self.k}")
        if self.m < 0:
            raise GeometryError(f"need m >= 0, got m={self.m}")

    @property
    def spacing(self) -> float:
        return float(self.L) ** (-self.k)

    @property
    def sites_per_axis(self) -> int:
        return self.L**self.m

    @property
    def site_count(self) -> int:
        return self.L ** (self.m * self.d)

    @property
    def side_length(self) -> int:
        """Physical side ``N * eta = L**(m-k)``, an exact integer since m >= k."""
        return self.L ** (self.m - self.k)

    def contains(self, site) -> bool:
        N = self.sites_per_axis
        return all(0 <= int(c) < N for c in site)


def make_geometry(d: int, L: int, k: int, m: int,
                  site_cap: int = DEFAULT_SITE_CAP) -> LatticeGeometry:
    """Build the cube with spacing ``L**-k`` and ``L**m`` sites per axis.

    Rejects even or unit ``L``, ``k`` outside ``[0, m]`` and total site
    counts above ``site_cap`` (the cap signals that the requested lattice
    is beyond desk scale, where dense kernels stop being an option).
    """
    if k < 0:
        raise GeometryError(f"scale index k must be >= 0, got {k}")
    geom = LatticeGeometry(d=d, L=L, k=k, m=m)
    if geom.site_count > site_cap:
        raise GeometryError(
            f"site count {geom.site_count} exceeds cap {site_cap}")
    return geom


def coarse_geometry(geom: LatticeGeometry, j: int) -> LatticeGeometry:
    """Coarse lattice with spacing ``L**(j-k)`` and ``L**(m-j)`` sites per axis."""
    if not 0 <= j <= geom.m:
        raise GeometryError(f"coarsening level j={j} outside [0, {geom.m}]")
    return LatticeGeometry(d=geom.d, L=geom.L, k=geom.k - j, m=geom.m - j)


def scale_geometry(geom: LatticeGeometry, ell: int) -> LatticeGeometry:
    """Same index set, spacing multiplied by ``L**ell``."""
    return LatticeGeometry(d=geom.d, L=geom.L, k=geom.k - ell, m=geom.m)


def all_sites(geom) -> np.ndarray:
    """All site multi-indices, shape ``(site_count, d)``, row-major (axis 0 slowest)."""
    N = geom.sites_per_axis
    grids = np.meshgrid(*[np.arange(N)] * geom.d, indexing="ij")
    return np.stack([g.ravel() for g in grids], axis=-1)


def site_to_flat(geom, site) -> int:
    N = geom.sites_per_axis
    flat = 0
    for c in site:
        flat = flat * N + int(c)
    return flat


def flat_to_site(geom, flat: int) -> Site:
    N = geom.sites_per_axis
    out = []
    for _ in range(geom.d):
        out.append(flat % N)
        flat //= N
    return tuple(reversed(out))


def positions(geom) -> np.ndarray:
    """Real coordinates of all sites, shape ``(site_count, d)``."""
    return all_sites(geom) * geom.spacing


def site_position(geom, site) -> np.ndarray:
    return np.asarray(site, dtype=float) * geom.spacing


def block_label(geom: LatticeGeometry, j: int, site) -> Site:
    """Label (in the index units of ``coarse_geometry(geom, j)``) of the j-block of ``site``.

    Componentwise floor division by ``L**j``; valid for image points outside
    the cube as well.
    """
    if j > geom.m:
        raise GeometryError(f"block level j={j} exceeds m={geom.m}")
    Lj = geom.L**j
    return tuple(int(c) // Lj for c in site)


def block_sites(geom: LatticeGeometry, j: int, label) -> np.ndarray:
    """The ``L**(j*d)`` site indices of block ``label``, shape ``(L**(j*d), d)``."""
    coarse = coarse_geometry(geom, j)
    if not coarse.contains(label):
        raise GeometryError(f"label {label} outside coarse lattice")
    Lj = geom.L**j
    ranges = [np.arange(int(c) * Lj, (int(c) + 1) * Lj) for c in label]
    grids = np.meshgrid(*ranges, indexing="ij")
    return np.stack([g.ravel() for g in grids], axis=-1)


def reflect(geom: LatticeGeometry, axis: int, end: str, site) -> Site:
    """Reflect ``site`` across the low or high mirror plane of ``axis``.

    Low plane sits at index -1/2 (``c -> -1 - c``), high plane at
    ``N - 1/2`` (``c -> 2N - 1 - c``).  Involution; result may lie outside
    the cube (it is then an image point on the ambient lattice).
    """
    if not 0 <= axis < geom.d:
        raise GeometryError(f"axis {axis} outside lattice dimension {geom.d}")
    N = geom.sites_per_axis
    out = list(int(c) for c in site)
    if end == "low":
        out[axis] = -1 - out[axis]
    elif end == "high":
        out[axis] = 2 * N - 1 - out[axis]
    else:
        raise GeometryError(f"end must be 'low' or 'high', got {end!r}")
    return tuple(out)


def _axis_images(c: int, N: int, shells: int) -> list[int]:
    # copy r of the cube occupies indices [r*N, (r+1)*N - 1]; even copies are
    # translates, odd copies are reflections
    out = []
    for r in range(-shells, shells + 1):
        if r % 2 == 0:
            out.append(c + r * N)
        else:
            out.append(-1 - c + (r + 1) * N)
    return out


def image_points(geom: LatticeGeometry, site, shells: int) -> np.ndarray:
    """Images of ``site`` under reflection words, within ``shells`` copies per axis.

    Returns ambient integer indices, shape ``((2*shells+1)**d, d)``.  Contains
    the site itself (copy 0) and is closed under both reflections restricted
    to the retained range; the original site is the unique image inside the cube.
    """
    if shells < 0:
        raise GeometryError("shells must be >= 0")
    N = geom.sites_per_axis
    per_axis = [_axis_images(int(c), N, shells) for c in site]
    return np.array(list(itertools.product(*per_axis)), dtype=int)


def image_shell_index(geom: LatticeGeometry, site, shells: int) -> np.ndarray:
    """Shell number (max per-axis copy index) for each row of ``image_points``."""
    per_axis = [[abs(r) for r in range(-shells, shells + 1)] for _ in site]
    return np.array([max(c) for c in itertools.product(*per_axis)], dtype=int)


def dist(x, y) -> float:
    """Euclidean distance between coordinate vectors (ambient units)."""
    return float(np.linalg.norm(np.asarray(x, dtype=float) - np.asarray(y, dtype=float)))


def sup_dist(x, y) -> float:
    return float(np.max(np.abs(np.asarray(x, dtype=float) - np.asarray(y, dtype=float))))


def dist_to_set(x, points) -> float:
    """Infimum of ``dist(x, p)`` over rows ``p`` of ``points``."""
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    if pts.size == 0:
        raise GeometryError("dist_to_set over an empty set")
    return float(np.min(np.linalg.norm(pts - np.asarray(x, dtype=float), axis=1)))


@dataclass(frozen=True)
class FreePatch:
    """Rectangular patch ``[lo, hi]^d`` (inclusive) of the infinite lattice ``(L**-k)*Z^d``.

    Used for interior stencil comparisons and for compactly supported test
    functions in the Fourier checks.  Not a cube geometry: no boundary
    conditions are attached to it.
    """

    d: int
    L: int
    k: int
    lo: tuple
    hi: tuple

    def __post_init__(self):
        if len(self.lo) != self.d or len(self.hi) != self.d:
            raise GeometryError("lo/hi must have length d")
        if any(h < l for l, h in zip(self.lo, self.hi)):
            raise GeometryError("need hi >= lo componentwise")

    @property
    def spacing(self) -> float:
        return float(self.L) ** (-self.k)

    @property
    def shape(self) -> tuple:
        return tuple(h - l + 1 for l, h in zip(self.lo, self.hi))

    @property
    def site_count(self) -> int:
        return int(np.prod(self.shape))


def block_aligned_patch(d: int, L: int, k: int, blocks_lo, blocks_hi) -> FreePatch:
    """Patch covering whole unit blocks ``blocks_lo .. blocks_hi`` (coarse labels)."""
    Lk = L**k
    lo = tuple(int(b) * Lk for b in blocks_lo)
    hi = tuple((int(b) + 1) * Lk - 1 for b in blocks_hi)
    return FreePatch(d=d, L=L, k=k, lo=lo, hi=hi)


def patch_sites(patch: FreePatch) -> np.ndarray:
    ranges = [np.arange(l, h + 1) for l, h in zip(patch.lo, patch.hi)]
    grids = np.meshgrid(*ranges, indexing="ij")
    return np.stack([g.ravel() for g in grids], axis=-1)


def patch_positions(patch: FreePatch) -> np.ndarray:
    return patch_sites(patch) * patch.spacing


def sample_sites(geom: LatticeGeometry) -> list[Site]:
    """Deterministic site sample: corners, center, one interior point per octant."""
    N = geom.sites_per_axis
    picks = sorted({0, N - 1, N // 2, N // 4, (3 * N) // 4})
    combos = set(itertools.product(picks, repeat=geom.d))
    corners = set(itertools.product((0, N - 1), repeat=geom.d))
    center = (N // 2,) * geom.d
    octants = set(itertools.product((N // 4, (3 * N) // 4), repeat=geom.d))
    keep = corners | {center} | octants
    return sorted(s for s in combos if s in keep)
