"""Free-lattice propagators from torus quadrature.

The infinite-lattice propagator is assembled per momentum from a small
shift-system solve; the trapezoid rule on the torus then converges
spectrally fast.  The script shows self-convergence under grid doubling,
operational analyticity (a contour shift does not change the answer), the
agreement of spatial block means with the Fourier route, and the exponential
decay of the kernel.
"""

import numpy as np

from blockrg import fourier as fr, lattice as lat
from blockrg.decay import fit_decay
from blockrg.multiscale import MultiscaleParams

params = MultiscaleParams()
d, L, k = 1, 3, 1
eta = float(L) ** (-k)

print("quadrature self-convergence of G(0, 2):")
x = np.zeros((1, 1))
y = np.full((1, 1), 2.0)
grid = fr.default_grid(d, L, k)
prev = None
for _ in range(4):
    val = fr.free_kernel_g(x, y, grid, params)[0, 0]
    note = "" if prev is None else f"   change {abs(val - prev):.2e}"
    print(f"  M = {grid.M:4d}: {val:.12f}{note}")
    prev, grid = val, grid.refined()

print("\ncontour shift q = 0.05 (analyticity check):")
base, used, _ = fr.converge_kernel(
    lambda g: fr.free_kernel_g(x, y, g, params), fr.default_grid(d, L, k), tol=1e-9)
shifted = fr.free_kernel_g(x, y, used, params, shift_q=np.array([0.05]))
print(f"  relative change: {abs(shifted[0, 0] - base[0, 0]) / abs(base[0, 0]):.2e}")

print("\nkernel decay profile and fitted rate:")
ys = np.arange(0, 36).reshape(-1, 1) * eta
vals, _, _ = fr.converge_kernel(
    lambda g: fr.free_kernel_g(x, ys, g, params)[0], fr.default_grid(d, L, k))
dists = ys[:, 0]
for i in (0, 6, 12, 18, 24, 30):
    print(f"  |G(0, {dists[i]:5.2f})| = {abs(vals[i]):.3e}")
fit = fit_decay(dists, np.abs(vals))
print(f"  fitted rate {fit.rate:.4f}, log-prefactor {fit.log_prefactor:.4f}")

print("\nblock means: spatial route vs Fourier route")
patch = lat.block_aligned_patch(d, L, k, (0,), (2,))
rng = np.random.default_rng(0)
v = rng.standard_normal(patch.site_count) + 1j * rng.standard_normal(patch.site_count)
res = fr.qkqk_fourier_residual(patch, v, fr.TorusGrid(d, L, k, 16 * L**k), params)
print(f"  max pointwise discrepancy: {res:.2e}")

print("\nstrip bound of the decay integrand (k = 1, 2, 3):")
for kk in (1, 2, 3):
    rep = fr.strip_bound_report(d, L, kk, params, q_max=0.05)
    print(f"  k={kk}: weighted sup {rep.weighted_sup:.4f}, "
          f"denominator margin {rep.min_denominator_margin:.1f}x")
