"""One renormalization step, exactly.

The regularized propagators at consecutive scales differ by a sandwich of
the fluctuation covariance between averaged propagators; iterating the step
telescopes the finest propagator into a sum of rescaled fluctuation kernels.
Both are exact operator identities, so the residuals below should sit at
rounding level; anything bigger means a convention bug.
"""

from blockrg import lattice as lat, multiscale as ms

params = ms.MultiscaleParams(a=1.0, mu0=0.0)

print("coefficient sequence (a = 1, L = 3):")
print(" ", [round(x, 6) for x in ms.a_sequence(1.0, 3, 6)])
print("  limit a (1 - L^-2) =", 1.0 * (1 - 3.0**-2))

for args in [(1, 3, 2, 2), (1, 3, 2, 3), (2, 3, 2, 2)]:
    geom = lat.make_geometry(*args)
    print(f"\ncube d={geom.d}, L={geom.L}, k={geom.k}, m={geom.m} "
          f"({geom.site_count} sites):")
    for j in range(1, geom.k):
        print(f"  one-step residual  (j={j}): "
              f"{ms.rg_step_residual(geom, params, j):.3e}")
        print(f"  covariance identity (j={j}): "
              f"{ms.c_identity_residual(geom, params, j):.3e}")
    print(f"  telescoped formula:          "
          f"{ms.rg_telescope_residual(geom, params):.3e}")
    for j in range(1, geom.k + 1):
        if j < geom.m:
            res = ms.scaling_residuals(geom, params, j)
            worst = max(res, key=res.get)
            print(f"  scaling covariances (j={j}): worst {worst} = {res[worst]:.3e}")

print("\nwith a mass (mu0 = 0.1):")
geom = lat.make_geometry(1, 3, 2, 2)
pm = ms.MultiscaleParams(mu0=0.1)
print(f"  one-step residual:  {ms.rg_step_residual(geom, pm, 1):.3e}")
print(f"  telescoped formula: {ms.rg_telescope_residual(geom, pm):.3e}")

print("\ncoercivity across scales at fixed physical side:")
geoms = [lat.make_geometry(1, 3, k, k + 1) for k in (1, 2, 3)]
for row in ms.positivity_report(geoms, params):
    print(f"  k={row.k}: c = {row.c:.6f}")
