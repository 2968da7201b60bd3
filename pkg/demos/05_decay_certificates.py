"""Measuring exponential decay: conjugation bounds and fitted rates.

Conjugating the defining operator by exponential weights keeps it coercive
for small tilts, which caps the weighted propagator norm and forces decay of
box-to-box matrix elements.  The fits below certify positive rates that stay
put as the volume grows or the spacing shrinks at fixed physical size, which
is the substance of the sup-norm decay claim.
"""

import numpy as np

from blockrg import decay as dc, lattice as lat, multiscale as ms

params = ms.MultiscaleParams()
geom = lat.make_geometry(1, 3, 1, 3)

print("conjugated-operator coercivity and weighted norms:")
rng = np.random.default_rng(7)
rep = dc.ct_bound_report(geom, params, [0.0, 0.02, -0.02, 0.05, -0.05], rng)
for q, smin, bound in zip(rep.q_values, rep.min_singular_values,
                          rep.bound_constants):
    print(f"  q = {q:+.2f}: sigma_min(D_q) = {smin:.4f}, "
          f"|e_-q G e_q| = {bound:.4f}")
print(f"  fitted box-to-box rate c1 = {rep.fitted_c1:.4f} "
      f"(max log-residual above fit {rep.max_violation:.3f})")

print("\nsup-norm decay profile from a corner source:")
dists, mags = dc.decay_profile(geom, params)
for i in range(0, len(dists), 5):
    print(f"  dist {dists[i]:5.2f}: |G f| = {mags[i]:.3e}")
fit = dc.fit_decay(dists, mags)
print(f"  fitted rate {fit.rate:.4f} over window {fit.window}, "
      f"rms residual {fit.rms_residual:.3f}")

print("\nrate stability across volume and spacing:")
rows = dc.linf_report([lat.make_geometry(1, 3, 1, 3),
                       lat.make_geometry(1, 3, 1, 4),
                       lat.make_geometry(1, 3, 2, 4)], params)
for row in rows:
    print(f"  k={row.k}, m={row.m}: rate {row.fit.rate:.4f}, "
          f"envelope prefactor {row.max_ratio:.3f}")

print("\nmass only sharpens the decay:")
for mu0 in (0.0, 0.2):
    r = dc.fit_decay(*dc.decay_profile(geom, ms.MultiscaleParams(mu0=mu0))).rate
    print(f"  mu0 = {mu0}: rate {r:.4f}")
