"""Experiment runner: named verification suites with CSV/JSON reports.

Every suite emits rows ``experiment,d,L,k,m,a,mu0,metric,value,tolerance,pass``
with the single pass rule ``pass = (value <= tolerance)``; lower-bound
contracts are therefore emitted in negated form (metric names carry a
``neg_`` prefix) and purely informational rows carry tolerance ``inf``.
Exit status: 0 all contracts pass, 1 contract failure, 2 configuration
error, 3 internal error.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import yaml

from . import decay, fourier, images, multiscale, operators as ops
from .lattice import GeometryError, block_aligned_patch, make_geometry
from .multiscale import MultiscaleParams

INFO = float("inf")
FINITE_CAP = 1e12


class ConfigError(ValueError):
    pass


_DEFAULTS = {
    "experiment": "all",
    "seed": 0,
    "output": "reports",
    "geometry": {"d": 1, "L": 3, "k": 2, "m": 4},
    "params": {"a": 1.0, "mu0": 0.0, "c_star": 1.0},
    "fourier": {"M_init": None, "q_max": 0.05},
    "images": {"shells": 4},
    "decay": {"window": None,
              "q_grid": [0.0, 0.01, -0.01, 0.02, -0.02, 0.05, -0.05,
                         0.1, -0.1, 0.2, -0.2]},
}


@dataclass(frozen=True)
class ExperimentConfig:
    experiment: str
    seed: int
    output: str
    geometry: dict
    params: MultiscaleParams
    fourier: dict
    images: dict
    decay: dict

    def geom(self):
        g = self.geometry
        return make_geometry(g["d"], g["L"], g["k"], g["m"])


def _merge_strict(defaults: dict, given: dict, path: str = "") -> dict:
    out = dict(defaults)
    for key, val in given.items():
        if key not in defaults:
            raise ConfigError(f"unknown config key {path + key!r}")
        if isinstance(defaults[key], dict) and defaults[key]:
            if not isinstance(val, dict):
                raise ConfigError(f"config key {path + key!r} must be a mapping")
            out[key] = _merge_strict(defaults[key], val, path + key + ".")
        else:
            out[key] = val
    return out


def load_config(path: str | None) -> ExperimentConfig:
    raw = {}
    if path is not None:
        with open(path) as fh:
            raw = yaml.safe_load(fh) or {}
        if not isinstance(raw, dict):
            raise ConfigError("config root must be a mapping")
    merged = _merge_strict(_DEFAULTS, raw)
    if path is not None:
        # a config file must pin the lattice explicitly; silent geometry
        # defaults would defeat the point of a pinned experiment record
        given = raw.get("geometry")
        if not isinstance(given, dict):
            raise ConfigError("config file must contain a geometry block")
        for field in ("d", "L", "k", "m"):
            if field not in given or given[field] is None:
                raise ConfigError(f"missing geometry field {field!r}")
    try:
        params = MultiscaleParams(a=float(merged["params"]["a"]),
                                  mu0=float(merged["params"]["mu0"]),
                                  c_star=float(merged["params"]["c_star"]))
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad params block: {exc}") from exc
    cfg = ExperimentConfig(experiment=str(merged["experiment"]),
                           seed=int(merged["seed"]),
                           output=str(merged["output"]),
                           geometry=merged["geometry"],
                           params=params,
                           fourier=merged["fourier"],
                           images=merged["images"],
                           decay=merged["decay"])
    try:
        cfg.geom()   # lattice preconditions are config validation, not runtime
    except (GeometryError, TypeError) as exc:
        raise ConfigError(f"bad geometry block: {exc}") from exc
    return cfg


@dataclass(frozen=True)
class MetricRow:
    experiment: str
    d: int
    L: int
    k: int
    m: int
    a: float
    mu0: float
    metric: str
    value: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return self.value <= self.tolerance


def _rows(cfg, experiment, metrics, geom=None) -> list[MetricRow]:
    g = cfg.geometry if geom is None else {
        "d": geom.d, "L": geom.L, "k": geom.k, "m": geom.m}
    return [MetricRow(experiment=experiment, d=g["d"], L=g["L"], k=g["k"],
                      m=g["m"], a=cfg.params.a, mu0=cfg.params.mu0,
                      metric=name, value=float(value), tolerance=float(tol))
            for name, value, tol in metrics]


# ---------------------------------------------------------------------------
# suites
# ---------------------------------------------------------------------------

def run_spectrum(cfg: ExperimentConfig, rng) -> list[MetricRow]:
    worst = {}
    for eta in (1.0, 1.0 / 3.0, 1.0 / 9.0):
        worst[eta] = max(ops.spectrum_rel_error(ops.laplacian_spectrum_1d(n, eta))
                         for n in range(2, 83))
    cheb = 0.0
    for n in range(2, 31):
        jac = np.zeros((n - 1, n - 1))
        for i in range(n - 2):
            jac[i, i + 1] = jac[i + 1, i] = 0.5
        numeric = np.sort(np.linalg.eigvalsh(jac))
        cheb = max(cheb, float(np.max(np.abs(numeric - ops.chebyshev_roots(n - 1)))))
    metrics = [(f"spectrum_max_rel_err_eta_{eta:.6g}", v, 1e-10)
               for eta, v in worst.items()]
    metrics.append(("chebyshev_root_max_err", cheb, 1e-12))
    a_cl = multiscale.a_sequence(cfg.params.a, cfg.geometry["L"], 50)
    a_rec = multiscale.a_sequence_recursive(cfg.params.a, cfg.geometry["L"], 50)
    metrics.append(("a_sequence_max_rel_err",
                    float(np.max(np.abs(a_cl - a_rec) / a_cl)), 1e-14))
    return _rows(cfg, "spectrum", metrics)


def run_rg_verify(cfg: ExperimentConfig, rng) -> list[MetricRow]:
    geom = cfg.geom()
    params = cfg.params
    metrics = []
    for j in range(1, geom.k):
        metrics.append((f"rg_step_residual_j{j}",
                        multiscale.rg_step_residual(geom, params, j), 1e-9))
        metrics.append((f"c_identity_residual_j{j}",
                        multiscale.c_identity_residual(geom, params, j), 1e-10))
    metrics.append(("rg_telescope_residual",
                    multiscale.rg_telescope_residual(geom, params), 1e-9))
    for j in range(1, geom.k + 1):
        if j < geom.m:
            for name, val in multiscale.scaling_residuals(geom, params, j).items():
                metrics.append((f"{name}_j{j}", val, 1e-11))
    return _rows(cfg, "rg-verify", metrics)


def run_images_verify(cfg: ExperimentConfig, rng) -> list[MetricRow]:
    geom = cfg.geom()
    shells = int(cfg.images["shells"])
    report = images.images_residual_report(geom, cfg.params, shells)
    metrics = [("images_neumann_center_residual", report.neumann_center[-1], INFO),
               ("images_neumann_max_residual", report.neumann_max[-1], INFO),
               ("images_gq_max_residual", report.gq_max[-1], INFO)]
    ratios = [report.neumann_max[i + 1] / report.neumann_max[i]
              for i in range(shells - 1) if report.neumann_max[i] > 0]
    metrics.append(("images_shell_ratio_max", max(ratios) if ratios else 0.0, 1.0))
    if (geom.d, geom.L, geom.k, geom.m) == (1, 3, 1, 2) and shells >= 4:
        metrics.append(("images_reference_center_residual",
                        report.neumann_center[3], 1e-6))
    return _rows(cfg, "images-verify", metrics)


def run_fourier_verify(cfg: ExperimentConfig, rng) -> list[MetricRow]:
    g = cfg.geometry
    d, L, k = g["d"], g["L"], g["k"]
    params = cfg.params
    M_init = cfg.fourier["M_init"] or 8 * L**k
    grid = fourier.TorusGrid(d=d, L=L, k=k, M=int(M_init))

    patch = block_aligned_patch(d, L, k, (0,) * d, (2,) * d)
    vals = rng.standard_normal(patch.site_count) + 1j * rng.standard_normal(patch.site_count)
    big = fourier.TorusGrid(d=d, L=L, k=k, M=max(int(M_init), 16 * L**k))
    qkqk = fourier.qkqk_fourier_residual(patch, vals, big, params)

    x = np.zeros((1, d))
    y = np.full((1, d), 2.0)
    base, grid_used, _ = fourier.converge_kernel(
        lambda gr: fourier.free_kernel_g(x, y, gr, params), grid)
    qv = np.zeros(d)
    qv[0] = cfg.fourier["q_max"]
    shifted = fourier.free_kernel_g(x, y, grid_used, params, shift_q=qv)
    contour = float(np.max(np.abs(shifted - base)) / np.max(np.abs(base)))

    fhat = rng.standard_normal((grid.M,) * d) + 1j * rng.standard_normal((grid.M,) * d)
    ghat = fourier.free_apply_ghat(fhat, grid, params)
    back = fourier.free_symbol_apply(ghat, grid, params)
    roundtrip = float(np.max(np.abs(back - fhat)) / np.max(np.abs(fhat)))

    p = rng.uniform(-np.pi, np.pi, size=(16, d))
    per = np.max(np.abs(fourier.bracket(p + 2.0 * np.pi * np.eye(d)[0], L, k, params.mu0)
                        - fourier.bracket(p, L, k, params.mu0)))
    scale = np.max(np.abs(fourier.bracket(p, L, k, params.mu0)))

    metrics = [("qkqk_spatial_vs_fourier", qkqk, 1e-8),
               ("contour_shift_relative_change", contour, 1e-8),
               ("ghat_roundtrip_residual", roundtrip, 1e-10),
               ("bracket_periodicity_residual", float(per / scale), 1e-12)]
    return _rows(cfg, "fourier-verify", metrics)


def run_strip_bound(cfg: ExperimentConfig, rng) -> list[MetricRow]:
    g = cfg.geometry
    d, L = g["d"], g["L"]
    q_max = float(cfg.fourier["q_max"])
    sups = {}
    margin = INFO
    for k in (1, 2, 3):
        rep = fourier.strip_bound_report(d, L, k, cfg.params, q_max=q_max)
        sups[k] = rep.weighted_sup
        margin = min(margin, rep.min_denominator_margin)
    metrics = [(f"strip_weighted_sup_k{k}", v, FINITE_CAP) for k, v in sups.items()]
    metrics.append(("strip_sup_variation_across_k",
                    max(sups.values()) / min(sups.values()), 10.0))
    metrics.append(("strip_denominator_margin_deficit",
                    max(0.0, 1.0 - margin), 0.0))
    return _rows(cfg, "strip-bound", metrics)


def run_decay_profile(cfg: ExperimentConfig, rng) -> list[MetricRow]:
    geom = cfg.geom()
    dists, mags = decay.decay_profile(geom, cfg.params)
    window = cfg.decay["window"]
    fit = decay.fit_decay(dists, mags, tuple(window) if window else None)
    metrics = [(f"profile_mag_at_dist_{dist:.6g}", mag, INFO)
               for dist, mag in zip(dists, mags)]
    metrics.append(("neg_fit_rate", -fit.rate, 0.0))
    metrics.append(("fit_rms_residual", fit.rms_residual, INFO))
    metrics.append(("fit_log_prefactor", fit.log_prefactor, INFO))
    return _rows(cfg, "decay-profile", metrics)


def run_ct_report(cfg: ExperimentConfig, rng) -> list[MetricRow]:
    geom = cfg.geom()
    params = cfg.params
    q_grid = [float(q) for q in cfg.decay["q_grid"]]
    rep = decay.ct_bound_report(geom, params, q_grid, rng)

    D0 = multiscale.defining_operator(geom, params, geom.k)
    Dq0 = decay.conjugated_operator(geom, params, 0.0)
    bit_equal = 0.0 if np.array_equal(D0.kernel, Dq0.kernel) else 1.0

    metrics = [("ct_q0_bitwise_mismatch", bit_equal, 0.0)]
    for q, smin, bound in zip(rep.q_values, rep.min_singular_values,
                              rep.bound_constants):
        metrics.append((f"ct_bound_norm_q_{q:+.3g}", bound,
                        FINITE_CAP if abs(q) <= 0.05 + 1e-12 else INFO))
        metrics.append((f"neg_ct_min_sigma_q_{q:+.3g}", -smin,
                        0.0 if abs(q) <= 0.05 + 1e-12 else INFO))
    metrics.append(("neg_ct_fitted_c1", -rep.fitted_c1, 0.0))
    metrics.append(("ct_fit_max_violation", rep.max_violation, INFO))
    return _rows(cfg, "ct-report", metrics)


def run_positivity(cfg: ExperimentConfig, rng) -> list[MetricRow]:
    g = cfg.geometry
    side_exp = max(g["m"] - g["k"], 0)
    geoms = []
    for k in (1, 2, 3):
        try:
            geoms.append(make_geometry(g["d"], g["L"], k, k + side_exp))
        except GeometryError:
            break   # family truncated at the desk-scale cap
    if len(geoms) < 2:
        raise ConfigError("positivity family infeasible at desk scale; "
                          "reduce m - k or the dimension")
    rows = multiscale.positivity_report(geoms, cfg.params)
    metrics = []
    for r in rows:
        metrics.append((f"neg_positivity_c_k{r.k}", -r.c, 0.0))
    cs = [r.c for r in rows]
    metrics.append(("positivity_max_over_min", max(cs) / min(cs), 4.0))
    return _rows(cfg, "positivity", metrics)


SUITES = {
    "spectrum": run_spectrum,
    "rg-verify": run_rg_verify,
    "images-verify": run_images_verify,
    "fourier-verify": run_fourier_verify,
    "strip-bound": run_strip_bound,
    "decay-profile": run_decay_profile,
    "ct-report": run_ct_report,
    "positivity": run_positivity,
}

CSV_HEADER = "experiment,d,L,k,m,a,mu0,metric,value,tolerance,pass"


def _fmt(x: float) -> str:
    if np.isposinf(x):
        return "inf"
    return f"{x:.12g}"


def write_csv(path: Path, rows: list[MetricRow]):
    lines = [CSV_HEADER]
    for r in rows:
        lines.append(",".join([r.experiment, str(r.d), str(r.L), str(r.k),
                               str(r.m), _fmt(r.a), _fmt(r.mu0), r.metric,
                               _fmt(r.value), _fmt(r.tolerance),
                               "true" if r.passed else "false"]))
    path.write_text("\n".join(lines) + "\n")


def run(cfg: ExperimentConfig, out_dir: Path, verbose: bool = False) -> int:
    """Execute the configured experiment(s); returns the process exit code."""
    names = list(SUITES) if cfg.experiment == "all" else [cfg.experiment]
    for name in names:
        if name not in SUITES:
            raise ConfigError(f"unknown experiment {name!r} "
                              f"(choices: {', '.join(SUITES)} or 'all')")
    out_dir.mkdir(parents=True, exist_ok=True)
    summary = {}
    any_fail = any_error = False
    for name in names:
        rng = np.random.default_rng(cfg.seed)
        t0 = time.time()
        try:
            rows = SUITES[name](cfg, rng)
        except Exception as exc:  # noqa: BLE001 - per-suite isolation, exit 3
            any_error = True
            summary[name] = {"status": "error",
                             "error": f"{type(exc).__name__}: {exc}",
                             "wall_time_seconds": time.time() - t0}
            print(f"{name}: ERROR ({type(exc).__name__}: {exc})", file=sys.stderr)
            continue
        wall = time.time() - t0
        write_csv(out_dir / f"{name}.csv", rows)
        failed = [r.metric for r in rows if not r.passed]
        any_fail |= bool(failed)
        summary[name] = {
            "status": "fail" if failed else "pass",
            "metrics": {r.metric: r.value for r in rows},
            "failed": failed,
            "wall_time_seconds": wall,
        }
        if verbose:
            for r in rows:
                print(f"[{name}] {r.metric} = {_fmt(r.value)} "
                      f"(tol {_fmt(r.tolerance)}) "
                      f"{'PASS' if r.passed else 'FAIL'}")
        print(f"{name}: {'FAIL' if failed else 'ok'} "
              f"({len(rows)} metrics, {wall:.2f}s)")
    (out_dir / "summary.json").write_text(
        json.dumps(summary, indent=2, sort_keys=True) + "\n")
    if any_error:
        return 3
    return 1 if any_fail else 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="blockrg",
        description="Verification suites for block-spin lattice Green functions")
    parser.add_argument("--config", default=None, help="YAML config path")
    parser.add_argument("--out", default=None, help="output directory")
    parser.add_argument("--experiment", default=None,
                        help=f"one of: {', '.join(SUITES)}, all")
    parser.add_argument("--seed", type=int, default=None)
    parser.add_argument("--verbose", action="store_true")
    args = parser.parse_args(argv)
    try:
        cfg = load_config(args.config)
        if args.experiment is not None:
            cfg = ExperimentConfig(**{**cfg.__dict__, "experiment": args.experiment})
        if args.seed is not None:
            cfg = ExperimentConfig(**{**cfg.__dict__, "seed": args.seed})
        out_dir = Path(args.out) if args.out is not None else Path(cfg.output)
        if cfg.experiment != "all" and cfg.experiment not in SUITES:
            raise ConfigError(f"unknown experiment {cfg.experiment!r}")
    except (ConfigError, GeometryError, OSError, yaml.YAMLError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    try:
        return run(cfg, out_dir, verbose=args.verbose)
    except (ConfigError, GeometryError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001 - contract: internal errors exit 3
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
