"""Cross-oracle verification suite behind the `verify` CLI subcommand.

Checks the three independent routes to the same quantities against each
other: exact simulation, cluster simulation, and the moment engines.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import stats as sps

from .cluster import n_counts_at, sample_z_infinity, simulate_market_orders
from .moments import cumulant_v, first_moments, second_moments, var_n_cluster
from .params import ModelParams, derived_constants
from .rng import spawn_seed
from .scaling import ensemble_grid
from .special import borel_pmf, v_infinity


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str


def two_sample_chisquare(x, y, min_expected: float = 5.0):
    """Two-sample chi-square over pooled integer bins. Returns (stat, df, p)."""
    x = np.asarray(x)
    y = np.asarray(y)
    lo = min(x.min(), y.min())
    hi = max(x.max(), y.max())
    values = np.arange(lo, hi + 1)
    cx = np.array([(x == v).sum() for v in values], dtype=float)
    cy = np.array([(y == v).sum() for v in values], dtype=float)
    # pool adjacent bins until each pooled bin has enough mass in both samples
    bx, by = [], []
    ax = ay = 0.0
    for i in range(values.size):
        ax += cx[i]
        ay += cy[i]
        if ax >= min_expected and ay >= min_expected:
            bx.append(ax)
            by.append(ay)
            ax = ay = 0.0
    if ax or ay:
        if bx:
            bx[-1] += ax
            by[-1] += ay
        else:
            bx, by = [ax], [ay]
    bx = np.array(bx)
    by = np.array(by)
    k1 = math.sqrt(by.sum() / bx.sum())
    k2 = 1.0 / k1
    stat = float(np.sum((k1 * bx - k2 * by) ** 2 / (bx + by)))
    df = bx.size - 1
    p = float(sps.chi2.sf(stat, df)) if df > 0 else 1.0
    return stat, df, p


def cluster_n_samples(params, t, n_samples, seed) -> np.ndarray:
    out = np.empty(n_samples, dtype=np.int64)
    for i in range(n_samples):
        s = simulate_market_orders(params, t, spawn_seed(seed, i))
        out[i] = n_counts_at(s, [t])[0]
    return out


def run_verification(
    params: ModelParams, seed: int = 20240811, n_paths: int = 10_000
) -> list[CheckResult]:
    results = []
    dc = derived_constants(params)

    # algebraic identities of the relaxation rates
    lhs = dc.q_minus * dc.q_plus
    rhs = params.b * (params.c + params.d) - params.a * params.c
    ok = math.isclose(lhs, rhs, rel_tol=1e-12) and math.isclose(
        dc.q_minus + dc.q_plus, params.b + params.c + params.d, rel_tol=1e-12
    )
    results.append(CheckResult("rate-identities", ok, f"q-*q+ = {lhs:.12g} vs {rhs:.12g}"))

    # exact-sim means vs analytic first moments at t = 5
    t = 5.0
    lam, gam, n = ensemble_grid(params, t, n_paths, [t], spawn_seed(seed, 1))
    ell_t, g_t, m_t = first_moments(params, t)
    for name, arr, target in (
        ("exact-mean-lambda", lam[:, 0], float(ell_t)),
        ("exact-mean-gamma", gam[:, 0], float(g_t)),
        ("exact-mean-n", n[:, 0], float(m_t)),
    ):
        se = arr.std(ddof=1) / math.sqrt(n_paths)
        dev = abs(arr.mean() - target)
        results.append(
            CheckResult(name, dev <= 4.0 * se, f"|{arr.mean():.4f} - {target:.4f}| vs 4se={4 * se:.4f}")
        )

    # cluster-sim mean and law vs exact-sim at t = 5
    n_cl = cluster_n_samples(params, t, n_paths, spawn_seed(seed, 2))
    se = math.sqrt(n_cl.var(ddof=1) / n_paths + n[:, 0].var(ddof=1) / n_paths)
    dev = abs(n_cl.mean() - n[:, 0].mean())
    results.append(
        CheckResult("cluster-vs-exact-mean", dev <= 4.0 * se, f"diff {dev:.4f} vs 4se={4 * se:.4f}")
    )
    _, df, p = two_sample_chisquare(n[:, 0], n_cl)
    results.append(
        CheckResult("cluster-vs-exact-chisq", p > 0.001, f"p = {p:.4g} (df={df})")
    )

    # variance asymptote: slope of the covariance ODE over [40, 50] (the
    # level wbar(t) carries a constant transient offset, the slope does not)
    curves = second_moments(params, np.linspace(0.0, 50.0, 251))
    w40 = float(np.interp(40.0, curves.grid, curves.wbar))
    slope = (curves.wbar[-1] - w40) / 10.0
    rel = abs(slope - dc.sigma2) / dc.sigma2
    results.append(
        CheckResult(
            "varN-asymptote-ode", rel < 1e-3, f"slope = {slope:.6f} vs {dc.sigma2:.6f}"
        )
    )

    # cluster-route variance vs ODE at t = 5
    w_ode = float(np.interp(5.0, curves.grid, curves.wbar))
    w_cl = var_n_cluster(params, 5.0)
    rel = abs(w_ode - w_cl) / max(w_cl, 1e-12)
    results.append(
        CheckResult("varN-cluster-vs-ode", rel < 1e-6, f"{w_cl:.10f} vs {w_ode:.10f}")
    )

    # cumulant ODE vs Lambert-W limit
    if dc.nu > 0:
        t_limit = 60.0 / dc.q_minus
        v_t = float(cumulant_v(params, -1.0, [t_limit])[-1])
        v_inf = v_infinity(-1.0, dc.nu)
        results.append(
            CheckResult(
                "cumulant-limit", abs(v_t - v_inf) < 1e-6, f"{v_t:.10f} vs {v_inf:.10f}"
            )
        )

        # Borel law of the total cascade size
        z = sample_z_infinity(params, n_paths, spawn_seed(seed, 3))
        ks = np.arange(1, 9)
        probs = np.array([borel_pmf(int(k), dc.nu) for k in ks])
        obs = np.array([(z == k).sum() for k in ks], dtype=float)
        tail_p = 1.0 - probs.sum()
        obs = np.append(obs, (z > 8).sum())
        exp = np.append(probs, tail_p) * z.size
        stat = float(((obs - exp) ** 2 / exp).sum())
        p = float(sps.chi2.sf(stat, obs.size - 1))
        results.append(CheckResult("borel-law", p > 0.001, f"p = {p:.4g}"))

    return results


def format_results(results: list[CheckResult]) -> str:
    lines = []
    width = max(len(r.name) for r in results)
    for r in results:
        status = "PASS" if r.passed else "FAIL"
        lines.append(f"{r.name:<{width}}  {status}  {r.detail}")
    n_fail = sum(not r.passed for r in results)
    lines.append(f"{len(results) - n_fail}/{len(results)} checks passed")
    return "\n".join(lines)
