"""Diffusion-limit experiments and moment-based parameter estimation."""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np
from scipy import stats as sps

from .exact import EventLog, path_to_grid, simulate_path, simulate_stationary_path
from .moments import first_moments, stationary_stats
from .params import ModelParams, derived_constants
from .rng import spawn_seed


class InsufficientData(ValueError):
    pass


def ensemble_grid(
    params: ModelParams,
    horizon: float,
    n_paths: int,
    t_grid,
    seed: int,
    burn_in: float = 0.0,
):
    """Simulate n_paths independent paths and sample (lambda, gamma, n) on a grid.

    Returns three (n_paths, len(grid)) arrays. Path i uses the derived seed
    spawn_seed(seed, i), so results are independent of scheduling order.
    """
    t_grid = np.atleast_1d(np.asarray(t_grid, dtype=np.float64))
    lam = np.empty((n_paths, t_grid.size))
    gam = np.empty((n_paths, t_grid.size), dtype=np.int64)
    n = np.empty((n_paths, t_grid.size), dtype=np.int64)
    for i in range(n_paths):
        s = spawn_seed(seed, i)
        if burn_in > 0:
            log = simulate_stationary_path(params, horizon, burn_in, s)
        else:
            log = simulate_path(params, horizon, s)
        lam[i], gam[i], n[i] = path_to_grid(log, t_grid)
    return lam, gam, n


@dataclass
class ScaleStats:
    m: int
    emp_mean: np.ndarray  # of the centered, sqrt(m)-scaled count, per grid t
    emp_var: np.ndarray
    ks: np.ndarray  # KS distance of scaled count / sigma vs standard normal
    increment_cov: float  # cov(first window, remainder), scaled


@dataclass
class ScalingReport:
    params: ModelParams
    scales: list[int]
    n_paths: int
    t_grid: np.ndarray
    predicted_sigma2: float
    stationary: bool
    seed: int
    per_scale: list[ScaleStats] = field(default_factory=list)

    def to_dict(self) -> dict:
        p = self.params
        return {
            "params": {"lambda0": p.lambda0, "a": p.a, "b": p.b, "c": p.c, "d": p.d},
            "seed": self.seed,
            "n_paths": self.n_paths,
            "stationary": self.stationary,
            "t_grid": self.t_grid.tolist(),
            "predicted_sigma2": self.predicted_sigma2,
            "per_scale": [
                {
                    "m": s.m,
                    "emp_mean": s.emp_mean.tolist(),
                    "emp_var": s.emp_var.tolist(),
                    "ks": s.ks.tolist(),
                    "increment_cov": s.increment_cov,
                }
                for s in self.per_scale
            ],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    def write_csv(self, path) -> None:
        from . import __version__

        with open(path, "w") as f:
            f.write(f"# bufferhawkes v{__version__} seed={self.seed}\n")
            f.write("m,t,n_paths,emp_mean,emp_var,predicted_var,ks\n")
            for s in self.per_scale:
                for j, t in enumerate(self.t_grid):
                    f.write(
                        f"{s.m},{t:.15g},{self.n_paths},{s.emp_mean[j]:.15g},"
                        f"{s.emp_var[j]:.15g},{self.predicted_sigma2 * t:.15g},"
                        f"{s.ks[j]:.15g}\n"
                    )


def run_scaling(
    params: ModelParams,
    scales,
    n_paths: int,
    t_grid,
    seed: int,
    stationary: bool = False,
    burn_in: float | None = None,
) -> ScalingReport:
    """Monte Carlo check of the Brownian limit of the scaled order count.

    For each scale m, simulates n_paths paths to horizon m * max(t_grid) and
    forms (N_{mt} - E N_{mt}) / sqrt(m) with the analytic mean, so variance
    error is exposed without empirical centering.
    """
    scales = [int(m) for m in scales]
    t_grid = np.atleast_1d(np.asarray(t_grid, dtype=np.float64))
    if n_paths < 100:
        raise ValueError("n_paths must be >= 100")
    dc = derived_constants(params)
    sigma = np.sqrt(dc.sigma2)
    if burn_in is None:
        burn_in = 10.0 / dc.q_minus
    report = ScalingReport(
        params=params,
        scales=scales,
        n_paths=n_paths,
        t_grid=t_grid,
        predicted_sigma2=dc.sigma2,
        stationary=stationary,
        seed=int(seed),
    )
    for j, m in enumerate(scales):
        scale_seed = spawn_seed(seed, j)
        horizon = m * float(t_grid.max())
        _, _, n_mat = ensemble_grid(
            params,
            horizon,
            n_paths,
            m * t_grid,
            scale_seed,
            burn_in=burn_in if stationary else 0.0,
        )
        if stationary:
            centered = n_mat - stationary_stats(params).mean_slope * (m * t_grid)
        else:
            _, _, mean_n = first_moments(params, m * t_grid)
            centered = n_mat - mean_n
        scaled = centered / np.sqrt(m)
        ks = np.array(
            [sps.kstest(scaled[:, k] / sigma, "norm").statistic for k in range(t_grid.size)]
        )
        if t_grid.size >= 2:
            first = scaled[:, 0]
            rest = scaled[:, -1] - scaled[:, 0]
            inc_cov = float(np.cov(first, rest)[0, 1])
        else:
            inc_cov = float("nan")
        report.per_scale.append(
            ScaleStats(
                m=m,
                emp_mean=scaled.mean(axis=0),
                emp_var=scaled.var(axis=0, ddof=1),
                ks=ks,
                increment_cov=inc_cov,
            )
        )
    return report


@dataclass
class EstimateRecord:
    """Moment-based estimates from one observed event log."""

    exec_ratio: float  # estimate of c / (c+d)
    gamma_mean: float  # time-average book depth, estimate of E Gamma_inf
    vmr: float  # variance-to-mean ratio of binned order-count increments
    nu_hat: float  # 1 - vmr^(-1/2); may be slightly negative at nu = 0
    implied_a_over_b: float
    bin_width: float
    n_bins: int
    n_executions: int
    n_cancellations: int

    def to_dict(self) -> dict:
        return {
            "exec_ratio": self.exec_ratio,
            "gamma_mean": self.gamma_mean,
            "vmr": self.vmr,
            "nu_hat": self.nu_hat,
            "implied_a_over_b": self.implied_a_over_b,
            "bin_width": self.bin_width,
            "n_bins": self.n_bins,
            "n_executions": self.n_executions,
            "n_cancellations": self.n_cancellations,
        }


def estimate_from_events(
    times, kinds, gammas, horizon: float, bin_width: float, init_gamma: int = 0
) -> EstimateRecord:
    """Estimation from raw event arrays (kind codes as in the event log)."""
    times = np.asarray(times, dtype=np.float64)
    kinds = np.asarray(kinds)
    gammas = np.asarray(gammas, dtype=np.float64)
    exec_mask = kinds == 2
    cancel_mask = kinds == 1
    n_exec = int(exec_mask.sum())
    n_cancel = int(cancel_mask.sum())
    n_bins = int(horizon // bin_width)
    if n_bins < 100 or n_exec < 100:
        raise InsufficientData(
            f"need >= 100 bins and >= 100 executions, got {n_bins} bins, {n_exec} executions"
        )
    ratio = n_exec / (n_exec + n_cancel) if (n_exec + n_cancel) else float("nan")

    edges = np.concatenate(([0.0], times, [horizon]))
    levels = np.concatenate(([init_gamma], gammas))
    gamma_mean = float(np.sum(levels * np.diff(edges)) / horizon)

    exec_times = times[exec_mask]
    counts = np.histogram(exec_times, bins=n_bins, range=(0.0, n_bins * bin_width))[0]
    mean_c = counts.mean()
    vmr = float(counts.var(ddof=1) / mean_c)
    nu_hat = 1.0 - vmr ** (-0.5)
    implied = nu_hat / ratio if ratio > 0 else float("nan")
    return EstimateRecord(
        exec_ratio=float(ratio),
        gamma_mean=gamma_mean,
        vmr=vmr,
        nu_hat=float(nu_hat),
        implied_a_over_b=float(implied),
        bin_width=float(bin_width),
        n_bins=n_bins,
        n_executions=n_exec,
        n_cancellations=n_cancel,
    )


def estimate_params(log: EventLog, bin_width: float | None = None) -> EstimateRecord:
    """Moment-based parameter estimates from a simulated or observed log.

    Default bin width 50 / q_minus: wide enough that the variance-to-mean
    ratio of binned increments approaches its large-window limit 1/(1-nu)^2,
    which is inverted as nu_hat = 1 - vmr^(-1/2).
    """
    if bin_width is None:
        bin_width = 50.0 / derived_constants(log.params).q_minus
    return estimate_from_events(
        log.times,
        log.kinds,
        log.gammas,
        log.horizon,
        bin_width,
        init_gamma=log.init.gamma,
    )
