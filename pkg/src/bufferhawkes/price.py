"""Price-process models built on top of the exact simulator."""

from __future__ import annotations

import numpy as np
from dataclasses import dataclass, field

from ._kernels_py import KIND_EXEC
from .exact import EventLog, gamma_integral, path_to_grid, simulate_path
from .params import ModelParams
from .rng import spawn_seed

MIDPRICE = "MIDPRICE"
INVERSE_DEPTH = "INVERSE_DEPTH"
GEOMETRIC = "GEOMETRIC"
PRICE_KINDS = (MIDPRICE, INVERSE_DEPTH, GEOMETRIC)


class UnsupportedKind(ValueError):
    pass


@dataclass
class PricePath:
    kind: str
    alpha: float  # tick size (MIDPRICE / INVERSE_DEPTH) or drift (GEOMETRIC)
    grid: np.ndarray
    values: np.ndarray
    extra: dict = field(default_factory=dict)

    def write_csv(self, path) -> None:
        from . import __version__

        with open(path, "w") as f:
            f.write(f"# bufferhawkes v{__version__} kind={self.kind} alpha={self.alpha:.15g}\n")
            f.write("t,price\n")
            for t, v in zip(self.grid, self.values):
                f.write(f"{t:.15g},{v:.15g}\n")


def _inverse_depth_cum(log: EventLog, grid: np.ndarray) -> np.ndarray:
    """Cumulative sum of 1 / (pre-event depth) over executions up to each grid time.

    Executions cannot occur from an empty book, so the pre-event depth
    (post-event depth + 1) is always >= 1.
    """
    mask = log.kinds == KIND_EXEC
    exec_times = log.times[mask]
    pre_depth = log.gammas[mask] + 1
    assert np.all(pre_depth >= 1)
    cum = np.concatenate(([0.0], np.cumsum(1.0 / pre_depth)))
    idx = np.searchsorted(exec_times, grid, side="right")
    return cum[idx]


def simulate_price(
    params_plus: ModelParams,
    params_minus: ModelParams | None,
    kind: str,
    alpha: float,
    horizon: float,
    grid,
    seed: int,
    s0: float = 1.0,
    jump_sigma: float = 0.05,
    diagnostic_same_seed: bool = False,
) -> PricePath:
    """Simulate a price path driven by buffer-Hawkes market orders.

    MIDPRICE and INVERSE_DEPTH use two independent up/down order flows (the
    minus side defaults to the same parameters); GEOMETRIC uses a single flow
    with multiplicative jumps of size jump_sigma and drift alpha.
    `diagnostic_same_seed` forces both sides onto one seed (symmetry check).
    """
    grid = np.atleast_1d(np.asarray(grid, dtype=np.float64))
    if kind not in PRICE_KINDS:
        raise UnsupportedKind(f"kind must be one of {PRICE_KINDS}, got {kind!r}")
    if params_minus is None:
        params_minus = params_plus

    if kind == GEOMETRIC:
        log = simulate_path(params_plus, horizon, spawn_seed(seed, 0))
        _, _, n = path_to_grid(log, grid)
        gi = np.array([gamma_integral(log, t) for t in grid])
        values = (
            s0
            * (1.0 + jump_sigma) ** n.astype(np.float64)
            * np.exp(alpha * grid - jump_sigma * params_plus.c * gi)
        )
        return PricePath(
            kind=kind,
            alpha=alpha,
            grid=grid,
            values=values,
            extra={"s0": s0, "jump_sigma": jump_sigma},
        )

    seed_plus = spawn_seed(seed, 0)
    seed_minus = seed_plus if diagnostic_same_seed else spawn_seed(seed, 1)
    log_plus = simulate_path(params_plus, horizon, seed_plus)
    log_minus = simulate_path(params_minus, horizon, seed_minus)

    if kind == MIDPRICE:
        _, _, n_plus = path_to_grid(log_plus, grid)
        _, _, n_minus = path_to_grid(log_minus, grid)
        values = (n_plus - n_minus) * (alpha / 2.0)
    else:
        values = (
            _inverse_depth_cum(log_plus, grid) - _inverse_depth_cum(log_minus, grid)
        ) * (alpha / 2.0)
    return PricePath(kind=kind, alpha=alpha, grid=grid, values=values)
