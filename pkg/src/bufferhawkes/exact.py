"""Exact event-driven simulation of the (intensity, depth, order-count) triple.

Events are sampled by thinning: between events the total jump rate
lambda(t) + (c+d)*gamma is nonincreasing, so its value at the last epoch is
an exact dominating bound.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernels_py
from ._kernels_py import KIND_CANCEL, KIND_EXEC, KIND_LIMIT
from .backend import kernels
from .params import ModelParams
from .rng import SplitMix64

KIND_NAMES = ("LIMIT_ARRIVAL", "CANCELLATION", "EXECUTION")


class HorizonNonPositive(ValueError):
    pass


class GridOutOfRange(ValueError):
    pass


@dataclass(frozen=True)
class SimState:
    """Snapshot of the process at an event epoch."""

    t: float
    lam: float
    gamma: int
    n: int
    l: int = 0
    k_cancelled: int = 0


@dataclass
class EventLog:
    """Complete record of one simulated path.

    Arrays are aligned: entry i holds the post-event state at times[i].
    `init` is the state at time 0; counters (n, l, k) count from there.
    """

    params: ModelParams
    seed: int
    horizon: float
    init: SimState
    times: np.ndarray
    kinds: np.ndarray
    lams: np.ndarray
    gammas: np.ndarray
    ns: np.ndarray = field(repr=False, default=None)
    ls: np.ndarray = field(repr=False, default=None)
    ks: np.ndarray = field(repr=False, default=None)

    def __post_init__(self):
        if self.ns is None:
            self.ls = self.init.l + np.cumsum(self.kinds == KIND_LIMIT)
            self.ks = self.init.k_cancelled + np.cumsum(self.kinds == KIND_CANCEL)
            self.ns = self.init.n + np.cumsum(self.kinds == KIND_EXEC)

    def __len__(self):
        return self.times.size

    @property
    def execution_times(self) -> np.ndarray:
        return self.times[self.kinds == KIND_EXEC]

    def state_at(self, i: int) -> SimState:
        return SimState(
            t=float(self.times[i]),
            lam=float(self.lams[i]),
            gamma=int(self.gammas[i]),
            n=int(self.ns[i]),
            l=int(self.ls[i]),
            k_cancelled=int(self.ks[i]),
        )

    def events(self):
        """Yield (time, kind name, post-event SimState) tuples."""
        for i in range(len(self)):
            yield float(self.times[i]), KIND_NAMES[self.kinds[i]], self.state_at(i)


def evolve_lambda(lam_at_event: float, lambda0: float, b: float, dt: float) -> float:
    """Intensity decayed dt time units past an event epoch."""
    return lambda0 + (lam_at_event - lambda0) * math.exp(-b * dt)


def next_event(state: SimState, params: ModelParams, rng: SplitMix64):
    """Sample the waiting time and kind of the next event from `state`.

    Exact thinning against the bound lambda + (c+d)*gamma; the returned dt
    may exceed any horizon the caller enforces. Kind is one of KIND_NAMES.
    """
    rng.state, t_ev, _, kind = _kernels_py.accept_next_event(
        state.t,
        state.lam,
        state.gamma,
        params.lambda0,
        params.a,
        params.b,
        params.c,
        params.d,
        math.inf,
        rng.state,
    )
    return t_ev - state.t, KIND_NAMES[kind]


def simulate_path(
    params: ModelParams,
    horizon: float,
    seed: int,
    init: SimState | None = None,
) -> EventLog:
    """Simulate one path on [0, horizon] from an empty book by default."""
    if horizon < 0:
        raise HorizonNonPositive(f"horizon must be >= 0, got {horizon}")
    if init is None:
        init = SimState(t=0.0, lam=params.lambda0, gamma=0, n=0)
    times, kinds, lams, gammas = kernels.simulate_events(
        params.lambda0,
        params.a,
        params.b,
        params.c,
        params.d,
        horizon,
        seed,
        init.lam,
        init.gamma,
    )
    return EventLog(
        params=params,
        seed=int(seed),
        horizon=float(horizon),
        init=init,
        times=np.asarray(times, dtype=np.float64),
        kinds=np.asarray(kinds, dtype=np.int8),
        lams=np.asarray(lams, dtype=np.float64),
        gammas=np.asarray(gammas, dtype=np.int64),
    )


def simulate_stationary_path(
    params: ModelParams, horizon: float, burn_in: float, seed: int
) -> EventLog:
    """Approximate stationary-increments path: burn in, then re-zero clock and counts.

    Simulates on [0, burn_in + horizon] from an empty book, discards events
    before burn_in, and shifts so the retained segment starts at time 0 with
    n = l = k = 0. Burn-in error decays exponentially at rate q_minus.
    """
    if burn_in < 0:
        raise ValueError(f"burn_in must be >= 0, got {burn_in}")
    full = simulate_path(params, burn_in + horizon, seed)
    if burn_in == 0:
        return full
    i0 = int(np.searchsorted(full.times, burn_in, side="right"))
    if i0 == 0:
        lam0 = evolve_lambda(full.init.lam, params.lambda0, params.b, burn_in)
        gamma0 = full.init.gamma
    else:
        lam0 = evolve_lambda(
            float(full.lams[i0 - 1]), params.lambda0, params.b, burn_in - float(full.times[i0 - 1])
        )
        gamma0 = int(full.gammas[i0 - 1])
    init = SimState(t=0.0, lam=lam0, gamma=gamma0, n=0)
    return EventLog(
        params=params,
        seed=int(seed),
        horizon=float(horizon),
        init=init,
        times=full.times[i0:] - burn_in,
        kinds=full.kinds[i0:],
        lams=full.lams[i0:],
        gammas=full.gammas[i0:],
    )


def path_to_grid(log: EventLog, grid) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Cadlag evaluation of (lambda, gamma, n) at the grid times.

    Post-event values at jump instants; lambda decays analytically between
    events.
    """
    grid = np.atleast_1d(np.asarray(grid, dtype=np.float64))
    if grid.size and (grid.min() < 0.0 or grid.max() > log.horizon):
        raise GridOutOfRange(
            f"grid must lie in [0, {log.horizon}], got [{grid.min()}, {grid.max()}]"
        )
    if len(log) == 0:
        lam = log.params.lambda0 + (log.init.lam - log.params.lambda0) * np.exp(
            -log.params.b * grid
        )
        fill = np.full(grid.shape, log.init.gamma, dtype=np.int64)
        n = np.full(grid.shape, log.init.n, dtype=np.int64)
        return lam, fill, n
    idx = np.searchsorted(log.times, grid, side="right") - 1
    has_ev = idx >= 0
    lam_base = np.where(has_ev, log.lams[np.maximum(idx, 0)], log.init.lam)
    t_base = np.where(has_ev, log.times[np.maximum(idx, 0)], 0.0)
    lam = log.params.lambda0 + (lam_base - log.params.lambda0) * np.exp(
        -log.params.b * (grid - t_base)
    )
    gamma = np.where(has_ev, log.gammas[np.maximum(idx, 0)], log.init.gamma)
    n = np.where(has_ev, log.ns[np.maximum(idx, 0)], log.init.n)
    return lam, gamma.astype(np.int64), n.astype(np.int64)


def gamma_integral(log: EventLog, t: float) -> float:
    """Exact integral of the (piecewise constant) book depth over [0, t]."""
    if t < 0 or t > log.horizon:
        raise GridOutOfRange(f"t must lie in [0, {log.horizon}], got {t}")
    i_end = int(np.searchsorted(log.times, t, side="right"))
    edges = np.concatenate(([0.0], log.times[:i_end], [t]))
    levels = np.concatenate(([log.init.gamma], log.gammas[:i_end]))
    return float(np.sum(levels * np.diff(edges)))


def _metadata_line(log: EventLog) -> str:
    from . import __version__

    p = log.params
    return (
        f"# bufferhawkes v{__version__} lambda0={p.lambda0:.15g} a={p.a:.15g} "
        f"b={p.b:.15g} c={p.c:.15g} d={p.d:.15g} seed={log.seed} "
        f"horizon={log.horizon:.15g}\n"
    )


def write_events_csv(log: EventLog, path) -> None:
    """Event log as CSV: time,kind,lambda,gamma,n with a commented metadata line."""
    with open(path, "w") as f:
        f.write(_metadata_line(log))
        f.write("time,kind,lambda,gamma,n\n")
        for i in range(len(log)):
            f.write(
                f"{log.times[i]:.15g},{KIND_NAMES[log.kinds[i]]},"
                f"{log.lams[i]:.15g},{log.gammas[i]},{log.ns[i]}\n"
            )


def write_grid_csv(log: EventLog, grid, path) -> None:
    """Grid-sampled trajectory as CSV: t,lambda,gamma,n."""
    grid = np.atleast_1d(np.asarray(grid, dtype=np.float64))
    lam, gamma, n = path_to_grid(log, grid)
    with open(path, "w") as f:
        f.write(_metadata_line(log))
        f.write("t,lambda,gamma,n\n")
        for i in range(grid.size):
            f.write(f"{grid[i]:.15g},{lam[i]:.15g},{gamma[i]},{n[i]}\n")
