"""Branching (cluster) simulator of the market-order count.

Shares no sampling code path with the exact simulator in `exact`; the two
serve as mutual distributional oracles.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .backend import kernels
from .params import ModelParams, derived_constants
from .rng import SplitMix64

# a single cascade exceeding this many nodes indicates parameter misuse;
# unreachable under the stability condition
MAX_CASCADE_NODES = 10_000_000


class CascadeOverflow(RuntimeError):
    pass


@dataclass
class ClusterNode:
    """One executed order in a cascade tree; birth_time is its execution epoch."""

    birth_time: float
    children: list = field(default_factory=list)


@dataclass
class ZPath:
    """One cascade realization: Z(t) = 1 + number of descendant births <= t."""

    params: ModelParams
    horizon: float
    seed: int
    birth_times: np.ndarray  # sorted descendant birth times, root excluded

    def z_at(self, t) -> np.ndarray:
        t = np.atleast_1d(np.asarray(t, dtype=np.float64))
        return 1 + np.searchsorted(self.birth_times, t, side="right")


@dataclass
class ClusterSample:
    """Executed-order times from the immigrant/cascade construction."""

    params: ModelParams
    horizon: float
    seed: int
    lookback: float
    order_times: np.ndarray  # sorted, within [0, horizon]
    immigrant_roots: list | None = None  # ClusterNode trees, kept on request


def _check(status) -> None:
    if status != 0:
        raise CascadeOverflow(
            f"a single cascade exceeded {MAX_CASCADE_NODES} nodes; "
            "check the stability condition"
        )


def sample_offspring(
    params: ModelParams, parent_time: float, horizon: float, rng: SplitMix64
) -> list[float]:
    """One generation of offspring execution times of a parent execution.

    Count ~ Poisson(nu); each child time is parent + Exp(b) + Exp(c+d).
    Births past the horizon are dropped (their descendants cannot be born
    before the horizon either, so dropping is exact).
    """
    dc = derived_constants(params)
    cd = params.c + params.d
    count = _poisson(rng, dc.nu)
    births = []
    for _ in range(count):
        s = -math.log(1.0 - rng.uniform()) / params.b
        u = -math.log(1.0 - rng.uniform()) / cd
        birth = parent_time + s + u
        if birth <= horizon:
            births.append(birth)
    return births


def _poisson(rng: SplitMix64, mean: float) -> int:
    limit = math.exp(-mean)
    k = 0
    p = 1.0
    while True:
        p *= rng.uniform()
        if p <= limit:
            return k
        k += 1


def sample_cluster_tree(
    params: ModelParams, root_time: float, horizon: float, rng: SplitMix64
) -> ClusterNode:
    """Materialize one cascade as an explicit tree (small-scale use only)."""
    root = ClusterNode(birth_time=root_time)
    frontier = [root]
    nodes = 0
    while frontier:
        node = frontier.pop()
        for birth in sample_offspring(params, node.birth_time, horizon, rng):
            child = ClusterNode(birth_time=birth)
            node.children.append(child)
            frontier.append(child)
            nodes += 1
            if nodes > MAX_CASCADE_NODES:
                raise CascadeOverflow("cascade tree exceeded the node guard")
    return root


def simulate_z(params: ModelParams, horizon: float, seed: int) -> ZPath:
    """Cascade started by a single root at time 0; returns its Z step function."""
    dc = derived_constants(params)
    births, status = kernels.cascade_birth_times(
        dc.nu, params.b, params.c + params.d, 0.0, horizon, seed, MAX_CASCADE_NODES
    )
    _check(status)
    births = np.sort(np.asarray(births, dtype=np.float64))
    return ZPath(params=params, horizon=float(horizon), seed=int(seed), birth_times=births)


def sample_z_infinity(params: ModelParams, n_samples: int, seed: int) -> np.ndarray:
    """Total progeny of n_samples cascades followed to extinction (Z_inf draws)."""
    dc = derived_constants(params)
    counts, status = kernels.total_progeny(dc.nu, n_samples, seed, MAX_CASCADE_NODES)
    _check(status)
    return np.asarray(counts, dtype=np.int64)


def simulate_market_orders(
    params: ModelParams,
    horizon: float,
    seed: int,
    lookback: float = 0.0,
    keep_trees: bool = False,
) -> ClusterSample:
    """Cluster-representation sample of executed-order times on [0, horizon].

    Immigrant limit orders arrive at rate lambda0 on [-lookback, horizon];
    each is executed (rather than cancelled) with probability c/(c+d) after an
    Exp(c+d) residence time, and every execution spawns a Poisson(nu) cascade.
    With lookback > 0 only order times in [0, horizon] are retained, which
    approximates the stationary-increments version.
    """
    if lookback < 0:
        raise ValueError(f"lookback must be >= 0, got {lookback}")
    dc = derived_constants(params)
    cd = params.c + params.d
    p_exec = params.c / cd
    times, status = kernels.market_orders(
        params.lambda0,
        dc.nu,
        params.b,
        cd,
        p_exec,
        -lookback,
        horizon,
        seed,
        MAX_CASCADE_NODES,
    )
    _check(status)
    times = np.asarray(times, dtype=np.float64)
    times = np.sort(times[times >= 0.0])
    roots = None
    if keep_trees:
        roots = _build_trees(params, horizon, lookback, seed)
    return ClusterSample(
        params=params,
        horizon=float(horizon),
        seed=int(seed),
        lookback=float(lookback),
        order_times=times,
        immigrant_roots=roots,
    )


def _build_trees(params, horizon, lookback, seed) -> list[ClusterNode]:
    # replays the kernel's draw sequence through the shared stream, so the
    # trees flatten to exactly the kernel's order times
    dc = derived_constants(params)
    cd = params.c + params.d
    p_exec = params.c / cd
    rng = SplitMix64(seed)
    roots = []
    s = -lookback
    while True:
        s += -math.log(1.0 - rng.uniform()) / params.lambda0
        if s > horizon:
            return roots
        u = -math.log(1.0 - rng.uniform()) / cd
        w = rng.uniform()
        root_time = s + u
        if w < p_exec and root_time <= horizon:
            roots.append(sample_cluster_tree(params, root_time, horizon, rng))


def n_counts_at(sample: ClusterSample, grid) -> np.ndarray:
    """Number of retained order times <= each grid point."""
    grid = np.atleast_1d(np.asarray(grid, dtype=np.float64))
    return np.searchsorted(sample.order_times, grid, side="right").astype(np.int64)


def write_order_times_csv(sample: ClusterSample, path) -> None:
    from . import __version__

    p = sample.params
    with open(path, "w") as f:
        f.write(
            f"# bufferhawkes v{__version__} lambda0={p.lambda0:.15g} a={p.a:.15g} "
            f"b={p.b:.15g} c={p.c:.15g} d={p.d:.15g} seed={sample.seed} "
            f"horizon={sample.horizon:.15g} lookback={sample.lookback:.15g}\n"
        )
        f.write("time\n")
        for t in sample.order_times:
            f.write(f"{t:.15g}\n")


def write_z_path_csv(zpath: ZPath, path) -> None:
    from . import __version__

    p = zpath.params
    with open(path, "w") as f:
        f.write(
            f"# bufferhawkes v{__version__} lambda0={p.lambda0:.15g} a={p.a:.15g} "
            f"b={p.b:.15g} c={p.c:.15g} d={p.d:.15g} seed={zpath.seed} "
            f"horizon={zpath.horizon:.15g}\n"
        )
        f.write("time,z\n")
        f.write("0,1\n")
        for i, t in enumerate(zpath.birth_times):
            f.write(f"{t:.15g},{i + 2}\n")
