"""Pure-Python reference kernels.

These are the fallback implementations used when numba is unavailable or
disabled via BUFFERHAWKES_NUMBA=0. The jitted twins in `_kernels_nb` consume
the same splitmix64 stream in the same draw order, so both backends produce
bitwise-identical output for a given seed (asserted in the test suite).
"""

from __future__ import annotations

import math

MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB
_INV53 = 1.0 / (1 << 53)

KIND_LIMIT = 0
KIND_CANCEL = 1
KIND_EXEC = 2

STATUS_OK = 0
STATUS_NODE_GUARD = 1


def rng_next(state):
    """Advance a splitmix64 state, return (new_state, 64-bit output)."""
    state = (state + _GOLDEN) & MASK64
    z = state
    z = ((z ^ (z >> 30)) * _MIX1) & MASK64
    z = ((z ^ (z >> 27)) * _MIX2) & MASK64
    z ^= z >> 31
    return state, z


def rng_uniform(state):
    state, z = rng_next(state)
    return state, (z >> 11) * _INV53  # in [0, 1)


def rng_exponential(state, rate):
    state, u = rng_uniform(state)
    return state, -math.log(1.0 - u) / rate


def rng_poisson(state, mean):
    """Knuth's product method; intended for small means (mean < ~5)."""
    limit = math.exp(-mean)
    k = 0
    p = 1.0
    while True:
        state, u = rng_uniform(state)
        p *= u
        if p <= limit:
            return state, k
        k += 1


def path_seed(master, index):
    """Counter-based per-path seed: the index-th splitmix64 output of master."""
    s = (master + index * _GOLDEN) & MASK64
    _, z = rng_next(s)
    return z


def accept_next_event(t, lam, gamma, lambda0, a, b, c, d, horizon, state):
    """Thinning step: advance to the next accepted event or past the horizon.

    The total rate lambda(t) + (c+d)*gamma is nonincreasing between events,
    so the rate at the last (proposal or event) epoch is an exact bound.
    Returns (state, t_event, lam_pre_jump, kind); kind = -1 means the next
    event falls beyond the horizon.
    """
    cd = c + d
    while True:
        bound = lam + cd * gamma
        state, e = rng_exponential(state, 1.0)
        t_prop = t + e / bound
        if t_prop > horizon:
            return state, t_prop, lam, -1
        lam_prop = lambda0 + (lam - lambda0) * math.exp(-b * (t_prop - t))
        rate = lam_prop + cd * gamma
        state, u = rng_uniform(state)
        t = t_prop
        lam = lam_prop
        if u * bound <= rate:
            state, v = rng_uniform(state)
            r = v * rate
            if r < lam:
                kind = KIND_LIMIT
            elif r < lam + d * gamma:
                kind = KIND_CANCEL
            else:
                kind = KIND_EXEC
            return state, t, lam, kind


def simulate_events(lambda0, a, b, c, d, horizon, seed, lam_init, gamma_init):
    """Event loop for the exact simulator.

    Returns (times, kinds, lams, gammas) as python lists; lams and gammas
    are the post-event values. Times are offsets from the initial epoch.
    """
    state = seed & MASK64
    t = 0.0
    lam = lam_init
    gamma = gamma_init
    times = []
    kinds = []
    lams = []
    gammas = []
    while True:
        state, t, lam, kind = accept_next_event(
            t, lam, gamma, lambda0, a, b, c, d, horizon, state
        )
        if kind == -1:
            break
        if kind == KIND_LIMIT:
            gamma += 1
        elif kind == KIND_CANCEL:
            gamma -= 1
        else:
            gamma -= 1
            lam += a
        times.append(t)
        kinds.append(kind)
        lams.append(lam)
        gammas.append(gamma)
    return times, kinds, lams, gammas


def _cascade(state, root_time, horizon, nu, b, cd, out, max_nodes):
    """Append descendant birth times of a root to `out` (root excluded).

    Children born after the horizon are dropped together with their subtrees,
    which is exact for horizon-limited counts. Returns (state, status).
    """
    frontier = [root_time]
    nodes = 0
    while frontier:
        parent = frontier.pop()
        state, count = rng_poisson(state, nu)
        for _ in range(count):
            state, s = rng_exponential(state, b)
            state, u = rng_exponential(state, cd)
            birth = parent + s + u
            if birth <= horizon:
                nodes += 1
                if nodes > max_nodes:
                    return state, STATUS_NODE_GUARD
                out.append(birth)
                frontier.append(birth)
    return state, STATUS_OK


def cascade_birth_times(nu, b, cd, root_time, horizon, seed, max_nodes):
    """Descendant birth times of a single cascade. Returns (times, status)."""
    out = []
    _, status = _cascade(seed & MASK64, root_time, horizon, nu, b, cd, out, max_nodes)
    return out, status


def market_orders(lambda0, nu, b, cd, p_exec, t_start, horizon, seed, max_nodes):
    """Cluster simulation of executed-order times on [t_start, horizon].

    Immigrant limit orders arrive at rate lambda0 from t_start; each draws a
    book-residence time Exp(cd) and becomes an executed root with probability
    p_exec, spawning a cascade. Returns (unsorted times, status).
    """
    state = seed & MASK64
    out = []
    s = t_start
    while True:
        state, gap = rng_exponential(state, lambda0)
        s += gap
        if s > horizon:
            return out, STATUS_OK
        state, u = rng_exponential(state, cd)
        state, w = rng_uniform(state)
        root = s + u
        if w < p_exec and root <= horizon:
            out.append(root)
            state, status = _cascade(state, root, horizon, nu, b, cd, out, max_nodes)
            if status != STATUS_OK:
                return out, status


def total_progeny(nu, n_samples, seed, max_nodes):
    """Total progeny counts of n_samples extinct cascades (Z_inf samples).

    Birth-time delays do not affect the total count, so only the Poisson(nu)
    offspring draws are consumed. Returns (counts, status).
    """
    state = seed & MASK64
    counts = []
    for _ in range(n_samples):
        alive = 1
        total = 1
        while alive > 0:
            alive -= 1
            state, k = rng_poisson(state, nu)
            alive += k
            total += k
            if total > max_nodes:
                return counts, STATUS_NODE_GUARD
        counts.append(total)
    return counts, STATUS_OK
