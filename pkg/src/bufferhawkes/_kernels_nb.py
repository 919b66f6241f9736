"""Numba-jitted kernels; bitwise twins of the pure-Python ones in `_kernels_py`."""

from __future__ import annotations

import math

import numpy as np
from numba import njit

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)
_S30 = np.uint64(30)
_S27 = np.uint64(27)
_S31 = np.uint64(31)
_S11 = np.uint64(11)
_INV53 = 1.0 / (1 << 53)

KIND_LIMIT = 0
KIND_CANCEL = 1
KIND_EXEC = 2

STATUS_OK = 0
STATUS_NODE_GUARD = 1


@njit(cache=True)
def _rng_uniform(state):
    state = state + _GOLDEN
    z = state
    z = (z ^ (z >> _S30)) * _MIX1
    z = (z ^ (z >> _S27)) * _MIX2
    z = z ^ (z >> _S31)
    return state, float(z >> _S11) * _INV53


@njit(cache=True)
def _rng_exponential(state, rate):
    state, u = _rng_uniform(state)
    return state, -math.log(1.0 - u) / rate


@njit(cache=True)
def _rng_poisson(state, mean):
    limit = math.exp(-mean)
    k = 0
    p = 1.0
    while True:
        state, u = _rng_uniform(state)
        p *= u
        if p <= limit:
            return state, k
        k += 1


@njit(cache=True)
def _grow(arr):
    out = np.empty(arr.size * 2, dtype=arr.dtype)
    out[: arr.size] = arr
    return out


@njit(cache=True)
def _simulate_events(lambda0, a, b, c, d, horizon, seed, lam_init, gamma_init):
    state = np.uint64(seed)
    cd = c + d
    t = 0.0
    lam = lam_init
    gamma = gamma_init
    cap = 1024
    times = np.empty(cap, dtype=np.float64)
    kinds = np.empty(cap, dtype=np.int8)
    lams = np.empty(cap, dtype=np.float64)
    gammas = np.empty(cap, dtype=np.int64)
    n_ev = 0
    while True:
        bound = lam + cd * gamma
        state, e = _rng_exponential(state, 1.0)
        t_prop = t + e / bound
        if t_prop > horizon:
            break
        lam_prop = lambda0 + (lam - lambda0) * math.exp(-b * (t_prop - t))
        rate = lam_prop + cd * gamma
        state, u = _rng_uniform(state)
        t = t_prop
        lam = lam_prop
        if u * bound <= rate:
            state, v = _rng_uniform(state)
            r = v * rate
            if r < lam:
                kind = KIND_LIMIT
                gamma += 1
            elif r < lam + d * gamma:
                kind = KIND_CANCEL
                gamma -= 1
            else:
                kind = KIND_EXEC
                gamma -= 1
                lam += a
            if n_ev == cap:
                cap *= 2
                times = _grow(times)
                kinds = _grow(kinds)
                lams = _grow(lams)
                gammas = _grow(gammas)
            times[n_ev] = t
            kinds[n_ev] = kind
            lams[n_ev] = lam
            gammas[n_ev] = gamma
            n_ev += 1
    return times[:n_ev], kinds[:n_ev], lams[:n_ev], gammas[:n_ev]


def simulate_events(lambda0, a, b, c, d, horizon, seed, lam_init, gamma_init):
    return _simulate_events(
        float(lambda0),
        float(a),
        float(b),
        float(c),
        float(d),
        float(horizon),
        np.uint64(seed),
        float(lam_init),
        int(gamma_init),
    )


@njit(cache=True)
def _cascade(state, root_time, horizon, nu, b, cd, out, n_out, max_nodes):
    frontier = np.empty(64, dtype=np.float64)
    frontier[0] = root_time
    n_front = 1
    nodes = 0
    status = STATUS_OK
    while n_front > 0:
        n_front -= 1
        parent = frontier[n_front]
        state, count = _rng_poisson(state, nu)
        for _ in range(count):
            state, s = _rng_exponential(state, b)
            state, u = _rng_exponential(state, cd)
            birth = parent + s + u
            if birth <= horizon:
                nodes += 1
                if nodes > max_nodes:
                    return state, out, n_out, STATUS_NODE_GUARD
                if n_out == out.size:
                    out = _grow(out)
                out[n_out] = birth
                n_out += 1
                if n_front == frontier.size:
                    frontier = _grow(frontier)
                frontier[n_front] = birth
                n_front += 1
    return state, out, n_out, status


@njit(cache=True)
def _cascade_birth_times(nu, b, cd, root_time, horizon, seed, max_nodes):
    out = np.empty(64, dtype=np.float64)
    state = np.uint64(seed)
    state, out, n_out, status = _cascade(
        state, root_time, horizon, nu, b, cd, out, 0, max_nodes
    )
    return out[:n_out], status


def cascade_birth_times(nu, b, cd, root_time, horizon, seed, max_nodes):
    return _cascade_birth_times(
        float(nu),
        float(b),
        float(cd),
        float(root_time),
        float(horizon),
        np.uint64(seed),
        int(max_nodes),
    )


@njit(cache=True)
def _market_orders(lambda0, nu, b, cd, p_exec, t_start, horizon, seed, max_nodes):
    state = np.uint64(seed)
    out = np.empty(1024, dtype=np.float64)
    n_out = 0
    s = t_start
    while True:
        state, gap = _rng_exponential(state, lambda0)
        s += gap
        if s > horizon:
            return out[:n_out], STATUS_OK
        state, u = _rng_exponential(state, cd)
        state, w = _rng_uniform(state)
        root = s + u
        if w < p_exec and root <= horizon:
            if n_out == out.size:
                out = _grow(out)
            out[n_out] = root
            n_out += 1
            state, out, n_out, status = _cascade(
                state, root, horizon, nu, b, cd, out, n_out, max_nodes
            )
            if status != STATUS_OK:
                return out[:n_out], status


def market_orders(lambda0, nu, b, cd, p_exec, t_start, horizon, seed, max_nodes):
    return _market_orders(
        float(lambda0),
        float(nu),
        float(b),
        float(cd),
        float(p_exec),
        float(t_start),
        float(horizon),
        np.uint64(seed),
        int(max_nodes),
    )


@njit(cache=True)
def _total_progeny(nu, n_samples, seed, max_nodes):
    state = np.uint64(seed)
    counts = np.empty(n_samples, dtype=np.int64)
    for i in range(n_samples):
        alive = 1
        total = 1
        while alive > 0:
            alive -= 1
            state, k = _rng_poisson(state, nu)
            alive += k
            total += k
            if total > max_nodes:
                return counts[:i], STATUS_NODE_GUARD
        counts[i] = total
    return counts, STATUS_OK


def total_progeny(nu, n_samples, seed, max_nodes):
    return _total_progeny(float(nu), int(n_samples), np.uint64(seed), int(max_nodes))


# pure-python helpers reused as-is: seed derivation runs outside the hot loops
from ._kernels_py import path_seed, rng_next, rng_uniform  # noqa: E402,F401
