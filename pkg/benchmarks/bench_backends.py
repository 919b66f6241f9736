"""Timing comparison of the numba kernels against the pure-Python fallback.

Run with: python3 benchmarks/bench_backends.py
"""

from __future__ import annotations

import time

from bufferhawkes import ModelParams
from bufferhawkes import _kernels_nb as nb
from bufferhawkes import _kernels_py as py

PARAMS = ModelParams(lambda0=2.0, a=1.0, b=2.0, c=1.0, d=1.0)
HORIZON = 2000.0
N_REPS = 5
SEED = 4242


def _bench(label: str, fn) -> float:
    fn()  # warm up (triggers jit compilation for the numba path)
    best = min(_timed(fn) for _ in range(N_REPS))
    print(f"{label:<28} {best * 1e3:10.2f} ms")
    return best


def _timed(fn) -> float:
    t0 = time.perf_counter()
    fn()
    return time.perf_counter() - t0


def main() -> None:
    p = PARAMS
    cd = p.c + p.d
    nu = p.a * p.c / (p.b * cd)
    p_exec = p.c / cd
    max_nodes = 10_000_000

    print(f"horizon={HORIZON:g}, best of {N_REPS} runs\n")

    t_py = _bench(
        "simulate_events (python)",
        lambda: py.simulate_events(p.lambda0, p.a, p.b, p.c, p.d, HORIZON, SEED, p.lambda0, 0),
    )
    t_nb = _bench(
        "simulate_events (numba)",
        lambda: nb.simulate_events(p.lambda0, p.a, p.b, p.c, p.d, HORIZON, SEED, p.lambda0, 0),
    )
    print(f"{'speedup':<28} {t_py / t_nb:10.1f} x\n")

    t_py = _bench(
        "market_orders (python)",
        lambda: py.market_orders(p.lambda0, nu, p.b, cd, p_exec, 0.0, HORIZON, SEED, max_nodes),
    )
    t_nb = _bench(
        "market_orders (numba)",
        lambda: nb.market_orders(p.lambda0, nu, p.b, cd, p_exec, 0.0, HORIZON, SEED, max_nodes),
    )
    print(f"{'speedup':<28} {t_py / t_nb:10.1f} x\n")

    t_py = _bench(
        "total_progeny (python)", lambda: py.total_progeny(nu, 20000, SEED, max_nodes)
    )
    t_nb = _bench(
        "total_progeny (numba)", lambda: nb.total_progeny(nu, 20000, SEED, max_nodes)
    )
    print(f"{'speedup':<28} {t_py / t_nb:10.1f} x")


if __name__ == "__main__":
    main()
