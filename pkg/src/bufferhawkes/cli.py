"""Command-line interface.

Subcommands: simulate, cluster, moments, scaling, price, estimate, verify.
Parameters come from (lowest to highest precedence) defaults, --preset, a
JSON config file, and explicit flags. Exit codes: 0 success, 1 validation
error, 2 runtime error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import __version__
from .cluster import simulate_market_orders, simulate_z, write_order_times_csv, write_z_path_csv
from .exact import simulate_path, simulate_stationary_path, write_events_csv
from .moments import second_moments, write_curves_csv
from .params import derived_constants, validate_params
from .price import simulate_price
from .scaling import estimate_from_events, estimate_params, run_scaling
from .verify import format_results, run_verification

PRESETS = {
    "paper-example": {"lambda0": 2.0, "a": 1.0, "b": 2.0, "c": 1.0, "d": 1.0},
}

PARAM_FIELDS = ("lambda0", "a", "b", "c", "d")


@dataclass
class ExperimentConfig:
    """Resolved run configuration: parameters, master seed, output directory."""

    params: ModelParams
    seed: int
    outdir: str

    def to_dict(self) -> dict:
        return {
            "params": {f: getattr(self.params, f) for f in PARAM_FIELDS},
            "seed": self.seed,
            "outdir": self.outdir,
        }

    def save(self, path) -> None:
        with open(path, "w") as f:
            json.dump(self.to_dict(), f, indent=2, sort_keys=True)
            f.write("\n")

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentConfig":
        p = d.get("params", {})
        missing = [f for f in PARAM_FIELDS if f not in p]
        if missing:
            raise ValueError(f"config missing params fields: {', '.join(missing)}")
        return cls(
            params=validate_params(*(p[f] for f in PARAM_FIELDS)),
            seed=int(d.get("seed", 12345)),
            outdir=str(d.get("outdir", ".")),
        )

    @classmethod
    def load(cls, path) -> "ExperimentConfig":
        with open(path) as f:
            return cls.from_dict(json.load(f))


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="JSON config file; flags override it")
    p.add_argument("--preset", choices=sorted(PRESETS), help="named parameter preset")
    for f in PARAM_FIELDS:
        p.add_argument(f"--{f}", type=float, default=None)
    p.add_argument("--seed", type=int, default=None, help="master seed (default 12345)")
    p.add_argument(
        "--outdir",
        default=None,
        help="output directory (default: $BUFFERHAWKES_OUTDIR or cwd)",
    )


def resolve_config(args) -> ExperimentConfig:
    raw: dict = {}
    if args.preset:
        raw["params"] = dict(PRESETS[args.preset])
    if args.config:
        with open(args.config) as f:
            file_cfg = json.load(f)
        raw.setdefault("params", {}).update(file_cfg.get("params", {}))
        for k in ("seed", "outdir"):
            if k in file_cfg:
                raw[k] = file_cfg[k]
    params = raw.get("params", {})
    for f in PARAM_FIELDS:
        v = getattr(args, f)
        if v is not None:
            params[f] = v
    raw["params"] = params
    if args.seed is not None:
        raw["seed"] = args.seed
    if args.outdir is not None:
        raw["outdir"] = args.outdir
    elif "outdir" not in raw:
        raw["outdir"] = os.environ.get("BUFFERHAWKES_OUTDIR", ".")
    missing = [f for f in PARAM_FIELDS if f not in params]
    if missing:
        raise ValueError(
            "model parameters unspecified (use --preset, --config, or flags); "
            f"missing: {', '.join(missing)}"
        )
    return ExperimentConfig.from_dict(raw)


def _out(cfg: ExperimentConfig, name: str) -> Path:
    outdir = Path(cfg.outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    return outdir / name


def _cmd_simulate(args) -> int:
    cfg = resolve_config(args)
    if args.burn_in > 0:
        log = simulate_stationary_path(cfg.params, args.horizon, args.burn_in, cfg.seed)
    else:
        log = simulate_path(cfg.params, args.horizon, cfg.seed)
    path = _out(cfg, args.out)
    write_events_csv(log, path)
    print(f"wrote {len(log)} events to {path}")
    return 0


def _cmd_cluster(args) -> int:
    cfg = resolve_config(args)
    if args.mode == "orders":
        sample = simulate_market_orders(cfg.params, args.horizon, cfg.seed, args.lookback)
        path = _out(cfg, args.out or "orders.csv")
        write_order_times_csv(sample, path)
        print(f"wrote {sample.order_times.size} order times to {path}")
    else:
        zpath = simulate_z(cfg.params, args.horizon, cfg.seed)
        path = _out(cfg, args.out or "zpath.csv")
        write_z_path_csv(zpath, path)
        print(f"wrote Z path with {zpath.birth_times.size} births to {path}")
    return 0


def _cmd_moments(args) -> int:
    cfg = resolve_config(args)
    grid = np.linspace(0.0, args.t_max, args.points)
    curves = second_moments(cfg.params, grid)
    path = _out(cfg, args.out)
    write_curves_csv(curves, cfg.params, path)
    print(f"wrote moment curves ({args.points} points) to {path}")
    return 0


def _cmd_scaling(args) -> int:
    cfg = resolve_config(args)
    scales = [int(s) for s in args.scales.split(",")]
    t_grid = [float(t) for t in args.t_grid.split(",")]
    report = run_scaling(
        cfg.params, scales, args.n_paths, t_grid, cfg.seed, stationary=args.stationary
    )
    json_path = _out(cfg, args.out_json)
    json_path.write_text(report.to_json() + "\n")
    csv_path = _out(cfg, args.out_csv)
    report.write_csv(csv_path)
    print(f"wrote scaling report to {json_path} and {csv_path}")
    return 0


def _cmd_price(args) -> int:
    cfg = resolve_config(args)
    grid = np.arange(args.grid_step, args.horizon + 1e-12, args.grid_step)
    path_obj = simulate_price(
        cfg.params,
        None,
        args.kind,
        args.alpha,
        args.horizon,
        grid,
        cfg.seed,
        s0=args.s0,
        jump_sigma=args.jump_sigma,
    )
    path = _out(cfg, args.out)
    path_obj.write_csv(path)
    print(f"wrote {args.kind} price path to {path}")
    return 0


def _read_events_csv(path):
    kinds_map = {"LIMIT_ARRIVAL": 0, "CANCELLATION": 1, "EXECUTION": 2}
    times, kinds, gammas = [], [], []
    horizon = None
    with open(path) as f:
        for line in f:
            line = line.strip()
            if line.startswith("#"):
                for tok in line.split():
                    if tok.startswith("horizon="):
                        horizon = float(tok.split("=", 1)[1])
                continue
            if not line or line.startswith("time,"):
                continue
            t, kind, _, gamma, _ = line.split(",")
            times.append(float(t))
            kinds.append(kinds_map[kind])
            gammas.append(int(gamma))
    if horizon is None:
        horizon = times[-1] if times else 0.0
    return np.array(times), np.array(kinds), np.array(gammas), horizon


def _cmd_estimate(args) -> int:
    cfg = resolve_config(args)
    bin_width = args.bin_width
    if args.events:
        times, kinds, gammas, horizon = _read_events_csv(args.events)
        if bin_width is None:
            bin_width = 50.0 / derived_constants(cfg.params).q_minus
        rec = estimate_from_events(times, kinds, gammas, horizon, bin_width)
    else:
        if args.horizon is None:
            raise ValueError("estimate needs --events or --horizon")
        log = simulate_path(cfg.params, args.horizon, cfg.seed)
        rec = estimate_params(log, bin_width)
    print(json.dumps(rec.to_dict(), indent=2, sort_keys=True))
    return 0


def _cmd_verify(args) -> int:
    cfg = resolve_config(args)
    n_paths = 2000 if args.fast else 10000
    results = run_verification(cfg.params, seed=cfg.seed, n_paths=n_paths)
    print(format_results(results))
    return 0 if all(r.passed for r in results) else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bufferhawkes",
        description="Simulation and analytics for the buffer-Hawkes order book model",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="exact event-driven simulation")
    _add_common(p)
    p.add_argument("--horizon", type=float, required=True)
    p.add_argument("--burn-in", type=float, default=0.0, dest="burn_in")
    p.add_argument("--out", default="events.csv")
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("cluster", help="branching-representation simulation")
    _add_common(p)
    p.add_argument("--horizon", type=float, required=True)
    p.add_argument("--lookback", type=float, default=0.0)
    p.add_argument("--mode", choices=("orders", "z"), default="orders")
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_cluster)

    p = sub.add_parser("moments", help="moment curves on a time grid")
    _add_common(p)
    p.add_argument("--t-max", type=float, required=True, dest="t_max")
    p.add_argument("--points", type=int, default=501)
    p.add_argument("--out", default="moments.csv")
    p.set_defaults(func=_cmd_moments)

    p = sub.add_parser("scaling", help="diffusion-limit Monte Carlo report")
    _add_common(p)
    p.add_argument("--scales", default="10,50,200")
    p.add_argument("--n-paths", type=int, default=1000, dest="n_paths")
    p.add_argument("--t-grid", default="0.5,1.0", dest="t_grid")
    p.add_argument("--stationary", action="store_true")
    p.add_argument("--out-json", default="scaling.json", dest="out_json")
    p.add_argument("--out-csv", default="scaling.csv", dest="out_csv")
    p.set_defaults(func=_cmd_scaling)

    p = sub.add_parser("price", help="price path simulation")
    _add_common(p)
    p.add_argument("--kind", choices=("MIDPRICE", "INVERSE_DEPTH", "GEOMETRIC"), default="MIDPRICE")
    p.add_argument("--alpha", type=float, default=1.0)
    p.add_argument("--horizon", type=float, required=True)
    p.add_argument("--grid-step", type=float, default=1.0, dest="grid_step")
    p.add_argument("--s0", type=float, default=1.0)
    p.add_argument("--jump-sigma", type=float, default=0.05, dest="jump_sigma")
    p.add_argument("--out", default="price.csv")
    p.set_defaults(func=_cmd_price)

    p = sub.add_parser("estimate", help="moment-based parameter estimates")
    _add_common(p)
    p.add_argument("--events", help="event-log CSV produced by `simulate`")
    p.add_argument("--horizon", type=float, default=None, help="simulate a path of this length")
    p.add_argument("--bin-width", type=float, default=None, dest="bin_width")
    p.set_defaults(func=_cmd_estimate)

    p = sub.add_parser("verify", help="cross-oracle verification suite")
    _add_common(p)
    p.add_argument("--fast", action="store_true", help="smaller Monte Carlo sizes")
    p.set_defaults(func=_cmd_verify)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # noqa: BLE001
        print(f"runtime error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
