"""Command-line front end.

    mixmarket solve     --config FILE
    mixmarket sweep     --config FILE [--out CSV]
    mixmarket condition --config FILE
    mixmarket simulate  --config FILE [--out CSV] [--seeds N] [--price P]
    mixmarket verify    --config FILE
    mixmarket figures   --config FILE --which {1a,1b,2a,2b} [--out CSV]

Exit codes: 0 success, 1 a verification check failed, 2 invalid
configuration or arguments, 3 distribution not regular, 4 solver failure.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import sys
from pathlib import Path

import numpy as np

from .config import EXIT_CONFIG, ConfigError, MarketConfig, parse_config
from .distributions import standard_monopoly_price
from .errors import ConvergenceError, MixMarketError, NotRegularError, ParameterError
from .general import complement_outcome, solve_general
from .oracle import (
    grid_argmax_revenue,
    posted_price_best_response,
    simulate_market,
    two_step_dominance_check,
    verify_ic_ir,
)
from .solver import MechanismSolution, solve_mechanism
from .welfare import (
    SWEEP_COLUMNS,
    SweepError,
    check_condition,
    consumer_surplus,
    cutoff_sensitivity,
    price_sensitivity,
    producer_surplus_sensitivity,
    rationing_sensitivity,
    sweep,
    welfare_report,
)

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_IRREGULAR = 3
EXIT_SOLVER = 4

SIMULATION_COLUMNS = ("seed", "n_buyers", "realized_demand_share", "realized_rationing_prob",
                      "realized_revenue", "mean_cs", "stderr_cs")
SURPLUS_COLUMNS = ("v", "surplus_mixed", "surplus_monopoly_only", "surplus_public_only")


def _fmt(x) -> str:
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return format(float(x), ".17g")


def write_csv(path: Path, header, rows) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="", encoding="ascii") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([_fmt(x) for x in row])


def _say(name: str, value) -> None:
    if isinstance(value, (float, np.floating)):
        value = format(float(value), ".6g")
    print(f"{name}={value}")


def _out_path(args, cfg: MarketConfig, default: str) -> Path:
    return Path(args.out) if args.out else Path(cfg.out_dir) / default


def _k_grid(cfg: MarketConfig) -> np.ndarray:
    return np.linspace(cfg.k_min, cfg.k_max, cfg.k_steps)


def _require_baseline(cfg: MarketConfig, command: str) -> None:
    if cfg.timing != "substitute" or cfg.quality_ratio != 1.0 or cfg.public_price != 0.0:
        raise ConfigError(f"'{command}' supports only the baseline model "
                          "(timing = substitute, quality_ratio = 1, public_price = 0)")


def _solve_baseline(cfg, dist) -> MechanismSolution:
    xtol = cfg.xtol * dist.width
    return solve_mechanism(dist, cfg.capacity, xtol=xtol)


def cmd_solve(args, cfg, dist) -> int:
    params = cfg.market_params()
    if cfg.timing == "complement":
        out = complement_outcome(dist, cfg.capacity)
        _say("price", out.price)
        _say("pi", cfg.capacity)
        _say("producer_surplus", out.producer_surplus)
        _say("consumer_surplus", out.aggregate_cs)
        return EXIT_OK
    if not params.is_baseline:
        sol = solve_general(dist, params, grid_size=cfg.grid_size)
        _say("cutoff", sol.cutoff)
        _say("price", sol.price)
        _say("pi", sol.rationing_prob)
        _say("regime", sol.regime)
        _say("producer_surplus", sol.objective_value)
        _say("near_tie", str(sol.near_tie).lower())
        return EXIT_OK
    mech = _solve_baseline(cfg, dist)
    rep = welfare_report(dist, cfg.capacity, type_grid=cfg.type_grid, mech=mech)
    _say("cutoff", mech.cutoff)
    _say("price", mech.price)
    _say("pi", mech.rationing_prob)
    _say("producer_surplus", mech.producer_surplus)
    _say("consumer_surplus", rep.aggregate_consumer_surplus)
    _say("total_surplus", rep.total_surplus)
    _say("theta_prime", cutoff_sensitivity(dist, cfg.capacity, mech=mech))
    _say("pi_prime", rationing_sensitivity(dist, cfg.capacity, mech=mech))
    _say("p_prime", price_sensitivity(dist, cfg.capacity, mech=mech))
    _say("P_prime", producer_surplus_sensitivity(dist, cfg.capacity, mech=mech))
    return EXIT_OK


def _write_sweep(path, dist, cfg) -> int:
    res = sweep(dist, _k_grid(cfg))
    write_csv(path, SWEEP_COLUMNS, res.rows())
    cs = res.consumer_surplus
    _say("rows", len(res.k))
    _say("consumer_surplus_first", cs[0])
    _say("consumer_surplus_min", cs.min())
    _say("consumer_surplus_last", cs[-1])
    _say("output", str(path))
    return EXIT_OK


def cmd_sweep(args, cfg, dist) -> int:
    _require_baseline(cfg, "sweep")
    return _write_sweep(_out_path(args, cfg, "sweep.csv"), dist, cfg)


def cmd_condition(args, cfg, dist) -> int:
    rep = check_condition(dist, grid_size=args.grid or cfg.grid_size)
    _say("monopoly_price", standard_monopoly_price(dist))
    _say("holds_everywhere", str(rep.holds_everywhere).lower())
    for lo, hi in rep.failing_intervals:
        print(f"failing_interval={lo:.10g},{hi:.10g}")
    if rep.threshold_root is not None:
        _say("threshold", rep.threshold_root)
    return EXIT_OK


def cmd_simulate(args, cfg, dist) -> int:
    _require_baseline(cfg, "simulate")
    if args.seeds < 1:
        raise ConfigError("--seeds must be at least 1")
    price = args.price if args.price is not None else _solve_baseline(cfg, dist).price
    rows = []
    for s in range(cfg.seed, cfg.seed + args.seeds):
        r = simulate_market(dist, cfg.capacity, price, n_buyers=cfg.buyers, seed=s)
        rows.append((r.seed, r.n_buyers, r.realized_demand_share, r.realized_rationing_prob,
                     r.realized_revenue, r.mean_consumer_surplus, r.std_error_cs))
        print(f"seed={s} revenue={r.realized_revenue:.6g}+-{r.std_error_revenue:.2g} "
              f"pi={r.realized_rationing_prob:.6g}+-{r.std_error_rationing:.2g} "
              f"mean_cs={r.mean_consumer_surplus:.6g}+-{r.std_error_cs:.2g}")
    path = _out_path(args, cfg, "simulation.csv")
    write_csv(path, SIMULATION_COLUMNS, rows)
    _say("price", price)
    _say("output", str(path))
    return EXIT_OK


def _relative_gap(a: float, b: float) -> float:
    return abs(a - b) / max(abs(b), 1e-12)


def cmd_verify(args, cfg, dist) -> int:
    _require_baseline(cfg, "verify")
    k = cfg.capacity
    mech = _solve_baseline(cfg, dist)
    step = (dist.v_hi - float(dist.quantile(k))) / (cfg.grid_size - 1)
    checks = []

    grid_best = grid_argmax_revenue(dist, k, n_points=cfg.grid_size)
    checks.append(("grid_argmax", abs(grid_best - mech.cutoff) <= step,
                   f"|{grid_best:.10g} - {mech.cutoff:.10g}| <= {step:.3g}"))

    ic = verify_ic_ir(dist, k, mech)
    checks.append(("ic_ir", ic.clean(), f"ic={ic.max_ic_violation:.3g} ir={ic.max_ir_violation:.3g}"))

    shifted = MechanismSolution(mech.cutoff, mech.price + 0.05, mech.rationing_prob,
                                mech.induced_demand, mech.producer_surplus, mech.foc_residual, k)
    control = verify_ic_ir(dist, k, shifted)
    checks.append(("ic_negative_control", control.max_ic_violation > 0.0,
                   f"ic={control.max_ic_violation:.3g}"))

    curve = posted_price_best_response(dist, k, n_prices=cfg.grid_size)
    price_step = dist.v_hi / (cfg.grid_size - 1)
    checks.append(("posted_price", abs(curve.best_price - mech.price) <= price_step,
                   f"|{curve.best_price:.10g} - {mech.price:.10g}| <= {price_step:.3g}"))

    excess = two_step_dominance_check(dist, k, mech.cutoff, seed=cfg.seed)
    checks.append(("two_step_dominance", excess <= 1e-12, f"max_excess={excess:.3g}"))

    h = 1e-5 * min(k, 1.0 - k)
    lo = _solve_baseline(dataclasses.replace(cfg, capacity=k - h), dist)
    hi = _solve_baseline(dataclasses.replace(cfg, capacity=k + h), dist)
    fd_theta = (hi.cutoff - lo.cutoff) / (2 * h)
    fd_P = (hi.producer_surplus - lo.producer_surplus) / (2 * h)
    an_theta = cutoff_sensitivity(dist, k, mech=mech)
    an_P = producer_surplus_sensitivity(dist, k, mech=mech)
    checks.append(("theta_prime_fd", _relative_gap(an_theta, fd_theta) <= 1e-4,
                   f"{an_theta:.8g} vs {fd_theta:.8g}"))
    checks.append(("P_prime_fd", _relative_gap(an_P, fd_P) <= 1e-4, f"{an_P:.8g} vs {fd_P:.8g}"))

    for name, ok, detail in checks:
        print(f"{'PASS' if ok else 'FAIL'} {name}: {detail}")
    return EXIT_OK if all(ok for _, ok, _ in checks) else EXIT_CHECK_FAILED


def cmd_figures(args, cfg, dist) -> int:
    _require_baseline(cfg, "figures")
    if args.which.endswith("b"):
        return _write_sweep(_out_path(args, cfg, f"fig{args.which}.csv"), dist, cfg)
    k = cfg.capacity
    mech = _solve_baseline(cfg, dist)
    vm = standard_monopoly_price(dist)
    v = np.linspace(dist.v_lo, dist.v_hi, cfg.type_grid)
    mixed = consumer_surplus(dist, k, v, mech=mech)
    monopoly = np.maximum(v - vm, 0.0)
    public = k * v
    path = _out_path(args, cfg, f"fig{args.which}.csv")
    write_csv(path, SURPLUS_COLUMNS, zip(v, mixed, monopoly, public))
    _say("cutoff", mech.cutoff)
    _say("price", mech.price)
    _say("rows", len(v))
    _say("output", str(path))
    return EXIT_OK


COMMANDS = {
    "solve": cmd_solve,
    "sweep": cmd_sweep,
    "condition": cmd_condition,
    "simulate": cmd_simulate,
    "verify": cmd_verify,
    "figures": cmd_figures,
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise ConfigError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="mixmarket", description="Monopoly pricing against a rationed public option.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", required=True, help="market configuration file")
        if name in ("sweep", "simulate", "figures"):
            p.add_argument("--out", help="CSV output path (default: out_dir from the config)")
        if name == "simulate":
            p.add_argument("--seeds", type=int, default=1, help="number of consecutive seeds")
            p.add_argument("--price", type=float, help="posted price (default: optimal price)")
        if name == "condition":
            p.add_argument("--grid", type=int, help="scan grid size")
        if name == "figures":
            p.add_argument("--which", required=True, choices=("1a", "1b", "2a", "2b"),
                           help="a: surplus by type at the configured capacity; b: capacity sweep")
    return parser


def run_command(argv) -> int:
    try:
        args = build_parser().parse_args(argv)
        text = Path(args.config).read_text(encoding="utf-8")
        cfg = parse_config(text)
        dist = cfg.build_distribution()
        return COMMANDS[args.command](args, cfg, dist)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NotRegularError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IRREGULAR
    except (ConvergenceError, SweepError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except ParameterError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except MixMarketError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SOLVER


def main() -> None:
    sys.exit(run_command(sys.argv[1:]))


if __name__ == "__main__":
    main()
