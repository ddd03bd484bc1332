"""Command-line front end: ``rrdps {bounds,keyrate,simulate,verify}``.

Every run is a deterministic function of its arguments.  CSV outputs are
accompanied by ``<out>.manifest.json``; JSON outputs embed the manifest.
Options may also come from a ``key = value`` file given with ``--config``;
command-line flags win.

Exit codes: 0 success, 1 verification failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import configparser
import csv
import io
import json
import sys
from pathlib import Path

import numpy as np

from rrdps import __version__
from rrdps.optimizer import SweepConfig, sweep_detailed
from rrdps.protocol_sim import ChannelModel, SimConfig, estimate_rate_from_sim, run_rounds, strict_detection_rate
from rrdps.rate_model import ProtocolParams, detection_rate
from rrdps.security_bounds import BoundQuery, phase_error_bound, segment_approx
from rrdps.verify import run_verification

EXIT_OK, EXIT_VERIFY_FAILED, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def fmt(x) -> str:
    """12 significant digits, locale independent."""
    if isinstance(x, (bool, np.bool_)):
        return "1" if x else "0"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, str):
        return x
    return format(float(x), ".12g")


def _manifest(cmd: str, params: dict, seed, outputs: list[str]) -> dict:
    return {
        "subcommand": cmd,
        "parameters": params,
        "seed": seed,
        "tool_version": __version__,
        "outputs": outputs,
    }


def _dump_json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, allow_nan=True) + "\n"


def _write_csv(header: list[str], rows: list[list], out: str | None, manifest: dict) -> None:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([fmt(v) for v in row])
    if out is None:
        sys.stdout.write(buf.getvalue())
        return
    Path(out).write_text(buf.getvalue())
    Path(out + ".manifest.json").write_text(_dump_json(manifest))


def _emit_json(payload: dict, out: str | None) -> None:
    text = _dump_json(payload)
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


# ---------------------------------------------------------------------------


def cmd_bounds(args) -> int:
    L = args.L
    nus = args.nu if args.nu else list(range(1, min(args.nu_max, L - 2) + 1))
    if L < 3 or any(not 1 <= nu <= L - 2 for nu in nus):
        raise UsageError(f"nu values must lie in [1, {L - 2}] for L={L}")
    if not 0 <= args.e_min <= args.e_max <= 0.5 or args.e_points < 1:
        raise UsageError("e grid must satisfy 0 <= e-min <= e-max <= 0.5 with e-points >= 1")
    e_grid = np.linspace(args.e_min, args.e_max, args.e_points)
    rows = []
    for nu in nus:
        for e in e_grid:
            res = phase_error_bound(BoundQuery(L, nu, float(e)))
            rows.append([L, nu, e, res.f_value, segment_approx(L, nu, float(e)), res.lambda_opt, res.branch])
    params = {"L": L, "nu": nus, "e_min": args.e_min, "e_max": args.e_max, "e_points": args.e_points}
    manifest = _manifest("bounds", params, None, [args.out] if args.out else [])
    _write_csv(["L", "nu", "e", "F", "F_segment", "lambda_opt", "branch"], rows, args.out, manifest)
    return EXIT_OK


def _eta_grid(args) -> list[float]:
    if args.eta is not None:
        return [args.eta]
    if not 0 < args.eta_min <= args.eta_max <= 1 or args.eta_points < 1:
        raise UsageError("eta grid must satisfy 0 < eta-min <= eta-max <= 1")
    if args.eta_points == 1:
        return [args.eta_max]
    return list(np.logspace(np.log10(args.eta_max), np.log10(args.eta_min), args.eta_points))


def cmd_keyrate(args) -> int:
    L = args.L
    if L < 3:
        raise UsageError("L must be >= 3")
    if not 0 <= args.e <= 0.5 or args.f_ec < 1:
        raise UsageError("need 0 <= e <= 0.5 and f-ec >= 1")
    etas = _eta_grid(args)
    modes = [True, False] if args.monitored is None else [args.monitored]
    rows = []
    failures = {}
    for monitored in modes:
        cfg = SweepConfig(L=L, e=args.e, f_ec=args.f_ec, eta_grid=tuple(etas), monitored=monitored)
        result = sweep_detailed(cfg)
        failures.update({f"{eta}:{monitored}": msg for eta, msg in result.failures.items()})
        for pt in result.points:
            rows.append([pt.eta, monitored, L, pt.nu_th, pt.mu, pt.q, pt.e_src, pt.delta_tag, pt.ec_cost, pt.pa_cost, pt.rate_per_pulse])
    rows.sort(key=lambda r: (-r[0], not r[1]))
    params = {"L": L, "e": args.e, "f_ec": args.f_ec, "eta": etas, "modes": modes}
    manifest = _manifest("keyrate", params, None, [args.out] if args.out else [])
    if failures:
        manifest["failed_points"] = failures
    header = ["eta", "monitored", "L", "nu_th", "mu", "Q", "e_src", "delta_tag", "EC", "PA", "rate_per_pulse"]
    _write_csv(header, rows, args.out, manifest)
    return EXIT_OK


def cmd_simulate(args) -> int:
    try:
        channel = ChannelModel(args.channel, args.channel_param)
        cfg = SimConfig(
            L=args.L,
            mu=args.mu,
            eta=args.eta_sim,
            rounds=args.rounds,
            sample_fraction=args.sample_fraction,
            channel=channel,
            seed=args.seed,
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    stats = run_rounds(cfg)
    comparison = {
        "q_model_paper": detection_rate(cfg.L, cfg.mu, cfg.eta),
        "q_model_strict": strict_detection_rate(cfg.L, cfg.mu, cfg.eta),
        "e_expected": channel.expected_error_rate(),
    }
    params = {
        "L": cfg.L, "mu": cfg.mu, "eta": cfg.eta, "rounds": cfg.rounds,
        "sample_fraction": cfg.sample_fraction, "channel": channel.kind,
        "channel_param": channel.p, "nu_th": args.nu_th, "f_ec": args.f_ec,
    }
    payload = {
        "manifest": _manifest("simulate", params, cfg.seed, [args.out] if args.out else []),
        "sim_stats": stats.as_dict(),
        "model_comparison": comparison,
    }
    if stats.sampled > 0 and cfg.mu > 0 and cfg.eta > 0 and 1 <= args.nu_th <= cfg.L - 2:
        p = ProtocolParams(cfg.L, args.nu_th, cfg.mu, cfg.eta, min(stats.e_emp, 0.5), args.f_ec)
        rp = estimate_rate_from_sim(stats, p)
        payload["rate_estimate"] = {
            "q": rp.q, "e": p.e, "e_src": rp.e_src, "delta_tag": rp.delta_tag,
            "EC": rp.ec_cost, "PA": rp.pa_cost, "rate_per_block": rp.rate_per_block,
            "rate_per_pulse": rp.rate_per_pulse, "flag": rp.flag,
        }
    _emit_json(payload, args.out)
    return EXIT_OK


def cmd_verify(args) -> int:
    checks = run_verification(args.level, seed=args.seed)
    passed = all(c.passed for c in checks)
    payload = {
        "manifest": _manifest("verify", {"level": args.level}, args.seed, [args.out] if args.out else []),
        "checks": [c.as_dict() for c in checks],
        "pass": passed,
    }
    _emit_json(payload, args.out)
    for c in checks:
        if not c.passed:
            print(f"FAILED {c.check_name}: max deviation {c.max_deviation:.3e} > {c.tolerance:.1e}", file=sys.stderr)
    return EXIT_OK if passed else EXIT_VERIFY_FAILED


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="key = value file; flags override it")
    common.add_argument("--out", help="output path (default: stdout)")
    common.add_argument("--seed", type=int, default=0)

    parser = argparse.ArgumentParser(prog="rrdps", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    b = sub.add_parser("bounds", parents=[common], help="tabulate F(nu, e)")
    b.add_argument("--L", type=int, default=6)
    b.add_argument("--nu", type=int, nargs="+", help="photon numbers (default 1..nu-max)")
    b.add_argument("--nu-max", type=int, default=3)
    b.add_argument("--e-min", type=float, default=0.0)
    b.add_argument("--e-max", type=float, default=0.5)
    b.add_argument("--e-points", type=int, default=101)
    b.set_defaults(func=cmd_bounds)

    k = sub.add_parser("keyrate", parents=[common], help="optimized key rate versus transmission")
    k.add_argument("--L", type=int, default=6)
    k.add_argument("--e", type=float, default=0.03)
    k.add_argument("--f-ec", type=float, default=1.1)
    k.add_argument("--eta", type=float, help="single transmission value")
    k.add_argument("--eta-min", type=float, default=1e-3)
    k.add_argument("--eta-max", type=float, default=1.0)
    k.add_argument("--eta-points", type=int, default=13)
    mode = k.add_mutually_exclusive_group()
    mode.add_argument("--monitored", dest="monitored", action="store_const", const=True)
    mode.add_argument("--unmonitored", dest="monitored", action="store_const", const=False)
    k.set_defaults(func=cmd_keyrate, monitored=None)

    s = sub.add_parser("simulate", parents=[common], help="Monte Carlo protocol run")
    s.add_argument("--L", type=int, default=6)
    s.add_argument("--mu", type=float, default=0.1)
    s.add_argument("--eta", dest="eta_sim", type=float, default=0.5)
    s.add_argument("--rounds", type=int, default=10**6)
    s.add_argument("--sample-fraction", type=float, default=0.5)
    s.add_argument("--channel", choices=["ideal", "phase_flip", "position_dephase"], default="ideal")
    s.add_argument("--channel-param", type=float, default=0.0)
    s.add_argument("--nu-th", type=int, default=1, help="threshold used for the rate estimate")
    s.add_argument("--f-ec", type=float, default=1.1)
    s.set_defaults(func=cmd_simulate)

    v = sub.add_parser("verify", parents=[common], help="run the self-verification suite")
    v.add_argument("--level", choices=["fast", "full"], default="fast")
    v.set_defaults(func=cmd_verify)
    return parser


def _read_config(path: str) -> dict[str, str]:
    cp = configparser.ConfigParser()
    cp.optionxform = str
    cp.read_string("[rrdps]\n" + Path(path).read_text())
    return {key.replace("-", "_"): value for key, value in cp["rrdps"].items()}


def _apply_config(parser: argparse.ArgumentParser, argv: list[str]) -> argparse.Namespace:
    args = parser.parse_args(argv)
    if not args.config:
        return args
    sub = parser._subparsers._group_actions[0].choices[args.command]
    values = _read_config(args.config)
    known = {a.dest: a for a in sub._actions}
    defaults = {}
    for key, raw in values.items():
        if key == "eta" and args.command == "simulate":
            key = "eta_sim"
        if key not in known:
            parser.error(f"unknown config key {key!r} for {args.command}")
        action = known[key]
        if key == "monitored":
            defaults[key] = raw.strip().lower() in ("1", "true", "yes", "on")
        elif action.nargs in ("+", "*"):
            defaults[key] = [action.type(x) for x in raw.split()]
        else:
            defaults[key] = action.type(raw) if action.type else raw
    sub.set_defaults(**defaults)
    return parser.parse_args(argv)


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        args = _apply_config(parser, argv)
    except (OSError, configparser.Error, ValueError) as exc:
        print(f"rrdps: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"rrdps {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
