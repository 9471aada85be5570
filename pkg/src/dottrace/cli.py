"""Command-line interface.

Subcommands: simulate (synthetic cohort), analyze (metrics + statistics
reports), design (counterbalancing plan), power (sample-size analysis),
metrics (single-session record), serve (WebSocket session service).
"""

import argparse
import json
import sys
from dataclasses import asdict

from . import cohort, design, metrics, sensor, session
from .errors import DotTraceError


def _scale_pairs(values):
    out = {}
    for item in values or []:
        label, _, factor = item.partition("=")
        if not _:
            raise argparse.ArgumentTypeError(
                f"expected LABEL=FACTOR, got {item!r}")
        out[label] = float(factor)
    return out


def _cmd_simulate(args) -> int:
    policy = cohort.SimPolicy(
        speed=args.speed, dwell=args.dwell, jitter_sd=args.jitter,
        out_of_order_prob=args.ooo_prob, sample_rate=args.sample_rate,
        speed_rel_sd=args.speed_rel_sd, dwell_rel_sd=args.dwell_rel_sd,
        hop_clearance=args.hop_clearance, seed=args.seed,
        condition_speed_scale=_scale_pairs(args.speed_scale),
        condition_dwell_scale=_scale_pairs(args.dwell_scale))
    manifest = cohort.simulate_cohort(
        args.participants, policy, args.out, noise_sd=args.noise_sd)
    n_sessions = sum(len(p["sessions"]) for p in manifest["participants"])
    print(f"simulated {len(manifest['participants'])} participants, "
          f"{n_sessions} sessions -> {args.out}")
    return 0


def _cmd_analyze(args) -> int:
    result = cohort.analyze_cohort(args.manifest, args.out)
    print(f"analyzed {len(result.records)} sessions")
    for var, effects in result.anova.items():
        if isinstance(effects, str):
            print(f"  {var}: {effects}")
            continue
        for eff in effects:
            star = " *" if eff.p < 0.05 else ""
            print(f"  {var} {eff.name}: F(1,{eff.df2}) = {eff.f:.3f}, "
                  f"p = {eff.p:.4f}, ges = {eff.eta2:.4f}{star}")
    for name, path in result.paths.items():
        print(f"  {name}: {path}")
    return 0


def _cmd_design(args) -> int:
    square = design.balanced_latin_square(args.conditions)
    if args.labels:
        labels = [s.strip() for s in args.labels.split(",")]
    elif args.conditions == len(cohort.CONDITION_LABELS):
        labels = list(cohort.CONDITION_LABELS)
    else:
        labels = [f"C{i}" for i in range(1, args.conditions + 1)]
    ids = [f"P{i + 1:02d}" for i in range(args.participants)]
    assignment = design.assign_conditions(ids, square, labels)
    print(f"balanced latin square, order {square.order}:")
    for row in square.rows:
        print("  " + " ".join(str(x) for x in row))
    print("assignment:")
    for pid, order in assignment.items():
        print(f"  {pid}: " + ", ".join(order))
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write("participant," + ",".join(
                f"position{i + 1}" for i in range(square.order)) + "\n")
            for pid, order in assignment.items():
                fh.write(pid + "," + ",".join(order) + "\n")
        print(f"wrote {args.out}")
    return 0


def _cmd_power(args) -> int:
    if args.eta2 is not None:
        f = design.eta2_to_f(args.eta2)
        print(f"effect size f = {f:.6f} (from partial eta squared {args.eta2})")
    else:
        f = args.effect_size_f
        print(f"effect size f = {f:.6f}")
    spec = design.PowerSpec(
        effect_size_f=f, alpha=args.alpha, target_power=args.power,
        measurements=args.measurements, corr=args.corr, epsilon=args.epsilon)
    if args.n is not None:
        print(f"power at n = {args.n}: {design.rm_anova_power(spec, args.n):.6f}")
        return 0
    n, achieved = design.required_sample_size(spec)
    print(f"required sample size: n = {n} (achieved power {achieved:.6f}, "
          f"target {spec.target_power})")
    if args.table:
        rows = design.power_table(spec, range(2, n + 4))
        with open(args.table, "w", encoding="utf-8", newline="\n") as fh:
            fh.write("n,power\n")
            for size, value in rows:
                fh.write(f"{size},{value:.6f}\n")
        print(f"wrote {args.table}")
    return 0


def _cmd_metrics(args) -> int:
    log = session.read_session_log(args.log)
    trace = sensor.read_trace_csv(args.trace)
    record = metrics.build_record(log, trace)
    print(json.dumps(asdict(record), indent=2))
    return 0


def _cmd_serve(args) -> int:
    from .service import ServiceConfig, serve

    host, _, port = args.listen.rpartition(":")
    if not host or not port.isdigit():
        raise DotTraceError(f"--listen expects HOST:PORT, got {args.listen!r}")
    config = ServiceConfig(data_dir=args.data_dir, seed=args.seed)
    serve(config, host=host, port=int(port), frontend_dir=args.frontend)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dottrace",
        description="dot-tracing exergame: simulation, metrics, statistics, service")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="simulate a counterbalanced cohort")
    p.add_argument("--participants", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.add_argument("--speed", type=float, default=0.6, help="brush speed m/s")
    p.add_argument("--dwell", type=float, default=0.30, help="per-dot pause s")
    p.add_argument("--jitter", type=float, default=0.001, help="tremor sd m")
    p.add_argument("--ooo-prob", type=float, default=0.05,
                   help="adjacent-swap probability")
    p.add_argument("--sample-rate", type=float, default=50.0)
    p.add_argument("--speed-rel-sd", type=float, default=0.10)
    p.add_argument("--dwell-rel-sd", type=float, default=0.10)
    p.add_argument("--hop-clearance", type=float, default=0.05)
    p.add_argument("--noise-sd", type=float, default=0.1,
                   help="sensor noise sd, ohms")
    p.add_argument("--speed-scale", action="append", metavar="LABEL=FACTOR",
                   help="per-condition speed multiplier (repeatable)")
    p.add_argument("--dwell-scale", action="append", metavar="LABEL=FACTOR",
                   help="per-condition dwell multiplier (repeatable)")
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("analyze", help="compute metrics and statistics reports")
    p.add_argument("--manifest", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_analyze)

    p = sub.add_parser("design", help="print a counterbalanced condition plan")
    p.add_argument("--conditions", type=int, default=4)
    p.add_argument("--participants", type=int, default=12)
    p.add_argument("--labels", help="comma-separated condition labels")
    p.add_argument("--out", help="write assignment CSV here")
    p.set_defaults(func=_cmd_design)

    p = sub.add_parser("power", help="repeated-measures ANOVA power analysis")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--eta2", type=float, help="partial eta squared")
    group.add_argument("--effect-size-f", type=float, help="Cohen's f")
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument("--power", type=float, default=0.80, help="target power")
    p.add_argument("--measurements", type=int, default=4)
    p.add_argument("--corr", type=float, default=0.5,
                   help="correlation among repeated measures")
    p.add_argument("--epsilon", type=float, default=1.0,
                   help="nonsphericity correction")
    p.add_argument("--n", type=int, help="report power at this sample size")
    p.add_argument("--table", help="write an n,power CSV here")
    p.set_defaults(func=_cmd_power)

    p = sub.add_parser("metrics", help="metrics record for one session")
    p.add_argument("--log", required=True, help="session log (JSON lines)")
    p.add_argument("--trace", required=True, help="sensor trace CSV")
    p.set_defaults(func=_cmd_metrics)

    p = sub.add_parser("serve", help="run the WebSocket session service")
    p.add_argument("--listen", default="127.0.0.1:8765", metavar="HOST:PORT")
    p.add_argument("--data-dir", help="persist completed sessions here")
    p.add_argument("--frontend", help="serve this static directory at /")
    p.add_argument("--seed", type=int, default=0,
                   help="sensor-synthesis seed")
    p.set_defaults(func=_cmd_serve)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except DotTraceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
