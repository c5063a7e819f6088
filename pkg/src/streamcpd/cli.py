"""Command-line front end: detect / calibrate / simulate / bench.

``detect`` reads one numeric value per line (blank lines skipped, ``#`` lines
are comments) and emits one NDJSON event per step.  Exit codes: 0 clean end
of stream, 1 I/O error, 2 malformed input or bad value (line reported),
3 detection with stop-on-detect enabled, 4 calibration non-convergence.
"""

from __future__ import annotations

import argparse
import sys

from .bench import (
    CalibrationResult,
    DelayRun,
    calibrate_threshold,
    counter_profile,
    delay_experiment,
    write_counter_csv,
    write_delay_csv,
)
from .detector import Detector, DetectorConfig
from .errors import CalibrationError, StreamCpdError, SupportError
from .families import FamilyKind, FamilySpec
from .simulate import Scenario, generate

_FAMILY_CHOICES = [k.value for k in FamilyKind]


def _fmt17(v: float) -> str:
    return format(float(v), ".17g")


def _add_family_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--family", required=True, choices=_FAMILY_CHOICES)
    p.add_argument("--trials", type=int, help="trials per observation (binomial only)")
    p.add_argument("--shape", type=float, help="fixed shape parameter (gamma only)")


def _add_detector_flags(p: argparse.ArgumentParser) -> None:
    _add_family_flags(p)
    p.add_argument("--theta0", required=True, help='pre-change parameter, or "unknown"')
    p.add_argument("--direction", choices=["up", "down", "both"], default="both")
    p.add_argument("--threshold", type=float, required=True, help="detection threshold (doubled-LR scale)")


def _build_spec(args, parser: argparse.ArgumentParser) -> FamilySpec:
    fam = args.family
    if fam == FamilyKind.BINOMIAL.value:
        if args.trials is None:
            parser.error("--trials is required with --family binomial")
        if args.shape is not None:
            parser.error("--shape is only valid with --family gamma")
        return FamilySpec.binomial(args.trials)
    if fam == FamilyKind.GAMMA.value:
        if args.shape is None:
            parser.error("--shape is required with --family gamma")
        if args.trials is not None:
            parser.error("--trials is only valid with --family binomial")
        return FamilySpec.gamma(args.shape)
    if args.trials is not None:
        parser.error("--trials is only valid with --family binomial")
    if args.shape is not None:
        parser.error("--shape is only valid with --family gamma")
    return FamilySpec(FamilyKind(fam))


def _parse_theta0(raw: str, parser: argparse.ArgumentParser) -> float | None:
    if raw.lower() == "unknown":
        return None
    try:
        return float(raw)
    except ValueError:
        parser.error(f'--theta0 must be a number or "unknown", got {raw!r}')


def _build_config(args, parser: argparse.ArgumentParser, stop_on_detect: bool = True) -> DetectorConfig:
    spec = _build_spec(args, parser)
    theta0 = _parse_theta0(args.theta0, parser)
    try:
        return DetectorConfig(
            spec=spec,
            theta0=theta0,
            threshold=args.threshold,
            direction=args.direction,
            stat_every=getattr(args, "stat_every", 0),
            stop_on_detect=stop_on_detect,
        )
    except (ValueError, StreamCpdError) as e:
        parser.error(str(e))


def _open_in(path: str):
    return sys.stdin if path == "-" else open(path, "r")


def _open_out(path: str):
    return sys.stdout if path == "-" else open(path, "w")


# ------------------------------------------------------------------
# detect
# ------------------------------------------------------------------


def _event_line(t: int, curves: int, evaluated: int, stat, detection) -> str:
    parts = [f'"t": {t}', f'"curves": {curves}', f'"evaluated": {evaluated}']
    if detection is not None:
        parts.append('"detect": true')
        parts.append(f'"tau_low": {detection.tau_low}')
        parts.append(f'"stat": {_fmt17(detection.stat)}')
        parts.append(f'"direction": "{detection.direction_hit.name.lower()}"')
    elif stat is not None:
        parts.append(f'"stat": {_fmt17(stat)}')
    return "{" + ", ".join(parts) + "}"


def run_detect(args, parser: argparse.ArgumentParser) -> int:
    config = _build_config(args, parser, stop_on_detect=not args.no_stop)
    try:
        detector = Detector(config)
    except (ValueError, StreamCpdError) as e:
        parser.error(str(e))
    try:
        fin = _open_in(args.input)
    except OSError as e:
        print(f"error: cannot open input: {e}", file=sys.stderr)
        return 1
    try:
        fout = _open_out(args.output)
    except OSError as e:
        print(f"error: cannot open output: {e}", file=sys.stderr)
        return 1
    try:
        for lineno, raw in enumerate(fin, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            try:
                x = float(line)
            except ValueError:
                print(f"error: line {lineno}: not a number: {line!r}", file=sys.stderr)
                return 2
            try:
                res = detector.step(x)
            except SupportError as e:
                print(f"error: line {lineno}: {e}", file=sys.stderr)
                return 2
            print(
                _event_line(res.t, res.curves_stored, res.curves_evaluated, res.stat, res.detection),
                file=fout,
            )
            if res.detection is not None and config.stop_on_detect:
                return 3
        return 0
    except OSError as e:
        print(f"error: I/O failure: {e}", file=sys.stderr)
        return 1
    finally:
        if fin is not sys.stdin:
            fin.close()
        if fout is not sys.stdout:
            fout.close()


# ------------------------------------------------------------------
# calibrate
# ------------------------------------------------------------------


def _calibration_json(res: CalibrationResult) -> str:
    parts = [
        f'"threshold": {_fmt17(res.threshold)}',
        f'"achieved_arl": {_fmt17(res.achieved_arl)}',
        f'"target_arl": {res.target_arl}',
        f'"reps": {res.reps}',
        f'"rounds": {res.rounds}',
        f'"censor_at": {res.censor_at}',
    ]
    return "{" + ", ".join(parts) + "}"


def run_calibrate(args, parser: argparse.ArgumentParser) -> int:
    # threshold is calibrated, not supplied; feed a placeholder to the config
    args.threshold = 1.0
    config = _build_config(args, parser)
    try:
        res = calibrate_threshold(
            config, args.target_arl, args.reps, args.seed, null_theta=args.null_theta
        )
    except CalibrationError as e:
        print(f"error: {e} (bracket: lo={e.lo}, hi={e.hi})", file=sys.stderr)
        return 4
    except (ValueError, StreamCpdError) as e:
        parser.error(str(e))
    try:
        fout = _open_out(args.output)
    except OSError as e:
        print(f"error: cannot open output: {e}", file=sys.stderr)
        return 1
    print(_calibration_json(res), file=fout)
    if fout is not sys.stdout:
        fout.close()
    return 0


# ------------------------------------------------------------------
# simulate
# ------------------------------------------------------------------


def _build_scenario(args, parser: argparse.ArgumentParser) -> Scenario:
    spec = _build_spec(args, parser)
    theta_post = args.theta_post if args.theta_post is not None else args.theta_pre
    try:
        return Scenario(
            spec=spec,
            theta_pre=args.theta_pre,
            theta_post=theta_post,
            change_at=args.change_at,
            length=args.length,
            seed=args.seed,
        )
    except (ValueError, StreamCpdError) as e:
        parser.error(str(e))


def run_simulate(args, parser: argparse.ArgumentParser) -> int:
    scenario = _build_scenario(args, parser)
    stream = generate(scenario)
    try:
        fout = _open_out(args.output)
    except OSError as e:
        print(f"error: cannot open output: {e}", file=sys.stderr)
        return 1
    integral = scenario.spec.kind in (FamilyKind.POISSON, FamilyKind.BINOMIAL)
    for v in stream:
        print(str(int(v)) if integral else _fmt17(v), file=fout)
    if fout is not sys.stdout:
        fout.close()
    return 0


# ------------------------------------------------------------------
# bench
# ------------------------------------------------------------------


def run_bench(args, parser: argparse.ArgumentParser) -> int:
    config = _build_config(args, parser)
    scenario = _build_scenario(args, parser)
    try:
        fout = _open_out(args.output)
    except OSError as e:
        print(f"error: cannot open output: {e}", file=sys.stderr)
        return 1
    try:
        if args.experiment == "counters":
            profile = counter_profile(config, scenario, mode=args.mode)
            write_counter_csv(profile, fout)
        else:
            runs = [DelayRun("run", config, scenario, square_data=args.square_data)]
            rows = delay_experiment(runs, args.reps)
            write_delay_csv(rows, fout)
    finally:
        if fout is not sys.stdout:
            fout.close()
    return 0


# ------------------------------------------------------------------
# entry point
# ------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="streamcpd",
        description="Online changepoint detection via exact one-sided likelihood-ratio tests",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("detect", help="stream values from a file or stdin and emit NDJSON events")
    _add_detector_flags(p)
    p.add_argument("--input", "-i", default="-", help="input path or - for stdin")
    p.add_argument("--output", "-o", default="-", help="output path or - for stdout")
    p.add_argument("--stat-every", dest="stat_every", type=int, default=0,
                   help="emit the full statistic every K steps (0 = never)")
    p.add_argument("--no-stop", action="store_true", help="keep running after a detection")
    p.set_defaults(func=run_detect)

    p = sub.add_parser("calibrate", help="Monte Carlo threshold calibration for a target ARL")
    _add_family_flags(p)
    p.add_argument("--theta0", required=True)
    p.add_argument("--direction", choices=["up", "down", "both"], default="both")
    p.add_argument("--target-arl", dest="target_arl", type=int, required=True)
    p.add_argument("--reps", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--null-theta", dest="null_theta", type=float,
                   help="simulation parameter when theta0 is unknown")
    p.add_argument("--output", "-o", default="-")
    p.set_defaults(func=run_calibrate)

    p = sub.add_parser("simulate", help="write a reproducible stream for a scenario")
    _add_family_flags(p)
    p.add_argument("--theta-pre", dest="theta_pre", type=float, required=True)
    p.add_argument("--theta-post", dest="theta_post", type=float)
    p.add_argument("--change-at", dest="change_at", type=int, default=0)
    p.add_argument("--length", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--output", "-o", default="-")
    p.set_defaults(func=run_simulate)

    p = sub.add_parser("bench", help="counter profiles and delay experiments (CSV)")
    p.add_argument("--experiment", choices=["counters", "delays"], required=True)
    _add_detector_flags(p)
    p.add_argument("--theta-pre", dest="theta_pre", type=float, required=True)
    p.add_argument("--theta-post", dest="theta_post", type=float)
    p.add_argument("--change-at", dest="change_at", type=int, default=0)
    p.add_argument("--length", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--reps", type=int, default=100)
    p.add_argument("--mode", choices=["adaptive", "full"], default="adaptive")
    p.add_argument("--square-data", dest="square_data", action="store_true",
                   help="feed squared values to the detector (delays experiment)")
    p.add_argument("--output", "-o", default="-")
    p.set_defaults(func=run_bench)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    return args.func(args, parser)


if __name__ == "__main__":
    sys.exit(main())
