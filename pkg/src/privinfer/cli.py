"""Command line entry point: ``privinfer {run,gamma,bounds,verify,session}``.

Exit codes: 0 success, 1 failed verification or bound violations, 2 usage
or parameter errors.
"""
from __future__ import annotations

import argparse
import json
import sys
from typing import Optional, Sequence

from . import bounds as _bounds
from .approx import GammaSpec, count_gamma, count_gamma_members
from .exceptions import ParameterError
from .experiment import ExperimentConfig, run_experiment, trial_transcript
from .wire import WireMessage, encode

__all__ = ["main", "build_parser"]

ENUMERATE_MAX_N = 20

# flag name -> ExperimentConfig field; config files may use either spelling
_RUN_FLAGS = {
    "n": "n",
    "t": "t",
    "h": "h",
    "trials": "trials",
    "seed": "seed",
    "x_norm": "x_norm",
    "out": "output_path",
    "format": "format",
    "family": "family",
    "hadamard": "hadamard_path",
    "jobs": "n_jobs",
    "epsilon": "epsilon_for_bounds",
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(2, f"{self.prog}: error: {message}\n")


def _add_nth(p: argparse.ArgumentParser, required: bool = True) -> None:
    p.add_argument("--n", type=int, required=required, help="model length")
    p.add_argument("--t", type=int, required=required, help="number of blocks (user privacy)")
    p.add_argument("--h", type=int, default=None if not required else 0, help="perturbation budget")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="privinfer", description="Private inference for +-1 linear models.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    run = sub.add_parser("run", help="Monte Carlo experiment")
    _add_nth(run, required=False)
    run.add_argument("--trials", type=int)
    run.add_argument("--seed", type=int)
    run.add_argument("--x-norm", dest="x_norm", type=float)
    run.add_argument("--out", help="output file; stdout when omitted")
    run.add_argument("--format", choices=("csv", "json"))
    run.add_argument("--config", help="JSON config file; flags override its values")
    run.add_argument("--family", choices=("le", "lemma"))
    run.add_argument("--hadamard", help="text file with the t x t Hadamard matrix")
    run.add_argument("--epsilon", type=float, help="epsilon used for the lower bound in the summary")
    run.add_argument("--jobs", type=int, help="worker processes")

    gamma = sub.add_parser("gamma", help="size of the perturbation set")
    _add_nth(gamma)
    gamma.add_argument("--family", choices=("le", "lemma"), default="le")
    gamma.add_argument("--enumerate", action="store_true", help=f"cross-check by enumeration (n <= {ENUMERATE_MAX_N})")

    bnd = sub.add_parser("bounds", help="error, leakage and lower-bound report")
    _add_nth(bnd)
    bnd.add_argument("--ell", type=int)
    bnd.add_argument("--epsilon", type=float)
    bnd.add_argument("--json", action="store_true", help="print the report as JSON")
    bnd.add_argument("--compare", action="store_true", help="also print the eps = 2 sqrt(h) comparison row")

    ver = sub.add_parser("verify", help="run every oracle check")
    ver.add_argument("--seed", type=int, default=0)

    ses = sub.add_parser("session", help="dump one protocol transcript")
    _add_nth(ses)
    ses.add_argument("--seed", type=int, default=0)
    ses.add_argument("--x-norm", dest="x_norm", type=float, default=1.0)
    ses.add_argument("--family", choices=("le", "lemma"), default="le")
    ses.add_argument("--hex", action="store_true", help="print the wire bytes of each message")
    return parser


def _config_from_args(args) -> ExperimentConfig:
    data: dict = {}
    if args.config:
        with open(args.config, encoding="utf-8") as fh:
            raw = json.load(fh)
        if not isinstance(raw, dict):
            raise ParameterError("config file must hold a JSON object")
        for key, value in raw.items():
            data[_RUN_FLAGS.get(key, key)] = value
    for flag, field in _RUN_FLAGS.items():
        value = getattr(args, flag, None)
        if value is not None:
            data[field] = value
    for key in ("n", "t"):
        if key not in data:
            raise ParameterError(f"--{key} is required (flag or config file)")
    known = set(ExperimentConfig.__dataclass_fields__)
    unknown = set(data) - known
    if unknown:
        raise ParameterError(f"unknown config keys: {sorted(unknown)}")
    return ExperimentConfig(**data)


def _cmd_run(args, out) -> int:
    cfg = _config_from_args(args)
    to_stdout = cfg.output_path is None
    result = run_experiment(cfg)
    if to_stdout:
        out.write(result.to_json() if cfg.format == "json" else result.to_csv())
    s = result.summary
    msg = (
        f"trials={s['trials']} violations={s['violations']} max_error={s['max_error']:.6g} "
        f"error_bound={s['error_bound']:.6g} mi_achieved={s['mi_achieved']:.6g}"
    )
    print(msg, file=sys.stderr if to_stdout else out)
    return 1 if s["violations"] else 0


def _cmd_gamma(args, out) -> int:
    spec = GammaSpec(args.n, args.t, args.h, args.family)
    lemma = count_gamma(GammaSpec(args.n, args.t, args.h, "lemma"))
    le = count_gamma_members(GammaSpec(args.n, args.t, args.h, "le"))
    print(f"n={args.n} t={args.t} h={args.h}", file=out)
    print(f"max block weight: {spec.max_block_weight}", file=out)
    print(f"lemma count: {lemma}", file=out)
    print(f"<=-set count: {le}", file=out)
    print(f"discrepancy: {le - lemma}", file=out)
    if args.enumerate:
        if args.n > ENUMERATE_MAX_N:
            raise ParameterError(f"--enumerate needs n <= {ENUMERATE_MAX_N}")
        from .oracles import brute_gamma

        brute = brute_gamma(spec)
        ok = brute.count_lemma == lemma and brute.count_le == le
        print(f"enumerated: lemma {brute.count_lemma}, <=-set {brute.count_le} ({'match' if ok else 'MISMATCH'})", file=out)
        return 0 if ok else 1
    return 0


def _cmd_bounds(args, out) -> int:
    rep = _bounds.report(args.n, args.t, args.h, args.ell, args.epsilon)
    if args.json:
        doc = rep.to_dict()
        if args.compare:
            doc = {"report": doc, "comparison": _bounds.comparison_row(args.n, args.t, args.h)}
        out.write(json.dumps(doc, indent=2, sort_keys=True) + "\n")
    else:
        for key, value in rep.to_dict().items():
            if isinstance(value, float):
                value = f"{value:.3f}"
            print(f"{key}: {value}", file=out)
        if args.compare:
            for key, value in _bounds.comparison_row(args.n, args.t, args.h).items():
                print(f"comparison.{key}: {value:.3f}" if isinstance(value, float) else f"comparison.{key}: {value}", file=out)
    return 0 if rep.consistent else 1


def _cmd_verify(args, out) -> int:
    from .verification import run_checks

    results = run_checks(args.seed)
    for r in results:
        print(f"{'PASS' if r.passed else 'FAIL'}  {r.name}: {r.detail}", file=out)
    failed = sum(not r.passed for r in results)
    print(f"{len(results) - failed}/{len(results)} checks passed", file=out)
    return 1 if failed else 0


def _cmd_session(args, out) -> int:
    cfg = ExperimentConfig(n=args.n, t=args.t, h=args.h, trials=1, seed=args.seed, x_norm=args.x_norm, family=args.family)
    tr = trial_transcript(cfg, 0)
    out.write(tr.to_bytes().decode("utf-8"))
    if args.hex:
        for label, msg in (
            ("QUERY", WireMessage.query(tr.q)),
            ("ANSWER", WireMessage.answer(tr.answers)),
            ("RESULT", WireMessage.result(tr.estimate)),
        ):
            print(f"{label}: {encode(msg).hex()}", file=out)
    return 0


_COMMANDS = {
    "run": _cmd_run,
    "gamma": _cmd_gamma,
    "bounds": _cmd_bounds,
    "verify": _cmd_verify,
    "session": _cmd_session,
}


def main(argv: Optional[Sequence[str]] = None, out=None) -> int:
    out = sys.stdout if out is None else out
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return _COMMANDS[args.command](args, out)
    except (ValueError, TypeError, OSError) as exc:  # ParameterError and JSON errors are ValueErrors
        print(f"privinfer {args.command}: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
