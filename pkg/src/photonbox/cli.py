"""Command-line front end.

    photonbox run --protocol v1 [--config FILE] [--output result.json]
    photonbox sweep --protocol v1 --axis dz0 --values 1e-16,3e-16,1e-15
    photonbox mt-check
    photonbox force-check
    photonbox verify [--only force]

Exit codes: 0 ok, 1 verification failure, 2 usage/config error,
3 numerical error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .config import KEYS, NUMERIC_KEYS, RunConfig, load_config
from .errors import InputError, NoOrthogonalTime, NumericalError, PhotonBoxError
from .experiments import PROTOCOLS, ProtocolResult, run_shutter, run_version1, run_version2, run_version3
from .mandelstam_tamm import mandelstam_tamm_check, property_sweep, two_level_problem
from .relativity import PhotonBounce, photon_mean_force
from .report import result_csv, result_json, summary_line, sweep_csv, to_json
from .verify import GROUPS, VerifyContext, format_table, run_checks

EXIT_OK, EXIT_VERIFY, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse exits with 2 already; keep the message on stderr
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, default=None, help="config file (default: shipped Earth config)")
    common.add_argument("--seed", type=int, default=None, help="override the config seed (u64)")
    common.add_argument("--samples", type=int, default=None, help="override ensemble_size")
    common.add_argument("--override", action="append", default=[], metavar="KEY=VAL", help="repeatable")
    common.add_argument("--output", type=Path, default=None)
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--workers", type=int, default=None)

    parser = _Parser(prog="photonbox", description="Photon-box uncertainty simulations.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    run = sub.add_parser("run", parents=[common], help="run one protocol")
    run.add_argument("--protocol", choices=PROTOCOLS, required=True)

    sweep = sub.add_parser("sweep", parents=[common], help="run a protocol over values of one key")
    sweep.add_argument("--protocol", choices=PROTOCOLS, required=True)
    sweep.add_argument("--axis", required=True)
    sweep.add_argument("--values", required=True, help="comma-separated; may be empty")

    mt = sub.add_parser("mt-check", parents=[common], help="energy spread times orthogonalization time")
    mt.add_argument("--criterion", choices=("modulus", "real_part"), default="real_part")

    sub.add_parser("force-check", parents=[common], help="bouncing-photon weight")

    verify = sub.add_parser("verify", parents=[common], help="run the invariant suite")
    verify.add_argument("--only", action="append", default=[], help=f"group(s): {', '.join(GROUPS)}")
    return parser


def _load(args) -> RunConfig:
    overrides = list(args.override)
    if args.seed is not None:
        overrides.append(f"seed={args.seed}")
    if args.samples is not None:
        overrides.append(f"ensemble_size={args.samples}")
    if args.workers is not None:
        overrides.append(f"workers={args.workers}")
    return load_config(args.config, overrides)


def run_protocol(cfg: RunConfig, protocol: str) -> ProtocolResult:
    constants = cfg.constants()
    n, seed, workers, bound = cfg["ensemble_size"], cfg["seed"], cfg["workers"], cfg.bound(constants)
    if protocol == "shutter":
        return run_shutter(cfg.shutter(constants), n, seed, constants, bound=bound, workers=workers)
    box, spec = cfg.box(constants), cfg.spec(constants)
    if protocol == "v3":
        return run_version3(box, spec, n, seed, constants, bound=bound, workers=workers)
    runner = run_version1 if protocol == "v1" else run_version2
    return runner(
        box, spec, n, seed, constants, bound=bound, workers=workers,
        order=cfg["order"], quadrature_tol=cfg["quadrature_tol"],
    )


def _emit(text: str, output: Path | None) -> None:
    if output is None:
        sys.stdout.write(text)
    else:
        output.write_text(text, encoding="utf-8")


def cmd_run(args) -> int:
    cfg = _load(args)
    result = run_protocol(cfg, args.protocol)
    print(summary_line(result))
    _emit(result_json(result) if args.format == "json" else result_csv(result), args.output)
    return EXIT_OK


def cmd_sweep(args) -> int:
    if args.axis not in NUMERIC_KEYS:
        raise InputError(f"sweep axis {args.axis!r} is not a numeric config key")
    cfg = _load(args)
    parse = KEYS[args.axis][0]
    raw = [v.strip() for v in args.values.split(",") if v.strip()]
    try:
        values = [parse(v) for v in raw]
    except ValueError as exc:
        raise InputError(f"bad value for sweep axis {args.axis!r}: {exc}") from None
    rows = []
    for value in values:
        if value == "auto":
            raise InputError(f"sweep axis {args.axis!r} values must be numeric")
        rows.append((value, run_protocol(cfg.with_overrides({args.axis: value}), args.protocol)))
    _emit(sweep_csv(rows), args.output)
    return EXIT_OK


def cmd_mt_check(args) -> int:
    cfg = _load(args)
    constants = cfg.constants()
    two = mandelstam_tamm_check(two_level_problem(cfg["mt_energy"]), constants)
    sweep = property_sweep(
        constants, trials=cfg["mt_trials"], dim=cfg["mt_dim"], seed=cfg["seed"],
        energy_scale=cfg["mt_energy"], criterion=args.criterion,
    )
    ok = two.passes and sweep.passes
    print(f"two-level: dE*T0 = {two.product:.6e} J s, bound {two.bound:.6e}, {'pass' if two.passes else 'FAIL'}")
    print(
        f"random {cfg['mt_dim']}-dim x {sweep.trials} ({args.criterion}): {sweep.found} with T0, "
        f"{sweep.no_orthogonal_time} without, {sweep.violations} violations"
    )
    record = {
        "two_level_T0": two.T0, "two_level_dE": two.dE, "two_level_product": two.product,
        "bound": two.bound, "trials": sweep.trials, "found": sweep.found,
        "no_orthogonal_time": sweep.no_orthogonal_time, "violations": sweep.violations,
        "min_ratio": sweep.min_ratio, "passes": ok,
    }
    if args.output is not None:
        args.output.write_text(to_json(record), encoding="utf-8")
    return EXIT_OK if ok else EXIT_VERIFY


def cmd_force_check(args) -> int:
    cfg = _load(args)
    constants = cfg.constants()
    bounce = cfg.bounce()
    closed = photon_mean_force(bounce, constants)
    sim = photon_mean_force(bounce, constants, simulate=True, n_bounce=cfg["n_bounce"])
    rel = abs(sim - closed) / abs(closed) if closed else abs(sim)
    taller = PhotonBounce(bounce.Omega0, 2.0 * bounce.B, bounce.r0)
    sim2 = photon_mean_force(taller, constants, simulate=True, n_bounce=cfg["n_bounce"])
    b_rel = abs(sim2 - sim) / abs(sim) if sim else abs(sim2)
    ok = rel <= 1e-6 and b_rel <= 1e-4
    print(f"closed form {closed:.9e} N, simulated {sim:.9e} N, rel diff {rel:.2e}, height change {b_rel:.2e}")
    record = {"closed_form": closed, "simulated": sim, "relative_difference": rel,
              "height_doubling_change": b_rel, "passes": ok}
    if args.output is not None:
        args.output.write_text(to_json(record), encoding="utf-8")
    return EXIT_OK if ok else EXIT_VERIFY


def cmd_verify(args) -> int:
    cfg = _load(args)
    constants = cfg.constants()
    only = [g.strip() for item in args.only for g in item.split(",") if g.strip()]
    bad = [g for g in only if g not in GROUPS]
    if bad:
        raise InputError(f"unknown check group(s): {', '.join(bad)}")
    ctx = VerifyContext(
        constants=constants, box=cfg.box(constants), spec=cfg.spec(constants),
        bounce=cfg.bounce(), seed=cfg["seed"],
    )
    results = run_checks(ctx, only or None)
    table = format_table(results)
    print(table)
    if args.output is not None:
        args.output.write_text(table + "\n", encoding="utf-8")
    return EXIT_OK if all(r.passed for r in results) else EXIT_VERIFY


COMMANDS = {
    "run": cmd_run,
    "sweep": cmd_sweep,
    "mt-check": cmd_mt_check,
    "force-check": cmd_force_check,
    "verify": cmd_verify,
}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except InputError as exc:
        print(f"photonbox: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NoOrthogonalTime as exc:
        print(f"photonbox: no orthogonal time: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (NumericalError, PhotonBoxError) as exc:
        print(f"photonbox: numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
