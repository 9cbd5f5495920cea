"""Command-line entry point: ``symcirc <subcommand> [options]``.

Subcommands: ``simulate``, ``kernels``, ``oracle``, ``theory``, ``table``
and ``gue``.  Any option can also come from a ``--config`` file of
``key = value`` lines (``#`` starts a comment); options given on the command
line win.  Exit codes: 0 success, 2 invalid arguments, 3 runtime failure.
"""
from __future__ import annotations

import argparse
import json
import logging
import os
import sys
import time
from pathlib import Path

import numpy as np

from .kernels import SymmetryClass, kernel
from .outputs import (
    RunManifest,
    write_edges,
    write_gue_csv,
    write_json,
    write_kernel_csv,
    write_occupancy,
    write_rho,
)

log = logging.getLogger("symcirc")

EXIT_USAGE = 2
EXIT_RUNTIME = 3


class UsageError(Exception):
    pass


def _class_arg(value: str) -> SymmetryClass:
    try:
        return SymmetryClass.parse(value)
    except ValueError as e:
        raise argparse.ArgumentTypeError(str(e)) from None


def _window_arg(value: str) -> tuple[int, int]:
    parts = value.replace(":", ",").split(",")
    if len(parts) != 2:
        raise argparse.ArgumentTypeError("window must look like LO,HI")
    return int(parts[0]), int(parts[1])


def _seed(args) -> int:
    if args.seed is not None:
        return args.seed
    env = os.environ.get("SYMCIRC_SEED")
    if env is None:
        return 0
    try:
        return int(env, 0)
    except ValueError:
        raise UsageError(f"SYMCIRC_SEED is not an integer: {env!r}") from None


def _stem(out: str, suffix: str) -> Path:
    p = Path(out)
    return p.with_name(p.name[: -len(suffix)]) if p.name.endswith(suffix) else p


def _common(p: argparse.ArgumentParser, seed: bool = True):
    p.add_argument("--config", help="file of key = value lines supplying defaults")
    p.add_argument("--threads", type=int, default=None, help="cap on worker threads")
    if seed:
        p.add_argument("--seed", type=lambda s: int(s, 0), default=None,
                       help="master seed (falls back to $SYMCIRC_SEED, then 0)")
    p.add_argument("-v", "--verbose", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="symcirc", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="Monte Carlo edge statistics and front fit")
    p.add_argument("--class", dest="cls", type=_class_arg, default=SymmetryClass.UNITARY)
    p.add_argument("--sites", type=int, default=512)
    p.add_argument("--layers", type=int, default=150)
    p.add_argument("--ensemble", type=int, default=2000)
    p.add_argument("--initial-op", default="X", choices=["X", "Y", "Z"])
    p.add_argument("--initial-site", type=int, default=None)
    p.add_argument("--burn-in", type=int, default=20)
    p.add_argument("--window", type=_window_arg, default=None, help="fit window LO,HI (inclusive)")
    p.add_argument("--occupancy", action="store_true", help="also write site-occupation density")
    p.add_argument("--out", default="symcirc_run", help="output prefix")
    _common(p)

    p = sub.add_parser("kernels", help="dump a 16x16 transition kernel")
    p.add_argument("--class", dest="cls", type=_class_arg, default=SymmetryClass.UNITARY)
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    p.add_argument("--exact", action="store_true", help="CSV entries as exact fractions")
    p.add_argument("--out", default=None, help="file to write (default: standard output)")
    _common(p, seed=False)

    p = sub.add_parser("oracle", help="Haar-sampled kernel estimates against the exact kernels")
    p.add_argument("--class", dest="cls", type=_class_arg, action="append", default=None,
                   help="repeatable; default: all five classes")
    p.add_argument("--samples", type=int, default=100_000)
    p.add_argument("--z-threshold", type=float, default=4.0)
    p.add_argument("--out", default="symcirc_oracle.json")
    _common(p)

    p = sub.add_parser("theory", help="exact velocities and diffusion constants as JSON")
    p.add_argument("--class", dest="cls", type=_class_arg, action="append", default=None,
                   help="repeatable; default: all five classes")
    p.add_argument("--q", type=int, default=2)
    p.add_argument("--series", type=int, default=None, metavar="ORDER")
    p.add_argument("--out", default=None)
    _common(p, seed=False)

    p = sub.add_parser("table", help="velocity table across local dimensions")
    p.add_argument("--q", type=int, nargs="+", default=[2, 3, 4, 5, 6])
    p.add_argument("--json", action="store_true")
    p.add_argument("--out", default=None)
    _common(p, seed=False)

    p = sub.add_parser("gue", help="operator growth under GUE Hamiltonians")
    p.add_argument("--qubits", type=int, default=5)
    p.add_argument("--samples", type=int, default=200)
    p.add_argument("--tmax", type=float, default=200.0)
    p.add_argument("--times", type=int, default=401, help="number of time points")
    p.add_argument("--initial", default=None, help="initial Pauli string, default Z on qubit 0")
    p.add_argument("--out", default="symcirc_gue.csv")
    _common(p)
    return parser


def _config_tokens(path: str, parser: argparse.ArgumentParser, command: str,
                   given: set[str] = frozenset()) -> list[str]:
    sub = parser._subparsers._group_actions[0].choices[command]
    flags = {}
    for a in sub._actions:
        for s in a.option_strings:
            if s.startswith("--"):
                flags[s[2:].replace("-", "_")] = a
    tokens = []
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise UsageError(f"cannot read config file {path}: {e}") from None
    for n, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{n}: expected key = value")
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.replace("-", "_")
        action = flags.get(key)
        if action is None or key == "config":
            raise UsageError(f"{path}:{n}: unknown key {key!r} for {command}")
        flag = "--" + key.replace("_", "-")
        if flag in given:
            continue
        if action.nargs == 0:
            if value.lower() in ("1", "true", "yes", "on"):
                tokens.append(flag)
            elif value.lower() not in ("0", "false", "no", "off"):
                raise UsageError(f"{path}:{n}: {key} expects a boolean")
        elif action.nargs == "+":
            tokens += [flag, *value.replace(",", " ").split()]
        else:
            tokens += [flag, value]
    return tokens


def parse_args(argv: list[str]) -> argparse.Namespace:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.config:
        # file values go first so explicit flags override them
        cmd_index = argv.index(args.command)
        given = {a.split("=", 1)[0] for a in argv if a.startswith("--")}
        tokens = _config_tokens(args.config, parser, args.command, given)
        argv = argv[: cmd_index + 1] + tokens + argv[cmd_index + 1:]
        args = parser.parse_args(argv)
    return args


def _emit(text: str, out: str | None) -> list[str]:
    if out is None:
        sys.stdout.write(text)
        return []
    Path(out).parent.mkdir(parents=True, exist_ok=True)
    Path(out).write_text(text, encoding="utf-8")
    return [out]


def cmd_simulate(args):
    from .front import fit_front, front_profile_check
    from .simulate import SimConfig, run_ensemble
    from .walks import class_walk

    seed = _seed(args)
    try:
        cfg = SimConfig(
            cls=args.cls, n=args.sites, t_max=args.layers, ensemble=args.ensemble, seed=seed,
            initial_site=args.initial_site, initial_op=args.initial_op, burn_in=args.burn_in,
            fit_window=args.window, track_occupancy=args.occupancy,
        )
    except ValueError as e:
        raise UsageError(str(e)) from None
    lo, hi = cfg.window
    if lo < cfg.burn_in or hi > cfg.t_max or hi - lo + 1 < 10:
        raise UsageError(f"fit window [{lo}, {hi}] must lie in [{cfg.burn_in}, {cfg.t_max}] and span 10 layers")
    stats = run_ensemble(cfg, threads=args.threads)
    fit = fit_front(stats)
    prefix = args.out
    outs = [
        str(write_edges(f"{prefix}_edges.csv", stats)),
        str(write_rho(f"{prefix}_rho.csv", stats)),
    ]
    walk = class_walk(cfg.cls, 2)
    result = fit.to_dict()
    result["theory"] = {"v_B": str(walk.v_B), "D": str(walk.D)}
    result["config"] = cfg.to_dict()
    t_mid = (lo + hi) // 2
    result["profile"] = {
        side: front_profile_check(stats, t_mid, side=side, fit=fit).to_dict() for side in ("right", "left")
    }
    outs.append(str(write_json(f"{prefix}_fit.json", result)))
    if cfg.track_occupancy:
        outs.append(str(write_occupancy(f"{prefix}_occupancy.csv", stats)))
    print(f"{cfg.cls.value}: v_B = {fit.v_B_hat:.5f} +- {fit.v_B_stderr:.5f}   "
          f"D = {fit.D_hat:.4f} +- {fit.D_stderr:.4f}   (theory v_B = {float(walk.v_B):.5f})")
    return cfg.to_dict(), outs, seed, Path(f"{prefix}_manifest.json")


def cmd_kernels(args):
    k = kernel(args.cls)
    if args.format == "json":
        data = {
            "class": args.cls.value,
            "labels": list(k.labels()),
            "exact": [[str(v) for v in row] for row in k.exact],
            "matrix": k.matrix.tolist(),
        }
        text = json.dumps(data, indent=2) + "\n"
        outs = _emit(text, args.out)
    elif args.out is None:
        write_kernel_csv(sys.stdout, k, exact=args.exact)
        outs = []
    else:
        outs = [str(write_kernel_csv(args.out, k, exact=args.exact))]
    manifest = Path(args.out + ".manifest.json") if args.out else None
    return {"class": args.cls.value, "format": args.format, "exact": args.exact}, outs, None, manifest


def cmd_oracle(args):
    from .haar import oracle_report

    seed = _seed(args)
    if args.samples < 2:
        raise UsageError("--samples must be at least 2")
    classes = args.cls or list(SymmetryClass)
    rep = oracle_report(classes, args.samples, seed, threads=args.threads or os.cpu_count(),
                        z_threshold=args.z_threshold)
    for name, rec in rep["classes"].items():
        c = rec["comparison"]
        print(f"{name:<11} max |dev| = {c['max_abs_dev']:.2e}  max z = {c['max_z']:.2f}  "
              f"{'ok' if rec['passed'] else 'FAIL'}")
    out = write_json(args.out, rep)
    cfg = {"classes": [SymmetryClass.parse(c).value for c in classes], "samples": args.samples,
           "z_threshold": args.z_threshold}
    return cfg, [str(out)], seed, _stem(args.out, ".json").with_name(_stem(args.out, ".json").name + "_manifest.json")


def cmd_theory(args):
    from .report import theory_report

    if args.q < 2:
        raise UsageError("--q must be at least 2")
    if args.series is not None and not 0 <= args.series <= 8:
        raise UsageError("--series must be between 0 and 8")
    classes = args.cls or list(SymmetryClass)
    try:
        reports = [theory_report(c, args.q, args.series) for c in classes]
    except ValueError as e:
        raise UsageError(str(e)) from None
    data = reports[0] if len(reports) == 1 else {"classes": reports}
    outs = _emit(json.dumps(data, indent=2) + "\n", args.out)
    manifest = Path(args.out + ".manifest.json") if args.out else None
    return {"classes": [SymmetryClass.parse(c).value for c in classes], "q": args.q,
            "series": args.series}, outs, None, manifest


def cmd_table(args):
    from .report import format_table, repro_table

    if min(args.q) < 2:
        raise UsageError("--q values must be at least 2")
    tab = repro_table(tuple(args.q))
    text = json.dumps(tab, indent=2) + "\n" if args.json else format_table(tab) + "\n"
    outs = _emit(text, args.out)
    manifest = Path(args.out + ".manifest.json") if args.out else None
    return {"q": args.q, "json": args.json}, outs, None, manifest


def cmd_gue(args):
    from .gue import GueConfig, ensemble_curves

    seed = _seed(args)
    try:
        cfg = GueConfig(args.qubits, args.samples, args.tmax, args.times, seed, args.initial)
        cfg.operator
    except ValueError as e:
        raise UsageError(str(e)) from None
    run = ensemble_curves(cfg, threads=args.threads or os.cpu_count())
    if run.max_norm_error > 1e-10:
        raise RuntimeError(f"coefficient normalization off by {run.max_norm_error:.3g}")
    out = write_gue_csv(args.out, run)
    stem = _stem(args.out, ".csv")
    summary = {
        "regimes": run.regimes,
        "plateau_ratio": run.plateau_ratio(),
        "plateau_ratio_stderr": run.plateau_ratio_stderr(),
        "dip_values": run.dip_values(),
        "dip_reference": 1 / cfg.d**2,
        "ramp_anticommute_mean": float(run.g_anticommute[run.ramp_mask()].mean()),
        "ramp_commute_mean": float(run.g_commute[run.ramp_mask()].mean()),
        "max_norm_error": run.max_norm_error,
    }
    summ = write_json(stem.with_name(stem.name + "_summary.json"), summary)
    print(f"plateau ratio {summary['plateau_ratio']:.3f} +- {summary['plateau_ratio_stderr']:.3f}; "
          f"dip at t = {run.regimes['dip']:.2f}")
    cfg_d = {"n_qubits": cfg.n_qubits, "samples": cfg.samples, "t_max": cfg.t_max,
             "n_times": cfg.n_times, "initial": cfg.operator.label()}
    return cfg_d, [str(out), str(summ)], seed, stem.with_name(stem.name + "_manifest.json")


COMMANDS = {
    "simulate": cmd_simulate,
    "kernels": cmd_kernels,
    "oracle": cmd_oracle,
    "theory": cmd_theory,
    "table": cmd_table,
    "gue": cmd_gue,
}


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        args = parse_args(argv)
    except UsageError as e:
        print(f"symcirc: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as e:
        return int(e.code) if isinstance(e.code, int) else EXIT_USAGE
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if args.threads is not None and args.threads < 1:
        print("symcirc: error: --threads must be positive", file=sys.stderr)
        return EXIT_USAGE
    start = time.perf_counter()
    try:
        cfg, outs, seed, manifest = COMMANDS[args.command](args)
    except UsageError as e:
        print(f"symcirc: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except (RuntimeError, np.linalg.LinAlgError, OSError) as e:
        print(f"symcirc: {args.command} failed: {e}", file=sys.stderr)
        return EXIT_RUNTIME
    if manifest is not None and outs:
        RunManifest(args.command, cfg, seed, duration_s=time.perf_counter() - start,
                    outputs=outs).write(manifest)
    return 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
