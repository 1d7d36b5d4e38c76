"""Command-line entry point.

Subcommands: ``verify`` (self-check suites), ``sweep`` (optimize across a
noise-strength grid, CSV/JSON output), ``optimize`` (single strength, JSON
protocol artifact), ``montecarlo`` (simulation cross-check of the exact
average fidelity).

Settings resolve as: command-line flag > ANTEPOST_SEED environment variable
(seed only) > JSON config file (``--config``) > built-in default.  Unknown
config keys are rejected.  Exit codes: 0 success, 1 check failure, 2 usage or
config error, 3 I/O error.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys

import numpy as np

from . import channels, metrics, optimize, protocols, verify

EXIT_OK = 0
EXIT_CHECK = 1
EXIT_USAGE = 2
EXIT_IO = 3

SEED_ENV = "ANTEPOST_SEED"

_ANNEAL_KEYS = ("restarts", "steps", "penalty_weight", "initial_temperature",
                "cooling", "step_size", "refine_sweeps", "refine_top")

_DEFAULTS: dict[str, dict] = {
    "verify": {
        "seed": 0, "threads": 1, "quick": False, "output": None,
    },
    "sweep": {
        "dim": 2, "branches": None, "eps_grid": [round(0.1 * i, 10) for i in range(11)],
        "restarts": 100, "steps": 2000, "penalty_weight": 1e3,
        "initial_temperature": 1.0, "cooling": 0.995, "step_size": 0.05,
        "refine_sweeps": 30, "refine_top": 3,
        "seed": 0, "threads": os.cpu_count() or 1, "output": None, "format": "csv",
    },
    "optimize": {
        "dim": 2, "branches": None, "eps": 0.5,
        "restarts": 100, "steps": 2000, "penalty_weight": 1e3,
        "initial_temperature": 1.0, "cooling": 0.995, "step_size": 0.05,
        "refine_sweeps": 30, "refine_top": 3,
        "seed": 0, "threads": os.cpu_count() or 1, "output": None,
    },
    "montecarlo": {
        "dim": 2, "eps": 0.5, "protocol": "dn", "samples": 100_000,
        "seed": 0, "threads": 1, "output": None,
    },
}


class UsageError(Exception):
    pass


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def _load_config(path: str | None, command: str) -> dict:
    if path is None:
        return {}
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise UsageError(f"cannot read config file: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise UsageError(f"config file is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise UsageError("config file must hold a JSON object")
    unknown = set(doc) - set(_DEFAULTS[command])
    if unknown:
        raise UsageError(
            f"unknown config keys for '{command}': {', '.join(sorted(unknown))}")
    return doc


def _resolve(command: str, args: argparse.Namespace) -> dict:
    cfg = dict(_DEFAULTS[command])
    cfg.update(_load_config(args.config, command))
    env_seed = os.environ.get(SEED_ENV)
    if env_seed is not None:
        try:
            cfg["seed"] = int(env_seed)
        except ValueError as exc:
            raise UsageError(f"{SEED_ENV} must be an integer") from exc
    for key in cfg:
        val = getattr(args, key, None)
        if val is not None:
            cfg[key] = val
    _validate(command, cfg)
    return cfg


def _validate(command: str, cfg: dict) -> None:
    if command in ("sweep", "optimize", "montecarlo"):
        if cfg["dim"] < 2:
            raise UsageError("dim must be >= 2")
    if command in ("sweep", "optimize"):
        if cfg["branches"] is None:
            cfg["branches"] = 2 if cfg["dim"] == 2 else cfg["dim"]
        if cfg["branches"] < 1:
            raise UsageError("branches must be >= 1")
        for key in ("restarts", "steps", "refine_top"):
            if cfg[key] < 1:
                raise UsageError(f"{key} must be >= 1")
        if cfg["refine_sweeps"] < 0:
            raise UsageError("refine_sweeps must be >= 0")
    if command == "sweep":
        grid = [float(e) for e in cfg["eps_grid"]]
        if not grid or any(not 0.0 <= e <= 1.0 for e in grid):
            raise UsageError("eps_grid values must lie in [0, 1]")
        cfg["eps_grid"] = grid
        if cfg["format"] not in ("csv", "json"):
            raise UsageError("format must be 'csv' or 'json'")
    if command in ("optimize", "montecarlo"):
        if not 0.0 <= cfg["eps"] <= 1.0:
            raise UsageError("eps must lie in [0, 1]")
    if command == "montecarlo" and cfg["samples"] < 1:
        raise UsageError("samples must be >= 1")
    if cfg.get("threads", 1) < 1:
        raise UsageError("threads must be >= 1")


def _anneal_config(cfg: dict) -> optimize.AnnealConfig:
    return optimize.AnnealConfig(
        penalty_weight=cfg["penalty_weight"], restarts=cfg["restarts"],
        steps=cfg["steps"], initial_temperature=cfg["initial_temperature"],
        cooling=cfg["cooling"], step_size=cfg["step_size"], seed=cfg["seed"],
        refine_sweeps=cfg["refine_sweeps"], refine_top=cfg["refine_top"])


def _write_text(path: str | None, text: str) -> None:
    if path is None:
        sys.stdout.write(text)
        return
    try:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise IOError(f"cannot write output: {exc}") from exc


def _cmd_verify(cfg: dict) -> int:
    results = verify.run_all(seed=cfg["seed"], quick=cfg["quick"],
                             threads=cfg["threads"])
    lines = []
    for r in results:
        status = "PASS" if r.passed else "FAIL"
        lines.append(f"{status}  {r.name}: residual {r.residual:.3e} "
                     f"(threshold {r.threshold:.3e})")
    report = {
        "config": cfg,
        "checks": [{"name": r.name, "residual": r.residual,
                    "threshold": r.threshold, "passed": r.passed}
                   for r in results],
        "all_passed": all(r.passed for r in results),
    }
    print("\n".join(lines))
    if cfg["output"] is not None:
        _write_text(cfg["output"], json.dumps(report, indent=2) + "\n")
    return EXIT_OK if report["all_passed"] else EXIT_CHECK


def _sweep_csv(cfg: dict, result: optimize.SweepResult) -> str:
    import io

    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(["epsilon", "best_F", "dn_F", "dr_F", "winner",
                     "penalty_residual", "restarts", "seed", "config"])
    config_json = json.dumps(cfg, sort_keys=True)
    for row in result:
        writer.writerow([_fmt(row.epsilon), _fmt(row.best_fidelity),
                         _fmt(row.dn_fidelity), _fmt(row.dr_fidelity),
                         row.winner, _fmt(row.penalty_residual),
                         cfg["restarts"], cfg["seed"], config_json])
    return buf.getvalue()


def _cmd_sweep(cfg: dict) -> int:
    result = optimize.sweep(_anneal_config(cfg), cfg["dim"], cfg["branches"],
                            cfg["eps_grid"], threads=cfg["threads"])
    if cfg["format"] == "csv":
        _write_text(cfg["output"], _sweep_csv(cfg, result))
    else:
        doc = {"config": cfg,
               "rows": [{"epsilon": r.epsilon, "best_F": r.best_fidelity,
                         "dn_F": r.dn_fidelity, "dr_F": r.dr_fidelity,
                         "winner": r.winner,
                         "penalty_residual": r.penalty_residual,
                         "restarts": cfg["restarts"], "seed": cfg["seed"]}
                        for r in result]}
        _write_text(cfg["output"], json.dumps(doc, indent=2) + "\n")
    return EXIT_OK


def _cmd_optimize(cfg: dict) -> int:
    res = optimize.anneal(_anneal_config(cfg), cfg["dim"], cfg["branches"],
                          cfg["eps"], threads=cfg["threads"])
    dn = optimize.dn_fidelity(cfg["eps"], cfg["dim"])
    dr = optimize.dr_fidelity(cfg["dim"])
    doc = {
        "config": cfg,
        "epsilon": cfg["eps"],
        "dim": cfg["dim"],
        "branches": cfg["branches"],
        "fidelity": res.fidelity,
        "penalty_residual": res.penalty_residual,
        "objective": res.objective_value,
        "dn_F": dn,
        "dr_F": dr,
        "winner": "both" if abs(dn - dr) < 1e-9 else ("DN" if dn > dr else "DR"),
        "protocol": protocols.protocol_to_json_dict(res.protocol),
    }
    _write_text(cfg["output"], json.dumps(doc, indent=2) + "\n")
    return EXIT_OK


def _named_protocol(name: str, d: int) -> protocols.Protocol:
    if name == "dn":
        return protocols.do_nothing_protocol(d)
    if name == "dr":
        return protocols.discriminate_reprepare_protocol(np.eye(d))
    try:
        return protocols.load_protocol(name)
    except OSError as exc:
        raise IOError(f"cannot read protocol file: {exc}") from exc
    except (KeyError, ValueError, json.JSONDecodeError) as exc:
        raise UsageError(f"malformed protocol file '{name}': {exc}") from exc


def _cmd_montecarlo(cfg: dict) -> int:
    proto = _named_protocol(cfg["protocol"], cfg["dim"])
    if proto.dim != cfg["dim"]:
        raise UsageError(
            f"protocol dimension {proto.dim} does not match dim={cfg['dim']}")
    protocols.validate_protocol(proto)
    noise = channels.depolarizing(cfg["eps"], cfg["dim"])
    exact = metrics.average_fidelity_exact(
        protocols.average_operation(proto, noise))
    rng = np.random.default_rng(cfg["seed"])
    est = metrics.average_fidelity_monte_carlo(proto, noise, cfg["samples"],
                                                rng)
    z = (est.mean - exact) / est.std_error if est.std_error > 0 else 0.0
    doc = {
        "config": cfg,
        "exact": exact,
        "estimate": est.mean,
        "std_error": est.std_error,
        "samples": est.samples,
        "z_score": z,
        "passed": abs(z) <= 5.0,
    }
    text = json.dumps(doc, indent=2) + "\n"
    if cfg["output"] is not None:
        _write_text(cfg["output"], text)
    print(f"exact {_fmt(exact)}  estimate {_fmt(est.mean)} "
          f"+- {_fmt(est.std_error)}  z {z:+.3f}")
    return EXIT_OK if doc["passed"] else EXIT_CHECK


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="JSON config file")
    p.add_argument("--seed", type=int, help="RNG seed")
    p.add_argument("--threads", type=int, help="parallel workers")
    p.add_argument("--output", help="output file path (default: stdout)")


def _add_anneal_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--dim", type=int, help="Hilbert-space dimension")
    p.add_argument("--branches", type=int, help="number of protocol branches")
    p.add_argument("--restarts", type=int)
    p.add_argument("--steps", type=int, help="annealing steps per restart")
    p.add_argument("--penalty-weight", dest="penalty_weight", type=float)
    p.add_argument("--initial-temperature", dest="initial_temperature",
                   type=float)
    p.add_argument("--cooling", type=float)
    p.add_argument("--step-size", dest="step_size", type=float)
    p.add_argument("--refine-sweeps", dest="refine_sweeps", type=int)
    p.add_argument("--refine-top", dest="refine_top", type=int)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="antepost",
        description="Noise-suppression protocol optimization for depolarizing "
                    "noise, with verification suites and simulation checks.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify", help="run the self-check suites")
    _add_common(p)
    p.add_argument("--quick", action="store_true", default=None,
                   help="reduced sample counts")

    p = sub.add_parser("sweep", help="optimize across a grid of noise strengths")
    _add_common(p)
    _add_anneal_flags(p)
    p.add_argument("--eps-grid", dest="eps_grid",
                   type=lambda s: [float(x) for x in s.split(",")],
                   help="comma-separated noise strengths in [0, 1]")
    p.add_argument("--format", choices=("csv", "json"))

    p = sub.add_parser("optimize", help="optimize a single noise strength")
    _add_common(p)
    _add_anneal_flags(p)
    p.add_argument("--eps", type=float, help="noise strength in [0, 1]")

    p = sub.add_parser("montecarlo",
                       help="Monte-Carlo cross-check of the exact fidelity")
    _add_common(p)
    p.add_argument("--dim", type=int)
    p.add_argument("--eps", type=float)
    p.add_argument("--protocol",
                   help="'dn', 'dr', or a path to a protocol JSON file")
    p.add_argument("--samples", type=int)

    return parser


_COMMANDS = {
    "verify": _cmd_verify,
    "sweep": _cmd_sweep,
    "optimize": _cmd_optimize,
    "montecarlo": _cmd_montecarlo,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = _resolve(args.command, args)
        return _COMMANDS[args.command](cfg)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except IOError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
