"""Command-line entry point: ``fibdistill {compile,distill,verify}``.

Exit codes: 0 success, 1 verification failure, 2 usage or configuration error.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import os
import sys
import tempfile
from pathlib import Path

import numpy as np

from . import __version__
from .anyons import ONE, TAU, enumerate_basis
from .braids import (BraidWord, SectorUnitary, artin_defect, first_non_weave_crossing,
                     induced_permutation, is_pure, projective_distance, weave_trajectory,
                     word_unitary)
from .compiler.primitives import NOT, TARGETS, CompilerConfig, not_sector, weave_sector
from .compiler.sk import CompileError
from .distill import (ProtocolError, RegionLayout, SimulationLimit, pair_creation_ensemble,
                      run_protocol)

SCHEMA_VERSION = 1
EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2

log = logging.getLogger("fibdistill")


class ConfigError(ValueError):
    pass


def atomic_write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def dumps(record: dict) -> str:
    return json.dumps(record, sort_keys=True, allow_nan=True)


def error_record(kind: str, message: str, **extra) -> int:
    print(dumps({"schemaVersion": SCHEMA_VERSION, "error": kind, "message": message, **extra}),
          file=sys.stderr)
    return EXIT_USAGE if kind in ("usage", "config") else EXIT_FAIL


# ---------------------------------------------------------------------------
# compile


def cmd_compile(args) -> int:
    if not (args.epsilon > 0 and math.isfinite(args.epsilon)):
        return error_record("usage", f"--epsilon must be positive, got {args.epsilon}")
    config = CompilerConfig()
    try:
        result = TARGETS[args.target](args.epsilon, config)
    except CompileError as exc:
        return error_record("compile", str(exc), target=args.target, requestedEpsilon=args.epsilon)
    out = Path(args.out)
    atomic_write(out, result.word.to_text())
    constraint = "purebraid" if args.target == "not-purebraid" else "weave(3,1)"
    record = {
        "schemaVersion": SCHEMA_VERSION,
        "target": args.target,
        "constraint": constraint,
        "requestedEpsilon": args.epsilon,
        "achievedEpsilon": result.achieved_epsilon,
        "wordLength": result.word_length,
        "skDepth": result.sk_depth,
        "depthErrors": list(result.depth_errors),
        "depthLengths": list(result.depth_lengths),
        "netParameters": config.net_parameters(args.target),
        "wordPath": out.name,
    }
    atomic_write(meta_path(out), dumps(record) + "\n")
    log.info("wrote %s (%d crossings, eps %.3g)", out, result.word_length, result.achieved_epsilon)
    print(dumps(record))
    return EXIT_OK if result.achieved_epsilon <= args.epsilon else EXIT_FAIL


def meta_path(out: Path) -> Path:
    return out.with_name(out.name + ".meta.jsonl")


# ---------------------------------------------------------------------------
# distill

CONFIG_KEYS = {"k", "m", "p", "epsilon", "bWordPath", "wWordPath", "seed", "sampleCount"}


def load_config(path: Path) -> dict:
    try:
        cfg = json.loads(path.read_text())
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from None
    if not isinstance(cfg, dict):
        raise ConfigError("config must be a JSON object")
    unknown = set(cfg) - CONFIG_KEYS
    if unknown:
        raise ConfigError(f"unknown config keys: {', '.join(sorted(unknown))}")
    missing = {"k", "m", "p", "bWordPath", "wWordPath"} - set(cfg)
    if missing:
        raise ConfigError(f"missing config keys: {', '.join(sorted(missing))}")
    p = cfg["p"]
    if not isinstance(p, (int, float)) or not 0 <= p <= 1:
        raise ConfigError(f"p must lie in [0, 1], got {p!r}")
    for key in ("k", "m"):
        if not isinstance(cfg[key], int) or cfg[key] < 1:
            raise ConfigError(f"{key} must be a positive integer")
    m = cfg["m"]
    if m < 2 or m & (m - 1):
        raise ConfigError(f"m must be a power of two >= 2, got {m}")
    eps = cfg.get("epsilon")
    if eps is not None and not (isinstance(eps, (int, float)) and eps > 0):
        raise ConfigError(f"epsilon must be positive, got {eps!r}")
    cfg.setdefault("seed", 0)
    cfg.setdefault("sampleCount", 10_000)
    base = path.parent
    for key in ("bWordPath", "wWordPath"):
        wp = Path(cfg[key])
        cfg[key] = wp if wp.is_absolute() else base / wp
        if not cfg[key].exists():
            raise ConfigError(f"word file not found: {cfg[key]}")
    return cfg


def cmd_distill(args) -> int:
    try:
        cfg = load_config(Path(args.config))
        b = BraidWord.load(cfg["bWordPath"])
        w = BraidWord.load(cfg["wWordPath"])
    except ConfigError as exc:
        return error_record("config", str(exc))
    except ValueError as exc:
        return error_record("config", f"cannot parse word file: {exc}")
    seed = args.seed if args.seed is not None else cfg["seed"]
    layout = RegionLayout(cfg["k"], cfg["m"])
    ensemble = pair_creation_ensemble(layout, cfg["p"], samples=cfg["sampleCount"], seed=seed)
    try:
        report = run_protocol(ensemble, layout, b, w, jobs=args.jobs)
    except ProtocolError as exc:
        return error_record("structure", str(exc), failures=str(exc).split("; "))
    except SimulationLimit as exc:
        return error_record("config", str(exc))
    record = report.to_dict()
    record["config"] = {
        "k": cfg["k"], "m": cfg["m"], "p": cfg["p"], "epsilon": cfg.get("epsilon"),
        "seed": seed, "sampleCount": cfg["sampleCount"], "exactEnsemble": ensemble.exact,
        "bWordPath": Path(cfg["bWordPath"]).name, "wWordPath": Path(cfg["wWordPath"]).name,
    }
    record["ensembleWeightInSupport"] = ensemble.weight_in_support()
    record["ensembleWeightExpected"] = (1 - (1 - cfg["p"]) ** cfg["m"]) ** cfg["k"]
    out = Path(args.out)
    atomic_write(out / "report.jsonl", dumps(record) + "\n")
    atomic_write(out / "summary.txt", report.summary())
    csv = ["level,cable_width,composite_exchanges,elementary_crossings,leakage_mean,leakage_max"]
    csv += [f"{lv.level},{lv.cable_width},{lv.composite_exchanges},{lv.elementary_crossings},"
            f"{lv.leakage_mean!r},{lv.leakage_max!r}" for lv in report.levels]
    atomic_write(out / "leakage.csv", "\n".join(csv) + "\n")
    sys.stdout.write(report.summary())
    return EXIT_OK if report.within_budget else EXIT_FAIL


# ---------------------------------------------------------------------------
# verify


def _verify_artin(word: BraidWord, out: list[str]) -> bool:
    ok = True
    for charge in (ONE, TAU):
        d = artin_defect(word.strands, charge)
        out.append(f"artin defect (N={word.strands}, charge={charge.symbol}): {d:.3e}")
        ok &= d <= 1e-12
    return ok


def _verify_unitarity(word: BraidWord, out: list[str]) -> bool:
    ok = True
    for charge in (ONE, TAU):
        basis = enumerate_basis(word.strands, charge)
        if len(basis) == 0:
            continue
        d = word_unitary(word, basis).unitarity_defect()
        out.append(f"unitarity defect (charge={charge.symbol}, dim={len(basis)}): {d:.3e}")
        ok &= d <= 1e-9
    return ok


def _verify_purebraid(word: BraidWord, out: list[str]) -> bool:
    perm = induced_permutation(word)
    pure = is_pure(word)
    out.append(f"induced permutation: {' '.join(str(p + 1) for p in perm)}")
    out.append("identity permutation confirmed" if pure else "not a pure braid")
    if pure and word.strands == 4:
        for leaves in ("tt11", "11tt"):
            basis = enumerate_basis(4, ONE, [TAU if c == "t" else ONE for c in leaves])
            u = word_unitary(word, basis).matrix[0, 0]
            out.append(f"sector {leaves}: |phase| = {abs(u):.12f}, arg = {np.angle(u):+.6f}")
    return pure


def _verify_weave(word: BraidWord, out: list[str]) -> bool:
    traj = weave_trajectory(word, word.strands)
    if traj is None:
        k = first_non_weave_crossing(word, word.strands)
        i, s = word.crossings[k]
        out.append(f"not a weave: crossing {k + 1} ({'s' if s > 0 else 'S'}{i}, file line {k + 2}) "
                   f"does not involve the warp")
        return False
    out.append(f"warp trajectory {traj[0]} -> {traj[-1]} over {len(word)} crossings")
    if traj[-1] != 1:
        out.append("weave does not end at position 1")
        return False
    return True


def _verify_target(word: BraidWord, out: list[str], epsilon: float | None) -> bool:
    if word.strands == 4:
        basis = not_sector()
        d = projective_distance(word_unitary(word, basis), SectorUnitary(basis, NOT))
        out.append(f"projective distance to NOT on V4: {d:.6e}")
    elif word.strands == 3:
        basis = weave_sector()
        d = projective_distance(word_unitary(word, basis), SectorUnitary(basis, np.eye(2)))
        out.append(f"projective distance to identity on V3^tau: {d:.6e}")
    else:
        out.append(f"no compile target defined for {word.strands} strands")
        return False
    return epsilon is None or d <= epsilon


def cmd_verify(args) -> int:
    try:
        word = BraidWord.load(args.word)
    except FileNotFoundError:
        return error_record("usage", f"word file not found: {args.word}")
    except ValueError as exc:
        return error_record("parse", f"{args.word}: {exc}")
    out: list[str] = []
    try:
        if args.check == "target":
            ok = _verify_target(word, out, args.epsilon)
        else:
            ok = {"artin": _verify_artin, "unitarity": _verify_unitarity,
                  "purebraid": _verify_purebraid, "weave": _verify_weave}[args.check](word, out)
    except ValueError as exc:
        out.append(f"check failed: {exc}")
        ok = False
    print("\n".join(out))
    print(f"{args.check}: {'PASS' if ok else 'FAIL'}")
    return EXIT_OK if ok else EXIT_FAIL


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="fibdistill", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    ap.add_argument("--verbose", "-v", action="count", default=0)
    sub = ap.add_subparsers(dest="command", required=True)

    c = sub.add_parser("compile", help="compile a protocol primitive to a braid-word file")
    c.add_argument("target", choices=sorted(TARGETS))
    c.add_argument("--epsilon", type=float, required=True)
    c.add_argument("--out", required=True, help="braid-word file to write")
    c.set_defaults(func=cmd_compile)

    d = sub.add_parser("distill", help="run the distillation protocol from a JSON config")
    d.add_argument("--config", required=True)
    d.add_argument("--out", required=True, help="output directory")
    d.add_argument("--seed", type=int, default=None, help="overrides the config seed")
    d.add_argument("--jobs", type=int, default=1)
    d.set_defaults(func=cmd_distill)

    v = sub.add_parser("verify", help="run an invariant check on a braid-word file")
    v.add_argument("word")
    v.add_argument("--check", required=True,
                   choices=["artin", "unitarity", "purebraid", "weave", "target"])
    v.add_argument("--epsilon", type=float, default=None,
                   help="threshold for --check target")
    v.set_defaults(func=cmd_verify)
    return ap


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2),
                        format="%(levelname)s %(name)s: %(message)s")
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
