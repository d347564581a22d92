"""Command-line surface: verify scenarios, run sweeps, emit canonical reports.

Exit codes: 0 success; 1 expected-verdict mismatch or biconditional failure;
2 input error; 3 internal assertion failure.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor

from . import __version__
from .algebra import PolyParseError, check_axioms, parse_poly
from .beurling import (SynthesisObstruction, generator_criterion, synthesize,
                       verify_beurling)
from .corpus import (BUILTIN_NAMES, Scenario, build_subspace, example,
                     run_fuzz_case, verify_scenario)
from .decomposition import decompose_subspace
from .elements import Space
from .properties import (has_full_projection, is_invariant,
                         is_near_inner_decomposition, is_weakly_near_inner)
from .scenario_io import (SchemaError, axiom_report_dict, base_report,
                          canonical_json, decomposition_summary, parse_scenario,
                          parse_tolerances, property_report_dict, serialize_scenario,
                          synthesis_report, verdict_report)
from .tolerances import DEFAULT, Tolerances

_ENV_TOLERANCES = {
    "HARDYMOD_TOL_MEMBER": "member",
    "HARDYMOD_TOL_ORTH": "orth",
    "HARDYMOD_TOL_RANK": "rank",
    "HARDYMOD_TOL_DROP": "drop",
    "HARDYMOD_TOL_CLEAN": "clean",
    "HARDYMOD_TOL_FAIL": "fail",
}

EXIT_OK = 0
EXIT_MISMATCH = 1
EXIT_INPUT = 2
EXIT_INTERNAL = 3


def _env_tolerances(base: Tolerances) -> Tolerances:
    overrides = {}
    for var, field in _ENV_TOLERANCES.items():
        value = os.environ.get(var)
        if value is not None:
            try:
                overrides[field] = float(value)
            except ValueError:
                raise SchemaError(f"environment variable {var} is not a number: {value!r}")
    return base.with_overrides(**overrides) if overrides else base


def _tolerances_from_args(args) -> Tolerances:
    tol = _env_tolerances(DEFAULT)
    if getattr(args, "tol_mem", None) is not None:
        tol = tol.with_overrides(member=args.tol_mem)
    if getattr(args, "tol_orth", None) is not None:
        tol = tol.with_overrides(orth=args.tol_orth)
    return tol


def _load_scenario(args) -> tuple[Scenario, Tolerances]:
    tol = _tolerances_from_args(args)
    if getattr(args, "scenario", None):
        with open(args.scenario, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
        scenario = parse_scenario(doc)
        tol = parse_tolerances(doc.get("tolerances"), tol)
        return scenario, tol
    if getattr(args, "builtin", None):
        scenario = example(args.builtin, a=args.blaschke_a,
                           truncation_degree=args.degree)
        return scenario, tol
    raise SchemaError("no scenario given; use --scenario FILE or --builtin NAME")


def _emit(args, report: dict, started: float) -> None:
    if getattr(args, "timing", False):
        report["timing_seconds"] = round(time.perf_counter() - started, 6)
    text = canonical_json(report)
    if getattr(args, "output", None):
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _add_scenario_args(sub):
    sub.add_argument("--scenario", help="path to a scenario JSON file")
    sub.add_argument("--builtin", choices=BUILTIN_NAMES, help="built-in scenario name")
    sub.add_argument("--degree", type=int, default=None,
                     help="override the truncation degree N of a builtin")
    sub.add_argument("--blaschke-a", type=float, default=0.5,
                     help="Blaschke parameter for the builtins that use one")
    sub.add_argument("--tol-mem", type=float, default=None, help="membership tolerance")
    sub.add_argument("--tol-orth", type=float, default=None, help="orthogonality tolerance")
    sub.add_argument("--output", "-o", help="write the report here instead of stdout")
    sub.add_argument("--timing", action="store_true",
                     help="attach wall-clock timing (breaks byte-determinism)")


def _cmd_decompose(args) -> int:
    started = time.perf_counter()
    scenario, tol = _load_scenario(args)
    V, closure = build_subspace(scenario, tol)
    D = decompose_subspace(V, tol)
    report = base_report("decompose", scenario, tol, scenario.seed)
    report["decomposition"] = decomposition_summary(D)
    if closure is not None:
        report["closure_exact"] = closure.exact
    _emit(args, report, started)
    return EXIT_OK


_PROPERTY_FLAGS = ("invariant", "near-inner", "weak-near-inner", "full-projection",
                   "generator-criterion")


def _cmd_check(args) -> int:
    started = time.perf_counter()
    scenario, tol = _load_scenario(args)
    V, _ = build_subspace(scenario, tol)
    if args.property == "invariant":
        prop = is_invariant(V, tol)
    elif args.property == "generator-criterion":
        prop = generator_criterion(V, tol)
    else:
        D = decompose_subspace(V, tol)
        checker = {"near-inner": is_near_inner_decomposition,
                   "weak-near-inner": is_weakly_near_inner,
                   "full-projection": has_full_projection}[args.property]
        prop = checker(D, tol, boundary_level=scenario.boundary_level)
    report = base_report("check", scenario, tol, scenario.seed)
    report["property"] = property_report_dict(prop)
    _emit(args, report, started)
    return EXIT_OK


def _cmd_verify(args) -> int:
    started = time.perf_counter()
    scenario, tol = _load_scenario(args)
    verdict = verify_scenario(scenario, tol)
    report = base_report("verify", scenario, tol, scenario.seed)
    report.update(verdict_report(verdict))
    exit_code = EXIT_OK
    if verdict.biconditional_holds is False:
        exit_code = EXIT_MISMATCH
    if scenario.expected is not None and not verdict.abstained:
        matched = verdict.verdicts == scenario.expected.as_tuple()
        report["expected"] = list(scenario.expected.as_tuple())
        report["expected_match"] = matched
        if not matched:
            exit_code = EXIT_MISMATCH
    _emit(args, report, started)
    return exit_code


def _cmd_synthesize(args) -> int:
    started = time.perf_counter()
    scenario, tol = _load_scenario(args)
    V, _ = build_subspace(scenario, tol)
    D = decompose_subspace(V, tol)
    try:
        r = parse_poly(args.r, scenario.n)
    except PolyParseError as exc:
        raise SchemaError(f"--r: {exc}") from None
    try:
        level_str, index_str = args.h.split(",")
        level, index = int(level_str), int(index_str)
        h = D.component(level).vectors[index]
    except (ValueError, IndexError):
        raise SchemaError(f"--h: expected 'component,index' within the decomposition, "
                          f"got {args.h!r} (dims {list(D.dims)})") from None
    report = base_report("synthesize", scenario, tol, scenario.seed)
    report["h"] = {"component": level, "index": index}
    try:
        trace = synthesize(D, r, h, tol)
        report["synthesis"] = synthesis_report(trace)
        report["obstruction"] = None
    except SynthesisObstruction as exc:
        report["synthesis"] = None
        report["obstruction"] = {"level": exc.level, "residual": exc.residual}
    _emit(args, report, started)
    return EXIT_OK


def _cmd_axioms(args) -> int:
    started = time.perf_counter()
    tol = _tolerances_from_args(args)
    space = Space(n=args.n, d=args.dim, N=args.degree)
    result = check_axioms(space, seed=args.seed, samples=args.samples)
    report = base_report("axioms", None, tol, args.seed)
    report["space"] = {"n": space.n, "d": space.d, "N": space.N}
    report["axioms"] = axiom_report_dict(result)
    _emit(args, report, started)
    return EXIT_OK if result.passed else EXIT_MISMATCH


def _parse_seed_range(text: str) -> list[int]:
    if ":" in text:
        lo, hi = text.split(":", 1)
        return list(range(int(lo), int(hi) + 1))
    return [int(text)]


def _fuzz_worker(payload):
    seed, overrides = payload
    outcome = run_fuzz_case(seed, **overrides)
    return {
        "seed": seed,
        "name": outcome.scenario.name,
        "space": {"n": outcome.scenario.n, "d": outcome.scenario.d,
                  "N": outcome.scenario.N},
        "verdicts": list(outcome.verdicts),
        "biconditional": outcome.biconditional,
        "expected_match": outcome.expected_match,
    }


def _cmd_fuzz(args) -> int:
    started = time.perf_counter()
    tol = _tolerances_from_args(args)
    seeds = _parse_seed_range(args.seeds)
    overrides = {}
    if args.n is not None:
        overrides["n"] = args.n
    if args.dim is not None:
        overrides["d"] = args.dim
    if args.degree is not None:
        overrides["N"] = args.degree
    if args.invariant == "only":
        overrides["invariant"] = True
    elif args.invariant == "none":
        overrides["invariant"] = False
    payloads = [(seed, overrides) for seed in seeds]
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            results = list(pool.map(_fuzz_worker, payloads))
    else:
        results = [_fuzz_worker(p) for p in payloads]
    failures = [r for r in results if r["biconditional"] is False]
    mismatches = [r for r in results if r["expected_match"] is False]
    abstained = [r for r in results if r["biconditional"] is None]
    report = base_report("fuzz", None, tol)
    report["seeds"] = {"start": seeds[0], "stop": seeds[-1], "count": len(seeds)}
    report["summary"] = {
        "cases": len(results),
        "biconditional_failures": len(failures),
        "expected_mismatches": len(mismatches),
        "abstained": len(abstained),
    }
    report["counterexamples"] = failures + mismatches
    _emit(args, report, started)
    return EXIT_MISMATCH if failures or mismatches else EXIT_OK


def _cmd_corpus(args) -> int:
    started = time.perf_counter()
    tol = _tolerances_from_args(args)
    rows = []
    all_match = True
    for name in BUILTIN_NAMES:
        scenario = example(name)
        verdict = verify_scenario(scenario, tol)
        matched = (not verdict.abstained
                   and verdict.verdicts == scenario.expected.as_tuple())
        all_match &= matched
        rows.append({
            "name": name,
            "expected": list(scenario.expected.as_tuple()),
            "verdicts": list(verdict.verdicts),
            "biconditional": verdict.biconditional_holds,
            "match": matched,
        })
    report = base_report("corpus", None, tol)
    report["entries"] = rows
    report["all_match"] = all_match
    _emit(args, report, started)
    return EXIT_OK if all_match else EXIT_MISMATCH


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hardymod",
        description="Graded decompositions and invariance verification for "
                    "truncated Hardy-space Hilbert modules")
    parser.add_argument("--version", action="version", version=f"hardymod {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("decompose", help="valuation series and component dimensions")
    _add_scenario_args(p)
    p.set_defaults(func=_cmd_decompose)

    p = sub.add_parser("check", help="run a single property checker")
    _add_scenario_args(p)
    p.add_argument("--property", required=True, choices=_PROPERTY_FLAGS)
    p.set_defaults(func=_cmd_check)

    p = sub.add_parser("verify", help="full theorem verdict for one scenario")
    _add_scenario_args(p)
    p.set_defaults(func=_cmd_verify)

    p = sub.add_parser("synthesize", help="resynthesize r*h inside the subspace")
    _add_scenario_args(p)
    p.add_argument("--r", required=True, help="multiplier polynomial literal, e.g. 'z1^2*z2'")
    p.add_argument("--h", required=True, help="component vector as 'component,index'")
    p.set_defaults(func=_cmd_synthesize)

    p = sub.add_parser("axioms", help="sampled valuation-axiom report")
    p.add_argument("--n", type=int, default=2)
    p.add_argument("--dim", type=int, default=1, help="coefficient dimension d")
    p.add_argument("--degree", type=int, default=6, help="truncation degree N")
    p.add_argument("--samples", type=int, default=500)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--tol-mem", type=float, default=None)
    p.add_argument("--tol-orth", type=float, default=None)
    p.add_argument("--output", "-o")
    p.add_argument("--timing", action="store_true")
    p.set_defaults(func=_cmd_axioms)

    p = sub.add_parser("fuzz", help="seeded scenario sweep asserting the biconditional")
    p.add_argument("--seeds", required=True, help="seed range 'start:stop' (inclusive)")
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--dim", type=int, default=None)
    p.add_argument("--degree", type=int, default=None)
    p.add_argument("--invariant", choices=("mixed", "only", "none"), default="mixed")
    p.add_argument("--jobs", type=int, default=1, help="parallel worker processes")
    p.add_argument("--tol-mem", type=float, default=None)
    p.add_argument("--tol-orth", type=float, default=None)
    p.add_argument("--output", "-o")
    p.add_argument("--timing", action="store_true")
    p.set_defaults(func=_cmd_fuzz)

    p = sub.add_parser("corpus", help="verify every builtin against its expected verdicts")
    p.add_argument("--tol-mem", type=float, default=None)
    p.add_argument("--tol-orth", type=float, default=None)
    p.add_argument("--output", "-o")
    p.add_argument("--timing", action="store_true")
    p.set_defaults(func=_cmd_corpus)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (SchemaError, PolyParseError, FileNotFoundError, json.JSONDecodeError) as exc:
        print(f"hardymod: input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except ValueError as exc:
        print(f"hardymod: input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except Exception as exc:  # internal assertion surface
        print(f"hardymod: internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
