"""Scenario file parsing, serialization, and report assembly.

The scenario document is JSON with complex numbers as [re, im] pairs:

    {
      "version": 1,
      "space": {"n": 2, "d": 1, "N": 4},
      "generators": [
        [{"exponents": [1, 0], "coefficient": [[1.0, 0.0]]}],
        [{"exponents": [0, 1], "coefficient": [[1.0, 0.0]]}]
      ],
      "closure_mode": "module",
      "acting_algebra": "full",
      "tolerances": {"member": 1e-8},
      "seed": 7,
      "boundary_level": 4
    }

or, instead of space/generators, a builtin reference:

    {"version": 1, "builtin": {"name": "ex7.4", "params": {"a": 0.5, "N": 24}}}

Reports are canonical JSON (sorted keys, full-precision floats) and are
byte-identical across runs for a fixed scenario, tolerance set, and seed;
wall-clock timing is attached only on request to keep that true.
"""
from __future__ import annotations

import json
from dataclasses import fields as dataclass_fields
from typing import Any

import numpy as np

from . import __version__
from .algebra import AxiomReport
from .beurling import SynthesisTrace, TheoremVerdict
from .corpus import BUILTIN_NAMES, ExpectedVerdicts, Scenario, example
from .decomposition import GradedDecomposition
from .elements import Element, Space
from .properties import PropertyReport
from .tolerances import DEFAULT, Tolerances

SCHEMA_VERSION = 1
WITNESS_CAP = 500

_TOLERANCE_KEYS = tuple(f.name for f in dataclass_fields(Tolerances))


class SchemaError(ValueError):
    """Scenario document violates the schema; the message names the field."""


def _require(cond: bool, where: str, message: str):
    if not cond:
        raise SchemaError(f"{where}: {message}")


def _as_complex(value, where: str) -> complex:
    _require(isinstance(value, (list, tuple)) and len(value) == 2, where,
             "complex numbers are [re, im] pairs")
    re_part, im_part = value
    _require(isinstance(re_part, (int, float)) and isinstance(im_part, (int, float)),
             where, "complex parts must be numbers")
    return complex(re_part, im_part)


def _parse_generator(space: Space, terms, index: int) -> Element:
    where = f"generators[{index}]"
    _require(isinstance(terms, list) and terms, where, "generator must be a nonempty term list")
    data = {}
    for t, term in enumerate(terms):
        twhere = f"{where}[{t}]"
        _require(isinstance(term, dict), twhere, "term must be an object")
        exponents = term.get("exponents")
        _require(isinstance(exponents, list), twhere, "missing exponent list")
        _require(len(exponents) == space.n, twhere,
                 f"exponent arity {len(exponents)} != n = {space.n}")
        _require(all(isinstance(e, int) and e >= 0 for e in exponents), twhere,
                 "exponents must be nonnegative integers")
        _require(sum(exponents) <= space.N, twhere,
                 f"term degree {sum(exponents)} exceeds N = {space.N}")
        coeff = term.get("coefficient")
        _require(isinstance(coeff, list) and len(coeff) == space.d, twhere,
                 f"coefficient vector must have length d = {space.d}")
        vec = np.array([_as_complex(c, twhere) for c in coeff])
        key = tuple(exponents)
        data[key] = data.get(key, 0) + vec
    return Element.from_terms(space, data)


def parse_scenario(document: dict | str) -> Scenario:
    """Validate a scenario document and build the Scenario, defaults applied."""
    if isinstance(document, str):
        try:
            document = json.loads(document)
        except json.JSONDecodeError as exc:
            raise SchemaError(f"document: invalid JSON ({exc})") from None
    _require(isinstance(document, dict), "document", "must be a JSON object")
    version = document.get("version")
    _require(version == SCHEMA_VERSION, "version",
             f"unrecognized version {version!r} (expected {SCHEMA_VERSION})")

    builtin = document.get("builtin")
    if builtin is not None:
        _require(isinstance(builtin, dict), "builtin", "must be an object")
        name = builtin.get("name")
        _require(isinstance(name, str), "builtin.name", "missing builtin name")
        params = builtin.get("params", {})
        _require(isinstance(params, dict), "builtin.params", "must be an object")
        kwargs = {}
        if "a" in params:
            a = params["a"]
            kwargs["a"] = complex(a) if isinstance(a, (int, float)) else _as_complex(a, "builtin.params.a")
        if "N" in params:
            _require(isinstance(params["N"], int), "builtin.params.N", "must be an integer")
            kwargs["truncation_degree"] = params["N"]
        try:
            scenario = example(name, **kwargs)
        except ValueError as exc:
            raise SchemaError(f"builtin: {exc}") from None
        return scenario

    space_doc = document.get("space")
    _require(isinstance(space_doc, dict), "space", "missing space block")
    for key in ("n", "d", "N"):
        _require(isinstance(space_doc.get(key), int), f"space.{key}", "must be an integer")
    try:
        space = Space(n=space_doc["n"], d=space_doc["d"], N=space_doc["N"])
    except ValueError as exc:
        raise SchemaError(f"space: {exc}") from None

    generators_doc = document.get("generators")
    _require(isinstance(generators_doc, list) and generators_doc,
             "generators", "need a nonempty generator list")
    generators = tuple(_parse_generator(space, g, i) for i, g in enumerate(generators_doc))

    closure_mode = document.get("closure_mode", "linear")
    _require(closure_mode in ("linear", "module"), "closure_mode",
             "must be 'linear' or 'module'")
    acting = document.get("acting_algebra", "full")
    _require(acting in ("full", "vanishing_at_zero"), "acting_algebra",
             "must be 'full' or 'vanishing_at_zero'")
    seed = document.get("seed")
    _require(seed is None or isinstance(seed, int), "seed", "must be an integer")
    boundary = document.get("boundary_level")
    _require(boundary is None or isinstance(boundary, int), "boundary_level",
             "must be an integer")

    note = str(document.get("note", ""))
    if closure_mode == "module":
        worst = max(g.support_degree for g in generators)
        if worst > space.N - 1:
            note = (note + "; " if note else "") + (
                f"warning: generator degree {worst} leaves no exact multiplication headroom")

    expected = None
    exp_doc = document.get("expected")
    if exp_doc is not None:
        _require(isinstance(exp_doc, list) and len(exp_doc) == 3, "expected",
                 "must be a [invariant, near_inner, full_projection] triple")
        _require(all(v in ("pass", "fail") for v in exp_doc), "expected",
                 "entries must be 'pass' or 'fail'")
        expected = ExpectedVerdicts(*exp_doc)

    return Scenario(name=str(document.get("name", "scenario")),
                    n=space.n, d=space.d, N=space.N, generators=generators,
                    closure_mode=closure_mode, acting_algebra=acting,
                    expected=expected, boundary_level=boundary, seed=seed, note=note)


def parse_tolerances(document: dict | None, base: Tolerances = DEFAULT) -> Tolerances:
    if not document:
        return base
    _require(isinstance(document, dict), "tolerances", "must be an object")
    overrides = {}
    for key, value in document.items():
        _require(key in _TOLERANCE_KEYS, f"tolerances.{key}", "unknown tolerance")
        _require(isinstance(value, (int, float)) or value is None,
                 f"tolerances.{key}", "must be a number")
        overrides[key] = value
    return base.with_overrides(**overrides)


# ---------------------------------------------------------------------------
# Serialization
# ---------------------------------------------------------------------------

def _element_terms(e: Element) -> list[dict]:
    return [{"exponents": list(m), "coefficient": [[c.real, c.imag] for c in vec]}
            for m, vec in e.terms()]


def serialize_scenario(scenario: Scenario) -> dict:
    doc: dict[str, Any] = {
        "version": SCHEMA_VERSION,
        "name": scenario.name,
        "space": {"n": scenario.n, "d": scenario.d, "N": scenario.N},
        "generators": [_element_terms(g) for g in scenario.generators],
        "closure_mode": scenario.closure_mode,
        "acting_algebra": scenario.acting_algebra,
    }
    if scenario.expected is not None:
        doc["expected"] = list(scenario.expected.as_tuple())
    if scenario.boundary_level is not None:
        doc["boundary_level"] = scenario.boundary_level
    if scenario.seed is not None:
        doc["seed"] = scenario.seed
    if scenario.note:
        doc["note"] = scenario.note
    return doc


def canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2, allow_nan=False) + "\n"


def _tolerances_dict(tol: Tolerances) -> dict:
    return {name: getattr(tol, name) for name in _TOLERANCE_KEYS}


def _scenario_echo(scenario: Scenario) -> dict:
    echo = serialize_scenario(scenario)
    # generator tables can be large; the echo keeps counts plus the name
    echo["generators"] = {"count": len(scenario.generators)}
    return echo


def base_report(command: str, scenario: Scenario | None, tolerances: Tolerances,
                seed: int | None = None) -> dict:
    report: dict[str, Any] = {
        "tool": {"name": "hardymod", "version": __version__},
        "command": command,
        "tolerances": _tolerances_dict(tolerances),
    }
    if scenario is not None:
        report["scenario"] = _scenario_echo(scenario)
    if seed is not None:
        report["seed"] = seed
    return report


def decomposition_summary(D: GradedDecomposition) -> dict:
    return {
        "dim": D.subspace.dim,
        "dims": list(D.dims),
        "series_dims": [s.dim for s in D.series],
        "gram_residual": max([D.subspace.gram_residual]
                             + [w.gram_residual for w in D.components]),
    }


def property_report_dict(report: PropertyReport) -> dict:
    return report.to_dict(witness_cap=WITNESS_CAP)


def verdict_report(verdict: TheoremVerdict) -> dict:
    return {
        "decomposition": decomposition_summary(verdict.decomposition),
        "properties": {
            "invariant": property_report_dict(verdict.invariant),
            "near_inner": property_report_dict(verdict.near_inner),
            "full_projection": property_report_dict(verdict.full_projection),
        },
        "verdicts": list(verdict.verdicts),
        "biconditional_holds": verdict.biconditional_holds,
        "counterexample": verdict.counterexample,
    }


def synthesis_report(trace: SynthesisTrace) -> dict:
    return {
        "r": trace.r.to_string(),
        "g_series": [_element_terms(g) for g in trace.g_series],
        "residual_orders": [None if o == float("inf") else int(o)
                            for o in trace.residual_orders],
        "partial_norms_sq": list(trace.partial_norms_sq),
        "product_norm_sq": trace.product_norm_sq,
        "final_residual": trace.final_residual,
        "conditioning_warnings": list(trace.conditioning_warnings),
    }


def axiom_report_dict(report: AxiomReport) -> dict:
    return report.to_dict()
