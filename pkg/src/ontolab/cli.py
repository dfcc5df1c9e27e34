"""Command-line front end.

Exit codes: 0 when the checked statement holds, 1 when it fails (a witness
or certificate is printed), 2 for unreadable or invalid input.
"""

from __future__ import annotations

import argparse
import hashlib
import sys
import time
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Any, Callable

from . import builtins, serialize
from .canonical import canonicalize, operationally_equivalent
from .empirical import (EmpiricalModel, Feasible, from_ontological, is_no_signalling,
                        local_realizability, quasi_local_decomposition)
from .errors import NotLocalError, OntolabError
from .numeric import ZERO, format_rational
from .ontology import (bayesian_inversion, classify_property, hs_ontic_by_supports, is_deterministic,
                       is_factorisable, is_local, is_parameter_independent)
from .preparation import is_no_preparation_signalling, is_preparation_independent, steering_incompatibility
from .quantum import bell_model, check_observable_epistemicity, qubit_model, steering_ensembles
from .serialize import SchemaError, describe

EXIT_HOLDS, EXIT_FAILS, EXIT_INPUT = 0, 1, 2


class InputError(Exception):
    """Raised for anything that should exit with code 2."""

    def __init__(self, message: str, location: str | None = None) -> None:
        super().__init__(message)
        self.location = location


@dataclass
class Report:
    command: str
    digest: str
    verdict: str
    holds: bool
    payload: dict[str, Any] = field(default_factory=dict)
    elapsed: float = 0.0

    @property
    def exit_code(self) -> int:
        return EXIT_HOLDS if self.holds else EXIT_FAILS

    def to_json(self) -> dict[str, Any]:
        return {"command": self.command, "input_sha256": self.digest, "verdict": self.verdict,
                "holds": self.holds, "payload": self.payload, "elapsed_seconds": round(self.elapsed, 6)}

    def render(self) -> str:
        lines = [f"command: {self.command}", f"input:   sha256:{self.digest}", f"verdict: {self.verdict}"]
        for key, value in self.payload.items():
            text = value if isinstance(value, str) else serialize.dumps(value).rstrip()
            lines.append(f"{key}: {text}")
        lines.append(f"time:    {self.elapsed:.4f} s")
        return "\n".join(lines)


# --- input ------------------------------------------------------------------

def _read(path: str) -> tuple[str, str, Any]:
    try:
        data = Path(path).read_bytes()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from exc
    digest = hashlib.sha256(data).hexdigest()
    kind, obj = serialize.load(path)
    return digest, kind, obj


def _expect(kind: str, allowed: tuple[str, ...], check: str) -> None:
    if kind not in allowed:
        raise InputError(f"check {check!r} needs a {' or '.join(allowed)} file, got {kind}")


def _model(kind: str, obj: Any, check: str):
    _expect(kind, ("model", "canonical"), check)
    return obj.model if kind == "canonical" else obj


def _empirical(kind: str, obj: Any, check: str) -> EmpiricalModel:
    _expect(kind, ("empirical", "model", "canonical"), check)
    if kind == "empirical":
        return obj
    return from_ontological(_model(kind, obj, check))


def _preps(e: EmpiricalModel, prep: str | None) -> list:
    if prep is None:
        return list(e.preparations)
    for p in e.preparations:
        if str(p) == prep:
            return [p]
    raise InputError(f"unknown preparation {prep!r}; the file declares {[str(p) for p in e.preparations]}")


def _failure(result) -> dict[str, Any]:
    return {"reason": result.reason, "witness": describe(result.witness)}


# --- checks -----------------------------------------------------------------

def _check_classify(kind, obj, args):
    _expect(kind, ("property",), "classify-property")
    c = classify_property(obj[0])
    if c.is_ontic:
        return True, "Ontic", {"generator": describe(c.generator)}
    return False, "Epistemic", {"witness": describe(c.witness)}


def _check_hs(kind, obj, args):
    _expect(kind, ("property",), "hs-supports")
    prop, prior = obj
    result = hs_ontic_by_supports(prop, prior)
    posteriors = {str(v): (None if d is None else serialize.weights_to_json(d))
                  for v, d in bayesian_inversion(prop, prior).items()}
    payload = {"posteriors": posteriors}
    if result:
        return True, "Ontic", payload
    return False, "Epistemic", {**_failure(result), **payload}


def _model_check(name: str, fn: Callable, ok_label: str, bad_label: str):
    def run(kind, obj, args):
        result = fn(_model(kind, obj, name))
        if result:
            payload = {}
            if isinstance(result.value, dict):
                payload["generators"] = {str(m): describe(classify_property(f).generator)
                                         for m, f in result.value.items()}
            return True, ok_label, payload
        return False, bad_label, _failure(result)
    return run


def _check_no_signalling(kind, obj, args):
    e = _empirical(kind, obj, "no-signalling")
    result = is_no_signalling(e)
    if result:
        return True, "no-signalling", {}
    return False, "signalling", _failure(result)


def _realizations(e: EmpiricalModel, prep: str | None) -> tuple[bool, list]:
    results = [local_realizability(e, p) for p in _preps(e, prep)]
    return all(isinstance(r, Feasible) for r in results), results


def _check_realizable(kind, obj, args):
    e = _empirical(kind, obj, "local-realizable")
    holds, results = _realizations(e, args.prep)
    return holds, "Feasible" if holds else "Infeasible", \
        {"results": [serialize.realization_to_json(r) for r in results]}


def _check_quasi(kind, obj, args):
    e = _empirical(kind, obj, "quasi-decompose")
    out = {}
    for p in _preps(e, args.prep):
        result = quasi_local_decomposition(e, p)
        if not result:
            return False, "no signed decomposition", _failure(result)
        w = result.value
        out[str(p)] = {"weights": serialize.signed_to_json(w),
                       "negative_mass": format_rational(-sum(w.negative_part.values(), ZERO))}
    return True, "decomposed", {"decompositions": out}


def _theory_check(name: str, fn: Callable, label: str):
    def run(kind, obj, args):
        _expect(kind, ("theory",), name)
        result = fn(obj)
        if result:
            return True, f"{label}: true", {}
        return False, f"{label}: false", _failure(result)
    return run


def _steering_payload(v) -> dict[str, Any]:
    payload = {"disjoint_supports": v.disjoint, "mixtures_equal": v.mixtures_equal,
               "mixtures": [serialize.weights_to_json(m) for m in v.mixtures]}
    if v.overlap is not None:
        payload["overlap"] = describe(v.overlap)
    return payload


def _steering_verdict(v) -> str:
    return f"Contradiction({v.reason})" if v.contradiction else "Consistent"


def _check_steering(kind, obj, args):
    _expect(kind, ("steering",), "steering")
    v = steering_incompatibility(*obj)
    return bool(v), _steering_verdict(v), _steering_payload(v)


CHECKS: dict[str, Callable] = {
    "classify-property": _check_classify,
    "hs-supports": _check_hs,
    "deterministic": _model_check("deterministic", is_deterministic, "deterministic", "not deterministic"),
    "parameter-independent": _model_check("parameter-independent", is_parameter_independent,
                                          "parameter independent", "not parameter independent"),
    "local": _model_check("local", is_local, "local", "not local"),
    "factorisable": _model_check("factorisable", is_factorisable, "factorisable", "not factorisable"),
    "no-signalling": _check_no_signalling,
    "local-realizable": _check_realizable,
    "quasi-decompose": _check_quasi,
    "prep-independent": _theory_check("prep-independent", is_preparation_independent, "prep-independent"),
    "no-prep-signalling": _theory_check("no-prep-signalling", is_no_preparation_signalling,
                                        "no-prep-signalling"),
    "steering": _check_steering,
}


def cmd_check(args) -> Report:
    digest, kind, obj = _read(args.file)
    holds, verdict, payload = CHECKS[args.check](kind, obj, args)
    return Report(f"check {args.check}", digest, verdict, holds, payload)


def cmd_canonicalize(args) -> Report:
    digest, kind, obj = _read(args.file)
    h = _model(kind, obj, "canonicalize")
    try:
        cm = canonicalize(h)
    except NotLocalError as exc:
        return Report("canonicalize", digest, "not local", False, _failure(exc.verdict))
    same = operationally_equivalent(h, cm.model)
    if not same:
        raise AssertionError(f"canonical form changed the statistics at {same.witness}")
    text = serialize.dumps(serialize.canonical_to_json(cm))
    if args.output == "-":
        sys.stdout.write(text)
    else:
        Path(args.output).write_text(text, encoding="utf-8")
    payload = {
        "output": args.output,
        "collapse": {str(x): str(a) for x, a in cm.collapse.items()},
        "live_weights": {str(p): serialize.weights_to_json(cm.live_weights(p)) for p in h.preparations},
    }
    return Report("canonicalize", digest, "canonical form written", True, payload)


def cmd_localize(args) -> Report:
    digest, kind, obj = _read(args.file)
    e = _empirical(kind, obj, "localize")
    holds, results = _realizations(e, args.prep)
    docs = [serialize.realization_to_json(r) for r in results]
    if args.output:
        Path(args.output).write_text(serialize.dumps(docs), encoding="utf-8")
    return Report("localize", digest, "Feasible" if holds else "Infeasible", holds, {"results": docs})


# --- demos ------------------------------------------------------------------

def _demo_epr() -> tuple[bool, str, dict]:
    h = qubit_model()
    classes = {m: check_observable_epistemicity(h, m) for m in h.scenario.measurements}
    local = is_local(h)
    bell = is_local(bell_model())
    payload = {
        "observables": {str(m): {"nature": c.nature.value, "witness": describe(c.witness)}
                        for m, c in classes.items()},
        "qubit_model": {"local": local.holds, **_failure(local)},
        "bell_model": {"local": bell.holds, **_failure(bell)},
    }
    expected = all(not c.is_ontic for c in classes.values()) and not local and not bell
    return expected, "ψ-complete model is non-local", payload


def _demo_steering() -> tuple[bool, str, dict]:
    ens = steering_ensembles()
    ontic = steering_incompatibility(builtins.disjoint_steering_family(), ens.first, ens.second)
    overlap = steering_incompatibility(builtins.overlapping_steering_family(), ens.first, ens.second)
    payload = {
        "ensembles": [[[format_rational(c), lbl] for c, lbl in e] for e in (ens.first, ens.second)],
        "same_reduced_state": ens.same_reduced_state(),
        "disjoint_family": _steering_payload(ontic),
        "overlapping_family": {"verdict": _steering_verdict(overlap), **_steering_payload(overlap)},
    }
    return ontic.contradiction and not overlap.contradiction, _steering_verdict(ontic), payload


def _demo_prep_relaxation() -> tuple[bool, str, dict]:
    corr = builtins.correlated_theory()
    prod = builtins.product_theory_example()
    pi, nps = is_preparation_independent(corr), is_no_preparation_signalling(corr)
    payload = {
        "correlated": {"prep_independent": pi.holds, "no_prep_signalling": nps.holds,
                       "witness": describe(pi.witness)},
        "product": {"prep_independent": is_preparation_independent(prod).holds,
                    "no_prep_signalling": is_no_preparation_signalling(prod).holds},
    }
    expected = not pi and bool(nps) and all(payload["product"].values())
    verdict = f"prep-independent: {str(pi.holds).lower()}; no-prep-signalling: {str(nps.holds).lower()}"
    return expected, verdict, payload


DEMOS = {"epr": _demo_epr, "steering": _demo_steering, "prep-relaxation": _demo_prep_relaxation}


def cmd_demo(args) -> Report:
    holds, verdict, payload = DEMOS[args.name]()
    digest = hashlib.sha256(f"demo:{args.name}".encode()).hexdigest()
    return Report(f"demo {args.name}", digest, verdict, holds, payload)


def examples_dir() -> Path:
    return Path(str(resources.files("ontolab") / "examples"))


def cmd_examples(args) -> Report:
    files = sorted(p.name for p in examples_dir().glob("*.json"))
    return Report("examples", hashlib.sha256(b"examples").hexdigest(), f"{len(files)} example files",
                  True, {"directory": str(examples_dir()), "files": files})


# --- entry point ------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ontolab", description=__doc__.splitlines()[0])
    parser.add_argument("--json", action="store_true", help="machine-readable output")
    # allow --json after the subcommand too without clobbering the global flag
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", default=argparse.SUPPRESS)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", parents=[common], help="run one check on a JSON file")
    p.add_argument("file")
    p.add_argument("check", choices=sorted(CHECKS))
    p.add_argument("-p", "--prep", help="restrict table checks to one preparation")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("canonicalize", parents=[common], help="write the canonical form of a local model")
    p.add_argument("file")
    p.add_argument("-o", "--output", required=True, help="output path, or - for stdout")
    p.set_defaults(func=cmd_canonicalize)

    p = sub.add_parser("localize", parents=[common], help="find a local realization or a certificate")
    p.add_argument("file")
    p.add_argument("-p", "--prep")
    p.add_argument("-o", "--output", help="also write the results to this file")
    p.set_defaults(func=cmd_localize)

    p = sub.add_parser("demo", parents=[common], help="run a built-in demonstration")
    p.add_argument("name", choices=sorted(DEMOS))
    p.set_defaults(func=cmd_demo)

    p = sub.add_parser("examples", parents=[common], help="list the shipped example files")
    p.set_defaults(func=cmd_examples)
    return parser


def _error(args, message: str, location: str | None) -> int:
    if getattr(args, "json", False):
        doc = {"command": args.command, "error": {"message": message, "location": location}}
        sys.stdout.write(serialize.dumps(doc))
    else:
        where = f" at {location}" if location else ""
        print(f"ontolab: input error{where}: {message}", file=sys.stderr)
    return EXIT_INPUT


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_HOLDS
    start = time.perf_counter()
    try:
        report = args.func(args)
    except SchemaError as exc:
        return _error(args, exc.message, exc.location)
    except InputError as exc:
        return _error(args, str(exc), exc.location)
    except OntolabError as exc:
        return _error(args, str(exc), None)
    report.elapsed = time.perf_counter() - start
    if args.json:
        sys.stdout.write(serialize.dumps(report.to_json()))
    else:
        print(report.render())
    return report.exit_code


if __name__ == "__main__":
    sys.exit(main())
