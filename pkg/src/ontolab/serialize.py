"""JSON formats for scenarios, models, tables, theories and results.

Rationals are written as ``"p/q"`` strings (``"p"`` when integral), joint
outcomes as ``"m1:o1,m2:o2"`` with labels sorted, and contexts as
``"m1,m2"``. Output uses sorted keys so that dumping, loading and dumping
again reproduces the same bytes.
"""

from __future__ import annotations

import json
from fractions import Fraction
from pathlib import Path
from typing import Any, Hashable, Mapping

import jsonschema
import numpy as np

from .canonical import CanonicalModel
from .empirical import EmpiricalModel, Feasible, Infeasible
from .errors import OntolabError
from .numeric import Distribution, SignedWeights, format_rational, parse_rational
from .ontology import OntologicalModel, Property
from .preparation import PreparationTheory
from .quantum import (BUILTIN_STATES, ProjectiveMeasurement, PureState, local_joint_measurements,
                      psi_complete_model)
from .scenario import Assignment, MeasurementScenario, PreparationScenario, format_context


class SchemaError(OntolabError):
    """Input does not match the expected file format.

    ``location`` is a JSON-pointer-like path into the document.
    """

    def __init__(self, location: str, message: str) -> None:
        super().__init__(f"{location or '/'}: {message}")
        self.location = location or "/"
        self.message = message


RATIONAL = {"type": "string", "pattern": r"^\s*-?\d+(\s*/\s*\d+)?\s*$"}
LABEL = {"type": "string", "minLength": 1, "pattern": r"^[^:,|]+$"}
WEIGHTS = {"type": "object", "additionalProperties": RATIONAL}
# canonical ontic states print as joint outcomes, so only "|" is reserved here
ONTIC_LABEL = {"type": "string", "minLength": 1, "pattern": r"^[^|]+$"}

SCENARIO_SCHEMA = {
    "type": "object",
    "required": ["measurements", "outcomes", "contexts"],
    "properties": {
        "measurements": {"type": "array", "items": LABEL, "minItems": 1},
        "outcomes": {"type": "array", "items": LABEL, "minItems": 1},
        "contexts": {"type": "array", "minItems": 1,
                     "items": {"type": "array", "items": LABEL, "minItems": 1}},
    },
}

MODEL_SCHEMA = {
    "type": "object",
    "required": ["scenario", "preparations", "lambda", "prep_dists", "response"],
    "properties": {
        "scenario": SCENARIO_SCHEMA,
        "preparations": {"type": "array", "items": LABEL, "minItems": 1},
        "lambda": {"type": "array", "items": ONTIC_LABEL, "minItems": 1},
        "prep_dists": {"type": "object", "additionalProperties": WEIGHTS},
        "response": {"type": "object", "additionalProperties": WEIGHTS},
        "collapse": {"type": "object", "additionalProperties": {"type": "string"}},
    },
}

EMPIRICAL_SCHEMA = {
    "type": "object",
    "required": ["scenario", "preparations", "tables"],
    "properties": {
        "scenario": SCENARIO_SCHEMA,
        "preparations": {"type": "array", "items": LABEL, "minItems": 1},
        "tables": {"type": "object", "additionalProperties": WEIGHTS},
    },
}

PROPERTY_SCHEMA = {
    "type": "object",
    "required": ["lambda", "values", "f"],
    "properties": {
        "lambda": {"type": "array", "items": LABEL, "minItems": 1},
        "values": {"type": "array", "items": LABEL, "minItems": 1},
        "f": {"type": "object", "additionalProperties": WEIGHTS},
        "prior": WEIGHTS,
    },
}

THEORY_SCHEMA = {
    "type": "object",
    "required": ["sites", "prep_contexts", "lambda", "joint_dists"],
    "properties": {
        "sites": {"type": "array", "items": LABEL, "minItems": 1},
        "prep_contexts": {"type": "array", "minItems": 1,
                          "items": {"type": "array", "items": LABEL, "minItems": 1}},
        "preparations": {"type": "object", "additionalProperties": {"type": "array", "items": LABEL}},
        "lambda": {"type": "array", "items": LABEL, "minItems": 1},
        "joint_dists": {"type": "object", "additionalProperties": WEIGHTS},
    },
}

STEERING_SCHEMA = {
    "type": "object",
    "required": ["mu", "ensembles"],
    "properties": {
        "mu": {"type": "object", "additionalProperties": WEIGHTS, "minProperties": 1},
        "ensembles": {
            "type": "array", "minItems": 2, "maxItems": 2,
            "items": {"type": "array", "minItems": 1,
                      "items": {"type": "array", "minItems": 2, "maxItems": 2,
                                "prefixItems": [RATIONAL, {"type": "string"}],
                                "items": {"type": "string"}}},
        },
    },
}

_NUMBER_OR_PAIR = {"oneOf": [{"type": "number"},
                             {"type": "array", "items": {"type": "number"}, "minItems": 2, "maxItems": 2}]}
_VECTOR = {"oneOf": [{"type": "string"}, {"type": "array", "items": _NUMBER_OR_PAIR, "minItems": 1}]}

QUANTUM_SCHEMA = {
    "type": "object",
    "required": ["kind", "scenario", "states", "measurements"],
    "properties": {
        "kind": {"const": "psi_complete"},
        "scenario": SCENARIO_SCHEMA,
        "states": {"type": "object", "additionalProperties": _VECTOR, "minProperties": 1},
        "measurements": {"type": "object", "additionalProperties": {
            "type": "object",
            "required": ["basis", "outcomes"],
            "properties": {"basis": {"type": "array", "items": _VECTOR},
                           "outcomes": {"type": "array", "items": LABEL}},
        }},
        "preparations": {"type": "object", "additionalProperties": WEIGHTS},
    },
}

SCHEMAS = {
    "scenario": SCENARIO_SCHEMA,
    "model": MODEL_SCHEMA,
    "empirical": EMPIRICAL_SCHEMA,
    "property": PROPERTY_SCHEMA,
    "theory": THEORY_SCHEMA,
    "steering": STEERING_SCHEMA,
    "quantum": QUANTUM_SCHEMA,
}


def detect_kind(doc: Any) -> str:
    """Guess the file kind from its top-level keys."""
    if not isinstance(doc, dict):
        raise SchemaError("/", "top-level value must be a JSON object")
    if doc.get("kind") == "psi_complete":
        return "quantum"
    for key, kind in (("response", "model"), ("tables", "empirical"), ("f", "property"),
                      ("joint_dists", "theory"), ("mu", "steering"), ("measurements", "scenario")):
        if key in doc:
            return kind
    raise SchemaError("/", "cannot tell what kind of document this is")


def validate(doc: Any, kind: str) -> None:
    validator = jsonschema.Draft202012Validator(SCHEMAS[kind])
    errors = sorted(validator.iter_errors(doc), key=lambda e: list(map(str, e.absolute_path)))
    if errors:
        err = errors[0]
        location = "/" + "/".join(str(p) for p in err.absolute_path)
        raise SchemaError(location, err.message)


def _at(location: str, fn, *args):
    try:
        return fn(*args)
    except SchemaError:
        raise
    except (OntolabError, ValueError, TypeError, KeyError) as exc:
        raise SchemaError(location, str(exc)) from exc


def dumps(doc: Any) -> str:
    return json.dumps(doc, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


# --- weights ---------------------------------------------------------------

def weights_to_json(d: Mapping[Any, Fraction] | Any) -> dict[str, str]:
    return {str(k): format_rational(w) for k, w in d.items()}


def _weights_from_json(raw: Mapping[str, str], key_fn, location: str) -> dict[Any, Fraction]:
    out = {}
    for k, v in raw.items():
        out[_at(f"{location}/{k}", key_fn, k)] = _at(f"{location}/{k}", parse_rational, v)
    return out


def _distribution(raw, key_fn, location, carrier=None) -> Distribution:
    weights = _weights_from_json(raw, key_fn, location)
    return _at(location, Distribution, weights, carrier)


# --- scenarios -------------------------------------------------------------

def scenario_to_json(s: MeasurementScenario) -> dict:
    return {
        "measurements": [str(m) for m in s.measurements],
        "outcomes": [str(o) for o in s.outcomes],
        "contexts": [[str(m) for m in s.ordered(c)] for c in s.contexts],
    }


def scenario_from_json(doc: Any, location: str = "") -> MeasurementScenario:
    return _at(location or "/", MeasurementScenario, doc["measurements"], doc["outcomes"], doc["contexts"])


def parse_assignment(text: str, domain_lookup, value_lookup) -> Assignment:
    if text == "":
        return Assignment()
    pairs = []
    for part in text.split(","):
        if part.count(":") != 1:
            raise ValueError(f"malformed assignment entry {part!r}; expected 'label:value'")
        k, v = part.split(":")
        pairs.append((domain_lookup(k), value_lookup(v)))
    keys = [k for k, _ in pairs]
    if len(set(keys)) != len(keys):
        raise ValueError(f"assignment {text!r} repeats a label")
    return Assignment(pairs)


def parse_context(s: MeasurementScenario, text: str) -> frozenset:
    return s.context(s.measurement_label(t) for t in text.split(","))


def _assignment_parser(s: MeasurementScenario):
    return lambda text: parse_assignment(text, s.measurement_label, s.outcome_label)


def _split_keyed(text: str) -> tuple[str, str]:
    if text.count("|") != 1:
        raise ValueError(f"key {text!r} must have the form '<label>|<context>'")
    left, right = text.split("|")
    return left, right


# --- ontological models ----------------------------------------------------

def model_to_json(h: OntologicalModel) -> dict:
    lam = {x: str(x) for x in h.ontic_states}
    return {
        "scenario": scenario_to_json(h.scenario),
        "preparations": [str(p) for p in h.preparations],
        "lambda": [lam[x] for x in h.ontic_states],
        "prep_dists": {str(p): weights_to_json(h.prep_dists[p]) for p in h.preparations},
        "response": {f"{lam[x]}|{format_context(c)}": weights_to_json(d)
                     for (x, c), d in h.response.items()},
    }


def model_from_json(doc: Any) -> OntologicalModel:
    validate(doc, "model")
    scen = scenario_from_json(doc["scenario"], "/scenario")
    lam = list(doc["lambda"])
    lam_lookup = _lookup(lam, "ontic state")
    preps = list(doc["preparations"])
    prep_dists = {}
    for p, raw in doc["prep_dists"].items():
        prep_dists[p] = _distribution(raw, lam_lookup, f"/prep_dists/{p}", lam)
    parse_a = _assignment_parser(scen)
    response = {}
    for key, raw in doc["response"].items():
        loc = f"/response/{key}"
        x_text, c_text = _at(loc, _split_keyed, key)
        x = _at(loc, lam_lookup, x_text)
        c = _at(loc, parse_context, scen, c_text)
        response[(x, c)] = _distribution(raw, parse_a, loc)
    return _at("/", OntologicalModel, scen, preps, lam, prep_dists, response)


def _lookup(labels, kind):
    table = {str(x): x for x in labels}

    def find(text: str):
        if text not in table:
            raise ValueError(f"unknown {kind} {text!r}")
        return table[text]
    return find


def canonical_to_json(cm: CanonicalModel) -> dict:
    doc = model_to_json(cm.model)
    doc["collapse"] = {str(x): str(omega) for x, omega in cm.collapse.items()}
    return doc


def canonical_from_json(doc: Any) -> CanonicalModel:
    raw = model_from_json(doc)
    if "collapse" not in doc:
        raise SchemaError("/", "canonical model needs a 'collapse' map")
    scen = raw.scenario
    parse_a = _assignment_parser(scen)
    omega = {x: _at(f"/lambda/{i}", parse_a, x) for i, x in enumerate(raw.ontic_states)}
    model = _at("/", OntologicalModel, scen, raw.preparations, [omega[x] for x in raw.ontic_states],
                {p: Distribution({omega[x]: w for x, w in d.items()}, list(omega.values()))
                 for p, d in raw.prep_dists.items()},
                {(omega[x], c): d for (x, c), d in raw.response.items()})
    collapse = {}
    for x, a in doc["collapse"].items():
        target = _at(f"/collapse/{x}", parse_a, a)
        if target not in model.ontic_states:
            raise SchemaError(f"/collapse/{x}", f"{a!r} is not one of the canonical ontic states")
        collapse[x] = target
    return CanonicalModel(model, collapse)


# --- empirical models ------------------------------------------------------

def empirical_to_json(e: EmpiricalModel) -> dict:
    return {
        "scenario": scenario_to_json(e.scenario),
        "preparations": [str(p) for p in e.preparations],
        "tables": {f"{p}|{format_context(c)}": weights_to_json(d) for (p, c), d in e.tables.items()},
    }


def empirical_from_json(doc: Any) -> EmpiricalModel:
    validate(doc, "empirical")
    scen = scenario_from_json(doc["scenario"], "/scenario")
    preps = list(doc["preparations"])
    prep_lookup = _lookup(preps, "preparation")
    parse_a = _assignment_parser(scen)
    tables = {}
    for key, raw in doc["tables"].items():
        loc = f"/tables/{key}"
        p_text, c_text = _at(loc, _split_keyed, key)
        p = _at(loc, prep_lookup, p_text)
        c = _at(loc, parse_context, scen, c_text)
        tables[(p, c)] = _distribution(raw, parse_a, loc)
    return _at("/", EmpiricalModel, scen, preps, tables)


# --- properties ------------------------------------------------------------

def property_to_json(prop: Property, prior: Distribution | None = None) -> dict:
    doc = {
        "lambda": [str(x) for x in prop.ontic_states],
        "values": [str(v) for v in prop.values],
        "f": {str(x): weights_to_json(prop.f[x]) for x in prop.ontic_states},
    }
    if prior is not None:
        doc["prior"] = weights_to_json(prior)
    return doc


def property_from_json(doc: Any) -> tuple[Property, Distribution | None]:
    validate(doc, "property")
    lam = list(doc["lambda"])
    values = list(doc["values"])
    v_lookup = _lookup(values, "value")
    lam_lookup = _lookup(lam, "ontic state")
    f = {}
    for x, raw in doc["f"].items():
        f[_at(f"/f/{x}", lam_lookup, x)] = _distribution(raw, v_lookup, f"/f/{x}")
    prop = _at("/", Property, lam, values, f)
    prior = None
    if "prior" in doc:
        prior = _distribution(doc["prior"], lam_lookup, "/prior", lam)
    return prop, prior


# --- preparation theories --------------------------------------------------

def theory_to_json(t: PreparationTheory) -> dict:
    scen = t.scenario
    return {
        "sites": [str(s) for s in scen.sites],
        "prep_contexts": [[str(p) for p in c] for c in scen.contexts],
        "preparations": {str(s): [str(p) for p in scen.preparations[s]] for s in scen.sites},
        "lambda": [str(x) for x in scen.ontic_states],
        "joint_dists": {str(scen.context_label(c)): weights_to_json(d) for c, d in t.joint_dists.items()},
    }


def theory_from_json(doc: Any) -> PreparationTheory:
    validate(doc, "theory")
    scen = _at("/", PreparationScenario, doc["sites"], doc["prep_contexts"], doc["lambda"],
               doc.get("preparations"))
    site_lookup = _lookup(scen.sites, "site")
    lam_lookup = _lookup(scen.ontic_states, "ontic state")
    prep_text = {s: _lookup(scen.preparations[s], f"preparation at site {s}") for s in scen.sites}

    def parse_ctx(text: str) -> tuple:
        a = parse_assignment(text, site_lookup, lambda v: v)
        if a.domain != frozenset(scen.sites):
            raise ValueError(f"preparation context {text!r} must name every site")
        return tuple(prep_text[s](a[s]) for s in scen.sites)

    parse_js = lambda text: parse_assignment(text, site_lookup, lam_lookup)  # noqa: E731
    joint = {}
    for key, raw in doc["joint_dists"].items():
        loc = f"/joint_dists/{key}"
        joint[_at(loc, parse_ctx, key)] = _distribution(raw, parse_js, loc)
    return _at("/", PreparationTheory, scen, joint)


# --- steering --------------------------------------------------------------

def steering_from_json(doc: Any) -> tuple[dict[str, Distribution], list, list]:
    validate(doc, "steering")
    mu = {label: _distribution(raw, lambda k: k, f"/mu/{label}") for label, raw in doc["mu"].items()}
    ensembles = []
    for i, ens in enumerate(doc["ensembles"]):
        entries = []
        for j, (coef, label) in enumerate(ens):
            if label not in mu:
                raise SchemaError(f"/ensembles/{i}/{j}/1", f"unknown state {label!r}")
            entries.append((_at(f"/ensembles/{i}/{j}/0", parse_rational, coef), label))
        ensembles.append(entries)
    return mu, ensembles[0], ensembles[1]


def steering_to_json(mu: Mapping[str, Distribution], first, second) -> dict:
    return {
        "mu": {str(k): weights_to_json(d) for k, d in mu.items()},
        "ensembles": [[[format_rational(c), str(lbl)] for c, lbl in ens] for ens in (first, second)],
    }


# --- quantum ---------------------------------------------------------------

def _vector(raw, location):
    if isinstance(raw, str):
        if raw not in BUILTIN_STATES:
            raise SchemaError(location, f"unknown built-in state {raw!r}; "
                                        f"choose from {sorted(BUILTIN_STATES)}")
        return BUILTIN_STATES[raw].amplitudes
    return np.array([complex(v[0], v[1]) if isinstance(v, list) else complex(v) for v in raw])


def quantum_from_json(doc: Any) -> OntologicalModel:
    """Build a psi-complete model from named or explicit states and bases."""
    validate(doc, "quantum")
    scen = scenario_from_json(doc["scenario"], "/scenario")
    states = {label: _at(f"/states/{label}", PureState, _vector(raw, f"/states/{label}"), label)
              for label, raw in doc["states"].items()}
    local = {}
    for name, entry in doc["measurements"].items():
        loc = f"/measurements/{name}"
        m = _at(loc, scen.measurement_label, name)
        basis = [_vector(v, f"{loc}/basis/{i}") for i, v in enumerate(entry["basis"])]
        outcomes = [_at(f"{loc}/outcomes", scen.outcome_label, o) for o in entry["outcomes"]]
        local[m] = _at(loc, ProjectiveMeasurement.from_basis, m, basis, outcomes)
    joint = _at("/measurements", local_joint_measurements, scen, local)
    preps = None
    if "preparations" in doc:
        lookup = _lookup(states, "state")
        preps = {p: _distribution(raw, lookup, f"/preparations/{p}") for p, raw in doc["preparations"].items()}
    return _at("/", psi_complete_model, states, scen, joint, preps)


# --- results ---------------------------------------------------------------

def realization_to_json(result: Feasible | Infeasible) -> dict:
    if isinstance(result, Feasible):
        return {"preparation": str(result.preparation), "verdict": "Feasible",
                "weights": weights_to_json(result.weights)}
    return {"preparation": str(result.preparation), "verdict": "Infeasible",
            "pairing": format_rational(result.pairing),
            "certificate": {str(a): format_rational(y) for (c, a), y in result.certificate.items() if y != 0}}


def signed_to_json(w: SignedWeights) -> dict[str, str]:
    return weights_to_json(w)


def load(path: str | Path) -> tuple[str, Any]:
    """Read a JSON file and parse it according to its detected kind."""
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise SchemaError(f"line {exc.lineno} col {exc.colno}", exc.msg) from exc
    return parse(doc)


def parse(doc: Any) -> tuple[str, Any]:
    kind = detect_kind(doc)
    if kind == "model":
        if "collapse" in doc:
            return "canonical", canonical_from_json(doc)
        return kind, model_from_json(doc)
    if kind == "empirical":
        return kind, empirical_from_json(doc)
    if kind == "property":
        return kind, property_from_json(doc)
    if kind == "theory":
        return kind, theory_from_json(doc)
    if kind == "steering":
        return kind, steering_from_json(doc)
    if kind == "quantum":
        return "model", quantum_from_json(doc)
    validate(doc, "scenario")
    return kind, scenario_from_json(doc)


def to_json(kind: str, obj: Any) -> dict:
    if kind == "model":
        return model_to_json(obj)
    if kind == "canonical":
        return canonical_to_json(obj)
    if kind == "empirical":
        return empirical_to_json(obj)
    if kind == "property":
        return property_to_json(*obj)
    if kind == "theory":
        return theory_to_json(obj)
    if kind == "steering":
        return steering_to_json(*obj)
    if kind == "scenario":
        return scenario_to_json(obj)
    raise ValueError(f"unknown kind {kind!r}")


def describe(x: Any) -> Any:
    """JSON-friendly rendering of witnesses (tuples, sets, assignments, rationals)."""
    if isinstance(x, Fraction):
        return format_rational(x)
    if isinstance(x, Assignment):
        return str(x)
    if isinstance(x, frozenset):
        return sorted(str(v) for v in x)
    if isinstance(x, (tuple, list)):
        return [describe(v) for v in x]
    if isinstance(x, dict):
        return {str(k): describe(v) for k, v in x.items()}
    if isinstance(x, Hashable) and not isinstance(x, (str, int, float, bool, type(None))):
        return str(x)
    return x
