import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ontolab.builtins import local_model_example
from ontolab.canonical import canonicalize, operationally_equivalent
from ontolab.empirical import Feasible, from_ontological, local_realizability
from ontolab.errors import NotLocalError
from ontolab.numeric import Distribution
from ontolab.ontology import (OntologicalModel, classify_property, deterministic_response,
                              extract_observable_properties, is_factorisable, is_local)
from ontolab.quantum import qubit_model
from ontolab.scenario import Assignment

from helpers import BELL, oracle_operational, random_local_model, random_weights

F = Fraction


def _model(omegas: dict, preps: dict) -> OntologicalModel:
    response = {(x, c): deterministic_response(w, c) for x, w in omegas.items() for c in BELL.contexts}
    return OntologicalModel(BELL, list(preps), list(omegas), preps, response)


def test_single_state():
    w = Assignment({"A0": "1", "A1": "0", "B0": "0", "B1": "1"})
    cm = canonicalize(_model({"x": w}, {"p": Distribution.delta("x")}))
    assert cm.live_weights("p") == {w: 1}
    assert cm.collapse == {"x": w}


def test_identical_generators_merge():
    cm = canonicalize(local_model_example())
    assert cm.collapse["l0"] == cm.collapse["l1"] != cm.collapse["l2"]
    live = cm.live_weights("p")
    assert len(live) == 2 and live[cm.collapse["l0"]] == F(1, 2)
    assert cm.live_weights("q") == {cm.collapse["l0"]: 1}


def test_explicit_mixture_of_all_global_assignments():
    rng = random.Random(11)
    omegas = list(BELL.global_assignments())
    mix = random_weights(rng, range(16), max_den=48)
    h = _model({f"w{i}": w for i, w in enumerate(omegas)},
               {"p": Distribution({f"w{i}": mix[i] for i in range(16)})})
    cm = canonicalize(h)
    assert cm.live_weights("p") == {omegas[i]: mix[i] for i in range(16) if mix[i]}
    lp = local_realizability(from_ontological(h), "p")
    assert isinstance(lp, Feasible)
    # the LP may choose another realization; both must reproduce the same tables
    assert from_ontological(cm.model).tables == from_ontological(
        _model({w: w for w in lp.weights.support}, {"p": lp.weights.with_carrier(lp.weights.support)})).tables


def test_rejects_non_local():
    with pytest.raises(NotLocalError) as err:
        canonicalize(qubit_model())
    assert err.value.verdict.reason == "NotDeterministic"


def test_response_is_delta_product():
    cm = canonicalize(local_model_example())
    for (w, c), d in cm.model.response.items():
        assert d == Distribution.delta(w.restrict(c))


@settings(max_examples=80, deadline=None)
@given(st.randoms(use_true_random=False))
def test_canonical_form_properties(rng):
    h = random_local_model(rng)
    cm = canonicalize(h)
    assert operationally_equivalent(h, cm.model)
    for p in h.preparations:
        for c in BELL.contexts:
            got = {a: w for a, w in from_ontological(cm.model).tables[(p, c)].items() if w}
            assert got == oracle_operational(h, p, c)
    assert is_local(cm.model) and is_factorisable(cm.model)
    props = extract_observable_properties(cm.model).value
    assert all(classify_property(f).is_ontic for f in props.values())
    again = canonicalize(cm.model)
    assert all(again.live_weights(p) == cm.live_weights(p) for p in h.preparations)
    for x, w in cm.collapse.items():
        for c in BELL.contexts:
            assert h.response[(x, c)] == Distribution.delta(w.restrict(c))


def test_operational_mismatch_witness():
    h = local_model_example()
    other = OntologicalModel(h.scenario, h.preparations, h.ontic_states,
                             {"p": Distribution.delta("l2"), "q": h.prep_dists["q"]}, h.response)
    r = operationally_equivalent(h, other)
    assert not r and r.witness[0] == "p"
