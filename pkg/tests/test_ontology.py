import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ontolab.builtins import fuzzy_coins
from ontolab.errors import ModelError, PreconditionError
from ontolab.numeric import Distribution
from ontolab.ontology import (Nature, OntologicalModel, Property, bayesian_inversion, classify_property,
                              deterministic_response, extract_observable_properties, hs_ontic_by_supports,
                              is_deterministic, is_factorisable, is_local, is_parameter_independent,
                              mix_models_prep, operational_probabilities, value_normalizers)
from ontolab.scenario import Assignment, MeasurementScenario

from helpers import (BELL, oracle_is_ontic, oracle_local, oracle_operational, oracle_posteriors,
                     random_local_model, random_model, random_property_data)

F = Fraction
HALF = F(1, 2)


def _prop(lam, values, f):
    return Property(lam, values, {x: Distribution(row) for x, row in f.items()})


class TestClassify:
    def test_fuzzy_coins(self):
        c = classify_property(fuzzy_coins())
        assert c.nature is Nature.EPISTEMIC
        assert c.witness == ("GW", "G", "W")

    def test_function_induced_is_ontic(self):
        lam = range(10)
        p = Property.from_function(lam, ["even", "odd"], lambda x: "odd" if x % 2 else "even")
        c = classify_property(p)
        assert c.is_ontic and c.generator[3] == "odd"

    def test_single_state(self):
        c = classify_property(Property(["x"], ["v"], {"x": Distribution.delta("v")}))
        assert c.is_ontic and c.generator == {"x": "v"}

    @settings(max_examples=200)
    @given(st.randoms(use_true_random=False))
    def test_generator_and_witness_are_genuine(self, rng):
        lam, values, f = random_property_data(rng)
        prop = _prop(lam, values, f)
        c = classify_property(prop)
        assert c.is_ontic == oracle_is_ontic(f)
        if c.is_ontic:
            assert all(prop.f[x] == Distribution.delta(c.generator[x]) for x in lam)
        else:
            x, v, w = c.witness
            assert v != w and prop.f[x][v] > 0 and prop.f[x][w] > 0


class TestBayes:
    def test_fuzzy_coins_posterior(self):
        mu = bayesian_inversion(fuzzy_coins())
        assert dict(mu["G"].items()) == {"GG": HALF, "GW": F(1, 4), "WG": F(1, 4), "WW": 0}
        assert mu["W"] == Distribution({"WW": HALF, "GW": F(1, 4), "WG": F(1, 4)})

    def test_injective_ontic(self):
        p = Property.from_function(["a", "b", "c"], [1, 2, 3], {"a": 1, "b": 2, "c": 3}.get)
        mu = bayesian_inversion(p)
        assert mu[2] == Distribution.delta("b")

    def test_constant_property_leaves_other_value_undefined(self):
        p = Property(["x", "y"], ["a", "b"], {"x": Distribution.delta("a"), "y": Distribution.delta("a")})
        mu = bayesian_inversion(p)
        assert mu["a"] == Distribution.uniform(["x", "y"])
        assert mu["b"] is None

    @settings(max_examples=150)
    @given(st.randoms(use_true_random=False))
    def test_matches_oracle_and_total_probability(self, rng):
        lam, values, f = random_property_data(rng)
        prop = _prop(lam, values, f)
        raw_prior = {x: F(rng.randint(1, 5)) for x in lam}
        z = sum(raw_prior.values())
        prior = Distribution({x: w / z for x, w in raw_prior.items()})
        mu = bayesian_inversion(prop, prior)
        want = oracle_posteriors(f, dict(prior.items()))
        for v in values:
            if want.get(v) is None:
                assert mu[v] is None
            else:
                assert all(mu[v][x] == want[v][x] for x in lam)
        norm = value_normalizers(prop, prior)
        for x in lam:
            assert sum(norm[v] * mu[v][x] for v in values if mu[v] is not None) == prior[x]


class TestSupports:
    def test_fuzzy_coins(self):
        r = hs_ontic_by_supports(fuzzy_coins())
        assert not r and r.witness == ("GW", "G", "W")

    def test_two_states(self):
        p = Property(["l1", "l2"], ["a", "b"],
                     {"l1": Distribution.delta("a"), "l2": Distribution({"a": HALF, "b": HALF})})
        r = hs_ontic_by_supports(p)
        assert r.witness == ("l2", "a", "b")

    def test_ontic_holds(self):
        p = Property.from_function(range(4), ["x", "y"], lambda i: "xy"[i % 2])
        assert hs_ontic_by_supports(p)

    def test_prior_without_full_support(self):
        p = Property.from_function(["a", "b"], [0], lambda _: 0)
        with pytest.raises(PreconditionError):
            hs_ontic_by_supports(p, Distribution({"a": 1, "b": 0}))


def _toy(responses, preps=None):
    """Model over a scenario with contexts {m,m1} and {m,m2}."""
    scen = MeasurementScenario(["m", "m1", "m2"], ["0", "1"], [["m", "m1"], ["m", "m2"]])
    lam = sorted({x for x, _ in responses})
    preps = preps or {"p": Distribution.uniform(lam)}
    return OntologicalModel(scen, list(preps), lam, preps, responses)


def _ctx(*labels):
    return frozenset(labels)


def _a(**kw):
    return Assignment(kw)


class TestOperational:
    def test_single_state(self):
        h = random_model(random.Random(1))
        h1 = OntologicalModel(h.scenario, ["p"], ["l0"], {"p": Distribution.delta("l0")},
                              {k: v for k, v in h.response.items() if k[0] == "l0"})
        for c in BELL.contexts:
            assert operational_probabilities(h1, "p", c) == h1.response[("l0", c)]

    def test_uniform_mix_of_two_answers(self):
        r0 = {(x, c): Distribution.delta(Assignment((m, "0" if x == "a" else "1") for m in c))
              for x in "ab" for c in [_ctx("m", "m1"), _ctx("m", "m2")]}
        h = _toy(r0)
        marg = operational_probabilities(h, "p", {"m", "m1"}).pushforward(lambda a: a["m"])
        assert marg == Distribution({"0": HALF, "1": HALF})

    def test_unknown_inputs(self):
        h = random_model(random.Random(2))
        with pytest.raises(ModelError):
            operational_probabilities(h, "nope", BELL.contexts[0])

    @settings(max_examples=60, deadline=None)
    @given(st.randoms(use_true_random=False))
    def test_matches_oracle_and_is_affine(self, rng):
        h = random_model(rng)
        for p in h.preparations:
            for c in BELL.contexts:
                got = operational_probabilities(h, p, c)
                assert {a: w for a, w in got.items() if w} == oracle_operational(h, p, c)
        t = F(rng.randint(0, 7), 7)
        weights = {h.preparations[0]: t, h.preparations[-1]: 1 - t} \
            if len(h.preparations) > 1 else {h.preparations[0]: 1}
        mixed = mix_models_prep(h, weights, "mix")
        for c in BELL.contexts:
            want = {}
            for p, w in weights.items():
                for a, q in operational_probabilities(h, p, c).items():
                    want[a] = want.get(a, 0) + w * q
            assert operational_probabilities(mixed, "mix", c) == Distribution(want)


class TestLocality:
    def test_context_dependent_marginal_witness(self):
        c1, c2 = _ctx("m", "m1"), _ctx("m", "m2")
        h = _toy({("x", c1): Distribution.delta(_a(m="0", m1="0")),
                  ("x", c2): Distribution.delta(_a(m="1", m2="0"))})
        r = extract_observable_properties(h)
        assert not r and r.witness == ("m", "x", c1, c2)
        assert not is_parameter_independent(h)
        assert is_deterministic(h)
        loc = is_local(h)
        assert not loc and loc.reason == "NotParameterIndependent"

    def test_stochastic_witness(self):
        c1, c2 = _ctx("m", "m1"), _ctx("m", "m2")
        noisy = Distribution({_a(m="0", m1="0"): HALF, _a(m="1", m1="1"): HALF})
        h = _toy({("x", c1): noisy, ("x", c2): Distribution({_a(m="0", m2="0"): HALF, _a(m="1", m2="0"): HALF})})
        r = is_deterministic(h)
        assert not r and r.witness == ("x", c1)
        assert is_local(h).reason == "NotDeterministic"

    def test_canonical_style_model_is_local(self):
        h = random_local_model(random.Random(3))
        r = is_local(h)
        assert r and set(r.value) == set(BELL.measurements)
        assert all(classify_property(f).is_ontic for f in r.value.values())

    @settings(max_examples=300, deadline=None)
    @given(st.randoms(use_true_random=False))
    def test_agrees_with_property_oracle(self, rng):
        h = random_model(rng)
        assert is_local(h).holds == oracle_local(h)


class TestFactorisable:
    def test_deterministic_pi_models(self):
        rng = random.Random(4)
        for _ in range(30):
            assert is_factorisable(random_local_model(rng))

    def test_correlated_response(self):
        c1, c2 = _ctx("m", "m1"), _ctx("m", "m2")
        corr = {c: Distribution({Assignment((k, "0") for k in c): HALF, Assignment((k, "1") for k in c): HALF})
                for c in (c1, c2)}
        h = _toy({("x", c): d for c, d in corr.items()})
        r = is_factorisable(h)
        assert not r and r.witness[0] == "x" and r.witness[1] == c1

    def test_precondition(self):
        c1, c2 = _ctx("m", "m1"), _ctx("m", "m2")
        h = _toy({("x", c1): Distribution.delta(_a(m="0", m1="0")),
                  ("x", c2): Distribution.delta(_a(m="1", m2="0"))})
        with pytest.raises(PreconditionError):
            is_factorisable(h)

    def test_brute_force(self):
        rng = random.Random(5)
        for _ in range(40):
            h = random_model(rng, rng.choice(["stoch-product", "stoch-mixture"]))
            r = is_factorisable(h)
            product = True
            for x in h.ontic_states:
                for c in BELL.contexts:
                    d = h.response[(x, c)]
                    margs = {m: d.pushforward(lambda a, m=m: a[m]) for m in c}
                    for a in d.keys():
                        p = F(1)
                        for m in c:
                            p *= margs[m][a[m]]
                        product &= d[a] == p
            assert r.holds == product


def test_model_validation():
    c = BELL.contexts[0]
    ok = {(x, k): deterministic_response(Assignment({m: "0" for m in BELL.measurements}), k)
          for x in ["l"] for k in BELL.contexts}
    with pytest.raises(ModelError):
        OntologicalModel(BELL, ["p"], ["l"], {"p": Distribution.delta("zz")}, ok)
    partial = {k: v for k, v in ok.items() if k[1] != c}
    with pytest.raises(ModelError):
        OntologicalModel(BELL, ["p"], ["l"], {"p": Distribution.delta("l")}, partial)
    wrong = dict(ok)
    wrong[("l", c)] = Distribution.delta(Assignment({"A0": "0"}))
    with pytest.raises(ModelError):
        OntologicalModel(BELL, ["p"], ["l"], {"p": Distribution.delta("l")}, wrong)
