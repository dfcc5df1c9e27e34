"""Named example objects used by the demos and the shipped JSON files."""

from __future__ import annotations

from fractions import Fraction

from .numeric import Distribution
from .ontology import OntologicalModel, Property, deterministic_response
from .preparation import PreparationTheory, product_theory
from .scenario import Assignment, PreparationScenario, bell_scenario

HALF = Fraction(1, 2)


def fuzzy_coins() -> Property:
    """Drawing one of two coins from a bag and reporting its colour."""
    lam = ["GG", "GW", "WG", "WW"]
    f = {
        "GG": Distribution({"G": 1}),
        "GW": Distribution({"G": HALF, "W": HALF}),
        "WG": Distribution({"G": HALF, "W": HALF}),
        "WW": Distribution({"W": 1}),
    }
    return Property(lam, ["G", "W"], f)


def _two_site_scenario() -> PreparationScenario:
    contexts = [(a, b) for a in ("a0", "a1") for b in ("b0", "b1")]
    return PreparationScenario(["A", "B"], contexts, ["0", "1"])


def correlated_theory() -> PreparationTheory:
    """Every joint preparation yields perfectly correlated ontic states 00 / 11."""
    scen = _two_site_scenario()
    joint = Distribution({Assignment({"A": "0", "B": "0"}): HALF,
                          Assignment({"A": "1", "B": "1"}): HALF})
    return PreparationTheory(scen, {c: joint for c in scen.contexts})


def product_theory_example() -> PreparationTheory:
    """Independent sites; each preparation fixes its own ontic distribution."""
    scen = _two_site_scenario()
    site = {
        ("A", "a0"): Distribution({"0": 1}),
        ("A", "a1"): Distribution({"0": HALF, "1": HALF}),
        ("B", "b0"): Distribution({"1": 1}),
        ("B", "b1"): Distribution({"0": Fraction(1, 3), "1": Fraction(2, 3)}),
    }
    return product_theory(scen, site)


STEERING_FIRST = [(HALF, "ket0"), (HALF, "ket1")]
STEERING_SECOND = [(HALF, "ketplus"), (HALF, "ketminus")]


def disjoint_steering_family() -> dict[str, Distribution]:
    """Ontic wavefunction: each qubit state occupies its own ontic state."""
    return {name: Distribution.delta(f"l{i}")
            for i, name in enumerate(["ket0", "ket1", "ketplus", "ketminus"])}


def overlapping_steering_family() -> dict[str, Distribution]:
    """Epistemic wavefunction on two ontic states: |+> and |-> straddle both."""
    mixed = Distribution({"l0": HALF, "l1": HALF})
    return {"ket0": Distribution.delta("l0"), "ket1": Distribution.delta("l1"),
            "ketplus": mixed, "ketminus": mixed}


def local_model_example() -> OntologicalModel:
    """A deterministic, parameter-independent (2,2,2) model.

    ``l0`` and ``l1`` answer identically and merge under canonicalization.
    """
    scen = bell_scenario(2, 2, 2)
    answers = {
        "l0": {"A0": "0", "A1": "1", "B0": "0", "B1": "0"},
        "l1": {"A0": "0", "A1": "1", "B0": "0", "B1": "0"},
        "l2": {"A0": "1", "A1": "1", "B0": "0", "B1": "1"},
    }
    response = {(x, c): deterministic_response(Assignment(a), c)
                for x, a in answers.items() for c in scen.contexts}
    preps = {
        "p": Distribution({"l0": Fraction(1, 4), "l1": Fraction(1, 4), "l2": HALF}),
        "q": Distribution({"l0": 1}),
    }
    return OntologicalModel(scen, ["p", "q"], list(answers), preps, response)
