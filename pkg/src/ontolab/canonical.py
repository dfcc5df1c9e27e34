"""Canonical form of local models over the global assignments ``E(X)``."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Hashable, Mapping

from .errors import NotLocalError
from .numeric import ZERO, Distribution
from .ontology import OntologicalModel, classify_property, is_local, operational_probabilities
from .scenario import Assignment, event_sheaf
from .verdict import CheckResult


@dataclass(frozen=True)
class CanonicalModel:
    """A model over global assignments with delta-product responses.

    ``collapse`` sends each original ontic state ``lambda`` to the global
    assignment ``omega_lambda(m) = f_m-hat(lambda)``; the canonical
    preparation weight of ``omega`` is the total weight of its fibre.
    """

    model: OntologicalModel
    collapse: Mapping[Hashable, Assignment]

    __hash__ = None  # type: ignore[assignment]

    def live_weights(self, p: Hashable) -> dict[Assignment, Fraction]:
        """Non-zero weights ``h(omega | p)``."""
        d = self.model.prep_dists[p]
        return {omega: w for omega, w in d.items() if w != 0}


def canonicalize(h: OntologicalModel) -> CanonicalModel:
    """Rewrite a local model over ``Omega = image of the collapse map``.

    Only global assignments hit by some ontic state are materialized, in the
    scenario's lexicographic order. Ontic states with equal generators merge
    and their weights add. Raises :class:`NotLocalError` with the locality
    witness when ``h`` is not local.
    """
    verdict = is_local(h)
    if not verdict.holds:
        raise NotLocalError(verdict)
    scen = h.scenario
    generators = {m: classify_property(f).generator for m, f in verdict.value.items()}
    collapse = {x: Assignment((m, generators[m][x]) for m in scen.measurements)
                for x in h.ontic_states}
    omegas = sorted(set(collapse.values()), key=scen.sort_key)
    prep_dists = {}
    for p in h.preparations:
        acc = {omega: ZERO for omega in omegas}
        for x in h.ontic_states:
            acc[collapse[x]] += h.prep_dists[p][x]
        prep_dists[p] = Distribution(acc, omegas)
    response = {(omega, c): Distribution.delta(omega.restrict(c))
                for omega in omegas for c in scen.contexts}
    model = OntologicalModel(scen, h.preparations, omegas, prep_dists, response)
    return CanonicalModel(model, collapse)


def operationally_equivalent(h1: OntologicalModel, h2: OntologicalModel) -> CheckResult:
    """Exact equality of all operational probabilities; witness ``(p, context, o-bar)``."""
    if h1.scenario != h2.scenario or h1.preparations != h2.preparations:
        raise ValueError("models must share scenario and preparations to be compared")
    for p in h1.preparations:
        for c in h1.scenario.contexts:
            d1 = operational_probabilities(h1, p, c)
            d2 = operational_probabilities(h2, p, c)
            if d1 != d2:
                bad = next(a for a in event_sheaf(h1.scenario, c) if d1[a] != d2[a])
                return CheckResult.fail("OperationalMismatch", (p, c, bad))
    return CheckResult.ok()
