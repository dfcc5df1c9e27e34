"""Preparation scenarios: preparation independence, no-preparation-signalling
and the steering incompatibility check."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Hashable, Iterable, Mapping, Sequence

from .errors import DistributionError, ModelError
from .numeric import ONE, ZERO, Distribution, as_rational, mixture, supports_disjoint
from .scenario import Assignment, PreparationScenario
from .verdict import CheckResult

MIXTURE_EQUALITY_IMPOSSIBLE = "mixture-equality-impossible"
MIXTURES_DIFFER = "mixtures-differ"


@dataclass(frozen=True)
class PreparationTheory:
    """Joint ontic-state distributions ``h(lambda-bar | p-bar)``.

    Joint preparations are tuples aligned with the scenario's sites; joint
    ontic states are :class:`Assignment` objects ``site -> lambda``.
    """

    scenario: PreparationScenario
    joint_dists: Mapping[tuple, Distribution]

    def __init__(self, scenario: PreparationScenario, joint_dists: Mapping[Iterable[Hashable], Distribution]) -> None:
        dists: dict[tuple, Distribution] = {}
        lam = set(scenario.ontic_states)
        sites = frozenset(scenario.sites)
        for ctx, d in joint_dists.items():
            key = tuple(ctx)
            if key not in scenario.contexts:
                raise ModelError(f"{list(key)!r} is not a preparation context")
            for js in d.support:
                if not isinstance(js, Assignment) or js.domain != sites:
                    raise ModelError(f"joint state {js!r} does not assign every site")
                if any(x not in lam for x in js.values()):
                    raise ModelError(f"joint state {js} uses unknown ontic states")
            dists[key] = d
        missing = [list(c) for c in scenario.contexts if c not in dists]
        if missing:
            raise ModelError(f"no joint distribution for preparation contexts {missing!r}")
        object.__setattr__(self, "scenario", scenario)
        object.__setattr__(self, "joint_dists", {c: dists[c] for c in scenario.contexts})

    __hash__ = None  # type: ignore[assignment]

    def site_marginal(self, context: tuple, site: Hashable) -> Distribution:
        """``h(lambda_site | p-bar)``."""
        return self.joint_dists[context].pushforward(lambda js: js[site])


def product_theory(scenario: PreparationScenario,
                   site_dists: Mapping[tuple[Hashable, Hashable], Distribution]) -> PreparationTheory:
    """The theory whose joint states are independent across sites.

    ``site_dists[(site, prep)]`` is the ontic distribution that ``prep``
    induces at ``site``.
    """
    joint = {}
    for ctx in scenario.contexts:
        acc: dict[tuple, Fraction] = {(): ONE}
        for site, prep in zip(scenario.sites, ctx):
            d = site_dists[(site, prep)]
            acc = {prefix + ((site, x),): w * d[x] for prefix, w in acc.items() for x in d.support}
        joint[ctx] = Distribution({Assignment(k): w for k, w in acc.items()})
    return PreparationTheory(scenario, joint)


def _reference_factors(t: PreparationTheory) -> dict[tuple[Hashable, Hashable], Distribution]:
    """Site marginal of each ``(site, prep)`` taken from the first context using it."""
    scen = t.scenario
    out = {}
    for ctx in scen.contexts:
        for site, prep in zip(scen.sites, ctx):
            if (site, prep) not in out:
                out[(site, prep)] = t.site_marginal(ctx, site)
    return out


def is_preparation_independent(t: PreparationTheory) -> CheckResult:
    """Joint states factor into per-site distributions of the local preparation.

    Holds iff ``h(lambda-bar | p-bar) = prod_site g(lambda_site | p_site)``
    for every context and every ``lambda-bar`` in ``Lambda^sites`` (zero
    joint weight included). The factors ``g`` are forced to be the site
    marginals, so this is factorization into marginals together with those
    marginals being well-defined; in particular it implies
    :func:`is_no_preparation_signalling`. Witness ``(p-bar, lambda-bar)``.
    """
    scen = t.scenario
    factors = _reference_factors(t)
    for ctx in scen.contexts:
        joint = t.joint_dists[ctx]
        local = [(s, factors[(s, p)]) for s, p in zip(scen.sites, ctx)]
        for js in scen.joint_states():
            prod = ONE
            for s, g in local:
                prod *= g[js[s]]
                if prod == 0:
                    break
            if joint[js] != prod:
                return CheckResult.fail("NotPreparationIndependent", (ctx, js))
    return CheckResult.ok()


def is_no_preparation_signalling(t: PreparationTheory) -> CheckResult:
    """Each site's ontic marginal depends only on that site's preparation.

    Witness ``((site, prep), p-bar, p-bar')`` for two contexts that choose
    ``prep`` at ``site`` yet induce different marginals there.
    """
    scen = t.scenario
    for i, site in enumerate(scen.sites):
        for prep in scen.preparations[site]:
            holders = [c for c in scen.contexts if c[i] == prep]
            if not holders:
                continue
            ref = t.site_marginal(holders[0], site)
            for other in holders[1:]:
                if t.site_marginal(other, site) != ref:
                    return CheckResult.fail("PreparationSignalling", ((site, prep), holders[0], other))
    return CheckResult.ok()


@dataclass(frozen=True)
class SteeringVerdict:
    """Result of confronting an ontic-state family with two remote ensembles.

    ``contradiction`` is set when the two ensembles cannot induce the same
    local ontic distribution. ``reason`` distinguishes the case where the
    family's supports are pairwise disjoint (equality is then impossible)
    from a plain numerical mismatch.
    """

    contradiction: bool
    reason: str | None
    disjoint: bool
    mixtures_equal: bool
    overlap: tuple | None = None
    mixtures: tuple[Distribution, Distribution] | None = None

    def __bool__(self) -> bool:
        return not self.contradiction


def _ensemble(entries: Sequence[tuple[Any, Hashable]], mu: Mapping[Hashable, Distribution]
              ) -> list[tuple[Fraction, Hashable]]:
    out = [(as_rational(c), label) for c, label in entries]
    total = sum((c for c, _ in out), ZERO)
    if total != ONE:
        raise DistributionError(f"ensemble coefficients sum to {total}, not 1")
    for c, label in out:
        if c < 0:
            raise DistributionError(f"negative ensemble coefficient {c}")
        if label not in mu:
            raise ModelError(f"ensemble refers to unknown state {label!r}")
    return out


def steering_incompatibility(mu: Mapping[Hashable, Distribution],
                             first: Sequence[tuple[Any, Hashable]],
                             second: Sequence[tuple[Any, Hashable]]) -> SteeringVerdict:
    """Check the two requirements a steering argument plays off each other.

    (a) the states listed in either ensemble have pairwise disjoint
    ontic supports; (b) both ensembles induce the same mixture over
    ``Lambda``. If (b) holds the family is consistent. If (b) fails while
    (a) holds the result is a contradiction with reason
    ``"mixture-equality-impossible"``; if both fail, ``"mixtures-differ"``.
    """
    e1 = _ensemble(first, mu)
    e2 = _ensemble(second, mu)
    labels = list(dict.fromkeys([lbl for _, lbl in e1] + [lbl for _, lbl in e2]))
    overlap = None
    for i, a in enumerate(labels):
        for b in labels[i + 1:]:
            ok, where = supports_disjoint(mu[a], mu[b])
            if not ok:
                overlap = (a, b, where)
                break
        if overlap is not None:
            break
    disjoint = overlap is None
    m1 = mixture((c, mu[lbl]) for c, lbl in e1)
    m2 = mixture((c, mu[lbl]) for c, lbl in e2)
    equal = m1 == m2
    if equal:
        reason = None
    elif disjoint:
        reason = MIXTURE_EQUALITY_IMPOSSIBLE
    else:
        reason = MIXTURES_DIFFER
    return SteeringVerdict(not equal, reason, disjoint, equal, overlap, (m1, m2))
