"""Ontological models, V-valued properties and the checks defined over them.

A property ``f : Lambda -> D(V)`` is *ontic* when every ``f(lambda)`` is a
delta and *epistemic* otherwise. An ontological model pairs preparation
distributions ``h(lambda | p)`` with response distributions
``h(o-bar | m-bar, lambda)``; determinism, parameter independence, locality
and factorisability are decided exactly on that data.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Hashable, Iterable, Mapping

from .errors import InconsistentRoutes, ModelError, PreconditionError
from .numeric import ONE, ZERO, Distribution, is_delta, mixture
from .scenario import Assignment, MeasurementScenario, event_sheaf, format_context
from .verdict import CheckResult

NOT_DETERMINISTIC = "NotDeterministic"
NOT_PARAMETER_INDEPENDENT = "NotParameterIndependent"


@dataclass(frozen=True)
class Property:
    """A V-valued property over a finite ontic state space."""

    ontic_states: tuple
    values: tuple
    f: Mapping[Hashable, Distribution]

    def __init__(self, ontic_states: Iterable[Hashable], values: Iterable[Hashable],
                 f: Mapping[Hashable, Distribution]) -> None:
        lam = tuple(dict.fromkeys(ontic_states))
        vs = tuple(dict.fromkeys(values))
        if not lam:
            raise ModelError("property over an empty ontic state space")
        missing = [x for x in lam if x not in f]
        if missing:
            raise ModelError(f"property undefined on ontic states {missing!r}")
        extra = [x for x in f if x not in lam]
        if extra:
            raise ModelError(f"property defined on unknown ontic states {extra!r}")
        vset = frozenset(vs)
        for x in lam:
            if not f[x].support <= vset:
                raise ModelError(f"f({x!r}) weights values outside V")
        object.__setattr__(self, "ontic_states", lam)
        object.__setattr__(self, "values", vs)
        object.__setattr__(self, "f", {x: f[x] for x in lam})

    __hash__ = None  # type: ignore[assignment]

    @classmethod
    def from_function(cls, ontic_states: Iterable[Hashable], values: Iterable[Hashable],
                      fn) -> Property:
        """The ontic property generated by ``fn : Lambda -> V``."""
        lam = list(ontic_states)
        return cls(lam, values, {x: Distribution.delta(fn(x)) for x in lam})


class Nature(enum.Enum):
    ONTIC = "Ontic"
    EPISTEMIC = "Epistemic"


@dataclass(frozen=True)
class Classification:
    nature: Nature
    generator: Mapping[Hashable, Hashable] | None = None
    witness: tuple | None = None

    @property
    def is_ontic(self) -> bool:
        return self.nature is Nature.ONTIC


def classify_property(prop: Property) -> Classification:
    """Ontic (with its generating function) or epistemic (with a witness).

    The epistemic witness is ``(lambda, v, v')``: the first ontic state whose
    distribution is not a delta, and the first two values it weights.
    """
    generator: dict[Hashable, Hashable] = {}
    for x in prop.ontic_states:
        d = prop.f[x]
        v = is_delta(d)
        if v is None:
            positive = [u for u in prop.values if d[u] > 0]
            return Classification(Nature.EPISTEMIC, witness=(x, positive[0], positive[1]))
        generator[x] = v
    return Classification(Nature.ONTIC, generator=generator)


def value_normalizers(prop: Property, prior: Distribution) -> dict[Hashable, Fraction]:
    """``sum_lambda f(lambda)(v) * prior(lambda)`` for each value ``v``."""
    _check_prior_carrier(prop, prior)
    return {v: sum((prop.f[x][v] * prior[x] for x in prop.ontic_states), ZERO)
            for v in prop.values}


def bayesian_inversion(prop: Property, prior: Distribution | None = None
                       ) -> dict[Hashable, Distribution | None]:
    """Posterior ``mu_v`` over ontic states for every value ``v``.

    ``prior`` defaults to uniform on ``Lambda``. Values whose total weight is
    zero map to ``None`` (the posterior is undefined) instead of being
    dropped.
    """
    if prior is None:
        prior = Distribution.uniform(prop.ontic_states)
    norms = value_normalizers(prop, prior)
    out: dict[Hashable, Distribution | None] = {}
    for v in prop.values:
        z = norms[v]
        if z == 0:
            out[v] = None
            continue
        out[v] = Distribution({x: prop.f[x][v] * prior[x] / z for x in prop.ontic_states},
                              prop.ontic_states)
    return out


def _check_prior_carrier(prop: Property, prior: Distribution) -> None:
    stray = prior.support - set(prop.ontic_states)
    if stray:
        raise PreconditionError(f"prior weights states outside Lambda: {sorted(map(str, stray))}")


def hs_ontic_by_supports(prop: Property, prior: Distribution | None = None) -> CheckResult:
    """Whether the posteriors ``mu_v`` have pairwise non-overlapping supports.

    Requires a full-support prior; on failure the witness is
    ``(lambda, v, v')`` with both posteriors positive at ``lambda``.
    """
    if prior is None:
        prior = Distribution.uniform(prop.ontic_states)
    _check_prior_carrier(prop, prior)
    missing = [x for x in prop.ontic_states if prior[x] == 0]
    if missing:
        raise PreconditionError(f"prior lacks full support; zero on {missing!r}")
    mus = bayesian_inversion(prop, prior)
    defined = [(v, mu) for v, mu in mus.items() if mu is not None]
    for x in prop.ontic_states:
        hits = [v for v, mu in defined if mu[x] > 0]
        if len(hits) >= 2:
            return CheckResult.fail("overlapping supports", (x, hits[0], hits[1]))
    return CheckResult.ok()


@dataclass(frozen=True, eq=True)
class OntologicalModel:
    """Preparation distributions over ``Lambda`` plus per-state responses.

    ``response`` is keyed by ``(lambda, context)`` where ``context`` is one
    of the scenario's contexts (a frozenset); each value is a distribution
    over assignments on that context. Preparation distributions are keyed by
    preparation only, so lambda-independence holds by construction.
    """

    scenario: MeasurementScenario
    preparations: tuple
    ontic_states: tuple
    prep_dists: Mapping[Hashable, Distribution]
    response: Mapping[tuple[Hashable, frozenset], Distribution]

    def __init__(self, scenario: MeasurementScenario, preparations: Iterable[Hashable],
                 ontic_states: Iterable[Hashable],
                 prep_dists: Mapping[Hashable, Distribution],
                 response: Mapping[tuple[Hashable, Iterable[Hashable]], Distribution]) -> None:
        preps = tuple(dict.fromkeys(preparations))
        lam = tuple(dict.fromkeys(ontic_states))
        if not preps:
            raise ModelError("a model needs at least one preparation")
        if not lam:
            raise ModelError("a model needs at least one ontic state")
        lam_set = frozenset(lam)
        pd: dict[Hashable, Distribution] = {}
        for p in preps:
            if p not in prep_dists:
                raise ModelError(f"no distribution over Lambda for preparation {p!r}")
            d = prep_dists[p]
            if not d.support <= lam_set:
                raise ModelError(f"preparation {p!r} weights states outside Lambda")
            pd[p] = d
        extra = [p for p in prep_dists if p not in preps]
        if extra:
            raise ModelError(f"distributions given for unknown preparations {extra!r}")
        resp: dict[tuple[Hashable, frozenset], Distribution] = {}
        for (x, ctx), d in response.items():
            c = frozenset(ctx)
            if x not in lam_set:
                raise ModelError(f"response given for unknown ontic state {x!r}")
            if c not in scenario.contexts:
                raise ModelError(f"response given for non-context {{{format_context(c)}}}")
            if (x, c) in resp:
                raise ModelError(f"duplicate response for ({x!r}, {{{format_context(c)}}})")
            for a in d.support:
                if not isinstance(a, Assignment) or a.domain != c:
                    raise ModelError(
                        f"response ({x!r}, {{{format_context(c)}}}) weights {a!r}, "
                        "which is not a joint outcome of that context")
                if any(o not in scenario.outcomes for o in a.values()):
                    raise ModelError(f"response ({x!r}, {{{format_context(c)}}}) uses unknown outcomes")
            resp[(x, c)] = d
        for x in lam:
            for c in scenario.contexts:
                if (x, c) not in resp:
                    raise ModelError(f"missing response for ({x!r}, {{{format_context(c)}}})")
        object.__setattr__(self, "scenario", scenario)
        object.__setattr__(self, "preparations", preps)
        object.__setattr__(self, "ontic_states", lam)
        object.__setattr__(self, "prep_dists", pd)
        object.__setattr__(self, "response", resp)

    __hash__ = None  # type: ignore[assignment]

    def response_to(self, x: Hashable, context: Iterable[Hashable]) -> Distribution:
        return self.response[(x, self.scenario.context(context))]


def operational_probabilities(h: OntologicalModel, p: Hashable,
                              context: Iterable[Hashable]) -> Distribution:
    """``h(o-bar | m-bar, p) = sum_lambda h(o-bar | m-bar, lambda) h(lambda | p)``."""
    if p not in h.prep_dists:
        raise ModelError(f"unknown preparation {p!r}")
    c = h.scenario.context(context)
    prep = h.prep_dists[p]
    out: dict[Assignment, Fraction] = {}
    for x in h.ontic_states:
        w = prep[x]
        if w == 0:
            continue
        for a, r in h.response[(x, c)].items():
            if r:
                out[a] = out.get(a, ZERO) + w * r
    return Distribution(out)


def _single_marginal(d: Distribution, m: Hashable) -> Distribution:
    return d.pushforward(lambda a: a[m])


def _observable(h: OntologicalModel, m: Hashable) -> tuple[Property | None, tuple | None]:
    ctxs = h.scenario.contexts_containing(m)
    fm: dict[Hashable, Distribution] = {}
    for x in h.ontic_states:
        first = _single_marginal(h.response[(x, ctxs[0])], m)
        for other in ctxs[1:]:
            if _single_marginal(h.response[(x, other)], m) != first:
                return None, (m, x, ctxs[0], other)
        fm[x] = first
    return Property(h.ontic_states, h.scenario.outcomes, fm), None


def extract_observable_properties(h: OntologicalModel) -> CheckResult:
    """The O-valued properties ``f_m(lambda)(o) = h(o | m, lambda)``.

    Succeeds with ``value = {m: Property}`` when every single-measurement
    marginal is independent of the context it is taken from; otherwise the
    witness is ``(m, lambda, context, context')`` of the first disagreement.
    """
    props: dict[Hashable, Property] = {}
    for m in h.scenario.measurements:
        prop, witness = _observable(h, m)
        if prop is None:
            return CheckResult.fail(NOT_PARAMETER_INDEPENDENT, witness)
        props[m] = prop
    return CheckResult.ok(props)


def is_deterministic(h: OntologicalModel) -> CheckResult:
    """Every response distribution is a delta; witness ``(lambda, context)``."""
    for x in h.ontic_states:
        for c in h.scenario.contexts:
            if is_delta(h.response[(x, c)]) is None:
                return CheckResult.fail(NOT_DETERMINISTIC, (x, c))
    return CheckResult.ok()


def is_parameter_independent(h: OntologicalModel) -> CheckResult:
    return extract_observable_properties(h)


def is_local(h: OntologicalModel) -> CheckResult:
    """Deterministic and parameter-independent.

    Also decides the same question through the observable properties (all
    defined and all ontic) and raises :class:`InconsistentRoutes` if the two
    answers differ.
    """
    det = is_deterministic(h)
    pi = extract_observable_properties(h)
    direct = det.holds and pi.holds
    via_properties = pi.holds and all(
        classify_property(f).is_ontic for f in pi.value.values())
    if direct != via_properties:
        raise InconsistentRoutes(
            f"determinism/PI route says {direct}, observable-property route says {via_properties}")
    if not det.holds:
        return det
    if not pi.holds:
        return pi
    return CheckResult.ok(pi.value)


def is_factorisable(h: OntologicalModel) -> CheckResult:
    """Responses equal the product of their single-measurement marginals.

    Precondition: parameter independence. Witness ``(lambda, context, o-bar)``.
    """
    pi = extract_observable_properties(h)
    if not pi.holds:
        raise PreconditionError(
            f"factorisability needs well-defined marginals; {pi.reason} at {pi.witness!r}")
    props: dict[Hashable, Property] = pi.value
    scen = h.scenario
    for x in h.ontic_states:
        for c in scen.contexts:
            d = h.response[(x, c)]
            for a in event_sheaf(scen, c):
                prod = ONE
                for m in c:
                    prod *= props[m].f[x][a[m]]
                if d[a] != prod:
                    return CheckResult.fail("NotFactorisable", (x, c, a))
    return CheckResult.ok()


def observable_property(h: OntologicalModel, m: Hashable) -> Property:
    """``f_m`` for a single measurement; raises if its marginal is ill-defined."""
    if m not in h.scenario.measurements:
        raise ModelError(f"unknown measurement {m!r}")
    prop, witness = _observable(h, m)
    if prop is None:
        _, x, c1, c2 = witness
        raise ModelError(f"h(o | {m}, {x}) differs between contexts "
                         f"{{{format_context(c1)}}} and {{{format_context(c2)}}}")
    return prop


def deterministic_response(global_assignment: Assignment, context: Iterable[Hashable]) -> Distribution:
    """The delta-product response ``prod_m delta(omega(m), o-bar(m))``."""
    return Distribution.delta(global_assignment.restrict(context))


def mix_models_prep(h: OntologicalModel, weights: Mapping[Hashable, Any], label: Hashable) -> OntologicalModel:
    """Copy of ``h`` with an extra preparation mixing existing ones."""
    new = mixture((w, h.prep_dists[p]) for p, w in weights.items())
    dists = dict(h.prep_dists)
    dists[label] = new
    return OntologicalModel(h.scenario, (*h.preparations, label), h.ontic_states, dists, h.response)
