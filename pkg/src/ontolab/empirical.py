"""Empirical models: no-signalling, local realizability and signed decompositions."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Hashable, Iterable, Mapping

from . import lp
from .errors import ModelError
from .numeric import ONE, ZERO, Distribution, SignedWeights, as_rational, mixture
from .ontology import OntologicalModel, operational_probabilities
from .scenario import Assignment, MeasurementScenario, bell_scenario, event_sheaf, format_context
from .verdict import CheckResult

NOT_NO_SIGNALLING = "NotNoSignalling"


@dataclass(frozen=True)
class EmpiricalModel:
    """Outcome tables ``e(o-bar | m-bar, p)`` for every preparation and context."""

    scenario: MeasurementScenario
    preparations: tuple
    tables: Mapping[tuple[Hashable, frozenset], Distribution]

    def __init__(self, scenario: MeasurementScenario, preparations: Iterable[Hashable],
                 tables: Mapping[tuple[Hashable, Iterable[Hashable]], Distribution]) -> None:
        preps = tuple(dict.fromkeys(preparations))
        if not preps:
            raise ModelError("an empirical model needs at least one preparation")
        norm: dict[tuple[Hashable, frozenset], Distribution] = {}
        for (p, ctx), d in tables.items():
            c = frozenset(ctx)
            if p not in preps:
                raise ModelError(f"table given for unknown preparation {p!r}")
            if c not in scenario.contexts:
                raise ModelError(f"table given for non-context {{{format_context(c)}}}")
            for a in d.support:
                if not isinstance(a, Assignment) or a.domain != c:
                    raise ModelError(f"table ({p!r}, {{{format_context(c)}}}) weights {a!r}")
                if any(o not in scenario.outcomes for o in a.values()):
                    raise ModelError(f"table ({p!r}, {{{format_context(c)}}}) uses unknown outcomes")
            norm[(p, c)] = d
        ordered = {}
        for p in preps:
            for c in scenario.contexts:
                if (p, c) not in norm:
                    raise ModelError(f"missing table for ({p!r}, {{{format_context(c)}}})")
                ordered[(p, c)] = norm[(p, c)]
        object.__setattr__(self, "scenario", scenario)
        object.__setattr__(self, "preparations", preps)
        object.__setattr__(self, "tables", ordered)

    __hash__ = None  # type: ignore[assignment]

    def table(self, p: Hashable, context: Iterable[Hashable]) -> Distribution:
        return self.tables[(p, self.scenario.context(context))]


def from_ontological(h: OntologicalModel) -> EmpiricalModel:
    tables = {(p, c): operational_probabilities(h, p, c)
              for p in h.preparations for c in h.scenario.contexts}
    return EmpiricalModel(h.scenario, h.preparations, tables)


def mix_empirical(components: Iterable[tuple[Any, EmpiricalModel]]) -> EmpiricalModel:
    """Pointwise convex combination of empirical models on the same scenario."""
    parts = [(as_rational(c), e) for c, e in components]
    first = parts[0][1]
    for _, e in parts:
        if e.scenario != first.scenario or e.preparations != first.preparations:
            raise ModelError("can only mix empirical models over the same scenario and preparations")
    tables = {key: mixture((c, e.tables[key]) for c, e in parts) for key in first.tables}
    return EmpiricalModel(first.scenario, first.preparations, tables)


def is_no_signalling(e: EmpiricalModel) -> CheckResult:
    """Shared marginals agree across every pair of overlapping contexts.

    Single measurements are checked first, so the usual witness is
    ``(p, m, context, context')``; if only a larger shared subset disagrees,
    the second slot holds that subset as a frozenset.
    """
    for p in e.preparations:
        witness = _signalling_witness(e, p)
        if witness is not None:
            return CheckResult.fail(NOT_NO_SIGNALLING, witness)
    return CheckResult.ok()


def _signalling_witness(e: EmpiricalModel, p: Hashable) -> tuple | None:
    scen = e.scenario
    ctxs = scen.contexts
    for m in scen.measurements:
        holders = [c for c in ctxs if m in c]
        ref = e.tables[(p, holders[0])].pushforward(lambda a: a[m])
        for other in holders[1:]:
            if e.tables[(p, other)].pushforward(lambda a: a[m]) != ref:
                return (p, m, holders[0], other)
    for i, ci in enumerate(ctxs):
        for cj in ctxs[i + 1:]:
            shared = ci & cj
            if len(shared) < 2:
                continue
            mi = e.tables[(p, ci)].pushforward(lambda a: a.restrict(shared))
            mj = e.tables[(p, cj)].pushforward(lambda a: a.restrict(shared))
            if mi != mj:
                return (p, shared, ci, cj)
    return None


@dataclass(frozen=True)
class Feasible:
    """A local realization: a distribution over global assignments."""

    preparation: Hashable
    weights: Distribution

    def __bool__(self) -> bool:
        return True


@dataclass(frozen=True)
class Infeasible:
    """A separating functional over the rows ``(context, o-bar)``.

    ``pairing`` is its (strictly negative) value on the table; on the table
    of every deterministic global assignment it is non-negative.
    """

    preparation: Hashable
    certificate: Mapping[tuple[frozenset, Assignment], Fraction]
    pairing: Fraction

    def __bool__(self) -> bool:
        return False


class _System:
    """Marginalization constraints ``sum_{omega|C = o} d(omega) = e(o | C)``."""

    def __init__(self, scenario: MeasurementScenario) -> None:
        self.scenario = scenario
        self.columns = list(scenario.global_assignments())
        self.rows = [(c, a) for c in scenario.contexts for a in event_sheaf(scenario, c)]
        index = {row: i for i, row in enumerate(self.rows)}
        self.matrix = [[ZERO] * len(self.columns) for _ in self.rows]
        for j, omega in enumerate(self.columns):
            for c in scenario.contexts:
                self.matrix[index[(c, omega.restrict(c))]][j] = ONE

    def rhs(self, e: EmpiricalModel, p: Hashable) -> list[Fraction]:
        return [e.tables[(p, c)][a] for c, a in self.rows]


def realized_tables(scenario: MeasurementScenario, weights: Mapping[Assignment, Fraction] | Any
                    ) -> dict[frozenset, dict[Assignment, Fraction]]:
    """Context marginals of (possibly signed) weights over global assignments."""
    out: dict[frozenset, dict[Assignment, Fraction]] = {}
    for c in scenario.contexts:
        acc: dict[Assignment, Fraction] = {}
        for omega, w in weights.items():
            if w:
                a = omega.restrict(c)
                acc[a] = acc.get(a, ZERO) + w
        out[c] = {a: v for a, v in acc.items() if v != 0}
    return out


def reproduces(e: EmpiricalModel, p: Hashable, weights: Mapping[Assignment, Fraction] | Any) -> bool:
    """Whether ``weights`` marginalize to ``e``'s tables at ``p`` with zero residual."""
    got = realized_tables(e.scenario, weights)
    for c in e.scenario.contexts:
        want = {a: w for a, w in e.tables[(p, c)].items() if w != 0}
        if got[c] != want:
            return False
    return True


def local_realizability(e: EmpiricalModel, p: Hashable) -> Feasible | Infeasible:
    """Decide exactly whether ``e`` at preparation ``p`` has a local realization.

    Columns are the global assignments in the scenario's lexicographic
    order; rows are ``(context, o-bar)`` pairs. Both outcomes are verified
    before returning: realizations re-marginalize to the table, certificates
    are checked against the table and every deterministic assignment.
    """
    if p not in e.preparations:
        raise ModelError(f"unknown preparation {p!r}")
    system = _System(e.scenario)
    b = system.rhs(e, p)
    res = lp.phase_one(system.matrix, b)
    if res.feasible:
        weights = Distribution({omega: x for omega, x in zip(system.columns, res.x) if x != 0})
        if not reproduces(e, p, weights):
            raise AssertionError("Phase-I solution does not reproduce the table")
        return Feasible(p, weights)
    cert = {row: y for row, y in zip(system.rows, res.certificate)}
    verdict = Infeasible(p, cert, certificate_pairing(cert, e.tables, p))
    if not certificate_is_sound(e, verdict):
        raise AssertionError("Phase-I certificate failed its soundness check")
    return verdict


def certificate_pairing(cert: Mapping[tuple[frozenset, Assignment], Fraction],
                        tables: Mapping[tuple[Hashable, frozenset], Distribution], p: Hashable) -> Fraction:
    return sum((y * tables[(p, c)][a] for (c, a), y in cert.items()), ZERO)


def certificate_is_sound(e: EmpiricalModel, verdict: Infeasible) -> bool:
    """Negative on the table, non-negative on every deterministic table."""
    if certificate_pairing(verdict.certificate, e.tables, verdict.preparation) >= 0:
        return False
    for omega in e.scenario.global_assignments():
        value = sum((verdict.certificate.get((c, omega.restrict(c)), ZERO)
                     for c in e.scenario.contexts), ZERO)
        if value < 0:
            return False
    return True


def quasi_local_decomposition(e: EmpiricalModel, p: Hashable) -> CheckResult:
    """Signed weights over global assignments reproducing ``e`` at ``p``.

    A non-negative realization is returned whenever one exists. Otherwise
    the affine system is solved by Gauss-Jordan elimination; that solution is
    one of many and is not canonical. Signalling tables fail with the
    marginal-mismatch witness.
    """
    if p not in e.preparations:
        raise ModelError(f"unknown preparation {p!r}")
    witness = _signalling_witness(e, p)
    if witness is not None:
        return CheckResult.fail(NOT_NO_SIGNALLING, witness)
    local = local_realizability(e, p)
    if isinstance(local, Feasible):
        return CheckResult.ok(SignedWeights(dict(local.weights.items())))
    system = _System(e.scenario)
    x = lp.solve_affine(system.matrix, system.rhs(e, p))
    if x is None:
        raise ModelError("no signed realization exists although the table is no-signalling")
    weights = SignedWeights({omega: v for omega, v in zip(system.columns, x) if v != 0})
    if not reproduces(e, p, weights):
        raise AssertionError("signed solution does not reproduce the table")
    return CheckResult.ok(weights)


def pr_box(visibility: Any = 1, scenario: MeasurementScenario | None = None,
           preparation: Hashable = "p") -> EmpiricalModel:
    """``v * PR + (1 - v) * uniform`` on the (2,2,2) Bell scenario.

    The PR box outputs ``a xor b = x * y`` uniformly at random.
    """
    v = as_rational(visibility)
    if not 0 <= v <= 1:
        raise ValueError(f"visibility {v} outside [0, 1]")
    scen = scenario or bell_scenario(2, 2, 2)
    tables = {}
    for c in scen.contexts:
        (ma, mb) = scen.ordered(c)
        x, y = int(ma[1:]), int(mb[1:])
        weights = {}
        for a in event_sheaf(scen, c):
            oa, ob = int(a[ma]), int(a[mb])
            pr = Fraction(1, 2) if (oa ^ ob) == x * y else ZERO
            weights[a] = v * pr + (1 - v) * Fraction(1, 4)
        tables[(preparation, c)] = Distribution(weights)
    return EmpiricalModel(scen, [preparation], tables)


def visibility_threshold(make_model, p: Hashable, iterations: int = 20,
                         lo: Any = 0, hi: Any = 1) -> tuple[Fraction, Fraction]:
    """Bisect the local/non-local boundary along a one-parameter family.

    ``make_model(v)`` must be local at ``lo`` and non-local at ``hi``. Returns
    ``(v_feasible, v_infeasible)`` after ``iterations`` halvings, using exact
    dyadic midpoints.
    """
    lo_q, hi_q = as_rational(lo), as_rational(hi)
    if not local_realizability(make_model(lo_q), p):
        raise ValueError(f"family is not local at the lower end {lo_q}")
    if local_realizability(make_model(hi_q), p):
        raise ValueError(f"family is local at the upper end {hi_q}")
    for _ in range(iterations):
        mid = (lo_q + hi_q) / 2
        if local_realizability(make_model(mid), p):
            lo_q = mid
        else:
            hi_q = mid
    return lo_q, hi_q
