"""Measurement and preparation scenarios and the event sheaf over them."""

from __future__ import annotations

import itertools
import os
import string
from dataclasses import dataclass
from typing import Any, Hashable, Iterable, Iterator, Mapping

from .errors import ScenarioError, ScenarioTooLarge

DEFAULT_MAX_GLOBAL_ASSIGNMENTS = 100_000
RESERVED_CHARS = frozenset(":,|")


def max_global_assignments() -> int:
    raw = os.environ.get("ONTOLAB_MAX_GLOBAL_ASSIGNMENTS")
    if raw is None:
        return DEFAULT_MAX_GLOBAL_ASSIGNMENTS
    try:
        value = int(raw)
    except ValueError:
        raise ScenarioError(f"ONTOLAB_MAX_GLOBAL_ASSIGNMENTS={raw!r} is not an integer") from None
    if value < 1:
        raise ScenarioError("ONTOLAB_MAX_GLOBAL_ASSIGNMENTS must be positive")
    return value


class Assignment(Mapping):
    """A total function from a finite set of labels to values.

    Used for joint outcomes ``C -> O``, global assignments ``X -> O`` and
    joint ontic states ``sites -> Lambda``. Immutable and hashable; two
    assignments are equal iff they are the same function.
    """

    __slots__ = ("_map", "_hash")

    def __init__(self, mapping: Mapping[Any, Any] | Iterable[tuple[Any, Any]] = ()) -> None:
        self._map = dict(mapping)
        self._hash = hash(frozenset(self._map.items()))

    def __getitem__(self, key: Any) -> Any:
        return self._map[key]

    def __iter__(self) -> Iterator[Any]:
        return iter(self._map)

    def __len__(self) -> int:
        return len(self._map)

    def __hash__(self) -> int:
        return self._hash

    def __eq__(self, other: object) -> bool:
        if isinstance(other, Assignment):
            return self._map == other._map
        return NotImplemented

    @property
    def domain(self) -> frozenset:
        return frozenset(self._map)

    def restrict(self, subset: Iterable[Any]) -> Assignment:
        sub = frozenset(subset)
        if not sub <= self.domain:
            missing = sorted(map(str, sub - self.domain))
            raise ScenarioError(f"cannot restrict to labels {missing} outside the domain")
        return Assignment((k, v) for k, v in self._map.items() if k in sub)

    def __str__(self) -> str:
        return ",".join(f"{k}:{v}" for k, v in sorted(self._map.items(), key=lambda kv: str(kv[0])))

    def __repr__(self) -> str:
        return f"Assignment({self})"


def restrict(assignment: Assignment, subset: Iterable[Any]) -> Assignment:
    return assignment.restrict(subset)


def format_context(context: Iterable[Any]) -> str:
    return ",".join(sorted(str(m) for m in context))


def _check_labels(kind: str, labels: Iterable[Hashable]) -> None:
    seen: dict[str, Any] = {}
    for label in labels:
        text = str(label)
        if not text or RESERVED_CHARS & set(text):
            raise ScenarioError(f"{kind} label {label!r} is empty or contains one of ':,|'")
        if text in seen and seen[text] != label:
            raise ScenarioError(f"{kind} labels {seen[text]!r} and {label!r} print identically")
        seen[text] = label


@dataclass(frozen=True)
class MeasurementScenario:
    """Measurements ``X``, outcomes ``O`` and compatible contexts ``M``.

    Declaration order of measurements and outcomes fixes the lexicographic
    enumeration order used everywhere, including LP variable order.
    """

    measurements: tuple
    outcomes: tuple
    contexts: tuple

    def __init__(self, measurements: Iterable[Hashable], outcomes: Iterable[Hashable],
                 contexts: Iterable[Iterable[Hashable]]) -> None:
        xs = tuple(dict.fromkeys(measurements))
        os_ = tuple(dict.fromkeys(outcomes))
        ctxs = tuple(dict.fromkeys(frozenset(c) for c in contexts))
        if not xs:
            raise ScenarioError("a scenario needs at least one measurement")
        if not os_:
            raise ScenarioError("a scenario needs at least one outcome")
        _check_labels("measurement", xs)
        _check_labels("outcome", os_)
        xset = set(xs)
        for c in ctxs:
            if not c:
                raise ScenarioError("contexts must be non-empty")
            if not c <= xset:
                raise ScenarioError(
                    f"context {{{format_context(c)}}} uses unknown measurements "
                    f"{sorted(map(str, c - xset))}")
        covered = set().union(*ctxs) if ctxs else set()
        unreachable = [m for m in xs if m not in covered]
        if unreachable:
            raise ScenarioError(f"measurements {unreachable!r} appear in no context")
        object.__setattr__(self, "measurements", xs)
        object.__setattr__(self, "outcomes", os_)
        object.__setattr__(self, "contexts", ctxs)

    def context(self, labels: Iterable[Hashable]) -> frozenset:
        """Normalize ``labels`` to one of the declared contexts."""
        c = frozenset(labels)
        if c not in self.contexts:
            raise ScenarioError(f"{{{format_context(c)}}} is not a context of this scenario")
        return c

    def contexts_containing(self, m: Hashable) -> list[frozenset]:
        return [c for c in self.contexts if m in c]

    def is_compatible(self, labels: Iterable[Hashable]) -> bool:
        """Whether ``labels`` lies in the downward closure of the contexts."""
        c = frozenset(labels)
        return any(c <= ctx for ctx in self.contexts)

    def ordered(self, labels: Iterable[Hashable]) -> list:
        c = set(labels)
        return [m for m in self.measurements if m in c]

    def sort_key(self, assignment: Assignment) -> tuple:
        """Lexicographic key consistent with :func:`event_sheaf` order."""
        o_index = {o: i for i, o in enumerate(self.outcomes)}
        return tuple(o_index[assignment[m]] for m in self.ordered(assignment.domain))

    def outcome_label(self, text: str) -> Hashable:
        for o in self.outcomes:
            if str(o) == text:
                return o
        raise ScenarioError(f"unknown outcome {text!r}")

    def measurement_label(self, text: str) -> Hashable:
        for m in self.measurements:
            if str(m) == text:
                return m
        raise ScenarioError(f"unknown measurement {text!r}")

    def global_assignment_count(self) -> int:
        return len(self.outcomes) ** len(self.measurements)

    def global_assignments(self, limit: int | None = None) -> Iterator[Assignment]:
        """Stream ``E(X)`` lazily in lexicographic order.

        ``limit`` (default: ``ONTOLAB_MAX_GLOBAL_ASSIGNMENTS``) bounds the
        size; exceeding it raises :class:`ScenarioTooLarge` up front.
        """
        bound = max_global_assignments() if limit is None else limit
        n = self.global_assignment_count()
        if n > bound:
            raise ScenarioTooLarge(
                f"|E(X)| = {len(self.outcomes)}^{len(self.measurements)} = {n} exceeds {bound}")
        return iter_assignments(self.measurements, self.outcomes)


def iter_assignments(labels: Iterable[Hashable], values: Iterable[Hashable]) -> Iterator[Assignment]:
    labels = tuple(labels)
    values = tuple(values)
    for combo in itertools.product(values, repeat=len(labels)):
        yield Assignment(zip(labels, combo))


def event_sheaf(scenario: MeasurementScenario, measurements: Iterable[Hashable]) -> list[Assignment]:
    """All joint outcomes ``C -> O`` for ``C`` a subset of ``X``, lexicographically."""
    c = frozenset(measurements)
    unknown = c - set(scenario.measurements)
    if unknown:
        raise ScenarioError(f"measurements {sorted(map(str, unknown))} are not in the scenario")
    return list(iter_assignments(scenario.ordered(c), scenario.outcomes))


def _party_name(i: int) -> str:
    if i < 26:
        return string.ascii_uppercase[i]
    return f"P{i}_"


def bell_scenario(parties: int, settings: int, outcomes: int) -> MeasurementScenario:
    """The ``(n, k, l)`` Bell scenario: one of ``k`` settings per party.

    Measurements are named ``A0, A1, B0, ...``; outcomes ``"0" .. "l-1"``.
    """
    for name, v in (("parties", parties), ("settings", settings), ("outcomes", outcomes)):
        if not isinstance(v, int) or v < 1:
            raise ScenarioError(f"{name} must be a positive integer, got {v!r}")
    sites = [[f"{_party_name(i)}{s}" for s in range(settings)] for i in range(parties)]
    xs = [m for site in sites for m in site]
    contexts = [frozenset(choice) for choice in itertools.product(*sites)]
    return MeasurementScenario(xs, [str(o) for o in range(outcomes)], contexts)


@dataclass(frozen=True)
class PreparationScenario:
    """Sites, per-site preparations and the admissible joint preparations.

    A joint preparation is a tuple aligned with ``sites``, one preparation
    per site. Ontic states ``Lambda`` are shared by all sites.
    """

    sites: tuple
    preparations: Mapping[Hashable, tuple]
    contexts: tuple
    ontic_states: tuple

    def __init__(self, sites: Iterable[Hashable], contexts: Iterable[Iterable[Hashable]],
                 ontic_states: Iterable[Hashable],
                 preparations: Mapping[Hashable, Iterable[Hashable]] | None = None) -> None:
        ss = tuple(dict.fromkeys(sites))
        if not ss:
            raise ScenarioError("a preparation scenario needs at least one site")
        _check_labels("site", ss)
        lam = tuple(dict.fromkeys(ontic_states))
        if not lam:
            raise ScenarioError("the ontic state space is empty")
        _check_labels("ontic state", lam)
        ctxs = tuple(dict.fromkeys(tuple(c) for c in contexts))
        if not ctxs:
            raise ScenarioError("a preparation scenario needs at least one preparation context")
        for c in ctxs:
            if len(c) != len(ss):
                raise ScenarioError(
                    f"preparation context {list(c)!r} must select exactly one preparation "
                    f"for each of the {len(ss)} sites")
        derived = {s: tuple(dict.fromkeys(c[i] for c in ctxs)) for i, s in enumerate(ss)}
        if preparations is None:
            preps = derived
        else:
            preps = {s: tuple(dict.fromkeys(preparations.get(s, ()))) for s in ss}
            for s in ss:
                extra = set(derived[s]) - set(preps[s])
                if extra:
                    raise ScenarioError(f"site {s!r} uses undeclared preparations {sorted(map(str, extra))}")
        for s in ss:
            _check_labels("preparation", preps[s])
        object.__setattr__(self, "sites", ss)
        object.__setattr__(self, "preparations", preps)
        object.__setattr__(self, "contexts", ctxs)
        object.__setattr__(self, "ontic_states", lam)

    def __hash__(self) -> int:
        return hash((self.sites, self.contexts, self.ontic_states))

    def joint_states(self) -> Iterator[Assignment]:
        """All ``lambda-bar : sites -> Lambda`` in lexicographic order."""
        return iter_assignments(self.sites, self.ontic_states)

    def context_label(self, context: tuple) -> Assignment:
        return Assignment(zip(self.sites, context))
