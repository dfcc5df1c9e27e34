"""Exact rationals and finite probability distributions.

Every probability in the core is a :class:`fractions.Fraction`. Floats are
refused at the boundary so that predicates such as "is a delta" or "have
disjoint supports" are decided exactly.
"""

from __future__ import annotations

import re
from fractions import Fraction
from typing import Any, Callable, Iterable, Iterator, Mapping

from .errors import DistributionError

Rational = Fraction


_RATIONAL_RE = re.compile(r"^\s*(-?\d+)(?:\s*/\s*(\d+))?\s*$")

ZERO = Fraction(0)
ONE = Fraction(1)


def as_rational(x: Any) -> Fraction:
    """Coerce ``x`` to an exact rational.

    Accepts ``int``, ``Fraction`` and strings of the form ``"p"`` or
    ``"p/q"``. Floats and bools are rejected.
    """
    if isinstance(x, bool):
        raise TypeError("bool is not a probability")
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, float):
        raise TypeError(f"floating point value {x!r} refused; use an exact rational")
    if isinstance(x, str):
        return parse_rational(x)
    raise TypeError(f"cannot interpret {x!r} as a rational")


def parse_rational(text: str) -> Fraction:
    m = _RATIONAL_RE.match(text)
    if m is None:
        raise ValueError(f"malformed rational {text!r}; expected 'p' or 'p/q'")
    num, den = m.group(1), m.group(2)
    if den is not None and int(den) == 0:
        raise ValueError(f"zero denominator in {text!r}")
    return Fraction(int(num), int(den) if den is not None else 1)


def format_rational(q: Fraction) -> str:
    """Serialize as ``"p/q"``, or ``"p"`` when the denominator is 1."""
    return str(as_rational(q))


class _Weights:
    """Immutable finite map from elements to rationals; shared base."""

    __slots__ = ("_weights", "_carrier", "_hash")

    def __init__(self, weights: Mapping[Any, Any] | Iterable[tuple[Any, Any]],
                 carrier: Iterable[Any] | None = None) -> None:
        items = weights.items() if isinstance(weights, Mapping) else weights
        stored: dict[Any, Fraction] = {}
        for key, value in items:
            if key in stored:
                raise DistributionError(f"duplicate element {key!r}")
            stored[key] = as_rational(value)
        self._weights = stored
        self._carrier = frozenset(carrier) if carrier is not None else None
        if self._carrier is not None:
            stray = [k for k in stored if k not in self._carrier]
            if stray:
                raise DistributionError(f"elements {stray!r} outside the declared carrier")
        self._hash: int | None = None
        if sum(stored.values(), ZERO) != ONE:
            raise DistributionError(
                f"weights sum to {sum(stored.values(), ZERO)}, not exactly 1")

    def __getitem__(self, element: Any) -> Fraction:
        """Weight of ``element``; zero for anything not stored."""
        return self._weights.get(element, ZERO)

    def __contains__(self, element: object) -> bool:
        return element in self._weights

    def __iter__(self) -> Iterator[Any]:
        return iter(self._weights)

    def __len__(self) -> int:
        return len(self._weights)

    def keys(self):
        return self._weights.keys()

    def items(self):
        return self._weights.items()

    def values(self):
        return self._weights.values()

    @property
    def carrier(self) -> frozenset | None:
        """The declared carrier set, or ``None`` when left open."""
        return self._carrier

    @property
    def support(self) -> frozenset:
        return frozenset(k for k, w in self._weights.items() if w != 0)

    def _nonzero(self) -> frozenset:
        return frozenset((k, w) for k, w in self._weights.items() if w != 0)

    def __eq__(self, other: object) -> bool:
        if type(other) is not type(self):
            return NotImplemented
        return self._nonzero() == other._nonzero()

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((type(self).__name__, self._nonzero()))
        return self._hash

    def __repr__(self) -> str:
        body = ", ".join(f"{k!r}: {w}" for k, w in self._weights.items())
        return f"{type(self).__name__}({{{body}}})"


class Distribution(_Weights):
    """A normalized, non-negative weighting of a finite set.

    Zero-weight entries may be stored but never count towards the support.
    Equality compares the non-zero part only, so ``{a: 1, b: 0} == {a: 1}``.
    """

    __slots__ = ()

    def __init__(self, weights: Mapping[Any, Any] | Iterable[tuple[Any, Any]],
                 carrier: Iterable[Any] | None = None) -> None:
        super().__init__(weights, carrier)
        negative = {k: w for k, w in self._weights.items() if w < 0}
        if negative:
            raise DistributionError(f"negative weights {negative!r}")
        # the sum-to-one check already excludes an empty support

    @classmethod
    def delta(cls, element: Any, carrier: Iterable[Any] | None = None) -> Distribution:
        return cls({element: ONE}, carrier)

    @classmethod
    def uniform(cls, elements: Iterable[Any]) -> Distribution:
        elems = list(dict.fromkeys(elements))
        if not elems:
            raise DistributionError("uniform distribution over the empty set")
        w = Fraction(1, len(elems))
        return cls({e: w for e in elems}, elems)

    def pushforward(self, fn: Callable[[Any], Any]) -> Distribution:
        """Image distribution under ``fn`` (marginalization when ``fn`` restricts)."""
        out: dict[Any, Fraction] = {}
        for k, w in self._weights.items():
            if w == 0:
                continue
            img = fn(k)
            out[img] = out.get(img, ZERO) + w
        return Distribution(out)

    def with_carrier(self, carrier: Iterable[Any]) -> Distribution:
        return Distribution(self._weights, carrier)


class SignedWeights(_Weights):
    """Affine (possibly negative) weights summing to exactly 1."""

    __slots__ = ()

    @property
    def negative_part(self) -> dict[Any, Fraction]:
        return {k: w for k, w in self._weights.items() if w < 0}

    def pushforward(self, fn: Callable[[Any], Any]) -> SignedWeights:
        out: dict[Any, Fraction] = {}
        for k, w in self._weights.items():
            if w == 0:
                continue
            img = fn(k)
            out[img] = out.get(img, ZERO) + w
        return SignedWeights(out)


def _check_carriers(dists: Iterable[_Weights]) -> None:
    declared = [d.carrier for d in dists if d.carrier is not None]
    if declared and any(c != declared[0] for c in declared):
        raise DistributionError("distributions declare different carrier sets")
    if declared:
        for d in dists:
            if not d.support <= declared[0]:
                raise DistributionError(
                    f"support {sorted(map(str, d.support))} leaves the declared carrier")


def mixture(components: Iterable[tuple[Any, Distribution]]) -> Distribution:
    """Convex combination ``sum_i c_i * d_i`` computed pointwise."""
    parts = [(as_rational(c), d) for c, d in components]
    if not parts:
        raise DistributionError("mixture of no components")
    for c, _ in parts:
        if c < 0:
            raise DistributionError(f"negative mixture coefficient {c}")
    total = sum((c for c, _ in parts), ZERO)
    if total != ONE:
        raise DistributionError(f"mixture coefficients sum to {total}, not 1")
    dists = [d for _, d in parts]
    _check_carriers(dists)
    out: dict[Any, Fraction] = {}
    for c, d in parts:
        for k, w in d.items():
            out[k] = out.get(k, ZERO) + c * w
    carrier = next((d.carrier for d in dists if d.carrier is not None), None)
    return Distribution(out, carrier)


def is_delta(d: Distribution) -> Any | None:
    """The unique element of weight 1, or ``None`` if ``d`` is not a delta."""
    supp = d.support
    if len(supp) == 1:
        (only,) = supp
        return only
    return None


def supports_disjoint(d1: _Weights, d2: _Weights) -> tuple[bool, Any | None]:
    """``(True, None)`` if supports are disjoint, else ``(False, witness)``.

    The witness is the first element of ``d1``'s stored order that both
    distributions weight positively.
    """
    _check_carriers([d1, d2])
    s2 = d2.support
    for k in d1.keys():
        if d1[k] != 0 and k in s2:
            return False, k
    return True, None

