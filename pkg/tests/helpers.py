"""Random instance generators and brute-force oracles shared by the tests.

The oracles work on plain dicts and never call into the checks they are
used to validate.
"""

from __future__ import annotations

import itertools
import math
import random
from fractions import Fraction

from ontolab.numeric import Distribution
from ontolab.ontology import OntologicalModel, deterministic_response
from ontolab.scenario import Assignment, bell_scenario

BELL = bell_scenario(2, 2, 2)
BINARY = ("0", "1")


# --- generators ---------------------------------------------------------------

def random_weights(rng: random.Random, keys, max_den: int = 12, zeros: bool = True) -> dict:
    """Rational weights with a common denominator of at most ``max_den``."""
    keys = list(keys)
    q = rng.randint(1, max_den)
    if not zeros:
        q = max(q, len(keys))
        cuts = sorted(rng.sample(range(1, q), len(keys) - 1)) if len(keys) > 1 else []
    else:
        cuts = sorted(rng.randint(0, q) for _ in range(len(keys) - 1))
    parts = [b - a for a, b in zip([0, *cuts], [*cuts, q])]
    return {k: Fraction(n, q) for k, n in zip(keys, parts)}


def random_distribution(rng: random.Random, keys, max_den: int = 12, zeros: bool = True) -> Distribution:
    return Distribution(random_weights(rng, keys, max_den, zeros))


def random_property_data(rng: random.Random) -> tuple[list, list, dict]:
    """``(Lambda, V, f)`` with |Lambda| <= 6, |V| <= 4; about half are ontic."""
    lam = [f"l{i}" for i in range(rng.randint(1, 6))]
    values = [f"v{i}" for i in range(rng.randint(1, 4))]
    ontic_bias = rng.random() < 0.5
    f = {}
    for x in lam:
        if ontic_bias or rng.random() < 0.3:
            pick = rng.choice(values)
            f[x] = {v: Fraction(int(v == pick)) for v in values}
        else:
            f[x] = random_weights(rng, values)
    return lam, values, f


def _global(rng: random.Random, scen=BELL) -> Assignment:
    return Assignment((m, rng.choice(scen.outcomes)) for m in scen.measurements)


def _prep_dists(rng: random.Random, lam: list, n_preps: int) -> dict:
    return {f"p{i}": random_distribution(rng, lam) for i in range(n_preps)}


def random_local_model(rng: random.Random, max_states: int = 6) -> OntologicalModel:
    """Deterministic, parameter-independent (2,2,2) model.

    Ontic states frequently share a global assignment so that merging is
    exercised.
    """
    lam = [f"l{i}" for i in range(rng.randint(1, max_states))]
    pool = [_global(rng) for _ in range(rng.randint(1, len(lam)))]
    omega = {x: rng.choice(pool) for x in lam}
    response = {(x, c): deterministic_response(omega[x], c) for x in lam for c in BELL.contexts}
    preps = _prep_dists(rng, lam, rng.randint(1, 3))
    return OntologicalModel(BELL, list(preps), lam, preps, response)


MODEL_KINDS = ("det-pi", "det-pd", "stoch-product", "stoch-mixture", "stoch-pd", "mostly-det")


def random_model(rng: random.Random, kind: str | None = None) -> OntologicalModel:
    """A (2,2,2) model of the requested kind (random kind by default)."""
    kind = kind or rng.choice(MODEL_KINDS)
    lam = [f"l{i}" for i in range(rng.randint(1, 4))]
    response = {}
    for x in lam:
        if kind == "det-pi":
            w = _global(rng)
            for c in BELL.contexts:
                response[(x, c)] = deterministic_response(w, c)
        elif kind == "det-pd":
            for c in BELL.contexts:
                response[(x, c)] = Distribution.delta(Assignment((m, rng.choice(BINARY)) for m in c))
        elif kind == "stoch-product":
            marg = {m: random_weights(rng, BINARY) for m in BELL.measurements}
            for c in BELL.contexts:
                response[(x, c)] = Distribution({
                    a: math.prod((marg[m][a[m]] for m in c), start=Fraction(1))
                    for a in _joint(c)})
        elif kind == "stoch-mixture":
            omegas = [_global(rng) for _ in range(3)]
            coef = random_weights(rng, range(3), zeros=True)
            for c in BELL.contexts:
                acc: dict = {}
                for i, w in enumerate(omegas):
                    a = w.restrict(c)
                    acc[a] = acc.get(a, Fraction(0)) + coef[i]
                response[(x, c)] = Distribution(acc)
        elif kind == "stoch-pd":
            for c in BELL.contexts:
                response[(x, c)] = random_distribution(rng, _joint(c))
        else:
            w = _global(rng)
            bad = rng.choice(BELL.contexts)
            for c in BELL.contexts:
                if c == bad and rng.random() < 0.7:
                    response[(x, c)] = random_distribution(rng, _joint(c))
                else:
                    response[(x, c)] = deterministic_response(w, c)
    preps = _prep_dists(rng, lam, rng.randint(1, 2))
    return OntologicalModel(BELL, list(preps), lam, preps, response)


def _joint(c) -> list[Assignment]:
    labels = sorted(c)
    return [Assignment(zip(labels, vals)) for vals in itertools.product(BINARY, repeat=len(labels))]


# --- oracles ------------------------------------------------------------------

def oracle_is_ontic(f: dict) -> bool:
    return all(sum(1 for w in row.values() if w > 0) == 1 for row in f.values())


def oracle_posteriors(f: dict, prior: dict) -> dict:
    values = {v for row in f.values() for v in row}
    out = {}
    for v in values:
        z = sum(f[x].get(v, 0) * prior[x] for x in f)
        out[v] = None if z == 0 else {x: f[x].get(v, 0) * prior[x] / z for x in f}
    return out


def _plain(d) -> dict:
    return {k: w for k, w in d.items() if w != 0}


def oracle_marginal(table: dict, m) -> dict:
    out: dict = {}
    for a, w in table.items():
        out[a[m]] = out.get(a[m], 0) + w
    return {k: w for k, w in out.items() if w != 0}


def oracle_local(h: OntologicalModel) -> bool:
    """All single-measurement marginals are context independent and deltas."""
    scen = h.scenario
    for x in h.ontic_states:
        for m in scen.measurements:
            margs = [oracle_marginal(_plain(h.response[(x, c)]), m)
                     for c in scen.contexts if m in c]
            if any(mg != margs[0] for mg in margs):
                return False
            if len(margs[0]) != 1:
                return False
    return True


def oracle_operational(h: OntologicalModel, p, c) -> dict:
    out: dict = {}
    for x in h.ontic_states:
        for a, r in h.response[(x, c)].items():
            out[a] = out.get(a, 0) + h.prep_dists[p][x] * r
    return {k: w for k, w in out.items() if w != 0}


def correlator(table: dict, ma: str, mb: str) -> Fraction:
    return sum((w if a[ma] == a[mb] else -w) for a, w in table.items())


def chsh_values(tables: dict) -> list[Fraction]:
    """The eight CHSH expressions of a (2,2,2) table keyed by context."""
    e = {(x, y): correlator(tables[frozenset({f"A{x}", f"B{y}"})], f"A{x}", f"B{y}")
         for x in (0, 1) for y in (0, 1)}
    out = []
    for odd in e:
        s = sum(-v if k == odd else v for k, v in e.items())
        out.extend([s, -s])
    return out


def oracle_chsh_local(tables: dict) -> bool:
    """Fine: a no-signalling (2,2,2) table is local iff every CHSH value is <= 2."""
    return all(s <= 2 for s in chsh_values(tables))


def pr_variant(rng: random.Random) -> dict:
    """One of the eight PR boxes: a xor b = xy xor alpha x xor beta y xor gamma."""
    al, be, ga = (rng.randint(0, 1) for _ in range(3))
    tables = {}
    for x in (0, 1):
        for y in (0, 1):
            c = frozenset({f"A{x}", f"B{y}"})
            parity = (x * y) ^ (al * x) ^ (be * y) ^ ga
            tables[c] = {a: (Fraction(1, 2) if (int(a[f"A{x}"]) ^ int(a[f"B{y}"])) == parity else Fraction(0))
                         for a in _joint(c)}
    return tables


def deterministic_tables(w: Assignment) -> dict:
    return {c: {a: Fraction(int(a == w.restrict(c))) for a in _joint(c)} for c in BELL.contexts}


def mix_tables(parts: list[tuple[Fraction, dict]]) -> dict:
    out = {c: {a: Fraction(0) for a in _joint(c)} for c in BELL.contexts}
    for coef, t in parts:
        for c in BELL.contexts:
            for a in _joint(c):
                out[c][a] += coef * t[c][a]
    return out


def _unique_solution(cols: list[list[Fraction]], b: list[Fraction]):
    """Solve ``[cols] x = b`` when the columns are independent; else ``None``."""
    m, k = len(b), len(cols)
    aug = [[cols[j][i] for j in range(k)] + [b[i]] for i in range(m)]
    r = 0
    for c in range(k):
        piv = next((i for i in range(r, m) if aug[i][c] != 0), None)
        if piv is None:
            return None
        aug[r], aug[piv] = aug[piv], aug[r]
        for i in range(m):
            if i != r and aug[i][c] != 0:
                f = aug[i][c] / aug[r][c]
                aug[i] = [u - f * v for u, v in zip(aug[i], aug[r])]
        r += 1
    if any(row[-1] != 0 for row in aug[r:]):
        return None
    return [aug[i][-1] / aug[i][i] for i in range(k)]


def oracle_feasible(a: list[list[Fraction]], b: list[Fraction]) -> bool:
    """``A x = b, x >= 0`` by enumerating basic solutions."""
    n = len(a[0])
    for size in range(0, len(b) + 1):
        for cols in itertools.combinations(range(n), size):
            sol = _unique_solution([[row[j] for row in a] for j in cols], list(b))
            if sol is not None and all(v >= 0 for v in sol):
                return True
    return False
