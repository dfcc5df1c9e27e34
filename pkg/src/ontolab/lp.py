"""Exact feasibility for ``A x = b`` over the rationals.

:func:`phase_one` decides whether a non-negative solution exists using the
Phase-I simplex method with Bland's anti-cycling rule. All arithmetic is in
:class:`~fractions.Fraction`, so there are no tolerances: the answer is a
solution or a Farkas certificate, both checked exactly before returning.

:func:`solve_affine` finds a solution with unrestricted signs by Gauss-Jordan
elimination using the same lowest-index pivoting convention.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

ZERO = Fraction(0)
ONE = Fraction(1)


@dataclass(frozen=True)
class PhaseOneResult:
    """Either ``x`` with ``A x = b, x >= 0`` or ``y`` with ``A^T y >= 0, b.y < 0``."""

    feasible: bool
    x: tuple[Fraction, ...] | None = None
    certificate: tuple[Fraction, ...] | None = None
    pivots: int = 0


def _as_rows(a: Sequence[Sequence[Fraction]], b: Sequence[Fraction]) -> tuple[list[list[Fraction]], list[Fraction], int]:
    m = len(a)
    if len(b) != m:
        raise ValueError(f"A has {m} rows but b has {len(b)} entries")
    n = len(a[0]) if m else 0
    rows = []
    for i, row in enumerate(a):
        if len(row) != n:
            raise ValueError(f"row {i} of A has {len(row)} entries, expected {n}")
        rows.append([Fraction(v) for v in row])
    return rows, [Fraction(v) for v in b], n


def phase_one(a: Sequence[Sequence[Fraction]], b: Sequence[Fraction]) -> PhaseOneResult:
    """Decide ``exists x >= 0 : A x = b`` exactly.

    Artificial variables ``n .. n+m-1`` start basic. Entering variable: the
    lowest-index column with negative reduced cost; leaving variable: minimum
    ratio, ties to the lowest basic index (Bland). At optimum the simplex
    multipliers ``y_i = 1 - r(artificial_i)`` give the dual solution; when the
    optimum is positive, ``-S y`` (``S`` the row sign flips) is the returned
    certificate.
    """
    rows, rhs, n = _as_rows(a, b)
    m = len(rows)
    signs = []
    for i in range(m):
        if rhs[i] < 0:
            rows[i] = [-v for v in rows[i]]
            rhs[i] = -rhs[i]
            signs.append(-1)
        else:
            signs.append(1)

    width = n + m
    tab = [row + [ONE if k == i else ZERO for k in range(m)] for i, row in enumerate(rows)]
    basis = [n + i for i in range(m)]
    reduced = [-sum((tab[i][j] for i in range(m)), ZERO) for j in range(n)] + [ZERO] * m
    pivots = 0

    while True:
        enter = next((j for j in range(width) if reduced[j] < 0), None)
        if enter is None:
            break
        leave = None
        best = None
        for i in range(m):
            t = tab[i][enter]
            if t > 0:
                ratio = rhs[i] / t
                key = (ratio, basis[i])
                if best is None or key < best:
                    best, leave = key, i
        if leave is None:
            # the Phase-I objective is bounded below by 0
            raise AssertionError("unbounded Phase-I direction")
        _pivot(tab, rhs, reduced, leave, enter)
        basis[leave] = enter
        pivots += 1

    value = sum((rhs[i] for i in range(m) if basis[i] >= n), ZERO)
    if value == 0:
        x = [ZERO] * n
        for i, j in enumerate(basis):
            if j < n:
                x[j] = rhs[i]
        return PhaseOneResult(True, x=tuple(x), pivots=pivots)
    y = [ONE - reduced[n + i] for i in range(m)]
    cert = tuple(-signs[i] * y[i] for i in range(m))
    return PhaseOneResult(False, certificate=cert, pivots=pivots)


def _pivot(tab: list[list[Fraction]], rhs: list[Fraction], reduced: list[Fraction],
           r: int, c: int) -> None:
    piv = tab[r][c]
    prow = tab[r]
    if piv != 1:
        inv = ONE / piv
        for j, v in enumerate(prow):
            if v:
                prow[j] = v * inv
        rhs[r] *= inv
    nz = [j for j, v in enumerate(prow) if v]
    for i, row in enumerate(tab):
        if i == r:
            continue
        f = row[c]
        if f:
            for j in nz:
                row[j] -= f * prow[j]
            rhs[i] -= f * rhs[r]
    f = reduced[c]
    if f:
        for j in nz:
            reduced[j] -= f * prow[j]


def check_solution(a: Sequence[Sequence[Fraction]], b: Sequence[Fraction],
                   x: Sequence[Fraction], nonnegative: bool = True) -> bool:
    if nonnegative and any(v < 0 for v in x):
        return False
    return all(sum((aij * xj for aij, xj in zip(row, x) if aij), ZERO) == bi
               for row, bi in zip(a, b))


def check_certificate(a: Sequence[Sequence[Fraction]], b: Sequence[Fraction],
                      y: Sequence[Fraction]) -> bool:
    """Farkas check: ``y.A_j >= 0`` for every column and ``y.b < 0``."""
    n = len(a[0]) if a else 0
    for j in range(n):
        if sum((y[i] * a[i][j] for i in range(len(a)) if a[i][j]), ZERO) < 0:
            return False
    return sum((yi * bi for yi, bi in zip(y, b)), ZERO) < 0


def solve_affine(a: Sequence[Sequence[Fraction]], b: Sequence[Fraction]) -> tuple[Fraction, ...] | None:
    """Some exact solution of ``A x = b`` (any sign), or ``None`` if inconsistent.

    Gauss-Jordan elimination scanning columns left to right and taking the
    first remaining row with a non-zero entry; free variables are set to 0.
    The result is therefore deterministic but not unique in general.
    """
    rows, rhs, n = _as_rows(a, b)
    m = len(rows)
    pivot_cols: list[int] = []
    r = 0
    for c in range(n):
        if r == m:
            break
        pr = next((i for i in range(r, m) if rows[i][c] != 0), None)
        if pr is None:
            continue
        rows[r], rows[pr] = rows[pr], rows[r]
        rhs[r], rhs[pr] = rhs[pr], rhs[r]
        inv = ONE / rows[r][c]
        rows[r] = [v * inv for v in rows[r]]
        rhs[r] *= inv
        for i in range(m):
            if i != r and rows[i][c] != 0:
                f = rows[i][c]
                rows[i] = [vi - f * vr for vi, vr in zip(rows[i], rows[r])]
                rhs[i] -= f * rhs[r]
        pivot_cols.append(c)
        r += 1
    if any(rhs[i] != 0 for i in range(r, m)):
        return None
    x = [ZERO] * n
    for i, c in enumerate(pivot_cols):
        x[c] = rhs[i]
    return tuple(x)
