"""Two-phase tableau simplex over exact rationals with Bland's rule.

Solves ``max c.x`` subject to rows ``a.x (<=|=|>=) rhs`` and ``x >= 0``.
Small and dense by design: the instances here have tens of rows.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

ZERO = Fraction(0)


class LPError(RuntimeError):
    pass


@dataclass
class LPResult:
    status: str  # "optimal" | "infeasible" | "unbounded"
    x: list[Fraction]
    value: Fraction | None


def _pivot(T: list[list[Fraction]], obj: list[Fraction], basis: list[int], r: int, q: int) -> None:
    row = T[r]
    p = row[q]
    if p != 1:
        T[r] = row = [v / p for v in row]
    nz = [j for j, v in enumerate(row) if v]
    for i, other in enumerate(T):
        if i != r:
            fac = other[q]
            if fac:
                for j in nz:
                    other[j] -= fac * row[j]
    fac = obj[q]
    if fac:
        for j in nz:
            obj[j] -= fac * row[j]
    basis[r] = q


def _run(T, obj, basis, allowed: int) -> str:
    """Iterate Bland pivots on columns ``< allowed`` until optimal or unbounded."""
    rhs = len(obj) - 1
    while True:
        q = next((j for j in range(allowed) if obj[j] > 0), None)
        if q is None:
            return "optimal"
        best = None
        for i, row in enumerate(T):
            a = row[q]
            if a > 0:
                key = (row[rhs] / a, basis[i])
                if best is None or key < best[0]:
                    best = (key, i)
        if best is None:
            return "unbounded"
        _pivot(T, obj, basis, best[1], q)


def solve(c: Sequence, rows: Sequence[Sequence], senses: Sequence[str], rhs: Sequence) -> LPResult:
    nvar = len(c)
    m = len(rows)
    A = [[Fraction(v) for v in r] for r in rows]
    b = [Fraction(v) for v in rhs]
    senses = list(senses)
    for i in range(m):
        if len(A[i]) != nvar:
            raise LPError(f"row {i} has {len(A[i])} entries, expected {nvar}")
        if senses[i] not in ("<=", ">=", "="):
            raise LPError(f"bad sense {senses[i]!r}")
        if b[i] < 0:
            A[i] = [-v for v in A[i]]
            b[i] = -b[i]
            senses[i] = {"<=": ">=", ">=": "<=", "=": "="}[senses[i]]

    n_slack = sum(1 for s in senses if s != "=")
    n_art = sum(1 for s in senses if s != "<=")
    width = nvar + n_slack + n_art
    T = []
    basis = []
    slack = nvar
    art = nvar + n_slack
    art_cols = []
    for i in range(m):
        row = A[i] + [ZERO] * (n_slack + n_art) + [b[i]]
        if senses[i] == "<=":
            row[slack] = Fraction(1)
            basis.append(slack)
            slack += 1
        else:
            if senses[i] == ">=":
                row[slack] = Fraction(-1)
                slack += 1
            row[art] = Fraction(1)
            basis.append(art)
            art_cols.append(art)
            art += 1
        T.append(row)

    if art_cols:
        # phase 1: maximise -(sum of artificials)
        obj = [ZERO] * (width + 1)
        for a in art_cols:
            obj[a] = Fraction(-1)
        for i, bv in enumerate(basis):
            if bv >= nvar + n_slack:
                obj = [o + v for o, v in zip(obj, T[i])]
        _run(T, obj, basis, width)
        if obj[width] != 0:
            return LPResult("infeasible", [], None)
        for i in range(len(T) - 1, -1, -1):
            if basis[i] >= nvar + n_slack:
                q = next((j for j in range(nvar + n_slack) if T[i][j] != 0), None)
                if q is None:
                    del T[i]
                    del basis[i]
                else:
                    _pivot(T, obj, basis, i, q)
    keep = nvar + n_slack
    T = [row[:keep] + [row[-1]] for row in T]
    cost = [Fraction(v) for v in c] + [ZERO] * n_slack
    obj = cost + [ZERO]
    for i, bv in enumerate(basis):
        if cost[bv]:
            fac = cost[bv]
            obj = [o - fac * v for o, v in zip(obj, T[i])]
    status = _run(T, obj, basis, keep)
    if status == "unbounded":
        return LPResult("unbounded", [], None)
    x = [ZERO] * nvar
    for i, bv in enumerate(basis):
        if bv < nvar:
            x[bv] = T[i][-1]
    value = sum((Fraction(ci) * xi for ci, xi in zip(c, x)), ZERO)
    return LPResult("optimal", x, value)
