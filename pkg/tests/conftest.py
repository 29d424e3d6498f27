"""Shared fixtures and independent oracles for the test suite."""

from __future__ import annotations

import itertools
import random
import warnings
from fractions import Fraction

import pytest

from rainbowfactor.core import DirectedKGraph, GraphSystem
from rainbowfactor.lp import Hypergraph


def solve_square(M: list[list[Fraction]], rhs: list[Fraction]) -> list[Fraction] | None:
    """Gaussian elimination over the rationals; None when M is singular."""
    n = len(M)
    A = [row[:] + [r] for row, r in zip(M, rhs)]
    for col in range(n):
        piv = next((r for r in range(col, n) if A[r][col] != 0), None)
        if piv is None:
            return None
        A[col], A[piv] = A[piv], A[col]
        p = A[col][col]
        A[col] = [v / p for v in A[col]]
        for r in range(n):
            if r != col and A[r][col] != 0:
                fac = A[r][col]
                A[r] = [a - fac * b for a, b in zip(A[r], A[col])]
    return [A[r][n] for r in range(n)]


def vertex_enum_max(c, A, b) -> Fraction:
    """max c.x over {A x <= b, x >= 0} by enumerating basic feasible points.

    Only for tiny LPs: every choice of ``len(c)`` tight constraints is tried.
    Assumes the LP is bounded and feasible with x = 0 allowed.
    """
    nv = len(c)
    rows = [[Fraction(v) for v in r] for r in A] + [[Fraction(int(i == j)) for j in range(nv)] for i in range(nv)]
    rhs = [Fraction(v) for v in b] + [Fraction(0)] * nv
    # the last nv rows are -x <= 0, written as x = 0 when tight
    best = Fraction(0)
    for tight in itertools.combinations(range(len(rows)), nv):
        x = solve_square([rows[i] for i in tight], [rhs[i] for i in tight])
        if x is None or any(v < 0 for v in x):
            continue
        if all(sum(a * xi for a, xi in zip(r, x)) <= bi for r, bi in zip(A, b)):
            best = max(best, sum(Fraction(ci) * xi for ci, xi in zip(c, x)))
    return best


def brute_nu_star(H: Hypergraph) -> Fraction:
    A = [[1 if v in e else 0 for e in H.edges] for v in range(H.n)]
    return vertex_enum_max([1] * len(H.edges), A, [1] * H.n)


def scipy_value(H: Hypergraph, kind: str) -> float:
    from scipy.optimize import linprog
    if not H.edges:
        return 0.0
    if kind == "matching":
        A = [[1.0 if v in e else 0.0 for e in H.edges] for v in range(H.n)]
        res = linprog([-1.0] * len(H.edges), A_ub=A, b_ub=[1.0] * H.n, bounds=(0, None), method="highs")
        return -res.fun
    A = [[-1.0 if v in e else 0.0 for v in range(H.n)] for e in H.edges]
    res = linprog([1.0] * H.n, A_ub=A, b_ub=[-1.0] * len(H.edges), bounds=(0, None), method="highs")
    return res.fun


def random_hypergraph(rng: random.Random, n: int, k: int, p: float) -> Hypergraph:
    edges = [e for e in itertools.combinations(range(n), k) if rng.random() < p]
    return Hypergraph.of(n, edges)


def identical(g: DirectedKGraph, m: int) -> GraphSystem:
    return GraphSystem((g,) * m)


@pytest.fixture
def triangles() -> GraphSystem:
    return identical(DirectedKGraph.undirected(3, [(0, 1), (1, 2), (0, 2)]), 3)


@pytest.fixture(autouse=True)
def _quiet_density_warnings():
    from rainbowfactor.pipeline import DensityWarning
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", DensityWarning)
        yield
