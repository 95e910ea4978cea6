"""Shared fixtures-in-code: the worked examples and random instance makers."""

import itertools
import random

import numpy as np

from bmo.formula import Level, LeveledFormula, clause_satisfied, minimal_weights
from bmo.upgrade import Package, PackageUniverse


def example1_universe():
    # p5 and p6 are only referenced in the original; here they are declared empty
    return PackageUniverse(
        {
            "p1": Package((("p2",), ("p5", "p6")), ()),
            "p2": Package((), ("p3",)),
            "p3": Package((("p4",),), ("p1",)),
            "p4": Package((), ("p5", "p6")),
            "p5": Package(),
            "p6": Package(),
        },
        frozenset(),
        frozenset(),
    )


EXAMPLE1_CLAUSES = [
    (-1, 2),
    (-1, 5, 6),
    (-2, -3),
    (-3, 4),
    (-3, -1),
    (-4, -5),
    (-4, -6),
]


def example2_universe():
    return PackageUniverse(
        {
            "p1": Package((("p2",), ("p5",)), ("p4",)),
            "p2": Package(),
            "p3": Package((("p2", "p4"),)),
            "p4": Package(),
            "p5": Package(),
        },
        frozenset({"p2"}),
        frozenset({"p1"}),
    )


EXAMPLE2_WEIGHTED = [
    ((-1, 2), 16),
    ((-1, 5), 16),
    ((-1, -4), 16),
    ((-3, 2, 4), 16),
    ((1,), 8),
    ((2,), 4),
    ((-3,), 1),
    ((-4,), 1),
    ((-5,), 1),
]

EXAMPLE2_WCNF = "p wcnf 5 9 16\n" + "".join(
    f"{w} {' '.join(map(str, c))} 0\n" for c, w in EXAMPLE2_WEIGHTED
)


def example2_formula():
    return LeveledFormula(
        5,
        [(-1, 2), (-1, 5), (-1, -4), (2, -3, 4)],
        [Level([(-3,), (-4,), (-5,)], 1), Level([(2,)], 4), Level([(1,)], 8)],
    )


def random_clause(rng, n, width=3):
    k = rng.randint(1, min(width, n))
    return tuple(v if rng.random() < 0.5 else -v for v in rng.sample(range(1, n + 1), k))


def random_formula(rng, max_vars=14, levels=(2, 4), max_clauses=30, hard_ratio=0.6):
    """Small LeveledFormula with minimal weights; total clause count <= max_clauses."""
    n = rng.randint(2, max_vars)
    m = rng.randint(*levels)
    budget = rng.randint(m, max_clauses)
    sizes = [1] * m
    for _ in range(rng.randint(0, max(0, (budget - m) // 2))):
        sizes[rng.randrange(m)] += 1
    num_hard = min(budget - sum(sizes), int(hard_ratio * n))
    hard = [random_clause(rng, n) for _ in range(max(0, num_hard))]
    weights, _ = minimal_weights(sizes)
    lvls = [Level([random_clause(rng, n) for _ in range(s)], w) for s, w in zip(sizes, weights)]
    return LeveledFormula(n, hard, lvls)


def random_maxsat(rng, max_vars=12):
    n = rng.randint(1, max_vars)
    hard = [random_clause(rng, n) for _ in range(rng.randint(0, n))]
    soft = [(random_clause(rng, n), rng.randint(1, 20)) for _ in range(rng.randint(0, 2 * n))]
    return n, hard, soft


def _assignments(n):
    idx = np.arange(1 << n, dtype=np.int64)
    return ((idx[:, None] >> np.arange(n, dtype=np.int64)[None, :]) & 1).astype(bool)


def _sat_mask(bits, clause):
    sat = np.zeros(bits.shape[0], dtype=bool)
    for lit in clause:
        col = bits[:, abs(lit) - 1]
        sat |= col if lit > 0 else ~col
    return sat


def brute_maxsat(n, hard, soft):
    """Minimum falsified soft weight by enumeration, None if hard-UNSAT."""
    bits = _assignments(n)
    ok = np.ones(bits.shape[0], dtype=bool)
    for c in hard:
        ok &= _sat_mask(bits, c)
    if not ok.any():
        return None
    # python ints: weights may exceed 64 bits
    cost = [0] * bits.shape[0]
    for c, w in soft:
        for i in np.flatnonzero(~_sat_mask(bits, c) & ok):
            cost[i] += w
    return min(cost[i] for i in np.flatnonzero(ok))


def brute_sat(n, clauses):
    for bits in itertools.product((False, True), repeat=n):
        model = tuple(v if b else -v for v, b in zip(range(1, n + 1), bits))
        if all(clause_satisfied(model, c) for c in clauses):
            return True
    return False


def seeded(seed):
    return random.Random(seed)
