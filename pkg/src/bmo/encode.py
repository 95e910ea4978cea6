"""Clausal encodings of objective bounds over relaxation variables.

``build_ladder`` produces a totalizer (all weights 1) or a generalized
totalizer (mixed weights) whose output literal for threshold ``k`` is forced
true whenever the weighted input sum reaches ``k``. Bounding the sum is then
a single assumption. ``add_equality`` pins a cardinality exactly.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

from .formula import Clause


@dataclass(frozen=True)
class RelaxedLevel:
    index: int
    clauses: tuple[Clause, ...]
    relax_vars: tuple[int, ...]
    originals: tuple[Clause, ...] = field(repr=False, default=())


def relax_level(clauses: Sequence[Clause], new_var: Callable[[], int], index: int = 0) -> RelaxedLevel:
    """Append a fresh positive relaxation variable to every clause.

    The relaxed clauses are returned, not added anywhere; the caller decides
    which solver receives them.
    """
    if not clauses:
        raise ValueError("cannot relax an empty level")
    ys = []
    relaxed = []
    for clause in clauses:
        y = new_var()
        ys.append(y)
        relaxed.append(tuple(clause) + (y,))
    return RelaxedLevel(index, tuple(relaxed), tuple(ys), tuple(tuple(c) for c in clauses))


@dataclass
class ObjectiveLadder:
    """Output literals of a (generalized) totalizer.

    ``outputs`` maps each threshold ``k`` to a literal that is forced true by
    any input pattern of weighted sum ``>= k``. With a ``max_bound``, all sums
    beyond it share the single threshold ``max_bound + 1``.
    """

    terms: tuple[tuple[int, int], ...]
    outputs: dict[int, int]
    max_bound: int | None = None
    num_clauses: int = 0
    num_aux: int = 0

    @property
    def thresholds(self) -> list[int]:
        return sorted(self.outputs)

    def output(self, k: int) -> int:
        return self.outputs[k]


def _merge(left: dict, right: dict, limit, solver, chain: bool, counts: list) -> dict:
    sums = set(left) | set(right)
    for a in left:
        for b in right:
            s = a + b
            sums.add(s if limit is None or s < limit else limit)
    out = {s: solver.new_var() for s in sorted(sums)}
    counts[1] += len(out)
    add = solver.add_clause
    for a, la in left.items():
        add((-la, out[a]))
    for b, lb in right.items():
        add((-lb, out[b]))
    n = len(left) + len(right)
    for a, la in left.items():
        for b, lb in right.items():
            s = a + b
            if limit is not None and s > limit:
                s = limit
            add((-la, -lb, out[s]))
            n += 1
    if chain:
        keys = sorted(out)
        for lo, hi in zip(keys, keys[1:]):
            add((-out[hi], out[lo]))
            n += 1
    counts[0] += n
    return out


def build_ladder(terms: Sequence[tuple[int, int]], solver, max_bound: int | None = None) -> ObjectiveLadder:
    """Encode the weighted sum of ``terms`` = ``[(lit, weight), ...]``.

    Auxiliary variables and clauses go straight into ``solver``. Each weight
    class gets its own unit totalizer (capped where the bound allows); the
    class outputs are then merged from the lightest class up, so only one
    node per class mixes different weights.
    """
    terms = tuple((int(lit), int(w)) for lit, w in terms)
    for _, w in terms:
        if w < 1:
            raise ValueError("ladder weights must be positive")
    limit = None if max_bound is None else max_bound + 1
    if limit is not None and limit < 1:
        raise ValueError("max_bound must be non-negative")
    counts = [0, 0]
    groups: dict[int, list[int]] = {}
    for lit, w in terms:
        groups.setdefault(w, []).append(lit)

    def totalizer(lits, cap):
        def build(lo, hi):
            if hi - lo == 1:
                return {1: lits[lo]}
            mid = (lo + hi) // 2
            return _merge(build(lo, mid), build(mid, hi), cap, solver, False, counts)

        return build(0, len(lits))

    acc: dict[int, int] = {}
    for w in sorted(groups):
        lits = groups[w]
        cap = None if limit is None else -(-limit // w)
        by_count = totalizer(lits, cap)
        scaled = {}
        for k, lit in by_count.items():
            v = k * w
            scaled[v if limit is None or v < limit else limit] = lit
        acc = _merge(acc, scaled, limit, solver, True, counts) if acc else scaled
    return ObjectiveLadder(terms, dict(sorted(acc.items())), max_bound, counts[0], counts[1])


def assume_bound(ladder: ObjectiveLadder, k: int) -> list[int]:
    """Assumptions restricting the ladder's weighted sum to at most ``k``."""
    if k < 0:
        raise ValueError("bound must be non-negative")
    if ladder.max_bound is not None and k > ladder.max_bound:
        raise ValueError(f"bound {k} exceeds the ladder's max_bound {ladder.max_bound}")
    above = [t for t in ladder.outputs if t > k]
    if not above:
        return []
    return [-ladder.outputs[min(above)]]


def _card_merge(left: list, right: list, cap: int, solver) -> list:
    nl, nr = len(left), len(right)
    n = min(nl + nr, cap)
    out = [solver.new_var() for _ in range(n)]
    add = solver.add_clause
    # sum >= i+j  =>  out[i+j]
    for i in range(nl + 1):
        for j in range(nr + 1):
            if i + j == 0:
                continue
            s = min(i + j, cap)
            clause = [out[s - 1]]
            if i:
                clause.append(-left[i - 1])
            if j:
                clause.append(-right[j - 1])
            add(clause)
    # left <= i and right <= j  =>  not out[i+j+1]
    for i in range(nl + 1):
        for j in range(nr + 1):
            s = i + j + 1
            if s > n:
                continue
            clause = [-out[s - 1]]
            if i < nl:
                clause.append(left[i])
            if j < nr:
                clause.append(right[j])
            add(clause)
    return out


def cardinality_outputs(lits: Sequence[int], cap: int, solver) -> list[int]:
    """Two-way totalizer: ``out[i-1]`` is true iff at least ``i`` of ``lits``.

    Only thresholds up to ``cap`` are materialized; ``out[cap-1]`` reads as
    "at least ``cap``".
    """
    lits = list(lits)

    def build(lo, hi):
        if hi - lo == 1:
            return [lits[lo]]
        mid = (lo + hi) // 2
        return _card_merge(build(lo, mid), build(mid, hi), cap, solver)

    return build(0, len(lits)) if lits else []


def add_equality(ys: Sequence[int], k: int, solver) -> None:
    """Permanently constrain exactly ``k`` of ``ys`` to be true."""
    n = len(ys)
    if not 0 <= k <= n:
        raise ValueError(f"cannot have exactly {k} of {n} literals true")
    if n == 0:
        return
    if k == 0:
        for y in ys:
            solver.add_clause((-y,))
        return
    if k == n:
        for y in ys:
            solver.add_clause((y,))
        return
    out = cardinality_outputs(ys, k + 1, solver)
    solver.add_clause((out[k - 1],))
    solver.add_clause((-out[k],))
