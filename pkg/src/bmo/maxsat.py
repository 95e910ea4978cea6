"""Weighted partial MaxSAT by model-improving linear search.

Every soft clause gets a relaxation variable; one ladder over the relaxation
variables is built after the first model and each later call asks for a model
strictly cheaper than the best one so far. The last UNSAT answer proves
optimality.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Callable, Sequence

from .encode import assume_bound, build_ladder
from .formula import Clause, Model, clause_satisfied
from .sat import EngineStats, Solver, SolverConfig, Status


class MaxSatStatus(enum.Enum):
    OPTIMUM = "OPTIMUM"
    HARD_UNSAT = "HARD_UNSAT"
    NO_SOLUTION_BELOW_UB = "NO_SOLUTION_BELOW_UB"
    INTERRUPTED = "INTERRUPTED"


@dataclass
class MaxSatInstance:
    num_vars: int
    hard: list[Clause] = field(default_factory=list)
    soft: list[tuple[Clause, int]] = field(default_factory=list)

    def __post_init__(self):
        for clause, w in self.soft:
            if w < 1:
                raise ValueError(f"soft weight must be positive, got {w}")

    @property
    def total_soft_weight(self) -> int:
        return sum(w for _, w in self.soft)

    def cost(self, model: Sequence[int]) -> int:
        return sum(w for c, w in self.soft if not clause_satisfied(model, c))


@dataclass
class MaxSatResult:
    status: MaxSatStatus
    cost: int | None = None
    model: Model | None = None
    sat_calls: int = 0
    stats: EngineStats | None = None
    total_weight: int = 0

    @property
    def satisfied_weight(self) -> int | None:
        return None if self.cost is None else self.total_weight - self.cost


@dataclass
class SearchResult:
    status: MaxSatStatus
    cost: int | None
    model: Model | None
    sat_calls: int


def minimize(
    solver: Solver,
    terms: Sequence[tuple[int, int]],
    cost_of: Callable[[Model], int] | None = None,
    upper: int | None = None,
    deadline: float | None = None,
    on_improve: Callable[[int], None] | None = None,
) -> SearchResult:
    """Minimize ``sum(w for lit, w in terms if lit)`` over models of ``solver``.

    ``cost_of`` recomputes the true cost of a model (it may be lower than the
    term sum when a relaxation literal is set needlessly). Models with cost
    ``>= upper`` are treated as nonexistent.
    """
    if cost_of is None:
        def cost_of(model):
            return sum(w for lit, w in terms if model[abs(lit) - 1] == lit)

    calls = 1
    out = solver.solve(deadline=deadline)
    if out.status is Status.INTERRUPTED:
        return SearchResult(MaxSatStatus.INTERRUPTED, None, None, calls)
    if out.status is Status.UNSAT:
        return SearchResult(MaxSatStatus.HARD_UNSAT, None, None, calls)
    model = out.model
    cost = cost_of(model)
    ladder = None
    if upper is not None and cost >= upper:
        if upper <= 0:
            return SearchResult(MaxSatStatus.NO_SOLUTION_BELOW_UB, None, None, calls)
        ladder = build_ladder(terms, solver, max_bound=upper - 1)
        calls += 1
        out = solver.solve(assume_bound(ladder, upper - 1), deadline=deadline)
        if out.status is Status.INTERRUPTED:
            return SearchResult(MaxSatStatus.INTERRUPTED, None, None, calls)
        if out.status is Status.UNSAT:
            return SearchResult(MaxSatStatus.NO_SOLUTION_BELOW_UB, None, None, calls)
        model = out.model
        cost = cost_of(model)
    if on_improve:
        on_improve(cost)
    while cost > 0:
        if ladder is None:
            ladder = build_ladder(terms, solver, max_bound=cost - 1)
        calls += 1
        out = solver.solve(assume_bound(ladder, cost - 1), deadline=deadline)
        if out.status is Status.UNSAT:
            break
        if out.status is Status.INTERRUPTED:
            return SearchResult(MaxSatStatus.INTERRUPTED, cost, model, calls)
        new_cost = cost_of(out.model)
        assert new_cost < cost, "bounded model did not improve"
        model, cost = out.model, new_cost
        if on_improve:
            on_improve(cost)
    return SearchResult(MaxSatStatus.OPTIMUM, cost, model, calls)


def prioritize(solver: Solver, terms: Sequence[tuple[int, int]]) -> None:
    """Branch on relaxation variables first, heaviest first, polarity false.

    The first model is then a greedy one that tries to keep the expensive
    soft clauses satisfied.
    """
    ranks = {w: i for i, w in enumerate(sorted({w for _, w in terms}), start=1)}
    for lit, w in terms:
        solver.set_activity(abs(lit), ranks[w])
        solver.set_phase(-lit)


def solve_maxsat(
    inst: MaxSatInstance,
    initial_ub: int | None = None,
    deadline: float | None = None,
    on_improve: Callable[[int], None] | None = None,
    config: SolverConfig | None = None,
) -> MaxSatResult:
    """Minimum falsified soft weight of ``inst`` and a witnessing model.

    With ``initial_ub`` only solutions of cost strictly below it count; if
    there are none the status is ``NO_SOLUTION_BELOW_UB``.
    """
    solver = Solver(config)
    solver.ensure_vars(inst.num_vars)
    total = inst.total_soft_weight
    for clause in inst.hard:
        if not solver.add_clause(clause):
            return MaxSatResult(MaxSatStatus.HARD_UNSAT, sat_calls=0, stats=solver.stats, total_weight=total)
    terms = []
    for clause, w in inst.soft:
        y = solver.new_var()
        solver.add_clause(tuple(clause) + (y,))
        terms.append((y, w))
    prioritize(solver, terms)

    n = inst.num_vars
    res = minimize(
        solver,
        terms,
        cost_of=lambda m: inst.cost(m[:n]),
        upper=initial_ub,
        deadline=deadline,
        on_improve=on_improve,
    )
    model = None if res.model is None else res.model[:n]
    if res.status is MaxSatStatus.OPTIMUM:
        assert inst.cost(model) == res.cost
    return MaxSatResult(res.status, res.cost, model, res.sat_calls, solver.stats, total_weight=total)
