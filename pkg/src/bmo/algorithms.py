"""Boolean multilevel optimization.

Four solvers share one result type:

``solve_rsc``
    one MaxSAT call per level, top level first, with small rescaled weights
    and an upper bound derived from the levels already solved.
``solve_ipb``
    one incremental solver; each level is relaxed and its number of true
    relaxation variables minimized, then pinned with an equality before the
    next level down is handled.
``solve_mono``
    a single weighted MaxSAT call on the flattened formula.
``solve_brute``
    exhaustive enumeration, lexicographic on the per-level falsified counts
    from the top level down. This is the reference semantics.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .encode import add_equality, relax_level
from .errors import BmoError, HardUnsatError, TooLargeError
from .formula import LevelOptima, LeveledFormula, Model, clause_satisfied
from .maxsat import MaxSatInstance, MaxSatStatus, minimize, prioritize, solve_maxsat
from .sat import Solver, SolverConfig, Status


class Interrupted(BmoError):
    """Deadline hit before the optimum was proven."""

    def __init__(self, message, completed=()):
        super().__init__(message)
        self.completed = tuple(completed)


@dataclass
class BmoResult:
    optima: LevelOptima
    algorithm: str
    stats: dict = field(default_factory=dict)

    @property
    def falsified(self) -> tuple[int, ...]:
        return self.optima.falsified

    @property
    def objective(self) -> int:
        return self.optima.objective

    @property
    def model(self) -> Model:
        return self.optima.model


@dataclass(frozen=True)
class ModelCheck:
    hard_ok: bool
    falsified: tuple[int, ...]
    violated_hard: tuple[tuple[int, ...], ...] = ()


def verify_model(formula: LeveledFormula, model: Sequence[int]) -> ModelCheck:
    """Recount falsified clauses per level and flag violated hard clauses."""
    if len(model) < formula.num_vars:
        raise ValueError(f"model assigns {len(model)} of {formula.num_vars} variables")
    for v in range(1, formula.num_vars + 1):
        if abs(model[v - 1]) != v:
            raise ValueError(f"model position {v} holds {model[v - 1]}")
    violated = tuple(c for c in formula.hard if not clause_satisfied(model, c))
    counts = tuple(
        sum(1 for c in level.clauses if not clause_satisfied(model, c)) for level in formula.levels
    )
    return ModelCheck(not violated, counts, violated)


def _optima(formula: LeveledFormula, model: Model) -> LevelOptima:
    check = verify_model(formula, model)
    assert check.hard_ok
    model = tuple(model[: formula.num_vars])
    return LevelOptima(check.falsified, formula.objective(check.falsified), model)


def _deadline(timeout):
    return None if timeout is None else time.monotonic() + timeout


def _hard_model(formula: LeveledFormula, deadline) -> Model:
    solver = Solver()
    solver.ensure_vars(formula.num_vars)
    for c in formula.hard:
        solver.add_clause(c)
    out = solver.solve(deadline=deadline)
    if out.status is Status.UNSAT:
        raise HardUnsatError("hard clauses are unsatisfiable")
    if out.status is Status.INTERRUPTED:
        raise Interrupted("timeout while checking hard clauses")
    return out.model


# -- rescaling ------------------------------------------------------------------


@dataclass(frozen=True)
class RescaleWeights:
    """Weights of the subproblem for level ``level``.

    ``multipliers[k]`` weighs level ``level + k``; the final entry is the
    weight of the hard clauses and equals ``upper``, the initial bound.
    """

    level: int
    multipliers: tuple[int, ...]

    @property
    def upper(self) -> int:
        return self.multipliers[-1]

    def weight(self, level: int) -> int:
        return self.multipliers[level - self.level]


def rescale_weights(level: int, sizes: Sequence[int], upper_optima: Sequence[int] = ()) -> RescaleWeights:
    """Multipliers for subproblem ``level`` (1-based).

    ``upper_optima`` holds the optima already found for levels
    ``level+1 .. len(sizes)``, in that order.
    """
    top = len(sizes)
    if not 1 <= level <= top:
        raise ValueError(f"level {level} outside 1..{top}")
    if len(upper_optima) != top - level:
        raise ValueError(f"need {top - level} known optima, got {len(upper_optima)}")
    p = [1, sizes[level - 1] + 1]
    for u in upper_optima:
        p.append((u + 1) * p[-1])
    return RescaleWeights(level, tuple(p))


def decode_rescaled_cost(cost: int, rw: RescaleWeights, upper_optima: Sequence[int]) -> tuple[int, ...]:
    """Split a subproblem cost into falsified counts per level, mixed radix.

    Valid for optimal costs, where every level above ``rw.level`` is
    falsified exactly as often as its known optimum.
    """
    p = rw.multipliers
    counts = [cost % p[1]]
    rest = cost // p[1]
    for u in upper_optima[:-1]:
        counts.append(rest % (u + 1))
        rest //= u + 1
    if upper_optima:
        counts.append(rest)
    elif rest:
        raise ValueError("cost reaches the hard weight")
    return tuple(counts)


def solve_rsc(
    formula: LeveledFormula,
    timeout: float | None = None,
    on_level: Callable[[int, int], None] | None = None,
    config: SolverConfig | None = None,
) -> BmoResult:
    start = time.monotonic()
    deadline = _deadline(timeout)
    top = formula.num_levels
    sizes = formula.sizes
    if top == 0:
        return BmoResult(_optima(formula, _hard_model(formula, deadline)), "rsc", {"wall": time.monotonic() - start})

    found: dict[int, int] = {}
    costs = []
    sat_calls = 0
    conflicts = 0
    decode_agrees = True
    model = None
    for i in range(top, 0, -1):
        known = [found[j] for j in range(i + 1, top + 1)]
        rw = rescale_weights(i, sizes, known)
        inst = MaxSatInstance(
            formula.num_vars,
            list(formula.hard),
            [(c, rw.weight(j)) for j in range(i, top + 1) for c in formula.levels[j - 1].clauses],
        )
        res = solve_maxsat(inst, initial_ub=rw.upper, deadline=deadline, config=config)
        sat_calls += res.sat_calls
        conflicts += res.stats.conflicts if res.stats else 0
        if res.status is MaxSatStatus.HARD_UNSAT:
            raise HardUnsatError("hard clauses are unsatisfiable")
        if res.status is MaxSatStatus.INTERRUPTED:
            raise Interrupted(f"timeout in subproblem for level {i}", _completed(found, top))
        if res.status is not MaxSatStatus.OPTIMUM:
            raise AssertionError(f"level {i}: no solution below the bound {rw.upper}")
        model = res.model
        recount = verify_model(formula, model).falsified[i - 1 :]
        if recount[1:] != tuple(known):
            raise AssertionError(f"level {i}: upper levels drifted {recount[1:]} != {known}")
        if decode_rescaled_cost(res.cost, rw, known) != recount:
            decode_agrees = False
        found[i] = recount[0]
        costs.append(res.cost)
        if on_level:
            on_level(i, found[i])

    optima = _optima(formula, model)
    return BmoResult(
        optima,
        "rsc",
        {
            "subproblem_costs": costs,
            "sat_calls": sat_calls,
            "conflicts": conflicts,
            "decode_agrees": decode_agrees,
            "wall": time.monotonic() - start,
        },
    )


def _completed(found, top):
    return tuple((j, found[j]) for j in range(top, 0, -1) if j in found)


# -- iterative pseudo-Boolean ---------------------------------------------------


def solve_ipb(
    formula: LeveledFormula,
    timeout: float | None = None,
    on_level: Callable[[int, int], None] | None = None,
    config: SolverConfig | None = None,
) -> BmoResult:
    start = time.monotonic()
    deadline = _deadline(timeout)
    top = formula.num_levels
    if top == 0:
        return BmoResult(_optima(formula, _hard_model(formula, deadline)), "ipb", {"wall": time.monotonic() - start})

    solver = Solver(config)
    solver.ensure_vars(formula.num_vars)
    for c in formula.hard:
        if not solver.add_clause(c):
            raise HardUnsatError("hard clauses are unsatisfiable")

    relaxed = {}
    found: dict[int, int] = {}
    sat_calls = 0
    model = None
    for i in range(top, 0, -1):
        rl = relax_level(formula.levels[i - 1].clauses, solver.new_var, i)
        relaxed[i] = rl
        for c in rl.clauses:
            solver.add_clause(c)
        terms = [(y, 1) for y in rl.relax_vars]
        prioritize(solver, terms)
        originals = rl.originals
        res = minimize(
            solver,
            terms,
            cost_of=lambda m, cs=originals: sum(1 for c in cs if not clause_satisfied(m, c)),
            deadline=deadline,
        )
        sat_calls += res.sat_calls
        if res.status is MaxSatStatus.HARD_UNSAT:
            raise HardUnsatError("hard clauses are unsatisfiable")
        if res.status is MaxSatStatus.INTERRUPTED:
            raise Interrupted(f"timeout minimizing level {i}", _completed(found, top))
        found[i] = res.cost
        model = res.model
        if on_level:
            on_level(i, res.cost)
        if i > 1:
            add_equality(rl.relax_vars, res.cost, solver)

    optima = _optima(formula, model)
    exact = all(
        sum(1 for y in relaxed[j].relax_vars if model[y - 1] > 0) == found[j] for j in range(2, top + 1)
    )
    return BmoResult(
        optima,
        "ipb",
        {
            "level_optima": [found[j] for j in range(1, top + 1)],
            "relax_counts_exact": exact,
            "sat_calls": sat_calls,
            "conflicts": solver.stats.conflicts,
            "wall": time.monotonic() - start,
        },
    )


# -- monolithic -----------------------------------------------------------------


def solve_mono(
    formula: LeveledFormula,
    timeout: float | None = None,
    on_improve: Callable[[int], None] | None = None,
    config: SolverConfig | None = None,
) -> BmoResult:
    start = time.monotonic()
    inst = MaxSatInstance(
        formula.num_vars,
        list(formula.hard),
        [(c, level.weight) for level in reversed(formula.levels) for c in level.clauses],
    )
    res = solve_maxsat(inst, deadline=_deadline(timeout), on_improve=on_improve, config=config)
    if res.status is MaxSatStatus.HARD_UNSAT:
        raise HardUnsatError("hard clauses are unsatisfiable")
    if res.status is MaxSatStatus.INTERRUPTED:
        raise Interrupted("timeout in monolithic MaxSAT search")
    optima = _optima(formula, res.model)
    assert formula.falsified_weight(optima.falsified) == res.cost
    return BmoResult(
        optima,
        "mono",
        {
            "falsified_weight": res.cost,
            "satisfied_weight": formula.satisfied_weight(optima.falsified),
            "max_weight_bits": formula.hard_weight.bit_length(),
            "sat_calls": res.sat_calls,
            "conflicts": res.stats.conflicts,
            "wall": time.monotonic() - start,
        },
    )


# -- exhaustive oracle ----------------------------------------------------------

BRUTE_CAP = 22
_CHUNK_BITS = 16


def _clause_sat(bits: np.ndarray, clause) -> np.ndarray:
    sat = np.zeros(bits.shape[0], dtype=bool)
    for lit in clause:
        col = bits[:, abs(lit) - 1]
        sat |= col if lit > 0 else ~col
    return sat


def solve_brute(formula: LeveledFormula, cap: int = BRUTE_CAP) -> BmoResult:
    """Enumerate every assignment; pick the lexicographically best one.

    Ties go to the first assignment in counting order, where variable ``v``
    takes bit ``v-1`` of the counter.
    """
    start = time.monotonic()
    n = formula.num_vars
    if n > cap:
        raise TooLargeError(f"{n} variables exceed the enumeration cap {cap}")
    total = 1 << n
    chunk = min(total, 1 << _CHUNK_BITS)
    shifts = np.arange(n, dtype=np.int64)
    best_key = None
    best_index = None
    for base in range(0, total, chunk):
        idx = np.arange(base, base + chunk, dtype=np.int64)
        bits = ((idx[:, None] >> shifts[None, :]) & 1).astype(bool)
        ok = np.ones(chunk, dtype=bool)
        for c in formula.hard:
            ok &= _clause_sat(bits, c)
        if not ok.any():
            continue
        counts = []
        for level in formula.levels:
            f = np.zeros(chunk, dtype=np.int64)
            for c in level.clauses:
                f += ~_clause_sat(bits, c)
            counts.append(f)
        cand = np.flatnonzero(ok)
        if counts:
            # np.lexsort: last key is primary -> top level decides first
            order = np.lexsort(tuple(f[cand] for f in counts) + ())
            pos = cand[order[0]]
            key = tuple(int(f[pos]) for f in reversed(counts))
        else:
            pos = cand[0]
            key = ()
        if best_key is None or key < best_key:
            best_key, best_index = key, base + int(pos)
    if best_index is None:
        raise HardUnsatError("hard clauses are unsatisfiable")
    model = tuple(v if (best_index >> (v - 1)) & 1 else -v for v in range(1, n + 1))
    return BmoResult(_optima(formula, model), "brute", {"assignments": total, "wall": time.monotonic() - start})


SOLVERS = {
    "mono": solve_mono,
    "rsc": solve_rsc,
    "ipb": solve_ipb,
    "brute": solve_brute,
}
