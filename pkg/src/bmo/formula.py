"""Propositional data model for multilevel (BMO) formulas.

Literals follow the DIMACS convention: variable ``v`` (``v >= 1``) appears as
``v`` when positive and ``-v`` when negated. A clause is a tuple of literals,
a model is a tuple of signed literals ``(±1, ±2, ..., ±n)``.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from typing import Iterable, NamedTuple, Sequence

from .errors import EmptyClauseError, NotBMOError, TautologyError

Clause = tuple[int, ...]
Model = tuple[int, ...]


class _Hard:
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "HARD"

    def __reduce__(self):
        return (_Hard, ())


HARD = _Hard()


class _Tautology:
    def __repr__(self):
        return "TAUTOLOGY"

    def __bool__(self):
        return False


TAUTOLOGY = _Tautology()


class WeightedClause(NamedTuple):
    clause: Clause
    weight: object  # positive int or HARD

    @property
    def is_hard(self) -> bool:
        return self.weight is HARD


def negate(lit: int) -> int:
    return -lit


def lit_key(lit: int) -> tuple[int, int]:
    """Sort key: ascending variable, positive before negative."""
    return (abs(lit), lit < 0)


def normalize_clause(lits: Iterable[int]):
    """Canonical form of a clause, or ``TAUTOLOGY`` if it has ``l`` and ``-l``."""
    seen = set()
    for lit in lits:
        lit = int(lit)
        if lit == 0:
            raise ValueError("0 is not a literal")
        seen.add(lit)
    if not seen:
        raise EmptyClauseError("empty clause")
    for lit in seen:
        if -lit in seen:
            return TAUTOLOGY
    return tuple(sorted(seen, key=lit_key))


def lit_true(model: Sequence[int], lit: int) -> bool:
    return model[abs(lit) - 1] == lit


def clause_satisfied(model: Sequence[int], clause: Iterable[int]) -> bool:
    return any(model[abs(lit) - 1] == lit for lit in clause)


class Level(NamedTuple):
    clauses: tuple[Clause, ...]
    weight: int


@dataclass(frozen=True)
class LeveledFormula:
    """Hard clauses plus soft levels ordered by strictly increasing weight.

    Construction validates the dominance condition: each level weight must
    exceed the total weight of all lower levels.
    """

    num_vars: int
    hard: tuple[Clause, ...] = ()
    levels: tuple[Level, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "hard", tuple(tuple(c) for c in self.hard))
        object.__setattr__(
            self,
            "levels",
            tuple(Level(tuple(tuple(c) for c in lv[0]), int(lv[1])) for lv in self.levels),
        )
        for clause in self._all_clauses():
            if not clause:
                raise EmptyClauseError("empty clause in formula")
            for lit in clause:
                if lit == 0 or abs(lit) > self.num_vars:
                    raise ValueError(f"literal {lit} outside 1..{self.num_vars}")
        below = 0
        for i, level in enumerate(self.levels, start=1):
            if not level.clauses:
                raise ValueError(f"level {i} is empty")
            if level.weight < 1:
                raise ValueError(f"level {i} has non-positive weight {level.weight}")
            if level.weight <= below:
                raise NotBMOError(
                    i,
                    f"level {i}: weight {level.weight} does not exceed "
                    f"the total weight {below} of the levels below",
                )
            below += level.weight * len(level.clauses)

    def _all_clauses(self):
        yield from self.hard
        for level in self.levels:
            yield from level.clauses

    @property
    def sizes(self) -> tuple[int, ...]:
        return tuple(len(lv.clauses) for lv in self.levels)

    @property
    def weights(self) -> tuple[int, ...]:
        return tuple(lv.weight for lv in self.levels)

    @property
    def total_soft_weight(self) -> int:
        return sum(lv.weight * len(lv.clauses) for lv in self.levels)

    @property
    def hard_weight(self) -> int:
        """Smallest weight dominating every soft clause combined."""
        return self.total_soft_weight + 1

    @property
    def num_levels(self) -> int:
        return len(self.levels)

    def objective(self, falsified: Sequence[int]) -> int:
        """Satisfied soft weight given per-level falsified counts."""
        return sum(lv.weight * (len(lv.clauses) - u) for lv, u in zip(self.levels, falsified))

    def satisfied_weight(self, falsified: Sequence[int]) -> int:
        """Total weight of satisfied clauses, hard ones counted at ``hard_weight``."""
        return self.hard_weight * len(self.hard) + self.objective(falsified)

    def falsified_weight(self, falsified: Sequence[int]) -> int:
        return sum(lv.weight * u for lv, u in zip(self.levels, falsified))

    def canonical(self) -> LeveledFormula:
        """Same formula with clauses sorted inside each tier."""
        return LeveledFormula(
            self.num_vars,
            tuple(sorted(self.hard)),
            tuple(Level(tuple(sorted(lv.clauses)), lv.weight) for lv in self.levels),
        )


@dataclass(frozen=True)
class LevelOptima:
    """Per-level minimum falsified counts, lowest level first."""

    falsified: tuple[int, ...]
    objective: int
    model: Model = field(repr=False)


def minimal_weights(level_sizes: Sequence[int]) -> tuple[tuple[int, ...], int]:
    """Smallest integer weights satisfying the dominance condition.

    >>> minimal_weights([3, 1, 1])
    ((1, 4, 8), 16)
    """
    weights = []
    below = 0
    for size in level_sizes:
        if size < 1:
            raise ValueError("level sizes must be positive")
        w = below + 1
        weights.append(w)
        below += w * size
    return tuple(weights), below + 1


def stratify(clauses: Iterable, num_vars: int | None = None) -> LeveledFormula:
    """Group weighted clauses into a LeveledFormula.

    Soft clauses are grouped by weight; ``HARD`` clauses form the top tier.
    Tautological hard clauses are dropped, tautological soft clauses are an
    error. Raises ``NotBMOError`` if the grouped weights are not dominating.
    """
    hard = []
    by_weight = defaultdict(list)
    max_var = 0
    for clause, weight in clauses:
        norm = normalize_clause(clause)
        if norm is TAUTOLOGY:
            if weight is HARD:
                continue
            raise TautologyError(f"tautological soft clause {tuple(clause)}")
        max_var = max(max_var, max(abs(lit) for lit in norm))
        if weight is HARD:
            hard.append(norm)
        else:
            if int(weight) < 1:
                raise ValueError(f"non-positive soft weight {weight}")
            by_weight[int(weight)].append(norm)
    if num_vars is None:
        num_vars = max_var
    elif max_var > num_vars:
        raise ValueError(f"variable {max_var} exceeds num_vars={num_vars}")
    levels = tuple(Level(tuple(by_weight[w]), w) for w in sorted(by_weight))
    return LeveledFormula(num_vars, tuple(hard), levels)


def flatten(formula: LeveledFormula) -> list[WeightedClause]:
    """Weighted clause list, hard clauses first, then levels top-down.

    Hard clauses carry the ``HARD`` marker; their numeric weight, when a
    serializer needs one, is ``formula.hard_weight``.
    """
    out = [WeightedClause(c, HARD) for c in formula.hard]
    for level in reversed(formula.levels):
        out.extend(WeightedClause(c, level.weight) for c in level.clauses)
    return out
