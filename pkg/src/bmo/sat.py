"""Incremental CDCL SAT solver.

First-UIP learning, two watched literals, VSIDS branching, phase saving,
Luby restarts and LBD-based learnt clause reduction. Assumptions are handled
as forced leading decisions; an UNSAT answer under assumptions carries the
subset of assumptions that was used to derive the conflict.

Internally literal ``v`` maps to ``2*v`` and ``-v`` to ``2*v + 1``.
"""

from __future__ import annotations

import enum
import heapq
import time
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .formula import Model


class Status(enum.Enum):
    SAT = "SAT"
    UNSAT = "UNSAT"
    INTERRUPTED = "INTERRUPTED"


@dataclass(frozen=True)
class SolveOutcome:
    status: Status
    model: Model | None = None
    core: tuple[int, ...] | None = None

    @property
    def sat(self) -> bool:
        return self.status is Status.SAT


@dataclass
class EngineStats:
    decisions: int = 0
    propagations: int = 0
    conflicts: int = 0
    restarts: int = 0
    learned: int = 0
    solves: int = 0


def luby(y: float, x: int) -> float:
    size, seq = 1, 0
    while size < x + 1:
        seq += 1
        size = 2 * size + 1
    while size - 1 != x:
        size = (size - 1) >> 1
        seq -= 1
        x = x % size
    return y**seq


def _enc(lit: int) -> int:
    return 2 * lit if lit > 0 else -2 * lit + 1


def _dec(p: int) -> int:
    return -(p >> 1) if p & 1 else p >> 1


@dataclass
class SolverConfig:
    var_decay: float = 0.95
    restart_base: int = 100
    learnts_min: int = 2000
    learnts_growth: float = 1.1
    check_models: bool = True


class Solver:
    def __init__(self, config: SolverConfig | None = None):
        self.config = config or SolverConfig()
        self.stats = EngineStats()
        self._nvars = 0
        self._value = [0, 0]  # per internal literal: 1 true, -1 false, 0 free
        self._level = [0]
        self._reason: list = [None]
        self._activity = [0.0]
        self._phase = [False]
        self._seen = [False]
        self._watches: list[list] = [[], []]
        self._bins: list[list] = [[], []]  # false literal -> [(implied literal, clause)]
        self._trail: list[int] = []
        self._trail_lim: list[int] = []
        self._qhead = 0
        self._heap: list = []
        self._heap_act = [-1.0]  # activity of the live heap entry, -1 if none
        self._var_inc = 1.0
        self._learnts: list[list[int]] = []
        self._lbd: dict[int, int] = {}
        self._num_problem = 0
        self._originals: list[tuple[int, ...]] = []
        self._max_learnts = float(self.config.learnts_min)
        self._ok = True

    # -- variables and clauses ------------------------------------------------

    @property
    def num_vars(self) -> int:
        return self._nvars

    @property
    def num_clauses(self) -> int:
        return len(self._originals)

    def new_var(self) -> int:
        self._nvars += 1
        v = self._nvars
        self._value += [0, 0]
        self._level.append(0)
        self._reason.append(None)
        self._activity.append(0.0)
        self._phase.append(False)
        self._seen.append(False)
        self._watches += [[], []]
        self._bins += [[], []]
        self._heap_act.append(0.0)
        heapq.heappush(self._heap, (-0.0, v))
        return v

    def new_vars(self, n: int) -> list[int]:
        return [self.new_var() for _ in range(n)]

    def ensure_vars(self, n: int) -> None:
        while self._nvars < n:
            self.new_var()

    def set_phase(self, lit: int) -> None:
        """Preferred polarity for the next decision on ``abs(lit)``."""
        self._phase[abs(lit)] = lit > 0

    def set_activity(self, var: int, activity: float) -> None:
        """Seed the branching score of ``var`` (higher branches earlier)."""
        self._activity[var] = float(activity)
        if self._value[2 * var] == 0:
            self._heap_act[var] = self._activity[var]
            heapq.heappush(self._heap, (-self._activity[var], var))
        else:
            self._heap_act[var] = -1.0

    def add_clause(self, lits: Iterable[int]) -> bool:
        """Add a permanent clause; returns False once the database is UNSAT."""
        lits = tuple(lits)
        for lit in lits:
            if lit == 0 or abs(lit) > self._nvars:
                raise ValueError(f"unknown variable in literal {lit}")
        if self._trail_lim:
            self._cancel_until(0)
        self._originals.append(lits)
        if not self._ok:
            return False
        value = self._value
        ps = []
        seen = set()
        for lit in lits:
            p = _enc(lit)
            if p in seen:
                continue
            if p ^ 1 in seen or value[p] == 1:
                return True
            seen.add(p)
            if value[p] == 0:
                ps.append(p)
        if not ps:
            self._ok = False
            return False
        if len(ps) == 1:
            self._enqueue(ps[0], None)
            if self._propagate() is not None:
                self._ok = False
                return False
            return True
        self._attach(ps)
        self._num_problem += 1
        return True

    def _attach(self, c: list[int]) -> None:
        if len(c) == 2:
            self._bins[c[0]].append((c[1], c))
            self._bins[c[1]].append((c[0], c))
        else:
            self._watches[c[0]].append(c)
            self._watches[c[1]].append(c)

    # -- core CDCL ------------------------------------------------------------

    def _enqueue(self, p: int, reason) -> None:
        self._value[p] = 1
        self._value[p ^ 1] = -1
        v = p >> 1
        self._level[v] = len(self._trail_lim)
        self._reason[v] = reason
        self._trail.append(p)

    def _propagate(self):
        value = self._value
        watches = self._watches
        bins = self._bins
        trail = self._trail
        level = self._level
        reason = self._reason
        dl = len(self._trail_lim)
        qhead = self._qhead
        conflict = None
        props = 0
        while qhead < len(trail):
            false_lit = trail[qhead] ^ 1
            qhead += 1
            props += 1
            for other, c in bins[false_lit]:
                val = value[other]
                if val == 1:
                    continue
                if val == -1:
                    conflict = c
                    break
                c[0] = other
                c[1] = false_lit
                value[other] = 1
                value[other ^ 1] = -1
                v = other >> 1
                level[v] = dl
                reason[v] = c
                trail.append(other)
            if conflict is not None:
                break
            ws = watches[false_lit]
            n = len(ws)
            i = j = 0
            while i < n:
                c = ws[i]
                i += 1
                if c[0] == false_lit:
                    c[0] = c[1]
                    c[1] = false_lit
                first = c[0]
                if value[first] == 1:
                    ws[j] = c
                    j += 1
                    continue
                for k in range(2, len(c)):
                    q = c[k]
                    if value[q] != -1:
                        c[1] = q
                        c[k] = false_lit
                        watches[q].append(c)
                        break
                else:
                    ws[j] = c
                    j += 1
                    if value[first] == -1:
                        conflict = c
                        while i < n:
                            ws[j] = ws[i]
                            j += 1
                            i += 1
                    else:
                        value[first] = 1
                        value[first ^ 1] = -1
                        v = first >> 1
                        level[v] = dl
                        reason[v] = c
                        trail.append(first)
            del ws[j:]
            if conflict is not None:
                break
        self._qhead = len(trail) if conflict is not None else qhead
        self.stats.propagations += props
        return conflict

    def _bump(self, v: int) -> None:
        act = self._activity
        act[v] += self._var_inc
        if act[v] > 1e100:
            for u in range(1, self._nvars + 1):
                act[u] *= 1e-100
            self._var_inc *= 1e-100
            self._rebuild_heap()
        elif self._value[2 * v] == 0:
            self._heap_act[v] = act[v]
            heapq.heappush(self._heap, (-act[v], v))
        else:
            self._heap_act[v] = -1.0

    def _rebuild_heap(self) -> None:
        value = self._value
        act = self._activity
        heap_act = self._heap_act
        self._heap = []
        for v in range(1, self._nvars + 1):
            if value[2 * v] == 0:
                heap_act[v] = act[v]
                self._heap.append((-act[v], v))
            else:
                heap_act[v] = -1.0
        heapq.heapify(self._heap)

    def _analyze(self, confl):
        seen = self._seen
        level = self._level
        reason = self._reason
        trail = self._trail
        dl = len(self._trail_lim)
        learnt = [0]
        path = 0
        p = -1
        index = len(trail) - 1
        c = confl
        while True:
            for q in c if p == -1 else c[1:]:
                v = q >> 1
                if not seen[v] and level[v] > 0:
                    self._bump(v)
                    seen[v] = True
                    if level[v] >= dl:
                        path += 1
                    else:
                        learnt.append(q)
            while not seen[trail[index] >> 1]:
                index -= 1
            p = trail[index]
            index -= 1
            v = p >> 1
            c = reason[v]
            seen[v] = False
            path -= 1
            if path == 0:
                break
        learnt[0] = p ^ 1

        # drop literals implied by the rest of the clause through one reason
        kept = [learnt[0]]
        for q in learnt[1:]:
            r = reason[q >> 1]
            if r is None:
                kept.append(q)
                continue
            for x in r[1:]:
                u = x >> 1
                if not seen[u] and level[u] > 0:
                    kept.append(q)
                    break
        for q in learnt:
            seen[q >> 1] = False
        learnt = kept

        if len(learnt) == 1:
            return learnt, 0, 1
        best = 1
        for k in range(2, len(learnt)):
            if level[learnt[k] >> 1] > level[learnt[best] >> 1]:
                best = k
        learnt[1], learnt[best] = learnt[best], learnt[1]
        lbd = len({level[q >> 1] for q in learnt})
        return learnt, level[learnt[1] >> 1], lbd

    def _analyze_final(self, p: int) -> list[int]:
        """Assumption literals responsible for ``p`` being false."""
        core = [p ^ 1]
        if not self._trail_lim:
            return core
        seen = self._seen
        level = self._level
        reason = self._reason
        seen[p >> 1] = True
        start = self._trail_lim[0]
        for idx in range(len(self._trail) - 1, start - 1, -1):
            q = self._trail[idx]
            v = q >> 1
            if seen[v]:
                r = reason[v]
                if r is None:
                    core.append(q)
                else:
                    for x in r[1:]:
                        if level[x >> 1] > 0:
                            seen[x >> 1] = True
                seen[v] = False
        seen[p >> 1] = False
        return core

    def _cancel_until(self, lvl: int) -> None:
        if len(self._trail_lim) <= lvl:
            return
        value = self._value
        phase = self._phase
        reason = self._reason
        act = self._activity
        heap_act = self._heap_act
        heap = self._heap
        trail = self._trail
        stop = self._trail_lim[lvl]
        push = heapq.heappush
        for idx in range(len(trail) - 1, stop - 1, -1):
            p = trail[idx]
            v = p >> 1
            value[p] = 0
            value[p ^ 1] = 0
            reason[v] = None
            phase[v] = not (p & 1)
            if heap_act[v] != act[v]:
                heap_act[v] = act[v]
                push(heap, (-act[v], v))
        del trail[stop:]
        del self._trail_lim[lvl:]
        self._qhead = stop
        if len(heap) > 4 * self._nvars + 64:
            self._rebuild_heap()

    def _pick_branch(self) -> int:
        heap = self._heap
        value = self._value
        heap_act = self._heap_act
        pop = heapq.heappop
        while heap:
            neg, v = pop(heap)
            if heap_act[v] != -neg:
                continue
            heap_act[v] = -1.0
            if value[2 * v] == 0:
                return 2 * v if self._phase[v] else 2 * v + 1
        return -1

    def _locked(self, c) -> bool:
        v = c[0] >> 1
        return self._reason[v] is c and self._value[c[0]] == 1

    def _reduce_db(self) -> None:
        lbd = self._lbd
        cands = [c for c in self._learnts if len(c) > 2 and lbd[id(c)] > 2 and not self._locked(c)]
        cands.sort(key=lambda c: (lbd[id(c)], len(c)))
        doomed = cands[len(cands) // 2 :]
        if not doomed:
            return
        gone = {id(c) for c in doomed}
        for ws in self._watches:
            if ws:
                ws[:] = [c for c in ws if id(c) not in gone]
        self._learnts = [c for c in self._learnts if id(c) not in gone]
        for key in gone:
            del lbd[key]

    def _search(self, nconf: int, assumptions: list[int], deadline, budget):
        conflicts = 0
        stats = self.stats
        decay = 1.0 / self.config.var_decay
        while True:
            confl = self._propagate()
            if confl is not None:
                stats.conflicts += 1
                conflicts += 1
                if not self._trail_lim:
                    self._ok = False
                    return Status.UNSAT, []
                learnt, bt, lbd = self._analyze(confl)
                self._cancel_until(bt)
                if len(learnt) == 1:
                    self._enqueue(learnt[0], None)
                else:
                    self._attach(learnt)
                    self._learnts.append(learnt)
                    self._lbd[id(learnt)] = lbd
                    self._enqueue(learnt[0], learnt)
                stats.learned += 1
                self._var_inc *= decay
                if budget is not None and stats.conflicts >= budget:
                    return Status.INTERRUPTED, None
                if deadline is not None and conflicts % 64 == 0 and time.monotonic() > deadline:
                    return Status.INTERRUPTED, None
                continue

            if conflicts >= nconf:
                return None, None
            if len(self._learnts) - len(self._trail) >= self._max_learnts:
                self._reduce_db()
                self._max_learnts *= self.config.learnts_growth

            nxt = -1
            while len(self._trail_lim) < len(assumptions):
                p = assumptions[len(self._trail_lim)]
                if self._value[p] == 1:
                    self._trail_lim.append(len(self._trail))
                elif self._value[p] == -1:
                    return Status.UNSAT, self._analyze_final(p ^ 1)
                else:
                    nxt = p
                    break
            if nxt == -1:
                nxt = self._pick_branch()
                if nxt == -1:
                    return Status.SAT, None
                stats.decisions += 1
                if deadline is not None and stats.decisions % 1024 == 0 and time.monotonic() > deadline:
                    return Status.INTERRUPTED, None
            self._trail_lim.append(len(self._trail))
            self._enqueue(nxt, None)

    def solve(
        self,
        assumptions: Sequence[int] = (),
        conflict_budget: int | None = None,
        deadline: float | None = None,
    ) -> SolveOutcome:
        """Decide satisfiability of the database under ``assumptions``.

        ``conflict_budget`` bounds the number of conflicts for this call and
        ``deadline`` is an absolute ``time.monotonic()`` value; exhausting
        either yields ``Status.INTERRUPTED``.
        """
        self.stats.solves += 1
        for lit in assumptions:
            if lit == 0 or abs(lit) > self._nvars:
                raise ValueError(f"unknown variable in assumption {lit}")
        if not self._ok:
            return SolveOutcome(Status.UNSAT, core=())
        if deadline is not None and time.monotonic() > deadline:
            return SolveOutcome(Status.INTERRUPTED)
        self._cancel_until(0)
        if self._propagate() is not None:
            self._ok = False
            return SolveOutcome(Status.UNSAT, core=())
        assumps = [_enc(lit) for lit in assumptions]
        budget = None if conflict_budget is None else self.stats.conflicts + conflict_budget
        curr = 0
        while True:
            nconf = int(luby(2, curr) * self.config.restart_base)
            status, core = self._search(nconf, assumps, deadline, budget)
            if status is not None:
                break
            curr += 1
            self.stats.restarts += 1
            self._cancel_until(0)

        if status is Status.SAT:
            value = self._value
            model = tuple(v if value[2 * v] == 1 else -v for v in range(1, self._nvars + 1))
            if self.config.check_models:
                self._check(model)
            self._cancel_until(0)
            return SolveOutcome(Status.SAT, model=model)
        self._cancel_until(0)
        if status is Status.UNSAT:
            return SolveOutcome(Status.UNSAT, core=tuple(_dec(p) for p in core))
        return SolveOutcome(Status.INTERRUPTED)

    def _check(self, model: Model) -> None:
        for clause in self._originals:
            if not any(model[abs(lit) - 1] == lit for lit in clause):
                raise AssertionError(f"model violates clause {clause}")


def solve_clauses(clauses: Iterable[Sequence[int]], num_vars: int = 0, assumptions=()) -> SolveOutcome:
    """One-shot convenience wrapper."""
    clauses = [tuple(c) for c in clauses]
    solver = Solver()
    top = max([num_vars] + [abs(lit) for c in clauses for lit in c])
    solver.ensure_vars(top)
    for c in clauses:
        if not solver.add_clause(c):
            break
    return solver.solve(assumptions)
