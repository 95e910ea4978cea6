"""Package installability and upgradeability encodings.

Each package becomes one variable (true = installed), numbered by sorting the
package names. Dependencies and conflicts are hard clauses; the user's
preferences become three soft tiers, from weakest to strongest:

1. packages neither requested nor installed stay uninstalled (``-x``),
2. previously installed packages stay installed (``x``),
3. requested packages get installed (``x``).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .errors import UniverseError
from .formula import TAUTOLOGY, Clause, Level, LeveledFormula, minimal_weights, normalize_clause


@dataclass(frozen=True)
class Package:
    depends: tuple[tuple[str, ...], ...] = ()
    conflicts: tuple[str, ...] = ()


@dataclass(frozen=True)
class PackageUniverse:
    packages: Mapping[str, Package] = field(default_factory=dict)
    installed: frozenset[str] = frozenset()
    request: frozenset[str] = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "installed", frozenset(self.installed))
        object.__setattr__(self, "request", frozenset(self.request))
        self.validate()

    def validate(self) -> None:
        names = self.packages
        for name, pkg in names.items():
            for alts in pkg.depends:
                if not alts:
                    raise UniverseError(f"{name}: empty dependency disjunction")
                for dep in alts:
                    if dep not in names:
                        raise UniverseError(f"{name}: depends on undeclared package {dep!r}")
            for other in pkg.conflicts:
                if other == name:
                    raise UniverseError(f"{name}: package conflicts with itself")
                if other not in names:
                    raise UniverseError(f"{name}: conflicts with undeclared package {other!r}")
        for what, group in (("installed", self.installed), ("requested", self.request)):
            for name in sorted(group):
                if name not in names:
                    raise UniverseError(f"{what} package {name!r} is not declared")

    def __eq__(self, other):
        if not isinstance(other, PackageUniverse):
            return NotImplemented
        return (
            dict(self.packages) == dict(other.packages)
            and self.installed == other.installed
            and self.request == other.request
        )

    def __hash__(self):
        return hash((tuple(sorted(self.packages)), self.installed, self.request))


class VarMap:
    """Bijection between package names and variables, by sorted name."""

    def __init__(self, names):
        self.names = tuple(sorted(names))
        self._var = {name: i for i, name in enumerate(self.names, start=1)}

    def __len__(self):
        return len(self.names)

    def var(self, name: str) -> int:
        return self._var[name]

    def name(self, var: int) -> str:
        return self.names[var - 1]

    def installed(self, model: Sequence[int]) -> list[str]:
        return [self.names[lit - 1] for lit in model[: len(self.names)] if lit > 0]


def encode_installability(universe: PackageUniverse) -> tuple[list[Clause], VarMap]:
    vmap = VarMap(universe.packages)
    clauses: list[Clause] = []
    emitted = set()
    for name in vmap.names:
        pkg = universe.packages[name]
        x = vmap.var(name)
        for alts in pkg.depends:
            clause = normalize_clause([-x] + [vmap.var(d) for d in alts])
            if clause is not TAUTOLOGY:
                clauses.append(clause)
        for other in pkg.conflicts:
            pair = frozenset((name, other))
            if pair in emitted:
                continue
            emitted.add(pair)
            clauses.append(normalize_clause([-x, -vmap.var(other)]))
    return clauses, vmap


def preference_tiers(universe: PackageUniverse, vmap: VarMap) -> list[list[Clause]]:
    """Nonempty soft tiers, weakest first."""
    request = universe.request
    keep = universe.installed - request
    tiers = [
        [(-vmap.var(n),) for n in vmap.names if n not in request and n not in keep],
        [(vmap.var(n),) for n in vmap.names if n in keep],
        [(vmap.var(n),) for n in vmap.names if n in request],
    ]
    return [t for t in tiers if t]


def encode_upgradeability(universe: PackageUniverse, weights: Sequence[int] | None = None) -> LeveledFormula:
    """Leveled formula for the upgrade problem.

    ``weights`` lists one weight per nonempty tier, weakest first; by default
    the smallest dominating weights are used.
    """
    if not universe.request and not universe.installed:
        raise UniverseError("nothing requested and nothing installed")
    hard, vmap = encode_installability(universe)
    tiers = preference_tiers(universe, vmap)
    if weights is None:
        weights, _ = minimal_weights([len(t) for t in tiers])
    elif len(weights) != len(tiers):
        raise ValueError(f"expected {len(tiers)} weights, got {len(weights)}")
    levels = tuple(Level(tuple(t), int(w)) for t, w in zip(tiers, weights))
    return LeveledFormula(len(vmap), tuple(hard), levels)
