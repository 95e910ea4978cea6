"""Seeded synthetic package universes in the style of ``i<x>u<y>`` instances.

Randomness comes from SplitMix64 so a given seed produces the same universe
in any language that implements the same update rule::

    state = (state + 0x9E3779B97F4A7C15) mod 2**64
    z = state
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) mod 2**64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) mod 2**64
    output z ^ (z >> 31)
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import ConfigError
from .upgrade import Package, PackageUniverse

MASK64 = (1 << 64) - 1


class SplitMix64:
    def __init__(self, seed: int):
        self.state = seed & MASK64

    def next(self) -> int:
        self.state = (self.state + 0x9E3779B97F4A7C15) & MASK64
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
        return z ^ (z >> 31)

    def below(self, n: int) -> int:
        """Uniform integer in ``[0, n)`` (rejection sampling, no modulo bias)."""
        if n <= 0:
            raise ValueError("n must be positive")
        limit = (1 << 64) - ((1 << 64) % n)
        while True:
            z = self.next()
            if z < limit:
                return z % n

    def random(self) -> float:
        return (self.next() >> 11) * (1.0 / (1 << 53))

    def sample(self, population: list, k: int) -> list:
        """``k`` distinct items, partial Fisher-Yates on a copy."""
        pool = list(population)
        if k > len(pool):
            raise ValueError("sample larger than population")
        for i in range(k):
            j = i + self.below(len(pool) - i)
            pool[i], pool[j] = pool[j], pool[i]
        return pool[:k]


@dataclass(frozen=True)
class GenConfig:
    num_packages: int = 200
    base_installed: int = 50
    extra_installed: int = 0
    request_size: int = 20
    deps_per_package: float = 1.5
    disjunction_width: int = 2
    conflict_density: float = 0.002
    seed: int = 1

    def validate(self) -> None:
        if self.num_packages < 1:
            raise ConfigError("num_packages must be positive")
        for name in ("base_installed", "extra_installed", "request_size"):
            if getattr(self, name) < 0:
                raise ConfigError(f"{name} must be non-negative")
        if self.base_installed + self.extra_installed > self.num_packages:
            raise ConfigError(
                f"base_installed + extra_installed = {self.base_installed + self.extra_installed} "
                f"exceeds num_packages = {self.num_packages}"
            )
        if self.request_size > self.base_installed:
            raise ConfigError(
                f"request_size {self.request_size} exceeds base_installed {self.base_installed}"
            )
        if self.request_size == 0 and self.base_installed + self.extra_installed == 0:
            raise ConfigError("nothing requested and nothing installed")
        if self.deps_per_package < 0 or self.disjunction_width < 1:
            raise ConfigError("bad dependency shape")
        if not 0.0 <= self.conflict_density < 1.0:
            raise ConfigError("conflict_density must be in [0, 1)")

    @property
    def name(self) -> str:
        return f"i{self.extra_installed}u{self.request_size}-s{self.seed}"


def _dep_count(rng: SplitMix64, mean: float) -> int:
    # binomial with 2*ceil(mean) trials keeps the requested mean
    trials = 2 * math.ceil(mean)
    if trials == 0:
        return 0
    p = mean / trials
    return sum(1 for _ in range(trials) if rng.random() < p)


def generate(cfg: GenConfig) -> PackageUniverse:
    """Build a universe; identical configs give identical universes.

    Packages only depend on lower-numbered packages, so the dependency graph
    is acyclic. The base installation behaves like a working system: every
    dependency of a base package has an alternative inside the base, and no
    two base packages conflict. Extra installed packages get no such
    guarantee, which is where the upgrade trade-offs come from. Conflicts
    are drawn per unordered pair with probability ``conflict_density`` and
    dropped when one package can reach the other through dependencies. The
    request is a uniform sample of the base.
    """
    cfg.validate()
    rng = SplitMix64(cfg.seed)
    n = cfg.num_packages
    width = len(str(n - 1))
    names = [f"p{i:0{width}d}" for i in range(n)]

    order = list(range(n))
    base = rng.sample(order, cfg.base_installed)
    base_set = set(base)
    rest = [i for i in order if i not in base_set]
    extra = rng.sample(rest, cfg.extra_installed)
    request = rng.sample(sorted(base), cfg.request_size)

    depends: list[list[tuple[int, ...]]] = [[] for _ in range(n)]
    reach = [0] * n  # bitset of packages reachable through dependencies
    base_below: list[int] = []  # base packages with index < k, ascending
    for k in range(n):
        in_base = k in base_set
        if k > 0 and not (in_base and not base_below):
            for _ in range(_dep_count(rng, cfg.deps_per_package)):
                w = 1 + rng.below(min(cfg.disjunction_width, k))
                alts = rng.sample(range(k), w)
                if in_base and not any(a in base_set for a in alts):
                    alts[0] = base_below[rng.below(len(base_below))]
                alts = tuple(sorted(set(alts)))
                if alts in depends[k]:
                    continue
                depends[k].append(alts)
                for a in alts:
                    reach[k] |= (1 << a) | reach[a]
        if in_base:
            base_below.append(k)

    conflicts: list[list[int]] = [[] for _ in range(n)]
    p = cfg.conflict_density
    if p > 0.0 and n > 1:
        # geometric skipping over the pairs (i, j), i < j, in row-major order
        total = n * (n - 1) // 2
        log_q = math.log1p(-p)
        idx = -1
        while True:
            u = rng.random()
            skip = math.log(1.0 - u) / log_q
            if idx + 1 + skip >= total:
                break
            idx += 1 + int(skip)
            i, j = _pair(idx, n)
            if (reach[i] >> j) & 1 or (reach[j] >> i) & 1:
                continue
            if i in base_set and j in base_set:
                continue
            conflicts[i].append(j)

    packages = {
        names[k]: Package(
            tuple(tuple(names[a] for a in alts) for alts in depends[k]),
            tuple(names[j] for j in conflicts[k]),
        )
        for k in range(n)
    }
    return PackageUniverse(
        packages,
        frozenset(names[k] for k in base + extra),
        frozenset(names[k] for k in request),
    )


def _pair(idx: int, n: int) -> tuple[int, int]:
    """Inverse of the row-major enumeration of pairs ``i < j < n``."""
    i = 0
    row = n - 1
    while idx >= row:
        idx -= row
        i += 1
        row -= 1
    return i, i + 1 + idx
