"""Acceptance criteria 1-10, one summary line each at the end of the run."""

import itertools
import time

import pytest

from bmo.algorithms import solve_brute, solve_ipb, solve_mono, solve_rsc, verify_model
from bmo.errors import HardUnsatError
from bmo.formats import read_model, read_universe, read_wcnf, write_model, write_universe, write_wcnf
from bmo.formula import HARD, clause_satisfied
from bmo.generator import GenConfig, generate
from bmo.maxsat import MaxSatInstance, MaxSatStatus, solve_maxsat
from bmo.sat import solve_clauses
from bmo.upgrade import encode_installability, encode_upgradeability

from helpers import EXAMPLE1_CLAUSES, brute_maxsat, example2_universe, random_formula, random_maxsat, seeded
from test_formats import EXAMPLE1_TEXT

criterion = pytest.mark.criterion


@criterion(1, "Example 1 encodes to exactly its 7 installability clauses")
def test_criterion_1(note):
    clauses, _ = encode_installability(read_universe(EXAMPLE1_TEXT))
    assert len(clauses) == 7
    assert sorted(frozenset(c) for c in clauses) == sorted(frozenset(c) for c in EXAMPLE1_CLAUSES)
    note("7/7 clauses")


@criterion(2, "Example 2 encodes to 9 clauses weighted 16 (hard) / 8 / 4 / 1")
def test_criterion_2(note):
    doc = read_wcnf(write_wcnf(encode_upgradeability(example2_universe())))
    weights = [doc.top if wc.weight is HARD else wc.weight for wc in doc.clauses]
    got = sorted((frozenset(wc.clause), w) for wc, w in zip(doc.clauses, weights))
    expected = sorted(
        (frozenset(c), w)
        for c, w in [
            ((-1, 2), 16), ((-1, 5), 16), ((-1, -4), 16), ((-3, 2, 4), 16),
            ((1,), 8), ((2,), 4), ((-3,), 1), ((-4,), 1), ((-5,), 1),
        ]
    )
    assert doc.top == 16
    assert got == expected
    note("TOP 16, weights " + " ".join(map(str, sorted(weights, reverse=True))))


@criterion(3, "Example 2 optimum <1,0,0>, falsified 1, objective 14, satisfied 78 for all algorithms")
def test_criterion_3(note):
    f = encode_upgradeability(example2_universe())
    # independent enumeration over the 2^5 assignments first
    best = None
    for bits in itertools.product((False, True), repeat=5):
        model = tuple(v if b else -v for v, b in zip(range(1, 6), bits))
        check = verify_model(f, model)
        if check.hard_ok:
            key = tuple(reversed(check.falsified))
            if best is None or key < best[0]:
                best = (key, check.falsified)
    assert best[1] == (1, 0, 0)
    start = time.monotonic()
    for solve in (solve_mono, solve_rsc, solve_ipb, solve_brute):
        res = solve(f)
        assert res.falsified == (1, 0, 0), solve.__name__
        assert f.falsified_weight(res.falsified) == 1
        assert res.objective == 14
        assert f.satisfied_weight(res.falsified) == 78
    assert time.monotonic() - start < 1.0
    note("mono/rsc/ipb/brute agree")


# -- criteria 4-6 share one suite of random formulas


@pytest.fixture(scope="module")
def proposition_suite():
    rng = seeded(2024)
    rows = []
    start = time.monotonic()
    while len(rows) < 500:
        f = random_formula(rng, max_vars=14, levels=(2, 4), max_clauses=30)
        try:
            ref = solve_brute(f)
        except HardUnsatError:
            with pytest.raises(HardUnsatError):
                solve_rsc(f)
            with pytest.raises(HardUnsatError):
                solve_ipb(f)
            continue
        rows.append((f, ref, solve_rsc(f), solve_ipb(f)))
    return rows, time.monotonic() - start


@criterion(4, "rsc and ipb per-level optima equal brute force on 500 random formulas")
def test_criterion_4(proposition_suite, note):
    rows, wall = proposition_suite
    bad = [(f, ref.falsified, r.falsified, i.falsified) for f, ref, r, i in rows if not ref.falsified == r.falsified == i.falsified]
    assert not bad, bad[:3]
    assert wall < 300
    note(f"{len(rows)} formulas, {wall:.1f}s")


@criterion(5, "rsc arithmetic decoding agrees with model recount on the same suite")
def test_criterion_5(proposition_suite, note):
    rows, _ = proposition_suite
    assert all(r.stats["decode_agrees"] for _, _, r, _ in rows)
    note(f"{sum(len(r.stats['subproblem_costs']) for _, _, r, _ in rows)} subproblems")


@criterion(6, "final ipb model recounts exactly r_j falsified clauses at every level")
def test_criterion_6(proposition_suite, note):
    rows, _ = proposition_suite
    for f, _, _, res in rows:
        assert verify_model(f, res.model).falsified == tuple(res.stats["level_optima"])
        assert res.stats["relax_counts_exact"]
    note(f"{len(rows)} models")


# -- criterion 7


SCALES = (200, 500, 1000)


def scaling_config(n):
    return GenConfig(num_packages=n, base_installed=n // 4, extra_installed=20, request_size=20, seed=1)


@pytest.fixture(scope="module")
def scaling_runs():
    runs = {}
    for n in SCALES:
        f = encode_upgradeability(generate(scaling_config(n)))
        row = {"formula": f}
        for name, solve, timeout in (("rsc", solve_rsc, 60), ("ipb", solve_ipb, 60), ("mono", solve_mono, 300)):
            t = time.monotonic()
            res = solve(f, timeout=timeout)
            row[name] = (res, time.monotonic() - t)
        runs[n] = row
    return runs


@criterion(7, "scaling: rsc/ipb under 60 s at 200/500/1000 packages, mono terminates, weights > 64 bits at 1000")
def test_criterion_7_scaling(scaling_runs, note):
    bits = []
    for n in SCALES:
        row = scaling_runs[n]
        f = row["formula"]
        for name in ("rsc", "ipb"):
            assert row[name][1] < 60, (n, name, row[name][1])
        optima = {row[name][0].falsified for name in ("rsc", "ipb", "mono")}
        assert len(optima) == 1
        bits.append(f.hard_weight.bit_length())
        note(
            f"n={n}: rsc {row['rsc'][1]:.1f}s ipb {row['ipb'][1]:.1f}s mono {row['mono'][1]:.1f}s "
            f"top weight {bits[-1]} bits"
        )
    assert bits == sorted(bits) and bits[0] < bits[-1]


@criterion(7, "scaling: rsc/ipb under 60 s at 200/500/1000 packages, mono terminates, weights > 64 bits at 1000")
def test_criterion_7_weight_bits(scaling_runs, note):
    f = scaling_runs[1000]["formula"]
    bits = f.hard_weight.bit_length()
    note(f"monolithic top weight at 1000 packages is {bits} bits")
    assert bits > 64


# -- criteria 8-10


def config_space():
    rng = seeded(8)
    for k in range(100):
        n = rng.randint(5, 300)
        base = rng.randint(1, n)
        yield GenConfig(
            num_packages=n,
            base_installed=base,
            extra_installed=rng.randint(0, n - base),
            request_size=rng.randint(0, min(base, 25)),
            deps_per_package=rng.uniform(0, 3),
            disjunction_width=rng.randint(1, 4),
            conflict_density=rng.choice([0.0, 0.001, 0.01, 0.05]),
            seed=k,
        )


@criterion(8, "hard clauses of 100 generated universes are satisfiable (all-false witness)")
def test_criterion_8(note):
    start = time.monotonic()
    total = 0
    for cfg in config_space():
        clauses, vmap = encode_installability(generate(cfg))
        witness = tuple(-v for v in range(1, len(vmap) + 1))
        assert all(clause_satisfied(witness, c) for c in clauses)
        assert solve_clauses(clauses, len(vmap)).sat
        total += len(clauses)
    assert time.monotonic() - start < 60
    note(f"{total} hard clauses checked")


@criterion(9, "WCNF, universe and model read/write round-trips on 100 generated artifacts; byte-deterministic WCNF")
def test_criterion_9(note):
    for k, cfg in enumerate(config_space()):
        u = generate(cfg)
        assert read_universe(write_universe(u)) == u
        if not u.request and not u.installed:
            continue
        f = encode_upgradeability(u)
        text = write_wcnf(f)
        assert text == write_wcnf(encode_upgradeability(generate(cfg)))
        assert read_wcnf(text).formula() == f
        rng = seeded(k)
        model = tuple(v if rng.random() < 0.5 else -v for v in range(1, f.num_vars + 1))
        assert read_model(write_model(model), f.num_vars) == model
    note("100 universes")


@criterion(10, "MaxSAT engine matches exhaustive enumeration on 500 random instances")
def test_criterion_10(note):
    rng = seeded(10)
    start = time.monotonic()
    unsat = 0
    for _ in range(500):
        n, hard, soft = random_maxsat(rng, max_vars=12)
        expect = brute_maxsat(n, hard, soft)
        res = solve_maxsat(MaxSatInstance(n, hard, soft))
        if expect is None:
            assert res.status is MaxSatStatus.HARD_UNSAT
            unsat += 1
        else:
            assert res.status is MaxSatStatus.OPTIMUM and res.cost == expect
    wall = time.monotonic() - start
    assert wall < 120
    note(f"500 instances ({unsat} hard-UNSAT), {wall:.1f}s")
