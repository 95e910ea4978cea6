import pytest
from hypothesis import given, settings, strategies as st

from bmo.errors import ParseError
from bmo.formats import (
    read_model,
    read_opb,
    read_universe,
    read_wcnf,
    write_model,
    write_opb,
    write_universe,
    write_wcnf,
)
from bmo.formula import HARD, Level, LeveledFormula
from bmo.generator import GenConfig, generate
from bmo.upgrade import Package, PackageUniverse, encode_upgradeability

from helpers import EXAMPLE2_WCNF, example1_universe, example2_formula

# -- WCNF


def test_read_example2():
    doc = read_wcnf(EXAMPLE2_WCNF)
    assert doc.top == 16
    assert sum(1 for wc in doc.clauses if wc.is_hard) == 4
    assert [wc.weight for wc in doc.clauses if not wc.is_hard] == [8, 4, 1, 1, 1]
    assert doc.formula() == example2_formula()


def test_read_single_hard_unit():
    doc = read_wcnf("p wcnf 1 1 10\n10 1 0\n")
    assert [tuple(wc) for wc in doc.clauses] == [((1,), HARD)]


def test_heavier_than_top_is_hard():
    doc = read_wcnf("p wcnf 1 1 10\n12 1 0\n")
    assert doc.clauses[0].is_hard


@pytest.mark.parametrize(
    "text, lineno",
    [
        ("p wcnf 1 2 10\n10 1 0\n", 0),
        ("p cnf 1 1\n1 0\n", 1),
        ("p wcnf 2 1 10\n3 1 0 2 0\n", 2),
        ("p wcnf 2 1 10\n3 1 2\n", 2),
        ("p wcnf 2 1 10\n3 1 7 0\n", 2),
        ("p wcnf 2 1 10\n0 1 0\n", 2),
        ("p wcnf 2 1 10\n-4 1 0\n", 2),
        ("p wcnf 2 1 10\n3 0\n", 2),
        ("c hi\np wcnf 2 1 10\n3 x 0\n", 3),
    ],
)
def test_wcnf_errors(text, lineno):
    with pytest.raises(ParseError) as exc:
        read_wcnf(text)
    assert exc.value.lineno == lineno
    assert str(exc.value).startswith(f"line {lineno}:")


def test_headerless_h_format_and_crlf():
    doc = read_wcnf("c new style\r\nh 1 -2 0\r\n3 2 0\r\n")
    assert doc.top is None
    assert doc.clauses[0].is_hard and doc.clauses[1].weight == 3
    assert doc.num_vars == 2


def test_write_example2():
    text = write_wcnf(example2_formula())
    assert text.splitlines()[0] == "p wcnf 5 9 16"
    assert {int(line.split()[0]) for line in text.splitlines()[1:]} == {16, 8, 4, 1}


def test_write_pure_hard():
    text = write_wcnf(LeveledFormula(2, [(1, 2), (-1,)], []))
    assert text == "p wcnf 2 2 1\n1 1 2 0\n1 -1 0\n"


def test_write_explicit_weights_top():
    f = LeveledFormula(2, [(1,)], [Level([(1,), (2,)], 1), Level([(-1,)], 5)])
    doc = read_wcnf(write_wcnf(f))
    assert doc.top == 1 + 2 + 5


def test_wcnf_big_weights():
    f = LeveledFormula(1, [], [Level([(1,)], 1), Level([(-1,)], 1 << 70)])
    assert read_wcnf(write_wcnf(f)).formula() == f


# -- OPB


def test_opb_example2():
    text = write_opb(example2_formula())
    doc = read_opb(text)
    assert sorted(c for c, _ in doc.objective) == [1, 1, 1, 4, 8]
    assert len(doc.constraints) == 9
    assert all(op == ">=" and k == 1 for _, op, k in doc.constraints)
    assert "+1 ~x3 +1 x8 >= 1 ;" in text.splitlines()


def test_opb_no_softs():
    text = write_opb(LeveledFormula(2, [(1, -2)], []))
    assert "min:" not in text
    assert text.splitlines()[1:] == ["+1 x1 +1 ~x2 >= 1 ;"]


def test_opb_errors():
    with pytest.raises(ParseError):
        read_opb("+1 x1 >= 1\n")
    with pytest.raises(ParseError):
        read_opb("+1 y1 >= 1 ;\n")


# -- universes


EXAMPLE1_TEXT = """\
# Example 1
package: p1
depends: p2
depends: p5 | p6

package: p2
conflicts: p3

package: p3
depends: p4
conflicts: p1

package: p4
conflicts: p5, p6

package: p5

package: p6

request:
"""


def test_read_example1_universe():
    assert read_universe(EXAMPLE1_TEXT) == example1_universe()


def test_empty_universe():
    u = read_universe("")
    assert u == PackageUniverse({})


def test_two_disjunctions_on_one_package():
    u = read_universe("package: p1\ndepends: p2 | p5\ndepends: p5\npackage: p2\npackage: p5\n")
    assert u.packages["p1"].depends == (("p2", "p5"), ("p5",))


@pytest.mark.parametrize(
    "text, lineno",
    [
        ("package: a\npackage: a\n", 2),
        ("package: a\ndepends: b\n", 2),
        ("package: a\nwhatever\n", 2),
        ("package: a\ncolor: red\n", 2),
        ("depends: a\n", 1),
        ("package: a\nrequest:\nb\n", 3),
        ("package: a\nconflicts: a\n", 2),
        ("package: a\ninstalled: maybe\n", 2),
    ],
)
def test_universe_errors(text, lineno):
    with pytest.raises(ParseError) as exc:
        read_universe(text)
    assert exc.value.lineno == lineno


def test_universe_roundtrip_generated():
    for seed in range(100):
        cfg = GenConfig(num_packages=40, base_installed=10, extra_installed=seed % 7, request_size=seed % 5, seed=seed)
        u = generate(cfg)
        assert read_universe(write_universe(u)) == u


# -- models


def test_model_example2():
    assert write_model((1, 2, -3, -4, 5)) == "v 1 2 -3 -4 5"
    assert write_model(()) == "v"
    assert read_model("v") == ()


def test_model_errors():
    with pytest.raises(ParseError):
        read_model("v 1 7", num_vars=3)
    with pytest.raises(ParseError):
        read_model("v 1 -1")
    with pytest.raises(ParseError):
        read_model("v 1 3")
    with pytest.raises(ParseError):
        read_model("s OPTIMUM FOUND")


def test_model_multiple_v_lines():
    assert read_model("o 3\nv 1 -2\nv 3 0\n") == (1, -2, 3)


@given(st.lists(st.booleans(), max_size=40))
def test_model_roundtrip(bits):
    model = tuple(v if b else -v for v, b in enumerate(bits, start=1))
    assert read_model(write_model(model), len(model)) == model


# -- property round-trips


@st.composite
def formulas(draw):
    n = draw(st.integers(min_value=1, max_value=10))
    lit = st.integers(min_value=1, max_value=n).flatmap(lambda v: st.sampled_from([v, -v]))
    clause = st.lists(lit, min_size=1, max_size=4, unique_by=abs).map(
        lambda c: tuple(sorted(c, key=lambda l: (abs(l), l < 0)))
    )
    hard = draw(st.lists(clause, max_size=6))
    sizes = draw(st.lists(st.integers(min_value=1, max_value=4), max_size=4))
    weights, below = [], 0
    for s in sizes:
        w = below + draw(st.integers(min_value=1, max_value=1000))
        weights.append(w)
        below += w * s
    levels = [Level(draw(st.lists(clause, min_size=s, max_size=s)), w) for s, w in zip(sizes, weights)]
    return LeveledFormula(n, hard, levels)


@settings(max_examples=100)
@given(formulas())
def test_wcnf_roundtrip(f):
    text = write_wcnf(f)
    assert read_wcnf(text).formula() == f
    assert write_wcnf(read_wcnf(text).formula()) == text


def test_wcnf_byte_deterministic_on_generated():
    for seed in range(100):
        cfg = GenConfig(num_packages=50, base_installed=12, extra_installed=4, request_size=3, seed=seed)
        a = write_wcnf(encode_upgradeability(generate(cfg)))
        b = write_wcnf(encode_upgradeability(generate(cfg)))
        assert a == b
        assert read_wcnf(a).formula() == encode_upgradeability(generate(cfg))
