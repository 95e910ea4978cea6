"""Readers and writers: WCNF, OPB, package universes and model lines.

Output is always ``\\n``-terminated UTF-8 text with a fixed clause order, so
equal inputs serialize to identical bytes. CRLF input is accepted.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from .errors import ParseError
from .formula import HARD, LeveledFormula, Model, WeightedClause, flatten, stratify
from .upgrade import Package, PackageUniverse


def _lines(text: str):
    for lineno, line in enumerate(text.splitlines(), start=1):
        yield lineno, line.strip()


# -- WCNF ---------------------------------------------------------------------


@dataclass
class WcnfDocument:
    num_vars: int
    clauses: list[WeightedClause]
    top: int | None
    comments: list[str] = field(default_factory=list)

    def formula(self) -> LeveledFormula:
        return stratify(self.clauses, self.num_vars)


def _parse_clause(tokens, lineno, num_vars):
    lits = []
    for k, tok in enumerate(tokens):
        try:
            lit = int(tok)
        except ValueError:
            raise ParseError(lineno, f"bad literal {tok!r}") from None
        if lit == 0:
            if k != len(tokens) - 1:
                raise ParseError(lineno, "literal 0 before end of clause")
            break
        if num_vars is not None and abs(lit) > num_vars:
            raise ParseError(lineno, f"variable {abs(lit)} exceeds declared {num_vars}")
        lits.append(lit)
    else:
        raise ParseError(lineno, "clause not terminated by 0")
    if not lits:
        raise ParseError(lineno, "empty clause")
    return tuple(lits)


def read_wcnf(text: str) -> WcnfDocument:
    """Parse DIMACS WCNF, classic ``p wcnf V C TOP`` or the header-less form.

    A clause whose weight is at least TOP is hard. In the header-less form,
    lines starting with ``h`` are hard.
    """
    header = None
    clauses: list[WeightedClause] = []
    comments = []
    max_var = 0
    for lineno, line in _lines(text):
        if not line:
            continue
        if line.startswith("c"):
            comments.append(line[1:].strip())
            continue
        tokens = line.split()
        if tokens[0] == "p":
            if header is not None or clauses:
                raise ParseError(lineno, "unexpected header")
            if len(tokens) not in (4, 5) or tokens[1] != "wcnf":
                raise ParseError(lineno, "malformed header, expected 'p wcnf V C [TOP]'")
            try:
                nums = [int(t) for t in tokens[2:]]
            except ValueError:
                raise ParseError(lineno, "malformed header numbers") from None
            if any(x < 0 for x in nums) or (len(nums) == 3 and nums[2] < 1):
                raise ParseError(lineno, "malformed header numbers")
            header = (nums[0], nums[1], nums[2] if len(nums) == 3 else None)
            continue
        num_vars = header[0] if header else None
        top = header[2] if header else None
        if tokens[0] == "h":
            if header is not None:
                raise ParseError(lineno, "'h' clause in a file with a p-line header")
            clause = _parse_clause(tokens[1:], lineno, num_vars)
            clauses.append(WeightedClause(clause, HARD))
        else:
            try:
                weight = int(tokens[0])
            except ValueError:
                raise ParseError(lineno, f"bad weight {tokens[0]!r}") from None
            if weight < 1:
                raise ParseError(lineno, f"non-positive weight {weight}")
            clause = _parse_clause(tokens[1:], lineno, num_vars)
            hard = top is not None and weight >= top
            clauses.append(WeightedClause(clause, HARD if hard else weight))
        max_var = max(max_var, max(abs(lit) for lit in clause))
    if header is None:
        return WcnfDocument(max_var, clauses, None, comments)
    if header[1] != len(clauses):
        raise ParseError(0, f"header declares {header[1]} clauses, found {len(clauses)}")
    return WcnfDocument(header[0], clauses, header[2], comments)


def _clause_text(clause) -> str:
    return " ".join(str(lit) for lit in clause)


def write_wcnf(formula: LeveledFormula, comments: Sequence[str] = ()) -> str:
    top = formula.hard_weight
    flat = flatten(formula)
    out = [f"c {c}" for c in comments]
    out.append(f"p wcnf {formula.num_vars} {len(flat)} {top}")
    for clause, weight in flat:
        w = top if weight is HARD else weight
        out.append(f"{w} {_clause_text(clause)} 0")
    return "\n".join(out) + "\n"


# -- OPB ----------------------------------------------------------------------


def _term(coef: int, lit: int) -> str:
    return f"+{coef} x{lit}" if lit > 0 else f"+{coef} ~x{-lit}"


def write_opb(formula: LeveledFormula) -> str:
    """Monolithic pseudo-Boolean rendering of the formula.

    Soft clause ``j`` (in ``flatten`` order) gets relaxation variable
    ``x{num_vars + j}``; the objective minimizes their weighted sum.
    """
    flat = flatten(formula)
    n = formula.num_vars
    objective = []
    constraints = []
    y = n
    for clause, weight in flat:
        terms = [_term(1, lit) for lit in clause]
        if weight is not HARD:
            y += 1
            terms.append(_term(1, y))
            objective.append(_term(weight, y))
        constraints.append(" ".join(terms) + " >= 1 ;")
    out = [f"* #variable= {y} #constraint= {len(constraints)}"]
    if objective:
        out.append("min: " + " ".join(objective) + " ;")
    out.extend(constraints)
    return "\n".join(out) + "\n"


@dataclass
class OpbDocument:
    num_vars: int
    objective: list[tuple[int, int]]
    constraints: list[tuple[list[tuple[int, int]], str, int]]


def read_opb(text: str) -> OpbDocument:
    """Parse the linear OPB subset produced by ``write_opb``."""

    def terms_of(tokens, lineno):
        if len(tokens) % 2:
            raise ParseError(lineno, "odd number of term tokens")
        terms = []
        for coef, var in zip(tokens[::2], tokens[1::2]):
            neg = var.startswith("~")
            name = var[1:] if neg else var
            if not name.startswith("x"):
                raise ParseError(lineno, f"bad variable {var!r}")
            try:
                v = int(name[1:])
                c = int(coef)
            except ValueError:
                raise ParseError(lineno, f"bad term {coef} {var}") from None
            terms.append((c, -v if neg else v))
        return terms

    objective: list[tuple[int, int]] = []
    constraints = []
    num_vars = 0
    for lineno, line in _lines(text):
        if not line or line.startswith("*"):
            continue
        if not line.endswith(";"):
            raise ParseError(lineno, "missing ';'")
        body = line[:-1].split()
        if body and body[0] == "min:":
            objective = terms_of(body[1:], lineno)
            terms = objective
        else:
            if len(body) < 2 or body[-2] not in (">=", "="):
                raise ParseError(lineno, "expected '>= k' or '= k'")
            terms = terms_of(body[:-2], lineno)
            constraints.append((terms, body[-2], int(body[-1])))
        for _, lit in terms:
            num_vars = max(num_vars, abs(lit))
    return OpbDocument(num_vars, objective, constraints)


# -- package universes ----------------------------------------------------------


def write_universe(universe: PackageUniverse) -> str:
    out = []
    for name, pkg in universe.packages.items():
        out.append(f"package: {name}")
        for alts in pkg.depends:
            out.append("depends: " + " | ".join(alts))
        if pkg.conflicts:
            out.append("conflicts: " + ", ".join(pkg.conflicts))
        if name in universe.installed:
            out.append("installed: true")
        out.append("")
    out.append("request:")
    out.extend(sorted(universe.request))
    return "\n".join(out) + "\n"


def read_universe(text: str) -> PackageUniverse:
    """Parse the stanza format written by ``write_universe``.

    ``#`` starts a comment line. Reference errors are reported with the line
    that mentions the missing package.
    """
    packages: dict[str, Package] = {}
    installed = set()
    request = []
    refs = []  # (lineno, owner, referenced name)
    current = None
    deps: list[tuple[str, ...]] = []
    conflicts: list[str] = []
    in_request = False

    def close():
        if current is not None:
            packages[current] = Package(tuple(deps), tuple(conflicts))

    for lineno, line in _lines(text):
        if not line or line.startswith("#"):
            continue
        if in_request:
            if ":" in line or len(line.split()) != 1:
                raise ParseError(lineno, f"expected one package name per request line, got {line!r}")
            request.append((lineno, line))
            continue
        key, sep, value = line.partition(":")
        if not sep:
            raise ParseError(lineno, f"malformed line {line!r}")
        key = key.strip()
        value = value.strip()
        if key == "package":
            close()
            if not value or len(value.split()) != 1:
                raise ParseError(lineno, "bad package name")
            if value in packages:
                raise ParseError(lineno, f"duplicate package {value!r}")
            current, deps, conflicts = value, [], []
        elif key == "request":
            if value:
                raise ParseError(lineno, "request: must be followed by one name per line")
            close()
            current = None
            in_request = True
        elif current is None:
            raise ParseError(lineno, f"{key!r} outside a package stanza")
        elif key == "depends":
            alts = tuple(a.strip() for a in value.split("|"))
            if not all(alts):
                raise ParseError(lineno, "empty dependency alternative")
            deps.append(alts)
            refs.extend((lineno, current, a) for a in alts)
        elif key == "conflicts":
            names = tuple(c.strip() for c in value.split(","))
            if not all(names):
                raise ParseError(lineno, "empty conflict name")
            for c in names:
                if c == current:
                    raise ParseError(lineno, f"{current!r} conflicts with itself")
            conflicts.extend(names)
            refs.extend((lineno, current, c) for c in names)
        elif key == "installed":
            if value not in ("true", "false"):
                raise ParseError(lineno, "installed: expects true or false")
            if value == "true":
                installed.add(current)
        else:
            raise ParseError(lineno, f"unknown key {key!r}")
    close()
    for lineno, owner, name in refs:
        if name not in packages:
            raise ParseError(lineno, f"{owner!r} references undeclared package {name!r}")
    for lineno, name in request:
        if name not in packages:
            raise ParseError(lineno, f"requested package {name!r} is not declared")
    return PackageUniverse(packages, frozenset(installed), frozenset(n for _, n in request))


# -- models -------------------------------------------------------------------


def write_model(model: Model) -> str:
    return " ".join(["v"] + [str(lit) for lit in model])


def read_model(text: str, num_vars: int | None = None) -> Model:
    """Parse ``v`` lines (possibly several) into a total model over 1..n."""
    lits = []
    seen_v = False
    for lineno, line in _lines(text):
        if not line.startswith("v"):
            continue
        seen_v = True
        for tok in line.split()[1:]:
            try:
                lit = int(tok)
            except ValueError:
                raise ParseError(lineno, f"bad literal {tok!r}") from None
            if lit == 0:
                continue
            if num_vars is not None and abs(lit) > num_vars:
                raise ParseError(lineno, f"literal {lit} out of range 1..{num_vars}")
            lits.append(lit)
    if not seen_v:
        raise ParseError(0, "no 'v' line")
    n = num_vars if num_vars is not None else max((abs(l) for l in lits), default=0)
    values: dict[int, int] = {}
    for lit in lits:
        if abs(lit) in values:
            raise ParseError(0, f"variable {abs(lit)} assigned twice")
        values[abs(lit)] = lit
    missing = [v for v in range(1, n + 1) if v not in values]
    if missing:
        raise ParseError(0, f"model misses variable {missing[0]}")
    return tuple(values[v] for v in range(1, n + 1))
