"""``bmo`` command line: encode, solve, verify, gen, bench.

Exit codes: 0 optimum (or success), 1 hard clauses unsatisfiable (or a
model that fails verification), 2 input error, 3 timeout.
"""

from __future__ import annotations

import argparse
import csv
import glob
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

from .algorithms import SOLVERS, Interrupted, verify_model
from .errors import BmoError, HardUnsatError, NotBMOError, TooLargeError
from .formats import read_model, read_universe, read_wcnf, write_model, write_opb, write_universe, write_wcnf
from .formula import HARD, LeveledFormula
from .generator import GenConfig, generate
from .maxsat import MaxSatInstance, MaxSatStatus, solve_maxsat
from .upgrade import encode_upgradeability

EXIT_OK, EXIT_UNSAT, EXIT_INPUT, EXIT_TIMEOUT = 0, 1, 2, 3


@dataclass
class RunReport:
    instance: str
    algorithm: str
    status: str
    optima: tuple[int, ...] | None = None
    objective: int | None = None
    wall: float = 0.0
    sat_calls: int | None = None
    conflicts: int | None = None
    cost: int | None = None
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.status == "OPTIMUM" and self.optima is None and self.cost is None:
            raise ValueError("an OPTIMUM report needs optima or a cost")

    def comment_lines(self) -> list[str]:
        lines = []
        for key, value in asdict(self).items():
            if key == "extra":
                continue
            if isinstance(value, float):
                value = f"{value:.3f}"
            elif isinstance(value, (tuple, list)):
                value = " ".join(map(str, value))
            lines.append(f"c {key}: {value}")
        for key, value in self.extra.items():
            lines.append(f"c {key}: {value}")
        return lines


def _color(text: str, code: str, stream) -> str:
    if os.environ.get("NO_COLOR") or not getattr(stream, "isatty", lambda: False)():
        return text
    return f"\033[{code}m{text}\033[0m"


def _err(msg: str) -> None:
    print(_color(f"error: {msg}", "31", sys.stderr), file=sys.stderr)


def _read_text(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    return Path(path).read_text(encoding="utf-8")


def _write_text(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8", newline="\n")


def _load_formula(path: str) -> LeveledFormula:
    """WCNF file, or a package universe encoded with minimal weights."""
    text = _read_text(path)
    if path.endswith(".pkg"):
        return encode_upgradeability(read_universe(text))
    return read_wcnf(text).formula()


def _parse_weights(spec: str):
    if spec == "minimal":
        return None
    try:
        weights = [int(w) for w in spec.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad weight list {spec!r}") from None
    if any(w < 1 for w in weights):
        raise argparse.ArgumentTypeError("weights must be positive")
    return weights


# -- encode ---------------------------------------------------------------------


def cmd_encode(args) -> int:
    universe = read_universe(_read_text(args.universe))
    formula = encode_upgradeability(universe, args.weights)
    if args.format == "opb":
        _write_text(args.output, write_opb(formula))
    else:
        _write_text(args.output, write_wcnf(formula, [f"weights {' '.join(map(str, formula.weights))}"]))
    return EXIT_OK


# -- solve ----------------------------------------------------------------------


def _solve_raw_mono(doc, name, args, out) -> tuple[int, RunReport]:
    # mono on a weighted WCNF that does not stratify into levels
    inst = MaxSatInstance(
        doc.num_vars,
        [c for c, w in doc.clauses if w is HARD],
        [(c, w) for c, w in doc.clauses if w is not HARD],
    )
    start = time.monotonic()
    deadline = None if args.timeout is None else start + args.timeout
    res = solve_maxsat(inst, deadline=deadline, on_improve=lambda c: print(f"o {c}", file=out, flush=True))
    wall = time.monotonic() - start
    calls, conflicts = res.sat_calls, res.stats.conflicts if res.stats else None
    if res.status is MaxSatStatus.HARD_UNSAT:
        return EXIT_UNSAT, RunReport(name, "mono", "UNSATISFIABLE", wall=wall, sat_calls=calls, conflicts=conflicts)
    if res.status is MaxSatStatus.INTERRUPTED:
        return EXIT_TIMEOUT, RunReport(name, "mono", "UNKNOWN", wall=wall, sat_calls=calls, conflicts=conflicts)
    report = RunReport(name, "mono", "OPTIMUM", wall=wall, sat_calls=calls, conflicts=conflicts, cost=res.cost)
    report.extra["model"] = res.model
    return EXIT_OK, report


def run_one(formula: LeveledFormula, name: str, algo: str, timeout=None, out=None) -> tuple[int, RunReport, object]:
    """Solve ``formula`` with ``algo``; returns (exit code, report, model or None)."""
    solver = SOLVERS[algo]
    kwargs = {}
    if algo != "brute":
        kwargs["timeout"] = timeout
    if out is not None:
        if algo == "mono":
            kwargs["on_improve"] = lambda c: print(f"o {c}", file=out, flush=True)
        elif algo in ("rsc", "ipb"):
            kwargs["on_level"] = lambda i, u: print(f"c level {i}: {u} falsified", file=out, flush=True)
    start = time.monotonic()
    try:
        res = solver(formula, **kwargs)
    except HardUnsatError:
        return EXIT_UNSAT, RunReport(name, algo, "UNSATISFIABLE", wall=time.monotonic() - start), None
    except Interrupted as exc:
        report = RunReport(name, algo, "UNKNOWN", wall=time.monotonic() - start)
        if exc.completed:
            report.extra["completed_levels"] = " ".join(f"{i}:{u}" for i, u in exc.completed)
        return EXIT_TIMEOUT, report, None
    stats = res.stats
    report = RunReport(
        name,
        algo,
        "OPTIMUM",
        optima=res.falsified,
        objective=res.objective,
        wall=time.monotonic() - start,
        sat_calls=stats.get("sat_calls"),
        conflicts=stats.get("conflicts"),
        cost=formula.falsified_weight(res.falsified),
    )
    return EXIT_OK, report, res.model


def cmd_solve(args) -> int:
    out = sys.stdout
    name = Path(args.instance).name
    doc = read_wcnf(_read_text(args.instance))
    try:
        formula = doc.formula()
    except NotBMOError:
        if args.algo != "mono":
            raise
        code, report = _solve_raw_mono(doc, name, args, out)
        model = report.extra.pop("model", None)
        return _finish(code, report, model, args.stats, out)
    code, report, model = run_one(formula, name, args.algo, args.timeout, out)
    if code == EXIT_OK and args.algo != "mono":
        # mono printed its bounds as they improved; the others print one final cost
        print(f"o {report.cost}", file=out)
    return _finish(code, report, model, args.stats, out)


def _finish(code, report, model, stats, out) -> int:
    if stats:
        for line in report.comment_lines():
            print(line, file=out)
    status = {EXIT_OK: "OPTIMUM FOUND", EXIT_UNSAT: "UNSATISFIABLE", EXIT_TIMEOUT: "UNKNOWN"}[code]
    print(_color(f"s {status}", "32" if code == EXIT_OK else "33", out), file=out)
    if model is not None:
        print(write_model(model), file=out)
    return code


# -- verify -----------------------------------------------------------------------


def cmd_verify(args) -> int:
    formula = _load_formula(args.instance)
    model = read_model(_read_text(args.model), formula.num_vars)
    check = verify_model(formula, model)
    print(f"c hard clauses satisfied: {'yes' if check.hard_ok else 'no'}")
    for i, u in enumerate(check.falsified, start=1):
        print(f"c level {i}: {u} of {formula.sizes[i - 1]} falsified")
    print(f"c falsified weight: {formula.falsified_weight(check.falsified)}")
    print(f"c objective: {formula.objective(check.falsified)}")
    return EXIT_OK if check.hard_ok else EXIT_UNSAT


# -- gen --------------------------------------------------------------------------


def cmd_gen(args) -> int:
    cfg = GenConfig(
        num_packages=args.packages,
        base_installed=args.base_installed,
        extra_installed=args.extra_installed,
        request_size=args.request,
        deps_per_package=args.deps,
        disjunction_width=args.width,
        conflict_density=args.conflict_density,
        seed=args.seed,
    )
    universe = generate(cfg)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    path = out_dir / f"{cfg.name}.pkg"
    header = (
        f"# generated: packages={cfg.num_packages} base={cfg.base_installed} "
        f"extra={cfg.extra_installed} request={cfg.request_size} seed={cfg.seed}\n"
    )
    path.write_text(header + write_universe(universe), encoding="utf-8", newline="\n")
    print(path)
    return EXIT_OK


# -- bench ------------------------------------------------------------------------


def _bench_task(path: str, algo: str, timeout: float) -> RunReport:
    name = Path(path).name
    try:
        formula = _load_formula(path)
        _, report, _ = run_one(formula, name, algo, timeout)
    except (BmoError, OSError, ValueError) as exc:
        report = RunReport(name, algo, "ERROR", extra={"error": str(exc)})
    return report


def _cell(report: RunReport, timeout: float) -> str:
    if report.status == "UNKNOWN":
        return f">{timeout:g}"
    if report.status == "ERROR":
        return "err"
    if report.status == "UNSATISFIABLE":
        return "unsat"
    return f"{report.wall:.2f}"


def cmd_bench(args) -> int:
    paths = sorted({p for pattern in args.instances for p in glob.glob(pattern)})
    algos = args.algos.split(",")
    for algo in algos:
        if algo not in SOLVERS:
            raise BmoError(f"unknown algorithm {algo!r}")
    if not paths:
        print(_color("warning: no instances matched", "33", sys.stderr), file=sys.stderr)
    tasks = [(p, a) for p in paths for a in algos]
    if args.jobs > 1 and tasks:
        with ProcessPoolExecutor(args.jobs) as pool:
            futures = [pool.submit(_bench_task, p, a, args.timeout) for p, a in tasks]
            reports = [f.result() for f in futures]
    else:
        reports = [_bench_task(p, a, args.timeout) for p, a in tasks]

    by_key = {(p, a): r for (p, a), r in zip(tasks, reports)}
    names = [Path(p).name for p in paths]
    width = max([len("instance")] + [len(n) for n in names])
    print("instance".ljust(width) + "".join(f"{a:>10}" for a in algos))
    for p, n in zip(paths, names):
        print(n.ljust(width) + "".join(f"{_cell(by_key[p, a], args.timeout):>10}" for a in algos))

    with open(args.csv, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["instance", "algorithm", "status", "optima", "objective", "wall", "sat_calls", "conflicts", "cell"])
        for r in reports:
            optima = "" if r.optima is None else " ".join(map(str, r.optima))
            writer.writerow(
                [r.instance, r.algorithm, r.status, optima, r.objective, f"{r.wall:.3f}", r.sat_calls, r.conflicts, _cell(r, args.timeout)]
            )
    return EXIT_OK


# -- entry point ------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="bmo", description="Boolean multilevel optimization toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("encode", help="encode a package universe as WCNF or OPB")
    p.add_argument("universe")
    p.add_argument("--format", choices=("wcnf", "opb"), default="wcnf")
    p.add_argument("--weights", type=_parse_weights, default=None, help="'minimal' or w1,w2,... weakest tier first")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_encode)

    p = sub.add_parser("solve", help="solve a WCNF instance")
    p.add_argument("instance")
    p.add_argument("--algo", choices=sorted(SOLVERS), default="rsc")
    p.add_argument("--timeout", type=float)
    p.add_argument("--stats", action="store_true")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("verify", help="check a model against a WCNF or universe file")
    p.add_argument("instance")
    p.add_argument("model")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("gen", help="generate a synthetic package universe")
    p.add_argument("--packages", type=int, default=200)
    p.add_argument("--base-installed", type=int, default=50)
    p.add_argument("--extra-installed", type=int, default=0)
    p.add_argument("--request", type=int, default=20)
    p.add_argument("--deps", type=float, default=1.5)
    p.add_argument("--width", type=int, default=2)
    p.add_argument("--conflict-density", type=float, default=0.002)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--out-dir", default=".")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("bench", help="time algorithms over a set of instances")
    p.add_argument("instances", nargs="*", help="glob patterns (.wcnf or .pkg)")
    p.add_argument("--algos", default="mono,rsc,ipb")
    p.add_argument("--timeout", type=float, default=60.0)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--csv", default="bench.csv")
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    try:
        return args.func(args)
    except NotBMOError as exc:
        _err(f"not a multilevel formula: {exc}")
    except (TooLargeError, BmoError, OSError, ValueError) as exc:
        _err(str(exc))
    return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
