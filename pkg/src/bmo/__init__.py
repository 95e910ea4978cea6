"""Boolean multilevel optimization with a small pure-Python SAT/MaxSAT stack."""

from .algorithms import (
    BmoResult,
    Interrupted,
    SOLVERS,
    solve_brute,
    solve_ipb,
    solve_mono,
    solve_rsc,
    verify_model,
)
from .errors import (
    BmoError,
    ConfigError,
    EmptyClauseError,
    HardUnsatError,
    NotBMOError,
    ParseError,
    TautologyError,
    TooLargeError,
    UniverseError,
)
from .formats import read_model, read_opb, read_universe, read_wcnf, write_model, write_opb, write_universe, write_wcnf
from .formula import HARD, Level, LeveledFormula, LevelOptima, flatten, minimal_weights, stratify
from .generator import GenConfig, generate
from .maxsat import MaxSatInstance, MaxSatStatus, solve_maxsat
from .sat import Solver, Status
from .upgrade import Package, PackageUniverse, encode_installability, encode_upgradeability

__version__ = "0.1.0"

__all__ = [
    "BmoError", "BmoResult", "ConfigError", "EmptyClauseError", "GenConfig", "HARD",
    "HardUnsatError", "Interrupted", "Level", "LevelOptima", "LeveledFormula",
    "MaxSatInstance", "MaxSatStatus", "NotBMOError", "Package", "PackageUniverse",
    "ParseError", "SOLVERS", "Solver", "Status", "TautologyError", "TooLargeError",
    "UniverseError", "encode_installability", "encode_upgradeability", "flatten",
    "generate", "minimal_weights", "read_model", "read_opb", "read_universe", "read_wcnf", "solve_brute", "solve_ipb", "solve_maxsat",
    "solve_mono", "solve_rsc", "stratify", "verify_model", "write_model", "write_opb",
    "write_universe", "write_wcnf",
]
