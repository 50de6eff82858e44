"""Exact solver for exponential equations over free products of abelian groups."""
from .abelian import AbelianElement, AbelianSignature, DiophantineSystem, Row, SolutionSet, solve_diophantine
from .bounds import BoundReport, ConstantsLedger, bound_refined, bound_simple, default_ledger
from .freeprod import FreeProductElement, GroupSpec, Syllable, multiply, normalize
from .geometry import (
    classify,
    commensurable,
    conjugacy_test,
    cyclic_reduce,
    find_short_conjugator,
    periodicity_witness,
    power_conjugacy_normalize,
    stable_norm,
)
from .problem import Problem, parse_problem
from .reduction import DisjunctionPhi, enumerate_region_plans, parabolic_rewrite, reduce
from .solver import (
    ExponentialEquation,
    SolutionCertificate,
    SolveOptions,
    Term,
    Verdict,
    extend_phi_solution,
    solve,
    solve_brute,
)

__version__ = "0.1.0"
