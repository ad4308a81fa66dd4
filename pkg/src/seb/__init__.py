"""Smallest enclosing ball of a finite point set.

Solvers: the barycentric recurrence (:func:`iterate`), the direct
equidistant-point solve (:func:`solve_equidistant`), the drop-and-restart
heuristic (:func:`solve_heuristic`) and an exact Welzl oracle
(:func:`solve_welzl`). :func:`compute_spectrum` gives the convergence rate.
"""
from .bench import BenchCase, BenchResult, gen_uniform_hypercube, run_comparison
from .equidistant import EquidistantSystem, equidistant_system, solve_equidistant
from .errors import (
    DegenerateReductionError,
    DegenerateSupportError,
    DiagnosticsError,
    DimensionError,
    EmptyInputError,
    FormatError,
    InputError,
    ParseError,
    PreconditionError,
    RankConditionError,
    SEBError,
    UnboundedKappaError,
    ZeroNormError,
)
from .geometry import (
    Ball,
    BarycentricCoord,
    PointSet,
    barycentric_to_point,
    check_rank_condition,
    dump_points,
    enclosing_radius,
    evaluate_J,
    load_points,
    preprocess_nonzero,
)
from .heuristic import HeuristicConfig, HeuristicReport, solve_heuristic
from .recurrence import (
    IterationTrace,
    RecurrenceSystem,
    StopRule,
    build_system,
    fixed_point_residual,
    iterate,
    step,
)
from .report import SolveReport, analyze, solve
from .spectral import SpectralDiagnostics, compute_spectrum, estimate_kappa, reduced_matrix
from .welzl import SupportSet, circumball, solve_welzl

__version__ = "0.1.0"
