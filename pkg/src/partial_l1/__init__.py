"""Exact finite-dimensional failure probabilities of partial and hidden partial l1."""

__version__ = "0.1.0"

from .errors import (BracketError, DomainError, EmptyRun, NonConvergence, PartialL1Error,
                     RankDeficient, SolverAnomaly)
from .geometry import (AngleValue, ProblemDims, external_angle, face_count_log,
                       internal_angle_cone, internal_angle_face)
from .perf import ErrorProbReport, FaceTerm, p_err_complementary, p_err_hidden, p_err_partial
from .asymptotics import (AsymptoticPoint, LdpResult, ldp_rate_hidden, ldp_rate_partial,
                          pt_curve)
from .montecarlo import SimulationReport, run_simulation

__all__ = [
    "AngleValue", "AsymptoticPoint", "BracketError", "DomainError", "EmptyRun", "ErrorProbReport",
    "FaceTerm", "LdpResult", "NonConvergence", "PartialL1Error", "ProblemDims", "RankDeficient",
    "SimulationReport", "SolverAnomaly", "external_angle", "face_count_log", "internal_angle_cone",
    "internal_angle_face", "ldp_rate_hidden", "ldp_rate_partial", "p_err_complementary",
    "p_err_hidden", "p_err_partial", "pt_curve", "run_simulation",
]
