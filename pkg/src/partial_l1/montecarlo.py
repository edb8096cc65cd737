"""Monte Carlo verification: random instances, LP recovery and null-space witnesses.

Every trial draws from its own Philox stream keyed by (seed, trial), so a
run gives the same counts whatever the number or scheduling of workers.
"""

from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
import logging
import math
import time

import numpy as np
from scipy import linalg, optimize, stats

from .errors import EmptyRun, RankDeficient, SolverAnomaly
from .geometry import ProblemDims
from .perf import HIDDEN, PARTIAL, VARIANTS

log = logging.getLogger(__name__)

DEFAULT_CLASSIFY_TOL = 1e-6
WITNESS_TOL = 1e-9
_LP_METHOD = "highs-ds"


@dataclass(frozen=True)
class Instance:
    A: np.ndarray
    x_true: np.ndarray
    y: np.ndarray
    known_set: np.ndarray
    dims: ProblemDims
    variant: str = PARTIAL


@dataclass(frozen=True)
class TrialOutcome:
    trial_index: int
    recovered: bool
    witness_failure: bool
    objective_gap: float
    sup_norm_gap: float
    ambiguous: bool
    discarded: bool = False


@dataclass(frozen=True)
class SimulationReport:
    dims: ProblemDims
    variant: str
    trials: int
    failures: int
    successes: int
    ambiguous: int
    discarded: int
    p_hat: float
    ci_low: float
    ci_high: float
    seed: int
    tol: float
    witness_checked: bool = False
    witness_disagreements: int = 0
    wall_time: float = 0.0

    def to_dict(self, include_timing=False):
        out = asdict(self)
        if not include_timing:
            out.pop("wall_time")
        return out


def known_set(dims, variant=PARTIAL):
    """Indices excluded from the l1 objective (0-based)."""
    head = np.arange(dims.k_eta)
    if variant == PARTIAL:
        return head
    if variant == HIDDEN:
        dims.hidden_equivalent()  # validates 2k - k_eta <= n
        return np.concatenate([head, np.arange(dims.n - (dims.k - dims.k_eta), dims.n)])
    raise ValueError(f"unknown variant {variant!r}")


def trial_rng(seed, trial):
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=(trial,))))


def generate_instance(dims, variant=PARTIAL, seed=0, trial=0):
    """Gaussian A, x_true with positive entries on {0..k-1}, y = A x_true."""
    rng = trial_rng(seed, trial)
    A = rng.standard_normal((dims.m, dims.n))
    x = np.zeros(dims.n)
    x[:dims.k] = np.abs(rng.standard_normal(dims.k))
    return Instance(A, x, A @ x, known_set(dims, variant), dims, variant)


def with_magnitudes(instance, magnitudes):
    """Same matrix and support, new positive magnitudes on the support."""
    magnitudes = np.asarray(magnitudes, dtype=float)
    if magnitudes.shape != (instance.dims.k,) or np.any(magnitudes <= 0):
        raise ValueError("need k positive magnitudes")
    x = np.zeros(instance.dims.n)
    x[:instance.dims.k] = magnitudes
    return Instance(instance.A, x, instance.A @ x, instance.known_set, instance.dims, instance.variant)


def l1_objective(x, instance):
    mask = np.ones(instance.dims.n, dtype=bool)
    mask[instance.known_set] = False
    return float(np.abs(x[mask]).sum())


def solve_partial_l1(instance):
    """Minimize sum_{i not in known_set} |x_i| subject to A x = y.

    LP with x_i = u_i - v_i (u, v >= 0) off the known set and free x_i on it.
    """
    A, n = instance.A, instance.dims.n
    known = instance.known_set
    free = np.setdiff1d(np.arange(n), known)
    nk, nf = len(known), len(free)
    c = np.concatenate([np.zeros(nk), np.ones(2 * nf)])
    A_eq = np.hstack([A[:, known], A[:, free], -A[:, free]])
    bounds = [(None, None)] * nk + [(0, None)] * (2 * nf)
    res = optimize.linprog(c, A_eq=A_eq, b_eq=instance.y, bounds=bounds, method=_LP_METHOD)
    if res.status == 2:
        raise SolverAnomaly("recovery LP reported infeasible although x_true is feasible")
    if res.status == 3:
        raise SolverAnomaly("recovery LP reported unbounded")
    if res.status != 0:
        raise SolverAnomaly(f"recovery LP failed: {res.message}")
    x = np.zeros(n)
    x[known] = res.x[:nk]
    x[free] = res.x[nk:nk + nf] - res.x[nk + nf:]
    return x


def classify_trial(x_hat, instance, tol=DEFAULT_CLASSIFY_TOL, trial_index=0, witness_failure=None):
    """Recovered if the sup-norm error is within tol (relative to max(1, |x|_inf)).

    Errors in (tol, 10 tol] are flagged ambiguous rather than binned.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    scale = max(1.0, float(np.max(np.abs(instance.x_true))))
    gap = float(np.max(np.abs(x_hat - instance.x_true))) / scale
    recovered = gap <= tol
    ambiguous = tol < gap <= 10 * tol
    obj_gap = l1_objective(x_hat, instance) - l1_objective(instance.x_true, instance)
    return TrialOutcome(trial_index, recovered, witness_failure, obj_gap, gap, ambiguous)


def _cone_index_sets(instance):
    dims = instance.dims
    minus = np.arange(dims.k_eta, dims.k)
    stop = dims.n if instance.variant == PARTIAL else dims.n - (dims.k - dims.k_eta)
    return minus, np.arange(dims.k, stop)


def nullspace_failure_witness(instance, dims=None):
    """Decide whether null(A) meets the failure cone away from the origin.

    Solves  min sum t_T + sum_{S} w_S  s.t.  -t <= w_T <= t,  w = N z,
    -sum_S w_S = 1, with S = {k_eta..k-1} and T the penalized zero
    coordinates.  Failure iff the optimum is <= 0.  Returns (failed, w or None).
    """
    dims = dims or instance.dims
    N = linalg.null_space(instance.A)
    if N.shape[1] != dims.n - dims.m:
        raise RankDeficient(f"null space has dimension {N.shape[1]}, expected {dims.n - dims.m}")
    S, T = _cone_index_sets(instance)
    d, nt = N.shape[1], len(T)
    NS, NT = N[S], N[T]
    s_row = NS.sum(axis=0)
    c = np.concatenate([s_row, np.ones(nt)])
    eye = np.eye(nt)
    A_ub = np.vstack([np.hstack([NT, -eye]), np.hstack([-NT, -eye])])
    b_ub = np.zeros(2 * nt)
    A_eq = np.concatenate([-s_row, np.zeros(nt)])[None, :]
    bounds = [(None, None)] * d + [(0, None)] * nt
    res = optimize.linprog(c, A_ub=A_ub, b_ub=b_ub, A_eq=A_eq, b_eq=[1.0], bounds=bounds,
                           method=_LP_METHOD)
    if res.status == 2:
        # -sum_S w_S vanishes on all of null(A): only the zero-sum boundary remains
        return False, None
    if res.status != 0:
        raise SolverAnomaly(f"witness LP failed: {res.message}")
    if res.fun <= WITNESS_TOL:
        return True, N @ res.x[:d]
    return False, None


def run_trial(dims, variant, seed, trial, tol=DEFAULT_CLASSIFY_TOL, check_witness=False):
    inst = generate_instance(dims, variant, seed, trial)
    try:
        x_hat = solve_partial_l1(inst)
        witness = nullspace_failure_witness(inst)[0] if check_witness else None
    except (SolverAnomaly, RankDeficient) as exc:
        log.warning("trial %d discarded: %s", trial, exc)
        return TrialOutcome(trial, False, None, math.nan, math.nan, False, discarded=True)
    return classify_trial(x_hat, inst, tol, trial, witness)


def _run_chunk(args):
    dims, variant, seed, start, stop, tol, check_witness = args
    return [run_trial(dims, variant, seed, t, tol, check_witness) for t in range(start, stop)]


def _chunks(trials, workers):
    size = max(1, math.ceil(trials / (4 * workers)))
    return [(s, min(s + size, trials)) for s in range(0, trials, size)]


def wilson_interval(failures, decided, confidence=0.95):
    if decided == 0:
        return math.nan, 0.0, 1.0
    ci = stats.binomtest(failures, decided).proportion_ci(confidence, method="wilson")
    return failures / decided, float(ci.low), float(ci.high)


def aggregate(outcomes, dims, variant, seed, tol, check_witness, wall_time=0.0):
    outcomes = sorted(outcomes, key=lambda o: o.trial_index)
    discarded = sum(o.discarded for o in outcomes)
    ambiguous = sum(o.ambiguous for o in outcomes if not o.discarded)
    decided = [o for o in outcomes if not o.discarded and not o.ambiguous]
    successes = sum(o.recovered for o in decided)
    failures = len(decided) - successes
    disagreements = sum(o.witness_failure == o.recovered for o in decided) if check_witness else 0
    p_hat, lo, hi = wilson_interval(failures, len(decided))
    return SimulationReport(dims, variant, len(outcomes), failures, successes, ambiguous, discarded,
                            p_hat, lo, hi, seed, tol, check_witness, disagreements, wall_time)


def run_simulation(dims, variant=PARTIAL, trials=1000, seed=0, workers=1,
                   tol=DEFAULT_CLASSIFY_TOL, check_witness=False):
    """Run `trials` independent recovery experiments and aggregate them."""
    if variant not in VARIANTS:
        raise ValueError(f"unknown variant {variant!r}")
    if trials < 1:
        raise EmptyRun("trials must be at least 1")
    known_set(dims, variant)
    start = time.perf_counter()
    jobs = [(dims, variant, seed, a, b, tol, check_witness) for a, b in _chunks(trials, workers)]
    if workers <= 1:
        parts = map(_run_chunk, jobs)
        outcomes = [o for part in parts for o in part]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            outcomes = [o for part in pool.map(_run_chunk, jobs) for o in part]
    return aggregate(outcomes, dims, variant, seed, tol, check_witness, time.perf_counter() - start)
