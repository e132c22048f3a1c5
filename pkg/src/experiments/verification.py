"""
Invariant suites behind `wsr verify`.

Each check returns a CheckResult; a check that raises is reported as failed
with the exception text as its detail.
"""

import logging
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Dict, List, Tuple

import numpy as np

import sys
from pathlib import Path

# Add src to path for imports
sys.path.insert(0, str(Path(__file__).parent.parent))
from models import SourceConfiguration
from fem_forward import (
    SingularOperator,
    apply_forward,
    assemble_forward,
    build_grid,
    locate_node,
    transfer_boundary_trace,
)
from weighting import (
    Identity,
    PreOrthogonalizer,
    RandomSparse,
    TruncatedPseudoInverse,
    build_weighted_operator,
    check_nonparallel,
    pre_orthogonalizer,
)
from solver import (
    SolverConfig,
    closed_form_single_source,
    kkt_residual,
    solve_basis_pursuit,
    solve_weighted_lasso,
)
from certificates import (
    argmax_source,
    dual_certificate,
    mutual_coherence,
    q_closed_form_solution,
    q_inverse_inf_norm,
    q_matrix,
    r_perturbation_bound,
)

logger = logging.getLogger(__name__)

SUITES = ('forward', 'lemmas', 'solver', 'certificates')

RHO_GRID = [round(0.05 * i, 2) for i in range(1, 20)]
S_GRID = list(range(2, 13))


@dataclass
class CheckResult:
    """Outcome of one named check."""
    name: str
    passed: bool
    detail: str = ''

    def to_dict(self) -> Dict[str, object]:
        return {'name': self.name, 'passed': self.passed, 'detail': self.detail}


def numerical_rank(A: np.ndarray, tolerance: float = 1e-10) -> int:
    """Number of singular values above tolerance·σ_1."""
    sigma = np.linalg.svd(A, compute_uv=False)
    return int(np.sum(sigma > tolerance * sigma[0]))


@lru_cache(maxsize=None)
def _model(N: int, epsilon: float = 1.0):
    return assemble_forward(N, epsilon)


# No symmetry of the square maps this set onto itself, so Y†A has no
# identical columns
PRE_ORTH_POINTS = ((0.1875, 0.3125), (0.5, 0.5625), (0.75, 0.625))


def standard_schemes(A: np.ndarray) -> Dict[str, object]:
    """The four B choices on a forward matrix, as used by the suites."""
    m = A.shape[0]
    grid = build_grid(m // 4)
    J = tuple(locate_node(grid, point) for point in PRE_ORTH_POINTS)
    return {
        'identity': Identity(),
        'trunc_pinv': TruncatedPseudoInverse(k=numerical_rank(A)),
        'random_sparse': RandomSparse(p=m, density=0.1, seed=0),
        'pre_orth': PreOrthogonalizer(indices=J),
    }


@lru_cache(maxsize=None)
def _operators(N: int = 16) -> Tuple[Tuple[str, object], ...]:
    A = _model(N).A
    return tuple((name, build_weighted_operator(A, scheme)) for name, scheme in standard_schemes(A).items())


def _sample_columns(n: int, count: int, seed: int = 0) -> List[int]:
    rng = np.random.Generator(np.random.Philox(seed))
    return sorted(int(j) for j in rng.choice(n, size=count, replace=False))


def manufactured_trace_error(N: int) -> float:
    """
    Max boundary error for u = cos(πx)cos(πy), which has zero normal
    derivative on the unit square, with ε = 1 and f = (2π² + 1)u.
    """
    model = _model(N)
    xs, ys = model.grid.node_coordinates[:, 0], model.grid.node_coordinates[:, 1]
    exact = np.cos(np.pi * xs) * np.cos(np.pi * ys)
    f = (2.0 * np.pi ** 2 + 1.0) * exact
    trace = model.boundary_trace(f)
    return float(np.max(np.abs(trace - exact[model.grid.boundary_index_map])))


# --- forward ---

def _check_symmetry() -> Tuple[bool, str]:
    model = _model(16)
    L, M = model.stiffness_plus_mass, model.mass
    asym = max(abs(L - L.T).max(), abs(M - M.T).max())
    return asym <= 1e-12, f"max asymmetry {asym:.2e}"


def _check_boundary_sqrt() -> Tuple[bool, str]:
    model = _model(16)
    S, Mb = model.boundary_mass_sqrt, model.boundary_mass
    error = np.linalg.norm(S @ S - Mb) / np.linalg.norm(Mb)
    return error <= 1e-12, f"relative error {error:.2e}"


def _check_constant_identity(N: int) -> Callable[[], Tuple[bool, str]]:
    def check():
        model = _model(N)
        target = model.boundary_mass_sqrt @ np.ones(model.m)
        error = np.linalg.norm(apply_forward(model, np.ones(model.n)) - target) / np.linalg.norm(target)
        return error <= 1e-10, f"relative error {error:.2e}"
    return check


def _check_convergence_order() -> Tuple[bool, str]:
    coarse, fine = manufactured_trace_error(16), manufactured_trace_error(32)
    order = np.log2(coarse / fine)
    return order >= 1.5, f"errors {coarse:.3e} -> {fine:.3e}, order {order:.2f}"


def _check_neumann_singular() -> Tuple[bool, str]:
    try:
        assemble_forward(2, 0.0)
    except SingularOperator as e:
        return True, str(e)
    return False, "pure Neumann operator was factorized"


def _check_rank_bound() -> Tuple[bool, str]:
    A = _model(16).A
    rank = numerical_rank(A, 1e-12)
    return rank <= A.shape[0] < A.shape[1], f"rank {rank}, shape {A.shape}"


def _check_transfer_constants() -> Tuple[bool, str]:
    fine, coarse = _model(32).grid, _model(16).grid
    out = transfer_boundary_trace(fine, coarse, np.ones(fine.boundary_node_count))
    return bool(np.all(out == 1.0)), f"{out.shape[0]} samples"


# --- lemmas ---

def _per_scheme(check: Callable) -> List[Tuple[str, Callable[[], Tuple[bool, str]]]]:
    return [(f"{check.__name__.lstrip('_')}[{name}]", (lambda op=op: check(op)))
            for name, op in _operators()]


def _unit_columns(op) -> Tuple[bool, str]:
    norms = np.linalg.norm(op.normalized_columns(), axis=0)
    deviation = float(np.max(np.abs(norms - 1.0)))
    return deviation <= 1e-12, f"max deviation {deviation:.2e}"


def _nonparallel(op) -> Tuple[bool, str]:
    pairs = check_nonparallel(op)
    return not pairs, f"{len(pairs)} parallel pairs"


def _argmax_lemma(op) -> Tuple[bool, str]:
    misses = [j for j in range(op.n) if argmax_source(op, j) != j]
    return not misses, f"{len(misses)} of {op.n} columns missed"


def _coherence(op) -> Tuple[bool, str]:
    value = mutual_coherence(op)
    return value < 1.0, f"mutual coherence {value:.12f}"


def _check_pre_orth_images() -> Tuple[bool, str]:
    A = _model(16).A
    J = standard_schemes(A)['pre_orth'].indices
    images = pre_orthogonalizer(A, J) @ A[:, list(J)]
    error = float(np.max(np.abs(images - np.eye(len(J)))))
    return error <= 1e-10, f"max error {error:.2e}"


SOURCES_SINKS_POINTS = ((0.25, 0.75), (0.75, 0.25), (0.25, 0.25), (0.75, 0.75))


def _check_pre_orth_sources_sinks() -> Tuple[bool, str]:
    model = _model(64)
    J = [locate_node(model.grid, point) for point in SOURCES_SINKS_POINTS]
    op = build_weighted_operator(model.A, PreOrthogonalizer(indices=tuple(J)))
    images = op.columns(J)
    error = float(np.max(np.abs(images - np.eye(len(J)))))
    gram = op.inner_products(J, J)
    cross = float(np.max(np.abs(gram - np.diag(np.diag(gram)))))
    return error <= 1e-10 and cross <= 1e-10, f"image error {error:.2e}, largest cross product {cross:.2e}"


# --- solver ---

def _closed_form(op) -> Tuple[bool, str]:
    cfg = SolverConfig(alpha=1e-4)
    worst = 0.0
    for j in _sample_columns(op.n, 20):
        b = op.column(j)
        result = solve_weighted_lasso(op, b, cfg)
        error = float(np.max(np.abs(result.x - closed_form_single_source(op, j, cfg.alpha))))
        worst = max(worst, error)
        if result.support != [j] or kkt_residual(op, b, cfg.alpha, result.x) > 1e-8:
            return False, f"column {j}: support {result.support[:5]}, error {error:.2e}"
    return worst <= 1e-6, f"max error {worst:.2e}"


def _basis_pursuit(op) -> Tuple[bool, str]:
    cfg = SolverConfig()
    worst = 0.0
    for j in _sample_columns(op.n, 10, seed=1):
        result = solve_basis_pursuit(op, op.column(j), cfg)
        target = np.zeros(op.n)
        target[j] = 1.0
        worst = max(worst, float(np.max(np.abs(result.x - target))))
    return worst <= 1e-4, f"max error {worst:.2e}"


# --- certificates ---

def _check_q_solution() -> Tuple[bool, str]:
    worst = max(
        float(np.max(np.abs(q_matrix(rho, s) @ q_closed_form_solution(rho, s) - 1.0)))
        for rho in RHO_GRID for s in S_GRID
    )
    return worst <= 1e-12, f"max residual {worst:.2e}"


def _check_q_inverse_norm() -> Tuple[bool, str]:
    worst = 0.0
    for rho in RHO_GRID:
        for s in S_GRID:
            dense = np.linalg.norm(np.linalg.inv(q_matrix(rho, s)), np.inf)
            worst = max(worst, abs(q_inverse_inf_norm(rho, s) - dense) / dense)
    return worst <= 1e-10, f"max relative difference {worst:.2e}"


def perturbation_trials(trials: int = 1000, seed: int = 0) -> float:
    """
    Smallest component of the solution of (Q(ρ) + R)x = 1 over random
    zero-diagonal R scaled to ‖R‖∞ = r_perturbation_bound(ρ, s).
    """
    rng = np.random.Generator(np.random.Philox(seed))
    smallest = np.inf
    for _ in range(trials):
        rho = float(rng.uniform(0.05, 0.95))
        s = int(rng.integers(2, 13))
        R = rng.uniform(-1.0, 1.0, size=(s, s))
        np.fill_diagonal(R, 0.0)
        R *= r_perturbation_bound(rho, s) / np.abs(R).sum(axis=1).max()
        x = np.linalg.solve(q_matrix(rho, s) + R, np.ones(s))
        smallest = min(smallest, float(x.min()))
    return smallest


def _check_perturbation() -> Tuple[bool, str]:
    smallest = perturbation_trials()
    return smallest >= -1e-12, f"smallest component {smallest:.3e}"


def _check_bound_identity() -> Tuple[bool, str]:
    worst = max(abs(2.0 * r_perturbation_bound(rho, s) * q_inverse_inf_norm(rho, s) - 1.0)
                for rho in RHO_GRID for s in S_GRID)
    return worst <= 1e-12, f"max deviation {worst:.2e}"


def _check_q_fixture_certificate() -> Tuple[bool, str]:
    # Three unit columns with pairwise cosine 0.5 and one orthogonal column
    C = np.zeros((4, 4))
    C[:3, :3] = np.linalg.cholesky(q_matrix(0.5, 3)).T
    C[3, 3] = 1.0
    op = build_weighted_operator(C, Identity())
    report = dual_certificate(op, SourceConfiguration.from_pairs([(0, 1.0), (1, 1.0), (2, 1.0)], n=4))
    error = float(np.max(np.abs(report.z - 0.5)))
    return error <= 1e-10 and report.valid, f"z error {error:.2e}, cond2 margin {report.cond2_margin:.3f}"


def _suite_checks(suite: str) -> List[Tuple[str, Callable[[], Tuple[bool, str]]]]:
    if suite == 'forward':
        return [
            ('symmetry', _check_symmetry),
            ('boundary_mass_sqrt', _check_boundary_sqrt),
            *[(f'constant_source_identity[N={N}]', _check_constant_identity(N)) for N in (16, 32, 64)],
            ('trace_convergence_order', _check_convergence_order),
            ('neumann_singular', _check_neumann_singular),
            ('rank_bound', _check_rank_bound),
            ('transfer_constants', _check_transfer_constants),
        ]
    if suite == 'lemmas':
        return [
            *_per_scheme(_unit_columns),
            *_per_scheme(_nonparallel),
            *_per_scheme(_argmax_lemma),
            *_per_scheme(_coherence),
            ('pre_orth_images', _check_pre_orth_images),
            ('pre_orth_sources_sinks', _check_pre_orth_sources_sinks),
        ]
    if suite == 'solver':
        return [*_per_scheme(_closed_form), *_per_scheme(_basis_pursuit)]
    if suite == 'certificates':
        return [
            ('q_closed_form_solution', _check_q_solution),
            ('q_inverse_inf_norm', _check_q_inverse_norm),
            ('r_bound_identity', _check_bound_identity),
            ('perturbation_monte_carlo', _check_perturbation),
            ('q_fixture_certificate', _check_q_fixture_certificate),
        ]
    raise ValueError(f"Unknown suite '{suite}', expected one of {SUITES + ('all',)}")


def run_suite(suite: str) -> List[CheckResult]:
    """
    Run one suite ('forward', 'lemmas', 'solver', 'certificates' or 'all').

    Returns:
        One CheckResult per check
    """
    if suite == 'all':
        return [result for name in SUITES for result in run_suite(name)]

    results = []
    for name, check in _suite_checks(suite):
        try:
            passed, detail = check()
        except Exception as e:
            passed, detail = False, f"{type(e).__name__}: {e}"
        results.append(CheckResult(name=f"{suite}.{name}", passed=bool(passed), detail=detail))
        logger.info("%s %s.%s: %s", 'PASS' if passed else 'FAIL', suite, name, detail)
    return results
