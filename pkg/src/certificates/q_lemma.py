"""
Closed forms for Q(ρ) = (1 − ρ)I + ρ11ᵀ.

Q(ρ) models the normalized Gram matrix of s source images that are all at
the same angle to each other. Its inverse is known explicitly, which gives
the bound on perturbations R that keep the solution of (Q + R)x = 1
non-negative.
"""

import numpy as np

import sys
from pathlib import Path

# Add src to path for imports
sys.path.insert(0, str(Path(__file__).parent.parent))
from models import WeightedSparsityError


class DomainError(WeightedSparsityError):
    """Raised for ρ outside (0, 1) or s < 2."""
    pass


def _check_domain(rho: float, s: int) -> None:
    if not 0.0 < rho < 1.0:
        raise DomainError(f"rho must lie in (0, 1), got {rho}")
    if int(s) != s or s < 2:
        raise DomainError(f"s must be an integer >= 2, got {s}")


def q_matrix(rho: float, s: int) -> np.ndarray:
    """The s x s matrix with unit diagonal and off-diagonal ρ."""
    _check_domain(rho, s)
    return (1.0 - rho) * np.eye(int(s)) + rho * np.ones((int(s), int(s)))


def q_closed_form_solution(rho: float, s: int) -> np.ndarray:
    """Solution y of Q(ρ)y = 1: every entry is 1/(1 + (s − 1)ρ)."""
    _check_domain(rho, s)
    return np.full(int(s), 1.0 / (1.0 + (s - 1) * rho))


def q_inverse_entries(rho: float, s: int):
    """
    Diagonal d and off-diagonal ζ of Q(ρ)⁻¹.

    Returns:
        (d, zeta) with d = (1 + (s − 2)ρ)/((1 − ρ)(1 + (s − 1)ρ)) and
        ζ = −ρ/((1 − ρ)(1 + (s − 1)ρ))
    """
    _check_domain(rho, s)
    denominator = (1.0 - rho) * (1.0 + (s - 1) * rho)
    return (1.0 + (s - 2) * rho) / denominator, -rho / denominator


def q_inverse_inf_norm(rho: float, s: int) -> float:
    """‖Q(ρ)⁻¹‖∞ = (ρ(2s − 3) + 1)/((1 − ρ)(ρ(s − 1) + 1))."""
    _check_domain(rho, s)
    return (rho * (2 * s - 3) + 1.0) / ((1.0 - rho) * (rho * (s - 1) + 1.0))


def r_perturbation_bound(rho: float, s: int) -> float:
    """
    Largest ‖R‖∞ for which (Q(ρ) + R)x = 1 keeps a non-negative solution.

    Equals (1 − ρ)(ρ(s − 1) + 1)/(2ρ(2s − 3) + 2) = 1/(2‖Q(ρ)⁻¹‖∞).
    """
    _check_domain(rho, s)
    return (1.0 - rho) * (rho * (s - 1) + 1.0) / (2.0 * rho * (2 * s - 3) + 2.0)


def perturbation_error_bound(rho: float, s: int, r_inf_norm: float) -> float:
    """
    Relative error bound ‖x − y‖∞/‖y‖∞ between the solutions of
    (Q + R)x = 1 and Qy = 1.

    With r = ‖Q⁻¹‖∞‖R‖∞ the bound is r/(1 − r); infinite once r >= 1.
    """
    r = q_inverse_inf_norm(rho, s) * r_inf_norm
    if r >= 1.0:
        return float('inf')
    return r / (1.0 - r)
