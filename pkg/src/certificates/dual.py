"""
Dual certificates for support recovery.

A vector c with ⟨Ce_j/‖Ce_j‖, c⟩ = sgn(x*_j) on J and
|⟨Ce_i/‖Ce_i‖, c⟩| < 1 off J certifies that basis pursuit recovers a
vector supported inside J.
"""

from dataclasses import dataclass
from typing import Any, Dict, List

import numpy as np

import sys
from pathlib import Path

# Add src to path for imports
sys.path.insert(0, str(Path(__file__).parent.parent))
from models import SourceConfiguration, WeightedSparsityError
from weighting import WeightedOperator
from .backprojection import AssumptionViolated
from .gram import normalized_gram

RCOND_TOLERANCE = 1e-12
ORTHOGONALITY_TOLERANCE = 1e-10
COND1_TOLERANCE = 1e-10
COND2_MARGIN = 1e-10


class SingularGram(WeightedSparsityError):
    """Raised when the normalized Gram matrix on J is singular."""
    pass


class NotOrthogonal(WeightedSparsityError):
    """Raised when the images of the support are not pairwise orthogonal."""
    pass


@dataclass
class CertificateReport:
    """
    A candidate dual vector and how well it satisfies both conditions.

    Attributes:
        J: Support of x*
        signs: sgn(x*_j) for j in J
        c: Dual vector of length p
        z: Coefficients of c in the normalized images of J
        cond1_residual: max over J of |⟨Ce_j/‖Ce_j‖, c⟩ − sgn(x*_j)|
        cond2_margin: 1 − max over Jᶜ of |⟨Ce_i/‖Ce_i‖, c⟩|
        valid: cond1_residual <= 1e-10 and cond2_margin > 1e-10
        z_nonnegative: All z_j >= 0
        construction: 'gram_system' or 'disjoint'
    """
    J: List[int]
    signs: List[float]
    c: np.ndarray
    z: np.ndarray
    cond1_residual: float
    cond2_margin: float
    valid: bool
    z_nonnegative: bool
    construction: str

    def to_dict(self) -> Dict[str, Any]:
        """Convert to dictionary for JSON serialization."""
        return {
            'J': self.J,
            'signs': self.signs,
            'z': self.z.tolist(),
            'cond1_residual': self.cond1_residual,
            'cond2_margin': self.cond2_margin,
            'valid': self.valid,
            'z_nonnegative': self.z_nonnegative,
            'construction': self.construction,
        }


def _evaluate(op: WeightedOperator, J: List[int], signs: np.ndarray, coefficients: np.ndarray,
              z: np.ndarray, construction: str) -> CertificateReport:
    """Form c = Σ coefficient_j Ce_j/‖Ce_j‖ and evaluate both conditions by full scan."""
    c = op.columns(J) @ (coefficients / op.column_norms[J])
    correlations = op.rmatvec(c) / op.column_norms

    cond1_residual = float(np.max(np.abs(correlations[J] - signs)))
    outside = np.ones(op.n, dtype=bool)
    outside[J] = False
    if outside.any():
        cond2_margin = float(1.0 - np.max(np.abs(correlations[outside])))
    else:
        cond2_margin = 1.0

    return CertificateReport(
        J=J,
        signs=[float(s) for s in signs],
        c=c,
        z=z,
        cond1_residual=cond1_residual,
        cond2_margin=cond2_margin,
        valid=bool(cond1_residual <= COND1_TOLERANCE and cond2_margin > COND2_MARGIN),
        z_nonnegative=bool(np.all(z >= 0)),
        construction=construction,
    )


def dual_certificate(op: WeightedOperator, x_star: SourceConfiguration) -> CertificateReport:
    """
    Certificate for a same-sign source from the system G z = 1.

    c = sgn·Σ_J z_j Ce_j/‖Ce_j‖ satisfies the first condition exactly when
    G z = 1 is solved exactly; the second is checked over all of Jᶜ.

    Raises:
        AssumptionViolated: If the amplitudes of x* do not share one sign
        SingularGram: If G has reciprocal condition number <= 1e-12
    """
    if x_star.s == 0:
        raise ValueError("x* must have at least one source")
    if not x_star.has_uniform_sign():
        raise AssumptionViolated("Amplitudes of x* must share one sign; use dual_certificate_disjoint")

    J = x_star.support
    G = normalized_gram(op, J)
    rcond = 1.0 / np.linalg.cond(G, 1)
    if not np.isfinite(rcond) or rcond <= RCOND_TOLERANCE:
        raise SingularGram(f"Normalized Gram matrix on {J} is singular (rcond {rcond:.3e})")

    z = np.linalg.solve(G, np.ones(len(J)))
    sign = float(x_star.signs[0])
    return _evaluate(op, J, x_star.signs, sign * z, z, 'gram_system')


def dual_certificate_disjoint(op: WeightedOperator, x_star: SourceConfiguration) -> CertificateReport:
    """
    Certificate c = Σ_J sgn(x*_j) Ce_j/‖Ce_j‖ for pairwise orthogonal images.

    Raises:
        NotOrthogonal: If some pair of normalized images of J has
            |cos angle| > 1e-10
    """
    if x_star.s == 0:
        raise ValueError("x* must have at least one source")

    J = x_star.support
    G = normalized_gram(op, J)
    off_diagonal = np.abs(G - np.diag(np.diag(G)))
    if off_diagonal.size and off_diagonal.max() > ORTHOGONALITY_TOLERANCE:
        raise NotOrthogonal(
            f"Images of {J} are not orthogonal (largest |cos| {off_diagonal.max():.3e})"
        )
    return _evaluate(op, J, x_star.signs, x_star.signs, x_star.signs.copy(), 'disjoint')
