"""
Scenario configuration.

A scenario file is a JSON document validated by the pydantic models below.
Unknown keys are rejected so that a typo can never silently fall back to a
default.

Example:
    {
        "name": "intro",
        "forward_N": 16,
        "inverse_N": 16,
        "inverse_crime": true,
        "epsilon": 1.0,
        "sources": [{"location": [0.5, 0.5], "amplitude": 1.0}],
        "b_scheme": {"b": "random_sparse", "density": 1.0, "seed": 7}
    }
"""

import json
from pathlib import Path
from typing import Annotated, List, Literal, Optional, Tuple, Union

from pydantic import BaseModel, ConfigDict, Field, model_validator
from pydantic import ValidationError as PydanticValidationError

import sys

# Add src to path for imports
sys.path.insert(0, str(Path(__file__).parent.parent))
from models import SourceConfiguration, WeightedSparsityError
from settings import default_max_iterations
from solver import SolverConfig
from weighting import (
    Identity,
    PreOrthogonalizer,
    RandomSparse,
    TruncatedPseudoInverse,
    WeightingScheme,
)

# k used for the truncated pseudoinverse when none is given
DEFAULT_K_NOISE_FREE = 100
DEFAULT_K_NOISY = 10

DEFAULT_OVERLAP_TAUS = [round(0.05 * i, 2) for i in range(21)]


class ParseError(WeightedSparsityError):
    """Raised for malformed JSON or unknown keys in a scenario file."""
    pass


class ValidationError(WeightedSparsityError):
    """Raised when a scenario file breaks an invariant."""
    pass


class _Strict(BaseModel):
    model_config = ConfigDict(extra='forbid')


class SourceSpec(_Strict):
    """A point source: location in the unit square and amplitude (coarse-grid units)."""
    location: Tuple[Annotated[float, Field(ge=0.0, le=1.0)], Annotated[float, Field(ge=0.0, le=1.0)]]
    amplitude: float = 1.0


class IdentityB(_Strict):
    b: Literal['identity']


class TruncPinvB(_Strict):
    b: Literal['trunc_pinv']
    k: Optional[Annotated[int, Field(ge=1)]] = None


class RandomSparseB(_Strict):
    b: Literal['random_sparse']
    p: Optional[Annotated[int, Field(ge=1)]] = None
    density: Annotated[float, Field(gt=0.0, le=1.0)] = 0.1
    seed: Annotated[int, Field(ge=0)] = 0


class PreOrthB(_Strict):
    b: Literal['pre_orth']
    indices: Optional[List[Annotated[int, Field(ge=0)]]] = None


BSchemeSpec = Annotated[Union[IdentityB, TruncPinvB, RandomSparseB, PreOrthB], Field(discriminator='b')]


class NoiseSpec(_Strict):
    """Relative noise level ‖η‖₂/‖y‖₂ and the seed of the Gaussian draw."""
    level: Annotated[float, Field(ge=0.0)] = 0.0
    seed: Annotated[int, Field(ge=0)] = 0


class SolverSettings(_Strict):
    """Overrides of the solver defaults."""
    method: Literal['lasso', 'basis_pursuit'] = 'lasso'
    max_iter: Optional[Annotated[int, Field(ge=1)]] = None
    tol: Optional[Annotated[float, Field(gt=0.0)]] = None
    kkt_tol: Optional[Annotated[float, Field(gt=0.0)]] = None
    continuation_steps: Annotated[int, Field(ge=1)] = 6
    restart: bool = True
    polish_interval: Annotated[int, Field(ge=0)] = 50


class Analyses(_Strict):
    """Which diagnostics to compute after the solve."""
    certificates: bool = False
    overlap: bool = False
    coherence: bool = False
    overlap_taus: List[Annotated[float, Field(ge=0.0, le=1.0)]] = Field(
        default_factory=lambda: list(DEFAULT_OVERLAP_TAUS)
    )


class ScenarioConfig(_Strict):
    """
    Declarative description of one experiment.

    forward_N must be a multiple of inverse_N. Equal grids are only allowed
    for scenarios flagged inverse_crime, which generate the data with the
    inversion model itself.
    """
    name: str
    description: Optional[str] = None
    forward_N: Annotated[int, Field(ge=2)]
    inverse_N: Annotated[int, Field(ge=2)]
    inverse_crime: bool = False
    epsilon: float = 1.0
    sources: List[SourceSpec] = Field(min_length=1)
    b_scheme: BSchemeSpec = Field(default_factory=lambda: IdentityB(b='identity'))
    alpha: Annotated[float, Field(gt=0.0)] = 1e-4
    weighted: bool = True
    noise: NoiseSpec = Field(default_factory=NoiseSpec)
    solver: SolverSettings = Field(default_factory=SolverSettings)
    analyses: Analyses = Field(default_factory=Analyses)
    output_dir: Optional[str] = None

    @model_validator(mode='after')
    def _check_grids(self) -> 'ScenarioConfig':
        if self.inverse_crime:
            if self.forward_N != self.inverse_N:
                raise ValueError("inverse_crime requires forward_N == inverse_N")
        else:
            if self.forward_N == self.inverse_N:
                raise ValueError("forward_N == inverse_N is an inverse crime; set inverse_crime: true")
            if self.forward_N < self.inverse_N or self.forward_N % self.inverse_N != 0:
                raise ValueError(
                    f"forward_N={self.forward_N} must be a multiple of inverse_N={self.inverse_N}"
                )

        m = 4 * self.inverse_N
        n = (self.inverse_N + 1) ** 2
        scheme = self.b_scheme
        if isinstance(scheme, TruncPinvB) and scheme.k is not None and scheme.k > m:
            raise ValueError(f"trunc_pinv k={scheme.k} exceeds min(m, n)={m}")
        if isinstance(scheme, PreOrthB) and scheme.indices is not None:
            if len(scheme.indices) > m or any(j >= n for j in scheme.indices):
                raise ValueError(f"pre_orth indices must be at most {m} values in [0, {n})")
        return self

    @property
    def m(self) -> int:
        """Number of boundary nodes of the inversion grid."""
        return 4 * self.inverse_N

    @property
    def n(self) -> int:
        """Number of nodes of the inversion grid."""
        return (self.inverse_N + 1) ** 2

    def solver_config(self, alpha: Optional[float] = None) -> SolverConfig:
        """The SolverConfig with this scenario's overrides applied."""
        settings = self.solver
        return SolverConfig(
            alpha=self.alpha if alpha is None else alpha,
            max_iterations=settings.max_iter or default_max_iterations(),
            rel_tolerance=settings.tol or 1e-12,
            kkt_tolerance=settings.kkt_tol or 1e-8,
            continuation_steps=settings.continuation_steps,
            restart=settings.restart,
            polish_interval=settings.polish_interval,
        )


def scheme_spec(name: str) -> BSchemeSpec:
    """Descriptor with default parameters for a scheme name."""
    models = {
        'identity': IdentityB,
        'trunc_pinv': TruncPinvB,
        'random_sparse': RandomSparseB,
        'pre_orth': PreOrthB,
    }
    if name not in models:
        raise ValueError(f"Unknown scheme '{name}', expected one of {sorted(models)}")
    return models[name](b=name)


def resolve_scheme(spec: BSchemeSpec, cfg: ScenarioConfig, truth: SourceConfiguration) -> WeightingScheme:
    """
    Turn a descriptor into a WeightingScheme, filling in defaults.

    k defaults to 100 without noise and 10 with noise, capped at m; p
    defaults to m; the pre-orthogonalizer defaults to the true support.
    """
    if isinstance(spec, IdentityB):
        return Identity()
    if isinstance(spec, TruncPinvB):
        k = spec.k
        if k is None:
            k = DEFAULT_K_NOISY if cfg.noise.level > 0 else DEFAULT_K_NOISE_FREE
            k = min(k, cfg.m)
        return TruncatedPseudoInverse(k=k)
    if isinstance(spec, RandomSparseB):
        return RandomSparse(p=spec.p or cfg.m, density=spec.density, seed=spec.seed)
    if isinstance(spec, PreOrthB):
        indices = spec.indices if spec.indices is not None else truth.support
        return PreOrthogonalizer(indices=tuple(indices))
    raise TypeError(f"Unknown scheme descriptor: {spec!r}")


def _format_location(loc) -> str:
    return '.'.join(str(part) for part in loc) or '<root>'


def parse_scenario(data: dict, source: str = '<config>') -> ScenarioConfig:
    """
    Validate a decoded scenario document.

    Raises:
        ParseError: For unknown keys or a document that is not an object
        ValidationError: For every other invariant breach
    """
    if not isinstance(data, dict):
        raise ParseError(f"{source}: top level must be a JSON object")
    try:
        return ScenarioConfig.model_validate(data)
    except PydanticValidationError as e:
        errors = e.errors()
        unknown = [err for err in errors if err['type'] == 'extra_forbidden']
        if unknown:
            keys = ', '.join(_format_location(err['loc']) for err in unknown)
            raise ParseError(f"{source}: unknown key(s): {keys}") from e
        details = '; '.join(f"{_format_location(err['loc'])}: {err['msg']}" for err in errors)
        raise ValidationError(f"{source}: {details}") from e


def load_scenario(path) -> ScenarioConfig:
    """
    Load and validate a scenario file.

    Raises:
        ParseError: With line and column for malformed JSON, or the key path
            of unknown keys
        ValidationError: For invariant breaches
    """
    path = Path(path)
    text = path.read_text(encoding='utf-8')
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise ParseError(f"{path}:{e.lineno}:{e.colno}: {e.msg}") from e
    return parse_scenario(data, source=str(path))
