"""ODE-related Pydantic schemas."""

import math

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator
from scipy import sparse

from rts_lab.schemas.report import BoundReport, Verdict

ANTI_HERMITIAN_TOL = 1e-10


class OdeProblem(BaseModel):
    """dx/dt = A x + b with anti-Hermitian A, stepped m times with step h."""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    a: np.ndarray
    b: np.ndarray
    x0: np.ndarray
    h: float = Field(gt=0.0)
    m: int = Field(ge=1)
    pad: int = Field(default=1, ge=0)

    @field_validator("a", mode="before")
    @classmethod
    def coerce_matrix(cls, value: object) -> np.ndarray:
        """A must be a finite square complex matrix."""
        array = np.array(value, dtype=complex)
        if array.ndim != 2 or array.shape[0] != array.shape[1]:
            raise ValueError("a must be a square matrix")
        if not np.all(np.isfinite(array)):
            raise ValueError("a must be finite")
        return array

    @field_validator("b", "x0", mode="before")
    @classmethod
    def coerce_vector(cls, value: object) -> np.ndarray:
        """b and x0 are finite complex vectors."""
        array = np.array(value, dtype=complex).reshape(-1)
        if not np.all(np.isfinite(array)):
            raise ValueError("vectors must be finite")
        return array

    @model_validator(mode="after")
    def check_invariants(self) -> "OdeProblem":
        """Dimensions agree, A is anti-Hermitian and ||A h|| <= 1."""
        n = self.a.shape[0]
        if self.b.shape[0] != n or self.x0.shape[0] != n:
            raise ValueError("dimensions of a, b and x0 must agree")
        if np.max(np.abs(self.a + self.a.conj().T), initial=0.0) > ANTI_HERMITIAN_TOL:
            raise ValueError("a must be anti-Hermitian")
        if np.linalg.norm(self.a, 2) * self.h > 1.0 + 1e-12:
            raise ValueError("||A h|| must not exceed 1")
        return self

    @property
    def n(self) -> int:
        """State dimension."""
        return int(self.a.shape[0])


class OdeEncoding(BaseModel):
    """History-state linear system C x = rhs for m Taylor steps of order k."""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    matrix: sparse.csr_matrix
    rhs: np.ndarray
    block_index: dict[tuple[int, int], int]
    d: int = Field(ge=0)
    n: int = Field(ge=1)
    k: int = Field(ge=0)
    m: int = Field(ge=1)
    modified: bool = False

    @field_validator("matrix", mode="before")
    @classmethod
    def coerce_matrix(cls, value: object) -> sparse.csr_matrix:
        """Store the encoding matrix in CSR form."""
        return sparse.csr_matrix(value, dtype=complex)

    @model_validator(mode="after")
    def check_shape(self) -> "OdeEncoding":
        """Matrix is square with (d + 1) blocks of size n."""
        size = (self.d + 1) * self.n
        if self.matrix.shape != (size, size) or self.rhs.shape != (size,):
            raise ValueError("encoding shape does not match (d + 1) * n")
        return self

    @property
    def n_blocks(self) -> int:
        """Number of row blocks, d + 1."""
        return self.d + 1

    def step_block(self, step: int) -> int:
        """Row-block holding the state after ``step`` time steps."""
        if not 0 <= step <= self.m:
            raise ValueError(f"step must lie in [0, {self.m}]")
        return step * (self.k + 1)


class OdeConstants(BaseModel):
    """κ_V and C_j for one encoding."""

    kappa_v: float = Field(ge=1.0 - 1e-9)
    c_j: float = Field(ge=0.0)
    j: int = Field(ge=1)
    defective: bool = False
    kappa_source: str = "eigenvectors"


class OdeBounds(OdeConstants):
    """Constants plus the δ1/δm/ε bound set of the mixed ODE solver."""

    p: float
    delta1: float = Field(ge=0.0)
    delta_m: float = Field(ge=0.0)
    epsilon: float = Field(ge=0.0)

    @model_validator(mode="after")
    def check_epsilon(self) -> "OdeBounds":
        """epsilon = max{8 δm, 4/(1-p) δ1²}."""
        expected = max(8.0 * self.delta_m, 4.0 / (1.0 - self.p) * self.delta1**2)
        if not math.isclose(self.epsilon, expected, rel_tol=1e-12):
            raise ValueError("epsilon must equal max{8 delta_m, 4/(1-p) delta1^2}")
        return self


class OdeVerification(BaseModel):
    """Measured error of the mixed ODE solution against its bound."""

    bounds: OdeBounds
    report: BoundReport
    verdict: Verdict
    measured_error: float = Field(ge=0.0)
    plain_k2_error: float = Field(ge=0.0)
    cancellation_residual: float = Field(ge=0.0)
