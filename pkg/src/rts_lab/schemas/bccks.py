"""BCCKS-related Pydantic schemas."""

import math
from enum import Enum

from pydantic import BaseModel, Field, field_validator, model_validator

from rts_lab.schemas.mixing import DenseOperator, MixingVerdict

LN2 = math.log(2.0)


class ErrorMode(str, Enum):
    """Packaging of the per-segment error bound."""

    MAX_FORM = "max_form"
    SUM_FORM = "sum_form"


class OaaVariant(str, Enum):
    """Oblivious amplitude amplification rounds: one (V1) or two (V2)."""

    V1 = "v1"
    V2 = "v2"


class CostMode(str, Enum):
    """How a cost point was priced."""

    RTS = "rts"
    ORIGINAL = "original"
    RAW = "raw"


class SimulationMode(str, Enum):
    """Segmented simulation strategy."""

    EXACT_CHANNEL = "exact_channel"
    SAMPLED = "sampled"


class PauliTerm(BaseModel):
    """One weighted Pauli word α_l·H_l; the sign is kept apart so that α_l >= 0."""

    coefficient: float = Field(ge=0.0)
    pauli: str = Field(pattern=r"^[IXYZ]+$")
    sign: int = 1

    @field_validator("sign")
    @classmethod
    def check_sign(cls, value: int) -> int:
        """Sign must be +1 or -1."""
        if value not in (1, -1):
            raise ValueError("sign must be +1 or -1")
        return value


class PauliSumHamiltonian(BaseModel):
    """H = Σ_l α_l H_l over Pauli words on n_qubits qubits."""

    terms: list[PauliTerm]
    n_qubits: int = Field(ge=1)

    @model_validator(mode="after")
    def check_lengths(self) -> "PauliSumHamiltonian":
        """Every Pauli word must have length n_qubits."""
        if not self.terms:
            raise ValueError("hamiltonian needs at least one term")
        for term in self.terms:
            if len(term.pauli) != self.n_qubits:
                raise ValueError(
                    f"pauli word {term.pauli!r} does not act on {self.n_qubits} qubits"
                )
        return self

    @property
    def alpha_sum(self) -> float:
        """Σ_l α_l."""
        return math.fsum(term.coefficient for term in self.terms)

    @property
    def n_terms(self) -> int:
        """Number of Pauli terms L."""
        return len(self.terms)


class SegmentPlan(BaseModel):
    """Division of the evolution time into r segments of length tau."""

    r: int = Field(ge=1)
    tau: float = Field(gt=0.0)
    alpha_sum: float = Field(gt=0.0)
    t: float = Field(gt=0.0)
    n_terms: int = Field(default=1, ge=1)

    @model_validator(mode="after")
    def check_invariants(self) -> "SegmentPlan":
        """tau = t / r and alpha_sum * tau <= ln 2."""
        if not math.isclose(self.tau, self.t / self.r, rel_tol=1e-12):
            raise ValueError("tau must equal t / r")
        if self.alpha_sum * self.tau > LN2 + 1e-12:
            raise ValueError("segment phase alpha_sum * tau exceeds ln 2")
        return self


class BccksBounds(BaseModel):
    """δ/a/b/ε/ξ bound set for one BCCKS configuration."""

    k1: int
    k2: int
    p: float
    r: int
    mode: ErrorMode
    delta1: float = Field(ge=0.0)
    delta2: float = Field(ge=0.0)
    delta_m: float = Field(ge=0.0)
    a1: float = Field(ge=0.0)
    a2: float = Field(ge=0.0)
    b: float = Field(ge=0.0)
    epsilon_segment: float = Field(ge=0.0)
    epsilon_total: float = Field(ge=0.0)
    xi_segment: float = Field(ge=0.0, le=1.0)
    p_cap: float
    a2_statement: float = Field(ge=0.0)
    a2_proof: float = Field(ge=0.0)

    @model_validator(mode="after")
    def check_invariants(self) -> "BccksBounds":
        """delta_m <= delta1 and the total is r times the segment error."""
        if self.delta_m > self.delta1:
            raise ValueError("delta_m must not exceed delta1")
        if not math.isclose(self.epsilon_total, self.r * self.epsilon_segment, rel_tol=1e-12):
            raise ValueError("epsilon_total must equal r * epsilon_segment")
        return self


class CostPoint(BaseModel):
    """Cost indicator G, raw CNOT count and the parameters that produced them."""

    mode: CostMode
    g_indicator: float = Field(ge=0.0)
    g_cnot: float = Field(ge=0.0)
    k1: int | None = None
    k2: int | None = None
    p: float | None = None
    k_mean: float
    per_select_cost: float
    clamped: bool = False


class SimulationResult(BaseModel):
    """Final state of a segmented simulation and its comparison with the exact evolution."""

    state: DenseOperator
    exact: DenseOperator
    verdict: MixingVerdict
    mode: SimulationMode
    r: int
    shots: int = 0
    discarded_shots: int = 0
    failure_rate: float = 0.0
    standard_error: float = 0.0
