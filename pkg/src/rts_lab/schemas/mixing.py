"""Mixing-channel Pydantic schemas."""

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from rts_lab.schemas.series import SeriesCoefficients

# Probabilities closer to 1 make the 1/(1-p) amplification meaningless.
P_MAX = 1.0 - 1e-6

# Slack added to the bound when deciding whether a measured distance is dominated.
DOMINATION_SLACK = 1e-10


def check_k_pair(k1: int, k2: int) -> None:
    """Raise ValueError unless k2 > k1."""
    if k2 <= k1:
        raise ValueError("k2 must exceed k1")


def check_probability(p: float, cap: float = P_MAX) -> None:
    """Raise ValueError unless 0 <= p <= cap."""
    if not 0.0 <= p <= cap:
        raise ValueError(f"p must lie in [0, {cap!r}], got {p!r}")


class SeriesMixSpec(BaseModel):
    """The (K1, K2, p) triple together with the base coefficients α_0..α_K2."""

    model_config = ConfigDict(frozen=True)

    base: SeriesCoefficients
    k1: int = Field(ge=0)
    k2: int = Field(ge=1)
    p: float

    @model_validator(mode="after")
    def check_invariants(self) -> "SeriesMixSpec":
        """Enforce k2 > k1, the probability range and the base length."""
        check_k_pair(self.k1, self.k2)
        check_probability(self.p)
        if self.base.truncation_order < self.k2:
            raise ValueError("base series must reach order k2")
        return self


class DenseOperator(BaseModel):
    """Square complex matrix used for desk-scale operators and density matrices."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    entries: np.ndarray

    @field_validator("entries", mode="before")
    @classmethod
    def coerce_entries(cls, value: object) -> np.ndarray:
        """Store entries as a finite square complex matrix."""
        array = np.array(value, dtype=complex)
        if array.ndim != 2 or array.shape[0] != array.shape[1] or array.shape[0] == 0:
            raise ValueError(f"operator must be a non-empty square matrix, got shape {array.shape}")
        if not np.all(np.isfinite(array)):
            raise ValueError("operator entries must be finite")
        return array

    @property
    def dim(self) -> int:
        """Matrix dimension."""
        return int(self.entries.shape[0])

    @classmethod
    def identity(cls, dim: int) -> "DenseOperator":
        """Identity operator of the given dimension."""
        return cls(entries=np.eye(dim, dtype=complex))

    @classmethod
    def pure_state(cls, psi: np.ndarray) -> "DenseOperator":
        """Density matrix |ψ⟩⟨ψ| of a normalized copy of ``psi``."""
        vector = np.asarray(psi, dtype=complex).reshape(-1)
        norm = np.linalg.norm(vector)
        if norm == 0.0:
            raise ValueError("state vector must be non-zero")
        vector = vector / norm
        return cls(entries=np.outer(vector, vector.conj()))


class MixingVerdict(BaseModel):
    """Measured distance against the mixing bound, with the measured operator errors."""

    lhs: float = Field(ge=0.0)
    rhs: float = Field(ge=0.0)
    a1: float = Field(ge=0.0)
    a2: float = Field(ge=0.0)
    b: float = Field(ge=0.0)
    holds: bool
    epsilon_prime: float = Field(default=0.0, ge=0.0)
    epsilon_prime_exceeds_one: bool = False
    slack: float = Field(default=DOMINATION_SLACK, ge=0.0)

    @model_validator(mode="after")
    def check_holds(self) -> "MixingVerdict":
        """holds must agree with lhs <= rhs + slack."""
        if self.holds != (self.lhs <= self.rhs + self.slack):
            raise ValueError("holds is inconsistent with lhs and rhs")
        return self

    @classmethod
    def evaluate(
        cls,
        lhs: float,
        rhs: float,
        a1: float,
        a2: float,
        b: float,
        epsilon_prime: float = 0.0,
        slack: float = DOMINATION_SLACK,
    ) -> "MixingVerdict":
        """Build a verdict, deciding ``holds`` from lhs and rhs."""
        return cls(
            lhs=lhs,
            rhs=rhs,
            a1=a1,
            a2=a2,
            b=b,
            holds=lhs <= rhs + slack,
            epsilon_prime=epsilon_prime,
            epsilon_prime_exceeds_one=epsilon_prime > 1.0,
            slack=slack,
        )
