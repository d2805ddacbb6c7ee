"""QSP-related Pydantic schemas."""

import math
from enum import Enum

from pydantic import BaseModel, Field, model_validator

from rts_lab.schemas.mixing import check_k_pair, check_probability


class JaVariant(str, Enum):
    """Truncated (v1), modified (v2) or mixed (vm) Jacobi–Anger series."""

    V1 = "v1"
    V2 = "v2"
    VM = "vm"


class UsaTarget(str, Enum):
    """Which truncated-linear-function curve to evaluate."""

    IDEAL = "ideal"
    POLY_K1 = "poly_k1"
    POLY_K2 = "poly_k2"
    POLY_MIX = "poly_mix"


class UsaCertificate(str, Enum):
    """Bound a USA composite scan is certified against."""

    # Bessel tail of the erf polynomial at the composite's own scale
    TAIL = "tail"
    # Closed-form erf lemma at γ = 4Γ and order K - 1
    LEMMA = "lemma"


class JacobiAngerSpec(BaseModel):
    """Evolution time and RTS parameters for the Jacobi–Anger expansion of e^{-iλt}."""

    t: float
    k1: int = Field(ge=1)
    k2: int
    p: float

    @model_validator(mode="after")
    def check_invariants(self) -> "JacobiAngerSpec":
        """k2 > k1 >= 1 and p in [0, 1)."""
        check_k_pair(self.k1, self.k2)
        check_probability(self.p)
        return self


class QspBoundSet(BaseModel):
    """Truncation and rescaling bounds of the three Jacobi–Anger polynomials."""

    eps1_v1: float = Field(ge=0.0)
    eps2_v1: float = Field(ge=0.0)
    eps1_v2: float = Field(ge=0.0)
    eps2_v2: float = Field(ge=0.0)
    eps1_vm: float = Field(ge=0.0)
    eps2_vm: float = Field(ge=0.0)
    delta1: float = Field(ge=0.0)
    delta_m: float = Field(ge=0.0)
    epsilon: float = Field(ge=0.0)
    xi: float = Field(ge=0.0)
    v2_certificate: float = Field(ge=0.0)
    query_cost: float = Field(ge=0.0)

    @model_validator(mode="after")
    def check_invariants(self) -> "QspBoundSet":
        """No rescaling error for V1 and Vm; epsilon = max{28 δ1, 8 √δm}."""
        if self.eps2_v1 != 0.0 or self.eps2_vm != 0.0:
            raise ValueError("eps2_v1 and eps2_vm must be zero")
        expected = max(28.0 * self.delta1, 8.0 * math.sqrt(self.delta_m))
        if not math.isclose(self.epsilon, expected, rel_tol=1e-12):
            raise ValueError("epsilon must equal max{28 delta1, 8 sqrt(delta_m)}")
        return self


def delta_prime_from_tolerance(delta_tol: float) -> float:
    """δ' with 1/δ' = sqrt(log(2 / (π δ²)))."""
    argument = 2.0 / (math.pi * delta_tol**2)
    if argument <= 1.0:
        raise ValueError("delta_tol too large: log(2 / (pi delta^2)) must be positive")
    return 1.0 / math.sqrt(math.log(argument))


class UsaSpec(BaseModel):
    """Truncated-linear-function parameters for uniform spectral amplification."""

    gamma_cap: float = Field(gt=0.0, le=0.5)
    delta_tol: float = Field(gt=0.0, lt=1.0)
    delta_prime: float | None = None
    k1: int = Field(ge=1)
    k2: int
    p: float

    @model_validator(mode="after")
    def check_invariants(self) -> "UsaSpec":
        """Odd truncation orders, k2 > k1, and δ' consistent with δ."""
        if self.k1 % 2 == 0 or self.k2 % 2 == 0:
            raise ValueError("k1 and k2 must be odd")
        check_k_pair(self.k1, self.k2)
        check_probability(self.p)
        expected = delta_prime_from_tolerance(self.delta_tol)
        if self.delta_prime is None:
            self.delta_prime = expected
        elif not math.isclose(self.delta_prime, expected, rel_tol=1e-12):
            raise ValueError("delta_prime is inconsistent with delta_tol")
        return self

    @property
    def erf_denominator(self) -> float:
        """√2·Γ·δ', the denominator of both error-function arguments."""
        return math.sqrt(2.0) * self.gamma_cap * self.delta_prime

    @property
    def erf_scale(self) -> float:
        """Scale γ mapping every erf argument for |λ| <= 1 into [-1, 1]."""
        return (1.0 + 2.0 * self.gamma_cap) / self.erf_denominator
