"""Series-related Pydantic schemas."""

from enum import Enum

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator


class TailMode(str, Enum):
    """Evaluation mode for the tail of an exponential series."""

    EXACT = "exact"
    CLOSED_BOUND = "closed_bound"


class SeriesCoefficients(BaseModel):
    """Coefficients α_0..α_K of a truncated power series."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    values: np.ndarray
    truncation_order: int = Field(ge=0)

    @field_validator("values", mode="before")
    @classmethod
    def coerce_values(cls, value: object) -> np.ndarray:
        """Store coefficients as a one-dimensional complex array."""
        array = np.array(value, dtype=complex).reshape(-1)
        if not np.all(np.isfinite(array)):
            raise ValueError("series coefficients must be finite")
        return array

    @model_validator(mode="after")
    def check_length(self) -> "SeriesCoefficients":
        """Length must equal truncation_order + 1."""
        if self.values.shape[0] != self.truncation_order + 1:
            raise ValueError(
                f"expected {self.truncation_order + 1} coefficients, got {self.values.shape[0]}"
            )
        return self

    @classmethod
    def from_values(cls, values: object) -> "SeriesCoefficients":
        """Build coefficients whose truncation order is inferred from the length."""
        array = np.array(values, dtype=complex).reshape(-1)
        if array.shape[0] == 0:
            raise ValueError("at least one coefficient is required")
        return cls(values=array, truncation_order=array.shape[0] - 1)

    def padded(self, order: int) -> np.ndarray:
        """Return the coefficients zero-padded up to ``order``."""
        if order < self.truncation_order:
            raise ValueError("cannot pad to a lower order")
        out = np.zeros(order + 1, dtype=complex)
        out[: self.truncation_order + 1] = self.values
        return out
