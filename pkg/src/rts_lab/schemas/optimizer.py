"""Parameter-search Pydantic schemas."""

import math
from enum import Enum

from pydantic import BaseModel, model_validator

from rts_lab.schemas.bccks import BccksBounds, CostPoint


class TotalMode(str, Enum):
    """Whether the searched error is per segment or multiplied by r."""

    PER_SEGMENT = "per_segment"
    TIMES_R = "times_r"


class SearchResult(BaseModel):
    """Optimal (K1, K2, p) with its cost point and bound set."""

    cost: CostPoint
    bounds: BccksBounds
    objective: float
    candidates: int


class AsymptoticPoint(BaseModel):
    """Leading-order truncation orders of the original and mixed methods."""

    a_const: float
    l_var: float
    k_orig: float
    k_mix: float
    ratio: float

    @model_validator(mode="after")
    def check_invariants(self) -> "AsymptoticPoint":
        """ratio = k_mix / k_orig."""
        if not math.isclose(self.ratio, self.k_mix / self.k_orig, rel_tol=1e-12):
            raise ValueError("ratio must equal k_mix / k_orig")
        return self


class TableRow(BaseModel):
    """One error threshold of the framework/original cost comparison."""

    error: float
    framework_cost: float
    original_cost: int
    saving_pct: float
    framework_cnot: float
    original_cnot: float
    k1: int
    k2: int
    p: float


class CurveRow(BaseModel):
    """Best error at one budget next to the original method at the matching integer order."""

    g: float
    best_k1: int | None
    best_k2: int | None
    best_p: float | None
    epsilon_total: float
    original_k: int | None
    original_epsilon: float


class GridRow(BaseModel):
    """Error at fixed p as a function of (K1, K2)."""

    k1: int
    k2: int
    p: float
    epsilon_total: float
