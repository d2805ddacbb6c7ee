"""Report Pydantic schemas shared by every application and the command line."""

import json
import math
from enum import Enum
from typing import Any

from pydantic import BaseModel, Field

from rts_lab.schemas.mixing import DOMINATION_SLACK


class Application(str, Enum):
    """Application a bound report belongs to."""

    BCCKS = "bccks"
    QSP_HS = "qsp_hs"
    USA = "usa"
    ODE = "ode"


class Verdict(BaseModel):
    """A named domination check: measured lhs against bound rhs."""

    name: str
    lhs: float
    rhs: float
    holds: bool

    @classmethod
    def check(cls, name: str, lhs: float, rhs: float, slack: float = DOMINATION_SLACK) -> "Verdict":
        """Build a verdict that holds when lhs <= rhs + slack."""
        return cls(name=name, lhs=lhs, rhs=rhs, holds=bool(lhs <= rhs + slack))


class BoundReport(BaseModel):
    """δ/a/b/ε/ξ values for one application, plus provenance notes."""

    application: Application
    delta1: float
    delta2: float | None = None
    delta_m: float
    a1: float | None = None
    a2: float | None = None
    b: float | None = None
    epsilon: float
    xi: float | None = None
    extras: dict[str, float] = Field(default_factory=dict)
    provenance: dict[str, Any] = Field(default_factory=dict)

    def flat(self) -> dict[str, Any]:
        """Flatten into one mapping of named numbers (extras inlined)."""
        data = self.model_dump(exclude={"extras", "provenance"}, mode="python")
        data["application"] = self.application.value
        data.update(self.extras)
        return {key: value for key, value in data.items() if value is not None}


class RunReport(BaseModel):
    """Machine-readable record of one command-line run."""

    command: str
    parameters: dict[str, Any] = Field(default_factory=dict)
    results: dict[str, Any] = Field(default_factory=dict)
    provenance: dict[str, Any] = Field(default_factory=dict)
    verdicts: list[Verdict] = Field(default_factory=list)
    rows: list[dict[str, Any]] = Field(default_factory=list)

    @property
    def all_hold(self) -> bool:
        """True when every verdict holds."""
        return all(verdict.holds for verdict in self.verdicts)

    def to_json(self) -> str:
        """Serialize to a single JSON object; floats use shortest round-trip text."""
        return json.dumps(self.model_dump(mode="python"), indent=2, default=_json_default) + "\n"

    def to_csv(self) -> str:
        """Serialize tabular rows, or key/value pairs when there are no rows."""
        if self.rows:
            columns = list(self.rows[0].keys())
            lines = [",".join(columns)]
            lines.extend(
                ",".join(format_csv_value(row.get(column)) for column in columns)
                for row in self.rows
            )
        else:
            lines = ["key,value"]
            lines.extend(
                f"{key},{format_csv_value(value)}" for key, value in self.results.items()
            )
            lines.extend(
                f"verdict.{verdict.name},{format_csv_value(verdict.holds)}"
                for verdict in self.verdicts
            )
        return "\n".join(lines) + "\n"


def format_csv_value(value: Any) -> str:
    """Render a CSV cell; floats use repr so re-parsing is exact."""
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return repr(value)
    if isinstance(value, Enum):
        return str(value.value)
    return str(value)


def _json_default(value: Any) -> Any:
    if isinstance(value, Enum):
        return value.value
    if hasattr(value, "item"):
        return value.item()
    return str(value)
