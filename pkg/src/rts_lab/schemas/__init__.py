"""Pydantic schemas package."""

from rts_lab.schemas.bccks import (
    BccksBounds,
    CostMode,
    CostPoint,
    ErrorMode,
    OaaVariant,
    PauliSumHamiltonian,
    PauliTerm,
    SegmentPlan,
    SimulationMode,
    SimulationResult,
)
from rts_lab.schemas.mixing import DenseOperator, MixingVerdict, SeriesMixSpec
from rts_lab.schemas.ode import (
    OdeBounds,
    OdeConstants,
    OdeEncoding,
    OdeProblem,
    OdeVerification,
)
from rts_lab.schemas.optimizer import (
    AsymptoticPoint,
    CurveRow,
    GridRow,
    SearchResult,
    TableRow,
    TotalMode,
)
from rts_lab.schemas.qsp import (
    JacobiAngerSpec,
    JaVariant,
    QspBoundSet,
    UsaCertificate,
    UsaSpec,
    UsaTarget,
)
from rts_lab.schemas.report import Application, BoundReport, RunReport, Verdict
from rts_lab.schemas.series import SeriesCoefficients, TailMode

__all__ = [
    "Application",
    "AsymptoticPoint",
    "BccksBounds",
    "BoundReport",
    "CostMode",
    "CostPoint",
    "CurveRow",
    "DenseOperator",
    "ErrorMode",
    "GridRow",
    "JaVariant",
    "JacobiAngerSpec",
    "MixingVerdict",
    "OaaVariant",
    "OdeBounds",
    "OdeConstants",
    "OdeEncoding",
    "OdeProblem",
    "OdeVerification",
    "PauliSumHamiltonian",
    "PauliTerm",
    "QspBoundSet",
    "RunReport",
    "SearchResult",
    "SegmentPlan",
    "SeriesCoefficients",
    "SeriesMixSpec",
    "SimulationMode",
    "SimulationResult",
    "TableRow",
    "TailMode",
    "TotalMode",
    "UsaCertificate",
    "UsaSpec",
    "UsaTarget",
    "Verdict",
]
