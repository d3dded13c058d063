from __future__ import annotations

from typing import Dict, List, Literal, Optional, Union

from pydantic import BaseModel, Field

FIXTURE_FORMAT = "trackhom.fixture/1"
REPORT_FORMAT = "trackhom.report/1"
AUTO_VERTICAL = "groupoid-completion: auto"


class ValidationReport(BaseModel):
    subject: str = Field(..., description="What was validated")
    ok: bool
    checked: int = Field(0, description="Number of axiom instances examined")
    violations: List[str] = Field(default_factory=list)

    @classmethod
    def from_violations(cls, subject: str, violations: List[str], checked: int = 0) -> "ValidationReport":
        return cls(subject=subject, ok=not violations, checked=checked, violations=violations)


# fixture documents

class OneCellSpec(BaseModel):
    id: str
    src: str
    tgt: str


class CompositeSpec(BaseModel):
    first: str = Field(..., description="Applied first (diagrammatic order)")
    then: str
    result: str


class TwoCellSpec(BaseModel):
    id: str
    src: str = Field(..., description="Source 1-cell")
    tgt: str = Field(..., description="Target 1-cell")
    inverse: Optional[str] = Field(None, description="Vertical inverse; 'self' for an involution")


class VerticalSpec(BaseModel):
    compose: List[CompositeSpec] = Field(default_factory=list)
    inverses: Dict[str, str] = Field(default_factory=dict)


class WhiskerSpec(BaseModel):
    first: str
    then: str
    left: Optional[List[List[int]]] = None
    right: Optional[List[List[int]]] = None


class ModuleSpec(BaseModel):
    kind: Literal["constant", "cyclic", "explicit"] = "constant"
    group: List[int] = Field(default_factory=list, description="Cyclic orders of the constant group, 0 = Z")
    default: int = Field(2, description="Cyclic modules: order used for unlisted components")
    orders: Dict[str, int] = Field(default_factory=dict, description="Cyclic modules: order per 1-cell component")
    fibers: Dict[str, List[int]] = Field(default_factory=dict)
    hwhisker: List[WhiskerSpec] = Field(default_factory=list)
    vwhisker: List[WhiskerSpec] = Field(default_factory=list)
    vinverse: Dict[str, List[List[int]]] = Field(default_factory=dict)


class FixtureDoc(BaseModel):
    format: Literal["trackhom.fixture/1"] = FIXTURE_FORMAT
    name: str
    description: str = ""
    objects: List[str] = Field(default_factory=list)
    one_cells: List[OneCellSpec] = Field(default_factory=list)
    one_cell_composites: List[CompositeSpec] = Field(default_factory=list)
    two_cells: List[TwoCellSpec] = Field(default_factory=list)
    two_cell_composites: List[CompositeSpec] = Field(default_factory=list)
    vertical: Union[Literal["groupoid-completion: auto"], VerticalSpec] = AUTO_VERTICAL
    module: ModuleSpec = Field(default_factory=ModuleSpec)


# reports

class GateReport(BaseModel):
    accepted: bool
    max_level: int
    bound: int
    predicted_counts: List[int] = Field(default_factory=list, description="Predicted |g_m| for m = 0..max_level + 1")
    witness: List[str] = Field(default_factory=list, description="Cycle in the 2-cell support, when rejected")
    reason: Optional[str] = None


class LevelCount(BaseModel):
    level: int
    generators: int
    predicted: int
    matches: bool


class ResolutionReport(BaseModel):
    levels: List[LevelCount] = Field(default_factory=list)
    simplicial_identities_ok: bool = True
    violations: List[str] = Field(default_factory=list)


class TheoryTable(BaseModel):
    theory: str
    groups: List[List[int]] = Field(default_factory=list, description="Invariant factors of H^s, s = 0..N")
    rendered: List[str] = Field(default_factory=list)
    normalized_agrees: Optional[bool] = None


class SESReport(BaseModel):
    level: int
    xi_injective: bool
    theta_surjective: bool
    exact_middle: bool
    composite_zero: bool
    order_identity: bool
    sizes: Dict[str, int] = Field(default_factory=dict, description="Generator counts of A, B, C")

    @property
    def ok(self) -> bool:
        return all([self.xi_injective, self.theta_surjective, self.exact_middle, self.composite_zero, self.order_identity])


class LESNode(BaseModel):
    label: str
    status: Literal["exact", "inexact", "not checkable at this truncation"]
    witness: List[int] = Field(default_factory=list)


class LESReport(BaseModel):
    max_degree: int
    groups: Dict[str, List[List[int]]] = Field(default_factory=dict)
    connecting: List[List[List[int]]] = Field(default_factory=list, description="Matrices of delta_n, n = 0..N-1")
    nodes: List[LESNode] = Field(default_factory=list)
    connecting_choice_invariant: bool = True

    @property
    def exact(self) -> bool:
        return all(node.status != "inexact" for node in self.nodes) and self.connecting_choice_invariant


class ComparisonReport(BaseModel):
    name: str
    degrees: List[int] = Field(default_factory=list)
    left: List[List[int]] = Field(default_factory=list)
    right: List[List[int]] = Field(default_factory=list)
    agrees: bool


class NerveReport(BaseModel):
    simplices: List[int] = Field(default_factory=list)
    nondegenerate: List[int] = Field(default_factory=list)
    identities_ok: bool = True
    cohomology: List[List[int]] = Field(default_factory=list)
    rendered: List[str] = Field(default_factory=list)
    export_path: Optional[str] = None


class Report(BaseModel):
    report_format: Literal["trackhom.report/1"] = REPORT_FORMAT
    command: str
    fixture_name: str
    fixture_hash: str
    max_degree: int
    flags: Dict[str, str] = Field(default_factory=dict)
    validation: List[ValidationReport] = Field(default_factory=list)
    gate: Optional[GateReport] = None
    resolution: Optional[ResolutionReport] = None
    cohomology: List[TheoryTable] = Field(default_factory=list)
    ses: List[SESReport] = Field(default_factory=list)
    les: Optional[LESReport] = None
    comparisons: List[ComparisonReport] = Field(default_factory=list)
    nerve: Optional[NerveReport] = None
    passed: bool = True
    timing: Dict[str, float] = Field(default_factory=dict, exclude=True)
