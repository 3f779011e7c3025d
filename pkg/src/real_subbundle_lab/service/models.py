"""Request/response schemas shared by the HTTP service and the CLI."""

from __future__ import annotations

from pydantic import BaseModel, ConfigDict, Field


class StrictModel(BaseModel):
    model_config = ConfigDict(extra="forbid", populate_by_name=True)


class CurveSpec(StrictModel):
    coeffs: list[float] = Field(min_length=7, max_length=7)
    lift_sign: int = 1
    tol: float = 1.0e-9


class DivisorEntryModel(StrictModel):
    x: list[float] | None = None  # [re, im]
    y: list[float] | None = None
    infinity: int | None = None
    mult: int = 1


class DivisorModel(StrictModel):
    entries: list[DivisorEntryModel]


class Meta(StrictModel):
    version: str
    curve_hash: str | None = None
    seed: int | None = None
    tolerances: dict[str, float]


# --- classify / circles / torsion ------------------------------------------


class CurveRequest(StrictModel):
    curve: CurveSpec


class ClassifyResponse(StrictModel):
    n: int
    a: int
    m: int
    notes: list[str]
    meta: Meta


class ComponentModel(StrictModel):
    index: int
    intervals: list[list[float | None]]  # null endpoint = unbounded ray
    through_infinity: bool


class CirclesResponse(StrictModel):
    fixed: list[ComponentModel]
    anti_real: list[ComponentModel]
    meta: Meta


class TorsionClassModel(StrictModel):
    pair: list[int] | None
    is_real: bool


class TorsionResponse(StrictModel):
    classes: list[TorsionClassModel]
    real_count: int
    meta: Meta


# --- orbit -------------------------------------------------------------------


class OrbitRequest(StrictModel):
    curve: CurveSpec
    divisor: DivisorModel


class SignatureModel(StrictModel):
    degree: int
    odd_circles: list[int]


class OrbitResponse(StrictModel):
    projectively_real: bool
    case: str
    real_member_count: int
    common_signature: SignatureModel | None
    flags: list[str]
    members: list[DivisorModel]
    members_distinct: bool
    meta: Meta


# --- survey ------------------------------------------------------------------


class SurveyRequest(StrictModel):
    curve: CurveSpec
    determinant: str = Field(alias="lambda", description="odd-circle bits, e.g. '100'")
    recipe: str | None = None
    trials: int = 10000
    seed: int = 0
    keep_trials: bool = False


class SurveyCellModel(StrictModel):
    recipe: str
    expected_counts: list[int]
    seed: int
    trials: int
    nondegenerate: int
    degenerate_discards: int
    histogram: dict[str, int]
    offending_divisors: list[DivisorModel]
    caveats: list[str]
    trial_log: list[list[str]] | None = None


class VerdictModel(StrictModel):
    verdict: str  # case1 | case2 | case3 | ok | violation
    mode: str  # battery | single_recipe
    predicted_case: str | None = None
    predicted_support: list[int] | None = None
    observed_support: list[int]
    pooled_histogram: dict[str, int]
    min_cell_nondegenerate: int
    offending_divisors: list[DivisorModel]


class SurveyResponse(StrictModel):
    determinant: str = Field(alias="lambda")
    cells: list[SurveyCellModel]
    verdict: VerdictModel
    meta: Meta


# --- subbundle types -----------------------------------------------------------


class SubbundleTypesRequest(StrictModel):
    signature: str
    n: int | None = None
    curve: CurveSpec | None = None


class RelativeTypesModel(StrictModel):
    config: list[int]
    types: list[str]
    distinct_count: int


class SubbundleTypesResponse(StrictModel):
    n: int
    signature: str
    configs: list[list[int]]
    reports: list[RelativeTypesModel]
    max_distinct: int
    meta: Meta


# --- quadric pencil -------------------------------------------------------------


class NewsteadRequest(StrictModel):
    curve: CurveSpec
    samples: int = 60
    seed: int = 0
    budget: int = 2000


class RealFormModel(StrictModel):
    epsilon: str  # sign string, e.g. "++-+-+"
    points_found: int
    residual_max: float | None
    jacobian_rank_ok: bool | None
    components_estimate: int | None
    split_pairs: list[list[int]]


class NewsteadResponse(StrictModel):
    lambdas: list[list[float]]  # [re, im] per value
    forms: list[RealFormModel]
    meta: Meta
