"""HTTP service and the shared handlers behind it.

Every endpoint body lives in a ``handle_*`` function that maps a request
model to a response model; the CLI calls these directly (no server needed)
and the FastAPI app wraps them with error translation.  Responses carry no
timestamps so identical requests produce byte-identical reports.
"""

from __future__ import annotations

import math

import numpy as np
from fastapi import FastAPI, HTTPException

from .. import __version__, atiyah, newstead, subbundles, survey
from ..curve import (
    RealHyperellipticCurve,
    classification_notes,
    classify,
    curve_content_hash,
    curve_from_spec,
)
from ..divisors import (
    LineBundleTopType,
    divisor_from_literal,
    divisor_to_literal,
)
from ..equivalence import KERNEL_THRESHOLD, MIN_DECISION_GAP, two_torsion
from ..errors import LabError, NoRealPointsFound, RecipeUnavailable, SingularPoint
from . import models

_CONNECTEDNESS_MIN_POINTS = 40


def _build(spec: models.CurveSpec) -> RealHyperellipticCurve:
    return curve_from_spec(spec.model_dump())


def _meta(curve: RealHyperellipticCurve | None = None, seed: int | None = None) -> models.Meta:
    tolerances: dict[str, float] = {
        "kernel_threshold": KERNEL_THRESHOLD,
        "decision_gap": MIN_DECISION_GAP,
    }
    if curve is not None:
        tolerances["curve_equality"] = curve.equality_tolerance
    return models.Meta(
        version=__version__,
        curve_hash=curve_content_hash(curve) if curve is not None else None,
        seed=seed,
        tolerances=tolerances,
    )


def _parse_signature(bits: str) -> tuple[int, ...]:
    if not bits or any(c not in "01" for c in bits):
        raise ValueError(f"signature must be a nonempty string of 0/1 bits, got {bits!r}")
    return tuple(int(c) for c in bits)


def _bits_string(sig: tuple[int, ...]) -> str:
    return "".join(str(b) for b in sig)


def _divisor_model(literal: dict) -> models.DivisorModel:
    return models.DivisorModel(
        entries=[models.DivisorEntryModel(**e) for e in literal["entries"]]
    )


def _interval_json(interval: tuple[float, float]) -> list[float | None]:
    lo, hi = interval
    return [None if math.isinf(lo) else lo, None if math.isinf(hi) else hi]


# --------------------------------------------------------------------------
# handlers


def handle_classify(req: models.CurveRequest) -> models.ClassifyResponse:
    curve = _build(req.curve)
    t = classify(curve)
    return models.ClassifyResponse(
        n=t.n, a=t.a, m=t.m, notes=classification_notes(curve), meta=_meta(curve)
    )


def handle_circles(req: models.CurveRequest) -> models.CirclesResponse:
    curve = _build(req.curve)
    fixed = [
        models.ComponentModel(
            index=c.index,
            intervals=[_interval_json(iv) for iv in c.intervals],
            through_infinity=c.through_infinity,
        )
        for c in curve.fixed_circles
    ]
    anti = [
        models.ComponentModel(
            index=c.index,
            intervals=[_interval_json(iv) for iv in c.intervals],
            through_infinity=c.through_infinity,
        )
        for c in curve.anti_real_components
    ]
    return models.CirclesResponse(fixed=fixed, anti_real=anti, meta=_meta(curve))


def handle_torsion(req: models.CurveRequest) -> models.TorsionResponse:
    curve = _build(req.curve)
    classes = [
        models.TorsionClassModel(
            pair=None if c.pair is None else list(c.pair), is_real=c.is_real
        )
        for c in two_torsion(curve)
    ]
    return models.TorsionResponse(
        classes=classes,
        real_count=sum(1 for c in classes if c.is_real),
        meta=_meta(curve),
    )


def handle_orbit(req: models.OrbitRequest) -> models.OrbitResponse:
    curve = _build(req.curve)
    d = divisor_from_literal(curve, req.divisor.model_dump(exclude_none=True))
    report = atiyah.analyze(d)
    sig = report.common_signature
    return models.OrbitResponse(
        projectively_real=report.projectively_real,
        case=report.case_label,
        real_member_count=report.real_member_count,
        common_signature=None
        if sig is None
        else models.SignatureModel(degree=sig.degree, odd_circles=list(sig.odd_circles)),
        flags=list(report.flags),
        members=[_divisor_model(divisor_to_literal(m)) for m in report.orbit.members],
        members_distinct=report.orbit.members_distinct,
        meta=_meta(curve),
    )


def _cell_model(result: survey.SurveyResult) -> models.SurveyCellModel:
    log = None
    if result.trial_log:
        log = [
            [str(i), rec, "" if count is None else str(count), flags, sig]
            for i, rec, count, flags, sig in result.trial_log
        ]
    return models.SurveyCellModel(
        recipe=result.recipe_label,
        expected_counts=list(result.expected_counts),
        seed=result.seed,
        trials=result.trials,
        nondegenerate=result.nondegenerate,
        degenerate_discards=result.degenerate_discards,
        histogram={str(c): f for c, f in result.histogram},
        offending_divisors=[_divisor_model(lit) for lit in result.offending],
        caveats=list(result.caveats),
        trial_log=log,
    )


def handle_survey(req: models.SurveyRequest) -> models.SurveyResponse:
    curve = _build(req.curve)
    bits = _parse_signature(req.determinant)
    lam = LineBundleTopType(degree=3, odd_circles=bits)
    if req.recipe is None:
        results, report = survey.survey_cells(
            curve, lam, req.trials, req.seed, keep_trials=req.keep_trials
        )
        verdict = models.VerdictModel(
            verdict=report.verdict,
            mode="battery",
            predicted_case=report.predicted_case,
            predicted_support=list(report.predicted_support),
            observed_support=list(report.observed_support),
            pooled_histogram={str(c): f for c, f in report.pooled_histogram},
            min_cell_nondegenerate=report.min_cell_nondegenerate,
            offending_divisors=[_divisor_model(lit) for lit in report.offending],
        )
    else:
        if req.recipe == survey.UNIFORM:
            selected = [survey.uniform_recipe(curve, lam)]
        else:
            selected = [r for r in survey.battery(curve, lam) if r.name == req.recipe]
        if not selected:
            raise RecipeUnavailable(
                f"recipe {req.recipe!r} is not available for this curve and determinant"
            )
        results = [
            survey.run_survey(curve, lam, r, req.trials, req.seed, keep_trials=req.keep_trials)
            for r in selected
        ]
        pooled: dict[int, int] = {}
        offending: list[dict] = []
        for r in results:
            for count, freq in r.histogram:
                pooled[count] = pooled.get(count, 0) + freq
            offending.extend(r.offending)
        expected = sorted({c for r in results for c in r.expected_counts})
        observed = sorted(pooled)
        verdict = models.VerdictModel(
            verdict="ok" if set(observed) <= set(expected) else "violation",
            mode="single_recipe",
            predicted_case=None,
            predicted_support=expected,
            observed_support=observed,
            pooled_histogram={str(c): f for c, f in sorted(pooled.items())},
            min_cell_nondegenerate=min(r.nondegenerate for r in results),
            offending_divisors=[_divisor_model(lit) for lit in offending[:5]],
        )
    return models.SurveyResponse(
        determinant=_bits_string(bits),
        cells=[_cell_model(r) for r in results],
        verdict=verdict,
        meta=_meta(curve, seed=req.seed),
    )


def handle_subbundle_types(req: models.SubbundleTypesRequest) -> models.SubbundleTypesResponse:
    sig = _parse_signature(req.signature)
    curve = None
    if req.curve is not None:
        curve = _build(req.curve)
        n = len(curve.fixed_circles)
        if req.n is not None and req.n != n:
            raise ValueError(f"--n {req.n} disagrees with the curve's {n} circles")
    elif req.n is not None:
        n = req.n
    else:
        n = len(sig)
    reports = [
        subbundles.relative_types(n, sig, cfg)
        for cfg in subbundles.real_fiber_configs(n, sig)
    ]
    return models.SubbundleTypesResponse(
        n=n,
        signature=_bits_string(sig),
        configs=[list(r.config) for r in reports],
        reports=[
            models.RelativeTypesModel(
                config=list(r.config),
                types=[_bits_string(t) for t in r.types],
                distinct_count=r.distinct_count,
            )
            for r in reports
        ],
        max_distinct=subbundles.max_distinct_over_configs(n, sig),
        meta=_meta(curve),
    )


def handle_newstead(req: models.NewsteadRequest) -> models.NewsteadResponse:
    curve = _build(req.curve)
    pencil = newstead.build_pencil(curve)
    forms = []
    for index, form in enumerate(newstead.enumerate_real_forms(pencil)):
        rng = np.random.Generator(np.random.Philox(key=np.array([req.seed, index], dtype=np.uint64)))
        try:
            points = newstead.sample_real_points(form, req.samples, rng, budget=req.budget)
        except NoRealPointsFound:
            points = []
        residual_max = None
        rank_ok = None
        components = None
        if points:
            residual_max = max(
                max(abs(v) for v in form.restricted_values(t)) for t in points
            )
            rank_ok = True
            for t in points:
                try:
                    newstead.smoothness_check(form, t)
                except SingularPoint:
                    rank_ok = False
                    break
            if len(points) >= _CONNECTEDNESS_MIN_POINTS:
                components = newstead.connectedness_probe(points).components
        forms.append(
            models.RealFormModel(
                epsilon="".join("+" if e > 0 else "-" for e in form.epsilon),
                points_found=len(points),
                residual_max=residual_max,
                jacobian_rank_ok=rank_ok,
                components_estimate=components,
                split_pairs=[list(p) for p in newstead.quadrant_split_pairs(form)],
            )
        )
    return models.NewsteadResponse(
        lambdas=[[v.real, v.imag] for v in pencil.lambdas],
        forms=forms,
        meta=_meta(curve, seed=req.seed),
    )


# --------------------------------------------------------------------------
# FastAPI wiring


app = FastAPI(title="real-subbundle-lab", version=__version__)


def _wrap(handler, request):
    try:
        return handler(request)
    except (LabError, ValueError) as exc:
        raise HTTPException(status_code=422, detail=str(exc)) from exc


@app.get("/version")
def version() -> dict:
    return {"version": __version__}


@app.post("/classify", response_model=models.ClassifyResponse)
def classify_endpoint(req: models.CurveRequest) -> models.ClassifyResponse:
    return _wrap(handle_classify, req)


@app.post("/circles", response_model=models.CirclesResponse)
def circles_endpoint(req: models.CurveRequest) -> models.CirclesResponse:
    return _wrap(handle_circles, req)


@app.post("/torsion", response_model=models.TorsionResponse)
def torsion_endpoint(req: models.CurveRequest) -> models.TorsionResponse:
    return _wrap(handle_torsion, req)


@app.post("/orbit", response_model=models.OrbitResponse)
def orbit_endpoint(req: models.OrbitRequest) -> models.OrbitResponse:
    return _wrap(handle_orbit, req)


@app.post("/survey", response_model=models.SurveyResponse)
def survey_endpoint(req: models.SurveyRequest) -> models.SurveyResponse:
    return _wrap(handle_survey, req)


@app.post("/subbundle-types", response_model=models.SubbundleTypesResponse)
def subbundle_types_endpoint(req: models.SubbundleTypesRequest) -> models.SubbundleTypesResponse:
    return _wrap(handle_subbundle_types, req)


@app.post("/newstead", response_model=models.NewsteadResponse)
def newstead_endpoint(req: models.NewsteadRequest) -> models.NewsteadResponse:
    return _wrap(handle_newstead, req)
