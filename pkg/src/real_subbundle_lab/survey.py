"""Monte-Carlo surveys of orbit reality counts, per determinant type.

A survey cell = (curve, determinant type Lambda, recipe).  Recipes construct
degree-3 divisors that are projectively real by design:

  * all_real            -- three points on fixed circles, per-circle counts
                           prescribed by an assignment compatible with Lambda;
  * real_plus_conjugate_pair -- one point on the odd circle plus B + tau(B);
  * iota_tau_pair       -- one point on the odd circle plus B + iota(tau(B));
  * antireal_pair       -- one point on the odd circle plus two independent
                           points on one anti-real component;
  * uniform_projectively_real -- uniform mixture of the recipes above.

The real-divisor recipes are exactly the configurations enumerated by
``subbundles.real_fiber_configs``; the non-real recipes only make sense for
single-odd-circle determinants and carry a caveat because their orbits are
attributed to Lambda by construction rather than by a signature check.

Every trial is a pure function of (seed, trial index, recipe tag): the
generator is a Philox stream keyed on those values, so serial and threaded
runs (REAL_SUBBUNDLE_LAB_THREADS) produce byte-identical results.
"""

from __future__ import annotations

import os
import zlib
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import atiyah, subbundles
from .curve import (
    GENERIC_REGION,
    RealHyperellipticCurve,
    TopologicalType,
    anti_real_region,
    classify,
    fixed_region,
    involute,
    sample,
)
from .divisors import Divisor, LineBundleTopType, divisor, divisor_to_literal
from .errors import (
    AllTrialsDegenerate,
    InsufficientData,
    LabError,
    RecipeUnavailable,
)

ALL_REAL = "all_real"
REAL_PLUS_CONJUGATE_PAIR = "real_plus_conjugate_pair"
IOTA_TAU_PAIR = "iota_tau_pair"
ANTIREAL_PAIR = "antireal_pair"
UNIFORM = "uniform_projectively_real"

_NONREAL_CAVEAT = (
    "matches_determinant filter skipped: recipe generates non-real divisors; "
    "orbits are attributed to the determinant by construction"
)

_MAX_OFFENDERS = 5
_UINT64 = (1 << 64) - 1


@dataclass(frozen=True)
class Recipe:
    name: str
    circle: int | None = None  # fixed circle carrying the real point A
    assignment: tuple[int, ...] | None = None  # all_real per-circle counts
    sub_recipes: tuple["Recipe", ...] = ()

    @property
    def label(self) -> str:
        if self.name == ALL_REAL:
            return f"{self.name}{list(self.assignment)}"
        if self.circle is not None:
            return f"{self.name}@circle{self.circle}"
        return self.name

    def expected_counts(self) -> tuple[int, ...]:
        if self.name == ALL_REAL:
            return (4,)
        if self.name in (REAL_PLUS_CONJUGATE_PAIR, IOTA_TAU_PAIR):
            return (2,)
        if self.name == ANTIREAL_PAIR:
            return (0,)
        if self.name == UNIFORM:
            return tuple(sorted({c for r in self.sub_recipes for c in r.expected_counts()}))
        raise ValueError(f"unknown recipe {self.name!r}")

    def generates_real_divisors(self) -> bool:
        if self.name in (ALL_REAL, REAL_PLUS_CONJUGATE_PAIR):
            return True
        if self.name == UNIFORM:
            return all(r.generates_real_divisors() for r in self.sub_recipes)
        return False


def battery(curve: RealHyperellipticCurve, lam: LineBundleTopType) -> list[Recipe]:
    """Standard recipe battery for one determinant type.

    Real-divisor recipes come from the per-circle configurations admitted by
    Lambda; the non-real recipes are added for single-odd-circle types (for a
    fully odd type every divisor in play is forced to be all-real).
    """
    n = len(curve.fixed_circles)
    if len(lam.odd_circles) != n:
        raise ValueError("determinant type has wrong number of circles")
    recipes: list[Recipe] = []
    for cfg in subbundles.real_fiber_configs(n, lam.odd_circles):
        if sum(cfg) == 3:
            recipes.append(Recipe(ALL_REAL, assignment=cfg))
        else:
            recipes.append(Recipe(REAL_PLUS_CONJUGATE_PAIR, circle=cfg.index(1)))
    k = sum(lam.odd_circles)
    if k == 1:
        c = lam.odd_circles.index(1)
        recipes.append(Recipe(IOTA_TAU_PAIR, circle=c))
        if curve.anti_real_components:
            recipes.append(Recipe(ANTIREAL_PAIR, circle=c))
    return recipes


def uniform_recipe(curve: RealHyperellipticCurve, lam: LineBundleTopType) -> Recipe:
    return Recipe(UNIFORM, sub_recipes=tuple(battery(curve, lam)))


def generate(curve: RealHyperellipticCurve, recipe: Recipe, rng: np.random.Generator) -> Divisor:
    """One projectively-real degree-3 divisor according to the recipe."""
    if recipe.name == ALL_REAL:
        if recipe.assignment is None or len(recipe.assignment) != len(curve.fixed_circles):
            raise RecipeUnavailable("all_real needs a per-circle assignment")
        pts = []
        for c, r in enumerate(recipe.assignment):
            pts.extend(sample(curve, fixed_region(c), rng) for _ in range(r))
        return divisor(curve, pts)
    if recipe.name == REAL_PLUS_CONJUGATE_PAIR:
        a = sample(curve, fixed_region(_circle(recipe)), rng)
        b = sample(curve, GENERIC_REGION, rng)
        return divisor(curve, [a, b, involute(curve, b, "tau")])
    if recipe.name == IOTA_TAU_PAIR:
        a = sample(curve, fixed_region(_circle(recipe)), rng)
        b = sample(curve, GENERIC_REGION, rng)
        c = involute(curve, involute(curve, b, "tau"), "iota")
        return divisor(curve, [a, b, c])
    if recipe.name == ANTIREAL_PAIR:
        if not curve.anti_real_components:
            raise RecipeUnavailable("curve has no anti-real points")
        a = sample(curve, fixed_region(_circle(recipe)), rng)
        arc = int(rng.integers(0, len(curve.anti_real_components)))
        b = sample(curve, anti_real_region(arc), rng)
        c = sample(curve, anti_real_region(arc), rng)
        return divisor(curve, [a, b, c])
    if recipe.name == UNIFORM:
        if not recipe.sub_recipes:
            raise RecipeUnavailable("uniform mixture has no sub-recipes")
        pick = int(rng.integers(0, len(recipe.sub_recipes)))
        return generate(curve, recipe.sub_recipes[pick], rng)
    raise ValueError(f"unknown recipe {recipe.name!r}")


def _circle(recipe: Recipe) -> int:
    if recipe.circle is None:
        raise RecipeUnavailable(f"{recipe.name} needs a circle index")
    return recipe.circle


# --------------------------------------------------------------------------
# survey execution


@dataclass(frozen=True)
class SurveyResult:
    recipe_label: str
    expected_counts: tuple[int, ...]
    seed: int
    trials: int
    nondegenerate: int
    degenerate_discards: int
    histogram: tuple[tuple[int, int], ...]  # (real_member_count, frequency)
    offending: tuple[dict, ...]  # divisor literals with unexpected counts
    caveats: tuple[str, ...]
    # per-trial rows (index, recipe, count-or-None, flags, signature-bits),
    # populated only when the caller asks for a trial log
    trial_log: tuple[tuple[int, str, int | None, str, str], ...] = ()

    def as_dict(self) -> dict:
        return {
            "recipe": self.recipe_label,
            "expected_counts": list(self.expected_counts),
            "seed": self.seed,
            "trials": self.trials,
            "nondegenerate": self.nondegenerate,
            "degenerate_discards": self.degenerate_discards,
            "histogram": {str(c): f for c, f in self.histogram},
            "offending_divisors": list(self.offending),
            "caveats": list(self.caveats),
        }


def _trial_rng(seed: int, tag: int, index: int) -> np.random.Generator:
    key = np.array([(seed ^ (tag * 0x9E3779B97F4A7C15)) & _UINT64, index], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def _worker_count() -> int:
    raw = os.environ.get("REAL_SUBBUNDLE_LAB_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError as exc:
        raise ValueError("REAL_SUBBUNDLE_LAB_THREADS must be an integer") from exc


def run_survey(
    curve: RealHyperellipticCurve,
    lam: LineBundleTopType,
    recipe: Recipe,
    trials: int,
    seed: int,
    keep_trials: bool = False,
) -> SurveyResult:
    """Run one survey cell; degenerate orbits are discarded and counted."""
    if trials < 1:
        raise ValueError("trials must be positive")
    tag = zlib.crc32(recipe.label.encode("ascii"))
    check_real = recipe.generates_real_divisors()

    def one_trial(index: int):
        rng = _trial_rng(seed, tag, index)
        d = generate(curve, recipe, rng)
        report = atiyah.analyze(d)
        if report.flags:
            return ("degenerate", None, None, "|".join(report.flags), "")
        if check_real and not atiyah.matches_determinant(d, lam):
            raise LabError(
                f"recipe {recipe.label} produced a real divisor off-type; "
                "generator and determinant disagree"
            )
        literal = divisor_to_literal(d) if report.real_member_count not in recipe.expected_counts() else None
        sig = report.common_signature
        sig_bits = "".join(str(b) for b in sig.odd_circles) if sig else ""
        return ("ok", report.real_member_count, literal, "", sig_bits)

    workers = _worker_count()
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(one_trial, range(trials)))
    else:
        outcomes = [one_trial(i) for i in range(trials)]

    hist: dict[int, int] = {}
    degenerate = 0
    offending: list[dict] = []
    log: list[tuple[int, str, int | None, str, str]] = []
    for index, (status, count, literal, flags, sig_bits) in enumerate(outcomes):
        if keep_trials:
            log.append((index, recipe.label, count, flags, sig_bits))
        if status == "degenerate":
            degenerate += 1
            continue
        hist[count] = hist.get(count, 0) + 1
        if literal is not None and len(offending) < _MAX_OFFENDERS:
            offending.append(literal)
    if not hist:
        raise AllTrialsDegenerate(f"all {trials} trials degenerate for {recipe.label}")
    return SurveyResult(
        recipe_label=recipe.label,
        expected_counts=recipe.expected_counts(),
        seed=seed,
        trials=trials,
        nondegenerate=trials - degenerate,
        degenerate_discards=degenerate,
        histogram=tuple(sorted(hist.items())),
        offending=tuple(offending),
        caveats=() if check_real else (_NONREAL_CAVEAT,),
        trial_log=tuple(log),
    )


def run_battery(
    curve: RealHyperellipticCurve,
    lam: LineBundleTopType,
    trials: int,
    seed: int,
    keep_trials: bool = False,
) -> list[SurveyResult]:
    return [
        run_survey(curve, lam, r, trials, seed, keep_trials=keep_trials)
        for r in battery(curve, lam)
    ]


# --------------------------------------------------------------------------
# verdict


CASE1 = "case1"
CASE2 = "case2"
CASE3 = "case3"
VIOLATION = "violation"

_MIN_CELL_TRIALS = 1000


@dataclass(frozen=True)
class TrichotomyReport:
    verdict: str
    predicted_case: str
    predicted_support: tuple[int, ...]
    observed_support: tuple[int, ...]
    pooled_histogram: tuple[tuple[int, int], ...]
    min_cell_nondegenerate: int
    offending: tuple[dict, ...]

    def as_dict(self) -> dict:
        return {
            "verdict": self.verdict,
            "predicted_case": self.predicted_case,
            "predicted_support": list(self.predicted_support),
            "observed_support": list(self.observed_support),
            "pooled_histogram": {str(c): f for c, f in self.pooled_histogram},
            "min_cell_nondegenerate": self.min_cell_nondegenerate,
            "offending_divisors": list(self.offending),
        }


def predict_case(curve_type: TopologicalType, lam: LineBundleTopType) -> tuple[str, tuple[int, ...]]:
    """Expected count support: fully odd determinant -> {4}; one odd circle
    on a curve without anti-real points -> {2,4}; otherwise -> {0,2,4}."""
    k = sum(lam.odd_circles)
    if k == curve_type.n == 3:
        return CASE2, (4,)
    if k != 1:
        raise ValueError(f"no prediction for k={k} odd circles on type {curve_type}")
    if curve_type.m == 0:
        return CASE1, (2, 4)
    return CASE3, (0, 2, 4)


def trichotomy_verdict(
    curve_type: TopologicalType,
    lam: LineBundleTopType,
    results: list[SurveyResult],
    min_cell_trials: int = _MIN_CELL_TRIALS,
) -> TrichotomyReport:
    """Compare the pooled nondegenerate support with the predicted case.

    The predicted label is returned only when the observed support equals the
    predicted set exactly (every predicted count attained, nothing else);
    anything else is a violation.  Raises InsufficientData when any cell has
    fewer than ``min_cell_trials`` nondegenerate trials.
    """
    if not results:
        raise InsufficientData("no survey results supplied")
    low = min(r.nondegenerate for r in results)
    if low < min_cell_trials:
        raise InsufficientData(
            f"a survey cell has only {low} nondegenerate trials "
            f"(need {min_cell_trials})"
        )
    predicted_case, predicted_support = predict_case(curve_type, lam)
    pooled: dict[int, int] = {}
    offending: list[dict] = []
    for r in results:
        for count, freq in r.histogram:
            pooled[count] = pooled.get(count, 0) + freq
        for lit in r.offending:
            if len(offending) < _MAX_OFFENDERS:
                offending.append(lit)
    observed = tuple(sorted(pooled))
    verdict = predicted_case if observed == predicted_support else VIOLATION
    return TrichotomyReport(
        verdict=verdict,
        predicted_case=predicted_case,
        predicted_support=predicted_support,
        observed_support=observed,
        pooled_histogram=tuple(sorted(pooled.items())),
        min_cell_nondegenerate=low,
        offending=tuple(offending),
    )


def survey_cells(
    curve: RealHyperellipticCurve,
    lam: LineBundleTopType,
    trials: int,
    seed: int,
    keep_trials: bool = False,
) -> tuple[list[SurveyResult], TrichotomyReport]:
    """Run the full battery and produce the verdict in one call."""
    results = run_battery(curve, lam, trials, seed, keep_trials=keep_trials)
    report = trichotomy_verdict(classify(curve), lam, results)
    return results, report
