"""Exception hierarchy shared by all laboratory modules."""


class LabError(Exception):
    """Base class for every domain error raised by this package."""


# --- curve construction and geometry ---------------------------------------


class DegreeError(LabError):
    """Leading coefficient a6 vanishes: the sextic model degenerates."""


class NotSquarefree(LabError):
    """Two roots of f collide within the squarefree separation gate."""


class NonRealCoefficient(LabError):
    """A coefficient is complex, non-finite, or otherwise not a real number."""


class EmptyRealLocus(LabError):
    """The chosen real structure has no fixed points on the curve."""


class OffCurve(LabError):
    """A point handed to a curve operation does not satisfy y^2 = f(x)."""


class EmptyRegion(LabError):
    """A sampling region refers to a component the curve does not have."""


# --- divisors ---------------------------------------------------------------


class AmbiguousMatch(LabError):
    """Tolerance-aware multiset matching found two candidates too close to call."""


class NotReal(LabError):
    """Operation requires a real divisor but the input is not fixed by tau."""


class BadParity(LabError):
    """Odd-circle bit vector violates the degree parity law."""


# --- linear equivalence -----------------------------------------------------


class DegreeMismatch(LabError):
    """Linear equivalence is only defined between divisors of equal degree."""


class DegreeTooLarge(LabError):
    """Interpolation-based equivalence test is limited to degree <= 4."""


class IllConditioned(LabError):
    """Singular-value gap too small to decide membership; result inconclusive."""


# --- subbundle combinatorics ------------------------------------------------


class InvalidAssignment(LabError):
    """Per-circle point counts violate parity or total-degree constraints."""


# --- surveys ----------------------------------------------------------------


class RecipeUnavailable(LabError):
    """The curve lacks the locus (e.g. anti-real points) the recipe needs."""


class AllTrialsDegenerate(LabError):
    """Every generated orbit in a survey cell was discarded as degenerate."""


class InsufficientData(LabError):
    """Fewer nondegenerate trials than the verdict threshold requires."""


# --- quadric pencil ---------------------------------------------------------


class CoincidentLambda(LabError):
    """Pencil parameters must be pairwise distinct for a smooth intersection."""


class NoRealPointsFound(LabError):
    """Real-point sampling exhausted its budget without finding any point."""


class SingularPoint(LabError):
    """Jacobian of the two quadrics drops rank at a sampled point."""
