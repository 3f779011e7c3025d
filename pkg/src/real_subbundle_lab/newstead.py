"""The moduli space as an intersection of two quadrics in P^5, with its
real forms.

For a curve with Weierstrass x-values lambda_1..lambda_6, the moduli space of
rank-2 bundles with fixed odd determinant is the base locus of the pencil

    Q0(x) = x_1^2 + ... + x_6^2,      Q1(x) = lambda_1 x_1^2 + ... + lambda_6 x_6^2

in P^5.  Conjugating coordinates along the permutation sigma that swaps
conjugate lambda-pairs preserves the pencil, and twisting by signs gives the
candidate real structures  s_eps(x)_i = eps_i * conj(x_{sigma(i)}).  Only the
classes with eps_i * eps_{sigma(i)} = +1 are involutions of P^5 (the others
are fixed-point free), and their fixed loci are parametrized by real
6-vectors t through an explicit complex-linear map x = T t, under which both
quadrics restrict to real quadratic forms t^T M_r t.

Real points are sampled by slicing with random real projective 2-planes:
restricted to a plane the two quadrics become conics, a degenerate member of
the conic pencil (real root of a cubic determinant via companion-matrix root
finding) splits into two lines, and intersecting those lines with another
pencil member yields up to four points, refined by a Gauss-Newton polish.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import product

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components, minimum_spanning_tree

from .curve import RealHyperellipticCurve
from .errors import CoincidentLambda, NoRealPointsFound, SingularPoint

_RESIDUAL_BOUND = 1.0e-9
_SMOOTH_THRESHOLD = 1.0e-6


@dataclass(frozen=True)
class QuadricPencil:
    """Diagonal pencil data: the six lambda values (reals first, conjugate
    pairs adjacent with positive imaginary part first)."""

    lambdas: tuple[complex, ...]
    n_real: int

    def swap_permutation(self) -> tuple[int, ...]:
        perm = list(range(6))
        i = self.n_real
        while i < 6:
            perm[i], perm[i + 1] = i + 1, i
            i += 2
        return tuple(perm)

    def quadric_values(self, x: np.ndarray) -> tuple[complex, complex]:
        sq = np.asarray(x, dtype=complex) ** 2
        return complex(sq.sum()), complex(np.dot(np.array(self.lambdas), sq))


def pencil_from_lambdas(lambdas, n_real: int, tol: float = 1.0e-9) -> QuadricPencil:
    values = tuple(complex(v) for v in lambdas)
    if len(values) != 6:
        raise ValueError("a pencil needs exactly six lambda values")
    scale = 1.0 + max(abs(v) for v in values)
    for i in range(6):
        for j in range(i + 1, 6):
            if abs(values[i] - values[j]) <= 1.0e3 * tol * scale:
                raise CoincidentLambda(
                    f"lambda values {values[i]:.6g} and {values[j]:.6g} coincide"
                )
    return QuadricPencil(lambdas=values, n_real=n_real)


def build_pencil(curve: RealHyperellipticCurve) -> QuadricPencil:
    """Pencil attached to a curve: lambdas are its Weierstrass x-values."""
    return pencil_from_lambdas(
        curve.roots, curve.n_real_roots, tol=curve.equality_tolerance
    )


# --------------------------------------------------------------------------
# real forms


@dataclass(frozen=True, eq=False)
class RealForm:
    """One involution class: sign vector eps (first entry normalized to +1),
    the conjugation permutation, the parametrization x = T t of the fixed
    locus, and the restricted real quadratic forms M0, M1."""

    epsilon: tuple[int, ...]
    swap: tuple[int, ...]
    t_map: np.ndarray  # 6x6 complex: columns map real parameters to C^6
    m0: np.ndarray  # 6x6 real symmetric
    m1: np.ndarray

    def involution(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=complex)
        return np.array(
            [self.epsilon[i] * np.conj(x[self.swap[i]]) for i in range(6)]
        )

    def embed(self, t: np.ndarray) -> np.ndarray:
        """Complex coordinates of a real parameter vector."""
        return self.t_map @ np.asarray(t, dtype=float)

    def restricted_values(self, t: np.ndarray) -> tuple[float, float]:
        t = np.asarray(t, dtype=float)
        return float(t @ self.m0 @ t), float(t @ self.m1 @ t)

    def gradient(self, r: int, t: np.ndarray) -> np.ndarray:
        m = self.m0 if r == 0 else self.m1
        return 2.0 * (m @ np.asarray(t, dtype=float))


def enumerate_real_forms(pencil: QuadricPencil) -> list[RealForm]:
    """All involution classes of the pencil, eps modulo global sign.

    eps vectors violating eps_i * eps_{sigma(i)} = +1 define anti-involutions
    of P^5 without fixed points and are excluded.
    """
    swap = pencil.swap_permutation()
    lam = np.array(pencil.lambdas)
    forms = []
    for eps in product((1, -1), repeat=6):
        if eps[0] != 1:
            continue
        if any(eps[i] * eps[swap[i]] != 1 for i in range(6)):
            continue
        t_map = _parametrization(eps, swap)
        m0 = _restrict(t_map, np.ones(6))
        m1 = _restrict(t_map, lam)
        forms.append(
            RealForm(epsilon=eps, swap=swap, t_map=t_map, m0=m0, m1=m1)
        )
    return forms


def _parametrization(eps, swap) -> np.ndarray:
    t_map = np.zeros((6, 6), dtype=complex)
    i = 0
    while i < 6:
        if swap[i] == i:
            t_map[i, i] = 1.0 if eps[i] == 1 else 1.0j
            i += 1
        else:
            j = swap[i]
            t_map[i, i] = 1.0
            t_map[i, j] = 1.0j
            t_map[j, i] = eps[i]
            t_map[j, j] = -1.0j * eps[i]
            i += 2
    return t_map


def _restrict(t_map: np.ndarray, weights: np.ndarray) -> np.ndarray:
    gram = t_map.T @ np.diag(weights) @ t_map
    if np.max(np.abs(gram.imag)) > 1.0e-12 * (1.0 + np.max(np.abs(gram.real))):
        raise ValueError("restricted quadric failed to be real")
    m = gram.real
    return 0.5 * (m + m.T)


# --------------------------------------------------------------------------
# sampling by plane sections


def sample_real_points(
    form: RealForm,
    count: int,
    rng: np.random.Generator,
    budget: int = 4000,
) -> list[np.ndarray]:
    """Up to ``count`` unit vectors t with both restricted quadrics vanishing
    to within 1e-9.  Raises NoRealPointsFound when the budget is exhausted
    with nothing found (e.g. a definite restricted form)."""
    points: list[np.ndarray] = []
    for _ in range(budget):
        plane = np.linalg.qr(rng.standard_normal((6, 3))).Q
        for t in _plane_section(form, plane):
            if all(_proj_dist(t, s) > 1.0e-6 for s in points):
                points.append(t)
                if len(points) >= count:
                    return points
    if not points:
        raise NoRealPointsFound(
            "no real points found within the plane-section budget"
        )
    return points


def _proj_dist(a: np.ndarray, b: np.ndarray) -> float:
    return min(float(np.linalg.norm(a - b)), float(np.linalg.norm(a + b)))


def _plane_section(form: RealForm, plane: np.ndarray) -> list[np.ndarray]:
    a0 = plane.T @ form.m0 @ plane
    a1 = plane.T @ form.m1 @ plane
    # coefficients of det(a0 + mu*a1), a cubic in mu, from four evaluations
    mus = np.array([0.0, 1.0, -1.0, 2.0])
    dets = [np.linalg.det(a0 + mu * a1) for mu in mus]
    coeffs = np.linalg.solve(np.vander(mus, 4, increasing=True), dets)
    poly = coeffs[::-1]  # descending for np.roots
    if abs(poly[0]) < 1.0e-14 * (1.0 + max(abs(c) for c in poly)):
        poly = poly[1:]
    roots = [r for r in np.roots(poly) if abs(r.imag) <= 1.0e-9 * (1.0 + abs(r))]
    out: list[np.ndarray] = []
    for mu in roots:
        out.extend(_split_and_intersect(form, plane, a0, a1, float(mu.real)))
    return out


def _split_and_intersect(form, plane, a0, a1, mu) -> list[np.ndarray]:
    d = a0 + mu * a1
    evals, evecs = np.linalg.eigh(d)
    order = np.argsort(np.abs(evals))
    kernel = evecs[:, order[0]]
    va, vb = evecs[:, order[1]], evecs[:, order[2]]
    nu_a, nu_b = evals[order[1]], evals[order[2]]
    if abs(nu_a) < 1.0e-12 * (1.0 + abs(nu_b)):
        return []  # rank <= 1: double line, tangent slice
    # other pencil member for the line intersection, away from the root
    best, best_det = None, -1.0
    for m in (0.0, 1.0, -1.0, 2.0, 3.0):
        e = a0 + m * a1
        det = abs(np.linalg.det(e))
        if det > best_det:
            best, best_det = e, det
    candidates = []
    for sign in (1.0, -1.0):
        ratio = sign * np.emath.sqrt(-nu_b / nu_a)
        q = ratio * va + vb  # direction of one line of the split conic
        candidates.extend(_line_conic_points(kernel, q, best))
    out = []
    for x in candidates:
        t = _realify(plane @ x)
        if t is None:
            continue
        t = _polish(form, t)
        if t is not None:
            out.append(t)
    return out


def _line_conic_points(p, q, conic) -> list[np.ndarray]:
    c2 = q @ conic @ q
    c1 = 2.0 * (p @ conic @ q)
    c0 = p @ conic @ p
    scale = max(abs(c2), abs(c1), abs(c0), 1.0e-300)
    if abs(c2) <= 1.0e-13 * scale:
        if abs(c1) <= 1.0e-13 * scale:
            return []
        return [p + (-c0 / c1) * q, np.asarray(q, dtype=complex)]
    disc = np.emath.sqrt(c1 * c1 - 4.0 * c2 * c0)
    return [p + ((-c1 + disc) / (2.0 * c2)) * q, p + ((-c1 - disc) / (2.0 * c2)) * q]


def _realify(u: np.ndarray) -> np.ndarray | None:
    norm = np.linalg.norm(u)
    if norm == 0.0:
        return None
    u = u / norm
    phase = u[int(np.argmax(np.abs(u)))]
    u = u * (np.conj(phase) / abs(phase))
    if np.linalg.norm(u.imag) > 1.0e-6:
        return None
    t = u.real
    return t / np.linalg.norm(t)


def _polish(form: RealForm, t: np.ndarray) -> np.ndarray | None:
    """Two Gauss-Newton steps on (q0, q1) along the unit sphere."""
    for _ in range(3):
        f = np.array(form.restricted_values(t))
        jac = np.vstack([form.gradient(0, t), form.gradient(1, t)])
        step, *_ = np.linalg.lstsq(jac, f, rcond=None)
        t = t - step
        n = np.linalg.norm(t)
        if n == 0.0:
            return None
        t = t / n
    q0, q1 = form.restricted_values(t)
    s0 = np.linalg.norm(form.m0)
    s1 = np.linalg.norm(form.m1)
    if abs(q0) / s0 > _RESIDUAL_BOUND or abs(q1) / s1 > _RESIDUAL_BOUND:
        return None
    return t


# --------------------------------------------------------------------------
# smoothness and connectivity diagnostics


@dataclass(frozen=True)
class SmoothnessReport:
    singular_values: tuple[float, float]
    rank: int


def smoothness_check(form: RealForm, t: np.ndarray) -> SmoothnessReport:
    """Rank of the 2x6 Jacobian of (q0, q1) at a unit point; raises
    SingularPoint when the second singular value drops to 1e-6."""
    t = np.asarray(t, dtype=float)
    t = t / np.linalg.norm(t)
    jac = np.vstack([form.gradient(0, t), form.gradient(1, t)])
    svals = np.linalg.svd(jac, compute_uv=False)
    if svals[1] <= _SMOOTH_THRESHOLD:
        raise SingularPoint(
            f"Jacobian second singular value {svals[1]:.3e} at a sampled point"
        )
    return SmoothnessReport(singular_values=(float(svals[0]), float(svals[1])), rank=2)


@dataclass(frozen=True)
class ConnectednessEstimate:
    components: int
    n_points: int
    edge_threshold: float
    note: str = "single-linkage estimate on samples: weak evidence only"


def connectedness_probe(points: list[np.ndarray], gap_factor: float = 2.5) -> ConnectednessEstimate:
    """Estimate component count by single linkage with an adaptive gap cut.

    Distances are antipodal-aware (points live in projective space).  The
    spanning tree of the sample is cut at edges longer than ``gap_factor``
    times the median tree edge; on a well-sampled locus the within-component
    edges concentrate near the sampling density while genuine gaps between
    components stand out by a large factor.
    """
    n = len(points)
    if n < 2:
        return ConnectednessEstimate(components=n, n_points=n, edge_threshold=0.0)
    pts = np.array(points)
    direct = np.linalg.norm(pts[:, None, :] - pts[None, :, :], axis=2)
    flipped = np.linalg.norm(pts[:, None, :] + pts[None, :, :], axis=2)
    dist = np.minimum(direct, flipped)
    tree = minimum_spanning_tree(csr_matrix(dist)).toarray()
    edges = tree[tree > 0.0]
    cutoff = gap_factor * float(np.median(edges))
    kept = csr_matrix(np.where((tree > 0.0) & (tree <= cutoff), tree, 0.0))
    n_comp, _ = connected_components(kept, directed=False)
    return ConnectednessEstimate(
        components=int(n_comp), n_points=n, edge_threshold=cutoff
    )


def quadrant_split_pairs(form: RealForm) -> list[tuple[int, int]]:
    """Certificates that the real locus is disconnected (diagonal forms only).

    For a diagonal restricted pencil, if the squares t_i^2 and t_j^2 are both
    strictly positive linear combinations of the remaining four squares on the
    locus, then t_i and t_j never vanish there; the four sign quadrants pair
    up under the antipodal map into two nonempty closed pieces, so the locus
    has at least two components.  Returns all such index pairs (empty when
    the criterion does not apply or certifies nothing).
    """
    d0 = np.diag(form.m0).copy()
    d1 = np.diag(form.m1).copy()
    if not (np.allclose(form.m0, np.diag(d0)) and np.allclose(form.m1, np.diag(d1))):
        return []
    pairs = []
    for i in range(6):
        for j in range(i + 1, 6):
            a = np.array([[d0[i], d0[j]], [d1[i], d1[j]]])
            if abs(np.linalg.det(a)) < 1.0e-9:
                continue
            others = [k for k in range(6) if k not in (i, j)]
            b = -np.array([[d0[k] for k in others], [d1[k] for k in others]])
            coef = np.linalg.solve(a, b)
            if np.all(coef > 1.0e-9):
                pairs.append((i, j))
    return pairs
