"""Combinatorics of maximal real line subbundles relative to a determinant.

Everything here is finite bookkeeping over odd-circle bit vectors.  Fix a
determinant type with odd-circle vector sig over n circles.  A degree-3 real
divisor supporting the extension data distributes its real points over the
circles with per-circle counts r_i; reality forces r_i = sig_i mod 2 and the
total number of real points is 3 (all real) or 1 (one real point plus a
conjugate pair).

Each real point on circle c contributes a maximal subbundle whose type
differs from sig exactly on c (one point of odd intersection is consumed),
i.e. sig XOR e_c; the distinguished section contributes the zero vector.
The number of distinct vectors over all valid configurations bounds the
count of topologically distinct maximal subbundles the determinant admits.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product

from .errors import InvalidAssignment


def _validate_sig(n: int, sig) -> tuple[int, ...]:
    sig = tuple(sig)
    if n < 1:
        raise ValueError("need at least one circle")
    if len(sig) != n:
        raise InvalidAssignment(f"signature {sig} has length != {n}")
    if any(b not in (0, 1) for b in sig):
        raise InvalidAssignment("signature bits must be 0 or 1")
    if sum(sig) % 2 != 1:
        raise InvalidAssignment("degree-1 determinant needs an odd bit total")
    return sig


def real_fiber_configs(n: int, sig) -> list[tuple[int, ...]]:
    """Per-circle real-point counts (r_1..r_n) with r_i = sig_i mod 2 and
    total 1 or 3, in lexicographic order."""
    sig = _validate_sig(n, sig)
    out = []
    for cfg in product(range(4), repeat=n):
        if sum(cfg) in (1, 3) and all(c % 2 == b for c, b in zip(cfg, sig)):
            out.append(cfg)
    return out


@dataclass(frozen=True)
class RelativeTypeReport:
    config: tuple[int, ...]
    types: tuple[tuple[int, ...], ...]  # multiset, sorted
    distinct_count: int


def relative_types(n: int, sig, config) -> RelativeTypeReport:
    """Subbundle type vectors produced by one point configuration: the zero
    vector plus sig XOR e_c for every real point on circle c."""
    sig = _validate_sig(n, sig)
    config = tuple(config)
    if config not in real_fiber_configs(n, sig):
        raise InvalidAssignment(
            f"config {config} incompatible with signature {sig} (parity/total)"
        )
    types = [tuple([0] * n)]
    for c, r in enumerate(config):
        flipped = tuple(b ^ (1 if i == c else 0) for i, b in enumerate(sig))
        types.extend([flipped] * r)
    types.sort()
    return RelativeTypeReport(
        config=config,
        types=tuple(types),
        distinct_count=len(set(types)),
    )


def max_distinct_over_configs(n: int, sig) -> int:
    """Largest distinct-type count over all valid configurations."""
    return max(
        relative_types(n, sig, cfg).distinct_count for cfg in real_fiber_configs(n, sig)
    )
