"""Resolution combinatorics and Fermat-variety dimension bookkeeping.

Hirzebruch-Jung continued fractions resolve cyclic surface singularities;
their step counts feed the H^2/H^3 contributions of resolved singular curves
in a Calabi-Yau threefold.  Character counts on Fermat hypersurfaces supply
an exact oracle for both sides of the inductive Shioda-Katsura dimension
identity relating X^(r+s) to the mu_d-invariants of X^r x X^s.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import InvalidStep, NotCoprime, OutOfRange, UnsupportedRange

__all__ = [
    "HJResolution",
    "SingularCurveDatum",
    "SKCheck",
    "hj_expand",
    "hj_reconstruct",
    "resolution_contributions",
    "fermat_primitive_dim",
    "fermat_hodge_numbers",
    "shioda_katsura_check",
]


@dataclass(frozen=True)
class HJResolution:
    """Cyclic singularity type (n, q) with its all->=2 continued fraction."""

    n: int
    q: int
    steps: tuple[int, ...]

    @property
    def num_spheres(self) -> int:
        return len(self.steps)


def hj_expand(n: int, q: int) -> HJResolution:
    """Expand n/q as b1 - 1/(b2 - 1/(...)) with every bi >= 2."""
    if not (1 <= q < n):
        raise OutOfRange(f"need 1 <= q < n, got (n,q)=({n},{q})")
    if math.gcd(n, q) != 1:
        raise NotCoprime(f"({n},{q}) not coprime")
    steps = []
    a, b = n, q
    while b > 0:
        step = -(-a // b)  # ceil(a/b)
        steps.append(step)
        a, b = b, step * b - a
    res = HJResolution(n=n, q=q, steps=tuple(steps))
    assert all(s >= 2 for s in res.steps)
    return res


def hj_reconstruct(steps) -> Fraction:
    """Exact value of the continued fraction [b1,...,bs]; inverse of hj_expand."""
    steps = list(steps)
    if not steps or any(b < 2 for b in steps):
        raise InvalidStep(f"steps must be a nonempty all->=2 list, got {steps}")
    val = Fraction(steps[-1])
    for b in reversed(steps[:-1]):
        val = b - 1 / val
    return val


@dataclass(frozen=True)
class SingularCurveDatum:
    """A genus-g curve of A-type singularities (n, q) inside the threefold."""

    genus: int
    n: int
    q: int

    def __post_init__(self):
        if self.genus < 0:
            raise OutOfRange(f"genus must be >= 0, got {self.genus}")
        if not (1 <= self.q < self.n):
            raise OutOfRange(f"need 1 <= q < n, got ({self.n},{self.q})")
        if math.gcd(self.n, self.q) != 1:
            raise NotCoprime(f"({self.n},{self.q}) not coprime")


def resolution_contributions(curves) -> tuple[int, int]:
    """(delta_h2, delta_h3): each curve adds s classes to H^2 and g*s to H^3."""
    delta_h2 = 0
    delta_h3 = 0
    for datum in curves:
        if not isinstance(datum, SingularCurveDatum):
            datum = SingularCurveDatum(*datum)
        s = hj_expand(datum.n, datum.q).num_spheres
        delta_h2 += s
        delta_h3 += datum.genus * s
    return delta_h2, delta_h3


def _tuple_counts(d: int, k: int) -> list[int]:
    """counts[j] = #{(a_1..a_k) in [1,d-1]^k : sum = j mod d}, by cyclic convolution."""
    base = [0] + [1] * (d - 1)
    counts = [1] + [0] * (d - 1)  # empty tuple
    for _ in range(k):
        nxt = [0] * d
        for i, ci in enumerate(counts):
            if ci:
                for j, bj in enumerate(base):
                    if bj:
                        nxt[(i + j) % d] += ci
        counts = nxt
    return counts


def fermat_primitive_dim(d: int, n: int) -> int:
    """Primitive middle cohomology dimension of the degree-d Fermat n-fold.

    Counts character vectors (a_0..a_{n+1}), entries in [1, d-1], summing to
    0 mod d; exact integer convolution.
    """
    if d < 2 or n < 0:
        raise OutOfRange(f"need d >= 2 and n >= 0, got ({d},{n})")
    return _tuple_counts(d, n + 2)[0]


def fermat_hodge_numbers(d: int, n: int) -> tuple[int, ...]:
    """Character counts of the primitive middle cohomology graded by weight.

    Entry w-1 counts vectors with sum exactly w*d, w = 1..n+1 (the Hodge
    grading h^(n+1-w, w-1)_prim); the total is fermat_primitive_dim(d, n).
    """
    if d < 2 or n < 0:
        raise OutOfRange(f"need d >= 2 and n >= 0, got ({d},{n})")
    k = n + 2
    # coefficients of (x + ... + x^(d-1))^k, plain (non-cyclic) convolution
    poly = [1]
    for _ in range(k):
        nxt = [0] * (len(poly) + d - 1)
        for i, ci in enumerate(poly):
            if ci:
                for j in range(1, d):
                    nxt[i + j] += ci
        poly = nxt
    out = tuple(poly[w * d] if w * d < len(poly) else 0 for w in range(1, n + 2))
    assert sum(out) == fermat_primitive_dim(d, n)
    return out


def _char_dims(d: int, m: int, i: int) -> list[int]:
    """dims[c] = multiplicity of the mu_d-character c in H^i of the Fermat m-fold.

    The action scales the last homogeneous coordinate; an eigenclass with
    character vector a has character a_{m+1} != 0, and algebraic hyperplane
    classes in even degrees carry character 0.  The 0-fold (d points) comes
    out as one class per residue, as it must.
    """
    dims = [0] * d
    if i < 0 or i > 2 * m or i % 2 == 1 and i != m:
        return dims
    if i % 2 == 0 and i != m:
        dims[0] = 1
        return dims
    # middle degree
    counts = _tuple_counts(d, m + 1)
    for c in range(1, d):
        dims[c] = counts[(-c) % d]
    if m % 2 == 0:
        dims[0] += 1
    return dims


def _betti(d: int, m: int, i: int) -> int:
    return sum(_char_dims(d, m, i))


@dataclass(frozen=True)
class SKCheck:
    """Dimension-level verification record for the inductive Fermat identity."""

    d: int
    r: int
    s: int
    lhs_total: int
    rhs_total: int
    lhs_terms: tuple
    rhs_terms: tuple

    @property
    def equal(self) -> bool:
        return self.lhs_total == self.rhs_total


def shioda_katsura_check(d: int, r: int, s: int) -> SKCheck:
    """Compare total dimensions of both sides of the inductive identity.

    LHS: b_n(X^n) plus the Tate-twisted lower Betti numbers of X^(r-1) and
    X^(s-1) (twists preserve dimension).  RHS: the mu_d-invariant part of
    H^n(X^r x X^s), computed by Kuenneth with last-coordinate character
    pairing, plus b_(n-2)(X^(r-1) x X^(s-1)).
    """
    if d not in (3, 4, 5, 6) or r not in (1, 2) or s not in (1, 2):
        raise UnsupportedRange(f"supported: d in 3..6, r,s in {{1,2}}; got ({d},{r},{s})")
    n = r + s

    lhs_main = _betti(d, n, n)
    lhs_r = tuple(_betti(d, r - 1, n - 2 * j) for j in range(1, s + 1))
    lhs_s = tuple(_betti(d, s - 1, n - 2 * k) for k in range(1, r + 1))
    lhs_total = lhs_main + sum(lhs_r) + sum(lhs_s)

    invariant = 0
    for i in range(0, n + 1):
        left = _char_dims(d, r, i)
        right = _char_dims(d, s, n - i)
        invariant += sum(left[c] * right[(-c) % d] for c in range(d))
    product_term = sum(
        _betti(d, r - 1, i) * _betti(d, s - 1, n - 2 - i) for i in range(0, n - 1)
    )
    rhs_total = invariant + product_term

    return SKCheck(
        d=d, r=r, s=s,
        lhs_total=lhs_total, rhs_total=rhs_total,
        lhs_terms=(lhs_main, lhs_r, lhs_s),
        rhs_terms=(invariant, product_term),
    )
