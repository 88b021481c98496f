"""Arbitrary-precision modular forms: E4, E6, Delta, j, class polynomials.

Coefficients of all q-expansions are exact integers (divisor sums, and the
discriminant series extracted from (E4^3 - E6^2)/1728 by exact division);
floating point enters only at evaluation time, inside an explicit working
precision chosen from rigorous tail bounds after reducing the argument to
the fundamental domain.  On top of j sit Hilbert class polynomials with a
rounding-residual gate and the algebraic-integer certificate for attractor
points.
"""

from __future__ import annotations

import json
import math
import os
import sys
import tempfile
from dataclasses import dataclass
from typing import NamedTuple, Optional

import mpmath as mp

from .arith import QuadraticSurd, class_group_forms, squarefree_decompose
from .attractor import AttractorPoint, ChargeData, attractor_point
from .errors import (
    InvalidDiscriminant,
    NotUpperHalfPlane,
    OutOfRange,
    PrecisionExhausted,
    RoundingFailed,
    UnsupportedWeight,
)

__all__ = [
    "QSeries",
    "JEvaluation",
    "HCPResult",
    "CMCertificate",
    "eisenstein_series",
    "delta_series",
    "reduce_to_fundamental",
    "j_value",
    "j_value_with_bound",
    "hilbert_class_polynomial",
    "hcp_heuristic_bits",
    "certify_attractor_cm",
    "load_hcp_cache",
    "store_hcp_cache",
]


@dataclass(frozen=True)
class QSeries:
    """Truncated q-expansion with exact integer coefficients, index n = q^n."""

    weight: int
    coefficients: tuple
    truncation_order: int

    def __post_init__(self):
        assert len(self.coefficients) == self.truncation_order + 1


def _sigma_table(power: int, n_max: int) -> list[int]:
    out = [0] * (n_max + 1)
    for d in range(1, n_max + 1):
        dp = d**power
        for m in range(d, n_max + 1, d):
            out[m] += dp
    return out


def _poly_mul(p: list[int], q: list[int], n_max: int) -> list[int]:
    out = [0] * (n_max + 1)
    for i, pi in enumerate(p):
        if pi:
            for j, qj in enumerate(q[: n_max + 1 - i]):
                if qj:
                    out[i + j] += pi * qj
    return out


_cache: dict = {"N": -1, "e4": [], "e6": [], "delta": []}


def _integer_coefficients(n_max: int):
    """Exact coefficient lists (e4, e6, delta) through q^n_max, cached."""
    if _cache["N"] < n_max:
        s3 = _sigma_table(3, n_max)
        s5 = _sigma_table(5, n_max)
        e4 = [1] + [240 * s3[n] for n in range(1, n_max + 1)]
        e6 = [1] + [-504 * s5[n] for n in range(1, n_max + 1)]
        e4sq = _poly_mul(e4, e4, n_max)
        e4cu = _poly_mul(e4sq, e4, n_max)
        e6sq = _poly_mul(e6, e6, n_max)
        delta = []
        for a, b in zip(e4cu, e6sq):
            num = a - b
            assert num % 1728 == 0
            delta.append(num // 1728)
        assert delta[0] == 0 and delta[1] == 1
        _cache.update(N=n_max, e4=e4, e6=e6, delta=delta)
    cut = n_max + 1
    return _cache["e4"][:cut], _cache["e6"][:cut], _cache["delta"][:cut]


def eisenstein_series(k: int, N: int) -> QSeries:
    """E4 or E6 through q^N, constant term 1, exact divisor-sum coefficients."""
    if k not in (4, 6):
        raise UnsupportedWeight(f"only weights 4 and 6 are supported, got {k}")
    if N < 1:
        raise OutOfRange(f"truncation order must be >= 1, got {N}")
    e4, e6, _ = _integer_coefficients(N)
    return QSeries(weight=k, coefficients=tuple(e4 if k == 4 else e6), truncation_order=N)


def delta_series(N: int) -> QSeries:
    """The discriminant cusp form (E4^3 - E6^2)/1728 through q^N, exact integers."""
    if N < 1:
        raise OutOfRange(f"truncation order must be >= 1, got {N}")
    _, _, delta = _integer_coefficients(N)
    return QSeries(weight=12, coefficients=tuple(delta), truncation_order=N)


def reduce_to_fundamental(tau, prec: int = 256):
    """Map tau into |Re| <= 1/2, |tau| >= 1; returns (tau', matrix).

    The matrix ((a,b),(c,d)) has determinant 1 and tau' = (a*tau+b)/(c*tau+d),
    applied once at full precision after the step sequence is known.
    """
    wp = prec + 16
    with mp.workprec(wp):
        z0 = mp.mpc(tau)
        if mp.im(z0) <= 0:
            raise NotUpperHalfPlane(f"Im tau = {mp.im(z0)} <= 0")
        eps = mp.mpf(2) ** (-(wp - 12))
        a, b, c, d = 1, 0, 0, 1
        z = z0
        for _ in range(20_000):
            n = int(mp.nint(mp.re(z)))
            if n != 0:
                z -= n
                a, b = a - n * c, b - n * d
            if mp.re(z) ** 2 + mp.im(z) ** 2 < 1 - eps:
                z = -1 / z
                a, b, c, d = -c, -d, a, b
                continue
            break
        else:
            raise PrecisionExhausted("fundamental-domain reduction did not settle")
        zf = (a * z0 + b) / (c * z0 + d)
        return mp.mpc(zf), ((a, b), (c, d))


def _truncation_order(mag_bits: float, tail_bits: int) -> int:
    """Smallest N with 6000*(N+1)^7*|q|^(N+1)/0.36 below 2^-tail_bits.

    Valid because every coefficient of E4, E6 and Delta is bounded by
    2000*n^7 and |q| <= e^(-pi*sqrt(3)) after reduction, which makes the
    term ratio at most 0.56.
    """
    n = 4
    while n < 250_000:
        if 14.2 + 7 * math.log2(n + 1.0) - (n + 1) * mag_bits <= -tail_bits:
            return n
        n += max(4, n // 4)
    raise PrecisionExhausted("tail bound unreachable at any tractable truncation order")


def _horner(coeffs, q):
    acc = mp.mpf(0)
    for cn in reversed(coeffs):
        acc = acc * q + cn
    return acc


class JEvaluation(NamedTuple):
    """j(tau) with interval-style error data from one series evaluation."""

    j: mp.mpc
    error_bound: mp.mpf
    delta: mp.mpc
    delta_lower: mp.mpf   # certified |Delta| > error: nonvanishing witness
    truncation_order: int
    working_prec: int


def _render(tau, prec: int):
    """Input tau at the requested precision; surds re-render exactly."""
    if isinstance(tau, QuadraticSurd):
        return tau.to_mpc(prec)
    with mp.workprec(prec):
        return mp.mpc(tau)


def _evaluate_j(tau_src, prec: int) -> JEvaluation:
    """Evaluate j after fundamental-domain reduction, with a propagated bound.

    Two passes: a scouting reduction fixes the matrix and the reduced height
    (hence the magnitude of 1/q), then the input is re-rendered and mapped at
    a working precision scaled to that magnitude.
    """
    z1 = _render(tau_src, prec + 80)
    if mp.im(z1) <= 0:
        raise NotUpperHalfPlane(f"Im tau = {mp.im(z1)} <= 0")
    zr1, mat = reduce_to_fundamental(z1, prec + 64)
    y = float(mp.im(zr1))
    mag = 2 * math.pi * y * math.log2(math.e)  # bits in 1/|q|
    wp = prec + 2 * math.ceil(mag) + 96
    if wp > 10_000_000:
        raise PrecisionExhausted(f"required working precision {wp} bits is intractable")
    N = _truncation_order(mag, wp - 64)
    e4c, e6c, dc = _integer_coefficients(N)
    (a, b), (cc, d) = mat
    with mp.workprec(wp):
        z = _render(tau_src, wp)
        zred = (a * z + b) / (cc * z + d)
        q = mp.expjpi(2 * zred)
        x = abs(q)
        e4 = _horner(e4c, q)
        e6 = _horner(e6c, q)
        dv = _horner(dc, q)
        tail = 6000 * mp.mpf(N + 1) ** 7 * x ** (N + 1) / mp.mpf("0.36")
        eps = mp.mpf(2) ** (-wp)
        # Horner partial sums are bounded by the coefficient sum 2000*(N+1)^8
        round_err = 12000 * eps * mp.mpf(N + 1) ** 8
        d4 = tail + round_err
        d6 = tail + round_err
        dd = tail + round_err
        dv_abs = abs(dv)
        if not dv_abs > dd:
            raise PrecisionExhausted("cannot certify Delta away from zero")
        e43 = e4**3
        jv = e43 / dv
        d43 = mp.mpf("3.3") * abs(e4) ** 2 * d4
        dj = d43 / dv_abs + abs(e43) * dd / dv_abs**2 * mp.mpf("1.1") \
            + abs(jv) * eps * (64 + 4 * N + 8 * int(abs(zred)))
        if not dj < mp.mpf(2) ** (-(prec // 2)):
            raise PrecisionExhausted(
                f"j error bound {mp.nstr(dj, 5)} misses 2^-{prec // 2} target")
        return JEvaluation(
            j=jv,
            error_bound=dj,
            delta=dv,
            delta_lower=dv_abs - dd,
            truncation_order=N,
            working_prec=wp,
        )


def j_value_with_bound(tau, prec: int = 256) -> JEvaluation:
    """j(tau) plus the certified absolute error bound (below 2^(-prec/2))."""
    if prec < 64:
        raise OutOfRange(f"precision must be at least 64 bits, got {prec}")
    return _evaluate_j(tau, prec)


def j_value(tau, prec: int = 256):
    """The modular j-invariant at tau, absolute error below 2^(-prec/2)."""
    ev = j_value_with_bound(tau, prec)
    with mp.workprec(prec):
        return +ev.j


def hcp_heuristic_bits(disc: int) -> int:
    """Working precision guess for the class polynomial of disc; gate-validated."""
    h = len(class_group_forms(disc))
    bits = math.pi * math.sqrt(abs(disc)) * h / math.log(2)
    return max(256, math.ceil(bits) + 64 * h)


@dataclass(frozen=True)
class HCPResult:
    """Class polynomial with the rounding residual that certifies it."""

    disc: int
    coeffs: tuple          # ascending degree, exact integers, monic
    residual: float
    class_number: int
    precision_bits: int

    def polynomial_value(self, x):
        acc = mp.mpf(0)
        for cn in reversed(self.coeffs):
            acc = acc * x + cn
        return acc


def hilbert_class_polynomial(disc: int, prec: Optional[int] = None) -> HCPResult:
    """Monic integer polynomial whose roots are j of the reduced forms of disc.

    Coefficients are recovered by rounding a floating product; the maximum
    rounding residual is reported and must stay below 0.25, otherwise the
    caller should retry with more precision.
    """
    if disc >= 0 or disc % 4 not in (0, 1):
        raise InvalidDiscriminant(f"need disc < 0 and disc = 0,1 mod 4, got {disc}")
    forms = class_group_forms(disc)
    h = len(forms)
    wp = prec if prec is not None else hcp_heuristic_bits(disc)
    roots = []
    for f in forms:
        root = QuadraticSurd(-f.b, 1, 2 * f.a, disc)
        roots.append(j_value_with_bound(root, 2 * wp).j)
    with mp.workprec(2 * wp + 32):
        poly = [mp.mpc(1)]
        for r in roots:
            nxt = [mp.mpc(0)] * (len(poly) + 1)
            for i, ci in enumerate(poly):
                nxt[i] += -r * ci
                nxt[i + 1] += ci
            poly = nxt
        coeffs = []
        residual = mp.mpf(0)
        for cv in poly:
            nearest = mp.nint(mp.re(cv))
            residual = max(residual, abs(mp.re(cv) - nearest), abs(mp.im(cv)))
            coeffs.append(int(nearest))
    if not residual < 0.25:
        raise RoundingFailed(
            f"rounding residual {mp.nstr(residual, 5)} >= 0.25 for disc {disc}; "
            f"retry with precision above {wp} bits")
    assert coeffs[-1] == 1 and len(coeffs) == h + 1
    return HCPResult(
        disc=disc,
        coeffs=tuple(coeffs),
        residual=float(residual),
        class_number=h,
        precision_bits=wp,
    )


def _field_discriminant(D: int) -> int:
    """Fundamental discriminant of Q(sqrt(D)) for D < 0."""
    _, core = squarefree_decompose(D)
    return core if core % 4 == 1 else 4 * core


@dataclass(frozen=True)
class CMCertificate:
    """Numeric witness that j of an attractor point is an algebraic integer.

    The class polynomial of the form discriminant 4D, evaluated at j(tau) at
    high precision, must vanish to within tolerance 2^(-prec/4); conductor
    and field label record which class field the value generates.
    """

    charge: ChargeData
    point: AttractorPoint
    disc: int
    field_disc: int
    conductor: int
    field_label: str
    class_number: int
    j: mp.mpc
    hcp: HCPResult
    value: float           # |H_4D(j(tau))|
    error_bound: float     # propagated evaluation error on that value
    tolerance: float
    precision_bits: int

    @property
    def passed(self) -> bool:
        return self.value + self.error_bound < self.tolerance


def certify_attractor_cm(c: ChargeData, prec: int = 256) -> CMCertificate:
    """Certify |H_4D(j(tau_pq))| < 2^(-prec/4) for the attractor point of c."""
    if prec < 64:
        raise OutOfRange(f"precision must be at least 64 bits, got {prec}")
    at = attractor_point(c)
    disc = 4 * at.D
    hcp = hilbert_class_polynomial(disc)
    wp = 2 * hcp_heuristic_bits(disc) + prec
    ev = j_value_with_bound(at.tau, wp)
    with mp.workprec(wp + 32):
        value = abs(hcp.polynomial_value(ev.j))
        dcoeffs = [n * cn for n, cn in enumerate(hcp.coeffs)][1:]
        deriv = abs(_horner(dcoeffs, ev.j))
        h = hcp.class_number
        eps = mp.mpf(2) ** (-(wp + 32))
        scale = max(mp.mpf(1), abs(ev.j)) ** h * max(abs(cn) for cn in hcp.coeffs)
        err = deriv * ev.error_bound + (4 * h + 8) * scale * eps
        tol = mp.mpf(2) ** (-(prec // 4))
        field_disc = _field_discriminant(at.D)
        f2 = disc // field_disc
        conductor = math.isqrt(f2)
        assert conductor * conductor == f2
        with mp.workprec(prec):
            j_out = +ev.j
        return CMCertificate(
            charge=c,
            point=at,
            disc=disc,
            field_disc=field_disc,
            conductor=conductor,
            field_label="Hilbert class field" if conductor == 1 else "ring class field",
            class_number=h,
            j=j_out,
            hcp=hcp,
            value=float(value),
            error_bound=float(err),
            tolerance=float(tol),
            precision_bits=prec,
        )


def load_hcp_cache(path) -> dict[int, tuple]:
    """Read the class-polynomial cache; any corruption voids the whole file."""
    try:
        with open(path) as fh:
            raw = json.load(fh)
        out = {}
        for rec in raw:
            disc = int(rec["disc"])
            coeffs = tuple(int(s) for s in rec["coeffs"])
            if not coeffs or coeffs[-1] != 1:
                raise ValueError(f"cache record for {disc} is not monic")
            out[disc] = coeffs
        return out
    except FileNotFoundError:
        return {}
    except (OSError, ValueError, KeyError, TypeError) as exc:
        print(f"warning: ignoring unreadable hcp cache {path}: {exc}", file=sys.stderr)
        return {}


def store_hcp_cache(path, cache: dict[int, tuple]):
    """Atomically rewrite the cache file (temp file + rename)."""
    records = [
        {"disc": str(disc), "coeffs": [str(c) for c in cache[disc]]}
        for disc in sorted(cache, reverse=True)
    ]
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            json.dump(records, fh, indent=1)
            fh.write("\n")
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
