"""Constructive lattice-point existence: given exponent data on the correct
side of the condition

    gamma_p + sum_{j in J} (tau_j + gamma_j)  vs  1,
    J = { j < p : tau_j + gamma_j >= 0 },

either build a small primal form vector in the sheared box K_n (condition
<= 1) or a dual witness in the coordinate box K_Q (condition > 1 with an
eps-margin).  Both constructions carry an explicit Minkowski
volume-vs-determinant certificate, and refusals (hypotheses not certified,
or Q too small for the certificate) are first-class outcomes distinct from
search failure.

The directed searches exploit the box shape: for a fixed last coordinate
the optimal choice in each remaining coordinate is the nearest lattice
multiple, so existence reduces to a scan over the last coordinate (primal)
or over the bounded prefix coordinates (dual).  A full-enumeration oracle
cross-checks both at small sizes.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence, Union

from .numerics import (
    BallReal,
    PREC_CAP,
    TriBool,
    cmp_abs_vs_power,
    floor_scaled_power,
    tri_compare,
)
from .model import (
    Basis,
    Bound,
    ConvexBody,
    DualPoint,
    FormRecord,
    FormSequence,
    ValidationError,
)
from .criteria import BudgetExceeded, _power_bracket

__all__ = [
    "ConditionReport",
    "SearchOutcome",
    "Refusal",
    "SearchFailed",
    "ReciprocalEntry",
    "check_condition",
    "surrogate_gamma",
    "construct_primal_form",
    "construct_dual_witness",
    "reciprocal_construct",
    "directed_search_sheared",
    "directed_search_coordinate",
    "enumerate_lattice_points",
]

Rat = Union[int, Fraction]
Num = Union[int, Fraction, BallReal]


class Refusal(RuntimeError):
    """Hypotheses not certified for the requested construction."""

    def __init__(self, why: str, report: Optional["ConditionReport"] = None,
                 detail: Optional[dict] = None):
        super().__init__(why)
        self.report = report
        self.detail = detail or {}


class SearchFailed(RuntimeError):
    """Scan exhausted without a certified point (see .unknowns)."""

    def __init__(self, why: str, unknowns: int = 0):
        super().__init__(why)
        self.unknowns = unknowns


# ---------------------------------------------------------------------------
# the condition


@dataclass
class ConditionReport:
    J: tuple[int, ...]            # 1-based labels j < p with tau_j+gamma_j >= 0
    lhs: BallReal
    relation: TriBool             # TRUE: lhs > 1; FALSE: lhs <= 1; else Unknown
    unknown_j: tuple[int, ...] = ()

    def to_json(self) -> dict:
        return {"J": list(self.J),
                "lhs": self.lhs.round_to(64).to_json(),
                "relation": {"TRUE": ">1", "FALSE": "<=1",
                             "UNKNOWN": "unknown"}[self.relation.name],
                "unknown_j": list(self.unknown_j)}


def check_condition(tau: Sequence[Num], gamma: Sequence[Num],
                    prec: int = 64) -> ConditionReport:
    """Membership in J by the sign of tau_j+gamma_j (boundary zero stays in
    J), then lhs = gamma_p + sum_J (tau_j+gamma_j) compared against 1.

    All-rational input is decided exactly; ball input uses certified signs
    and any straddling entry forces relation Unknown.
    """
    p = len(gamma)
    if len(tau) != p - 1:
        raise ValidationError(f"tau must have length {p - 1}")
    if all(not isinstance(x, BallReal) for x in (*tau, *gamma)):
        taus = [Fraction(t) for t in tau]
        gammas = [Fraction(g) for g in gamma]
        J = tuple(j + 1 for j in range(p - 1) if taus[j] + gammas[j] >= 0)
        lhs = gammas[p - 1] + sum(taus[j - 1] + gammas[j - 1] for j in J)
        rel = TriBool.TRUE if lhs > 1 else TriBool.FALSE
        return ConditionReport(J=J, lhs=BallReal.exact(lhs, prec),
                               relation=rel)
    taus = [x if isinstance(x, BallReal) else BallReal.exact(Fraction(x), prec)
            for x in tau]
    gammas = [x if isinstance(x, BallReal) else BallReal.exact(Fraction(x), prec)
              for x in gamma]
    J: list[int] = []
    unknown: list[int] = []
    lhs = gammas[p - 1]
    for j in range(p - 1):
        s = taus[j] + gammas[j]
        if s.lower >= 0:
            J.append(j + 1)
            lhs = lhs + s
        elif s.upper < 0:
            pass
        else:
            unknown.append(j + 1)
    rel = TriBool.UNKNOWN if unknown else tri_compare(lhs, 1)
    return ConditionReport(J=tuple(J), lhs=lhs, relation=rel,
                           unknown_j=tuple(unknown))


# ---------------------------------------------------------------------------
# search outcomes


@dataclass
class SearchOutcome:
    kind: str                                  # "primal" | "dual"
    point: Union[tuple[int, ...], DualPoint]
    certificate: dict                          # volume, lattice_det, margin...
    diagnostics: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        pt = (self.point.to_json() if isinstance(self.point, DualPoint)
              else [str(x) for x in self.point])
        cert = {}
        for k, v in self.certificate.items():
            if isinstance(v, BallReal):
                cert[k] = v.round_to(64).to_json()
            elif isinstance(v, TriBool):
                cert[k] = v.name
            else:
                cert[k] = str(v)
        return {"kind": self.kind, "point": pt, "certificate": cert,
                "diagnostics": self.diagnostics}


def _nearest_multiple(mid: Fraction, d: int) -> int:
    """Multiple of d nearest to mid, half-ties toward zero."""
    q = mid / d
    m = math.floor(q + Fraction(1, 2))
    if q + Fraction(1, 2) == m and q > 0:
        m -= 1
    return m * d


def _cmp_abs_le(val: BallReal, b_lo: Fraction, b_hi: Fraction,
                strict: bool) -> TriBool:
    """Certified |val| <= b (or < b when strict) for b in [b_lo, b_hi]."""
    lo, hi = val.lower, val.upper
    alo = Fraction(0) if lo <= 0 <= hi else min(abs(lo), abs(hi))
    ahi = max(abs(lo), abs(hi))
    if (ahi < b_lo) or (not strict and ahi <= b_lo):
        return TriBool.TRUE
    if (alo > b_hi) or (strict and alo >= b_hi):
        return TriBool.FALSE
    return TriBool.UNKNOWN


def _signed(R: int):
    if R < 0:          # empty axis (e.g. strict zero bound): no valid entry
        return
    yield 0
    for k in range(1, R + 1):
        yield k
        yield -k


# ---------------------------------------------------------------------------
# directed searches over explicit bodies


def directed_search_sheared(body: ConvexBody, delta: Sequence[int],
                            basis: Basis, prec: int = 64,
                            budget: int = 10 ** 7
                            ) -> tuple[Optional[tuple[int, ...]], dict]:
    """First nonzero primal point of the diagonal lattice in a sheared-frame
    box, scanning x_p = 0, d_p, 2 d_p, ... and taking the nearest multiple of
    delta_j in each labelled coordinate (negating a point changes nothing, so
    only x_p >= 0 is scanned).  Unknown-at-cap candidates are skipped and
    counted in the diagnostics.
    """
    if body.frame != "sheared":
        raise ValidationError("need a sheared-frame body")
    p = basis.p
    labels = body.coords[:-1]
    if body.coords[-1] != p:
        raise ValidationError("last body coordinate must be p")
    dp = delta[p - 1]
    xp_cap = math.floor(body.bounds[-1].value.upper)
    if xp_cap // dp + 1 > budget:
        raise BudgetExceeded(xp_cap // dp + 1, budget)
    brackets = [(b.value.lower, b.value.upper, b.strict) for b in body.bounds]
    unknowns = 0
    scanned = 0
    for step in range(0, xp_cap // dp + 1):
        xp = step * dp
        scanned += 1
        okp = _cmp_abs_le(BallReal.exact(xp, prec), *brackets[-1])
        if okp is TriBool.FALSE:
            break
        if okp is TriBool.UNKNOWN:
            unknowns += 1
            continue
        if xp == 0:
            # the only candidates are single-axis points delta_j e_j; the
            # remaining coordinates sit at 0 and must pass their bounds too
            for k, j in enumerate(labels):
                ok = TriBool.TRUE
                for k2 in range(len(labels)):
                    val = delta[j - 1] if k2 == k else 0
                    c = _cmp_abs_le(BallReal.exact(val, prec), *brackets[k2])
                    if c is TriBool.FALSE:
                        ok = TriBool.FALSE
                        break
                    if c is TriBool.UNKNOWN:
                        ok = TriBool.UNKNOWN
                if ok is TriBool.TRUE:
                    point = [0] * p
                    point[j - 1] = delta[j - 1]
                    return tuple(point), {"scanned": scanned,
                                          "unknowns": unknowns}
                if ok is TriBool.UNKNOWN:
                    unknowns += 1
            continue
        point = [0] * p
        point[p - 1] = xp
        good = True
        for k, j in enumerate(labels):
            w = prec
            target = basis.xi_balls(w)[j - 1] * xp
            xj = _nearest_multiple(target.mid, delta[j - 1])
            ok = _cmp_abs_le(target - xj, *brackets[k])
            while ok is TriBool.UNKNOWN and w < PREC_CAP:
                w = min(2 * w, PREC_CAP)
                target = basis.xi_balls(w)[j - 1] * xp
                ok = _cmp_abs_le(target - xj, *brackets[k])
            if ok is TriBool.TRUE:
                point[j - 1] = xj
            else:
                if ok is TriBool.UNKNOWN:
                    unknowns += 1
                good = False
                break
        if good:
            return tuple(point), {"scanned": scanned, "unknowns": unknowns}
    return None, {"scanned": scanned, "unknowns": unknowns}


def directed_search_coordinate(body: ConvexBody, delta: Sequence[int],
                               basis: Basis, prec: int = 64,
                               budget: int = 10 ** 7
                               ) -> tuple[Optional[DualPoint], dict]:
    """First nonzero dual point (a_j in Z/delta_j) in a coordinate-frame box:
    odometer over the labelled prefix coordinates smallest-first with the
    first nonzero entry positive, and for each prefix the <= 2 nearest
    multiples of 1/delta_p to -sum a_j xi_j.  Unlabelled coordinates stay 0.
    """
    if body.frame != "coordinate":
        raise ValidationError("need a coordinate-frame body")
    p = basis.p
    labels = body.coords[:-1]
    if body.coords[-1] != p:
        raise ValidationError("last body coordinate must be p")
    dp = delta[p - 1]
    t_lo, t_hi = body.bounds[-1].value.lower, body.bounds[-1].value.upper
    t_strict = body.bounds[-1].strict
    ranges = []
    for k, j in enumerate(labels):
        b = body.bounds[k]
        R = math.floor(b.value.upper * delta[j - 1])
        if b.strict and b.value.is_exact and Fraction(R, delta[j - 1]) >= b.value.mid:
            R -= 1
        ranges.append(R)
    estimate = 2
    for R in ranges:
        estimate *= 2 * R + 1
    if estimate > budget:
        raise BudgetExceeded(estimate, budget)

    exact_xi = basis.exact_xi
    work = max(prec, 96)
    checked = 0
    unknowns = 0
    for prefix in itertools.product(*[_signed(R) for R in ranges]):
        nz = next((m for m in prefix if m != 0), None)
        if nz is not None and nz < 0:
            continue
        if exact_xi is not None:
            s = sum((Fraction(m, delta[j - 1]) * exact_xi[j - 1]
                     for m, j in zip(prefix, labels)), Fraction(0))
            for kp in _two_nearest(-s, dp, nz is None):
                checked += 1
                val = BallReal.exact(s + Fraction(kp, dp), work)
                ok = _cmp_abs_le(val, t_lo, t_hi, t_strict)
                if ok is TriBool.TRUE:
                    return _dual_point(p, labels, prefix, delta, kp), \
                        {"checked": checked, "unknowns": unknowns}
                if ok is TriBool.UNKNOWN:
                    unknowns += 1
        else:
            w = work
            xb = basis.xi_balls(w)
            s = BallReal.exact(0, w)
            for m, j in zip(prefix, labels):
                if m:
                    s = s + xb[j - 1] * Fraction(m, delta[j - 1])
            for kp in _two_nearest(-s.mid, dp, nz is None):
                checked += 1
                ok = _cmp_abs_le(s + Fraction(kp, dp), t_lo, t_hi, t_strict)
                while ok is TriBool.UNKNOWN and w < PREC_CAP:
                    w = min(2 * w, PREC_CAP)
                    xb = basis.xi_balls(w)
                    s2 = BallReal.exact(0, w)
                    for m, j in zip(prefix, labels):
                        if m:
                            s2 = s2 + xb[j - 1] * Fraction(m, delta[j - 1])
                    ok = _cmp_abs_le(s2 + Fraction(kp, dp), t_lo, t_hi,
                                     t_strict)
                if ok is TriBool.TRUE:
                    return _dual_point(p, labels, prefix, delta, kp), \
                        {"checked": checked, "unknowns": unknowns}
                if ok is TriBool.UNKNOWN:
                    unknowns += 1
    return None, {"checked": checked, "unknowns": unknowns}


def _two_nearest(target: Fraction, dp: int, zero_prefix: bool) -> list[int]:
    """Indices k of the <= 2 multiples k/dp nearest to target, nearest first,
    half-ties toward zero; for the all-zero prefix k = 0 is excluded and by
    symmetry only k = 1 need be tried."""
    if zero_prefix:
        return [1]
    q = target * dp
    k0 = math.floor(q + Fraction(1, 2))
    if q + Fraction(1, 2) == k0 and q > 0:
        k0 -= 1
    k1 = k0 + 1 if q >= k0 else k0 - 1
    return [k0, k1]


def _dual_point(p: int, labels, prefix, delta, kp: int) -> DualPoint:
    a = [Fraction(0)] * p
    for m, j in zip(prefix, labels):
        a[j - 1] = Fraction(m, delta[j - 1])
    a[p - 1] = Fraction(kp, delta[p - 1])
    return DualPoint(tuple(a))


# ---------------------------------------------------------------------------
# primal construction (condition <= 1)


def construct_primal_form(xi: Basis, tau: Sequence[Rat], delta_n: Sequence[int],
                          Q_n: int, slack: Fraction = Fraction(1, 20),
                          prec: int = 64, budget: int = 10 ** 7,
                          gamma: Optional[Sequence[Num]] = None) -> SearchOutcome:
    """Nonzero (ell_1..ell_p) in the diagonal lattice with
    |ell_p xi_j - ell_j| <= Q^(-tau_j+slack) for all j and
    |ell_p| <= Q^(1+slack), provided the condition certifies <= 1.

    gamma declares the asymptotic divisor exponents (delta_{j,n} growing
    like Q_n^gamma_j); omitted it defaults to all zero, i.e. divisors
    bounded along the sequence.  The certificate compares the body volume
    over the J u {p} coordinates, 2^(|J|+1) Q^(1 - sum_J tau_j + (|J|+1)
    slack), against 2^dim times the concrete sublattice determinant
    delta_p prod_J delta_j (exact margin — success can outrun a failing
    margin, e.g. rational annihilation).  For each j outside J the interval
    gate delta_j Q^tau_j + Q^(-2 slack) < 1 is reported.
    """
    slack = Fraction(slack)
    if slack <= 0:
        raise ValidationError("slack must be positive")
    p = xi.p
    taus = [Fraction(t) for t in tau]
    if len(taus) != p - 1 or len(delta_n) != p:
        raise ValidationError("tau needs length p-1 and delta_n length p")
    if Q_n < 2:
        raise ValidationError("need Q_n >= 2")
    report = check_condition(taus, list(gamma) if gamma is not None
                             else [Fraction(0)] * p, prec)
    if report.relation is not TriBool.FALSE:
        raise Refusal("condition not certified <= 1", report)
    J = list(report.J)
    tau_J = sum((taus[j - 1] for j in J), Fraction(0))
    det = delta_n[p - 1]
    for j in J:
        det *= delta_n[j - 1]
    wp = max(prec, 96)
    Qb = BallReal.exact(Q_n, wp)
    gates = {}
    for j in range(1, p):
        if j not in J:
            g = Qb.pow(taus[j - 1]) * delta_n[j - 1] + Qb.pow(-2 * slack)
            gates[f"gate_j{j}"] = tri_compare(BallReal.exact(1, wp), g)
    expo = 1 - tau_J + (len(J) + 1) * slack
    vol = BallReal.exact(1 << (len(J) + 1), wp) * Qb.pow(expo)
    margin = _exact_power_ge(Q_n, expo, det)
    body = _primal_body(xi, taus, Q_n, slack, wp)
    point, diag = directed_search_sheared(body, delta_n, xi, prec, budget)
    if point is None:
        raise SearchFailed("no certified point in the K_n scan",
                           diag.get("unknowns", 0))
    cert = {"volume": vol, "lattice_det": BallReal.exact(det, wp),
            "margin": TriBool.TRUE if margin else TriBool.FALSE, **gates}
    diag.update(J=list(J), slack=str(slack))
    return SearchOutcome(kind="primal", point=point, certificate=cert,
                         diagnostics=diag)


def surrogate_gamma(delta_n: Sequence[int], Q_n: int,
                    prec: int = 64) -> list[Union[Fraction, BallReal]]:
    """Finite-n stand-in for the asymptotic divisor exponents:
    log delta_j / log Q_n (exact 0 for delta_j = 1)."""
    lq = BallReal.exact(Q_n, prec).log()
    return [Fraction(0) if d == 1 else BallReal.exact(d, prec).log() / lq
            for d in delta_n]


def _primal_body(xi: Basis, taus: Sequence[Fraction], Q: int,
                 slack: Fraction, wp: int) -> ConvexBody:
    p = xi.p
    bounds = []
    for j in range(1, p):
        lo, hi = _power_bracket(Q, -taus[j - 1] + slack, wp)
        bounds.append(Bound(BallReal.from_endpoints(lo, hi, wp), strict=False))
    lo, hi = _power_bracket(Q, 1 + slack, wp)
    bounds.append(Bound(BallReal.from_endpoints(lo, hi, wp), strict=False))
    return ConvexBody(frame="sheared", coords=tuple(range(1, p + 1)),
                      bounds=tuple(bounds))


def _exact_power_ge(Q: int, expo: Fraction, rhs: int) -> bool:
    """Q^expo >= rhs, exactly (Q >= 2, rhs >= 1)."""
    u, v = expo.numerator, expo.denominator
    if u >= 0:
        return Q ** u >= rhs ** v
    return 1 >= rhs ** v * Q ** (-u)


# ---------------------------------------------------------------------------
# dual construction (condition > 1 with eps-margin)


def construct_dual_witness(xi: Basis, tau: Sequence[Rat], gamma: Sequence[Num],
                           delta_PhiQ: Sequence[int], Q: int, eps: Rat,
                           prec: int = 64, budget: int = 10 ** 7) -> SearchOutcome:
    """Nonzero dual point with |a_j| <= Q^(tau_j-eps) on J, a_j = 0 off
    J u {p}, and |a_1 xi_1 + ... + a_p| <= Q^(-1-eps).

    Requires the condition certified > 1 with margin above (|J|+2) eps and a
    passing exact volume certificate
    Q^(sum_J tau_j - 1 - (|J|+1) eps) * delta_p prod_J delta_j > 1; refusal
    otherwise.  Enumerates a_j = m_j/delta_j on J smallest-first and tests
    the <= 2 nearest multiples of 1/delta_p per prefix.
    """
    eps = Fraction(eps)
    if eps <= 0:
        raise ValidationError("eps must be positive")
    p = xi.p
    taus = [Fraction(t) for t in tau]
    if len(taus) != p - 1 or len(delta_PhiQ) != p or len(gamma) != p:
        raise ValidationError("need |tau| = p-1, |gamma| = |delta| = p")
    if Q < 2:
        raise ValidationError("need Q >= 2")
    report = check_condition(taus, gamma, prec)
    if report.relation is not TriBool.TRUE:
        raise Refusal("condition not certified > 1", report)
    J = list(report.J)
    need = 1 + (len(J) + 2) * eps
    if not _margin_above(report.lhs, need):
        raise Refusal(f"margin not certified above (|J|+2) eps (need > {need})",
                      report)
    det = delta_PhiQ[p - 1]
    for j in J:
        det *= delta_PhiQ[j - 1]
    expo = sum((taus[j - 1] for j in J), Fraction(0)) - 1 - (len(J) + 1) * eps
    wp = max(prec, 96)
    Qb = BallReal.exact(Q, wp)
    vol = BallReal.exact(1 << (len(J) + 1), wp) * Qb.pow(expo)
    if not _exact_power_gt_inv(Q, expo, det):
        raise Refusal("volume certificate fails: Q too small", report,
                      {"volume": str(vol.round_to(53)),
                       "needed": str(1 << (len(J) + 1)),
                       "lattice_det": f"1/{det}"})
    cert = {"volume": vol, "lattice_det": BallReal.exact(Fraction(1, det), wp),
            "margin": TriBool.TRUE}
    point, diag = _dual_scan(xi, taus, J, delta_PhiQ, Q, eps, prec, budget)
    if point is None:
        raise SearchFailed("no certified witness in the K_Q scan",
                           diag.get("unknowns", 0))
    diag["J"] = J
    return SearchOutcome(kind="dual", point=point, certificate=cert,
                         diagnostics=diag)


def _margin_above(lhs: BallReal, need: Fraction) -> bool:
    if lhs.is_exact:
        return lhs.mid > need
    return tri_compare(lhs, need) is TriBool.TRUE


def _exact_power_gt_inv(Q: int, expo: Fraction, det: int) -> bool:
    """Q^expo * det > 1, exactly."""
    u, v = expo.numerator, expo.denominator
    if u >= 0:
        return Q ** u * det ** v > 1
    return det ** v > Q ** (-u)


def _dual_scan(xi: Basis, taus: Sequence[Fraction], J: Sequence[int],
               delta: Sequence[int], Q: int, eps: Fraction, prec: int,
               budget: int) -> tuple[Optional[DualPoint], dict]:
    """Prefix odometer over J with exact ranges R_j = floor(delta_j
    Q^(tau_j-eps)); per prefix the <= 2 nearest multiples of 1/delta_p,
    decided exactly against Q^(-1-eps) when xi is rational, else by balls
    with escalation.
    """
    p = xi.p
    dp = delta[p - 1]
    ranges = [floor_scaled_power(Fraction(delta[j - 1]), Q, taus[j - 1] - eps)
              for j in J]
    estimate = 2
    for R in ranges:
        estimate *= 2 * R + 1
    if estimate > budget:
        raise BudgetExceeded(estimate, budget)
    exact_xi = xi.exact_xi
    work = max(prec, 96)
    t_lo, t_hi = _power_bracket(Q, -1 - eps, work)
    checked = 0
    unknowns = 0
    for prefix in itertools.product(*[_signed(R) for R in ranges]):
        nz = next((m for m in prefix if m != 0), None)
        if nz is not None and nz < 0:
            continue
        if exact_xi is not None:
            s = sum((Fraction(m, delta[j - 1]) * exact_xi[j - 1]
                     for m, j in zip(prefix, J)), Fraction(0))
            for kp in _two_nearest(-s, dp, nz is None):
                checked += 1
                if cmp_abs_vs_power(s + Fraction(kp, dp), Q, -1 - eps) <= 0:
                    return _dual_point(p, J, prefix, delta, kp), \
                        {"checked": checked, "unknowns": unknowns}
        else:
            w = work
            xb = xi.xi_balls(w)
            s = BallReal.exact(0, w)
            for m, j in zip(prefix, J):
                if m:
                    s = s + xb[j - 1] * Fraction(m, delta[j - 1])
            for kp in _two_nearest(-s.mid, dp, nz is None):
                checked += 1
                ok = _cmp_abs_le(s + Fraction(kp, dp), t_lo, t_hi, False)
                while ok is TriBool.UNKNOWN and w < PREC_CAP:
                    w = min(2 * w, PREC_CAP)
                    tl, th = _power_bracket(Q, -1 - eps, w)
                    xb = xi.xi_balls(w)
                    s2 = BallReal.exact(0, w)
                    for m, j in zip(prefix, J):
                        if m:
                            s2 = s2 + xb[j - 1] * Fraction(m, delta[j - 1])
                    ok = _cmp_abs_le(s2 + Fraction(kp, dp), tl, th, False)
                if ok is TriBool.TRUE:
                    return _dual_point(p, J, prefix, delta, kp), \
                        {"checked": checked, "unknowns": unknowns}
                if ok is TriBool.UNKNOWN:
                    unknowns += 1
    return None, {"checked": checked, "unknowns": unknowns}


# ---------------------------------------------------------------------------
# the reciprocal construction


@dataclass
class ReciprocalEntry:
    n: int
    Q: int
    outcome: Optional[SearchOutcome]
    refusal: Optional[str]


def reciprocal_construct(skeleton: Sequence, xi: Basis, tau: Sequence[Rat],
                         eps: Fraction = Fraction(1, 20), prec: int = 64,
                         budget: int = 10 ** 7
                         ) -> tuple[list[ReciprocalEntry], Optional[FormSequence]]:
    """Run the primal construction at every skeleton entry (Q_n, delta_n) —
    or (n, Q_n, delta_n) — with eps as the per-n slack and the per-n
    surrogate gamma (log delta / log Q_n) feeding the condition report, so
    a sweep can mix accepted and refused entries.  Refusals are recorded
    per entry rather than aborting; budget and search failures propagate.
    Successes aggregate into a FormSequence whose records re-enter the
    estimation/verification pipeline.
    """
    entries: list[ReciprocalEntry] = []
    records: list[FormRecord] = []
    for k, entry in enumerate(skeleton):
        if len(entry) == 2:
            n, (Q_n, delta_n) = k + 1, entry
        else:
            n, Q_n, delta_n = entry
        try:
            out = construct_primal_form(xi, tau, delta_n, Q_n, slack=eps,
                                        prec=prec, budget=budget,
                                        gamma=surrogate_gamma(delta_n, Q_n,
                                                              prec))
        except Refusal as r:
            entries.append(ReciprocalEntry(n=n, Q=Q_n, outcome=None,
                                           refusal=str(r)))
            continue
        entries.append(ReciprocalEntry(n=n, Q=Q_n, outcome=out, refusal=None))
        records.append(FormRecord(n=n, Q=Q_n, ell=tuple(out.point),
                                  delta=tuple(delta_n)))
    seq = (FormSequence(records, provenance={"generator": "reciprocal-construct",
                                             "params": {}})
           if records else None)
    return entries, seq


# ---------------------------------------------------------------------------
# brute-force oracle


def enumerate_lattice_points(body: ConvexBody, delta: Sequence[int],
                             basis: Basis, prec: int = 64,
                             limit: int = 10 ** 5
                             ) -> tuple[Optional[tuple], int, int]:
    """Full enumeration of the nonzero lattice points in an enclosing box of
    the body, filtered through body.contains (labels absent from the body
    stay 0).  Returns (first certified point, Unknown count, tested count).
    Scan order matches the directed searches: last coordinate outermost and
    ascending, remaining coordinates smallest magnitude first.
    """
    p = basis.p
    labels = body.coords[:-1]
    dp = delta[p - 1]
    wp = max(prec, 96)
    tested = 0
    unknowns = 0

    if body.frame == "sheared":
        xp_cap = math.floor(body.bounds[-1].value.upper)
        xb = basis.xi_balls(wp)
        for step in range(0, xp_cap // dp + 1):
            xp = step * dp
            axes = []
            for k, j in enumerate(labels):
                d = delta[j - 1]
                b = body.bounds[k].value.upper
                center = xb[j - 1] * xp
                lo = math.floor((center.lower - b) / d)
                hi = math.ceil((center.upper + b) / d)
                mids = sorted(range(lo, hi + 1), key=lambda m: (abs(m), -m))
                axes.append([m * d for m in mids])
            for combo in itertools.product(*axes):
                if xp == 0 and all(c == 0 for c in combo):
                    continue
                point = [0] * p
                point[p - 1] = xp
                for j, c in zip(labels, combo):
                    point[j - 1] = c
                tested += 1
                if tested > limit:
                    raise BudgetExceeded(tested, limit)
                ok = body.contains(point, basis, wp)
                if ok is TriBool.TRUE:
                    return tuple(point), unknowns, tested
                if ok is TriBool.UNKNOWN:
                    unknowns += 1
        return None, unknowns, tested

    if body.frame != "coordinate":
        raise ValidationError(f"unknown frame {body.frame!r}")
    axes = []
    for k, j in enumerate(labels):
        d = delta[j - 1]
        R = math.floor(body.bounds[k].value.upper * d)
        axes.append([Fraction(m, d) for m in _signed(R)])
    t_hi = body.bounds[-1].value.upper
    exact_xi = basis.exact_xi
    xb = None if exact_xi is not None else basis.xi_balls(wp)
    for combo in itertools.product(*axes):
        if exact_xi is not None:
            s = sum((a * exact_xi[j - 1] for a, j in zip(combo, labels)),
                    Fraction(0))
            kmin = math.ceil((-s - t_hi) * dp)
            kmax = math.floor((-s + t_hi) * dp)
        else:
            s = BallReal.exact(0, wp)
            for a, j in zip(combo, labels):
                if a:
                    s = s + xb[j - 1] * a
            kmin = math.ceil((-s.upper - t_hi) * dp)
            kmax = math.floor((-s.lower + t_hi) * dp)
        for kp in range(kmin, kmax + 1):
            ap = Fraction(kp, dp)
            if ap == 0 and all(a == 0 for a in combo):
                continue
            point = [Fraction(0)] * p
            for j, a in zip(labels, combo):
                point[j - 1] = a
            point[p - 1] = ap
            tested += 1
            if tested > limit:
                raise BudgetExceeded(tested, limit)
            ok = body.contains(point, basis, wp)
            if ok is TriBool.TRUE:
                return tuple(point), unknowns, tested
            if ok is TriBool.UNKNOWN:
                unknowns += 1
    return None, unknowns, tested
