"""Hypothesis checks and finite-Q conclusion verification for the
linear-independence criteria.

The pipeline: Phi maps a scale Q to the last usable record index; eps1_for
picks the dyadic iteration parameter; build_iterate_matrix stacks the forms
at the phi-iterated indices; matrix_condition_check certifies the
factorial-ratio condition that forces invertibility; fit_recurrence /
check_siegel handle the recurrence-based variant; verify_conclusion
exhaustively tests the lower bound |a_1 xi_1 + ... + a_p| > Q^(-1-eps) over
the admissible dual points at one concrete Q.

Everything that can be decided in exact integer/rational arithmetic is;
irrational data goes through certified balls with precision escalation, and
undecided comparisons surface as Unknown rather than being rounded away.
"""

from __future__ import annotations

import itertools
import math
from bisect import bisect_right
from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial
from typing import Optional, Sequence, Union

from .numerics import (
    BallReal,
    PREC_CAP,
    TriBool,
    cmp_abs_vs_power,
    floor_scaled_power,
    nth_root_floor,
    tri_compare,
)
from .model import (
    Basis,
    DualPoint,
    FormSequence,
    ValidationError,
    divisor_chain_check,
    eval_at_basis,
)
from .exponents import TauEstimate, estimate_tau

__all__ = [
    "PhiIndex",
    "IterateMatrix",
    "RecurrenceFit",
    "SiegelReport",
    "NesterenkoReport",
    "Verdict",
    "RecordsExhausted",
    "BudgetExceeded",
    "phi_of_Q",
    "eps1_for",
    "build_iterate_matrix",
    "matrix_condition_check",
    "fit_recurrence",
    "check_siegel",
    "check_nesterenko",
    "verify_conclusion",
    "reduce_scale",
]

Rat = Union[int, Fraction]


class RecordsExhausted(LookupError):
    """Not enough records to complete the requested iteration."""


class BudgetExceeded(RuntimeError):
    def __init__(self, estimate: int, budget: int):
        super().__init__(f"estimated {estimate} candidates exceeds budget {budget}")
        self.estimate = estimate
        self.budget = budget


# ---------------------------------------------------------------------------
# Phi and the iteration parameter


@dataclass(frozen=True)
class PhiIndex:
    Q: int
    value: int            # position into seq.records
    truncated: bool = False  # Q past the last record: value may undercount


def phi_of_Q(seq: FormSequence, Q: int) -> PhiIndex:
    """Largest record position k with Q_k <= Q (positions are 0-based)."""
    qs = seq.Qs
    if Q < qs[0]:
        raise ValidationError(f"Q={Q} below the first scale Q_0={qs[0]}")
    k = bisect_right(qs, Q) - 1
    return PhiIndex(Q=Q, value=k, truncated=Q > qs[-1])


def eps1_for(eps: Rat, tau: Sequence[Rat], p: int) -> Fraction:
    """Largest dyadic 2^-k with (1+e)^(p-1)-1 < eps/2, and for every tau_i<0
    also |tau_i|((1+e)^(p-1)-1) < eps/2."""
    eps = Fraction(eps)
    if eps <= 0:
        raise ValidationError("eps must be positive")
    taus = [Fraction(t) for t in tau]
    if any(t <= -1 for t in taus):
        raise ValidationError("requires tau_i > -1")
    half = eps / 2
    k = 1
    while True:
        e1 = Fraction(1, 2 ** k)
        g = (1 + e1) ** (p - 1) - 1
        if g < half and all(-t * g < half for t in taus if t < 0):
            return e1
        k += 1


@dataclass(frozen=True)
class IterateMatrix:
    n: int                       # starting position
    eps1: Fraction
    indices: tuple[int, ...]     # positions, strictly increasing
    entries: tuple[tuple[BallReal, ...], ...]  # entry(i,j) below, 1-based

    def entry(self, i: int, j: int) -> BallReal:
        return self.entries[i - 1][j - 1]


def build_iterate_matrix(seq: FormSequence, basis: Basis, n: int,
                         eps1: Rat, prec: int = 64) -> IterateMatrix:
    """Rows are the forms at positions n, phi(n), ..., phi^(p-1)(n), where
    phi(m)-1 is Phi applied to Q_m^(1+eps1); columns evaluate e_1..e_p.

    Q_m^(1+eps1) is handled exactly: for eps1=u/v the threshold is
    floor((Q_m^(u+v))^(1/v)), which leaves Phi unchanged since scales are
    integers.
    """
    eps1 = Fraction(eps1)
    if eps1 <= 0:
        raise ValidationError("eps1 must be positive")
    p = seq.p
    if not 0 <= n < len(seq):
        raise RecordsExhausted(f"no record at position {n}")
    u, v = eps1.numerator, eps1.denominator
    positions = [n]
    for _ in range(p - 1):
        m = positions[-1]
        Qm = seq.records[m].Q
        threshold = nth_root_floor(Qm ** (u + v), v)
        phi = phi_of_Q(seq, threshold)
        nxt = phi.value + 1
        if phi.truncated or nxt >= len(seq):
            raise RecordsExhausted(
                f"phi iteration from position {m} needs records past the last one")
        positions.append(nxt)
    entries = tuple(
        tuple(eval_at_basis(seq, basis, seq.records[m].n, j, prec)
              for j in range(1, p + 1))
        for m in positions)
    return IterateMatrix(n=n, eps1=eps1, indices=tuple(positions),
                         entries=entries)


def matrix_condition_check(M: Sequence[Sequence[BallReal]],
                           p: Optional[int] = None) -> TriBool:
    """Certified check of |m_i'j m_ij'| <= |m_ij m_i'j'|/(p+1)! for all
    i<i', j<j'.  False dominates Unknown; an entry enclosure containing 0
    is a precondition failure, not an Unknown."""
    if p is None:
        p = len(M)
    if len(M) != p or any(len(row) != p for row in M):
        raise ValidationError("matrix must be p x p")
    for i, row in enumerate(M):
        for j, m in enumerate(row):
            if not (m.lower > 0 or m.upper < 0):
                raise ValidationError(
                    f"entry ({i + 1},{j + 1}) enclosure does not exclude 0")
    fact = factorial(p + 1)
    saw_unknown = False
    for i1, i2 in itertools.combinations(range(p), 2):
        for j1, j2 in itertools.combinations(range(p), 2):
            cross = abs(M[i2][j1] * M[i1][j2]) * fact
            diag = abs(M[i1][j1] * M[i2][j2])
            t = tri_compare(cross, diag)   # certified cross*(p+1)! > diag
            if t is TriBool.TRUE:
                return TriBool.FALSE
            if t is TriBool.UNKNOWN:
                saw_unknown = True
    return TriBool.UNKNOWN if saw_unknown else TriBool.TRUE


# ---------------------------------------------------------------------------
# Recurrence fitting and the Siegel-type report


@dataclass(frozen=True)
class RecurrenceFit:
    n: int
    alpha: tuple[Fraction, ...]   # alpha_0(n) .. alpha_{p-1}(n)
    residual: bool                # substitution check passed exactly
    alpha0_zero: bool
    non_unique: bool              # singular-but-consistent system


def _gauss_reduced(rows: list[list[Fraction]], ncols: int):
    """In-place fraction Gauss over the leading ncols columns; returns the
    pivot column list.  Rows keep any trailing augmented entries."""
    pivots = []
    r = 0
    for c in range(ncols):
        piv = next((k for k in range(r, len(rows)) if rows[k][c] != 0), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        inv = rows[r][c]
        rows[r] = [x / inv for x in rows[r]]
        for k in range(len(rows)):
            if k != r and rows[k][c] != 0:
                f = rows[k][c]
                rows[k] = [x - f * y for x, y in zip(rows[k], rows[r])]
        pivots.append(c)
        r += 1
    return pivots


def fit_recurrence(seq: FormSequence, n: int) -> Optional[RecurrenceFit]:
    """Solve ell_{i,n+p} = sum_j alpha_j(n) ell_{i,n+j} exactly.

    Unique system: the fit, with alpha_0(n)=0 flagged.  Singular but
    consistent: the canonical representative with free coefficients at the
    low-lag end set to 0 (non_unique flag).  Inconsistent: None.
    """
    p = seq.p
    recs = [seq.record(n + j) for j in range(p + 1)]
    # unknowns alpha_j; columns reversed so Gauss pivots prefer high lags
    rows = [[Fraction(recs[j].ell[i]) for j in range(p - 1, -1, -1)]
            + [Fraction(recs[p].ell[i])] for i in range(p)]
    pivots = _gauss_reduced(rows, p)
    rank = len(pivots)
    for row in rows[rank:]:
        if row[p] != 0:
            return None
    rev = [Fraction(0)] * p
    for r, c in enumerate(pivots):
        rev[c] = rows[r][p]
    alpha = tuple(reversed(rev))
    ok = all(recs[p].ell[i] == sum(alpha[j] * recs[j].ell[i] for j in range(p))
             for i in range(p))
    return RecurrenceFit(n=n, alpha=alpha, residual=ok,
                         alpha0_zero=alpha[0] == 0,
                         non_unique=rank < p)


def _int_matrix_det_rank(M: list[list[int]]) -> tuple[Fraction, int]:
    rows = [[Fraction(x) for x in row] for row in M]
    n = len(rows)
    det = Fraction(1)
    r = 0
    for c in range(n):
        piv = next((k for k in range(r, n) if rows[k][c] != 0), None)
        if piv is None:
            det = Fraction(0)
            continue
        if piv != r:
            rows[r], rows[piv] = rows[piv], rows[r]
            det = -det
        det *= rows[r][c]
        inv = rows[r][c]
        rows[r] = [x / inv for x in rows[r]]
        for k in range(r + 1, n):
            if rows[k][c] != 0:
                f = rows[k][c]
                rows[k] = [x - f * y for x, y in zip(rows[k], rows[r])]
        r += 1
    return (det if r == n else Fraction(0)), r


def _delta_matrix(seq: FormSequence, n: int) -> list[list[int]]:
    """p x p window: row i holds ell_{i,n} .. ell_{i,n+p-1}."""
    p = seq.p
    recs = [seq.record(n + j) for j in range(p)]
    return [[recs[j].ell[i] for j in range(p)] for i in range(p)]


def _ball_det(M: Sequence[Sequence[BallReal]]) -> BallReal:
    p = len(M)
    prec = M[0][0].prec
    total = BallReal.exact(0, prec)
    for perm in itertools.permutations(range(p)):
        sign = 1
        seen = list(perm)
        for i in range(p):            # parity by counting inversions
            for j in range(i + 1, p):
                if seen[i] > seen[j]:
                    sign = -sign
        term = BallReal.exact(sign, prec)
        for i in range(p):
            term = term * M[i][perm[i]]
        total = total + term
    return total


@dataclass
class SiegelReport:
    n1: int
    n2: int
    p: int
    fits: dict[int, Optional[RecurrenceFit]]
    alpha0_ok: bool               # fit exists with alpha_0(n) != 0 throughout
    bad_ns: list[int]
    det_n2: int
    det_nonzero: bool
    ranks: list[tuple[int, int]]  # (n, rank of the Delta window at n)
    rank_propagates: bool
    det_consistent: TriBool       # det(L-values) vs (1+sum xi^2) det(Delta)

    def to_json(self) -> dict:
        return {
            "n1": self.n1, "n2": self.n2, "p": self.p,
            "alpha0_ok": self.alpha0_ok,
            "bad_ns": self.bad_ns,
            "det_n2": str(self.det_n2),
            "det_nonzero": self.det_nonzero,
            "rank_propagates": self.rank_propagates,
            "ranks": [[n, r] for n, r in self.ranks],
            "det_consistent": self.det_consistent.name,
            "alpha": {str(n): [str(a) for a in f.alpha]
                      for n, f in self.fits.items() if f is not None},
        }


def check_siegel(seq: FormSequence, basis: Basis, n1: int, n2: int,
                 prec: int = 64) -> SiegelReport:
    """Recurrence-based hypothesis report: exact fits with alpha_0(n) != 0
    over [n1, last-p], exact det of the Delta window at n2, observed rank
    propagation, and a determinant cross-check against the basis values."""
    p = seq.p
    last = seq.records[-1].n
    if not (n1 <= n2 <= last - p + 1):
        raise ValidationError(f"need n1 <= n2 <= {last - p + 1}")
    fits: dict[int, Optional[RecurrenceFit]] = {}
    bad: list[int] = []
    for n in range(n1, last - p + 1):
        f = fit_recurrence(seq, n)
        fits[n] = f
        if f is None or f.alpha0_zero or not f.residual:
            bad.append(n)
    det2, _ = _int_matrix_det_rank(_delta_matrix(seq, n2))
    assert det2.denominator == 1
    det2_int = det2.numerator
    ranks = []
    for n in range(n1, last - p + 2):
        _, r = _int_matrix_det_rank(_delta_matrix(seq, n))
        ranks.append((n, r))
    rank_prop = all(a[1] == b[1] for a, b in zip(ranks, ranks[1:]))
    # det of the evaluated window equals (1 + sum xi_i^2) * det(Delta_n2)
    V = [[eval_at_basis(seq, basis, n2 + j, i, prec) for j in range(p)]
         for i in range(1, p + 1)]
    dV = _ball_det(V)
    xb = basis.xi_balls(prec)
    fac = BallReal.exact(1, prec)
    for x in xb:
        fac = fac + x * x
    diff = dV - fac * Fraction(det2_int)
    consistent = TriBool.TRUE if diff.contains_zero() else TriBool.FALSE
    return SiegelReport(n1=n1, n2=n2, p=p, fits=fits,
                        alpha0_ok=not bad, bad_ns=bad,
                        det_n2=det2_int, det_nonzero=det2_int != 0,
                        ranks=ranks, rank_propagates=rank_prop,
                        det_consistent=consistent)


# ---------------------------------------------------------------------------
# Hypothesis report for the divisor-aware criterion


@dataclass
class NesterenkoReport:
    divisor_violations: list[tuple[int, int]]
    tau: list[TauEstimate]
    norm_trace: list[tuple[int, Optional[BallReal]]]
    norm_consistent: TriBool      # sup-norm exponent -> 1
    consistent: TriBool

    def to_json(self) -> dict:
        return {
            "divisor_violations": [list(v) for v in self.divisor_violations],
            "tau": [{"i": t.i,
                     "final": None if t.final is None else t.final.round_to(64).to_json(),
                     "oscillation": None if t.oscillation is None else str(t.oscillation),
                     "consistent": t.consistent.name}
                    for t in self.tau],
            "norm_consistent": self.norm_consistent.name,
            "consistent": self.consistent.name,
        }


def check_nesterenko(seq: FormSequence, basis: Basis, prec: int = 64,
                     tol: Fraction = Fraction(1, 20)) -> NesterenkoReport:
    """Finite-n consistency report for the three hypotheses: divisor chains,
    |L_n(e_i)| = Q_n^(-tau_i+o(1)) (trace oscillation below tol), and
    sup-norm growth ||L_n|| = Q_n^(1+o(1))."""
    violations = divisor_chain_check(seq)
    taus = [estimate_tau(seq, basis, i, prec, tol) for i in range(1, seq.p)]
    norm_trace: list[tuple[int, Optional[BallReal]]] = []
    for rec in seq:
        s = rec.sup_norm()
        if rec.Q == 1 or s == 0:
            norm_trace.append((rec.n, None))
            continue
        val = BallReal.exact(s, prec).log() / BallReal.exact(rec.Q, prec).log()
        norm_trace.append((rec.n, val))
    k = max(2, (len(norm_trace) + 2) // 3)
    tail = norm_trace[-k:]
    if any(v is None for _, v in tail) or not tail:
        norm_ok = TriBool.UNKNOWN
    else:
        dev = max(max(v.upper - 1, 1 - v.lower) for _, v in tail)
        norm_ok = TriBool.TRUE if dev <= tol else TriBool.FALSE
    parts = [t.consistent for t in taus] + [norm_ok]
    if violations:
        overall = TriBool.FALSE
    elif any(x is TriBool.FALSE for x in parts):
        overall = TriBool.FALSE
    elif any(x is TriBool.UNKNOWN for x in parts):
        overall = TriBool.UNKNOWN
    else:
        overall = TriBool.TRUE
    return NesterenkoReport(divisor_violations=violations, tau=taus,
                            norm_trace=norm_trace, norm_consistent=norm_ok,
                            consistent=overall)


# ---------------------------------------------------------------------------
# Finite-Q conclusion verifier


@dataclass
class Verdict:
    status: str                   # holds | violated | unknown
    witness: Optional[DualPoint]
    Q: int
    eps: Fraction
    diagnostics: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "status": self.status,
            "witness": None if self.witness is None else self.witness.to_json(),
            "Q": str(self.Q),
            "eps": str(self.eps),
            "candidates_checked": self.diagnostics.get("candidates_checked", 0),
            "diagnostics": {k: v for k, v in self.diagnostics.items()},
        }


def _signed_order(R: int):
    yield 0
    for k in range(1, R + 1):
        yield k
        yield -k


def _power_bracket(Q: int, expo: Fraction, bits: int) -> tuple[Fraction, Fraction]:
    """Rational bracket of Q^expo (expo > 0) with ~bits of resolution."""
    M = floor_scaled_power(1 << bits, Q, expo)
    return Fraction(M, 1 << bits), Fraction(M + 1, 1 << bits)


def verify_conclusion(seq: FormSequence, basis: Basis, tau: Sequence[Rat],
                      Q: int, eps: Rat, prec: int = 64,
                      budget: int = 10 ** 7) -> Verdict:
    """Exhaustively test |a_1 xi_1 + ... + a_{p-1} xi_{p-1} + a_p| > Q^(-1-eps)
    over nonzero a with delta_{i,Phi(Q)} a_i integral and |a_i| <= Q^(tau_i-eps).

    The prefix (a_1..a_{p-1}) is enumerated smallest-absolute-value-first; for
    each prefix only the finitely many a_p within Q^(-1-eps) of -sum a_i xi_i
    can violate, all others are certified in bulk.  Rational bases are decided
    exactly; irrational ones via balls with precision escalation, leaving any
    stubborn candidate as unknown (a certified violation found later still
    dominates).
    """
    eps = Fraction(eps)
    if eps <= 0:
        raise ValidationError("eps must be positive")
    p = seq.p
    taus = [Fraction(t) for t in tau]
    if len(taus) != p - 1:
        raise ValidationError(f"tau must have length {p - 1}")
    phi = phi_of_Q(seq, Q)
    delta = seq.records[phi.value].delta
    dp = delta[p - 1]

    ranges = [floor_scaled_power(Fraction(delta[i]), Q, taus[i] - eps)
              for i in range(p - 1)]
    estimate = 1
    for R in ranges:
        estimate *= 2 * R + 1
    if estimate > budget:
        raise BudgetExceeded(estimate, budget)

    # threshold t = Q^-(1+eps): exact when Q^(1+eps) is rational
    one_eps = 1 + eps
    u, v = one_eps.numerator, one_eps.denominator
    root = nth_root_floor(Q ** u, v)
    t_exact: Optional[Fraction] = Fraction(1, root) if root ** v == Q ** u else None
    t_bits = 96
    if t_exact is None:
        q_lo, q_hi = _power_bracket(Q, one_eps, t_bits)
        t_lo, t_hi = 1 / q_hi, 1 / q_lo
    else:
        t_lo = t_hi = t_exact

    exact_xi = basis.exact_xi
    work = max(prec, 96)
    if exact_xi is None:
        # rigorous scaled-integer brackets: X_lo <= xi * 2^work <= X_hi
        scale = 1 << work
        X = [(math.floor(x.lower * scale), math.ceil(x.upper * scale))
             for x in basis.xi_balls(work)]
        D = math.lcm(*delta)
        mults = [D // d for d in delta[:p - 1]]
        step = (D // dp) * scale
        T_lo = math.floor(t_lo * D * scale)
        T_hi = math.ceil(t_hi * D * scale)

    checked = 0
    prefixes = 0
    unknowns: list[tuple] = []
    escalations = 0

    def decide_exact(val: Fraction) -> str:
        sign = cmp_abs_vs_power(val, Q, -one_eps)
        return "holds" if sign > 0 else "violated"

    def decide_slow(prefix: tuple, kp: int) -> str:
        """Ball-arithmetic fallback with escalation for one candidate."""
        nonlocal escalations
        w2, out = work, ""
        while out == "" and w2 < PREC_CAP:
            w2 = min(2 * w2, PREC_CAP)
            escalations += 1
            s2 = BallReal.exact(0, w2)
            for k, d, x in zip(prefix, delta, basis.xi_balls(w2)):
                if k:
                    s2 = s2 + x * Fraction(k, d)
            if t_exact is None:
                q_lo2, q_hi2 = _power_bracket(Q, one_eps, w2 + 32)
                tl, th = 1 / q_hi2, 1 / q_lo2
            else:
                tl = th = t_exact
            out = _decide_ball(s2 + Fraction(kp, dp), tl, th)
        return out

    for prefix in itertools.product(*[_signed_order(R) for R in ranges]):
        nz = next((k for k in prefix if k != 0), None)
        if nz is not None and nz < 0:
            continue  # sign symmetry: mirror covered with a_p negated
        prefixes += 1
        if exact_xi is not None:
            s = sum((Fraction(k, d) * x for k, d, x in
                     zip(prefix, delta, exact_xi)), Fraction(0))
            kmin = math.ceil((-s - t_hi) * dp)
            kmax = math.floor((-s + t_hi) * dp)
            start = max(kmin, 1) if nz is None else kmin
            for kp in range(start, kmax + 1):
                val = s + Fraction(kp, dp)
                checked += 1
                if decide_exact(val) == "violated":
                    a = tuple(Fraction(k, d) for k, d in zip(prefix, delta))
                    wit = DualPoint(a + (Fraction(kp, dp),))
                    return Verdict("violated", wit, Q, eps,
                                   {"candidates_checked": checked,
                                    "prefixes": prefixes,
                                    "budget_estimate": estimate})
        else:
            # integer brackets of v * D * 2^work for the whole prefix
            s_lo = s_hi = 0
            for k, m, (xl, xh) in zip(prefix, mults, X):
                if k > 0:
                    s_lo += k * m * xl
                    s_hi += k * m * xh
                elif k < 0:
                    s_lo += k * m * xh
                    s_hi += k * m * xl
            kmin = -((s_hi + T_hi) // step)
            kmax = (T_hi - s_lo) // step
            start = max(kmin, 1) if nz is None else kmin
            for kp in range(start, kmax + 1):
                checked += 1
                v_lo = s_lo + kp * step
                v_hi = s_hi + kp * step
                if v_lo > 0 or v_hi < 0:
                    alo, ahi = min(abs(v_lo), abs(v_hi)), max(abs(v_lo), abs(v_hi))
                else:
                    alo, ahi = 0, max(-v_lo, v_hi)
                if alo > T_hi:
                    continue                       # certified holds
                outcome = "violated" if ahi <= T_lo else decide_slow(prefix, kp)
                if outcome == "violated":
                    a = tuple(Fraction(k, d) for k, d in zip(prefix, delta))
                    wit = DualPoint(a + (Fraction(kp, dp),))
                    return Verdict("violated", wit, Q, eps,
                                   {"candidates_checked": checked,
                                    "prefixes": prefixes,
                                    "budget_estimate": estimate,
                                    "escalations": escalations})
                if outcome == "":
                    unknowns.append(prefix + (kp,))
    diag = {"candidates_checked": checked, "prefixes": prefixes,
            "budget_estimate": estimate, "escalations": escalations,
            "unknown_candidates": len(unknowns)}
    if unknowns:
        return Verdict("unknown", None, Q, eps, diag)
    return Verdict("holds", None, Q, eps, diag)


def _decide_ball(val: BallReal, t_lo: Fraction, t_hi: Fraction) -> str:
    """Certified comparison of |val| against t in [t_lo, t_hi]; '' if open."""
    lo, hi = val.lower, val.upper
    if lo > 0 or hi < 0:
        alo, ahi = min(abs(lo), abs(hi)), max(abs(lo), abs(hi))
    else:
        alo, ahi = Fraction(0), max(abs(lo), abs(hi))
    if alo > t_hi:
        return "holds"
    if ahi <= t_lo:
        return "violated"
    return ""


def reduce_scale(Q: int, eps: Rat, basis: Basis,
                 prec: int = 64) -> tuple[BallReal, Fraction]:
    """Scale change (Q, eps) -> (Q', eps/2) with
    Q' = ((1 + sum xi_i^2) Q^(1+eps))^(1/(1+eps/2))."""
    eps = Fraction(eps)
    if Q < 2 or eps <= 0:
        raise ValidationError("need Q >= 2 and eps > 0")
    eps2 = eps / 2
    xb = basis.xi_balls(prec)
    ssq = BallReal.exact(1, prec)
    for x in xb:
        ssq = ssq + x * x
    inner = ssq * BallReal.exact(Q, prec).pow(1 + eps)
    return inner.pow(1 / (1 + eps2)), eps2
