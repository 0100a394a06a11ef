"""Criteria-module tests: Phi, eps1, iterate matrices, the factorial matrix
condition, recurrence fits, Siegel reports, and the finite-Q verifier."""

import random
from fractions import Fraction
from math import factorial

import pytest

from latforms.numerics import BallReal, TriBool, cmp_abs_vs_power, parse_real, tri_compare
from latforms.model import (
    Basis,
    DualPoint,
    FormRecord,
    FormSequence,
    MissingRecord,
    ValidationError,
    dual_membership,
)
from latforms.criteria import (
    BudgetExceeded,
    RecordsExhausted,
    build_iterate_matrix,
    check_nesterenko,
    check_siegel,
    eps1_for,
    fit_recurrence,
    matrix_condition_check,
    phi_of_Q,
    reduce_scale,
    verify_conclusion,
)

GOLDEN = Basis((parse_real("golden"),))


def _fib(n_max):
    f = [0, 1]
    while len(f) <= n_max + 2:
        f.append(f[-1] + f[-2])
    return f


def fib_seq(n_max):
    f = _fib(n_max)
    return FormSequence([FormRecord(n=n, Q=f[n], ell=(f[n + 1], f[n]), delta=(1, 1))
                         for n in range(2, n_max + 1)])


def flat_seq(qs, p=2):
    """Records with uninteresting unit forms at the given scales."""
    return FormSequence([
        FormRecord(n=i, Q=q, ell=(1,) * (p - 1) + (q,), delta=(1,) * p)
        for i, q in enumerate(qs)])


# -- Phi ---------------------------------------------------------------------

def test_phi_scan_and_boundaries():
    seq = flat_seq([2, 4, 16, 256])
    assert phi_of_Q(seq, 100).value == 2
    assert phi_of_Q(seq, 2).value == 0
    assert phi_of_Q(seq, 256).value == 3          # <= is inclusive
    assert not phi_of_Q(seq, 256).truncated
    assert phi_of_Q(seq, 300).truncated
    with pytest.raises(ValidationError):
        phi_of_Q(seq, 1)


def test_phi_monotone_property():
    rng = random.Random(7)
    qs = sorted(rng.sample(range(2, 10**6), 60))
    seq = flat_seq(qs)
    prev = 0
    for Q in range(qs[0], 10**6, 9973):
        k = phi_of_Q(seq, Q).value
        assert qs[k] <= Q
        assert k >= prev
        prev = k


# -- eps1 --------------------------------------------------------------------

def test_eps1_frozen_values():
    assert eps1_for(Fraction(1, 2), [0, 0], 3) == Fraction(1, 16)
    assert eps1_for(2, [1], 2) == Fraction(1, 2)
    assert eps1_for(Fraction(1, 2), [Fraction(-1, 2)], 2) == Fraction(1, 8)


def test_eps1_constraint_really_satisfied():
    for eps, taus, p in [(Fraction(1, 2), [Fraction(-1, 2), Fraction(3, 4)], 3),
                         (Fraction(1, 100), [Fraction(-9, 10)], 2)]:
        e1 = eps1_for(eps, taus, p)
        g = (1 + e1) ** (p - 1) - 1
        assert g < eps / 2
        assert all(-t * g < eps / 2 for t in taus if t < 0)
        # maximality: the next larger dyadic must fail something
        g2 = (1 + 2 * e1) ** (p - 1) - 1
        assert not (g2 < eps / 2 and all(-t * g2 < eps / 2 for t in taus if t < 0))


def test_eps1_preconditions():
    with pytest.raises(ValidationError):
        eps1_for(0, [1], 2)
    with pytest.raises(ValidationError):
        eps1_for(1, [-1], 2)


# -- iterate matrix ----------------------------------------------------------

THIRD_FIFTH = Basis((parse_real("1/3"), parse_real("1/5")))


def test_iterate_indices_hand_scan():
    qs = [2, 4, 16, 256, 65536]
    seq = FormSequence([FormRecord(n=i, Q=q, ell=(1, 1, q), delta=(1, 1, 1))
                        for i, q in enumerate(qs)])
    M = build_iterate_matrix(seq, THIRD_FIFTH, 0, 1, prec=64)
    assert M.indices == (0, 2, 4)
    assert all(a < b for a, b in zip(M.indices, M.indices[1:]))
    # entries match direct evaluation: L(e_1) = ell_1 - ell_3/3 = 1/3
    v = M.entry(1, 1)
    assert v.contains(Fraction(1, 3)) and v.rad < Fraction(1, 2**50)


def test_iterate_consecutive_fallback_p2():
    seq = flat_seq([2 ** k for k in range(1, 8)])
    M = build_iterate_matrix(seq, Basis((parse_real("1/3"),)), 2,
                             Fraction(1, 8), prec=64)
    assert M.indices == (2, 3)


def test_iterate_records_exhausted():
    seq = flat_seq([2, 4, 16, 256, 65536])
    with pytest.raises(RecordsExhausted):
        build_iterate_matrix(seq, Basis((parse_real("1/3"),)), 3, 1)


# -- matrix condition --------------------------------------------------------

def _exact_matrix(rows):
    return [[BallReal.exact(Fraction(x), 96) for x in row] for row in rows]


def test_matrix_condition_pinned():
    ok = _exact_matrix([[1, Fraction(1, 10)], [Fraction(1, 10), 1]])
    assert matrix_condition_check(ok) is TriBool.TRUE
    bad = _exact_matrix([[1, 1], [1, 1]])
    assert matrix_condition_check(bad) is TriBool.FALSE


def test_matrix_condition_entry_straddles_zero():
    M = _exact_matrix([[1, 1], [1, 1]])
    M[0][1] = BallReal.from_endpoints(Fraction(-1, 2), Fraction(1, 2), 96)
    with pytest.raises(ValidationError):
        matrix_condition_check(M)


def test_matrix_condition_unknown():
    b = BallReal.from_endpoints(Fraction(397, 1000), Fraction(419, 1000), 96)
    M = [[BallReal.exact(1, 96), b], [b, BallReal.exact(1, 96)]]
    assert matrix_condition_check(M) is TriBool.UNKNOWN


def _det_exact(rows):
    m = [list(map(Fraction, r)) for r in rows]
    n = len(m)
    det = Fraction(1)
    for c in range(n):
        piv = next((k for k in range(c, n) if m[k][c] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != c:
            m[c], m[piv] = m[piv], m[c]
            det = -det
        det *= m[c][c]
        for k in range(c + 1, n):
            f = m[k][c] / m[c][c]
            m[k] = [x - f * y for x, y in zip(m[k], m[c])]
    return det


def test_matrix_condition_implies_invertible_sampled():
    rng = random.Random(314)
    for p in (2, 3):
        G = 4 * factorial(p + 1) + 1
        for _ in range(100):
            rows = [[Fraction(rng.choice([-1, 1])) * (1 + Fraction(rng.randrange(1000), 1001))
                     * Fraction(G) ** ((i + 1) * (j + 1))
                     for j in range(p)] for i in range(p)]
            # certified-true condition by construction
            assert matrix_condition_check(_exact_matrix(rows)) is TriBool.TRUE
            assert _det_exact(rows) != 0


# -- recurrence fits ---------------------------------------------------------

def test_fit_recurrence_fibonacci():
    fit = fit_recurrence(fib_seq(20), 7)
    assert fit.alpha == (Fraction(1), Fraction(1))
    assert fit.residual and not fit.alpha0_zero and not fit.non_unique


def test_fit_recurrence_constant_flags_alpha0():
    seq = FormSequence([FormRecord(n=n, Q=n + 2, ell=(3, 7), delta=(1, 1))
                        for n in range(5)])
    fit = fit_recurrence(seq, 0)
    assert fit.alpha == (Fraction(0), Fraction(1))
    assert fit.alpha0_zero and fit.non_unique and fit.residual


def test_fit_recurrence_inconsistent_none():
    seq = FormSequence([
        FormRecord(n=0, Q=2, ell=(1, 2), delta=(1, 1)),
        FormRecord(n=1, Q=3, ell=(2, 4), delta=(1, 1)),
        FormRecord(n=2, Q=4, ell=(5, 11), delta=(1, 1)),
    ])
    assert fit_recurrence(seq, 0) is None


def test_fit_recurrence_missing_records():
    with pytest.raises(MissingRecord):
        fit_recurrence(fib_seq(10), 9)


# -- Siegel report -----------------------------------------------------------

def test_check_siegel_fibonacci():
    rep = check_siegel(fib_seq(20), GOLDEN, 2, 5, prec=96)
    assert rep.alpha0_ok and rep.bad_ns == []
    assert rep.det_n2 == -1            # Cassini: F_6^2 - F_5 F_7 = -1
    assert rep.det_nonzero
    assert all(r == 2 for _, r in rep.ranks)
    assert rep.rank_propagates
    assert rep.det_consistent is TriBool.TRUE
    doc = rep.to_json()
    assert doc["det_n2"] == "-1" and doc["alpha0_ok"] is True


def test_cassini_all_n():
    f = _fib(30)
    for n in range(2, 28):
        assert abs(f[n + 1] ** 2 - f[n] * f[n + 2]) == 1


def test_check_siegel_constant_failure():
    seq = FormSequence([FormRecord(n=n, Q=n + 2, ell=(3, 7), delta=(1, 1))
                        for n in range(6)])
    rep = check_siegel(seq, Basis((parse_real("1/3"),)), 0, 2)
    assert not rep.alpha0_ok
    assert rep.det_n2 == 0 and not rep.det_nonzero


# -- hypothesis report -------------------------------------------------------

def test_check_nesterenko_fibonacci_consistent():
    rep = check_nesterenko(fib_seq(40), GOLDEN, prec=96)
    assert rep.divisor_violations == []
    assert rep.consistent is TriBool.TRUE
    assert rep.norm_consistent is TriBool.TRUE
    doc = rep.to_json()
    assert doc["consistent"] == "TRUE"


def test_check_nesterenko_divisor_violation():
    seq = FormSequence([
        FormRecord(n=0, Q=2, ell=(4, 2), delta=(4, 1)),
        FormRecord(n=1, Q=3, ell=(2, 3), delta=(2, 1)),
        FormRecord(n=2, Q=5, ell=(2, 5), delta=(2, 1)),
    ])
    rep = check_nesterenko(seq, Basis((parse_real("1/3"),)), prec=64)
    assert rep.divisor_violations
    assert rep.consistent is TriBool.FALSE


# -- verifier ----------------------------------------------------------------

def test_verify_golden_holds():
    v = verify_conclusion(fib_seq(40), GOLDEN, [1], 100, Fraction(3, 10),
                          prec=96)
    assert v.status == "holds" and v.witness is None
    assert v.diagnostics["budget_estimate"] == 51     # |a_1| <= 25
    doc = v.to_json()
    assert doc["status"] == "holds" and doc["witness"] is None


def test_verify_rational_violation_witness():
    half = Basis((parse_real("1/2"),))
    seq = flat_seq([2, 5, 10])
    v = verify_conclusion(seq, half, [2], 10, Fraction(1, 2))
    assert v.status == "violated"
    assert v.witness.a == (Fraction(2), Fraction(-1))
    # |2*(1/2) - 1| = 0 <= 10^(-3/2)
    assert cmp_abs_vs_power(Fraction(0), 10, Fraction(-3, 2)) < 0


def test_verify_empty_prefix_range_vacuous():
    v = verify_conclusion(fib_seq(20), GOLDEN, [Fraction(-1, 2)], 50,
                          Fraction(1, 4))
    assert v.status == "holds"
    assert v.diagnostics["candidates_checked"] == 0


def test_verify_budget_refusal():
    with pytest.raises(BudgetExceeded) as e:
        verify_conclusion(fib_seq(40), GOLDEN, [3], 100, Fraction(3, 10),
                          budget=1000)
    assert e.value.estimate > 1000


def test_verify_witness_rechecks():
    third_fifth = Basis((parse_real("1/3"), parse_real("2/5")))
    recs = [FormRecord(n=i, Q=q, ell=(3, 5, 15 * q), delta=(3, 5, 15))
            for i, q in enumerate([2, 4, 8])]
    seq = FormSequence(recs)
    v = verify_conclusion(seq, third_fifth, [1, 1], 8, Fraction(1, 2))
    assert v.status == "violated"
    a = v.witness
    assert dual_membership(a, seq.lattice(2))
    val = a.a[0] * Fraction(1, 3) + a.a[1] * Fraction(2, 5) + a.a[2]
    assert cmp_abs_vs_power(val, 8, Fraction(-3, 2)) <= 0
    assert any(x != 0 for x in a.a)


def test_verify_irrational_ball_mode_agrees_with_scan():
    # tiny instance, exhaustive float-free oracle via exact convergent facts:
    # best approx of phi with q<=4 is 3/2 -> |2 phi - 3| ~ 0.236 > 5^(-1.2)
    seq = flat_seq([2, 3, 5])
    v = verify_conclusion(seq, GOLDEN, [1], 5, Fraction(1, 5), prec=96)
    assert v.status == "holds"


# -- scale reduction ---------------------------------------------------------

def test_reduce_scale_golden_example():
    qp, eps2 = reduce_scale(100, Fraction(1, 5), GOLDEN, prec=96)
    assert eps2 == Fraction(1, 10)
    assert abs(qp.mid - 489) < 1
    assert qp.rad < Fraction(1, 2**40)


def test_reduce_scale_grows_for_eps2():
    for Q in (2, 10, 100):
        qp, eps2 = reduce_scale(Q, 2, GOLDEN, prec=96)
        assert eps2 == 1
        assert tri_compare(qp, Q) is TriBool.TRUE


def test_reduce_scale_preconditions():
    with pytest.raises(ValidationError):
        reduce_scale(1, Fraction(1, 5), GOLDEN)
    with pytest.raises(ValidationError):
        reduce_scale(10, 0, GOLDEN)
