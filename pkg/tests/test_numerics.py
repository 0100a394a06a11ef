"""Ball arithmetic: containment, nesting, comparisons, certified functions.

Oracle values are frozen 50-digit decimal strings (checked once against
mpmath, which is also used directly for randomized cross-checks).
"""

import json
import math
import random
from fractions import Fraction

import pytest
from mpmath import mp, mpf
import mpmath

from latforms.numerics import (
    BallReal,
    PrecisionCapExceeded,
    NumericsError,
    RealConstant,
    TriBool,
    cmp_abs_vs_power,
    dyadic_to_decimal,
    decimal_to_fraction,
    floor_root_rational,
    floor_scaled_power,
    nth_root_floor,
    parse_real,
    refine,
    tri_compare,
)

# frozen independent oracles (50 decimal digits)
ZETA3 = Fraction("1.20205690315959428539973816151144999076498629234049")
ZETA2 = Fraction("1.64493406684822643647241516664602518921894990120679")
EULER_E = Fraction("2.71828182845904523536028747135266249775724709369995")
GOLDEN = Fraction("1.61803398874989484820458683436563811772030917980576")
SQRT2 = Fraction("1.41421356237309504880168872420969807856967187537694")
LN2 = Fraction("0.69314718055994530941723212145817656807550013436025")
TOL50 = Fraction(1, 10**48)


def contains_close(ball, q, tol=TOL50):
    return ball.lower - tol <= q <= ball.upper + tol


# ---------------------------------------------------------------------------
# constants / parse_real / refine
# ---------------------------------------------------------------------------

def test_named_constants_contain_frozen_values():
    for name, val in [("golden", GOLDEN), ("zeta3", ZETA3),
                      ("zeta2", ZETA2), ("e", EULER_E)]:
        ball = parse_real(name, 128).at(128)
        assert contains_close(ball, val), name
        assert ball.rad <= Fraction(1, 2**126)


def test_sqrt_constants():
    ball = parse_real("sqrt(2)", 128).at(128)
    assert contains_close(ball, SQRT2)
    assert parse_real("sqrt(4)", 32).at(32).is_exact
    assert parse_real("sqrt(4)", 32).at(32).mid == 2
    sq = parse_real("sqrt(13)", 96).at(96)
    prod = sq * sq
    assert prod.contains(13)


def test_parse_rational_and_decimal():
    h = parse_real("0.5", 32)
    assert h.at(32).is_exact and h.at(32).mid == Fraction(1, 2)
    h = parse_real("-3/7", 64)
    assert h.exact == Fraction(-3, 7)
    ball = h.at(64)
    assert ball.contains(Fraction(-3, 7))
    assert parse_real("1.25e2", 32).exact == 125


def test_parse_uncertain_literal():
    h = parse_real("1.2020569031±1e-9", 64)
    ball = h.at(64)
    assert ball.contains(ZETA3)
    assert ball.rad >= Fraction(1, 10**9)
    # refining cannot shrink below the stated uncertainty
    again = refine(h, 4096)
    assert again.rad >= Fraction(1, 10**9)


def test_parse_errors():
    for bad in ["frobnitz", "sqrt(-1)", "sqrt(0)", "1/0", "1.2.3", "1.0±-1"]:
        with pytest.raises(ValueError):
            parse_real(bad, 64)
    with pytest.raises(ValueError):
        parse_real("golden", 8)  # below minimum precision


def test_refine_nesting_and_cap():
    h = parse_real("zeta3", 32)
    balls = [h.at(p) for p in (32, 64, 128, 256, 512)]
    for wide, narrow in zip(balls, balls[1:]):
        assert wide.contains(narrow)
        assert narrow.rad < wide.rad
    with pytest.raises(PrecisionCapExceeded):
        refine(h, (1 << 16) + 1)


def test_golden_satisfies_quadratic():
    # phi^2 = phi + 1 must hold within enclosure widths
    phi = parse_real("golden", 192).at(192)
    lhs = phi * phi
    rhs = phi + 1
    assert tri_compare(lhs - rhs, Fraction(1, 2**180)) is TriBool.FALSE
    assert (lhs - rhs).contains(0)


# ---------------------------------------------------------------------------
# tri_compare
# ---------------------------------------------------------------------------

def test_tri_compare_pinned_cases():
    a = BallReal.from_endpoints(Fraction(29, 10), Fraction(31, 10), 64)
    b = BallReal.from_endpoints(Fraction(9, 10), Fraction(11, 10), 64)
    assert tri_compare(a, b) is TriBool.TRUE
    c = BallReal.from_endpoints(Fraction(1, 2), Fraction(3, 2), 64)
    assert tri_compare(c, c) is TriBool.UNKNOWN
    half = BallReal.exact(Fraction(1, 2))
    assert tri_compare(half, half) is TriBool.FALSE  # not strictly greater


def test_tribool_is_not_a_bool():
    with pytest.raises(TypeError):
        bool(TriBool.UNKNOWN)
    assert TriBool.TRUE.certain and not TriBool.UNKNOWN.certain


# ---------------------------------------------------------------------------
# ring ops: containment property under random exact inputs
# ---------------------------------------------------------------------------

def test_ring_ops_contain_exact_results():
    rng = random.Random(20260823)
    for _ in range(300):
        a = Fraction(rng.randint(-999, 999), rng.randint(1, 99))
        b = Fraction(rng.randint(-999, 999), rng.randint(1, 99))
        prec = rng.choice([24, 48, 64])
        x, y = BallReal.exact(a, prec), BallReal.exact(b, prec)
        assert (x + y).contains(a + b)
        assert (x - y).contains(a - b)
        assert (x * y).contains(a * b)
        if b != 0:
            try:
                assert (x / y).contains(a / b)
            except NumericsError:
                # y's enclosure may straddle zero only if b was non-dyadic tiny
                assert not y.is_exact
        assert abs(x).contains(abs(a))
        assert x._int_pow(3).contains(a**3)


def test_exact_dyadics_stay_exact():
    x = BallReal.exact(Fraction(3, 8), 24)
    y = BallReal.exact(12345678901234567890123456789, 24)
    z = x * y + x - y
    assert z.is_exact
    assert z.mid == Fraction(3, 8) * 12345678901234567890123456789 + Fraction(3, 8) - 12345678901234567890123456789


def test_division_by_zero_straddling_ball():
    num = BallReal.exact(1, 32)
    den = BallReal.from_endpoints(Fraction(-1), Fraction(1), 32)
    with pytest.raises(NumericsError):
        num / den


def test_abs_straddling_zero():
    b = BallReal.from_endpoints(Fraction(-1, 4), Fraction(1, 2), 32)
    a = abs(b)
    assert a.lower >= 0
    assert a.contains(Fraction(1, 2)) and a.contains(0)


# ---------------------------------------------------------------------------
# log / exp / sqrt / pow against mpmath
# ---------------------------------------------------------------------------

def _mp(x: Fraction):
    return mpf(x.numerator) / x.denominator


def test_log_exp_cross_check_mpmath():
    mp.prec = 300
    rng = random.Random(7)
    for _ in range(60):
        q = Fraction(rng.randint(1, 10**6), rng.randint(1, 10**6))
        ball = BallReal.exact(q, 128)
        lg = ball.log()
        assert _mp(lg.lower) <= mpmath.log(_mp(q)) <= _mp(lg.upper)
        e = BallReal.exact(Fraction(rng.randint(-400, 400), rng.randint(1, 64)), 128).exp()
        assert e.lower > 0
    x = BallReal.exact(2, 160).log()
    assert contains_close(x, LN2)


def test_log_exact_one_is_exact_zero():
    assert BallReal.exact(1, 64).log().is_exact
    assert BallReal.exact(1, 64).log().mid == 0


def test_log_rejects_nonpositive():
    with pytest.raises(NumericsError):
        BallReal.exact(0, 64).log()
    with pytest.raises(NumericsError):
        BallReal.from_endpoints(Fraction(-1), Fraction(2), 64).log()


def test_exp_log_roundtrip():
    for q in [Fraction(5, 3), Fraction(1, 7), Fraction(100), Fraction(1, 10**6)]:
        ball = BallReal.exact(q, 128)
        back = ball.log().exp()
        assert back.contains(q)


def test_log_of_huge_integer_is_cheap_and_tight():
    n = 12345678901234567890 ** 100  # ~6400 bits
    lg = BallReal.exact(n, 96).log()
    mp.prec = 7000
    true = mpmath.log(mpf(n))
    assert _mp(lg.lower) <= true <= _mp(lg.upper)
    assert lg.rad < Fraction(1, 2**80)


def test_pow_rational_and_ball_exponents():
    mp.prec = 300
    b = BallReal.exact(2, 128)
    c = b.pow(Fraction(1, 2))
    assert contains_close(c, SQRT2)
    d = BallReal.exact(10, 128).pow(Fraction(-3, 2))
    true = mpf(10) ** mpf(-1.5)
    assert _mp(d.lower) <= true <= _mp(d.upper)
    expo = BallReal.exact(Fraction(1, 2), 128)
    c2 = b.pow(expo)
    assert contains_close(c2, SQRT2, Fraction(1, 2**100))


def test_sqrt_bracket():
    s = BallReal.exact(2, 128).sqrt()
    assert contains_close(s, SQRT2)
    z = BallReal.exact(0, 64).sqrt()
    assert z.contains(0) and z.upper < Fraction(1, 2**32)


# ---------------------------------------------------------------------------
# integer root / exact threshold helpers
# ---------------------------------------------------------------------------

def test_nth_root_floor_property():
    rng = random.Random(99)
    for _ in range(200):
        x = rng.randint(0, 10**30)
        n = rng.randint(1, 7)
        r = nth_root_floor(x, n)
        assert r**n <= x < (r + 1) ** n


def test_nth_root_floor_pinned():
    assert nth_root_floor(2**60, 2) == 2**30
    assert nth_root_floor(3**45, 45) == 3
    assert nth_root_floor(3**45 - 1, 45) == 2
    assert nth_root_floor(0, 5) == 0


def test_floor_root_rational():
    assert floor_root_rational(10**6, 7, 3) == 52  # (1e6/7)^(1/3) = 52.27..
    rng = random.Random(5)
    for _ in range(100):
        a, b, v = rng.randint(0, 10**12), rng.randint(1, 10**6), rng.randint(1, 5)
        r = floor_root_rational(a, b, v)
        assert r**v * b <= a < (r + 1) ** v * b


def test_floor_scaled_power():
    # floor(3 * 10^(12/5)) = floor(753.56...) = 753
    assert floor_scaled_power(Fraction(3), 10, Fraction(12, 5)) == 753
    assert floor_scaled_power(Fraction(1), 100, Fraction(4, 5)) == 39  # 100^0.8
    assert floor_scaled_power(Fraction(5), 10, Fraction(-1, 2)) == 1  # 5/sqrt(10)
    assert floor_scaled_power(Fraction(0), 10, Fraction(3)) == 0


def test_cmp_abs_vs_power():
    # |a| vs 10^(3/2): 31 < 31.62... < 32
    assert cmp_abs_vs_power(Fraction(31), 10, Fraction(3, 2)) == -1
    assert cmp_abs_vs_power(Fraction(-32), 10, Fraction(3, 2)) == 1
    assert cmp_abs_vs_power(Fraction(8), 2, Fraction(3)) == 0
    assert cmp_abs_vs_power(Fraction(1, 32), 2, Fraction(-5)) == 0


# ---------------------------------------------------------------------------
# serialization
# ---------------------------------------------------------------------------

def test_ball_json_roundtrip():
    ball = parse_real("golden", 80).at(80)
    j = json.loads(json.dumps(ball.to_json()))
    back = BallReal.from_json(j)
    assert back.mid == ball.mid and back.rad == ball.rad and back.prec == ball.prec


def test_dyadic_decimal_exactness():
    for q in [Fraction(3, 4), Fraction(-7, 32), Fraction(5), Fraction(0),
              Fraction(1, 2**40), Fraction(-123456789, 2**10)]:
        s = dyadic_to_decimal(q)
        assert decimal_to_fraction(s) == q
