import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from polycert.ff import PrimeField
from polycert.upoly import (
    NEG_INF,
    Poly,
    RatFunc,
    RatVec,
    _mul_karatsuba,
    _mul_numpy,
    _mul_schoolbook,
    interpolate,
    poly_gcd,
    poly_lcm,
    xgcd,
)

F7 = PrimeField(7)
FBIG = PrimeField(2**31 - 1)


def rand_poly(rng, field, deg):
    if deg < 0:
        return Poly.zero(field)
    coeffs = [rng.randrange(field.p) for _ in range(deg + 1)]
    coeffs[-1] = rng.randrange(1, field.p)
    return Poly(field, coeffs)


def test_mul_example_mod_7():
    # (x+1)(x-1) = x^2 - 1 = x^2 + 6 mod 7
    f = Poly.of(F7, 1, 1)
    g = Poly.of(F7, 6, 1)
    assert f * g == Poly.of(F7, 6, 0, 1)


def test_mul_by_zero_absorbs():
    f = Poly.of(F7, 3, 2, 1)
    assert (f * Poly.zero(F7)).is_zero()
    assert f.deg == 2 and Poly.zero(F7).deg == NEG_INF


def test_divmod_exact_and_trivial():
    x2 = Poly.of(F7, 0, 0, 1)
    x = Poly.of(F7, 0, 1)
    q, r = divmod(x2, x)
    assert q == x and r.is_zero()
    with pytest.raises(ZeroDivisionError):
        divmod(x, Poly.zero(F7))


def test_divmod_roundtrip_random():
    rng = random.Random(1)
    for _ in range(1000):
        f = rand_poly(rng, F7, rng.randrange(-1, 17))
        g = rand_poly(rng, F7, rng.randrange(0, 17))
        q, r = divmod(f, g)
        assert q * g + r == f
        assert r.is_zero() or r.deg < g.deg


def test_eval_examples():
    # f = 3 + 2x + x^2 at 2: 3 + 4 + 4 = 11 = 4 mod 7
    f = Poly.of(F7, 3, 2, 1)
    assert f(2) == 4
    c = Poly.of(F7, 5)
    assert all(c(a) == 5 for a in range(7))
    assert Poly.zero(F7)(3) == 0
    # root found by brute force over F_7
    g = Poly.of(F7, 6, 0, 1)  # x^2 - 1
    roots = [a for a in range(7) if g(a) == 0]
    assert roots and all(g(a) == 0 for a in roots)


def test_eval_is_ring_hom():
    rng = random.Random(2)
    for _ in range(200):
        f = rand_poly(rng, F7, rng.randrange(-1, 9))
        g = rand_poly(rng, F7, rng.randrange(-1, 9))
        a = rng.randrange(7)
        assert (f * g)(a) == F7.mul(f(a), g(a))
        assert (f + g)(a) == F7.add(f(a), g(a))


def test_xgcd_examples():
    f = Poly.of(F7, 1, 0, 1)  # x^2 + 1
    g = Poly.of(F7, 3, 1)  # x + 3
    d, s, t = xgcd(f, g)
    # -3 is not a root of x^2+1 mod 7 (9+1=10=3), so the gcd is 1
    assert d.is_one()
    assert s * f + t * g == d
    # self gcd
    d2, s2, t2 = xgcd(f, f)
    assert d2 == f.monic() and s2 * f + t2 * f == d2
    # gcd with zero
    d3, s3, t3 = xgcd(Poly.zero(F7), g)
    assert d3 == g.monic() and s3.is_zero() and t3 == Poly.of(F7, F7.inv(g.lc()))
    with pytest.raises(ValueError):
        xgcd(Poly.zero(F7), Poly.zero(F7))


def test_xgcd_bezout_identity_random():
    rng = random.Random(3)
    for _ in range(300):
        f = rand_poly(rng, F7, rng.randrange(-1, 10))
        g = rand_poly(rng, F7, rng.randrange(-1, 10))
        if f.is_zero() and g.is_zero():
            continue
        d, s, t = xgcd(f, g)
        assert s * f + t * g == d
        assert d.lc() == 1
        if not f.is_zero():
            assert (f % d).is_zero()
        if not g.is_zero():
            assert (g % d).is_zero()
        # normalized Bezout degree bounds
        if f.deg != NEG_INF and g.deg != NEG_INF and d.deg < min(f.deg, g.deg):
            if not s.is_zero():
                assert s.deg < g.deg - d.deg
            if not t.is_zero():
                assert t.deg < f.deg - d.deg


def test_interpolate_examples():
    assert interpolate(F7, [(0, 5)]) == Poly.of(F7, 5)
    assert interpolate(F7, [(0, 1), (1, 2)]) == Poly.of(F7, 1, 1)
    with pytest.raises(ValueError):
        interpolate(F7, [(1, 2), (1, 3)])


def test_interpolate_roundtrip():
    rng = random.Random(4)
    for _ in range(100):
        f = rand_poly(rng, F7, rng.randrange(-1, 6))
        pts = [(a, f(a)) for a in range(7)]
        assert interpolate(F7, pts) == f


@given(
    a=st.lists(st.integers(0, 6), max_size=80),
    b=st.lists(st.integers(0, 6), max_size=80),
)
@settings(max_examples=200, deadline=None)
def test_mul_backends_agree_small_field(a, b):
    f = Poly(F7, a)
    g = Poly(F7, b)
    expected = Poly(F7, _mul_schoolbook(7, f.coeffs, g.coeffs) if f.coeffs and g.coeffs else [])
    assert f * g == expected


def test_mul_backends_agree_large_field():
    rng = random.Random(5)
    p = FBIG.p
    for _ in range(30):
        la = rng.randrange(1, 200)
        lb = rng.randrange(1, 200)
        a = [rng.randrange(p) for _ in range(la)]
        b = [rng.randrange(p) for _ in range(lb)]
        ref = _mul_schoolbook(p, a, b)
        assert _mul_numpy(p, a, b) == ref
        got = _mul_karatsuba(p, a, b)
        assert [c % p for c in got] == ref


def test_ratfunc_reduction_and_denominator():
    x = Poly.x(F7)
    r = RatFunc(x, x)  # x/x -> 1
    assert r.num.is_one() and r.den.is_one()
    assert r.is_polynomial()
    r2 = RatFunc(Poly.one(F7), x)
    assert not r2.is_polynomial()
    # denom is 1 iff the value is a polynomial
    both = r2 + RatFunc(x * x - Poly.one(F7), x)  # (1 + x^2 - 1)/x = x
    assert both.is_polynomial() and both.num == x


def test_ratvec_common_denominator():
    x = Poly.x(F7)
    one = Poly.one(F7)
    v = RatVec.normalize(F7, [(one, x), (one, x * x)])
    assert v.common_den == x * x
    nr = v.numer_row()
    assert nr[0] == x and nr[1] == one
    v2 = RatVec.normalize(F7, [(one, one), (x, one)])
    assert v2.common_den.is_one() and v2.is_polynomial()
    v3 = RatVec.normalize(F7, [(x, x)])
    assert v3.entries[0].num.is_one() and v3.entries[0].den.is_one()
    with pytest.raises(ZeroDivisionError):
        RatVec.normalize(F7, [(one, Poly.zero(F7))])


def test_ratfunc_field_ops():
    rng = random.Random(6)
    for _ in range(100):
        a = RatFunc(rand_poly(rng, F7, rng.randrange(0, 4)),
                    rand_poly(rng, F7, rng.randrange(0, 4)))
        b = RatFunc(rand_poly(rng, F7, rng.randrange(0, 4)),
                    rand_poly(rng, F7, rng.randrange(0, 4)))
        s = a + b
        assert s - b == a
        if not b.is_zero():
            q = a / b
            assert q * b == a
        assert poly_gcd(s.num, s.den).is_one() or s.num.is_zero()


def test_gcd_lcm_relations():
    rng = random.Random(7)
    for _ in range(100):
        f = rand_poly(rng, F7, rng.randrange(0, 6))
        g = rand_poly(rng, F7, rng.randrange(0, 6))
        d = poly_gcd(f, g)
        m = poly_lcm(f, g)
        assert (m % f).is_zero() and (m % g).is_zero()
        assert (d * m).monic() == (f * g).monic()
