import random

import pytest

from polycert.ff import PrimeField
from polycert.matfield import FieldMat
from polycert.polymat import (
    PolyMat,
    PolyMatView,
    SubmatrixView,
    ToeplitzOp,
    ToeplitzProductView,
    PolyVecView,
    ScaledVecView,
    hermite_shift,
)
from polycert.upoly import NEG_INF, Poly

F7 = PrimeField(7)
F97 = PrimeField(97)


def rand_poly(rng, field, dmax):
    deg = rng.randrange(-1, dmax + 1)
    if deg < 0:
        return Poly.zero(field)
    c = [rng.randrange(field.p) for _ in range(deg)] + [rng.randrange(1, field.p)]
    return Poly(field, c)


def rand_pm(rng, field, m, n, d):
    return PolyMat(field, [[rand_poly(rng, field, d) for _ in range(n)] for _ in range(m)],
                   ncols=n)


def test_eval_mat_examples():
    const = PolyMat.from_coeff_lists(F7, [[[3], [5]], [[0], [1]]])
    assert const.eval_at(4) == FieldMat(F7, [[3, 5], [0, 1]])
    xmat = PolyMat.from_coeff_lists(F7, [[[0, 1]]])
    assert xmat.eval_at(3) == FieldMat(F7, [[3]])
    assert const.deg == 0 and PolyMat.zero(F7, 2, 2).deg == NEG_INF


def test_eval_is_multiplicative():
    rng = random.Random(50)
    for _ in range(30):
        a = rand_pm(rng, F97, 4, 4, 3)
        b = rand_pm(rng, F97, 4, 4, 3)
        alpha = rng.randrange(97)
        assert a.mul(b).eval_at(alpha) == a.eval_at(alpha).matmul(b.eval_at(alpha))


def test_mul_examples_and_convolution_oracle():
    i2 = PolyMat.identity(F7, 2)
    rng = random.Random(51)
    a = rand_pm(rng, F7, 2, 2, 2)
    assert a.mul(i2) == a
    x = PolyMat.from_coeff_lists(F7, [[[0, 1]]])
    assert x.mul(x) == PolyMat.from_coeff_lists(F7, [[[0, 0, 1]]])
    # naive triple-loop convolution oracle
    b = rand_pm(rng, F7, 2, 3, 2)
    prod = a.mul(b)
    for i in range(2):
        for j in range(3):
            acc = Poly.zero(F7)
            for k in range(2):
                acc = acc + a.rows[i][k] * b.rows[k][j]
            assert prod.rows[i][j] == acc


def test_degree_bound_of_product():
    rng = random.Random(52)
    for _ in range(20):
        a = rand_pm(rng, F97, 3, 3, 2)
        b = rand_pm(rng, F97, 3, 3, 3)
        c = a.mul(b)
        if c.deg != NEG_INF:
            assert c.deg <= (a.deg if a.deg != NEG_INF else 0) + (
                b.deg if b.deg != NEG_INF else 0
            )


def test_row_combination_matches_mul():
    rng = random.Random(53)
    a = rand_pm(rng, F97, 4, 3, 2)
    lam = [rng.randrange(97) for _ in range(4)]
    combo = a.scalar_row_combination(lam)
    row = PolyMat(F97, [[Poly.constant(F97, c) for c in lam]], ncols=4)
    assert combo == row.mul(a).rows[0]


def test_toeplitz_layout_and_apply():
    # rho=2, m=3: values v[0..3]; C[i][j] = v[i - j + 2]
    vals = [1, 2, 3, 4]
    top = ToeplitzOp(F7, 2, 3, vals)
    mat = top.materialize()
    assert mat.rows == [[3, 2, 1], [4, 3, 2]]
    with pytest.raises(ValueError):
        ToeplitzOp(F7, 2, 3, [1, 2, 3])
    rng = random.Random(54)
    a = FieldMat(F7, [[rng.randrange(7) for _ in range(4)] for _ in range(3)])
    assert top.apply_field_mat(a) == mat.matmul(a)
    x = [rng.randrange(7) for _ in range(2)]
    assert top.left_apply(x) == mat.transpose().matvec(x)
    zero = ToeplitzOp(F7, 2, 3, [0, 0, 0, 0])
    assert zero.materialize() == FieldMat.zero(F7, 2, 3)
    one_row = ToeplitzOp(F7, 1, 3, [5, 6, 0])
    assert one_row.materialize().rows == [[0, 6, 5]]


def test_toeplitz_product_view_consistency():
    rng = random.Random(55)
    for _ in range(20):
        m, n = rng.randrange(1, 5), rng.randrange(1, 5)
        rho = rng.randrange(1, m + 1)
        a = rand_pm(rng, F97, m, n, 3)
        top = ToeplitzOp(F97, rho, m, [rng.randrange(97) for _ in range(rho + m - 1)])
        view = ToeplitzProductView(top, a)
        product = view.materialize()
        alpha = rng.randrange(97)
        # (C.A)(alpha) computed two ways
        assert view.eval_at(alpha) == product.eval_at(alpha)
        assert view.eval_at(alpha) == top.apply_field_mat(a.eval_at(alpha))


def test_submatrix_view():
    rng = random.Random(56)
    a = rand_pm(rng, F97, 4, 5, 2)
    view = SubmatrixView(PolyMatView(a), [1, 3], [0, 2, 4])
    assert view.nrows == 2 and view.ncols == 3
    alpha = 17
    assert view.eval_at(alpha) == a.eval_at(alpha).submatrix([1, 3], [0, 2, 4])
    assert view.materialize() == a.submatrix([1, 3], [0, 2, 4])


def test_scaled_vec_view():
    rng = random.Random(57)
    d = rand_poly(rng, F97, 2)
    v = [rand_poly(rng, F97, 2) for _ in range(3)]
    sv = ScaledVecView(d, v)
    alpha = 23
    assert sv.eval_at(alpha) == [F97.mul(d(alpha), f(alpha)) for f in v]
    assert sv.materialize() == [d * f for f in v]
    pv = PolyVecView(v)
    assert pv.eval_at(alpha) == [f(alpha) for f in v]


def test_hermite_shift_is_increasing():
    s = hermite_shift(4, 3)
    assert s == [3, 6, 9, 12]
