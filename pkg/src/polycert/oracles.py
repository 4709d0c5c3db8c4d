"""Module-aware computations on polynomial matrices: the Prover's toolbox.

Rank and column rank profile over F[x] (fraction-free Bareiss), exact
determinants, rational system solving with full row rank, Hermite and
shifted Popov forms with unimodular transformation tracking, kernel and
saturation bases, and a deterministic row-space membership oracle.

None of this is available to Verifier code: a Verifier that called these
routines would be recomputing the certified object, which defeats the whole
point.  The protocol layer enforces the split by never importing this
module.
"""

from __future__ import annotations

from . import matfield
from .matfield import pluq
from .polymat import PolyMat, check_hermite_shape
from .upoly import NEG_INF, Poly, RatFunc, RatVec, interpolate, xgcd


class _Outcome:
    __slots__ = ("name",)

    def __init__(self, name):
        self.name = name

    def __repr__(self):
        return self.name


LOW_RANK = _Outcome("LOW_RANK")
NO_SOLUTION = _Outcome("NO_SOLUTION")


# -- fraction-free elimination ------------------------------------------------


def rank_and_profile(mat: PolyMat):
    """Rank over F(x) and the lexicographically smallest independent column set.

    Fraction-free (Bareiss) elimination: every intermediate entry is a minor
    of the input, and each update divides exactly by the previous pivot.
    """
    m, n = mat.m, mat.n
    work = [list(row) for row in mat.rows]
    prev = Poly.one(mat.field)
    pr = 0
    profile = []
    for j in range(n):
        if pr >= m:
            break
        piv_row = None
        for i in range(pr, m):
            if not work[i][j].is_zero():
                piv_row = i
                break
        if piv_row is None:
            continue
        if piv_row != pr:
            work[piv_row], work[pr] = work[pr], work[piv_row]
        piv = work[pr][j]
        for i in range(pr + 1, m):
            head = work[i][j]
            row_i, row_pr = work[i], work[pr]
            for l in range(j + 1, n):
                num = piv * row_i[l] - head * row_pr[l]
                row_i[l] = num.divexact(prev)
            row_i[j] = Poly.zero(mat.field)
        prev = piv
        profile.append(j)
        pr += 1
    return pr, tuple(profile)


def det_bareiss(mat: PolyMat) -> Poly:
    """Exact determinant of a square polynomial matrix via Bareiss."""
    if mat.m != mat.n:
        raise ValueError("determinant of a non-square matrix")
    n = mat.n
    if n == 0:
        return Poly.one(mat.field)
    work = [list(row) for row in mat.rows]
    prev = Poly.one(mat.field)
    sign = 1
    for j in range(n):
        piv_row = None
        for i in range(j, n):
            if not work[i][j].is_zero():
                piv_row = i
                break
        if piv_row is None:
            return Poly.zero(mat.field)
        if piv_row != j:
            work[piv_row], work[j] = work[j], work[piv_row]
            sign = -sign
        piv = work[j][j]
        for i in range(j + 1, n):
            head = work[i][j]
            row_i, row_j = work[i], work[j]
            for l in range(j + 1, n):
                num = piv * row_i[l] - head * row_j[l]
                row_i[l] = num.divexact(prev)
            row_i[j] = Poly.zero(mat.field)
        prev = piv
    return prev if sign > 0 else -prev


# -- Algorithm: rational linear solving with full row rank --------------------


def rational_solve_left(mat: PolyMat, v: list, max_eval_probes: int = 8):
    """Solve u A = v over F(x) for a full-row-rank A.

    Returns LOW_RANK iff rank(A) < m; otherwise the unique rational solution
    u (a RatVec) when v lies in the F(x)-row space of A, else NO_SOLUTION.

    Full row rank is certified cheaply through evaluations when possible (a
    full-rank evaluation is proof), falling back to exact Bareiss
    elimination; the system itself is solved on the pivot-column submatrix
    by Cramer-style evaluation/interpolation when the field is big enough,
    or by Gaussian elimination over F(x) otherwise.  Either way the result
    is exact and verified against u A = v before returning.
    """
    m, n = mat.m, mat.n
    if len(v) != n:
        raise ValueError("dimension mismatch in rational solve")
    if m == 0:
        raise ValueError("rational solve needs at least one row")
    field = mat.field
    profile = None
    for alpha in range(min(max_eval_probes, field.p)):
        f = pluq(mat.eval_at(alpha))
        if f.rank == m:
            profile = f.col_rank_profile()
            break
    if profile is None:
        r, profile = rank_and_profile(mat)
        if r < m:
            return LOW_RANK
    sub = mat.submatrix(range(m), profile)
    y = [v[j] for j in profile]
    u = _solve_square_left(sub, y)
    common = u.common_den
    cleared = u.numer_row()
    if not _left_residual_is_zero(mat, v, cleared, common):
        return NO_SOLUTION
    return u


def _solve_square_left(b: PolyMat, y: list) -> RatVec:
    """u with u B = y for nonsingular square B (unique over F(x))."""
    m = b.m
    field = b.field
    deg_b = 0 if b.deg == NEG_INF else int(b.deg)
    deg_y = max((0 if f.deg == NEG_INF else int(f.deg)) for f in y) if y else 0
    npoints = m * deg_b + deg_y + 1
    # det roots can force skipping up to m*deg_b candidate points
    if field.p >= npoints + m * deg_b + 2:
        return _solve_square_left_evaluation(b, y, npoints)
    return _solve_square_left_fraction(b, y)


def _solve_square_left_evaluation(b: PolyMat, y: list, npoints: int) -> RatVec:
    field = b.field
    p = field.p
    m = b.m
    xs = []
    det_vals = []
    numers = [[] for _ in range(m)]
    alpha = 0
    bt_rows = b.transpose()
    while len(xs) < npoints:
        if alpha >= p:
            raise ArithmeticError("ran out of evaluation points")
        mt = bt_rows.eval_at(alpha)
        sol = matfield.solve_with_det(mt, [f(alpha) for f in y])
        if sol is not None:
            w, det_a = sol
            xs.append(alpha)
            det_vals.append(det_a)
            for i in range(m):
                numers[i].append(w[i] * det_a % p)
        alpha += 1
    det_poly = interpolate(field, zip(xs, det_vals))
    entries = []
    for i in range(m):
        num = interpolate(field, zip(xs, numers[i]))
        entries.append(RatFunc(num, det_poly))
    return RatVec(entries)


def _solve_square_left_fraction(b: PolyMat, y: list) -> RatVec:
    """Gaussian elimination over F(x) with eagerly reduced rational entries."""
    m = b.m
    field = b.field
    # solve B^T x = y^T
    work = [
        [RatFunc.of_poly(b.rows[j][i]) for j in range(m)] for i in range(m)
    ]
    rhs = [RatFunc.of_poly(f) for f in y]
    for col in range(m):
        piv = None
        for i in range(col, m):
            if not work[i][col].is_zero():
                piv = i
                break
        if piv is None:
            raise ArithmeticError("pivot submatrix was singular")
        work[col], work[piv] = work[piv], work[col]
        rhs[col], rhs[piv] = rhs[piv], rhs[col]
        inv_piv = RatFunc(work[col][col].den, work[col][col].num)
        for i in range(col + 1, m):
            if work[i][col].is_zero():
                continue
            f = work[i][col] * inv_piv
            for l in range(col, m):
                work[i][l] = work[i][l] - f * work[col][l]
            rhs[i] = rhs[i] - f * rhs[col]
    out = [RatFunc.zero(field) for _ in range(m)]
    for i in range(m - 1, -1, -1):
        acc = rhs[i]
        for l in range(i + 1, m):
            acc = acc - work[i][l] * out[l]
        out[i] = acc / work[i][i]
    return RatVec(out)


def _left_residual_is_zero(mat: PolyMat, v: list, cleared: list, common: Poly) -> bool:
    """Is (common_den * u) A == common_den * v, i.e. u A == v, exactly?

    Checked at deg_bound+1 points when the field allows, else by polynomial
    arithmetic; both are exact decisions.
    """
    field = mat.field
    p = field.p
    deg_w = max((f.deg for f in cleared), default=NEG_INF)
    bound = 0
    for d in (
        (deg_w + mat.deg) if (deg_w != NEG_INF and mat.deg != NEG_INF) else NEG_INF,
        (common.deg + max((f.deg for f in v), default=NEG_INF))
        if max((f.deg for f in v), default=NEG_INF) != NEG_INF
        else NEG_INF,
    ):
        if d != NEG_INF:
            bound = max(bound, int(d))
    npoints = bound + 1
    if p >= npoints:
        for alpha in range(npoints):
            wa = [f(alpha) for f in cleared]
            lhs = mat.eval_at(alpha).vecmat(wa)
            ca = common(alpha)
            rhs = [ca * f(alpha) % p for f in v]
            if lhs != rhs:
                return False
        return True
    z = Poly.zero(field)
    for j in range(mat.n):
        acc = z
        for i in range(mat.m):
            acc = acc + cleared[i] * mat.rows[i][j]
        if acc != common * v[j]:
            return False
    return True


# -- Hermite form with transformation ------------------------------------------


def hermite_form(mat: PolyMat):
    """The Hermite form H (r x n) and a unimodular U with U A = [H; 0].

    Columns are processed right to left; in each column the nonzero entries
    of the still-active rows are collapsed onto one row by extended-gcd row
    transforms, that row is frozen as the pivot row for the column, and a
    final pass reduces the below-pivot degrees.
    """
    field = mat.field
    m, n = mat.m, mat.n
    work = [list(row) for row in mat.rows]
    trans = [
        [Poly.one(field) if i == j else Poly.zero(field) for j in range(m)]
        for i in range(m)
    ]
    active = list(range(m))
    finalized = []  # (pivot_col, work_index), discovered right-to-left
    for j in range(n - 1, -1, -1):
        nz = [idx for idx in active if not work[idx][j].is_zero()]
        if not nz:
            continue
        acc = nz[0]
        for other in nz[1:]:
            a, b = work[acc][j], work[other][j]
            if b.is_zero():
                continue
            g, s, t = xgcd(a, b)
            qa = a.divexact(g)
            qb = b.divexact(g)
            _rows_transform(work, trans, acc, other, s, t, -qb, qa)
        piv = work[acc][j]
        if piv.lc() != 1:
            c = field.inv(piv.lc())
            work[acc] = [f.scale(c) for f in work[acc]]
            trans[acc] = [f.scale(c) for f in trans[acc]]
        finalized.append((j, acc))
        active.remove(acc)
    finalized.reverse()  # now pivot columns increase
    # degree-reduce the below-pivot entries, rightmost pivot column first so
    # later reductions cannot disturb already-reduced columns
    for pos_hi in range(len(finalized)):
        k_hi, idx_hi = finalized[pos_hi]
        for pos in range(pos_hi - 1, -1, -1):
            k, idx = finalized[pos]
            piv = work[idx][k]
            q = work[idx_hi][k] // piv
            if not q.is_zero():
                work[idx_hi] = [
                    f - q * g for f, g in zip(work[idx_hi], work[idx])
                ]
                trans[idx_hi] = [
                    f - q * g for f, g in zip(trans[idx_hi], trans[idx])
                ]
    h_rows = [work[idx] for _, idx in finalized]
    u_rows = [trans[idx] for _, idx in finalized] + [trans[idx] for idx in active]
    h = PolyMat(field, h_rows, ncols=n)
    u = PolyMat(field, u_rows, ncols=m)
    return h, u


def _rows_transform(work, trans, i1, i2, a11, a12, a21, a22):
    """(row_i1, row_i2) <- (a11 row_i1 + a12 row_i2, a21 row_i1 + a22 row_i2)."""
    for target in (work, trans):
        r1, r2 = target[i1], target[i2]
        new1 = [a11 * x + a12 * y for x, y in zip(r1, r2)]
        new2 = [a21 * x + a22 * y for x, y in zip(r1, r2)]
        target[i1] = new1
        target[i2] = new2


# -- shifted Popov form ---------------------------------------------------------


def _pivot_of(row, shift):
    """(pivot index, pivot degree) under the shift, or None for a zero row."""
    best = None
    for j, f in enumerate(row):
        if f.coeffs:
            val = int(f.deg) + shift[j]
            if best is None or val >= best[0]:
                best = (val, j)
    if best is None:
        return None
    return best[1], int(row[best[1]].deg)


def popov_form(mat: PolyMat, shift=None) -> PolyMat:
    """The unique shifted Popov row basis of A.

    Mulders-Storjohann pivot collisions bring the rows to weak Popov form
    (distinct pivots); pivots are then made monic, rows sorted by pivot
    index, and off-pivot entries in pivot columns reduced below the pivot
    degree by full divisions, largest shifted excess first.
    """
    field = mat.field
    if shift is None:
        shift = [0] * mat.n
    shift = list(shift)
    if len(shift) != mat.n:
        raise ValueError("shift length must equal the column dimension")
    rows = [list(r) for r in mat.rows if any(f.coeffs for f in r)]
    # weak Popov: no two rows share a pivot index
    pivots = [_pivot_of(r, shift) for r in rows]
    while True:
        by_col = {}
        clash = None
        for i, pv in enumerate(pivots):
            k = pv[0]
            if k in by_col:
                clash = (by_col[k], i)
                break
            by_col[k] = i
        if clash is None:
            break
        i1, i2 = clash
        k = pivots[i1][0]
        d1, d2 = pivots[i1][1], pivots[i2][1]
        if d1 < d2:
            i1, i2 = i2, i1
            d1, d2 = d2, d1
        # reduce row i1 by row i2: kill the leading term at column k
        c = field.mul(rows[i1][k].lc(), field.inv(rows[i2][k].lc()))
        e = d1 - d2
        step = Poly(field, [0] * e + [c])
        rows[i1] = [f - step * g for f, g in zip(rows[i1], rows[i2])]
        if any(f.coeffs for f in rows[i1]):
            pivots[i1] = _pivot_of(rows[i1], shift)
        else:
            rows.pop(i1)
            pivots.pop(i1)
    # sort by pivot index, make pivots monic
    order = sorted(range(len(rows)), key=lambda i: pivots[i][0])
    rows = [rows[i] for i in order]
    pivots = [pivots[i] for i in order]
    for i, (k, _) in enumerate(pivots):
        lc = rows[i][k].lc()
        if lc != 1:
            c = field.inv(lc)
            rows[i] = [f.scale(c) for f in rows[i]]
    # normalize off-pivot entries in pivot columns
    for i in range(len(rows)):
        _reduce_row_against_pivots(field, rows, pivots, i, shift)
    return PolyMat(field, rows, ncols=mat.n)


def _reduce_row_against_pivots(field, rows, pivots, i, shift):
    """Divide out every excess of row i at the other rows' pivot columns.

    Always reduces the largest shifted excess (rightmost on ties), which
    strictly decreases the (max excess, rightmost position) measure, so the
    loop terminates; a generous cap guards against logic errors.
    """
    guard = 0
    limit = 10000 * (len(rows) + 1)
    while True:
        best = None
        for j, (k, dpiv) in enumerate(pivots):
            if j == i:
                continue
            e = rows[i][k]
            if e.coeffs and e.deg >= dpiv:
                val = int(e.deg) + shift[k]
                if best is None or val > best[0] or (val == best[0] and k > best[1]):
                    best = (val, k, j)
        if best is None:
            return
        _, k, j = best
        q = rows[i][k] // rows[j][k]
        rows[i] = [f - q * g for f, g in zip(rows[i], rows[j])]
        guard += 1
        if guard > limit:
            raise RuntimeError("Popov normalization failed to terminate")


# -- kernels, saturation, membership -------------------------------------------


def kernel_basis_left(mat: PolyMat) -> PolyMat:
    """A basis of {p : p A = 0} as the rows of U that map A to zero rows."""
    h, u = hermite_form(mat)
    return PolyMat(mat.field, u.rows[h.m:], ncols=mat.m)


def kernel_basis_right(mat: PolyMat) -> PolyMat:
    return kernel_basis_left(mat.transpose()).transpose()


def saturation_basis(mat: PolyMat) -> PolyMat:
    """A row basis of Sat(A) = F[x]^(1 x n) intersect rowspace_F(x)(A).

    Computed as a left kernel basis of a right kernel basis of A, then
    normalized to zero-shift Popov form so the output is canonical.
    """
    k = kernel_basis_right(mat)
    if k.n == 0:
        return PolyMat.identity(mat.field, mat.n)
    basis = kernel_basis_left(k)
    return popov_form(basis, [0] * mat.n)


def row_membership_oracle(mat: PolyMat, v: list) -> bool:
    """Is v in the F[x]-row space of A?  Deterministic Hermite reduction."""
    if len(v) != mat.n:
        raise ValueError("dimension mismatch in membership oracle")
    h, _ = hermite_form(mat)
    ok, prof = check_hermite_shape(h) if h.m else (True, None)
    if h.m and not ok:
        raise AssertionError("hermite_form produced an out-of-shape result")
    w = list(v)
    for i in range(h.m - 1, -1, -1):
        k = prof.indices[i]
        piv = h.rows[i][k]
        q = w[k] // piv
        if not q.is_zero():
            w = [f - q * g for f, g in zip(w, h.rows[i])]
    return all(f.is_zero() for f in w)


def is_unimodular(mat: PolyMat) -> bool:
    if mat.m != mat.n:
        return False
    d = det_bareiss(mat)
    return d.is_constant() and not d.is_zero()
