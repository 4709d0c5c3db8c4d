"""Polynomial matrices and the cheap operations both parties may use.

Everything here is "verifier-safe": evaluation at a point, products, scalar
row combinations, transposes, normal-form shape checks, and Toeplitz
compression operators.  The expensive module-level computations (normal
forms, rank over F[x], rational solving) live in :mod:`polycert.oracles`
and are reserved for Provers and test oracles; verifier code must not
import that module.

Matrices with claimed products like C.A (C a Toeplitz operator) are
represented as lazy views that only ever evaluate C.A(alpha) = C @ A(alpha),
so the Verifier never pays for a polynomial matrix product it did not
receive.
"""

from __future__ import annotations

from dataclasses import dataclass

from .ff import PrimeField
from .matfield import FieldMat
from .upoly import NEG_INF, Poly


class PolyMat:
    """Dense m x n matrix of polynomials over a prime field.

    Treat instances as immutable after construction; the degree is cached
    lazily and everything downstream assumes entries never change.
    """

    __slots__ = ("field", "m", "n", "rows", "_deg")

    def __init__(self, field: PrimeField, rows, ncols: int | None = None):
        rows = [list(r) for r in rows]
        self.field = field
        self.m = len(rows)
        self.n = len(rows[0]) if rows else (ncols or 0)
        for r in rows:
            if len(r) != self.n:
                raise ValueError("ragged rows in matrix")
        self.rows = rows
        self._deg = None

    # -- constructors ----------------------------------------------------

    @classmethod
    def zero(cls, field, m, n):
        z = Poly.zero(field)
        return cls(field, [[z] * n for _ in range(m)], ncols=n)

    @classmethod
    def identity(cls, field, n):
        z = Poly.zero(field)
        o = Poly.one(field)
        return cls(field, [[o if i == j else z for j in range(n)] for i in range(n)],
                   ncols=n)

    @classmethod
    def from_coeff_lists(cls, field, entries, ncols: int | None = None):
        """entries[i][j] is a low-to-high coefficient list."""
        return cls(field, [[Poly(field, c) for c in row] for row in entries],
                   ncols=ncols)

    @classmethod
    def from_field_mat(cls, mat: FieldMat) -> "PolyMat":
        f = mat.field
        return cls(f, [[Poly.constant(f, c) for c in row] for row in mat.rows],
                   ncols=mat.n)

    @classmethod
    def row_vector(cls, entries) -> "PolyMat":
        entries = list(entries)
        return cls(entries[0].field, [entries])

    # -- structure -------------------------------------------------------

    @property
    def deg(self):
        """Max entry degree; NEG_INF for a zero or empty matrix."""
        if self._deg is None:
            d = NEG_INF
            for row in self.rows:
                for e in row:
                    if e.deg != NEG_INF and (d == NEG_INF or e.deg > d):
                        d = e.deg
            self._deg = d
        return self._deg

    @property
    def working_deg(self) -> int:
        """max(1, deg): the d_A convention used in all probability bounds."""
        d = self.deg
        return 1 if d == NEG_INF else max(1, int(d))

    def is_zero(self) -> bool:
        return all(e.is_zero() for row in self.rows for e in row)

    def __eq__(self, other):
        return (
            isinstance(other, PolyMat)
            and self.field.p == other.field.p
            and self.m == other.m
            and self.n == other.n
            and self.rows == other.rows
        )

    def __repr__(self):
        return f"PolyMat({self.m}x{self.n}, deg {self.deg}, mod {self.field.p})"

    # -- verifier-safe operations -----------------------------------------

    def eval_at(self, alpha: int) -> FieldMat:
        """Entrywise Horner evaluation."""
        return FieldMat(
            self.field, [[e(alpha) for e in row] for row in self.rows],
            ncols=self.n, normalize=False,
        )

    def transpose(self) -> "PolyMat":
        cols = [[row[j] for row in self.rows] for j in range(self.n)]
        return PolyMat(self.field, cols, ncols=self.m)

    def submatrix(self, row_idx, col_idx) -> "PolyMat":
        col_idx = list(col_idx)
        return PolyMat(
            self.field,
            [[self.rows[i][j] for j in col_idx] for i in row_idx],
            ncols=len(col_idx),
        )

    def row(self, i) -> list:
        return list(self.rows[i])

    def stack(self, other: "PolyMat") -> "PolyMat":
        if self.n != other.n:
            raise ValueError("dimension mismatch in stack")
        return PolyMat(self.field, self.rows + other.rows, ncols=self.n)

    def mul(self, other: "PolyMat") -> "PolyMat":
        if self.n != other.m:
            raise ValueError("dimension mismatch in matrix product")
        z = Poly.zero(self.field)
        out = []
        for i in range(self.m):
            row_i = self.rows[i]
            out_row = []
            for j in range(other.n):
                acc = z
                for k in range(self.n):
                    a = row_i[k]
                    b = other.rows[k][j]
                    if a.coeffs and b.coeffs:
                        acc = acc + a * b
                out_row.append(acc)
            out.append(out_row)
        return PolyMat(self.field, out, ncols=other.n)

    def add(self, other: "PolyMat") -> "PolyMat":
        if self.m != other.m or self.n != other.n:
            raise ValueError("dimension mismatch in add")
        return PolyMat(
            self.field,
            [[a + b for a, b in zip(r1, r2)] for r1, r2 in zip(self.rows, other.rows)],
            ncols=self.n,
        )

    def sub(self, other: "PolyMat") -> "PolyMat":
        if self.m != other.m or self.n != other.n:
            raise ValueError("dimension mismatch in sub")
        return PolyMat(
            self.field,
            [[a - b for a, b in zip(r1, r2)] for r1, r2 in zip(self.rows, other.rows)],
            ncols=self.n,
        )

    def scalar_row_combination(self, lam: list) -> list:
        """lam @ A for a field-element row vector lam: a list of Poly."""
        if len(lam) != self.m:
            raise ValueError("dimension mismatch in row combination")
        z = Poly.zero(self.field)
        out = []
        for j in range(self.n):
            acc = z
            for i, c in enumerate(lam):
                if c:
                    acc = acc + self.rows[i][j].scale(c)
            out.append(acc)
        return out


def poly_row_eval(row: list, alpha: int) -> list:
    return [f(alpha) for f in row]


def poly_row_deg(row: list):
    d = NEG_INF
    for f in row:
        if f.deg != NEG_INF and (d == NEG_INF or f.deg > d):
            d = f.deg
    return d


def scale_poly_row(d: Poly, row: list) -> list:
    return [d * f for f in row]


# -- normal form shape checks (cheap, deterministic, O(l n) degree reads) ---


@dataclass(frozen=True)
class PivotProfile:
    """Pivot columns (0-based, strictly increasing) and their degrees."""

    indices: tuple
    degrees: tuple


def check_hermite_shape(h: PolyMat):
    """Does H satisfy the Hermite form conditions?

    Pivot of a row is its last nonzero column; requires monic pivots,
    strictly increasing pivot indices (which forces zeros right of pivots),
    and strictly smaller degrees below each pivot.  Any zero row fails.
    Returns (ok, PivotProfile or None).
    """
    indices = []
    degrees = []
    for i in range(h.m):
        row = h.rows[i]
        k = None
        for j in range(h.n - 1, -1, -1):
            if not row[j].is_zero():
                k = j
                break
        if k is None:
            return False, None
        if indices and k <= indices[-1]:
            return False, None
        if row[k].lc() != 1:
            return False, None
        indices.append(k)
        degrees.append(int(row[k].deg))
    for idx, (k, d) in enumerate(zip(indices, degrees)):
        for i2 in range(idx + 1, h.m):
            e = h.rows[i2][k]
            if not e.is_zero() and e.deg >= d:
                return False, None
    return True, PivotProfile(tuple(indices), tuple(degrees))


def shifted_row_degree(row: list, shift: list):
    """max_j (deg(row_j) + shift_j) over nonzero entries; NEG_INF if zero row."""
    best = NEG_INF
    for f, s in zip(row, shift):
        if f.coeffs:
            v = int(f.deg) + s
            if best == NEG_INF or v > best:
                best = v
    return best


def shifted_pivot(row: list, shift: list):
    """Rightmost column attaining the shifted row degree, or None for a zero row."""
    best = shifted_row_degree(row, shift)
    if best == NEG_INF:
        return None
    for j in range(len(row) - 1, -1, -1):
        if row[j].coeffs and int(row[j].deg) + shift[j] == best:
            return j
    return None


def check_popov_shape(mat: PolyMat, shift: list):
    """Does P satisfy the shifted Popov form conditions for this shift?

    The pivot of each row is located as the rightmost column determining the
    shifted row degree; the checks are then monic pivots, strictly increasing
    pivot indices, and strictly smaller degrees above and below each pivot.
    Returns (ok, PivotProfile or None).
    """
    if len(shift) != mat.n:
        raise ValueError("shift length must equal the column dimension")
    indices = []
    degrees = []
    for i in range(mat.m):
        k = shifted_pivot(mat.rows[i], shift)
        if k is None:
            return False, None
        if indices and k <= indices[-1]:
            return False, None
        if mat.rows[i][k].lc() != 1:
            return False, None
        indices.append(k)
        degrees.append(int(mat.rows[i][k].deg))
    for idx, (k, d) in enumerate(zip(indices, degrees)):
        for i2 in range(mat.m):
            if i2 == idx:
                continue
            e = mat.rows[i2][k]
            if not e.is_zero() and e.deg >= d:
                return False, None
    return True, PivotProfile(tuple(indices), tuple(degrees))


def hermite_shift(n: int, t: int) -> list:
    """The shift for which the s-Popov form coincides with the Hermite form.

    Column j (0-based) gets weight (j+1)*t; for t larger than every degree in
    the form, the rightmost-pivot rule then forces the pivot to the last
    nonzero entry of each row, which is exactly the Hermite pivot rule.
    """
    return [(j + 1) * t for j in range(n)]


# -- Toeplitz compression ----------------------------------------------------


class ToeplitzOp:
    """rho x m Toeplitz matrix described by rho + m - 1 field elements.

    C[i][j] = values[i - j + m - 1]; the operator is applied to evaluated
    matrices or vectors without ever forming a polynomial product.
    """

    __slots__ = ("field", "rho", "m", "values")

    def __init__(self, field: PrimeField, rho: int, m: int, values):
        values = [v % field.p for v in values]
        if len(values) != rho + m - 1 and not (rho == 0 and not values):
            raise ValueError(
                f"Toeplitz spec needs rho+m-1 = {rho + m - 1} values, got {len(values)}"
            )
        self.field = field
        self.rho = rho
        self.m = m
        self.values = values

    def entry(self, i: int, j: int) -> int:
        return self.values[i - j + self.m - 1]

    def materialize(self) -> FieldMat:
        return FieldMat(
            self.field,
            [[self.entry(i, j) for j in range(self.m)] for i in range(self.rho)],
            ncols=self.m, normalize=False,
        )

    def apply_field_mat(self, mat: FieldMat) -> FieldMat:
        """C @ M for an evaluated m x n matrix."""
        if mat.m != self.m:
            raise ValueError("dimension mismatch in Toeplitz application")
        p = self.field.p
        out = []
        for i in range(self.rho):
            crow = [self.entry(i, j) for j in range(self.m)]
            out.append(
                [sum(c * mat.rows[k][j] for k, c in enumerate(crow)) % p
                 for j in range(mat.n)]
            )
        return FieldMat(self.field, out, ncols=mat.n, normalize=False)

    def left_apply(self, x: list) -> list:
        """x @ C for a length-rho vector."""
        if len(x) != self.rho:
            raise ValueError("dimension mismatch in Toeplitz application")
        p = self.field.p
        return [
            sum(x[i] * self.entry(i, j) for i in range(self.rho)) % p
            for j in range(self.m)
        ]

    def apply_poly_mat(self, mat: PolyMat) -> PolyMat:
        """C @ A as an explicit polynomial matrix (Prover-side only)."""
        if mat.m != self.m:
            raise ValueError("dimension mismatch in Toeplitz application")
        z = Poly.zero(self.field)
        out = []
        for i in range(self.rho):
            row = []
            for j in range(mat.n):
                acc = z
                for k in range(self.m):
                    c = self.entry(i, k)
                    if c:
                        acc = acc + mat.rows[k][j].scale(c)
                row.append(acc)
            out.append(row)
        return PolyMat(self.field, out, ncols=mat.n)


# -- lazy matrix/vector views used by the Verifier ---------------------------


class MatView:
    """Interface: nrows, ncols, deg_bound, eval_at(alpha) -> FieldMat."""

    __slots__ = ()


class PolyMatView(MatView):
    __slots__ = ("mat",)

    def __init__(self, mat: PolyMat):
        self.mat = mat

    @property
    def nrows(self):
        return self.mat.m

    @property
    def ncols(self):
        return self.mat.n

    @property
    def deg_bound(self):
        return self.mat.deg

    def eval_at(self, alpha: int) -> FieldMat:
        return self.mat.eval_at(alpha)

    def materialize(self) -> PolyMat:
        return self.mat


class ToeplitzProductView(MatView):
    """The product C.A seen only through evaluations C @ A(alpha)."""

    __slots__ = ("top", "mat", "_cache")

    def __init__(self, top: ToeplitzOp, mat: PolyMat):
        if top.m != mat.m:
            raise ValueError("dimension mismatch in Toeplitz product")
        self.top = top
        self.mat = mat
        self._cache = {}

    @property
    def nrows(self):
        return self.top.rho

    @property
    def ncols(self):
        return self.mat.n

    @property
    def deg_bound(self):
        # deg(C.A) <= deg(A); the Verifier cannot know the exact degree
        return self.mat.deg

    def eval_at(self, alpha: int) -> FieldMat:
        got = self._cache.get(alpha)
        if got is None:
            got = self.top.apply_field_mat(self.mat.eval_at(alpha))
            if len(self._cache) > 8:
                self._cache.clear()
            self._cache[alpha] = got
        return got

    def materialize(self) -> PolyMat:
        return self.top.apply_poly_mat(self.mat)


class SubmatrixView(MatView):
    __slots__ = ("base", "row_idx", "col_idx")

    def __init__(self, base: MatView, row_idx, col_idx):
        self.base = base
        self.row_idx = list(row_idx)
        self.col_idx = list(col_idx)

    @property
    def nrows(self):
        return len(self.row_idx)

    @property
    def ncols(self):
        return len(self.col_idx)

    @property
    def deg_bound(self):
        return self.base.deg_bound

    def eval_at(self, alpha: int) -> FieldMat:
        return self.base.eval_at(alpha).submatrix(self.row_idx, self.col_idx)

    def materialize(self) -> PolyMat:
        return self.base.materialize().submatrix(self.row_idx, self.col_idx)


class VecView:
    """Interface: length, deg_bound, eval_at(alpha) -> list of field elements."""

    __slots__ = ()


class PolyVecView(VecView):
    __slots__ = ("entries",)

    def __init__(self, entries: list):
        self.entries = list(entries)

    @property
    def length(self):
        return len(self.entries)

    @property
    def deg_bound(self):
        return poly_row_deg(self.entries)

    def eval_at(self, alpha: int) -> list:
        return [f(alpha) for f in self.entries]

    def materialize(self) -> list:
        return self.entries


class ScaledVecView(VecView):
    """d * v for a public polynomial d and polynomial row vector v."""

    __slots__ = ("scalar", "entries")

    def __init__(self, scalar: Poly, entries: list):
        self.scalar = scalar
        self.entries = list(entries)

    @property
    def length(self):
        return len(self.entries)

    @property
    def deg_bound(self):
        from .upoly import deg_add

        return deg_add(self.scalar.deg, poly_row_deg(self.entries))

    def eval_at(self, alpha: int) -> list:
        c = self.scalar(alpha)
        p = self.scalar.field.p
        return [c * f(alpha) % p for f in self.entries]

    def materialize(self) -> list:
        return [self.scalar * f for f in self.entries]
