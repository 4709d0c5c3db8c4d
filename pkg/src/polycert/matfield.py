"""Exact linear algebra over the base field.

One elimination kernel (PLUQ with topmost-row, leftmost-column pivoting)
backs rank, column rank profile, nullspace, system solving and determinant,
so there is a single correctness surface.  Both protocol parties use these
routines: the Prover to find witnesses, the Verifier only for the evaluated
checks it is allowed to do anyway.
"""

from __future__ import annotations

from dataclasses import dataclass

from .ff import PrimeField


class FieldMat:
    """Dense m x n matrix over a prime field; entries are reduced ints."""

    __slots__ = ("field", "m", "n", "rows")

    def __init__(self, field: PrimeField, rows, ncols: int | None = None,
                 normalize: bool = True):
        rows = [list(r) for r in rows]
        self.field = field
        self.m = len(rows)
        self.n = len(rows[0]) if rows else (ncols or 0)
        for r in rows:
            if len(r) != self.n:
                raise ValueError("ragged rows in matrix")
        if normalize:
            p = field.p
            rows = [[c % p for c in r] for r in rows]
        self.rows = rows

    @classmethod
    def zero(cls, field, m, n):
        return cls(field, [[0] * n for _ in range(m)], ncols=n, normalize=False)

    @classmethod
    def identity(cls, field, n):
        return cls(
            field, [[1 if i == j else 0 for j in range(n)] for i in range(n)],
            ncols=n, normalize=False,
        )

    def __eq__(self, other):
        return (
            isinstance(other, FieldMat)
            and self.field.p == other.field.p
            and self.m == other.m
            and self.n == other.n
            and self.rows == other.rows
        )

    def __repr__(self):
        return f"FieldMat({self.m}x{self.n} mod {self.field.p})"

    def copy_rows(self):
        return [list(r) for r in self.rows]

    def transpose(self) -> "FieldMat":
        cols = [[row[j] for row in self.rows] for j in range(self.n)]
        return FieldMat(self.field, cols, ncols=self.m, normalize=False)

    def submatrix(self, row_idx, col_idx) -> "FieldMat":
        col_idx = list(col_idx)
        return FieldMat(
            self.field,
            [[self.rows[i][j] for j in col_idx] for i in row_idx],
            ncols=len(col_idx),
            normalize=False,
        )

    def matvec(self, v: list) -> list:
        """A @ v for a length-n vector."""
        if len(v) != self.n:
            raise ValueError("dimension mismatch in matvec")
        p = self.field.p
        return [sum(a * b for a, b in zip(row, v)) % p for row in self.rows]

    def vecmat(self, v: list) -> list:
        """v @ A for a length-m vector."""
        if len(v) != self.m:
            raise ValueError("dimension mismatch in vecmat")
        p = self.field.p
        out = [0] * self.n
        for vi, row in zip(v, self.rows):
            if vi:
                for j, a in enumerate(row):
                    out[j] += vi * a
        return [c % p for c in out]

    def matmul(self, other: "FieldMat") -> "FieldMat":
        if self.n != other.m:
            raise ValueError("dimension mismatch in matmul")
        p = self.field.p
        bt = other.transpose().rows
        out = [
            [sum(a * b for a, b in zip(row, col)) % p for col in bt]
            for row in self.rows
        ]
        return FieldMat(self.field, out, ncols=other.n, normalize=False)


@dataclass
class PluqFactorization:
    """A = P . L . U . Q with L unit lower m x r, U upper r x n.

    ``perm_rows[i]`` is the source row of elimination row i (P maps e_i to
    e_perm_rows[i]); ``perm_cols[j]`` is the source column at elimination
    position j.  ``perm_cols[:rank]`` is the column rank profile, already in
    increasing order because pivots are taken leftmost-first.
    """

    field: PrimeField
    m: int
    n: int
    rank: int
    perm_rows: list
    perm_cols: list
    lower: FieldMat  # m x r, unit diagonal
    upper: FieldMat  # r x n, nonzero diagonal

    def col_rank_profile(self) -> tuple:
        return tuple(sorted(self.perm_cols[: self.rank]))

    def row_rank_profile(self) -> tuple:
        return tuple(sorted(self.perm_rows[: self.rank]))

    def det(self) -> int:
        if self.m != self.n:
            raise ValueError("determinant of a non-square factorization")
        if self.rank < self.n:
            return 0
        p = self.field.p
        d = 1
        for i in range(self.rank):
            d = d * self.upper.rows[i][i] % p
        if perm_sign(self.perm_rows) * perm_sign(self.perm_cols) < 0:
            d = (p - d) % p
        return d

    def reconstruct(self) -> FieldMat:
        """P.L.U.Q, for verification."""
        p = self.field.p
        m, n, r = self.m, self.n, self.rank
        out = [[0] * n for _ in range(m)]
        for i in range(m):
            for j in range(n):
                acc = 0
                for k in range(r):
                    acc += self.lower.rows[i][k] * self.upper.rows[k][j]
                out[self.perm_rows[i]][self.perm_cols[j]] = acc % p
        return FieldMat(self.field, out, ncols=n, normalize=False)


def perm_sign(perm) -> int:
    seen = [False] * len(perm)
    sign = 1
    for i in range(len(perm)):
        if seen[i]:
            continue
        j = i
        length = 0
        while not seen[j]:
            seen[j] = True
            j = perm[j]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


def is_permutation(seq, n: int) -> bool:
    return len(seq) == n and sorted(seq) == list(range(n))


def pluq(mat: FieldMat) -> PluqFactorization:
    """Exact PLUQ factorization.

    Pivots are chosen greedily: columns examined in original order, first
    nonzero row from the top.  Columns left of position ``rank`` hold the
    elimination multipliers (the strict part of L); the live region of row i
    is columns >= current rank.
    """
    field = mat.field
    p = field.p
    m, n = mat.m, mat.n
    a = mat.copy_rows()
    perm_rows = list(range(m))
    perm_cols = list(range(n))
    r = 0
    for col in range(n):
        if r >= m:
            break
        pos = None
        for i in range(r, m):
            if a[i][col] != 0:
                pos = i
                break
        if pos is None:
            continue
        if pos != r:
            a[pos], a[r] = a[r], a[pos]
            perm_rows[pos], perm_rows[r] = perm_rows[r], perm_rows[pos]
        piv = a[r][col]
        inv_piv = field.inv(piv)
        for i in range(r + 1, m):
            c = a[i][col]
            if c:
                f = c * inv_piv % p
                row_i, row_r = a[i], a[r]
                for jj in range(r, n):
                    row_i[jj] = (row_i[jj] - f * row_r[jj]) % p
                row_i[col] = f  # keep the multiplier in the eliminated slot
        if col != r:
            for i in range(m):
                a[i][r], a[i][col] = a[i][col], a[i][r]
            perm_cols[r], perm_cols[col] = perm_cols[col], perm_cols[r]
        r += 1
    lower = [[0] * r for _ in range(m)]
    upper = [[0] * n for _ in range(r)]
    for i in range(m):
        for k in range(min(i, r)):
            lower[i][k] = a[i][k]
        if i < r:
            lower[i][i] = 1
            for j in range(i, n):
                upper[i][j] = a[i][j]
    return PluqFactorization(
        field, m, n, r, perm_rows, perm_cols,
        FieldMat(field, lower, ncols=r, normalize=False),
        FieldMat(field, upper, ncols=n, normalize=False),
    )


def rank(mat: FieldMat) -> int:
    return pluq(mat).rank


def det_field(mat: FieldMat) -> int:
    if mat.m != mat.n:
        raise ValueError("determinant of a non-square matrix")
    return pluq(mat).det()


def solve_right(mat: FieldMat, b: list):
    """Any w with A w = b, or None if the system is inconsistent."""
    if len(b) != mat.m:
        raise ValueError("dimension mismatch in solve_right")
    field = mat.field
    p = field.p
    f = pluq(mat)
    r = f.rank
    # forward substitution: L c = P^{-1} b  (unit lower, all m rows)
    pb = [b[f.perm_rows[i]] for i in range(mat.m)]
    c = [0] * r
    for i in range(mat.m):
        acc = pb[i]
        for k in range(min(i, r)):
            acc -= f.lower.rows[i][k] * c[k]
        acc %= p
        if i < r:
            c[i] = acc
        elif acc != 0:
            return None  # inconsistent
    # back substitution on U (r x n), free variables set to zero
    w_perm = [0] * mat.n
    for i in range(r - 1, -1, -1):
        acc = c[i]
        for j in range(i + 1, r):
            acc -= f.upper.rows[i][j] * w_perm[j]
        acc %= p
        w_perm[i] = acc * field.inv(f.upper.rows[i][i]) % p
    w = [0] * mat.n
    for j in range(mat.n):
        w[f.perm_cols[j]] = w_perm[j]
    return w


def solve_with_det(mat: FieldMat, b: list):
    """(w, det) with A w = b for square A, or None if A is singular.

    One factorization serves both the solve and the determinant, which the
    evaluation-interpolation rational solver calls once per sample point.
    """
    if mat.m != mat.n:
        raise ValueError("solve_with_det needs a square matrix")
    if len(b) != mat.m:
        raise ValueError("dimension mismatch in solve_with_det")
    field = mat.field
    p = field.p
    f = pluq(mat)
    if f.rank < mat.n:
        return None
    n = mat.n
    pb = [b[f.perm_rows[i]] for i in range(n)]
    c = [0] * n
    for i in range(n):
        acc = pb[i]
        for k in range(i):
            acc -= f.lower.rows[i][k] * c[k]
        c[i] = acc % p
    w_perm = [0] * n
    det = 1
    for i in range(n):
        det = det * f.upper.rows[i][i] % p
    if perm_sign(f.perm_rows) * perm_sign(f.perm_cols) < 0:
        det = (p - det) % p
    for i in range(n - 1, -1, -1):
        acc = c[i]
        for j in range(i + 1, n):
            acc -= f.upper.rows[i][j] * w_perm[j]
        acc %= p
        w_perm[i] = acc * field.inv(f.upper.rows[i][i]) % p
    w = [0] * n
    for j in range(n):
        w[f.perm_cols[j]] = w_perm[j]
    return w, det


def right_nullvector(mat: FieldMat):
    """A nonzero w with A w = 0, or None iff A has full column rank."""
    field = mat.field
    p = field.p
    f = pluq(mat)
    r = f.rank
    if r >= mat.n:
        return None
    # free column at permuted position r; solve U[:, :r] x = -U[:, r]
    x = [0] * r
    for i in range(r - 1, -1, -1):
        acc = (-f.upper.rows[i][r]) % p
        for j in range(i + 1, r):
            acc -= f.upper.rows[i][j] * x[j]
        acc %= p
        x[i] = acc * field.inv(f.upper.rows[i][i]) % p
    w = [0] * mat.n
    for j in range(r):
        w[f.perm_cols[j]] = x[j]
    w[f.perm_cols[r]] = 1
    return w


def nullvector_left(mat: FieldMat):
    """A nonzero v with v A = 0, or None iff A has full row rank."""
    return right_nullvector(mat.transpose())


def sparse_representative(mat: FieldMat, v: list, rho: int):
    """gamma supported on at most rho rank-profile columns with A gamma = A v.

    Returns None whenever rank(A) > rho; no attempt is made to exploit lucky
    right-hand sides, so outputs are deterministic.
    """
    if rho < 0:
        raise ValueError("rho must be nonnegative")
    if len(v) != mat.n:
        raise ValueError("dimension mismatch in sparse_representative")
    if rho >= mat.n:
        return list(v)
    f = pluq(mat)
    if f.rank > rho:
        return None
    target = mat.matvec(v)
    profile = list(f.col_rank_profile())
    sub = mat.submatrix(range(mat.m), profile)
    x = solve_right(sub, target)
    if x is None:  # cannot happen for rank <= rho, kept as a guard
        return None
    gamma = [0] * mat.n
    for j, col in enumerate(profile):
        gamma[col] = x[j]
    return gamma


def hamming_weight(v: list) -> int:
    return sum(1 for c in v if c)
