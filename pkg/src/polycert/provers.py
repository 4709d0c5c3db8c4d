"""Honest Prover strategies for every protocol.

Honest provers may do everything the Verifier must not: rank and normal
forms over F[x], rational system solving, exact determinants.  Las Vegas
searches (the Toeplitz commitment loop, the coprime mixer draw) use the
prover's own seeded randomness, so a fixed prover seed reproduces a
transcript bit for bit; retry caps turn a stuck search into ProverGaveUp
rather than a hang.

On a false statement an honest prover does not crash: it degrades to a
well-formed best effort and lets the Verifier reject.
"""

from __future__ import annotations

import random

from .matfield import (
    FieldMat,
    det_field,
    nullvector_left,
    pluq,
    solve_right,
    sparse_representative,
)
from .oracles import (
    LOW_RANK,
    NO_SOLUTION,
    rank_and_profile,
    rational_solve_left,
)
from .polymat import MatView, PolyMat, ToeplitzOp, VecView
from .protocols import ProverGaveUp, wdeg
from .upoly import Poly, poly_gcd

COPRIME_RETRY_CAP = 100
RSM_OUTER_CAP = 20
RSM_INNER_FACTOR = 20
EVAL_PROBE_CAP = 8


class HonestProver:
    """Computes true witnesses; never causes rejection of a true statement
    (given the advertised #S lower bounds)."""

    def __init__(self, seed: int = 0):
        self.rng = random.Random(seed)
        self._frrsm_cache: dict = {}
        self._rsm_solutions: list | None = None

    def begin_run(self):
        self._frrsm_cache.clear()
        self._rsm_solutions = None

    # -- singularity / nonsingularity ------------------------------------

    def singularity_kernel_vector(self, a: PolyMat, alpha: int) -> list:
        v = nullvector_left(a.eval_at(alpha))
        if v is None:
            # statement is false (or alpha was impossibly lucky); stay well-formed
            return [1] + [0] * (a.m - 1)
        return v

    def nonsingularity_point(self, view: MatView, sigma: int) -> int:
        n = view.nrows
        d = wdeg(view.deg_bound)
        for alpha in range(min(sigma, n * d + 1)):
            if det_field(view.eval_at(alpha)) != 0:
                return alpha
        return 0

    def nonsingularity_solution(self, view: MatView, alpha: int, b: list) -> list:
        w = solve_right(view.eval_at(alpha), b)
        if w is None:
            return [0] * view.ncols
        return w

    # -- rank protocols -----------------------------------------------------

    def rank_lb_sets(self, view: MatView, rho: int):
        """Row/column sets with A[I, J] nonsingular, certified via evaluation.

        A full-rank evaluation proves independence over F[x]; if no probe
        point works, fall back to exact fraction-free rank profiles.
        """
        for alpha in range(EVAL_PROBE_CAP):
            f = pluq(view.eval_at(alpha))
            if f.rank >= rho:
                return sorted(f.perm_rows[:rho]), sorted(f.perm_cols[:rho])
        mat = view.materialize()
        _, row_profile = rank_and_profile(mat.transpose())
        if len(row_profile) >= rho:
            rows = list(row_profile[:rho])
            _, col_profile = rank_and_profile(mat.submatrix(rows, range(mat.n)))
            if len(col_profile) >= rho:
                return rows, list(col_profile[:rho])
        # claim is false; send something syntactically valid
        return list(range(rho)), list(range(rho))

    def rank_ub_gamma(self, a: PolyMat, rho: int, alpha: int, v: list) -> list:
        gamma = sparse_representative(a.eval_at(alpha), v, rho)
        if gamma is None:
            return list(v)
        return gamma

    # -- determinant ----------------------------------------------------------

    def field_det_factors(self, b: FieldMat, beta: int):
        f = pluq(b)
        lflat = [c for row in f.lower.rows for c in row]
        uflat = [c for row in f.upper.rows for c in row]
        return f.rank, f.perm_rows, f.perm_cols, lflat, uflat

    # -- full-rank row space membership ------------------------------------------

    def _frrsm_solution(self, view: MatView, vec: VecView, hint):
        """A polynomial u with u A = v, or None when no such u exists."""
        if hint is not None and hint[0] == "rsm" and self._rsm_solutions is not None:
            return self._rsm_solutions[hint[1]]
        key = (id(view), id(vec))
        if key in self._frrsm_cache:
            return self._frrsm_cache[key][0]
        mat = view.materialize()
        if isinstance(vec, VecView):
            target = vec.materialize()
        else:
            target = list(vec)
        u = rational_solve_left(mat, target)
        if u is LOW_RANK or u is NO_SOLUTION or not u.is_polynomial():
            sol = None
        else:
            sol = [e.num for e in u.entries]
        self._frrsm_cache[key] = (sol, view, vec)
        return sol

    def frrsm_g(self, view: MatView, vec: VecView, c: list, hint) -> Poly:
        u = self._frrsm_solution(view, vec, hint)
        field = _field_of(view)
        if u is None:
            return Poly.zero(field)
        acc = Poly.zero(field)
        for ui, ci in zip(u, c):
            acc = acc + ui.scale(ci)
        return acc

    def frrsm_w(self, view: MatView, vec: VecView, c: list, g: Poly,
                alpha: int, hint) -> list:
        u = self._frrsm_solution(view, vec, hint)
        if u is None:
            return [0] * view.nrows
        return [f(alpha) for f in u]

    # -- coprimality ----------------------------------------------------------------

    def coprime_witness(self, fs: list, sigma: int):
        from .upoly import xgcd

        field = fs[0].field
        t = len(fs)
        if t == 1:
            f1 = fs[0]
            if f1.is_constant() and not f1.is_zero():
                return Poly.constant(field, field.inv(f1.lc())), Poly.zero(field), []
            return Poly.zero(field), Poly.zero(field), []
        if _true_gcd(fs) is not None:
            # gcd of the whole family is nontrivial: statement is false
            return Poly.zero(field), Poly.zero(field), [0] * (t - 2)
        for _ in range(COPRIME_RETRY_CAP):
            betas = [self.rng.randrange(sigma) for _ in range(t - 2)]
            h = fs[1]
            for b, f in zip(betas, fs[2:]):
                h = h + f.scale(b)
            if fs[0].is_zero():
                if h.is_constant() and not h.is_zero():
                    return Poly.zero(field), Poly.constant(field, field.inv(h.lc())), betas
                continue
            if h.is_zero():
                if fs[0].is_constant():
                    return (
                        Poly.constant(field, field.inv(fs[0].lc())),
                        Poly.zero(field),
                        betas,
                    )
                continue
            g, s1, s2 = xgcd(fs[0], h)
            if g.is_one():
                return s1, s2, betas
        raise ProverGaveUp("coprime witness search exceeded its retry cap")

    # -- row space membership (Algorithm: honest prover) ---------------------------------

    def rsm_rank(self, a: PolyMat) -> int:
        return rank_and_profile(a)[0]

    def rsm_commitment(self, a: PolyMat, v: list, rho: int, t: int, sigma: int):
        """Toeplitz compressions and denominators with coprime gcd.

        Las Vegas: redraw each compression until the compressed system is
        full rank and solvable, and redraw the whole batch until the
        denominators are globally coprime.  Caps: 20 t draws per batch, 20
        batches.
        """
        m = a.m
        spec_len = rho + m - 1
        for _ in range(RSM_OUTER_CAP):
            tops: list = []
            dens: list = []
            sols: list = []
            draws = 0
            while len(tops) < t:
                draws += 1
                if draws > RSM_INNER_FACTOR * t:
                    raise ProverGaveUp(
                        "Toeplitz compression search exceeded its draw cap"
                    )
                top = ToeplitzOp(
                    a.field, rho, m,
                    [self.rng.randrange(sigma) for _ in range(spec_len)],
                )
                compressed = top.apply_poly_mat(a)
                w = rational_solve_left(compressed, v)
                if w is LOW_RANK or w is NO_SOLUTION:
                    continue
                tops.append(top)
                dens.append(w.common_den)
                sols.append(w.numer_row())
            g = dens[0]
            for den in dens[1:]:
                g = poly_gcd(g, den)
            if g.is_one():
                self._rsm_solutions = sols
                return tops, dens
        raise ProverGaveUp("coprime denominators not found within the batch cap")


def _field_of(view) -> object:
    mat = getattr(view, "mat", None)
    if mat is not None:
        return mat.field
    return view.materialize().field


def _true_gcd(fs: list):
    """The gcd of the family if it is nontrivial, else None."""
    g = fs[0]
    for f in fs[1:]:
        g = poly_gcd(g, f)
    if g.is_one():
        return None
    return g
