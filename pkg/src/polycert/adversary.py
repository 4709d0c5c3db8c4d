"""Best-effort cheating Prover strategies for false statements.

Each strategy validates (against the exact oracles) that its instance
really is false, then plays the strongest simple tactic we know for that
protocol: committing to rank-maximizing evaluation points, sending the
polynomial part of a rational witness, interpolating Bezout pairs that
vanish on a chosen subset of the sample set, or forging one denominator in
an otherwise honest row-membership commitment.  All messages stay
well-formed; cheating is semantic, never syntactic.
"""

from __future__ import annotations

import random

from .matfield import FieldMat, det_field, pluq, solve_right
from .oracles import (
    LOW_RANK,
    NO_SOLUTION,
    det_bareiss,
    rank_and_profile,
    rational_solve_left,
    row_membership_oracle,
)
from .polymat import MatView, PolyMat, ToeplitzOp
from .protocols import wdeg
from .provers import HonestProver
from .upoly import NEG_INF, Poly, RatFunc, poly_gcd


class InstanceActuallyTrue(Exception):
    """A cheat strategy was pointed at a statement that is in fact true."""


class CheatNonSingularity(HonestProver):
    """A is singular: commit a rank-maximizing point, answer when consistent."""

    def __init__(self, a: PolyMat, seed: int = 0):
        super().__init__(seed)
        if not det_bareiss(a).is_zero():
            raise InstanceActuallyTrue("matrix is nonsingular")

    def nonsingularity_point(self, view: MatView, sigma: int) -> int:
        n = view.nrows
        best, best_rank = 0, -1
        for alpha in range(min(sigma, n * wdeg(view.deg_bound) + 2)):
            r = pluq(view.eval_at(alpha)).rank
            if r > best_rank:
                best, best_rank = alpha, r
            if r == n - 1:
                break
        return best
    # the inherited solution method already solves when b is consistent


class CheatRankLowerBound(HonestProver):
    """rho exceeds the rank: pad true profiles and play the singular game."""

    def __init__(self, a: PolyMat, rho: int, seed: int = 0):
        super().__init__(seed)
        if rank_and_profile(a)[0] >= rho:
            raise InstanceActuallyTrue("rank really is at least rho")

    def rank_lb_sets(self, view: MatView, rho: int):
        mat = view.materialize()
        _, row_profile = rank_and_profile(mat.transpose())
        _, col_profile = rank_and_profile(mat)
        rows = _pad(list(row_profile), rho, mat.m)
        cols = _pad(list(col_profile), rho, mat.n)
        return rows, cols

    def nonsingularity_point(self, view: MatView, sigma: int) -> int:
        n = view.nrows
        best, best_rank = 0, -1
        for alpha in range(min(sigma, n * wdeg(view.deg_bound) + 2)):
            r = pluq(view.eval_at(alpha)).rank
            if r > best_rank:
                best, best_rank = alpha, r
        return best


def _pad(profile, rho, limit):
    out = list(profile[:rho])
    i = 0
    while len(out) < rho and i < limit:
        if i not in out:
            out.append(i)
        i += 1
    return sorted(out)


class CheatRankUpperBound(HonestProver):
    """rho is below the rank: hope the evaluation drops rank, then solve on
    the first rho pivot columns if the target happens to fall in their span."""

    def __init__(self, a: PolyMat, rho: int, seed: int = 0):
        super().__init__(seed)
        if rank_and_profile(a)[0] <= rho:
            raise InstanceActuallyTrue("rank really is at most rho")

    def rank_ub_gamma(self, a: PolyMat, rho: int, alpha: int, v: list) -> list:
        ev = a.eval_at(alpha)
        f = pluq(ev)
        take = list(f.col_rank_profile())[:rho]
        target = ev.matvec(v)
        sub = ev.submatrix(range(ev.m), take)
        x = solve_right(sub, target)
        if x is None:
            return [0] * a.n
        gamma = [0] * a.n
        for j, col in enumerate(take):
            gamma[col] = x[j]
        return gamma


class CheatFieldDeterminant(HonestProver):
    """beta is wrong: ship shape-valid factors whose product claims beta."""

    def __init__(self, b: FieldMat, beta: int, seed: int = 0):
        super().__init__(seed)
        self._true_det = det_field(b)
        if self._true_det == beta % b.field.p:
            raise InstanceActuallyTrue("beta is the determinant")

    def field_det_factors(self, b: FieldMat, beta: int):
        field = b.field
        nu = b.m
        if beta == 0:
            # claim singularity with a plausible low-rank factorization
            r = nu - 1
            lower = [[1 if i == j else 0 for j in range(r)] for i in range(nu)]
            upper = [
                [b.rows[i][j] if j >= i else 0 for j in range(nu)] for i in range(r)
            ]
            for i in range(r):
                if upper[i][i] == 0:
                    upper[i][i] = 1
            return (
                r,
                list(range(nu)),
                list(range(nu)),
                [c for row in lower for c in row],
                [c for row in upper for c in row],
            )
        if self._true_det != 0:
            f = pluq(b)
            scale = field.mul(beta, field.inv(self._true_det))
            upper = [list(r) for r in f.upper.rows]
            for j in range(nu):
                upper[nu - 1][j] = field.mul(upper[nu - 1][j], scale)
            return (
                f.rank,
                f.perm_rows,
                f.perm_cols,
                [c for row in f.lower.rows for c in row],
                [c for row in upper for c in row],
            )
        lower = [[1 if i == j else 0 for j in range(nu)] for i in range(nu)]
        upper = [[0] * nu for _ in range(nu)]
        for i in range(nu):
            upper[i][i] = 1
        upper[0][0] = beta
        return (
            nu,
            list(range(nu)),
            list(range(nu)),
            [c for row in lower for c in row],
            [c for row in upper for c in row],
        )


class CheatCoprime(HonestProver):
    """gcd != 1: interpolate a Bezout pair that satisfies the identity on as
    many sample points as the degree budget allows."""

    def __init__(self, fs: list, sigma: int, seed: int = 0):
        super().__init__(seed)
        field = fs[0].field
        g = fs[0]
        for f in fs[1:]:
            g = poly_gcd(g, f)
        if g.is_one():
            raise InstanceActuallyTrue("the family is coprime")
        t = len(fs)
        rng = random.Random(seed ^ 0x5EED)
        self._betas = [rng.randrange(sigma) for _ in range(max(0, t - 2))]
        h = fs[1] if t >= 2 else Poly.zero(field)
        for b, f in zip(self._betas, fs[2:]):
            h = h + f.scale(b)
        bound1 = max(1, max(wdeg(f.deg) for f in fs[1:])) if t >= 2 else wdeg(fs[0].deg)
        bound2 = wdeg(fs[0].deg)
        gh = poly_gcd(fs[0], h) if not (fs[0].is_zero() and h.is_zero()) else None
        # the identity cannot hold at a common root of f1 and h
        blocked = set()
        if gh is not None and not gh.is_one():
            for tau in range(sigma):
                if gh(tau) == 0:
                    blocked.add(tau)
        pool = [tau for tau in range(sigma) if tau not in blocked]
        size = min(len(pool), bound1 + bound2)
        s1 = s2 = None
        while size >= 0:
            taus = pool[:size]
            rows = []
            rhs = []
            for tau in taus:
                f1t = fs[0](tau)
                ht = h(tau)
                row = [f1t * pow(tau, j, field.p) % field.p for j in range(bound1)]
                row += [ht * pow(tau, k, field.p) % field.p for k in range(bound2)]
                rows.append(row)
                rhs.append(1)
            if not rows:
                s1, s2 = Poly.zero(field), Poly.zero(field)
                break
            sol = solve_right(
                FieldMat(field, rows, ncols=bound1 + bound2, normalize=False), rhs
            )
            if sol is not None:
                s1 = Poly(field, sol[:bound1])
                s2 = Poly(field, sol[bound1:])
                break
            size -= 1
        self._s1, self._s2 = s1, s2

    def coprime_witness(self, fs: list, sigma: int):
        return self._s1, self._s2, list(self._betas)


class CheatFullRankMembership(HonestProver):
    """v has a rational but non-polynomial solution: send the polynomial
    part of u.c and the true evaluation u(alpha)."""

    def __init__(self, a: PolyMat, v: list, sigma: int = 64, seed: int = 0):
        super().__init__(seed)
        self._sigma = sigma
        u = rational_solve_left(a, v)
        if u is LOW_RANK:
            raise InstanceActuallyTrue("claim is vacuous for low rank")
        if u is NO_SOLUTION:
            self._u = None
        else:
            if u.is_polynomial():
                raise InstanceActuallyTrue("v is in the polynomial row space")
            self._u = u

    def _rational(self, hint):
        return self._u

    def frrsm_g(self, view, vec, c, hint) -> Poly:
        """Interpolate g through sample points so that u(alpha) c = g(alpha)
        holds on as many alpha in S as the degree budget allows."""
        u = self._rational(hint)
        field = _field_of_view(view)
        if u is None:
            return Poly.zero(field)
        acc = RatFunc.zero(field)
        for ui, ci in zip(u.entries, c):
            acc = acc + ui * Poly.constant(field, ci)
        if acc.is_polynomial():
            return acc.num
        from .upoly import deg_add, deg_scale, interpolate

        bound = deg_add(deg_scale(view.nrows, view.deg_bound), vec.deg_bound)
        if bound == NEG_INF:
            return acc.num // acc.den
        budget = int(bound) + 1
        points = []
        tau = 0
        while len(points) < budget and tau < self._sigma:
            if acc.den(tau) != 0:
                points.append((tau, acc.eval(tau)))
            tau += 1
        if not points:
            return acc.num // acc.den
        return interpolate(field, points)

    def frrsm_w(self, view, vec, c, g, alpha, hint) -> list:
        u = self._rational(hint)
        if u is not None:
            try:
                return u.eval(alpha)
            except ZeroDivisionError:
                pass
        # no rational solution usable at alpha: solve the evaluated system
        ev = view.eval_at(alpha)
        w = solve_right(ev.transpose(), vec.eval_at(alpha))
        return w if w is not None else [0] * view.nrows


class CheatRowSpaceMembership(CheatFullRankMembership):
    """Membership fails: an honest-looking Toeplitz commitment with one
    forged denominator, then the interpolated-g tactic in the single
    sub-proof whose statement is false.

    The commitment is rebuilt per run, because composed protocols hand this
    strategy a fresh random target vector each time; whenever the particular
    target does lie in the row space, the strategy degrades gracefully to
    fully honest behavior.
    """

    def __init__(self, a: PolyMat, v: list | None, sigma: int, seed: int = 0):
        HonestProver.__init__(self, seed)
        self._sigma = sigma
        self._cheat_rng = random.Random(seed ^ 0xF00D)
        if v is not None and row_membership_oracle(a, v):
            raise InstanceActuallyTrue("v is in the polynomial row space")
        self._forged_index = None
        self._forged_rat = None

    def rsm_rank(self, a: PolyMat) -> int:
        return rank_and_profile(a)[0]

    def rsm_commitment(self, a, v, rho, t, sigma):
        rng = self._cheat_rng
        m = a.m
        field = a.field
        self._forged_index = None
        self._forged_rat = None
        tops: list = []
        dens: list = []
        sols: list = []
        rats: list = []
        guard = 0
        while len(tops) < t:
            guard += 1
            if guard > 200 * t:
                # cannot even reach full compressed rank / rational solutions:
                # fall back to all-ones denominators and per-point tactics
                ones = [Poly.one(field) for _ in range(t)]
                fallback = []
                while len(fallback) < t:
                    fallback.append(ToeplitzOp(
                        field, rho, m,
                        [rng.randrange(sigma) for _ in range(rho + m - 1)],
                    ))
                self._forged_index = -1  # every sub-proof is hostile
                self._rsm_solutions = [None] * t
                return fallback, ones
            top = ToeplitzOp(
                field, rho, m,
                [rng.randrange(sigma) for _ in range(rho + m - 1)],
            )
            compressed = top.apply_poly_mat(a)
            w = rational_solve_left(compressed, v)
            if w is LOW_RANK or w is NO_SOLUTION:
                continue
            tops.append(top)
            dens.append(w.common_den)
            sols.append(w.numer_row())
            rats.append(w)
        g = dens[0]
        for den in dens[1:]:
            g = poly_gcd(g, den)
        if g.is_one():
            # this particular target is a true member: play honestly
            self._rsm_solutions = sols
            return tops, dens
        last = dens[-1]
        forged = None
        for c in range(1, 1000):
            cand = last + Poly.constant(field, c)
            gg = cand
            for den in dens[:-1]:
                gg = poly_gcd(gg, den)
            if gg.is_one():
                forged = cand
                break
        if forged is None:
            raise RuntimeError("no coprime forgery found")
        self._forged_index = t - 1
        self._forged_rat = _scale_ratvec(forged, rats[-1])
        self._rsm_solutions = sols
        return tops, dens[:-1] + [forged]

    def _rational(self, hint):
        return self._forged_rat

    def _is_forged(self, hint) -> bool:
        if hint is None or hint[0] != "rsm" or self._forged_index is None:
            return False
        return self._forged_index == -1 or hint[1] == self._forged_index

    def frrsm_g(self, view, vec, c, hint) -> Poly:
        if not self._is_forged(hint):
            return HonestProver.frrsm_g(self, view, vec, c, hint)
        return CheatFullRankMembership.frrsm_g(self, view, vec, c, hint)

    def frrsm_w(self, view, vec, c, g, alpha, hint) -> list:
        if not self._is_forged(hint):
            return HonestProver.frrsm_w(self, view, vec, c, g, alpha, hint)
        return CheatFullRankMembership.frrsm_w(self, view, vec, c, g, alpha, hint)


def _scale_ratvec(scalar: Poly, vec):
    from .upoly import RatVec

    return RatVec([e * scalar for e in vec.entries])


def _field_of_view(view):
    mat = getattr(view, "mat", None)
    if mat is not None:
        return mat.field
    return view.materialize().field
