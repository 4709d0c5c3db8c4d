"""The interactive protocols: Verifier state machines plus the session runner.

Every protocol is a function that drives one Session: it requests prover
messages, derives Verifier challenges, performs exactly the checks the
protocol prescribes, and raises ProtocolReject on the first failure
(remaining scheduled messages are never consumed).  Sub-protocols are
invoked inline between begin/end markers and share the session's single
challenge source, so a Fiat-Shamir run has one global hash chain.

The Verifier never recomputes certified objects.  Concretely: this module
must not import :mod:`polycert.oracles`, and products like C.A exist only
as evaluation views.  Everything the Verifier does is evaluation, matrix-
vector work over the base field, degree bookkeeping, and shape checks.

Strict mode enforces the advertised #S lower bound of the protocol actually
being run (the top-level one); bounds of nested sub-protocols are not
enforced separately, since the top-level bound is the one that guarantees
completeness and 1/2-soundness for the composite.
"""

from __future__ import annotations

from .ff import PrimeField
from .matfield import FieldMat, hamming_weight, is_permutation, perm_sign
from .polymat import (
    MatView,
    PolyMat,
    PolyMatView,
    PolyVecView,
    ScaledVecView,
    SubmatrixView,
    ToeplitzOp,
    ToeplitzProductView,
    VecView,
    check_hermite_shape,
    check_popov_shape,
)
from .transcript import (
    BoolPayload,
    ChallengeSource,
    FieldMatrixPayload,
    FieldScalar,
    FieldVector,
    IndexSetPayload,
    Message,
    PolyMatrixPayload,
    PolyPayload,
    PolyVectorPayload,
    ProtocolParams,
    RankClaimPayload,
    Reason,
    ShiftPayload,
    ToeplitzSpecPayload,
    Transcript,
    TranscriptError,
    Verdict,
    fieldmat_to_payload,
    payload_to_fieldmat,
    payload_to_poly,
    payload_to_polymat,
    payload_to_polyvec,
    poly_to_payload,
    polymat_to_payload,
    polyvec_to_payload,
)
from .upoly import NEG_INF, Poly, deg_add, deg_le, deg_scale

PROTOCOL_IDS = (
    "singularity",
    "nonsingularity",
    "rank_lb",
    "rank_ub",
    "rank",
    "determinant",
    "field_det",
    "system_solve",
    "matmul",
    "inverse",
    "frrsm",
    "coprime",
    "rsm",
    "rs_subset",
    "rs_equality",
    "row_basis",
    "hermite",
    "spopov",
    "saturated",
    "sat_basis",
    "unimod_completable",
    "kernel_basis",
)


class ProtocolReject(Exception):
    def __init__(self, reason: Reason, detail: str = ""):
        super().__init__(f"{reason.value}: {detail}")
        self.reason = reason
        self.detail = detail


class ProverGaveUp(Exception):
    """An honest Las Vegas prover exceeded its retry caps (not a rejection)."""


def wdeg(d) -> int:
    """The max(1, deg) convention used by every probability bound."""
    return 1 if d == NEG_INF else max(1, int(d))


def deg_lt(d, bound) -> bool:
    """deg < bound with the zero-polynomial convention."""
    if d == NEG_INF:
        return True
    if bound == NEG_INF:
        return False
    return d < bound


def rsm_rounds(sigma: int, rho: int, deg_a) -> int:
    """Number of Toeplitz compressions: 1 + ceil(log_{sigma/rho}(2 rho deg A)),
    clamped to at least 2.  Requires sigma > rho so the base exceeds 1."""
    if rho <= 0:
        raise ValueError("rsm_rounds needs a positive rank claim")
    if sigma <= rho:
        raise ValueError("sample set must be larger than the rank claim")
    x = 2 * rho * (0 if deg_a == NEG_INF else int(deg_a))
    k = 0
    num, den = 1, 1  # (sigma/rho)^k as an exact fraction
    while num < x * den:
        num *= sigma
        den *= rho
        k += 1
    return max(2, 1 + k)


class Session:
    """Single protocol run: message recording/replay plus challenge derivation."""

    def __init__(self, transcript: Transcript, prover=None, replay: bool = False):
        self.transcript = transcript
        self.params = transcript.params
        self.field: PrimeField = transcript.params.field()
        self.sigma = transcript.params.sigma
        self.prover = prover
        self.replay = replay
        self._cursor = 0
        self._sub_stack: list[str] = []
        self.rsm_strict_slack: int | None = None
        self.source = ChallengeSource(self.params, transcript.domain_tag())
        self.source.absorb(transcript.hash_prefix())

    # -- failure -----------------------------------------------------------

    def fail(self, reason: Reason, detail: str = ""):
        if self._sub_stack and reason is not Reason.PARAMS_INVALID:
            path = "/".join(self._sub_stack)
            raise ProtocolReject(
                Reason.SUBPROTOCOL_REJECTED, f"{path}: {reason.value}"
                + (f" ({detail})" if detail else "")
            )
        raise ProtocolReject(reason, detail)

    # -- strict-mode bound -----------------------------------------------------

    def declare_bound(self, bound: int):
        """Record the advertised #S lower bound; enforce it at top level in strict mode."""
        if not self._sub_stack:
            self.transcript.meta.setdefault("sigma_lower_bound", bound)
            if self.params.strict and self.sigma < bound:
                self.fail(
                    Reason.PARAMS_INVALID,
                    f"strict mode needs sigma >= {bound}, got {self.sigma}",
                )

    # -- message plumbing ----------------------------------------------------

    def _append(self, message: Message):
        self.transcript.append(message)
        self.source.absorb(message.encode())

    def _next_recorded(self, sender: str, label: str) -> Message:
        if self._cursor >= len(self.transcript.messages):
            self.fail(Reason.MALFORMED_MESSAGE, f"transcript ended before {label}")
        msg = self.transcript.messages[self._cursor]
        self._cursor += 1
        if msg.sender != sender or msg.label != label:
            self.fail(
                Reason.MALFORMED_MESSAGE,
                f"expected {sender}:{label}, found {msg.sender}:{msg.label}",
            )
        return msg

    def _prover_payload(self, label: str, kind, produce):
        if self.replay:
            payload = self._next_recorded("P", label).payload
        else:
            payload = produce()
        if not isinstance(payload, kind):
            self.fail(Reason.MALFORMED_MESSAGE, f"{label}: wrong payload type")
        if not self.replay:
            self._append(Message("P", label, payload))
        else:
            self.source.absorb(Message("P", label, payload).encode())
        return payload

    def _check_elems(self, label: str, values):
        p = self.field.p
        for v in values:
            if not isinstance(v, int) or not 0 <= v < p:
                self.fail(Reason.MALFORMED_MESSAGE, f"{label}: element out of range")

    def _check_poly(self, label: str, coeffs):
        self._check_elems(label, coeffs)
        if coeffs and coeffs[-1] == 0:
            self.fail(Reason.MALFORMED_MESSAGE, f"{label}: non-normalized polynomial")

    # -- typed prover messages --------------------------------------------------

    def prover_scalar(self, label: str, produce) -> int:
        payload = self._prover_payload(label, FieldScalar, lambda: FieldScalar(produce()))
        self._check_elems(label, [payload.value])
        return payload.value

    def prover_vector(self, label: str, length: int, produce) -> list:
        payload = self._prover_payload(
            label, FieldVector, lambda: FieldVector(tuple(produce()))
        )
        if len(payload.values) != length:
            self.fail(Reason.MALFORMED_MESSAGE, f"{label}: wrong length")
        self._check_elems(label, payload.values)
        return list(payload.values)

    def prover_poly(self, label: str, produce) -> Poly:
        payload = self._prover_payload(
            label, PolyPayload, lambda: poly_to_payload(produce())
        )
        self._check_poly(label, list(payload.coeffs))
        return Poly(self.field, list(payload.coeffs), normalize=False)

    def prover_index_set(self, label: str, size: int, universe: int, produce) -> list:
        payload = self._prover_payload(
            label, IndexSetPayload, lambda: IndexSetPayload(tuple(produce()))
        )
        vals = list(payload.values)
        if len(vals) != size:
            self.fail(Reason.MALFORMED_MESSAGE, f"{label}: wrong cardinality")
        if len(set(vals)) != len(vals) or any(
            not isinstance(v, int) or not 0 <= v < universe for v in vals
        ):
            self.fail(Reason.MALFORMED_MESSAGE, f"{label}: bad index set")
        return vals

    def prover_permutation(self, label: str, n: int, produce) -> list:
        payload = self._prover_payload(
            label, IndexSetPayload, lambda: IndexSetPayload(tuple(produce()))
        )
        vals = list(payload.values)
        if not is_permutation(vals, n):
            self.fail(Reason.MALFORMED_MESSAGE, f"{label}: not a permutation")
        return vals

    def prover_rank_claim(self, label: str, produce) -> int:
        payload = self._prover_payload(
            label, RankClaimPayload, lambda: RankClaimPayload(produce())
        )
        if not isinstance(payload.value, int) or payload.value < 0:
            self.fail(Reason.MALFORMED_MESSAGE, f"{label}: bad rank claim")
        return payload.value

    def prover_toeplitz(self, label: str, rho: int, m: int, produce) -> ToeplitzOp:
        payload = self._prover_payload(
            label, ToeplitzSpecPayload,
            lambda: ToeplitzSpecPayload(rho, m, tuple(produce())),
        )
        if payload.rho != rho or payload.m != m:
            self.fail(Reason.MALFORMED_MESSAGE, f"{label}: wrong Toeplitz shape")
        if len(payload.values) != max(0, rho + m - 1):
            self.fail(Reason.MALFORMED_MESSAGE, f"{label}: wrong Toeplitz length")
        self._check_elems(label, payload.values)
        return ToeplitzOp(self.field, rho, m, list(payload.values))

    # -- verifier challenges -----------------------------------------------------

    def _emit_challenge(self, label: str, payload):
        if self.replay:
            recorded = self._next_recorded("V", label).payload
            if recorded != payload:
                self.fail(Reason.MALFORMED_MESSAGE, f"{label}: challenge mismatch")
            self.source.absorb(Message("V", label, payload).encode())
        else:
            self._append(Message("V", label, payload))

    def challenge_scalar(self, label: str) -> int:
        value = self.source.draw()
        self._emit_challenge(label, FieldScalar(value))
        return value

    def challenge_vector(self, label: str, k: int) -> list:
        values = tuple(self.source.draw_vector(k))
        self._emit_challenge(label, FieldVector(values))
        return list(values)

    # -- sub-protocol nesting -------------------------------------------------------

    class _Sub:
        def __init__(self, sess: "Session", proto_id: str):
            self.sess = sess
            self.proto_id = proto_id

        def __enter__(self):
            self.sess._marker(f"begin:{self.proto_id}")
            self.sess._sub_stack.append(self.proto_id)

        def __exit__(self, exc_type, exc, tb):
            self.sess._sub_stack.pop()
            if exc_type is None:
                self.sess._marker(f"end:{self.proto_id}")
            return False

    def subprotocol(self, proto_id: str) -> "_Sub":
        return Session._Sub(self, proto_id)

    def _marker(self, label: str):
        payload = BoolPayload(True)
        if self.replay:
            recorded = self._next_recorded("V", label).payload
            if recorded != payload:
                self.fail(Reason.MALFORMED_MESSAGE, f"{label}: bad marker")
            self.source.absorb(Message("V", label, payload).encode())
        else:
            self._append(Message("V", label, payload))

    def finish_replay(self):
        if self.replay and self._cursor != len(self.transcript.messages):
            self.fail(Reason.MALFORMED_MESSAGE, "trailing messages in transcript")


# -- small shared helpers -----------------------------------------------------------


def _dot(field, a, b) -> int:
    return sum(x * y for x, y in zip(a, b)) % field.p


# -- protocol bodies ----------------------------------------------------------------
# Each body takes domain objects; the dims/kind sanity of public inputs is
# re-checked here so that verification of hostile transcript files rejects
# rather than crashes.


def run_singularity(sess: Session, pub):
    a: PolyMat = pub["A"]
    if a.m != a.n or a.m == 0:
        sess.fail(Reason.PARAMS_INVALID, "matrix must be square and nonempty")
    n = a.n
    sess.declare_bound(2 * n * wdeg(a.deg))
    alpha = sess.challenge_scalar("alpha")
    v = sess.prover_vector(
        "kernel_vector", n, lambda: sess.prover.singularity_kernel_vector(a, alpha)
    )
    if not any(v):
        sess.fail(Reason.EVALUATION_CHECK_FAILED, "kernel vector is zero")
    if any(a.eval_at(alpha).vecmat(v)):
        sess.fail(Reason.EVALUATION_CHECK_FAILED, "v A(alpha) != 0")


def _nonsingularity(sess: Session, view: MatView):
    n = view.nrows
    if n != view.ncols:
        sess.fail(Reason.PARAMS_INVALID, "matrix must be square")
    if n == 0:
        return  # det of the empty matrix is 1
    alpha = sess.prover_scalar(
        "eval_point", lambda: sess.prover.nonsingularity_point(view, sess.sigma)
    )
    if alpha >= sess.sigma:
        sess.fail(Reason.MALFORMED_MESSAGE, "evaluation point outside sample set")
    b = sess.challenge_vector("rhs", n)
    w = sess.prover_vector(
        "solution", n, lambda: sess.prover.nonsingularity_solution(view, alpha, b)
    )
    if view.eval_at(alpha).matvec(w) != b:
        sess.fail(Reason.EVALUATION_CHECK_FAILED, "A(alpha) w != b")


def run_nonsingularity(sess: Session, pub):
    a: PolyMat = pub["A"]
    if a.m != a.n or a.m == 0:
        sess.fail(Reason.PARAMS_INVALID, "matrix must be square and nonempty")
    sess.declare_bound(a.n * wdeg(a.deg) + 1)
    _nonsingularity(sess, PolyMatView(a))


def _rank_lb(sess: Session, view: MatView, rho: int):
    if rho < 0:
        sess.fail(Reason.PARAMS_INVALID, "negative rank bound")
    if rho == 0:
        return  # vacuously true
    m, n = view.nrows, view.ncols
    cache = {}

    def sets():
        if "v" not in cache:
            cache["v"] = sess.prover.rank_lb_sets(view, rho)
        return cache["v"]

    rows = sess.prover_index_set("row_set", rho, m, lambda: sets()[0])
    cols = sess.prover_index_set("col_set", rho, n, lambda: sets()[1])
    sub = SubmatrixView(view, rows, cols)
    with sess.subprotocol("nonsingularity"):
        _nonsingularity(sess, sub)


def run_rank_lb(sess: Session, pub):
    a: PolyMat = pub["A"]
    rho: int = pub["rho"]
    sess.declare_bound(max(0, rho) * wdeg(a.deg) + 1)
    _rank_lb(sess, PolyMatView(a), rho)


def _rank_ub(sess: Session, a: PolyMat, rho: int):
    if rho < 0:
        sess.fail(Reason.PARAMS_INVALID, "negative rank bound")
    n = a.n
    alpha = sess.challenge_scalar("alpha")
    v = sess.challenge_vector("probe", n)
    gamma = sess.prover_vector(
        "sparse_combination", n,
        lambda: sess.prover.rank_ub_gamma(a, rho, alpha, v),
    )
    if hamming_weight(gamma) > rho:
        sess.fail(Reason.RANK_CHECK_FAILED, "Hamming weight exceeds the bound")
    ev = a.eval_at(alpha)
    if ev.matvec(gamma) != ev.matvec(v):
        sess.fail(Reason.EVALUATION_CHECK_FAILED, "A(alpha) gamma != A(alpha) v")


def run_rank_ub(sess: Session, pub):
    a: PolyMat = pub["A"]
    rho: int = pub["rho"]
    sess.declare_bound(2 * max(0, rho) * wdeg(a.deg) + 2)
    _rank_ub(sess, a, rho)


def run_rank(sess: Session, pub):
    a: PolyMat = pub["A"]
    rho: int = pub["rho"]
    sess.declare_bound(2 * max(0, rho) * wdeg(a.deg) + 2)
    with sess.subprotocol("rank_lb"):
        _rank_lb(sess, PolyMatView(a), rho)
    with sess.subprotocol("rank_ub"):
        _rank_ub(sess, a, rho)


def _field_det(sess: Session, b: FieldMat, beta: int):
    nu = b.m
    if b.m != b.n:
        sess.fail(Reason.PARAMS_INVALID, "matrix must be square")
    if nu == 0:
        if beta != 1 % sess.field.p:
            sess.fail(Reason.EVALUATION_CHECK_FAILED, "empty determinant is 1")
        return
    cache = {}

    def factors():
        if "v" not in cache:
            cache["v"] = sess.prover.field_det_factors(b, beta)
        return cache["v"]

    r = sess.prover_rank_claim("pluq_rank", lambda: factors()[0])
    if r > nu:
        sess.fail(Reason.MALFORMED_MESSAGE, "rank claim exceeds the dimension")
    prows = sess.prover_permutation("perm_rows", nu, lambda: factors()[1])
    pcols = sess.prover_permutation("perm_cols", nu, lambda: factors()[2])
    lflat = sess.prover_vector("lower_factor", nu * r, lambda: factors()[3])
    uflat = sess.prover_vector("upper_factor", r * nu, lambda: factors()[4])
    lower = [lflat[i * r : (i + 1) * r] for i in range(nu)]
    upper = [uflat[i * nu : (i + 1) * nu] for i in range(r)]
    for i in range(nu):
        for j in range(r):
            if j > i and lower[i][j] != 0:
                sess.fail(Reason.SHAPE_CHECK_FAILED, "L not lower triangular")
            if j == i and lower[i][j] != 1:
                sess.fail(Reason.SHAPE_CHECK_FAILED, "L diagonal not unit")
    for i in range(r):
        for j in range(i):
            if upper[i][j] != 0:
                sess.fail(Reason.SHAPE_CHECK_FAILED, "U not upper triangular")
        if upper[i][i] == 0:
            sess.fail(Reason.SHAPE_CHECK_FAILED, "U diagonal vanishes")
    p = sess.field.p
    if r < nu:
        claimed = 0
    else:
        claimed = 1
        for i in range(nu):
            claimed = claimed * upper[i][i] % p
        if perm_sign(prows) * perm_sign(pcols) < 0:
            claimed = (p - claimed) % p
    if claimed != beta:
        sess.fail(Reason.EVALUATION_CHECK_FAILED, "determinant value mismatch")
    v = sess.challenge_vector("probe", nu)
    qv = [v[pcols[j]] for j in range(nu)]
    uqv = [sum(upper[i][j] * qv[j] for j in range(nu)) % p for i in range(r)]
    luqv = [sum(lower[i][k] * uqv[k] for k in range(r)) % p for i in range(nu)]
    pluqv = [0] * nu
    for i in range(nu):
        pluqv[prows[i]] = luqv[i]
    if pluqv != b.matvec(v):
        sess.fail(Reason.EVALUATION_CHECK_FAILED, "Freivalds check failed")


def run_field_det(sess: Session, pub):
    sess.declare_bound(2)
    _field_det(sess, pub["B"], pub["beta"])


def run_determinant(sess: Session, pub):
    a: PolyMat = pub["A"]
    delta: Poly = pub["delta"]
    if a.m != a.n or a.m == 0:
        sess.fail(Reason.PARAMS_INVALID, "matrix must be square and nonempty")
    n = a.n
    d = wdeg(a.deg)
    sess.declare_bound(2 * n * d + 2)
    if not deg_le(delta.deg, n * d):
        sess.fail(Reason.DEGREE_CHECK_FAILED, "claimed determinant degree too high")
    alpha = sess.challenge_scalar("alpha")
    beta = delta(alpha)
    with sess.subprotocol("field_det"):
        _field_det(sess, a.eval_at(alpha), beta)


def run_system_solve(sess: Session, pub):
    a: PolyMat = pub["A"]
    b: list = pub["b"]
    v: list = pub["v"]
    delta: Poly = pub["delta"]
    if len(b) != a.m or len(v) != a.n:
        sess.fail(Reason.PARAMS_INVALID, "dimension mismatch")
    d = max(
        wdeg(a.deg),
        wdeg(max((f.deg for f in b), default=NEG_INF)),
        wdeg(max((f.deg for f in v), default=NEG_INF)),
        wdeg(delta.deg),
    )
    sess.declare_bound(4 * d)
    alpha = sess.challenge_scalar("alpha")
    p = sess.field.p
    lhs = a.eval_at(alpha).matvec([f(alpha) for f in v])
    da = delta(alpha)
    rhs = [da * f(alpha) % p for f in b]
    if lhs != rhs:
        sess.fail(Reason.EVALUATION_CHECK_FAILED, "A(a)v(a) != delta(a) b(a)")


def _matmul(sess: Session, a: PolyMat, b: PolyMat, c: PolyMat):
    if a.n != b.m or c.m != a.m or c.n != b.n:
        sess.fail(Reason.PARAMS_INVALID, "dimension mismatch")
    if not deg_le(c.deg, deg_add(a.deg, b.deg)):
        sess.fail(Reason.DEGREE_CHECK_FAILED, "product degree too high")
    alpha = sess.challenge_scalar("alpha")
    v = sess.challenge_vector("probe", b.n)
    bv = b.eval_at(alpha).matvec(v)
    lhs = a.eval_at(alpha).matvec(bv)
    rhs = c.eval_at(alpha).matvec(v)
    if lhs != rhs:
        sess.fail(Reason.EVALUATION_CHECK_FAILED, "A(a)(B(a)v) != C(a)v")


def run_matmul(sess: Session, pub):
    a, b, c = pub["A"], pub["B"], pub["C"]
    d = max(wdeg(a.deg), wdeg(b.deg), wdeg(c.deg))
    sess.declare_bound(4 * d + 2)
    _matmul(sess, a, b, c)


def run_inverse(sess: Session, pub):
    a, b = pub["A"], pub["B"]
    if a.m != a.n or b.m != b.n or a.n != b.m:
        sess.fail(Reason.PARAMS_INVALID, "inverse needs square matrices")
    d = max(wdeg(a.deg), wdeg(b.deg))
    sess.declare_bound(4 * d + 2)
    _matmul(sess, a, b, PolyMat.identity(sess.field, a.n))


def _frrsm(sess: Session, view: MatView, vec: VecView, hint=None):
    m, n = view.nrows, view.ncols
    if vec.length != n:
        sess.fail(Reason.PARAMS_INVALID, "dimension mismatch")
    if m == 0:
        sess.fail(Reason.PARAMS_INVALID, "empty matrix")
    c = sess.challenge_vector("combination", m)
    g = sess.prover_poly(
        "inner_product", lambda: sess.prover.frrsm_g(view, vec, c, hint)
    )
    bound = deg_add(deg_scale(m, view.deg_bound), vec.deg_bound)
    # deg(v) = -inf alone must not force g = 0 when A is nonzero: the honest
    # u can be nonzero only when v is nonzero, so the absorbing rule is right
    # for soundness and never hurts completeness (v = 0 has g = 0).
    if not deg_le(g.deg, bound):
        sess.fail(Reason.DEGREE_CHECK_FAILED, "inner product degree too high")
    alpha = sess.challenge_scalar("alpha")
    w = sess.prover_vector(
        "solution_eval", m, lambda: sess.prover.frrsm_w(view, vec, c, g, alpha, hint)
    )
    if view.eval_at(alpha).vecmat(w) != vec.eval_at(alpha):
        sess.fail(Reason.EVALUATION_CHECK_FAILED, "w A(alpha) != v(alpha)")
    if _dot(sess.field, w, c) != g(alpha):
        sess.fail(Reason.EVALUATION_CHECK_FAILED, "w c != g(alpha)")


def run_frrsm(sess: Session, pub):
    a: PolyMat = pub["A"]
    v: list = pub["v"]
    if len(v) != a.n:
        sess.fail(Reason.PARAMS_INVALID, "dimension mismatch")
    d = max(wdeg(a.deg), wdeg(max((f.deg for f in v), default=NEG_INF)))
    sess.declare_bound(6 * a.m * d + 2 * d + 2)
    _frrsm(sess, PolyMatView(a), PolyVecView(v))


def _coprime(sess: Session, fs: list):
    t = len(fs)
    if t < 1:
        sess.fail(Reason.PARAMS_INVALID, "need at least one polynomial")
    cache = {}

    def witness():
        if "v" not in cache:
            cache["v"] = sess.prover.coprime_witness(fs, sess.sigma)
        return cache["v"]

    s1 = sess.prover_poly("bezout_s1", lambda: witness()[0])
    s2 = sess.prover_poly("bezout_s2", lambda: witness()[1])
    betas = sess.prover_vector(
        "mixers", max(0, t - 2), lambda: witness()[2]
    )
    if t >= 2:
        bound1 = max(1, max(wdeg(f.deg) for f in fs[1:]))
    else:
        bound1 = wdeg(fs[0].deg)
    bound2 = wdeg(fs[0].deg)
    if not deg_lt(s1.deg, bound1):
        sess.fail(Reason.DEGREE_CHECK_FAILED, "s1 degree too high")
    if not deg_lt(s2.deg, bound2):
        sess.fail(Reason.DEGREE_CHECK_FAILED, "s2 degree too high")
    alpha = sess.challenge_scalar("alpha")
    p = sess.field.p
    if t >= 2:
        h = fs[1](alpha)
        for i in range(2, t):
            h = (h + betas[i - 2] * fs[i](alpha)) % p
    else:
        h = 0
    if (fs[0](alpha) * s1(alpha) + h * s2(alpha)) % p != 1:
        sess.fail(Reason.EVALUATION_CHECK_FAILED, "Bezout identity fails")


def run_coprime(sess: Session, pub):
    fs: list = pub["f"]
    if fs:
        sess.declare_bound(2 * max(wdeg(f.deg) for f in fs))
    _coprime(sess, fs)


def _rsm(sess: Session, a: PolyMat, v: list):
    m, n = a.m, a.n
    if len(v) != n:
        sess.fail(Reason.PARAMS_INVALID, "dimension mismatch")
    rho = sess.prover_rank_claim("rank_claim", lambda: sess.prover.rsm_rank(a))
    if rho > min(m, n):
        sess.fail(Reason.RANK_CHECK_FAILED, "rank claim exceeds the dimensions")
    if rho == 0:
        # the row space of a rank-0 matrix is {0}
        if any(f.coeffs for f in v):
            sess.fail(Reason.EVALUATION_CHECK_FAILED, "nonzero vector, zero rank claim")
        return
    d = max(wdeg(a.deg), wdeg(max((f.deg for f in v), default=NEG_INF)))
    if sess.rsm_strict_slack is not None:
        bound = 8 * rho * d + 2 * d + 2 + sess.rsm_strict_slack
        sess.transcript.meta.setdefault("sigma_lower_bound", bound)
        if sess.params.strict and sess.sigma < bound:
            sess.fail(
                Reason.PARAMS_INVALID,
                f"strict mode needs sigma >= {bound}, got {sess.sigma}",
            )
    if sess.sigma <= rho:
        sess.fail(Reason.PARAMS_INVALID, "sample set must exceed the rank claim")
    t = rsm_rounds(sess.sigma, rho, a.deg)
    cache = {}

    def commitment():
        if "v" not in cache:
            cache["v"] = sess.prover.rsm_commitment(a, v, rho, t, sess.sigma)
        return cache["v"]

    tops = []
    for i in range(t):
        tops.append(
            sess.prover_toeplitz(
                f"toeplitz_{i}", rho, m,
                (lambda i=i: commitment()[0][i].values),
            )
        )
    dens = []
    for i in range(t):
        dens.append(
            sess.prover_poly(f"denominator_{i}", (lambda i=i: commitment()[1][i]))
        )
    dbound = deg_scale(rho, a.deg)
    for i, den in enumerate(dens):
        if not deg_le(den.deg, dbound):
            sess.fail(Reason.DEGREE_CHECK_FAILED, f"denominator {i} degree too high")
    with sess.subprotocol("rank_ub"):
        _rank_ub(sess, a, rho)
    for i in range(t):
        with sess.subprotocol("rank_lb"):
            _rank_lb(sess, ToeplitzProductView(tops[i], a), rho)
    with sess.subprotocol("coprime"):
        _coprime(sess, dens)
    for i in range(t):
        with sess.subprotocol("frrsm"):
            _frrsm(
                sess,
                ToeplitzProductView(tops[i], a),
                ScaledVecView(dens[i], v),
                hint=("rsm", i),
            )


def run_rsm(sess: Session, pub):
    sess.rsm_strict_slack = 0
    _rsm(sess, pub["A"], pub["v"])


def _rs_subset(sess: Session, a: PolyMat, b: PolyMat):
    if a.n != b.n:
        sess.fail(Reason.PARAMS_INVALID, "column dimensions differ")
    lam = sess.challenge_vector("combination", a.m)
    v = a.scalar_row_combination(lam)
    with sess.subprotocol("rsm"):
        _rsm(sess, b, v)


def run_rs_subset(sess: Session, pub):
    sess.rsm_strict_slack = 2
    _rs_subset(sess, pub["A"], pub["B"])


def _rs_equality(sess: Session, a: PolyMat, b: PolyMat):
    with sess.subprotocol("rs_subset"):
        _rs_subset(sess, a, b)
    with sess.subprotocol("rs_subset"):
        _rs_subset(sess, b, a)


def run_rs_equality(sess: Session, pub):
    sess.rsm_strict_slack = 2
    _rs_equality(sess, pub["A"], pub["B"])


def run_row_basis(sess: Session, pub):
    a, b = pub["A"], pub["B"]
    if a.n != b.n:
        sess.fail(Reason.PARAMS_INVALID, "column dimensions differ")
    d = max(wdeg(a.deg), wdeg(b.deg))
    sess.declare_bound(8 * b.m * d + 2 * d + 6)
    with sess.subprotocol("rank_lb"):
        _rank_lb(sess, PolyMatView(b), b.m)
    with sess.subprotocol("rs_equality"):
        _rs_equality(sess, b, a)


def run_hermite(sess: Session, pub):
    a: PolyMat = pub["A"]
    h: PolyMat = pub["H"]
    if a.n != h.n:
        sess.fail(Reason.PARAMS_INVALID, "column dimensions differ")
    d = max(wdeg(a.deg), wdeg(h.deg))
    sess.declare_bound(8 * h.m * d + 2 * d + 4)
    if h.m > a.m:
        sess.fail(Reason.SHAPE_CHECK_FAILED, "more rows than the input matrix")
    ok, _ = check_hermite_shape(h)
    if not ok:
        sess.fail(Reason.SHAPE_CHECK_FAILED, "not in Hermite form")
    with sess.subprotocol("rs_equality"):
        _rs_equality(sess, a, h)


def run_spopov(sess: Session, pub):
    a: PolyMat = pub["A"]
    shift: list = pub["shift"]
    pm: PolyMat = pub["P"]
    if a.n != pm.n or len(shift) != a.n:
        sess.fail(Reason.PARAMS_INVALID, "column dimensions differ")
    d = max(wdeg(a.deg), wdeg(pm.deg))
    sess.declare_bound(8 * pm.m * d + 2 * d + 4)
    if pm.m > a.m:
        sess.fail(Reason.SHAPE_CHECK_FAILED, "more rows than the input matrix")
    ok, _ = check_popov_shape(pm, shift)
    if not ok:
        sess.fail(Reason.SHAPE_CHECK_FAILED, "not in shifted Popov form")
    with sess.subprotocol("rs_equality"):
        _rs_equality(sess, a, pm)


def _saturated(sess: Session, b: PolyMat):
    if b.m == 0 or b.n == 0:
        return  # trivially saturated
    if b.m <= b.n:
        ident = PolyMat.identity(sess.field, b.m)
        with sess.subprotocol("rs_subset"):
            _rs_subset(sess, ident, b.transpose())
    else:
        ident = PolyMat.identity(sess.field, b.n)
        with sess.subprotocol("rs_subset"):
            _rs_subset(sess, ident, b)


def run_saturated(sess: Session, pub):
    a: PolyMat = pub["A"]
    nu = min(a.m, a.n)
    sess.declare_bound(8 * nu * wdeg(a.deg) + 4)
    _saturated(sess, a)


def run_sat_basis(sess: Session, pub):
    a: PolyMat = pub["A"]
    b: PolyMat = pub["B"]
    if a.n != b.n:
        sess.fail(Reason.PARAMS_INVALID, "column dimensions differ")
    d = max(wdeg(a.deg), wdeg(b.deg))
    sess.declare_bound(8 * a.n * d + 2 * d + 4)
    if b.m > min(a.m, a.n):
        sess.fail(Reason.SHAPE_CHECK_FAILED, "basis has too many rows")
    with sess.subprotocol("rank_lb"):
        _rank_lb(sess, PolyMatView(a), b.m)
    with sess.subprotocol("rs_subset"):
        _rs_subset(sess, a, b)
    with sess.subprotocol("saturated"):
        _saturated(sess, b)


def run_unimod_completable(sess: Session, pub):
    a: PolyMat = pub["A"]
    sess.declare_bound(8 * a.m * wdeg(a.deg) + 4)
    if not a.m < a.n:
        sess.fail(Reason.SHAPE_CHECK_FAILED, "matrix must be wide")
    with sess.subprotocol("rank_lb"):
        _rank_lb(sess, PolyMatView(a), a.m)
    with sess.subprotocol("saturated"):
        _saturated(sess, a)


def run_kernel_basis(sess: Session, pub):
    a: PolyMat = pub["A"]
    b: PolyMat = pub["B"]
    if b.n != a.m:
        sess.fail(Reason.PARAMS_INVALID, "kernel basis has wrong column count")
    d = max(wdeg(a.deg), wdeg(b.deg))
    sess.declare_bound(8 * a.m * d + 4)
    if b.m > a.m:
        sess.fail(Reason.SHAPE_CHECK_FAILED, "kernel basis has too many rows")
    with sess.subprotocol("rank_lb"):
        _rank_lb(sess, PolyMatView(b), b.m)
    with sess.subprotocol("rank_lb"):
        _rank_lb(sess, PolyMatView(a), a.m - b.m)
    with sess.subprotocol("matmul"):
        _matmul(sess, b, a, PolyMat.zero(sess.field, b.m, a.n))
    with sess.subprotocol("saturated"):
        _saturated(sess, b)


_RUNNERS = {
    "singularity": run_singularity,
    "nonsingularity": run_nonsingularity,
    "rank_lb": run_rank_lb,
    "rank_ub": run_rank_ub,
    "rank": run_rank,
    "determinant": run_determinant,
    "field_det": run_field_det,
    "system_solve": run_system_solve,
    "matmul": run_matmul,
    "inverse": run_inverse,
    "frrsm": run_frrsm,
    "coprime": run_coprime,
    "rsm": run_rsm,
    "rs_subset": run_rs_subset,
    "rs_equality": run_rs_equality,
    "row_basis": run_row_basis,
    "hermite": run_hermite,
    "spopov": run_spopov,
    "saturated": run_saturated,
    "sat_basis": run_sat_basis,
    "unimod_completable": run_unimod_completable,
    "kernel_basis": run_kernel_basis,
}


# -- public input encoding/decoding per protocol ---------------------------------


_PM, _PV, _PO, _FM, _FS, _RC, _SH = (
    "poly_matrix",
    "poly_vector",
    "poly",
    "field_matrix",
    "field_scalar",
    "rank_claim",
    "shift",
)

PUBLIC_SCHEMA = {
    "singularity": {"A": _PM},
    "nonsingularity": {"A": _PM},
    "rank_lb": {"A": _PM, "rho": _RC},
    "rank_ub": {"A": _PM, "rho": _RC},
    "rank": {"A": _PM, "rho": _RC},
    "determinant": {"A": _PM, "delta": _PO},
    "field_det": {"B": _FM, "beta": _FS},
    "system_solve": {"A": _PM, "b": _PV, "v": _PV, "delta": _PO},
    "matmul": {"A": _PM, "B": _PM, "C": _PM},
    "inverse": {"A": _PM, "B": _PM},
    "frrsm": {"A": _PM, "v": _PV},
    "coprime": {"f": _PV},
    "rsm": {"A": _PM, "v": _PV},
    "rs_subset": {"A": _PM, "B": _PM},
    "rs_equality": {"A": _PM, "B": _PM},
    "row_basis": {"A": _PM, "B": _PM},
    "hermite": {"A": _PM, "H": _PM},
    "spopov": {"A": _PM, "shift": _SH, "P": _PM},
    "saturated": {"A": _PM},
    "sat_basis": {"A": _PM, "B": _PM},
    "unimod_completable": {"A": _PM},
    "kernel_basis": {"A": _PM, "B": _PM},
}


def encode_public_inputs(protocol_id: str, pub: dict) -> dict:
    schema = PUBLIC_SCHEMA[protocol_id]
    if set(pub) != set(schema):
        raise ValueError(
            f"{protocol_id} needs public inputs {sorted(schema)}, got {sorted(pub)}"
        )
    out = {}
    for name, kind in schema.items():
        val = pub[name]
        if kind == _PM:
            out[name] = polymat_to_payload(val)
        elif kind == _PV:
            out[name] = polyvec_to_payload(val)
        elif kind == _PO:
            out[name] = poly_to_payload(val)
        elif kind == _FM:
            out[name] = fieldmat_to_payload(val)
        elif kind == _FS:
            out[name] = FieldScalar(val)
        elif kind == _RC:
            out[name] = RankClaimPayload(val)
        elif kind == _SH:
            out[name] = ShiftPayload(tuple(val))
    return out


def decode_public_inputs(protocol_id: str, field: PrimeField, payloads: dict) -> dict:
    schema = PUBLIC_SCHEMA.get(protocol_id)
    if schema is None:
        raise TranscriptError(f"unknown protocol {protocol_id!r}")
    if set(payloads) != set(schema):
        raise TranscriptError(f"{protocol_id}: wrong public input names")
    out = {}
    for name, kind in schema.items():
        pl = payloads[name]
        if kind == _PM:
            if not isinstance(pl, PolyMatrixPayload):
                raise TranscriptError(f"{name}: expected a polynomial matrix")
            out[name] = payload_to_polymat(field, pl)
        elif kind == _PV:
            if not isinstance(pl, PolyVectorPayload):
                raise TranscriptError(f"{name}: expected a polynomial vector")
            out[name] = payload_to_polyvec(field, pl)
        elif kind == _PO:
            if not isinstance(pl, PolyPayload):
                raise TranscriptError(f"{name}: expected a polynomial")
            out[name] = payload_to_poly(field, pl)
        elif kind == _FM:
            if not isinstance(pl, FieldMatrixPayload):
                raise TranscriptError(f"{name}: expected a field matrix")
            out[name] = payload_to_fieldmat(field, pl)
        elif kind == _FS:
            if not isinstance(pl, FieldScalar):
                raise TranscriptError(f"{name}: expected a scalar")
            out[name] = pl.value
        elif kind == _RC:
            if not isinstance(pl, RankClaimPayload):
                raise TranscriptError(f"{name}: expected a rank claim")
            out[name] = pl.value
        elif kind == _SH:
            if not isinstance(pl, ShiftPayload):
                raise TranscriptError(f"{name}: expected a shift")
            out[name] = list(pl.values)
    return out


# -- top-level entry points ----------------------------------------------------------


def run_protocol(protocol_id: str, pub: dict, params: ProtocolParams,
                 prover=None, prover_seed: int = 0):
    """Run one full exchange with the given (default: honest) prover.

    Returns (Verdict, Transcript).  Raises ProverGaveUp if an honest Las
    Vegas prover exceeds its retry caps, and ValueError for malformed calls.
    """
    if protocol_id not in _RUNNERS:
        raise ValueError(f"unknown protocol {protocol_id!r}")
    payloads = encode_public_inputs(protocol_id, pub)
    transcript = Transcript(protocol_id, params, payloads)
    if prover is None:
        from .provers import HonestProver  # prover side may use the heavy oracles

        prover = HonestProver(seed=prover_seed)
    begin = getattr(prover, "begin_run", None)
    if begin is not None:
        begin()
    sess = Session(transcript, prover=prover, replay=False)
    try:
        _RUNNERS[protocol_id](sess, pub)
        verdict = Verdict.accept()
    except ProtocolReject as rej:
        verdict = Verdict.reject(rej.reason, rej.detail)
    transcript.verdict = verdict
    transcript.meta["communication"] = transcript.comm_field_elements()
    return verdict, transcript


def verify_transcript(transcript: Transcript) -> Verdict:
    """Re-verify a stored transcript with no prover present.

    Every challenge is re-derived (Fiat-Shamir hash chain or seeded PRNG)
    and compared against the recorded one, and every Verifier check is
    re-run against the recorded prover messages.
    """
    try:
        field = transcript.params.field()
        pub = decode_public_inputs(transcript.protocol_id, field, transcript.public)
    except (TranscriptError, ValueError) as exc:
        return Verdict.reject(Reason.MALFORMED_MESSAGE, str(exc))
    sess = Session(transcript, prover=None, replay=True)
    try:
        _RUNNERS[transcript.protocol_id](sess, pub)
        sess.finish_replay()
        return Verdict.accept()
    except ProtocolReject as rej:
        return Verdict.reject(rej.reason, rej.detail)
