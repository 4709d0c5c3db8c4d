"""Dense univariate polynomials and rational functions over a prime field.

Polynomials are coefficient lists, low-to-high, normalized so that the last
coefficient is nonzero; the empty list is the zero polynomial and its degree
is the sentinel :data:`NEG_INF`, which satisfies every "deg <= bound" check
by convention.

Multiplication is schoolbook for short operands, Karatsuba above degree 32,
and a limb-split numpy convolution for long operands when the modulus fits
in 31 bits (the default 2**31 - 1 does).  All three paths are cross-checked
against schoolbook in the test suite.
"""

from __future__ import annotations

import numpy as np

from .ff import PrimeField

NEG_INF = float("-inf")

_KARATSUBA_CUTOFF = 33  # lengths >= cutoff, i.e. degree > 32
_NUMPY_CUTOFF = 48


def deg_add(a, b):
    """Degree of a product: NEG_INF absorbs."""
    if a == NEG_INF or b == NEG_INF:
        return NEG_INF
    return a + b


def deg_scale(k: int, d):
    """Degree bound k*d for k >= 1 matrix rows etc.; NEG_INF absorbs."""
    if d == NEG_INF:
        return NEG_INF
    return k * d


def deg_le(d, bound) -> bool:
    """deg <= bound with the NEG_INF convention (zero satisfies any bound)."""
    if d == NEG_INF:
        return True
    if bound == NEG_INF:
        return False
    return d <= bound


def _trim(coeffs: list) -> list:
    while coeffs and coeffs[-1] == 0:
        coeffs.pop()
    return coeffs


def _mul_schoolbook(p: int, a: list, b: list) -> list:
    out = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                out[i + j] += ai * bj
    return [c % p for c in out]


def _mul_numpy(p: int, a: list, b: list) -> list:
    # Split 31-bit coefficients into 16-bit limbs so int64 convolutions
    # cannot overflow, then recombine mod p.
    av = np.asarray(a, dtype=np.int64)
    bv = np.asarray(b, dtype=np.int64)
    a_hi, a_lo = av >> 16, av & 0xFFFF
    b_hi, b_lo = bv >> 16, bv & 0xFFFF
    hh = np.convolve(a_hi, b_hi) % p
    mm = (np.convolve(a_hi, b_lo) + np.convolve(a_lo, b_hi)) % p
    ll = np.convolve(a_lo, b_lo) % p
    w32 = (1 << 32) % p
    w16 = (1 << 16) % p
    out = ((hh * w32) % p + (mm * w16) % p + ll) % p
    return out.tolist()


def _mul_karatsuba(p: int, a: list, b: list) -> list:
    n = max(len(a), len(b))
    if n < _KARATSUBA_CUTOFF:
        return _mul_schoolbook(p, a, b)
    h = n // 2
    a0, a1 = a[:h], a[h:]
    b0, b1 = b[:h], b[h:]
    z0 = _mul_karatsuba(p, a0, b0) if a0 and b0 else []
    z2 = _mul_karatsuba(p, a1, b1) if a1 and b1 else []
    s0 = [x % p for x in map(sum, _zip_pad(a0, a1))]
    s1 = [x % p for x in map(sum, _zip_pad(b0, b1))]
    z1 = _mul_karatsuba(p, s0, s1) if s0 and s1 else []
    out = [0] * (len(a) + len(b) - 1)
    for i, c in enumerate(z0):
        out[i] += c
    for i, c in enumerate(z1):
        out[i + h] += c
    for i, c in enumerate(z0):
        out[i + h] -= c
    for i, c in enumerate(z2):
        out[i + h] -= c
        if i + 2 * h < len(out):
            out[i + 2 * h] += c
    return [c % p for c in out]


def _zip_pad(a: list, b: list):
    if len(a) < len(b):
        a = a + [0] * (len(b) - len(a))
    elif len(b) < len(a):
        b = b + [0] * (len(a) - len(b))
    return zip(a, b)


def _mul_coeffs(p: int, a: list, b: list) -> list:
    if not a or not b:
        return []
    la, lb = len(a), len(b)
    if la == 1:
        c = a[0]
        return [c * x % p for x in b]
    if lb == 1:
        c = b[0]
        return [c * x % p for x in a]
    if min(la, lb) >= _NUMPY_CUTOFF and p < 2**31:
        return _trim(_mul_numpy(p, a, b))
    if max(la, lb) >= _KARATSUBA_CUTOFF:
        return _trim(_mul_karatsuba(p, a, b))
    return _trim(_mul_schoolbook(p, a, b))


class Poly:
    """Dense univariate polynomial over a prime field.

    Treat instances as immutable; never mutate ``coeffs`` after construction.
    """

    __slots__ = ("field", "coeffs")

    def __init__(self, field: PrimeField, coeffs, normalize: bool = True):
        self.field = field
        if normalize:
            p = field.p
            coeffs = _trim([c % p for c in coeffs])
        self.coeffs = coeffs

    # -- constructors ----------------------------------------------------

    @classmethod
    def zero(cls, field):
        return cls(field, [], normalize=False)

    @classmethod
    def one(cls, field):
        return cls(field, [1], normalize=False)

    @classmethod
    def constant(cls, field, c: int):
        return cls(field, [c % field.p])

    @classmethod
    def x(cls, field):
        return cls(field, [0, 1], normalize=False)

    @classmethod
    def of(cls, field, *coeffs):
        return cls(field, list(coeffs))

    # -- basic structure -------------------------------------------------

    @property
    def deg(self):
        return len(self.coeffs) - 1 if self.coeffs else NEG_INF

    def is_zero(self) -> bool:
        return not self.coeffs

    def is_one(self) -> bool:
        return self.coeffs == [1]

    def is_constant(self) -> bool:
        return len(self.coeffs) <= 1

    def lc(self) -> int:
        """Leading coefficient (0 for the zero polynomial)."""
        return self.coeffs[-1] if self.coeffs else 0

    def __eq__(self, other):
        return (
            isinstance(other, Poly)
            and self.field.p == other.field.p
            and self.coeffs == other.coeffs
        )

    def __hash__(self):
        return hash((self.field.p, tuple(self.coeffs)))

    def __bool__(self):
        return bool(self.coeffs)

    def __repr__(self):
        if not self.coeffs:
            return "Poly(0)"
        terms = []
        for i, c in enumerate(self.coeffs):
            if c == 0:
                continue
            if i == 0:
                terms.append(str(c))
            elif i == 1:
                terms.append(f"{c}*x" if c != 1 else "x")
            else:
                terms.append(f"{c}*x^{i}" if c != 1 else f"x^{i}")
        return "Poly(" + " + ".join(terms) + ")"

    # -- ring arithmetic ---------------------------------------------------

    def __add__(self, other: "Poly") -> "Poly":
        p = self.field.p
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for i, c in enumerate(b):
            out[i] = (out[i] + c) % p
        return Poly(self.field, _trim(out), normalize=False)

    def __sub__(self, other: "Poly") -> "Poly":
        p = self.field.p
        out = list(self.coeffs)
        b = other.coeffs
        if len(out) < len(b):
            out.extend([0] * (len(b) - len(out)))
        for i, c in enumerate(b):
            out[i] = (out[i] - c) % p
        return Poly(self.field, _trim(out), normalize=False)

    def __neg__(self) -> "Poly":
        p = self.field.p
        return Poly(self.field, [(p - c) % p for c in self.coeffs], normalize=False)

    def __mul__(self, other):
        if isinstance(other, int):
            return self.scale(other)
        return Poly(
            self.field, _mul_coeffs(self.field.p, self.coeffs, other.coeffs),
            normalize=False,
        )

    __rmul__ = __mul__

    def scale(self, c: int) -> "Poly":
        p = self.field.p
        c %= p
        if c == 0:
            return Poly.zero(self.field)
        return Poly(self.field, _trim([c * a % p for a in self.coeffs]), normalize=False)

    def times_x(self, k: int) -> "Poly":
        if not self.coeffs:
            return self
        return Poly(self.field, [0] * k + self.coeffs, normalize=False)

    def monic(self) -> "Poly":
        if not self.coeffs:
            return self
        return self.scale(self.field.inv(self.lc()))

    def __divmod__(self, other: "Poly"):
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        p = self.field.p
        r = list(self.coeffs)
        b = other.coeffs
        db = len(b) - 1
        if len(r) - 1 < db:
            return Poly.zero(self.field), self
        inv_lead = self.field.inv(b[-1])
        q = [0] * (len(r) - db)
        for i in range(len(r) - 1, db - 1, -1):
            c = r[i]
            if c:
                f = c * inv_lead % p
                q[i - db] = f
                for j in range(db + 1):
                    r[i - db + j] = (r[i - db + j] - f * b[j]) % p
        return (
            Poly(self.field, _trim(q), normalize=False),
            Poly(self.field, _trim(r[:db]), normalize=False),
        )

    def __floordiv__(self, other):
        return divmod(self, other)[0]

    def __mod__(self, other):
        return divmod(self, other)[1]

    def divexact(self, other: "Poly") -> "Poly":
        q, r = divmod(self, other)
        if not r.is_zero():
            raise ArithmeticError("division was not exact")
        return q

    # -- evaluation ------------------------------------------------------

    def __call__(self, alpha: int) -> int:
        """Horner evaluation at a field element."""
        p = self.field.p
        acc = 0
        for c in reversed(self.coeffs):
            acc = (acc * alpha + c) % p
        return acc


def xgcd(f: Poly, g: Poly):
    """Extended Euclid: returns (d, s, t) with d monic, s*f + t*g = d.

    The Bezout pair is the normalized one: when both inputs have positive
    degree, deg s < deg g - deg d and deg t < deg f - deg d.
    """
    if f.is_zero() and g.is_zero():
        raise ValueError("xgcd of two zero polynomials")
    field = f.field
    r0, r1 = f, g
    s0, s1 = Poly.one(field), Poly.zero(field)
    t0, t1 = Poly.zero(field), Poly.one(field)
    while not r1.is_zero():
        q, r = divmod(r0, r1)
        r0, r1 = r1, r
        s0, s1 = s1, s0 - q * s1
        t0, t1 = t1, t0 - q * t1
    c = field.inv(r0.lc())
    return r0.scale(c), s0.scale(c), t0.scale(c)


def poly_gcd(f: Poly, g: Poly) -> Poly:
    if f.is_zero() and g.is_zero():
        return Poly.zero(f.field)
    r0, r1 = f, g
    while not r1.is_zero():
        r0, r1 = r1, r0 % r1
    return r0.monic()


def poly_lcm(f: Poly, g: Poly) -> Poly:
    if f.is_zero() or g.is_zero():
        return Poly.zero(f.field)
    return (f * g).divexact(poly_gcd(f, g)).monic()


def interpolate(field: PrimeField, points) -> Poly:
    """Unique polynomial of degree < len(points) through the given points.

    Newton divided differences; x-coordinates must be pairwise distinct.
    """
    points = list(points)
    if not points:
        return Poly.zero(field)
    xs = [x % field.p for x, _ in points]
    if len(set(xs)) != len(xs):
        raise ValueError("duplicate abscissa in interpolation points")
    p = field.p
    # Newton coefficients by divided differences.
    coef = [y % p for _, y in points]
    n = len(points)
    for j in range(1, n):
        for i in range(n - 1, j - 1, -1):
            num = (coef[i] - coef[i - 1]) % p
            den = (xs[i] - xs[i - j]) % p
            coef[i] = num * pow(den, p - 2, p) % p
    # Expand the Newton form.
    result = Poly.zero(field)
    basis = Poly.one(field)
    for j in range(n):
        result = result + basis.scale(coef[j])
        if j < n - 1:
            basis = basis * Poly(field, [(-xs[j]) % p, 1])
    return result


class RatFunc:
    """Reduced rational function: monic nonzero denominator, gcd(num, den) = 1."""

    __slots__ = ("num", "den")

    def __init__(self, num: Poly, den: Poly | None = None, reduce: bool = True):
        field = num.field
        if den is None:
            den = Poly.one(field)
        if den.is_zero():
            raise ZeroDivisionError("rational function with zero denominator")
        if reduce:
            if num.is_zero():
                den = Poly.one(field)
            else:
                g = poly_gcd(num, den)
                if not g.is_one():
                    num = num.divexact(g)
                    den = den.divexact(g)
                c = field.inv(den.lc())
                if c != 1:
                    num = num.scale(c)
                    den = den.scale(c)
        self.num = num
        self.den = den

    @classmethod
    def of_poly(cls, f: Poly) -> "RatFunc":
        return cls(f, None, reduce=False)

    @classmethod
    def zero(cls, field) -> "RatFunc":
        return cls(Poly.zero(field), None, reduce=False)

    def is_polynomial(self) -> bool:
        return self.den.is_one()

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def __eq__(self, other):
        return (
            isinstance(other, RatFunc)
            and self.num == other.num
            and self.den == other.den
        )

    def __repr__(self):
        if self.is_polynomial():
            return f"RatFunc({self.num!r})"
        return f"RatFunc({self.num!r} / {self.den!r})"

    def __add__(self, other: "RatFunc") -> "RatFunc":
        return RatFunc(
            self.num * other.den + other.num * self.den, self.den * other.den
        )

    def __sub__(self, other: "RatFunc") -> "RatFunc":
        return RatFunc(
            self.num * other.den - other.num * self.den, self.den * other.den
        )

    def __neg__(self) -> "RatFunc":
        return RatFunc(-self.num, self.den, reduce=False)

    def __mul__(self, other):
        if isinstance(other, Poly):
            other = RatFunc(other)
        return RatFunc(self.num * other.num, self.den * other.den)

    def __truediv__(self, other: "RatFunc") -> "RatFunc":
        if other.num.is_zero():
            raise ZeroDivisionError("division by zero rational function")
        return RatFunc(self.num * other.den, self.den * other.num)

    def eval(self, alpha: int) -> int:
        d = self.den(alpha)
        if d == 0:
            raise ZeroDivisionError(f"denominator vanishes at {alpha}")
        field = self.num.field
        return field.mul(self.num(alpha), field.inv(d))


class RatVec:
    """Row vector of reduced rational functions with a cached common denominator."""

    __slots__ = ("field", "entries", "_common_den")

    def __init__(self, entries):
        entries = list(entries)
        if not entries:
            raise ValueError("empty rational vector")
        self.field = entries[0].num.field
        self.entries = entries
        self._common_den = None

    @classmethod
    def normalize(cls, field, raw_pairs) -> "RatVec":
        """Build from (num, den) Poly pairs, reducing each entry."""
        entries = []
        for num, den in raw_pairs:
            if den.is_zero():
                raise ZeroDivisionError("zero denominator in rational vector")
            entries.append(RatFunc(num, den))
        return cls(entries)

    def __len__(self):
        return len(self.entries)

    def __getitem__(self, i):
        return self.entries[i]

    def __eq__(self, other):
        return isinstance(other, RatVec) and self.entries == other.entries

    def __repr__(self):
        return f"RatVec({self.entries!r})"

    @property
    def common_den(self) -> Poly:
        """lcm of the entry denominators: the denominator of the vector."""
        if self._common_den is None:
            d = Poly.one(self.field)
            for e in self.entries:
                d = poly_lcm(d, e.den)
            self._common_den = d
        return self._common_den

    def is_polynomial(self) -> bool:
        return self.common_den.is_one()

    def numer_row(self) -> list:
        """common_den * entries, a polynomial row vector."""
        d = self.common_den
        return [e.num * d.divexact(e.den) for e in self.entries]

    def eval(self, alpha: int) -> list:
        return [e.eval(alpha) for e in self.entries]
