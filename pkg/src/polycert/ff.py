"""Prime field arithmetic and uniform sampling from a subset of the field.

Field elements are plain Python integers in ``[0, p)``; a :class:`PrimeField`
instance carries the modulus and provides the arithmetic.  Keeping elements
as bare ints (rather than wrapping each one in an object) is what makes the
elimination kernels in :mod:`polycert.matfield` and :mod:`polycert.upoly`
fast enough for the experiment suites.

Random challenges are always drawn from the sample set
``S = {0, 1, ..., sigma-1}`` embedded in the field, never from all of F_p,
so that soundness experiments can shrink ``sigma`` independently of ``p``.
"""

from __future__ import annotations

from dataclasses import dataclass

DEFAULT_MODULUS = 2**31 - 1  # Mersenne prime; products fit comfortably in 128 bits

_MR_WITNESSES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin, valid for all n < 3.3e24."""
    if n < 2:
        return False
    for q in _MR_WITNESSES:
        if n % q == 0:
            return n == q
    d = n - 1
    s = 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_WITNESSES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


class PrimeField:
    """The field Z/pZ for a prime p < 2**62 (p = 2 is allowed so the tiny
    fields used by exhaustive oracles are expressible).

    Elements are ints in [0, p); all methods assume operands are already
    reduced.  Instances are immutable and safe to share across threads.
    """

    __slots__ = ("p",)

    def __init__(self, p: int):
        if not isinstance(p, int) or not 1 < p < 2**62:
            raise ValueError(f"modulus must be an integer in (1, 2^62), got {p!r}")
        if not is_prime(p):
            raise ValueError(f"modulus {p} is not prime")
        self.p = p

    def __repr__(self):
        return f"PrimeField({self.p})"

    def __eq__(self, other):
        return isinstance(other, PrimeField) and self.p == other.p

    def __hash__(self):
        return hash(("PrimeField", self.p))

    # -- arithmetic on reduced ints ------------------------------------

    def add(self, a: int, b: int) -> int:
        c = a + b
        return c - self.p if c >= self.p else c

    def sub(self, a: int, b: int) -> int:
        c = a - b
        return c + self.p if c < 0 else c

    def neg(self, a: int) -> int:
        return self.p - a if a else 0

    def mul(self, a: int, b: int) -> int:
        return a * b % self.p

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("inverse of 0 in prime field")
        return pow(a, self.p - 2, self.p)

    def div(self, a: int, b: int) -> int:
        return a * self.inv(b) % self.p

    def pow(self, a: int, e: int) -> int:
        if e < 0:
            return pow(self.inv(a), -e, self.p)
        return pow(a, e, self.p)

    def reduce(self, a: int) -> int:
        return a % self.p


@dataclass(frozen=True)
class SampleSet:
    """The challenge set S = {0, ..., sigma-1} inside a prime field."""

    field: PrimeField
    sigma: int

    def __post_init__(self):
        if not 1 <= self.sigma <= self.field.p:
            raise ValueError(
                f"sample set size must satisfy 1 <= sigma <= p, got {self.sigma}"
            )

    def __contains__(self, value: int) -> bool:
        return 0 <= value < self.sigma
