"""Base rings for exact computation: the integers, the rationals, and prime fields.

A :class:`RingSpec` is fixed once per computation session and threaded through
every matrix and module.  Scalars are plain Python objects: ``int`` for Z and
F_p (stored reduced to ``0 <= x < p``), ``fractions.Fraction`` for Q.  All
arithmetic is exact; integer arithmetic is arbitrary precision.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Union

Scalar = Union[int, Fraction]


def _is_prime(p: int) -> bool:
    if p < 2:
        return False
    if p < 4:
        return True
    if p % 2 == 0:
        return False
    f = 3
    while f * f <= p:
        if p % f == 0:
            return False
        f += 2
    return True


@dataclass(frozen=True)
class RingSpec:
    """One of Z, Q, or F_p (p prime)."""

    kind: str  # "Z" | "Q" | "Fp"
    p: int = 0

    def __post_init__(self):
        if self.kind not in ("Z", "Q", "Fp"):
            raise ValueError(f"unknown ring kind {self.kind!r}")
        if self.kind == "Fp" and not _is_prime(self.p):
            raise ValueError(f"{self.p} is not prime")
        if self.kind != "Fp" and self.p:
            raise ValueError("p only makes sense for Fp")

    # -- construction -------------------------------------------------

    @staticmethod
    def parse(text: str) -> "RingSpec":
        """Parse ``Z``, ``Q``, ``Fp:7`` or the shorthand ``F7``."""
        t = text.strip()
        if t in ("Z", "ZZ"):
            return ZZ
        if t in ("Q", "QQ"):
            return QQ
        if t.startswith("Fp:"):
            return GF(int(t[3:]))
        if t.startswith("F") and t[1:].isdigit():
            return GF(int(t[1:]))
        raise ValueError(f"cannot parse ring {text!r} (expected Z, Q or Fp:<prime>)")

    # -- properties ---------------------------------------------------

    @property
    def is_field(self) -> bool:
        return self.kind != "Z"

    @property
    def name(self) -> str:
        return {"Z": "Z", "Q": "Q"}.get(self.kind, f"F{self.p}")

    def __str__(self) -> str:
        return self.name

    # -- scalar arithmetic --------------------------------------------

    def from_int(self, c: int) -> Scalar:
        if self.kind == "Fp":
            return c % self.p
        if self.kind == "Q":
            return Fraction(c)
        return c

    def zero(self) -> Scalar:
        return self.from_int(0)

    def one(self) -> Scalar:
        return self.from_int(1)

    def add(self, a: Scalar, b: Scalar) -> Scalar:
        if self.kind == "Fp":
            return (a + b) % self.p
        return a + b

    def sub(self, a: Scalar, b: Scalar) -> Scalar:
        if self.kind == "Fp":
            return (a - b) % self.p
        return a - b

    def mul(self, a: Scalar, b: Scalar) -> Scalar:
        if self.kind == "Fp":
            return (a * b) % self.p
        return a * b

    def neg(self, a: Scalar) -> Scalar:
        if self.kind == "Fp":
            return (-a) % self.p
        return -a

    def is_zero(self, a: Scalar) -> bool:
        return a == 0

    def is_unit(self, a: Scalar) -> bool:
        if self.kind == "Z":
            return a in (1, -1)
        return a != 0

    def inv(self, a: Scalar) -> Scalar:
        if self.kind == "Fp":
            return pow(a, self.p - 2, self.p)
        if self.kind == "Q":
            return Fraction(1) / a
        if a in (1, -1):
            return a
        raise ZeroDivisionError(f"{a} is not a unit in Z")

    def div(self, a: Scalar, b: Scalar) -> Scalar:
        """Exact division; raises for inexact division over Z."""
        if self.kind == "Fp":
            return (a * self.inv(b)) % self.p
        if self.kind == "Q":
            return a / b
        q, r = divmod(a, b)
        if r:
            raise ZeroDivisionError(f"{a} not divisible by {b} over Z")
        return q

    def divides(self, a: Scalar, b: Scalar) -> bool:
        """Whether a | b in this ring."""
        if self.kind != "Z":
            return (a != 0) or (b == 0)
        if a == 0:
            return b == 0
        return b % a == 0

    def scalar_str(self, a: Scalar) -> str:
        """Canonical text form: decimal for Z/F_p, ``p/q`` for Q."""
        if self.kind == "Q":
            f = Fraction(a)
            return str(f.numerator) if f.denominator == 1 else f"{f.numerator}/{f.denominator}"
        return str(a)


ZZ = RingSpec("Z")
QQ = RingSpec("Q")

_GF_CACHE: dict[int, RingSpec] = {}


def GF(p: int) -> RingSpec:
    if p not in _GF_CACHE:
        _GF_CACHE[p] = RingSpec("Fp", p)
    return _GF_CACHE[p]
