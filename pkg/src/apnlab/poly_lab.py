"""Polynomials over GF(2^n): gcds, squarefreeness and root-search irreducibility."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from apnlab.field_core import FieldSpec, embedding, gf2_is_irreducible
from apnlab.limits import check_exhaustive

MAX_IRREDUCIBLE_DEGREE = 5


@dataclass(frozen=True)
class PolyOverField:
    """Dense polynomial, coefficients lowest degree first, trailing zeros stripped."""

    field: FieldSpec
    coeffs: tuple[int, ...]

    def __post_init__(self):
        c = [self.field.check(x) for x in self.coeffs]
        while c and c[-1] == 0:
            c.pop()
        object.__setattr__(self, "coeffs", tuple(c))

    @classmethod
    def from_dict(cls, field: FieldSpec, terms: dict[int, int]) -> PolyOverField:
        deg = max(terms, default=-1)
        c = [0] * (deg + 1)
        for k, v in terms.items():
            c[k] ^= int(v)
        return cls(field, tuple(c))

    @classmethod
    def parse(cls, field: FieldSpec, text: str) -> PolyOverField:
        """Comma-separated hex coefficients, lowest degree first."""
        parts = [p.strip() for p in text.split(",") if p.strip()]
        return cls(field, tuple(int(p, 16) for p in parts))

    def format(self) -> str:
        return ",".join(f"{c:x}" for c in self.coeffs) or "0"

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def lead(self) -> int:
        return self.coeffs[-1] if self.coeffs else 0

    def _new(self, coeffs) -> PolyOverField:
        return PolyOverField(self.field, tuple(coeffs))

    def __add__(self, other: PolyOverField) -> PolyOverField:
        self._same(other)
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        return self._new(x ^ (b[k] if k < len(b) else 0) for k, x in enumerate(a))

    __sub__ = __add__

    def __mul__(self, other: PolyOverField) -> PolyOverField:
        self._same(other)
        if self.is_zero() or other.is_zero():
            return self._new(())
        f = self.field
        out = [0] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    out[i + j] ^= f.mul(a, b)
        return self._new(out)

    def _same(self, other: PolyOverField):
        if other.field != self.field:
            raise ValueError("polynomials over different fields")

    def __divmod__(self, other: PolyOverField):
        self._same(other)
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        f = self.field
        r = list(self.coeffs)
        dq = len(r) - len(other.coeffs)
        if dq < 0:
            return self._new(()), self
        quot = [0] * (dq + 1)
        inv_lead = f.inverse(other.lead)
        for k in range(dq, -1, -1):
            c = f.mul(r[k + other.degree], inv_lead)
            quot[k] = c
            if c:
                for j, b in enumerate(other.coeffs):
                    r[k + j] ^= f.mul(c, b)
        return self._new(quot), self._new(r[: other.degree])

    def __mod__(self, other):
        return divmod(self, other)[1]

    def monic(self) -> PolyOverField:
        if self.is_zero():
            return self
        inv = self.field.inverse(self.lead)
        return self._new(self.field.mul(c, inv) for c in self.coeffs)

    def derivative(self) -> PolyOverField:
        # k * c_k in characteristic 2: only odd k survive
        return self._new(c if k % 2 else 0 for k, c in enumerate(self.coeffs) if k > 0)

    def __call__(self, x: int) -> int:
        acc = 0
        for c in reversed(self.coeffs):
            acc = self.field.mul(acc, x) ^ c
        return acc

    def eval_vec(self, xs, field: FieldSpec | None = None, embed=None) -> np.ndarray:
        """Horner evaluation at many points, optionally in an extension field."""
        field = field or self.field
        xs = np.asarray(xs, dtype=np.int64)
        coeffs = [embed(c) if embed else c for c in self.coeffs]
        acc = np.zeros_like(xs)
        for c in reversed(coeffs):
            acc = field.mul_vec(acc, xs) ^ c
        return acc

    def map_coeffs(self, fn, field: FieldSpec) -> PolyOverField:
        return PolyOverField(field, tuple(fn(c) for c in self.coeffs))

    def __repr__(self):
        return f"PolyOverField(GF(2^{self.field.n}), [{self.format()}])"


def x_power_minus_one(field: FieldSpec, s: int) -> PolyOverField:
    """X^s - 1 (= X^s + 1 in characteristic 2)."""
    return PolyOverField.from_dict(field, {s: 1, 0: 1})


def poly_gcd(p: PolyOverField, q: PolyOverField) -> PolyOverField:
    if p.is_zero() and q.is_zero():
        raise ValueError("gcd(0, 0) is undefined")
    while not q.is_zero():
        p, q = q, p % q
    return p.monic()


def is_squarefree(p: PolyOverField) -> bool:
    if p.is_zero():
        raise ValueError("the zero polynomial has no squarefree test")
    return poly_gcd(p, p.derivative()).degree == 0


def roots_in(p: PolyOverField, field: FieldSpec | None = None, *, override_caps: bool = False) -> np.ndarray:
    """All roots of p in ``field`` (default: its own field), by exhaustive evaluation."""
    field = field or p.field
    check_exhaustive(field.n, override_caps)
    embed = None if field == p.field else embedding(p.field, field)
    vals = p.eval_vec(field.elements(), field, embed)
    return np.flatnonzero(vals == 0)


def has_root_in_field(p: PolyOverField, *, override_caps: bool = False) -> int | None:
    """Smallest-bits root of p in its coefficient field, or None."""
    if p.degree < 1:
        raise ValueError("need a polynomial of degree >= 1")
    r = roots_in(p, override_caps=override_caps)
    return int(r[0]) if len(r) else None


def _pow_x_mod(p: PolyOverField, e: int) -> PolyOverField:
    """X^e mod p by square-and-multiply."""
    x = PolyOverField(p.field, (0, 1))
    result = PolyOverField(p.field, (1,)) % p
    base = x % p
    while e:
        if e & 1:
            result = (result * base) % p
        base = (base * base) % p
        e >>= 1
    return result


def has_root_in_extension(p: PolyOverField, m: int) -> bool:
    """True iff p has a root in GF(2^(n*m)).

    Builds the extension and scans it when it is small enough; otherwise
    tests gcd(p, X^(2^(nm)) - X) != 1, which is the same question.
    """
    n_ext = p.field.n * m
    if n_ext <= 16:
        return len(roots_in(p, FieldSpec(n_ext))) > 0
    xq = _pow_x_mod(p, 1 << n_ext)
    return poly_gcd(p, xq - PolyOverField(p.field, (0, 1))).degree > 0


def is_irreducible_by_roots(p: PolyOverField) -> bool:
    """Irreducibility for 2 <= deg <= 5: no root in extensions of degree <= deg/2."""
    if not 2 <= p.degree <= MAX_IRREDUCIBLE_DEGREE:
        raise ValueError(f"root-search irreducibility covers degrees 2..{MAX_IRREDUCIBLE_DEGREE}")
    return not any(has_root_in_extension(p, m) for m in range(1, p.degree // 2 + 1))


def coprime_degree_irreducibility_check(p: PolyOverField, m: int) -> bool:
    """Check the predicted splitting of an irreducible p over GF(2) in GF(2^m).

    p (degree k) splits over GF(2^m) into d = gcd(k, m) irreducible factors
    of degree k/d, so it has k roots in GF(2^(m*j)) when (k/d) | j and none
    otherwise.  The root counts are compared for every j <= k with m*j <= 20.
    """
    if p.field.n != 1:
        raise ValueError("expects a polynomial over GF(2)")
    k = p.degree
    if k < 1 or not is_irreducible_over_gf2(p):
        raise ValueError("polynomial is reducible over GF(2)")
    if k * m > 20:
        raise ValueError("k * m must be <= 20")
    d = math.gcd(k, m)
    for j in range(1, k + 1):
        if m * j > 20:
            break
        predicted = k if j % (k // d) == 0 else 0
        observed = len(roots_in(p, FieldSpec(m * j), override_caps=True))
        if observed != predicted:
            return False
    return True


def is_irreducible_over_gf2(p: PolyOverField) -> bool:
    """Irreducibility of a polynomial over GF(2) of any degree (bitmask gcd test)."""
    if p.field.n != 1:
        raise ValueError("expects a polynomial over GF(2)")
    mask = sum(c << k for k, c in enumerate(p.coeffs))
    return gf2_is_irreducible(mask)
