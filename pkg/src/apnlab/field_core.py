"""Arithmetic and structure of binary fields GF(2^n).

Elements are plain ints holding the polynomial-basis coefficients (bit k is
the coefficient of t^k).  :class:`FieldSpec` carries the field-level
operations; :class:`FieldElem` wraps an int for operator-style use.
Bulk operations over the whole field use numpy log/exp tables, built on
first use for n <= MAX_TABLE_N.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from functools import cached_property, lru_cache

import numpy as np

MAX_N = 32
MAX_TABLE_N = 24

# Lexicographically least irreducible polynomial of each degree 1..32.
LEAST_IRREDUCIBLE = {
    1: 0x2, 2: 0x7, 3: 0xB, 4: 0x13, 5: 0x25, 6: 0x43, 7: 0x83, 8: 0x11B,
    9: 0x203, 10: 0x409, 11: 0x805, 12: 0x1009, 13: 0x201B, 14: 0x4021,
    15: 0x8003, 16: 0x1002B, 17: 0x20009, 18: 0x40009, 19: 0x80027,
    20: 0x100009, 21: 0x200005, 22: 0x400003, 23: 0x800021, 24: 0x100001B,
    25: 0x2000009, 26: 0x400001B, 27: 0x8000027, 28: 0x10000003,
    29: 0x20000005, 30: 0x40000003, 31: 0x80000009, 32: 0x10000008D,
}


# --- GF(2)[X] on int bitmasks ------------------------------------------------

def clmul(a: int, b: int) -> int:
    """Carryless product of two bitmask polynomials."""
    r = 0
    while b:
        if b & 1:
            r ^= a
        a <<= 1
        b >>= 1
    return r


def gf2_mod(a: int, m: int) -> int:
    dm = m.bit_length()
    while a.bit_length() >= dm:
        a ^= m << (a.bit_length() - dm)
    return a


def gf2_gcd(a: int, b: int) -> int:
    while b:
        a, b = b, gf2_mod(a, b)
    return a


def gf2_mulmod(a: int, b: int, m: int) -> int:
    return gf2_mod(clmul(a, b), m)


def gf2_is_irreducible(p: int) -> bool:
    """No root of p in any GF(2^k), k <= deg/2, i.e. gcd(p, X^(2^k) + X) = 1.

    This is the root-search criterion phrased with gcds so that it works
    without materialising the extension fields.
    """
    n = p.bit_length() - 1
    if n < 1:
        return False
    if n == 1:
        return True
    x = 0b10
    for _ in range(n // 2):
        x = gf2_mulmod(x, x, p)
        if gf2_gcd(p, x ^ 0b10) != 1:
            return False
    return True


def _factorize(m: int) -> list[int]:
    primes = []
    d = 2
    while d * d <= m:
        if m % d == 0:
            primes.append(d)
            while m % d == 0:
                m //= d
        d += 1 if d == 2 else 2
    if m > 1:
        primes.append(m)
    return primes


def is_prime(p: int) -> bool:
    return p >= 2 and _factorize(p) == [p]


# --- vectorised helpers --------------------------------------------------------

def _clmul_reduce_vec(a: np.ndarray, b: np.ndarray, n: int, poly: int) -> np.ndarray:
    """Elementwise carryless product mod poly, without tables."""
    a = np.asarray(a, dtype=np.uint64)
    b = np.asarray(b, dtype=np.uint64)
    a, b = np.broadcast_arrays(a, b)
    r = np.zeros(a.shape, dtype=np.uint64)
    for k in range(n):
        bit = (b >> np.uint64(k)) & np.uint64(1)
        r ^= (a << np.uint64(k)) * bit
    for k in range(2 * n - 2, n - 1, -1):
        hit = (r >> np.uint64(k)) & np.uint64(1)
        r ^= np.uint64(poly << (k - n)) * hit
    return r


# --- the field ---------------------------------------------------------------

@dataclass(frozen=True)
class FieldSpec:
    """GF(2^n) = GF(2)[t]/(reduction_poly).

    ``reduction_poly`` defaults to the least irreducible polynomial of degree
    n.  The primitive element is the smallest-bits element of full order.
    """

    n: int
    reduction_poly: int = 0

    def __post_init__(self):
        if not 1 <= self.n <= MAX_N:
            raise ValueError(f"n must lie in 1..{MAX_N}, got {self.n}")
        if self.reduction_poly == 0:
            object.__setattr__(self, "reduction_poly", LEAST_IRREDUCIBLE[self.n])
        if self.reduction_poly.bit_length() - 1 != self.n:
            raise ValueError(f"reduction polynomial {self.reduction_poly:#x} has wrong degree")
        if not gf2_is_irreducible(self.reduction_poly):
            raise ValueError(f"reduction polynomial {self.reduction_poly:#x} is reducible")

    def __repr__(self):
        return f"FieldSpec(n={self.n}, poly={self.reduction_poly:#x})"

    @property
    def size(self) -> int:
        return 1 << self.n

    @property
    def order(self) -> int:
        """Order of the multiplicative group, 2^n - 1."""
        return (1 << self.n) - 1

    @property
    def q(self) -> int:
        """Size of the half field, 2^(n/2)."""
        self.require_even()
        return 1 << (self.n // 2)

    def require_even(self):
        if self.n % 2:
            raise ValueError(f"operation needs even n, got n={self.n}")

    def __call__(self, bits: int) -> FieldElem:
        return FieldElem(int(bits), self)

    def check(self, x) -> int:
        x = int(x)
        if not 0 <= x < self.size:
            raise ValueError(f"{x:#x} is not an element of GF(2^{self.n})")
        return x

    # scalar arithmetic

    def add(self, x: int, y: int) -> int:
        return x ^ y

    def mul(self, x: int, y: int) -> int:
        return gf2_mod(clmul(x, y), self.reduction_poly)

    def sqr(self, x: int) -> int:
        return self.mul(x, x)

    def pow(self, x: int, e: int) -> int:
        if e < 0:
            return self.pow(self.inverse(x), -e)
        if x == 0:
            return 1 if e == 0 else 0
        e %= self.order
        if e == 0:
            return 1
        r = 1
        while e:
            if e & 1:
                r = self.mul(r, x)
            x = self.mul(x, x)
            e >>= 1
        return r

    def inverse(self, x: int) -> int:
        if x == 0:
            raise ZeroDivisionError("0 has no inverse")
        return self.pow(x, self.order - 1)

    def div(self, x: int, y: int) -> int:
        return self.mul(x, self.inverse(y))

    def frobenius(self, x: int, a: int = 1) -> int:
        """x^(2^a), by (a mod n) squarings."""
        for _ in range(a % self.n):
            x = self.mul(x, x)
        return x

    def trace(self, x: int) -> int:
        """Absolute trace x + x^2 + ... + x^(2^(n-1)) as a bit."""
        t, y = 0, x
        for _ in range(self.n):
            t ^= y
            y = self.mul(y, y)
        if t not in (0, 1):
            raise ArithmeticError("trace left GF(2); field arithmetic is broken")
        return t

    def rel_trace_half(self, x: int) -> int:
        """Relative trace to the half field, x + x^(2^(n/2))."""
        self.require_even()
        return x ^ self.frobenius(x, self.n // 2)

    def in_subfield(self, x: int, s: int) -> bool:
        if s <= 0 or self.n % s:
            raise ValueError(f"subfield degree {s} does not divide {self.n}")
        return self.frobenius(x, s) == x

    def elem_order(self, x: int) -> int:
        if x == 0:
            raise ValueError("0 has no multiplicative order")
        o = self.order
        for p in _factorize(self.order):
            while o % p == 0 and self.pow(x, o // p) == 1:
                o //= p
        return o

    @cached_property
    def primitive(self) -> int:
        for x in range(1, self.size):
            if self.elem_order(x) == self.order:
                return x
        raise ArithmeticError("no primitive element found")  # pragma: no cover

    # whole-field tables

    def elements(self) -> np.ndarray:
        return np.arange(self.size, dtype=np.int64)

    def _need_tables(self):
        if self.n > MAX_TABLE_N:
            raise ValueError(f"table operations are limited to n <= {MAX_TABLE_N}")

    @cached_property
    def exp_table(self) -> np.ndarray:
        """exp_table[k] = alpha^k for k in [0, 2(2^n - 1)), doubled to skip a modulo."""
        self._need_tables()
        order = self.order
        block = 1 << ((self.n + 1) // 2)
        head = np.empty(block, dtype=np.int64)
        x = 1
        for k in range(block):
            head[k] = x
            x = self.mul(x, self.primitive)
        step = x
        out = np.empty(order + block, dtype=np.int64)
        cur = head.copy()
        pos = 0
        scale = 1
        while pos < order:
            out[pos:pos + block] = cur if scale == 1 else _clmul_reduce_vec(
                head, scale, self.n, self.reduction_poly).astype(np.int64)
            pos += block
            scale = self.mul(scale, step)
        out = out[:order]
        return np.concatenate([out, out])

    @cached_property
    def log_table(self) -> np.ndarray:
        """log_table[x] for x != 0; log_table[0] is a sentinel (-1)."""
        log = np.full(self.size, -1, dtype=np.int64)
        log[self.exp_table[: self.order]] = np.arange(self.order, dtype=np.int64)
        return log

    @cached_property
    def trace_table(self) -> np.ndarray:
        """Absolute trace of every element, via linearity on the basis."""
        basis_tr = np.array([self.trace(1 << k) for k in range(self.n)], dtype=np.uint8)
        x = self.elements()
        t = np.zeros(self.size, dtype=np.uint8)
        for k in range(self.n):
            t ^= ((x >> k) & 1).astype(np.uint8) * basis_tr[k]
        return t

    @cached_property
    def trace_dual_mask(self) -> np.ndarray:
        """m[u] with Tr(u*x) = parity(x & m[u]) for all x."""
        row = np.array([sum(self.trace(self.mul(1 << j, 1 << k)) << k
                            for k in range(self.n)) for j in range(self.n)], dtype=np.int64)
        u = self.elements()
        m = np.zeros(self.size, dtype=np.int64)
        for j in range(self.n):
            m ^= ((u >> j) & 1) * row[j]
        return m

    def mul_vec(self, x, y) -> np.ndarray:
        x = np.asarray(x, dtype=np.int64)
        y = np.asarray(y, dtype=np.int64)
        lt, et = self.log_table, self.exp_table
        r = et[lt[x] + lt[y]]
        return np.where((x == 0) | (y == 0), 0, r)

    def pow_vec(self, x, e: int) -> np.ndarray:
        x = np.asarray(x, dtype=np.int64)
        if e == 0:
            return np.ones_like(x)
        er = e % self.order
        r = self.exp_table[(self.log_table[x] * er) % self.order]
        return np.where(x == 0, 0, r)

    def inv_vec(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=np.int64)
        if np.any(x == 0):
            raise ZeroDivisionError("0 has no inverse")
        return self.exp_table[(self.order - self.log_table[x]) % self.order]

    def frobenius_vec(self, x, a: int) -> np.ndarray:
        return self.pow_vec(x, 1 << (a % self.n))

    def rel_trace_half_vec(self, x) -> np.ndarray:
        self.require_even()
        x = np.asarray(x, dtype=np.int64)
        return x ^ self.pow_vec(x, self.q)

    @cached_property
    def half_field_elements(self) -> np.ndarray:
        """Elements of GF(2^(n/2)) inside this field, increasing bits."""
        x = self.elements()
        return x[self.pow_vec(x, self.q) == x]

    @cached_property
    def half_field(self) -> FieldSpec:
        self.require_even()
        return FieldSpec(self.n // 2)

    @cached_property
    def half_embedding(self) -> Embedding:
        return embedding(self.half_field, self)


@dataclass(frozen=True, eq=False)
class FieldElem:
    """An element of a concrete GF(2^n)."""

    bits: int
    field: FieldSpec

    def __post_init__(self):
        self.field.check(self.bits)

    def _other(self, other) -> int:
        if isinstance(other, FieldElem):
            if other.field != self.field:
                raise ValueError(f"mismatched fields: {self.field} vs {other.field}")
            return other.bits
        if isinstance(other, int):
            return self.field.check(other)
        return NotImplemented

    def _wrap(self, bits: int) -> FieldElem:
        return FieldElem(bits, self.field)

    def __add__(self, other):
        y = self._other(other)
        return NotImplemented if y is NotImplemented else self._wrap(self.bits ^ y)

    __radd__ = __add__
    __sub__ = __add__
    __rsub__ = __add__

    def __mul__(self, other):
        y = self._other(other)
        return NotImplemented if y is NotImplemented else self._wrap(self.field.mul(self.bits, y))

    __rmul__ = __mul__

    def __truediv__(self, other):
        y = self._other(other)
        return NotImplemented if y is NotImplemented else self._wrap(self.field.div(self.bits, y))

    def __pow__(self, e: int):
        return self._wrap(self.field.pow(self.bits, e))

    def __neg__(self):
        return self

    def __eq__(self, other):
        if isinstance(other, FieldElem):
            return self.field == other.field and self.bits == other.bits
        if isinstance(other, int):
            return self.bits == other
        return NotImplemented

    def __hash__(self):
        return hash((self.bits, self.field))

    def __int__(self):
        return self.bits

    __index__ = __int__

    def __repr__(self):
        return f"{self.bits:#x}@GF(2^{self.field.n})"

    def inverse(self) -> FieldElem:
        return self._wrap(self.field.inverse(self.bits))

    def frobenius(self, a: int = 1) -> FieldElem:
        return self._wrap(self.field.frobenius(self.bits, a))

    def trace(self) -> int:
        return self.field.trace(self.bits)

    def rel_trace_half(self) -> FieldElem:
        return self._wrap(self.field.rel_trace_half(self.bits))

    def is_in_subfield(self, s: int) -> bool:
        return self.field.in_subfield(self.bits, s)


def add(x: FieldElem, y: FieldElem) -> FieldElem:
    return x + y


def mul(x: FieldElem, y: FieldElem) -> FieldElem:
    return x * y


def inverse(x: FieldElem) -> FieldElem:
    return x.inverse()


def frobenius_iter(x: FieldElem, a: int) -> FieldElem:
    return x.frobenius(a)


def abs_trace(x: FieldElem) -> int:
    return x.trace()


def rel_trace_half(x: FieldElem) -> FieldElem:
    return x.rel_trace_half()


def is_in_subfield(x: FieldElem, s: int) -> bool:
    return x.is_in_subfield(s)


# --- subfield embeddings ---------------------------------------------------------

@dataclass(frozen=True)
class Embedding:
    """Field homomorphism small -> big, fixed by sending t to a root of small's polynomial."""

    small: FieldSpec
    big: FieldSpec
    root: int
    forward: np.ndarray

    def __call__(self, x: int) -> int:
        return int(self.forward[int(x)])

    @cached_property
    def _back(self) -> dict[int, int]:
        return {int(v): k for k, v in enumerate(self.forward)}

    def back(self, y: int) -> int:
        try:
            return self._back[int(y)]
        except KeyError:
            raise ValueError(f"{int(y):#x} is not in the image of GF(2^{self.small.n})") from None

    def back_vec(self, y) -> np.ndarray:
        return np.array([self._back[int(v)] for v in np.ravel(y)], dtype=np.int64).reshape(np.shape(y))


def _eval_gf2_poly(field: FieldSpec, p: int, x: int) -> int:
    acc = 0
    for k in range(p.bit_length() - 1, -1, -1):
        acc = field.mul(acc, x) ^ ((p >> k) & 1)
    return acc


@lru_cache(maxsize=None)
def embedding(small: FieldSpec, big: FieldSpec) -> Embedding:
    if big.n % small.n:
        raise ValueError(f"GF(2^{small.n}) does not embed in GF(2^{big.n})")
    if small.n > 20:
        raise ValueError("embedding tables are limited to subfields of degree <= 20")
    gen = big.pow(big.primitive, big.order // small.order)
    # roots of small's polynomial lie in the subgroup generated by gen, or are 0 (n = 1)
    cand = 1
    root = 0 if _eval_gf2_poly(big, small.reduction_poly, 0) == 0 else None
    for _ in range(small.order if root is None else 0):
        if _eval_gf2_poly(big, small.reduction_poly, cand) == 0:
            root = cand
            break
        cand = big.mul(cand, gen)
    if root is None:  # pragma: no cover
        raise ArithmeticError("no root of the subfield polynomial found")
    powers = [1]
    for _ in range(small.n - 1):
        powers.append(big.mul(powers[-1], root))
    x = small.elements()
    fwd = np.zeros(small.size, dtype=np.int64)
    for k, pk in enumerate(powers):
        fwd ^= ((x >> k) & 1) * pk
    return Embedding(small, big, root, fwd)


# --- half-field decomposition --------------------------------------------------

def find_omega(field: FieldSpec) -> int:
    """Element with relative trace 1 (hence outside the half field)."""
    field.require_even()
    for x0 in range(1, field.size):
        t = field.rel_trace_half(x0)
        if t:
            return field.div(x0, t)
    raise ArithmeticError("relative trace vanished identically")  # pragma: no cover


def decompose(field: FieldSpec, X: int, omega: int) -> tuple[int, int]:
    """Coordinates (x, y) in the half field with X = x + omega*y."""
    field.require_even()
    t_omega = field.rel_trace_half(omega)
    if t_omega == 0:
        raise ValueError("omega lies in the half field")
    x = field.div(field.rel_trace_half(field.mul(X, field.frobenius(omega, field.n // 2))), t_omega)
    y = field.div(field.rel_trace_half(X), t_omega)
    return x, y


def recompose(field: FieldSpec, x: int, y: int, omega: int) -> int:
    return x ^ field.mul(omega, y)


def prop_clef_check(field: FieldSpec, c: int, omega: int) -> bool:
    """For c^(q+1) = 1: (1/c')^q = c/c' and (omega + c omega^q)/c' is in the half field, c' = c^(2^(n-1))."""
    field.require_even()
    q = field.q
    if c == 0 or field.pow(c, q + 1) != 1:
        raise ValueError("prop_clef_check needs c^(q+1) = 1")
    cp = field.frobenius(c, field.n - 1)
    inv_cp = field.inverse(cp)
    first = field.pow(inv_cp, q) == field.mul(c, inv_cp)
    w = field.mul(omega ^ field.mul(c, field.pow(omega, q)), inv_cp)
    return first and field.in_subfield(w, field.n // 2)


# --- power maps and residue classes ---------------------------------------------

def power_map_analysis(field: FieldSpec, i: int) -> tuple[int, bool, int]:
    """(d, x -> x^i permutes the field, number of nonzero i-th powers)."""
    if i <= 0:
        raise ValueError("exponent must be positive")
    d = math.gcd(i, field.order)
    return d, d == 1, field.order // d


@dataclass(frozen=True)
class ClassDecomposition:
    d: int
    kernel: tuple[int, ...]
    representatives: tuple[int, ...]
    xi: int

    def coset(self, field: FieldSpec, x: int) -> list[int]:
        return [field.mul(x, z) for z in self.kernel]


def class_decomposition(field: FieldSpec, i: int) -> ClassDecomposition:
    """Cosets of Ker(x -> x^d) in F*, with d = gcd(i, 2^n - 1).

    Representatives are the smallest-bits element of each coset.
    """
    d, _, count = power_map_analysis(field, i)
    xi = field.pow(field.primitive, field.order // d)
    kernel = [1]
    for _ in range(d - 1):
        kernel.append(field.mul(kernel[-1], xi))
    # cosets of <xi> are the residue classes of log(x) mod (2^n - 1)/d
    x = np.arange(1, field.size, dtype=np.int64)
    cls = field.log_table[x] % count
    reps = np.full(count, field.size, dtype=np.int64)
    np.minimum.at(reps, cls, x)
    return ClassDecomposition(d, tuple(kernel), tuple(int(r) for r in np.sort(reps)), xi)


def is_kth_power(field: FieldSpec, x: int, k: int) -> bool:
    if x == 0:
        raise ValueError("is_kth_power is defined on nonzero elements")
    if k <= 0:
        raise ValueError("k must be positive")
    return field.pow(x, field.order // math.gcd(k, field.order)) == 1


def kth_power_mask(field: FieldSpec, k: int) -> np.ndarray:
    """Boolean mask over all elements: True on nonzero k-th powers."""
    x = field.elements()
    e = field.order // math.gcd(k, field.order)
    return (x != 0) & (field.pow_vec(x, e) == 1)


# --- integer-only results ---------------------------------------------------------

def count_subspaces(p: int, n: int) -> int:
    """Number of F_p-subspaces of F_{p^n} (sum of Gaussian binomials)."""
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    if n < 1:
        raise ValueError("n must be positive")
    total = 0
    for s in range(n + 1):
        num = den = 1
        for k in range(s):
            num *= p ** (n - k) - 1
            den *= p ** (s - k) - 1
        term, rem = divmod(num, den)
        if rem:
            raise ArithmeticError(f"Gaussian binomial term s={s} is not integral")
        total += term
    return total


class GcdCase(str, Enum):
    I_EVEN = "I_EVEN"
    I_ODD_HALF_EVEN = "I_ODD_HALF_EVEN"
    I_ODD_HALF_ODD = "I_ODD_HALF_ODD"


def gcd_lemma_suite(i: int, half_n: int) -> tuple[int, GcdCase]:
    """gcd(2^i + 1, 2^half_n + 1) with its parity case; asserts the case table."""
    if i < 1 or half_n < 1 or math.gcd(i, half_n) != 1:
        raise ValueError(f"need gcd(i, n/2) = 1, got i={i}, n/2={half_n}")
    g = math.gcd(2**i + 1, 2**half_n + 1)
    if i % 2 == 0:
        case, expected = GcdCase.I_EVEN, 1
    elif half_n % 2 == 0:
        case, expected = GcdCase.I_ODD_HALF_EVEN, 1
    else:
        case, expected = GcdCase.I_ODD_HALF_ODD, 3
    if g != expected:
        raise ArithmeticError(f"gcd(2^{i}+1, 2^{half_n}+1) = {g}, case {case.value} predicts {expected}")
    if ((2**i + 1) % 3 == 0) != (i % 2 == 1) or ((2**i - 1) % 3 == 0) != (i % 2 == 0):
        raise ArithmeticError(f"divisibility by 3 fails for i={i}")
    return g, case


def gcd_boxed_identity(i: int, half_n: int) -> bool:
    """3 = gcd(2^i+1, 2^h-1) * gcd(2^i+1, 2^h+1) * (2^gcd(i, 2h) - 1), for gcd(i, h) = 1."""
    a = 2**i + 1
    lhs = math.gcd(a, 2**half_n - 1) * math.gcd(a, 2**half_n + 1) * (2 ** math.gcd(i, 2 * half_n) - 1)
    return lhs == 3
