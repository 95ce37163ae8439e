"""Walsh spectra, bentness and differential spectra of functions on GF(2^n).

Truth tables are indexed by element bits.  The Walsh transform pairs u
and x through the field trace, Tr(u*x), not the coordinate dot product:
the fast transform runs an ordinary Hadamard butterfly and then reads
W[m(u)], where m(u) is the trace-dual mask with Tr(u*x) = parity(x & m(u)).
"""

from __future__ import annotations

import math
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import Enum
from pathlib import Path

import numpy as np

from apnlab.field_core import FieldSpec, class_decomposition, find_omega
from apnlab.limits import check_exhaustive

NAIVE_MAX_N = 20
FAST_MAX_N = 24
CHUNK_ELEMS = 1 << 22


@dataclass(frozen=True, eq=False)
class BoolFn:
    n: int
    table: np.ndarray

    def __post_init__(self):
        t = np.asarray(self.table, dtype=np.uint8)
        if t.shape != (1 << self.n,):
            raise ValueError(f"truth table must have length 2^{self.n}")
        if np.any(t > 1):
            raise ValueError("truth table entries must be 0 or 1")
        object.__setattr__(self, "table", t)

    def signs(self) -> np.ndarray:
        return 1 - 2 * self.table.astype(np.int64)


@dataclass(frozen=True, eq=False)
class VecFn:
    n: int
    m: int
    table: np.ndarray

    def __post_init__(self):
        t = np.asarray(self.table, dtype=np.int64)
        if t.shape != (1 << self.n,):
            raise ValueError(f"value table must have length 2^{self.n}")
        if np.any(t < 0) or np.any(t >= (1 << self.m)):
            raise ValueError(f"values must be {self.m}-bit")
        object.__setattr__(self, "table", t)


@dataclass(frozen=True, eq=False)
class WalshSpectrum:
    values: np.ndarray
    evaluations: int | None = None

    def __eq__(self, other):
        if not isinstance(other, WalshSpectrum):
            return NotImplemented
        return np.array_equal(self.values, other.values)

    @property
    def n(self) -> int:
        return int(self.values.shape[0]).bit_length() - 1

    def parseval_holds(self) -> bool:
        v = self.values.astype(np.int64)
        return int(np.sum(v * v)) == 1 << (2 * self.n)

    def max_abs(self) -> int:
        return int(np.max(np.abs(self.values)))


def _field_for(n: int, field: FieldSpec | None) -> FieldSpec:
    if field is None:
        return FieldSpec(n)
    if field.n != n:
        raise ValueError(f"function on {n} bits does not live on {field}")
    return field


def trace_monomial(field: FieldSpec, a: int, i: int) -> BoolFn:
    """Truth table of x -> Tr(a * x^i)."""
    x = field.elements()
    return BoolFn(field.n, field.trace_table[field.mul_vec(a, field.pow_vec(x, i))])


def power_function(field: FieldSpec, e: int) -> VecFn:
    return VecFn(field.n, field.n, field.pow_vec(field.elements(), e))


# --- Walsh transforms ------------------------------------------------------------

def character_rows(field: FieldSpec, us: np.ndarray) -> np.ndarray:
    """Rows (-1)^Tr(u*x) for the given u, built from field products."""
    x = field.elements()
    prod = field.mul_vec(np.asarray(us, dtype=np.int64)[:, None], x[None, :])
    return 1.0 - 2.0 * field.trace_table[prod]


def walsh_naive_batch(signs: np.ndarray, field: FieldSpec) -> np.ndarray:
    """Spectra of many functions given as +-1 rows, by the defining double sum."""
    signs = np.atleast_2d(np.asarray(signs, dtype=np.float64))
    size = field.size
    out = np.empty(signs.shape, dtype=np.int64)
    step = max(1, CHUNK_ELEMS // size)
    for start in range(0, size, step):
        us = np.arange(start, min(size, start + step))
        out[:, us] = np.rint(signs @ character_rows(field, us).T).astype(np.int64)
    return out


def walsh_naive(f: BoolFn, field: FieldSpec | None = None) -> WalshSpectrum:
    check_exhaustive(f.n, cap=NAIVE_MAX_N)
    field = _field_for(f.n, field)
    return WalshSpectrum(walsh_naive_batch(f.signs()[None, :], field)[0])


def fwht(a: np.ndarray) -> np.ndarray:
    """Unnormalised Walsh-Hadamard transform along the last axis (dot-product form)."""
    a = np.array(a, dtype=np.int64)
    size = a.shape[-1]
    lead = a.shape[:-1]
    h = 1
    while h < size:
        v = a.reshape(*lead, size // (2 * h), 2, h)
        x = v[..., 0, :].copy()
        y = v[..., 1, :]
        v[..., 0, :] += y
        v[..., 1, :] = x - y
        h *= 2
    return a


def walsh_fast_batch(signs: np.ndarray, field: FieldSpec) -> np.ndarray:
    """Trace-form spectra of many functions: butterfly, then re-index through m(u)."""
    w = fwht(np.atleast_2d(signs))
    return w[:, field.trace_dual_mask]


def walsh_fast(f: BoolFn, field: FieldSpec | None = None) -> WalshSpectrum:
    check_exhaustive(f.n, cap=FAST_MAX_N)
    field = _field_for(f.n, field)
    return WalshSpectrum(walsh_fast_batch(f.signs()[None, :], field)[0])


def class_evaluation_count(field: FieldSpec, i: int) -> int:
    d = math.gcd(i, field.order)
    return field.order // d + 1


def walsh_monomial_by_classes(field: FieldSpec, a: int, i: int) -> WalshSpectrum:
    """Spectrum of Tr(a x^i) evaluated once per power-residue class.

    The value at beta is 1 + sum over class representatives x of
    (-1)^Tr(a x^i) * sum_k (-1)^Tr(beta x xi^k); it is constant on each
    class beta * Ker, so one representative per class plus beta = 0 suffices.
    """
    if a == 0:
        raise ValueError("a must be nonzero")
    cd = class_decomposition(field, i)
    reps = np.array(cd.representatives, dtype=np.int64)
    kernel = np.array(cd.kernel, dtype=np.int64)
    coset_layout = field.mul_vec(reps[:, None], kernel[None, :])       # (|I|, d)
    s = 1 - 2 * field.trace_table[field.mul_vec(a, field.pow_vec(reps, i))].astype(np.int64)

    betas = np.concatenate([[0], reps])
    vals = np.empty(len(betas), dtype=np.int64)
    step = max(1, CHUNK_ELEMS // field.size)
    for start in range(0, len(betas), step):
        b = betas[start:start + step]
        tr = field.trace_table[field.mul_vec(b[:, None, None], coset_layout[None, :, :])]
        inner = (1 - 2 * tr.astype(np.int64)).sum(axis=2)                # (chunk, |I|)
        vals[start:start + step] = 1 + inner @ s

    out = np.empty(field.size, dtype=np.int64)
    out[0] = vals[0]
    out[field.mul_vec(reps[:, None], kernel[None, :])] = vals[1:, None]
    return WalshSpectrum(out, evaluations=len(betas))


# --- balancedness and bentness -------------------------------------------------

def is_balanced(f: BoolFn) -> bool:
    return int(f.table.sum()) * 2 == 1 << f.n


def is_bent(f: BoolFn, field: FieldSpec | None = None) -> bool:
    if f.n % 2:
        raise ValueError("bent functions need an even number of variables")
    w = walsh_fast(f, field).values
    return bool(np.all(np.abs(w) == 1 << (f.n // 2)))


def bent_monomial_equivalence_check(field: FieldSpec, b: int, i: int) -> bool:
    """chi_f(beta) = chi_g(beta / b) for f = Tr(b^i x^i), g = Tr(x^i)."""
    if b == 0:
        raise ValueError("b must be nonzero")
    wf = walsh_fast(trace_monomial(field, field.pow(b, i), i), field).values
    wg = walsh_fast(trace_monomial(field, 1, i), field).values
    beta = field.elements()
    return bool(np.array_equal(wf, wg[field.mul_vec(beta, field.inverse(b))]))


class Sign(str, Enum):
    PLUS = "PLUS"
    MINUS = "MINUS"


class SignRuleViolation(AssertionError):
    pass


def sign_biconditionals_hold(n: int, i: int, sign: Sign) -> bool:
    """chi(0) = +2^(n/2) iff gcd(i, 2^(n/2)+1) = 1, and = -2^(n/2) iff gcd(i, 2^(n/2)-1) = 1."""
    h = n // 2
    plus_pred = math.gcd(i, 2**h + 1) == 1
    minus_pred = math.gcd(i, 2**h - 1) == 1
    return (sign is Sign.PLUS) == plus_pred and (sign is Sign.MINUS) == minus_pred


def bent_sign_check(field: FieldSpec, a: int, i: int) -> Sign:
    f = trace_monomial(field, a, i)
    w = walsh_fast(f, field).values
    if not np.all(np.abs(w) == field.q):
        raise ValueError(f"Tr({a:#x} x^{i}) is not bent")
    sign = Sign.PLUS if w[0] > 0 else Sign.MINUS
    if not sign_biconditionals_hold(field.n, i, sign):
        raise SignRuleViolation(f"chi(0) sign {sign.value} contradicts the gcd conditions for i={i}")
    return sign


# --- differential properties -------------------------------------------------------

@dataclass(frozen=True)
class DifferentialSpectrum:
    """histogram[k] = number of pairs (a != 0, b) with exactly k solutions of D_aF(x) = b."""

    histogram: dict[int, int]

    @property
    def uniformity(self) -> int:
        return max((k for k, v in self.histogram.items() if v), default=0)


def _diff_chunk(table: np.ndarray, m: int, a_values: np.ndarray) -> Counter:
    size = table.shape[0]
    x = np.arange(size)
    d = table[x[None, :] ^ a_values[:, None]] ^ table[None, :]
    idx = (np.arange(len(a_values))[:, None] << m) + d
    counts = np.bincount(idx.ravel(), minlength=len(a_values) << m)
    hist = np.bincount(counts, minlength=size + 1)
    return Counter({k: int(v) for k, v in enumerate(hist) if v})


def differential_spectrum(F: VecFn, *, workers: int = 1, override_caps: bool = False) -> DifferentialSpectrum:
    check_exhaustive(F.n, override_caps)
    size = 1 << F.n
    step = max(1, CHUNK_ELEMS // max(size, 1 << F.m))
    chunks = [np.arange(s, min(size, s + step)) for s in range(1, size, step)]
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            parts = list(pool.map(lambda c: _diff_chunk(F.table, F.m, c), chunks))
    else:
        parts = [_diff_chunk(F.table, F.m, c) for c in chunks]
    total = Counter()
    for p in parts:
        total.update(p)
    return DifferentialSpectrum(dict(sorted(total.items())))


def differential_uniformity(F: VecFn, **kw) -> int:
    return differential_spectrum(F, **kw).uniformity


def is_apn(F: VecFn, **kw) -> bool:
    """Every D_aF(x) = b (a != 0) has 0 or 2 solutions."""
    if F.n != F.m:
        raise ValueError("APN is defined for (n, n)-functions")
    return set(differential_spectrum(F, **kw).histogram) <= {0, 2}


def derivative_balance_check(B: BoolFn | VecFn, field: FieldSpec | None = None) -> bool:
    """Every derivative D_aB, a != 0, is balanced.

    With ``field`` given, B is read as an (n, n/2)-function whose values are
    half-field elements embedded in GF(2^n); for B = x^(q+1) the closed form
    D_aB(x) = rel_trace_half(a^q x) + a^(q+1) is also checked pointwise.
    """
    if B.n % 2:
        raise ValueError("needs an even number of variables")
    size = 1 << B.n
    x = np.arange(size)
    table = B.table.astype(np.int64)
    if field is not None:
        field = _field_for(B.n, field)
        half = field.half_field_elements
        if not np.all(np.isin(table, half)):
            raise ValueError("B does not take values in the half field")
        q = field.q
        is_b = np.array_equal(table, field.pow_vec(x, q + 1))
        want = size // len(half)
    else:
        m = 1 if isinstance(B, BoolFn) else B.m
        want = size >> m
    for a in range(1, size):
        d = table[x ^ a] ^ table
        counts = np.bincount(d, minlength=size)
        if field is not None:
            if not np.all(counts[half] == want):
                return False
            if is_b:
                closed = field.rel_trace_half_vec(field.mul_vec(field.pow(a, q), x)) ^ field.pow(a, q + 1)
                if not np.array_equal(d, closed):
                    return False
        else:
            hits = counts[counts > 0]
            if len(hits) != size // want or np.any(hits != want):
                return False
    return True


def derivative_solution_set(field: FieldSpec, a: int, c: int) -> np.ndarray:
    """Solutions of D_aB(x) = c for B = x^(q+1), from the closed form.

    They form a * (e + F_q) with rel_trace_half(e) = 1 + c / a^(q+1).
    """
    if a == 0:
        raise ValueError("a must be nonzero")
    if not field.in_subfield(c, field.n // 2):
        raise ValueError("c must lie in the half field")
    q = field.q
    target = 1 ^ field.div(c, field.pow(a, q + 1))
    e = field.mul(target, find_omega(field))
    return np.sort(field.mul_vec(a, field.half_field_elements ^ e))


# --- S-box files and reports -----------------------------------------------------

class MalformedSbox(ValueError):
    pass


def read_sbox(path: str | Path) -> VecFn:
    """One hex value per line, or raw little-endian uint32 words (.bin)."""
    raw = Path(path).read_bytes()
    values: list[int]
    text = None
    if Path(path).suffix != ".bin":
        try:
            text = raw.decode("ascii")
        except UnicodeDecodeError:
            text = None
    if text is not None:
        try:
            values = [int(line.strip(), 16) for line in text.splitlines() if line.strip()]
        except ValueError as exc:
            raise MalformedSbox(f"{path}: {exc}") from None
    else:
        if len(raw) % 4:
            raise MalformedSbox(f"{path}: binary length is not a multiple of 4")
        values = np.frombuffer(raw, dtype="<u4").astype(np.int64).tolist()
    size = len(values)
    if size < 2 or size & (size - 1):
        raise MalformedSbox(f"{path}: {size} entries is not a power of two")
    n = size.bit_length() - 1
    top = max(values)
    if min(values) < 0:
        raise MalformedSbox(f"{path}: negative entry")
    m = n if top < size else top.bit_length()
    return VecFn(n, m, np.array(values, dtype=np.int64))


def component_walsh_max(F: VecFn) -> tuple[int, int]:
    """(max, min) of |W| over all nonzero components v.F and all u."""
    x_par = np.arange(1 << F.m)
    best, worst = 0, 1 << F.n
    step = max(1, CHUNK_ELEMS // (1 << F.n))
    for start in range(1, 1 << F.m, step):
        vs = x_par[start:start + step]
        bits = np.bitwise_and(vs[:, None], F.table[None, :])
        par = np.zeros(bits.shape, dtype=np.int64)
        for k in range(F.m):
            par ^= (bits >> k) & 1
        w = np.abs(fwht(1 - 2 * par))
        best = max(best, int(w.max()))
        worst = min(worst, int(w.min()))
    return best, worst


def sbox_report(F: VecFn, source: str = "", *, walsh_cap: int = 12, override_caps: bool = False) -> dict:
    report = {"n": F.n, "m": F.m, "source": source}
    counts = np.bincount(F.table, minlength=1 << F.m)
    report["is_balanced"] = bool(np.all(counts == 1 << max(F.n - F.m, 0))) if F.m <= F.n else False
    if F.n <= walsh_cap or override_caps:
        wmax, wmin = component_walsh_max(F)
        report["walsh_max_abs"] = wmax
        report["nonlinearity"] = (1 << (F.n - 1)) - wmax // 2
        report["is_bent"] = F.n % 2 == 0 and wmax == wmin == 1 << (F.n // 2)
    else:
        report.update(walsh_max_abs=None, nonlinearity=None, is_bent=None)
    spec = differential_spectrum(F, override_caps=override_caps)
    report["differential_uniformity"] = spec.uniformity
    report["is_apn"] = set(spec.histogram) <= {0, 2} if F.n == F.m else None
    report["histogram"] = {str(k): v for k, v in spec.histogram.items()}
    return report
