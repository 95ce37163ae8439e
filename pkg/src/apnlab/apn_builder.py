"""APN functions F = L(B, G) built on B(x) = x^(q+1), q = 2^(n/2).

A function into the half field G yields an APN map L(B, G) for any linear
isomorphism L of half-field pairs onto GF(2^n) exactly when, for all
a != 0, b and d, G(aX + b) + G(aX + b + a) = d has at most two solutions X
in the half field.  The builders below construct the five families
(A..E), check their hypotheses, tabulate F and measure its differential
uniformity, and package the outcome as a certificate.
"""

from __future__ import annotations

import hashlib
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field as dc_field
from enum import Enum
from itertools import islice
from typing import Iterator

import numpy as np

from apnlab.field_core import FieldSpec, find_omega, is_kth_power, kth_power_mask
from apnlab.limits import check_exhaustive
from apnlab.poly_lab import PolyOverField, has_root_in_field, is_irreducible_by_roots
from apnlab.spectrum import VecFn, differential_spectrum

G_CONDITION_MAX_N = 10
INLINE_TABLE_MAX_N = 10


class Family(str, Enum):
    A_FAUX = "A_FAUX"
    A_OPTIMAL = "A_OPTIMAL"
    B = "B"
    C = "C"
    D = "D"
    E = "E"


class Verdict(str, Enum):
    APN_VERIFIED = "APN_VERIFIED"
    HYPOTHESIS_FAIL = "HYPOTHESIS_FAIL"
    NOT_APN = "NOT_APN"


VACUOUS = "VACUOUS"


# --- linear isomorphisms L : F_q x F_q -> F_{2^n} ---------------------------------

@dataclass(frozen=True, eq=False)
class LinearIso:
    """L(u, v) = sum_k u_terms[k] * u^(2^k) + sum_k v_terms[k] * v^(2^k)."""

    field: FieldSpec
    u_terms: tuple[tuple[int, int], ...]
    v_terms: tuple[tuple[int, int], ...]
    kind: str = "raw"
    params: dict = dc_field(default_factory=dict)

    def __post_init__(self):
        half = self.field.half_field_elements
        image = self(half[:, None], half[None, :])
        if len(np.unique(image)) != self.field.size:
            raise ValueError(f"L of kind {self.kind!r} is not bijective")

    def __call__(self, u, v) -> np.ndarray:
        f = self.field
        u = np.asarray(u, dtype=np.int64)
        v = np.asarray(v, dtype=np.int64)
        out = np.zeros(np.broadcast_shapes(u.shape, v.shape), dtype=np.int64)
        for var, terms in ((u, self.u_terms), (v, self.v_terms)):
            for k, coef in terms:
                out = out ^ f.mul_vec(coef, f.frobenius_vec(var, k))
        return out

    def to_json(self) -> dict:
        return {"kind": self.kind, **{k: _jsonable(v) for k, v in self.params.items()}}


def _jsonable(v):
    if isinstance(v, (list, tuple)):
        return [_hex(x) for x in v]
    if isinstance(v, bool) or not isinstance(v, int):
        return v
    return _hex(v)


def make_isomorphism_L(field: FieldSpec, kind: str, **params) -> LinearIso:
    """Shipped kinds.

    basis:    L(u, v) = u + theta v          (theta outside the half field)
    dual:     L(u, v) = theta u + v
    gener:    L(u, v) = u + s u^(2^i) + v    (s outside the half field)
    family_b: L(u, v) = c u + sum_k r_k u^(2^k) + v, k = 1..n/2-1
    """
    field.require_even()
    if kind == "basis":
        th = int(params["theta"])
        return LinearIso(field, ((0, 1),), ((0, th),), kind, {"theta": th})
    if kind == "dual":
        th = int(params["theta"])
        return LinearIso(field, ((0, th),), ((0, 1),), kind, {"theta": th})
    if kind == "gener":
        s, i = int(params["s"]), int(params["i"])
        return LinearIso(field, ((0, 1), (i, s)), ((0, 1),), kind, {"s": s, "i": i})
    if kind == "family_b":
        c = int(params["c"])
        r = tuple(int(x) for x in params.get("r", ()))
        u_terms = ((0, c),) + tuple((k + 1, rk) for k, rk in enumerate(r) if rk)
        return LinearIso(field, u_terms, ((0, 1),), kind, {"c": c, "r": r})
    raise ValueError(f"unknown isomorphism kind {kind!r}")


def iso_from_json(field: FieldSpec, data: dict) -> LinearIso:
    params = {k: (v if k in ("kind", "i") else _parse_hex_value(v)) for k, v in data.items()}
    kind = params.pop("kind")
    return make_isomorphism_L(field, kind, **params)


def _parse_hex_value(v):
    if isinstance(v, list):
        return [int(x, 16) for x in v]
    return int(v, 16) if isinstance(v, str) else v


def default_iso(field: FieldSpec) -> LinearIso:
    return make_isomorphism_L(field, "basis", theta=find_omega(field))


# --- the reduction theorem -------------------------------------------------------

def b_table(field: FieldSpec) -> np.ndarray:
    return field.pow_vec(field.elements(), field.q + 1)


def compose_L(field: FieldSpec, L: LinearIso, G: np.ndarray) -> VecFn:
    """Value table of x -> L(B(x), G(x))."""
    return VecFn(field.n, field.n, L(b_table(field), G))


def g_condition_check(field: FieldSpec, G: np.ndarray, *, override_caps: bool = False) -> bool:
    """For all a != 0, b, d: #{X in F_q : G(aX+b) + G(aX+b+a) = d} <= 2."""
    field.require_even()
    check_exhaustive(field.n, override_caps, cap=G_CONDITION_MAX_N)
    G = np.asarray(G, dtype=np.int64)
    half = field.half_field_elements
    if not np.all(np.isin(G, half)):
        raise ValueError("G must take values in the half field")
    bs = field.elements()
    step = max(1, (1 << 21) // (field.size * len(half)))
    for start in range(1, field.size, step):
        a = np.arange(start, min(field.size, start + step), dtype=np.int64)
        pts = field.mul_vec(a[:, None], half[None, :])                  # (A, q)
        idx = bs[None, :, None] ^ pts[:, None, :]                        # (A, 2^n, q)
        vals = np.sort(G[idx] ^ G[idx ^ a[:, None, None]], axis=2)
        if vals.shape[2] > 2 and np.any(vals[..., 2:] == vals[..., :-2]):
            return False
    return True


def gold_identity_check(field: FieldSpec, a: int, b: int, k: int, j: int, i: int | None = None) -> bool:
    """(i) the derivative identity for exponent 2^k + 2^j, pointwise over the field;
    (ii) X^(2^i) + X + c has 0 or 2 roots for every c, when gcd(i, r) = 1.

    (ii) runs with the given i, or i = |k - j| when that is coprime to r.
    """
    f = field
    x = f.elements()
    e = (1 << k) + (1 << j)
    ax = f.mul_vec(a, x)
    lhs = f.pow_vec(ax ^ b, e) ^ f.pow_vec(ax ^ a ^ b, e)
    rhs = f.mul_vec(f.pow(a, e), f.frobenius_vec(x, k) ^ f.frobenius_vec(x, j) ^ 1)
    rhs = rhs ^ f.mul(f.frobenius(b, k), f.frobenius(a, j)) ^ f.mul(f.frobenius(b, j), f.frobenius(a, k))
    ok = bool(np.array_equal(lhs, rhs))
    if i is None:
        i = abs(k - j)
        if i == 0 or math.gcd(i, f.n) != 1:
            return ok
    elif math.gcd(i, f.n) != 1:
        raise ValueError(f"part (ii) needs gcd(i, r) = 1, got i={i}, r={f.n}")
    vals = f.frobenius_vec(x, i) ^ x                      # X^(2^i) + X = c
    counts = np.bincount(vals, minlength=f.size)
    return ok and set(np.unique(counts).tolist()) <= {0, 2}


# --- parameters and certificates ------------------------------------------------------

def _hex(x):
    return None if x is None else f"{int(x):x}"


def _unhex(s):
    return None if s is None else int(s, 16)


@dataclass(frozen=True)
class FamilyParams:
    family: Family
    n: int
    i: int | None = None
    j: int | None = None
    s_exp: int | None = None
    b: int | None = None
    c: int | None = None
    t: int | None = None
    s_elem: int | None = None
    r: tuple[int, ...] | None = None
    L: dict | None = None

    def to_json(self) -> dict:
        return {
            "i": self.i, "j": self.j, "s": self.s_exp,
            "b": _hex(self.b), "c": _hex(self.c), "t": _hex(self.t), "s_elem": _hex(self.s_elem),
            "r": None if self.r is None else [_hex(x) for x in self.r],
            "L": self.L,
        }

    @classmethod
    def from_json(cls, family: str, n: int, p: dict) -> FamilyParams:
        return cls(
            Family(family), n, p.get("i"), p.get("j"), p.get("s"),
            _unhex(p.get("b")), _unhex(p.get("c")), _unhex(p.get("t")), _unhex(p.get("s_elem")),
            None if p.get("r") is None else tuple(int(x, 16) for x in p["r"]),
            p.get("L"),
        )


@dataclass(frozen=True)
class Hypothesis:
    name: str
    passed: bool
    detail: str = ""


@dataclass(eq=False)
class ApnCertificate:
    params: FamilyParams
    poly: int
    hypothesis_report: list[Hypothesis]
    function_table: VecFn | None
    measured_uniformity: int | None
    verdict: Verdict
    reason: str | None = None
    diagnostics: dict = dc_field(default_factory=dict)
    polynomial: str | None = None

    def __post_init__(self):
        if self.verdict is Verdict.APN_VERIFIED:
            assert all(h.passed for h in self.hypothesis_report) and self.measured_uniformity == 2

    @property
    def table_hash(self) -> str | None:
        if self.function_table is None:
            return None
        return hashlib.sha256(self.function_table.table.astype("<u4").tobytes()).hexdigest()

    def to_json(self) -> dict:
        d = {
            "family": self.params.family.value,
            "n": self.params.n,
            "poly": _hex(self.poly),
            "params": self.params.to_json(),
            "hypothesis_report": [{"name": h.name, "passed": h.passed, "detail": h.detail}
                                  for h in self.hypothesis_report],
            "uniformity": self.measured_uniformity,
            "verdict": self.verdict.value,
            "reason": self.reason,
            "diagnostics": self.diagnostics,
            "table_hash": self.table_hash,
        }
        if self.polynomial is not None:
            d["polynomial"] = self.polynomial
        if self.function_table is not None and self.params.n <= INLINE_TABLE_MAX_N:
            d["table"] = [_hex(v) for v in self.function_table.table]
        return d

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2)


def _finish(field, params, hyps, F: VecFn | None, *, reason=None, diagnostics=None,
            polynomial=None, measure=True) -> ApnCertificate:
    uniformity = None
    if F is not None and measure:
        uniformity = differential_spectrum(F).uniformity
    if not all(h.passed for h in hyps):
        verdict = Verdict.HYPOTHESIS_FAIL
    elif uniformity == 2:
        verdict = Verdict.APN_VERIFIED
    else:
        verdict = Verdict.NOT_APN
    return ApnCertificate(params, field.reduction_poly, hyps, F, uniformity, verdict,
                          reason, diagnostics or {}, polynomial)


def _tr(field: FieldSpec, x: np.ndarray) -> np.ndarray:
    return field.rel_trace_half_vec(x)


def _sqrt(field: FieldSpec, c: int) -> int:
    """c^(2^(n-1))."""
    return field.frobenius(c, field.n - 1)


# --- G functions of the families ---------------------------------------------------------

def g_family_a(field: FieldSpec, i: int, c: int) -> np.ndarray:
    x = field.elements()
    e = (1 << (2 * i)) + (1 << i)
    return _tr(field, field.mul_vec(field.inverse(_sqrt(field, c)), field.pow_vec(x, e)))


def g_family_b(field: FieldSpec, s_exp: int, b: int) -> np.ndarray:
    return _tr(field, field.mul_vec(b, field.pow_vec(field.elements(), (1 << s_exp) + 1)))


def g_family_d(field: FieldSpec, i: int, c: int, t: int = 0) -> np.ndarray:
    x = field.elements()
    q, p = field.q, 1 << i
    inner = field.pow_vec(x, p + 1) ^ field.mul_vec(c, field.pow_vec(x, p * q + 1)) \
        ^ field.mul_vec(t, field.pow_vec(x, p + q))
    return _tr(field, inner)


def g_family_c(field: FieldSpec, i: int, c: int) -> np.ndarray:
    return g_family_d(field, i, c, 0)


def g_family_e(field: FieldSpec, i: int, j: int, c: int) -> np.ndarray:
    x = field.elements()
    e = (1 << j) + (1 << i)
    return _tr(field, field.mul_vec(field.inverse(_sqrt(field, c)), field.pow_vec(x, e)))


def family_d_polynomial(field: FieldSpec, i: int, c: int, t: int = 0) -> PolyOverField:
    """X^(2^i+1) + (t^q + c) X^(2^i) + (c^q + t) X + 1."""
    q = field.q
    return PolyOverField.from_dict(field, {
        (1 << i) + 1: 1,
        1 << i: field.pow(t, q) ^ c,
        1: field.pow(c, q) ^ t,
        0: 1,
    })


def has_unit_circle_root(P: PolyOverField) -> bool:
    """Some root z of P with z^(q+1) = 1, i.e. z = a^(q-1) for some a != 0."""
    f = P.field
    units = f.pow_vec(np.arange(1, f.size), f.q - 1)
    return bool(np.any(P.eval_vec(np.unique(units)) == 0))


# --- family builders ------------------------------------------------------------------------

def _half(field: FieldSpec) -> int:
    field.require_even()
    return field.n // 2


def family_a_admissible(field: FieldSpec, i: int, variant: Family) -> list[int]:
    """All c with c^(q+1) = 1 outside the excluded power class, increasing bits."""
    q = field.q
    k = ((1 << i) + 1) * (q - 1) if variant is Family.A_FAUX else 3 * (q - 1)
    x = field.elements()
    circle = x[(x != 0) & (field.pow_vec(x, q + 1) == 1)]
    excluded = kth_power_mask(field, k)
    return [int(c) for c in circle if not excluded[c]]


def build_family_a(field: FieldSpec, i: int, c: int | None = None, b: int | None = None,
                   variant: Family = Family.A_OPTIMAL) -> ApnCertificate:
    """F(X) = X^(2^2i + 2^i) + b X^(q+1) + c X^(q(2^2i + 2^i))."""
    variant = Family(variant)
    if variant not in (Family.A_FAUX, Family.A_OPTIMAL):
        raise ValueError("variant must be A_FAUX or A_OPTIMAL")
    h = _half(field)
    q = field.q
    params = FamilyParams(variant, field.n, i=i, b=b, c=c)
    gcd_ok = math.gcd(i, h) == 1
    if variant is Family.A_OPTIMAL:
        if not gcd_ok:
            raise ValueError(f"need gcd(i, n/2) = 1, got i={i}, n/2={h}")
        if i % 2 == 0 or h % 2 == 0:
            raise ValueError("A_OPTIMAL needs i and n/2 odd")
    hyps = [Hypothesis("gcd(i,n/2)=1", gcd_ok, f"gcd({i},{h})={math.gcd(i, h)}")]
    if variant is Family.A_FAUX and (i % 2 == 0 or h % 2 == 0):
        # every c with c^(q+1) = 1 is a (q-1)-th power, and the exclusion class is F*^(q-1) here
        admissible = family_a_admissible(field, i, variant)
        hyps.append(Hypothesis("admissible_c_exists", bool(admissible),
                               f"{len(admissible)} of {q + 1} candidates on c^(q+1)=1"))
        if not admissible:
            return _finish(field, params, hyps, None, reason=VACUOUS)
    if c is None or b is None:
        if not gcd_ok:
            return _finish(field, params, hyps, None)
        raise ValueError("family A needs both c and b")
    field.check(c), field.check(b)
    k = ((1 << i) + 1) * (q - 1) if variant is Family.A_FAUX else 3 * (q - 1)
    hyps.append(Hypothesis("c^(q+1)=1", c != 0 and field.pow(c, q + 1) == 1))
    hyps.append(Hypothesis(f"c not in F*^{k}", c != 0 and not is_kth_power(field, c, k)))
    hyps.append(Hypothesis("c*b^q+b!=0", field.mul(c, field.pow(b, q)) ^ b != 0))
    hyps.append(Hypothesis("c not in half field", not field.in_subfield(c, h)))
    if not all(h_.passed for h_ in hyps):
        return _finish(field, params, hyps, None)
    x = field.elements()
    e = (1 << (2 * i)) + (1 << i)
    table = field.pow_vec(x, e) ^ field.mul_vec(b, field.pow_vec(x, q + 1)) \
        ^ field.mul_vec(c, field.pow_vec(x, q * e))
    return _finish(field, params, hyps, VecFn(field.n, field.n, table))


def build_family_b(field: FieldSpec, s_exp: int, b: int, c: int, r=None) -> ApnCertificate:
    """F(X) = b X^(2^s+1) + b^q X^(q(2^s+1)) + c X^(q+1) + sum_k r_k X^(2^k (q+1))."""
    h = _half(field)
    q = field.q
    if s_exp % 2 == 0 or h % 2 == 0 or math.gcd(s_exp, h) != 1:
        raise ValueError("family B needs s and n/2 odd with gcd(s, n/2) = 1")
    r = tuple(r) if r is not None else (0,) * (h - 1)
    if len(r) != h - 1:
        raise ValueError(f"r must have n/2 - 1 = {h - 1} entries")
    if not all(field.in_subfield(x, h) for x in r):
        raise ValueError("r entries must lie in the half field")
    field.check(b), field.check(c)
    params = FamilyParams(Family.B, field.n, s_exp=s_exp, b=b, c=c, r=r)
    hyps = [
        Hypothesis("b not a cube", b != 0 and not is_kth_power(field, b, 3)),
        Hypothesis("c not in half field", not field.in_subfield(c, h)),
    ]
    if not all(h_.passed for h_ in hyps):
        return _finish(field, params, hyps, None)
    x = field.elements()
    g = (1 << s_exp) + 1
    table = field.mul_vec(b, field.pow_vec(x, g)) ^ field.mul_vec(field.pow(b, q), field.pow_vec(x, q * g)) \
        ^ field.mul_vec(c, field.pow_vec(x, q + 1))
    for k, rk in enumerate(r, start=1):
        table = table ^ field.mul_vec(rk, field.pow_vec(x, (1 << k) * (q + 1)))
    return _finish(field, params, hyps, VecFn(field.n, field.n, table))


def build_family_c(field: FieldSpec, i: int, c: int, s_elem: int | None = None) -> ApnCertificate:
    """F(X) = X(X^(2^i) + X^q + c X^(2^i q)) + X^(2^i)(c^q X^q + s X^(q 2^i)) + X^((2^i+1) q)."""
    h = _half(field)
    q = field.q
    if math.gcd(i, h) != 1:
        raise ValueError(f"need gcd(i, n/2) = 1, got i={i}")
    if (1 << i) + 1 > 5:
        raise ValueError("family C supports 2^i + 1 <= 5 (i = 1, 2)")
    s_elem = find_omega(field) if s_elem is None else s_elem
    if field.in_subfield(s_elem, h):
        raise ValueError("s must lie outside the half field")
    field.check(c)
    params = FamilyParams(Family.C, field.n, i=i, c=c, s_elem=s_elem)
    P = family_d_polynomial(field, i, c)
    if P.degree == 3:
        root = has_root_in_field(P)
        hyp = Hypothesis("P irreducible", root is None,
                         "root-free (degree 3)" if root is None else f"root {root:x}")
    else:
        hyp = Hypothesis("P irreducible", is_irreducible_by_roots(P), "root search up to degree 2 extensions")
    hyps = [hyp]
    if not hyp.passed:
        return _finish(field, params, hyps, None, polynomial=P.format())
    x = field.elements()
    p = 1 << i
    m = field.mul_vec
    pw = field.pow_vec
    table = m(x, pw(x, p) ^ pw(x, q) ^ m(c, pw(x, p * q))) \
        ^ m(pw(x, p), m(field.pow(c, q), pw(x, q)) ^ m(s_elem, pw(x, q * p))) ^ pw(x, (p + 1) * q)
    return _finish(field, params, hyps, VecFn(field.n, field.n, table), polynomial=P.format())


def build_family_d(field: FieldSpec, i: int, c: int, t: int, L: LinearIso | None = None, *,
                   measure_always: bool = True) -> ApnCertificate:
    """F = L(B, G) with G(X) = Tr(X^(2^i+1) + c X^(2^i q+1) + t X^(2^i+q))."""
    h = _half(field)
    if math.gcd(i, h) != 1:
        raise ValueError(f"need gcd(i, n/2) = 1, got i={i}")
    field.check(c), field.check(t)
    L = L or default_iso(field)
    params = FamilyParams(Family.D, field.n, i=i, c=c, t=t, L=L.to_json())
    P = family_d_polynomial(field, i, c, t)
    root = has_root_in_field(P)
    hyps = [Hypothesis("P root-free", root is None, "" if root is None else f"root {root:x}")]
    if root is not None and not measure_always:
        return _finish(field, params, hyps, None, polynomial=P.format())
    F = compose_L(field, L, g_family_d(field, i, c, t))
    cert = _finish(field, params, hyps, F, polynomial=P.format())
    apn = cert.measured_uniformity == 2
    cert.diagnostics = {
        "apn": apn,
        "root_free": root is None,
        "biconditional_holds": apn == (root is None),
        "unit_circle_root": has_unit_circle_root(P),
    }
    return cert


def family_e_trace_oracle(field: FieldSpec, i: int, j: int, c: int) -> bool:
    """True iff Tr(a^(2^j+2^i) / c^(2^(n-1))) != 0 for every a != 0."""
    a = np.arange(1, field.size)
    v = field.mul_vec(field.inverse(_sqrt(field, c)), field.pow_vec(a, (1 << j) + (1 << i)))
    return bool(np.all(_tr(field, v) != 0))


def build_family_e(field: FieldSpec, i: int, j: int, c: int, L: LinearIso | None = None) -> ApnCertificate:
    """F = L(B, G) with G(X) = Tr(X^(2^j+2^i) / c^(2^(n-1)))."""
    h = _half(field)
    q = field.q
    if h % 2 == 0 or (j - i) % 2 == 0 or math.gcd(abs(j - i), h) != 1:
        raise ValueError("family E needs n/2 odd, j - i odd and gcd(j - i, n/2) = 1")
    field.check(c)
    L = L or default_iso(field)
    params = FamilyParams(Family.E, field.n, i=i, j=j, c=c, L=L.to_json())
    hyps = [
        Hypothesis("c in F*^(q-1)", c != 0 and is_kth_power(field, c, q - 1)),
        Hypothesis("c not in F*^(3(q-1))", c != 0 and not is_kth_power(field, c, 3 * (q - 1))),
    ]
    if not all(h_.passed for h_ in hyps):
        return _finish(field, params, hyps, None)
    cert = _finish(field, params, hyps, compose_L(field, L, g_family_e(field, i, j, c)))
    cert.diagnostics = {"trace_oracle_apn": family_e_trace_oracle(field, i, j, c)}
    return cert


def build(params: FamilyParams, poly: int = 0) -> ApnCertificate:
    """Rebuild a certificate from its parameters."""
    field = FieldSpec(params.n, poly)
    p = params
    fam = p.family
    if fam in (Family.A_FAUX, Family.A_OPTIMAL):
        return build_family_a(field, p.i, p.c, p.b, fam)
    if fam is Family.B:
        return build_family_b(field, p.s_exp, p.b, p.c, p.r)
    if fam is Family.C:
        return build_family_c(field, p.i, p.c, p.s_elem)
    L = iso_from_json(field, p.L) if p.L else None
    if fam is Family.D:
        return build_family_d(field, p.i, p.c, p.t, L)
    return build_family_e(field, p.i, p.j, p.c, L)


def certificate_from_json(data: dict) -> tuple[FamilyParams, int]:
    return FamilyParams.from_json(data["family"], int(data["n"]), data["params"]), int(data["poly"], 16)


def verify_certificate(data: dict) -> tuple[bool, ApnCertificate]:
    """Recompute a serialized certificate; True iff it reproduces exactly."""
    params, poly = certificate_from_json(data)
    cert = build(params, poly)
    fresh = cert.to_json()
    keys = ("hypothesis_report", "uniformity", "verdict", "reason", "table_hash", "params")
    return all(fresh.get(k) == data.get(k) for k in keys), cert


# --- search --------------------------------------------------------------------------------

def _exponents(h: int, *, odd: bool = False, limit: int | None = None) -> list[int]:
    top = limit if limit is not None else max(h, 1)
    return [i for i in range(1, top + 1) if math.gcd(i, h) == 1 and (not odd or i % 2)]


def _candidates(field: FieldSpec, family: Family, i: int | None) -> Iterator[tuple[str, dict]]:
    h = _half(field)
    q = field.q
    x = [int(v) for v in field.elements()]
    if family in (Family.A_FAUX, Family.A_OPTIMAL):
        if family is Family.A_OPTIMAL and h % 2 == 0:
            return
        exps = [i] if i is not None else (
            _exponents(h, odd=family is Family.A_OPTIMAL))
        for ii in exps:
            if family is Family.A_FAUX and (ii % 2 == 0 or h % 2 == 0):
                yield "vacuous", {"i": ii}
                continue
            if math.gcd(ii, h) != 1:
                continue
            for c in family_a_admissible(field, ii, family):
                for b in x[1:]:
                    if field.mul(c, field.pow(b, q)) ^ b:
                        yield "build", {"i": ii, "c": c, "b": b, "variant": family}
    elif family is Family.B:
        if h % 2 == 0:
            return
        cubes = kth_power_mask(field, 3)
        for s in ([i] if i is not None else _exponents(h, odd=True)):
            for b in x[1:]:
                if cubes[b]:
                    continue
                for c in x:
                    if not field.in_subfield(c, h):
                        yield "build", {"s_exp": s, "b": b, "c": c}
    elif family in (Family.C, Family.D):
        exps = [i] if i is not None else [e for e in (1, 2) if math.gcd(e, h) == 1]
        for ii in exps:
            for c in x:
                if family is Family.C:
                    yield "build", {"i": ii, "c": c}
                else:
                    for t in x:
                        yield "build", {"i": ii, "c": c, "t": t}
    elif family is Family.E:
        if h % 2 == 0:
            return
        unit = kth_power_mask(field, q - 1)
        cube_unit = kth_power_mask(field, 3 * (q - 1))
        cs = [c for c in x if unit[c] and not cube_unit[c]]
        pairs = [(a, b) for a in range(field.n) for b in range(a + 1, field.n)
                 if (b - a) % 2 and math.gcd(b - a, h) == 1]
        if i is not None:
            pairs = [p for p in pairs if p[0] == i]
        for ii, jj in pairs:
            for c in cs:
                yield "build", {"i": ii, "j": jj, "c": c}


def _build_candidate(field: FieldSpec, family: Family, kw: dict) -> ApnCertificate:
    if family in (Family.A_FAUX, Family.A_OPTIMAL):
        return build_family_a(field, **kw)
    if family is Family.B:
        return build_family_b(field, **kw)
    if family is Family.C:
        return build_family_c(field, **kw)
    if family is Family.D:
        return build_family_d(field, **kw, measure_always=False)
    return build_family_e(field, **kw)


def search_family(family: Family | str, n: int, budget: int, *, i: int | None = None,
                  include_failures: bool = False, poly: int = 0, workers: int = 1) -> list[ApnCertificate]:
    """Enumerate parameters in increasing-bits order, cheapest checks first.

    ``budget`` bounds the number of full differential sweeps.  Certificates
    for verified instances are returned in enumeration order; with
    ``include_failures`` hypothesis failures (including VACUOUS slices) are
    returned too.  Builds run ``workers`` at a time; results are consumed in
    enumeration order so the output does not depend on ``workers``.
    """
    family = Family(family)
    field = FieldSpec(n, poly)
    out: list[ApnCertificate] = []
    sweeps = 0
    cands = _candidates(field, family, i)
    pool = ThreadPoolExecutor(workers) if workers > 1 else None
    try:
        while sweeps < budget:
            batch = list(islice(cands, max(1, workers)))
            if not batch:
                break
            todo = [kw for action, kw in batch if action == "build"]
            built = iter(pool.map(lambda kw: _build_candidate(field, family, kw), todo) if pool
                         else (_build_candidate(field, family, kw) for kw in todo))
            for action, kw in batch:
                if sweeps >= budget:
                    break
                if action == "vacuous":
                    if include_failures:
                        out.append(build_family_a(field, kw["i"], variant=Family.A_FAUX))
                    continue
                cert = next(built)
                if cert.measured_uniformity is not None:
                    sweeps += 1
                if cert.verdict is not Verdict.HYPOTHESIS_FAIL or include_failures:
                    out.append(cert)
    finally:
        if pool:
            pool.shutdown()
    return out
