import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from apnlab.field_core import FieldSpec, class_decomposition
from apnlab.limits import CapExceeded
from apnlab.spectrum import (
    BoolFn,
    MalformedSbox,
    Sign,
    SignRuleViolation,
    VecFn,
    WalshSpectrum,
    bent_monomial_equivalence_check,
    bent_sign_check,
    class_evaluation_count,
    derivative_balance_check,
    derivative_solution_set,
    differential_spectrum,
    differential_uniformity,
    is_apn,
    is_balanced,
    is_bent,
    power_function,
    read_sbox,
    sbox_report,
    sign_biconditionals_hold,
    trace_monomial,
    walsh_fast,
    walsh_monomial_by_classes,
    walsh_naive,
)


def walsh_loop(f: BoolFn, field: FieldSpec) -> np.ndarray:
    """Definition, one term at a time."""
    out = []
    for u in range(field.size):
        out.append(sum((-1) ** (int(f.table[x]) ^ field.trace(field.mul(u, x))) for x in range(field.size)))
    return np.array(out)


def diff_loop(table, n):
    worst = 0
    for a in range(1, 1 << n):
        counts = {}
        for x in range(1 << n):
            d = table[x ^ a] ^ table[x]
            counts[d] = counts.get(d, 0) + 1
        worst = max(worst, max(counts.values()))
    return worst


# --- Walsh transforms ---------------------------------------------------------------

def test_walsh_examples(gf):
    f = gf(3)
    zero = BoolFn(3, np.zeros(8, dtype=np.uint8))
    w = walsh_naive(zero).values
    assert w[0] == 8 and not np.any(w[1:])
    f2 = gf(2)
    tr = BoolFn(2, f2.trace_table.astype(np.uint8))
    w = walsh_naive(tr, f2).values
    assert w[1] == 4 and np.count_nonzero(w) == 1
    one = BoolFn(5, np.ones(32, dtype=np.uint8))
    assert walsh_fast(one).values[0] == -32
    assert walsh_loop(tr, f2).tolist() == w.tolist()


@pytest.mark.parametrize("n", [1, 3, 5])
def test_naive_matches_definition(n, gf):
    f = gf(n)
    rng = np.random.default_rng(n)
    for _ in range(5):
        fn = BoolFn(n, rng.integers(0, 2, f.size).astype(np.uint8))
        assert np.array_equal(walsh_naive(fn, f).values, walsh_loop(fn, f))


@settings(max_examples=40, deadline=None)
@given(n=st.integers(1, 12), seed=st.integers(0, 2**32 - 1))
def test_fast_equals_naive(n, seed):
    f = FieldSpec(n)
    table = np.random.default_rng(seed).integers(0, 2, f.size).astype(np.uint8)
    fn = BoolFn(n, table)
    a, b = walsh_naive(fn, f), walsh_fast(fn, f)
    assert a == b
    assert b.parseval_holds()
    assert np.all(b.values % 2 == 0)


def test_caps():
    with pytest.raises(CapExceeded):
        walsh_naive(BoolFn(21, np.zeros(1 << 21, dtype=np.uint8)))
    with pytest.raises(ValueError):
        BoolFn(3, np.zeros(7, dtype=np.uint8))
    with pytest.raises(ValueError):
        VecFn(2, 1, np.array([0, 1, 2, 0]))


def test_class_method_examples(gf):
    f = gf(4)
    a = f.primitive
    for i in range(1, 16):
        ref = walsh_fast(trace_monomial(f, a, i), f)
        assert walsh_monomial_by_classes(f, a, i) == ref
    cd = class_decomposition(f, 3)
    w = walsh_monomial_by_classes(f, a, 3).values
    for r in cd.representatives:
        assert len({int(w[v]) for v in cd.coset(f, r)}) == 1
    assert class_evaluation_count(gf(8), 15) == 18
    assert walsh_monomial_by_classes(gf(8), 1, 15).evaluations == 18
    assert walsh_monomial_by_classes(gf(8), 1, 7).evaluations == 256
    with pytest.raises(ValueError):
        walsh_monomial_by_classes(f, 0, 3)


@pytest.mark.parametrize("n", [5, 6, 7])
def test_class_method_all_exponents(n, gf):
    f = gf(n)
    for a in (1, f.primitive):
        for i in range(1, f.order + 1):
            assert walsh_monomial_by_classes(f, a, i) == walsh_fast(trace_monomial(f, a, i), f)


# --- balance and bentness ----------------------------------------------------------

def test_balance_bent_examples(gf):
    f = gf(8)
    tr = trace_monomial(f, 1, 1)
    assert is_balanced(tr) and not is_bent(tr, f)
    assert not is_balanced(BoolFn(4, np.zeros(16, dtype=np.uint8)))
    assert is_bent(trace_monomial(f, 1, 15), f)
    with pytest.raises(ValueError):
        is_bent(trace_monomial(gf(5), 1, 3))


def test_coprime_exponent_monomials_are_balanced(gf):
    for n in (4, 6, 8):
        f = gf(n)
        for i in range(1, f.order):
            if math.gcd(i, f.order) == 1:
                fn = trace_monomial(f, 1, i)
                assert is_balanced(fn) and not is_bent(fn, f)


def test_bent_monomial_equivalence(gf):
    f4 = gf(4)
    assert bent_monomial_equivalence_check(f4, 1, 3)
    assert all(bent_monomial_equivalence_check(f4, b, 3) for b in range(1, 16))
    f6 = gf(6)
    assert bent_monomial_equivalence_check(f6, f6.primitive, 5)
    with pytest.raises(ValueError):
        bent_monomial_equivalence_check(f4, 0, 3)


def test_bent_sign_check(gf):
    f = gf(8)
    assert bent_sign_check(f, 1, 15) is Sign.PLUS
    assert math.gcd(15, 17) == 1 and math.gcd(15, 15) == 15
    with pytest.raises(ValueError):
        bent_sign_check(f, 1, 1)
    assert sign_biconditionals_hold(8, 15, Sign.PLUS)
    assert not sign_biconditionals_hold(8, 15, Sign.MINUS)


def test_sign_of_chi_zero_over_all_bent_monomials(gf):
    """Every bent Tr(a x^(r(q-1))) at n = 4, 6, 8 has the sign the gcds predict."""
    for n in (4, 6, 8):
        f = gf(n)
        found = 0
        for r in range(1, f.q + 2):
            i = r * (f.q - 1)
            for a in range(1, f.size):
                fn = trace_monomial(f, a, i)
                if is_bent(fn, f):
                    found += 1
                    bent_sign_check(f, a, i)     # raises on a violation
        assert found > 0


def test_sign_violation_is_assertion():
    assert issubclass(SignRuleViolation, AssertionError)


# --- differential properties -----------------------------------------------------------

def test_differential_examples(gf):
    for n in (3, 4, 5, 6):
        f = gf(n)
        sq = power_function(f, 2)
        assert differential_uniformity(sq) == 1 << n
        assert not is_apn(sq)
        assert is_apn(power_function(f, 3))


@pytest.mark.parametrize("n", [3, 4, 5])
def test_differential_matches_loop(n, gf):
    f = gf(n)
    rng = np.random.default_rng(n)
    for e in (3, 5, 7, 11):
        F = power_function(f, e)
        assert differential_uniformity(F) == diff_loop(F.table.tolist(), n)
    table = rng.integers(0, f.size, f.size)
    assert differential_uniformity(VecFn(n, n, table)) == diff_loop(table.tolist(), n)


def test_histogram_invariants(gf):
    f = gf(7)
    F = power_function(f, 13)
    h = differential_spectrum(F).histogram
    assert all(k % 2 == 0 for k in h)
    assert sum(h.values()) == (f.size - 1) * f.size
    assert sum(k * v for k, v in h.items()) == (f.size - 1) * f.size


def test_differential_workers_deterministic(gf):
    F = power_function(gf(9), 7)
    assert differential_spectrum(F, workers=1).histogram == differential_spectrum(F, workers=4).histogram


def test_differential_cap():
    with pytest.raises(CapExceeded):
        differential_spectrum(VecFn(17, 1, np.zeros(1 << 17, dtype=np.int64)))


def test_apn_needs_square_function():
    with pytest.raises(ValueError):
        is_apn(VecFn(3, 2, np.zeros(8, dtype=np.int64)))


def test_derivative_balance(gf):
    f = gf(6)
    B = power_function(f, f.q + 1)
    assert derivative_balance_check(B, f)
    assert not derivative_balance_check(VecFn(6, 6, np.full(64, 1)), f)
    assert not derivative_balance_check(BoolFn(4, np.zeros(16, dtype=np.uint8)))
    x = np.arange(16)
    mm = ((x & 1) & (x >> 2)) ^ ((x >> 1) & (x >> 3) & 1)     # x0 x2 + x1 x3, bent
    assert derivative_balance_check(BoolFn(4, mm.astype(np.uint8)))
    assert not derivative_balance_check(trace_monomial(gf(4), 1, 3))
    with pytest.raises(ValueError):
        derivative_balance_check(power_function(gf(5), 3))


@pytest.mark.parametrize("n", [4, 6])
def test_derivative_solution_set(n, gf):
    f = gf(n)
    x = f.elements()
    B = f.pow_vec(x, f.q + 1)
    for a in range(1, f.size, 3):
        d = B[x ^ a] ^ B
        for c in f.half_field_elements:
            brute = np.sort(x[d == c])
            assert len(brute) == f.q
            assert np.array_equal(derivative_solution_set(f, a, int(c)), brute)


# --- S-box files and reports --------------------------------------------------------------

def test_read_sbox_text_and_binary(tmp_path, gf):
    F = power_function(gf(4), 3)
    txt = tmp_path / "s.txt"
    txt.write_text("\n".join(f"{v:x}" for v in F.table) + "\n")
    G = read_sbox(txt)
    assert (G.n, G.m) == (4, 4) and np.array_equal(G.table, F.table)
    binf = tmp_path / "s.bin"
    binf.write_bytes(F.table.astype("<u4").tobytes())
    assert np.array_equal(read_sbox(binf).table, F.table)


@pytest.mark.parametrize("content", ["1\n2\n3\n", "1\nzz\n", ""])
def test_read_sbox_malformed(tmp_path, content):
    p = tmp_path / "bad.txt"
    p.write_text(content)
    with pytest.raises(MalformedSbox):
        read_sbox(p)


def test_read_sbox_binary_bad_length(tmp_path):
    p = tmp_path / "bad.bin"
    p.write_bytes(b"\x00" * 7)
    with pytest.raises(MalformedSbox):
        read_sbox(p)


def test_sbox_report(gf):
    r = sbox_report(power_function(gf(5), 3), "x^3")
    assert r["is_apn"] and r["differential_uniformity"] == 2
    assert r["is_balanced"]
    assert r["walsh_max_abs"] == 8                  # almost bent: 2^((n+1)/2)
    assert r["nonlinearity"] == 12
    assert set(r) >= {"n", "m", "source", "walsh_max_abs", "nonlinearity", "is_balanced",
                      "is_bent", "differential_uniformity", "is_apn", "histogram"}
    bent = sbox_report(VecFn(4, 1, trace_monomial(gf(4), 1, 3).table.astype(np.int64)))
    assert bent["is_apn"] is None


def test_spectrum_equality_semantics():
    a = WalshSpectrum(np.array([4, 0, 0, 0]))
    assert a == WalshSpectrum(np.array([4, 0, 0, 0]), evaluations=3)
    assert a != WalshSpectrum(np.array([0, 4, 0, 0]))
    assert a.n == 2 and a.max_abs() == 4 and a.parseval_holds()
