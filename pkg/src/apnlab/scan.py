"""Bent scan over monomial traces Tr(x^i) and Walsh strategy benchmarks."""

from __future__ import annotations

import csv
import io
import time
from dataclasses import asdict, dataclass

import numpy as np

from apnlab.field_core import FieldSpec
from apnlab.limits import check_exhaustive
from apnlab.spectrum import (
    CHUNK_ELEMS,
    Sign,
    class_evaluation_count,
    sign_biconditionals_hold,
    trace_monomial,
    walsh_fast,
    walsh_fast_batch,
    walsh_monomial_by_classes,
    walsh_naive,
)

SCAN_MAX_K = 14
METHODS = ("naive", "fast", "classes")


@dataclass(frozen=True)
class ScanRecord:
    k: int
    i: int
    a: int
    bent: bool
    chi_zero_sign: str | None
    sign_ok: bool | None
    runtime_ms: float
    method: str


@dataclass
class ScanReport:
    records: list[ScanRecord]
    scanned: dict[int, int]          # k -> number of exponents examined
    skipped_odd: list[int]

    def bent_exponents(self, k: int) -> list[int]:
        return sorted(r.i for r in self.records if r.k == k and r.bent)

    def to_json(self) -> dict:
        return {
            "records": [asdict(r) for r in self.records],
            "scanned": {str(k): v for k, v in self.scanned.items()},
            "skipped_odd": self.skipped_odd,
        }


def cyclotomic_leaders(k: int) -> dict[int, list[int]]:
    """Exponents 1..2^k-2 grouped by the doubling orbit; Tr(x^(2i)) = Tr(x^i)."""
    mod = (1 << k) - 1
    seen = np.zeros(mod, dtype=bool)
    out = {}
    for i in range(1, mod):
        if seen[i]:
            continue
        orbit, e = [], i
        while not seen[e]:
            seen[e] = True
            orbit.append(e)
            e = (2 * e) % mod
        out[i] = sorted(orbit)
    return out


def _bent_flags_fast(field: FieldSpec, exps: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    trace = field.trace_table
    x = field.elements()
    flags = np.empty(len(exps), dtype=bool)
    w0 = np.empty(len(exps), dtype=np.int64)
    step = max(1, CHUNK_ELEMS // field.size)
    for start in range(0, len(exps), step):
        e = exps[start:start + step]
        signs = 1 - 2 * trace[_pow_rows(field, x, e)].astype(np.int64)
        w = walsh_fast_batch(signs, field)
        flags[start:start + step] = np.all(np.abs(w) == field.q, axis=1)
        w0[start:start + step] = w[:, 0]
    return flags, w0


def _pow_rows(field: FieldSpec, x: np.ndarray, exps: np.ndarray) -> np.ndarray:
    """x^e for each e in exps, one row per exponent, via discrete logs."""
    logs = field.log_table[x[1:]]
    out = np.zeros((len(exps), field.size), dtype=np.int64)
    out[:, 1:] = field.exp_table[(logs[None, :] * exps[:, None]) % field.order]
    return out


def bent_scan(k_min: int, k_max: int, *, method: str = "fast", dedup: bool = True,
              override_caps: bool = False) -> ScanReport:
    """Find every exponent i with Tr(x^i) bent on GF(2^k), for even k in the range.

    Odd k are skipped: bent functions need an even number of variables.
    """
    if method not in METHODS:
        raise ValueError(f"method must be one of {METHODS}")
    records, scanned, skipped = [], {}, []
    for k in range(k_min, k_max + 1):
        if k % 2:
            skipped.append(k)
            continue
        check_exhaustive(k, override_caps, cap=SCAN_MAX_K)
        field = FieldSpec(k)
        groups = cyclotomic_leaders(k) if dedup else {i: [i] for i in range(1, field.order)}
        leaders = np.array(sorted(groups), dtype=np.int64)
        scanned[k] = field.order - 1
        t0 = time.perf_counter()
        if method == "fast":
            flags, w0 = _bent_flags_fast(field, leaders)
        else:
            flags = np.empty(len(leaders), dtype=bool)
            w0 = np.empty(len(leaders), dtype=np.int64)
            for idx, i in enumerate(leaders):
                if method == "classes":
                    w = walsh_monomial_by_classes(field, 1, int(i)).values
                else:
                    w = walsh_naive(trace_monomial(field, 1, int(i)), field).values
                flags[idx] = np.all(np.abs(w) == field.q)
                w0[idx] = w[0]
        per_ms = (time.perf_counter() - t0) * 1000 / max(1, len(leaders))
        for lead, bent, chi0 in zip(leaders, flags, w0):
            if not bent:
                continue
            sign = Sign.PLUS if chi0 > 0 else Sign.MINUS
            ok = sign_biconditionals_hold(k, int(lead), sign)
            for i in groups[int(lead)]:
                records.append(ScanRecord(k, i, 1, True, sign.value, ok, round(per_ms, 3), method))
    records.sort(key=lambda r: (r.k, r.i))
    return ScanReport(records, scanned, skipped)


# --- benchmarks ------------------------------------------------------------------

@dataclass(frozen=True)
class BenchRow:
    n: int
    i: int
    method: str
    evaluations: int
    seconds: float
    equal: bool


def bench_walsh(n: int, exponents: list[int], *, repeat: int = 3, a: int = 1,
                methods: tuple[str, ...] = METHODS) -> list[BenchRow]:
    """Time each Walsh strategy on Tr(a x^i); every method must agree with the fast one."""
    field = FieldSpec(n)
    rows = []
    for i in exponents:
        f = trace_monomial(field, a, i)
        ref = walsh_fast(f, field).values
        for m in methods:
            if m == "naive" and n > 14:
                continue
            best, result = float("inf"), None
            for _ in range(repeat):
                t0 = time.perf_counter()
                if m == "naive":
                    result = walsh_naive(f, field).values
                elif m == "fast":
                    result = walsh_fast(f, field).values
                else:
                    result = walsh_monomial_by_classes(field, a, i).values
                best = min(best, time.perf_counter() - t0)
            evals = class_evaluation_count(field, i) if m == "classes" else field.size
            rows.append(BenchRow(n, i, m, evals, best, bool(np.array_equal(result, ref))))
    return rows


def bench_csv(rows: list[BenchRow]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["n", "i", "method", "evaluations", "seconds", "equal"])
    for r in rows:
        w.writerow([r.n, r.i, r.method, r.evaluations, f"{r.seconds:.6f}", int(r.equal)])
    return buf.getvalue()
