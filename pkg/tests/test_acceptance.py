"""Acceptance criteria, one test each.

Every test prints a single ``ACCEPTANCE <n>: PASS|FAIL ...`` line (capture
is bypassed so it shows under plain ``pytest``) and then asserts.
Wall-clock limits are part of the criteria and are checked too.
"""
from __future__ import annotations

import json
import random
import subprocess
import sys
import time
from fractions import Fraction
from functools import lru_cache

import gmpy2
import mpmath
import pytest
from gmpy2 import mpfr

from oracles import mp_zeta
from ohnozeta.index import admissible_indices, depth, dual, weight
from ohnozeta.interp import interp_eval, lemma21_lhs, lemma21_rhs
from ohnozeta.precision import PrecisionContext
from ohnozeta.series import zeta
from ohnozeta.verify import check_harmonic, report_line, run_suite

GRID6 = ["0.5", "0,1", "-0.5,2", "1.5,-1"]
INDICES6 = ["1,2", "2,3", "1,1,3", "2,2"]
GRID4 = [f"{re},{im}" for re in ("-0.5", "0", "0.5", "1") for im in ("0", "1", "3")]

# suite description and flags for the criteria that go through the harness
SUITES = {
    3: ({"checks": [{"kind": "lemma22-exact", "weight_max": 6, "m_max": 4, "N": 200}]}, {}),
    4: ({"checks": [{"kind": "mform-oracle", "weight_max": 5, "depth_max": 3, "s": GRID4, "N": 60}]}, {}),
    5: ({"checks": [{"kind": "ohno-integer", "weight_max": 7, "m_max": 3}]}, {"eps": 1e-12}),
    6: ({"checks": [{"kind": "ohno-interp", "index": INDICES6, "s": GRID6}]}, {"eps": 1e-10}),
}


@pytest.fixture
def announce(capsys):
    def emit(n, ok, detail):
        with capsys.disabled():
            print(f"\nACCEPTANCE {n}: {'PASS' if ok else 'FAIL'}  {detail}")
        assert ok, detail
    return emit


@lru_cache(maxsize=None)
def harness(n):
    suite, flags = SUITES[n]
    start = time.perf_counter()
    reports = run_suite(suite, PrecisionContext(**flags))
    elapsed = time.perf_counter() - start
    return reports, [report_line(r) for r in reports], elapsed


def summary(reports, elapsed):
    failed = sum(not r.passed for r in reports)
    with gmpy2.context(precision=64):
        worst = max((r.residual / r.tolerance for r in reports if r.tolerance > 0), default=mpfr(0))
    return failed, f"{len(reports)} checks, {failed} failed, worst residual/tolerance {float(worst):.2e}, {elapsed:.1f}s"


def test_criterion_1_dual_laws(announce):
    start = time.perf_counter()
    count = bad = 0
    for w in range(2, 13):
        ks = list(admissible_indices(w))
        bad += len(ks) != 2 ** (w - 2) or len(set(ks)) != len(ks)
        for k in ks:
            kd = dual(k)
            count += 1
            bad += dual(kd) != k or weight(kd) != w or depth(k) + depth(kd) != w
    elapsed = time.perf_counter() - start
    announce(1, bad == 0 and elapsed < 1, f"{count} indices, {bad} violations, {elapsed:.2f}s")


def test_criterion_2_partial_fractions(announce):
    rng = random.Random(20240601)
    ctx = PrecisionContext(bits=128)
    start = time.perf_counter()
    worst, bad = 0.0, 0
    for _ in range(500):
        r, m = rng.randint(1, 5), rng.randint(0, 6)
        a = set()
        while len(a) < r:
            a.add(Fraction(rng.randint(-1000, 1000), rng.randint(1, 100)).limit_denominator(100))
            a = {x for x in a if -10 <= x <= 10}
        a = sorted(a)
        lhs, rhs = lemma21_lhs(a, m, ctx), lemma21_rhs(a, m, ctx)
        with gmpy2.context(precision=256):
            tol = mpfr(2) ** -112 * max(abs(lhs), 1)
            res = abs(lhs - rhs)
        bad += res > tol
        worst = max(worst, float(res / tol))
    elapsed = time.perf_counter() - start
    announce(2, bad == 0 and elapsed < 5, f"500 instances, {bad} over budget, worst residual/budget {worst:.2e}, {elapsed:.2f}s")


def test_criterion_3_finite_identity(announce):
    reports, _, elapsed = harness(3)
    failed, text = summary(reports, elapsed)
    announce(3, failed == 0 and all(not r.lhs.heuristic for r in reports) and elapsed < 120, text)


def test_criterion_4_mform_oracle(announce):
    reports, _, elapsed = harness(4)
    failed, text = summary(reports, elapsed)
    announce(4, failed == 0 and len(reports) == 14 * 12 and elapsed < 300, text)


def test_criterion_5_integer_relation(announce):
    reports, _, elapsed = harness(5)
    failed, text = summary(reports, elapsed)
    announce(5, failed == 0 and len(reports) == 63 * 4 and elapsed < 600, text)


def test_criterion_6_interpolated_relation(announce):
    reports, _, elapsed = harness(6)
    failed, text = summary(reports, elapsed)
    announce(6, failed == 0 and len(reports) == 16 and elapsed < 600, text)


def test_criterion_7_closed_forms(announce):
    start = time.perf_counter()
    ev = zeta((2,), PrecisionContext(eps=1e-12))
    with mpmath.workdps(60):
        gap = abs(mpmath.mpf(str(ev.value.real)) - mpmath.pi**2 / 6)
    ok = gap <= 1e-12
    worst = 0.0
    for s in GRID6:
        re, im = (s.split(",") + ["0"])[:2]
        iv = interp_eval((1, 2), s, PrecisionContext(eps=1e-10))
        diff = abs(iv.value - mp_zeta((3 + float(re), float(im))))
        ok &= diff <= iv.error_estimate
        worst = max(worst, float(diff / iv.error_estimate) if iv.error_estimate else float(diff > 0))
    elapsed = time.perf_counter() - start
    announce(7, ok and elapsed < 60,
             f"|zeta(2) - pi^2/6| = {float(gap):.1e}; I_(1,2) vs zeta(3+s) worst residual/estimate {worst:.2e}; {elapsed:.1f}s")


def test_criterion_8_harmonic(announce):
    start = time.perf_counter()
    parts = []
    ok = True
    for s1, s2 in [("2", "2"), ("1.5,2", "2.5,-1"), ("3.1", "2.2,0.7")]:
        rep = check_harmonic(s1, s2)
        ok &= rep.passed
        parts.append(f"{float(rep.residual):.1e}<={float(rep.tolerance):.1e}")
    elapsed = time.perf_counter() - start
    announce(8, ok and elapsed < 60, f"residual vs estimate: {', '.join(parts)}; {elapsed:.1f}s")


def test_criterion_9_determinism(announce, tmp_path):
    # second run happens in a fresh interpreter through the CLI, so no cache is shared
    mismatched = []
    for n, (suite, flags) in SUITES.items():
        _, lines, _ = harness(n)
        path = tmp_path / f"suite{n}.json"
        path.write_text(json.dumps(suite))
        cmd = [sys.executable, "-m", "ohnozeta", "verify", "--suite", str(path)]
        if "eps" in flags:
            cmd += ["--eps", repr(flags["eps"])]
        proc = subprocess.run(cmd, capture_output=True, text=True)
        if proc.returncode != 0 or proc.stdout != "".join(line + "\n" for line in lines):
            mismatched.append(n)
    announce(9, not mismatched, f"criteria 3-6 re-run in a fresh process: "
             f"{'byte-identical' if not mismatched else 'differences in ' + str(mismatched)}")
