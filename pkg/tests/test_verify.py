import json

import gmpy2
import pytest
from gmpy2 import mpfr

from oracles import mp_zeta
from ohnozeta.errors import ConfigError, DomainError
from ohnozeta.index import dual
from ohnozeta.precision import PrecisionContext
from ohnozeta.series import zeta
from ohnozeta.verify import (
    all_passed,
    check_harmonic,
    check_lemma21,
    check_lemma22_exact,
    check_mform,
    check_ohno_integer,
    check_ohno_interp,
    load_suite,
    ohno_sum,
    parse_grid,
    parse_range,
    report_line,
    run_suite,
)

TWELVE = [f"{re},{im}" for re in ("-0.5", "0", "0.5", "1") for im in ("0", "1", "3")]


def test_ohno_sum_single_composition():
    assert ohno_sum((2,), 0).value == zeta((2,)).value
    assert ohno_sum((2,), 2).value == zeta((4,)).value


def test_ohno_sum_m1_is_zeta4():
    ev = ohno_sum((1, 2), 1)
    assert abs(ev.value - mp_zeta(4)) <= ev.error_estimate


def test_ohno_sum_rejects_divergent():
    with pytest.raises(DomainError):
        ohno_sum((1, 1), 1)


@pytest.mark.parametrize("m", [0, 1, 4])
def test_self_dual_residual_zero(m):
    rep = check_ohno_integer((2,), m)
    assert rep.residual == 0 and rep.passed


@pytest.mark.parametrize("k, m", [((1, 2), 0), ((1, 1, 3), 2), ((2, 3), 1), ((1, 2, 2), 3)])
def test_ohno_integer_passes(k, m):
    rep = check_ohno_integer(k, m)
    assert rep.passed, rep.to_dict()
    assert rep.inputs["dual"] == ",".join(map(str, dual(k)))


def test_ohno_integer_dual_symmetry():
    a, b = check_ohno_integer((1, 1, 3), 2), check_ohno_integer((1, 4), 2)
    with gmpy2.context(precision=128):
        assert abs(a.residual - b.residual) <= mpfr(2) ** -112


def test_ohno_interp_examples():
    assert check_ohno_interp((2,), "0.3,1").residual == 0
    rep = check_ohno_interp((1, 2), "0.5", PrecisionContext(eps=1e-10))
    assert rep.passed
    assert abs(rep.lhs.value - mp_zeta(3.5)) <= rep.tolerance
    assert check_ohno_interp((2, 3), "-0.5,2", PrecisionContext(eps=1e-10)).passed


@pytest.mark.parametrize("k, m, N", [((2,), 3, 100), ((1, 2), 2, 200), ((1, 1, 2), 1, 80)])
def test_lemma22_examples(k, m, N):
    rep = check_lemma22_exact(k, m, N)
    assert rep.passed
    assert rep.lhs.error_estimate == 0 and not rep.lhs.heuristic
    with gmpy2.context(precision=128):
        assert rep.tolerance == mpfr(2) ** -112 * max(abs(rep.lhs.value), 1)


def test_lemma22_single_part_exact():
    assert check_lemma22_exact((2,), 3, 100).residual == 0


def test_mform_and_lemma21_reports():
    assert check_mform((1, 2), "0.5", 60).passed
    assert check_lemma21(["2", "3"], 1).passed


def test_harmonic_report():
    rep = check_harmonic("2", "2")
    assert rep.passed and rep.kind == "harmonic"


def test_verdict_matches_comparison():
    rep = check_ohno_integer((1, 3), 1)
    assert rep.passed == (rep.residual <= rep.tolerance)
    assert rep.to_dict()["verdict"] == rep.verdict


def test_exhaustive_small_suite():
    reports = run_suite({"checks": [{"kind": "ohno-integer", "weight_max": 5, "m_max": 2}]})
    assert len(reports) == 15 * 3 and all_passed(reports)


def test_empty_suite():
    assert run_suite({"checks": []}) == []
    assert all_passed([])


def test_twelve_point_grid():
    reports = run_suite({"checks": [{"kind": "ohno-interp", "index": "1,2", "s": TWELVE}]},
                        PrecisionContext(eps=1e-10))
    assert len(reports) == 12 and all_passed(reports)
    assert [r.inputs["s"] for r in reports] == [dict(zip(("re", "im"), s.split(","))) for s in TWELVE]


def test_report_determinism_and_worker_order():
    suite = {"checks": [{"kind": "ohno-integer", "index": ["1,2", "2,3", "1,1,2"], "m": [0, 2]},
                        {"kind": "lemma22-exact", "index": "1,2", "m_max": 2, "N": 50}]}
    once = [report_line(r) for r in run_suite(suite)]
    again = [report_line(r) for r in run_suite(suite)]
    pooled = [report_line(r) for r in run_suite(suite, workers=2)]
    assert once == again == pooled


@pytest.mark.parametrize("suite", [
    [], {"checks": "x"}, {"checks": [{"kind": "nope"}]}, {"checks": [{"kind": "ohno-integer", "m": 1}]},
    {"checks": [{"kind": "ohno-integer", "index": "1,2", "m": -1}]},
    {"checks": [{"kind": "ohno-interp", "index": "1,2", "s_grid": "re=0:1"}]},
])
def test_malformed_suites(suite):
    with pytest.raises(ConfigError):
        run_suite(suite)


def test_load_suite(tmp_path):
    p = tmp_path / "s.json"
    p.write_text("{not json")
    with pytest.raises(ConfigError):
        load_suite(p)
    p.write_text(json.dumps({"checks": []}))
    assert load_suite(p) == {"checks": []}


def test_grid_parsing():
    assert parse_range("-0.5:1:0.5") == ["-0.5", "0.0", "0.5", "1.0"]
    grid = parse_grid("re=-0.5:1:0.5,im=0:3:1")
    assert len(grid) == 16 and grid[0].startswith("-0.5,") and grid[1].startswith("-0.5,")
    assert parse_grid("") == []
    with pytest.raises(ConfigError):
        parse_grid("re=0:1:0")
