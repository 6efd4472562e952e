import itertools
from fractions import Fraction

import gmpy2
import mpmath
import pytest
from gmpy2 import mpc, mpfr
from hypothesis import given, settings, strategies as st

from oracles import exact_truncated, mp_zeta, naive_truncated, rounded
from ohnozeta.errors import ConvergenceError, DomainError, InvalidInputError, OutsideDomainError
from ohnozeta.index import admissible_up_to, depth
from ohnozeta.precision import Evaluation, PrecisionContext
from ohnozeta.series import harmonic_residual, mzf, mzf_complex, zeta, zeta_truncated

CTX = PrecisionContext()


def test_small_truncations():
    assert zeta_truncated((2,), 3) == rounded(Fraction(49, 36))
    assert zeta_truncated((1, 2), 2) == mpc("0.25")


def test_depth_exceeds_cutoff():
    with pytest.raises(InvalidInputError):
        zeta_truncated((1, 1, 2), 2)


def test_divergent_index_rejected():
    with pytest.raises(DomainError, match="not admissible"):
        zeta_truncated((2, 1), 10)


def test_matches_double_loop():
    assert zeta_truncated((2, 3), 50) == rounded(naive_truncated((2, 3), 50))


@pytest.mark.parametrize("k", list(admissible_up_to(6)), ids=str)
def test_dp_is_correctly_rounded(k):
    # exact rational reference, then one rounding: the DP must land on the same bits
    for N in sorted({depth(k), 7, 60}):
        assert zeta_truncated(k, N) == rounded(exact_truncated(k, N)), (k, N)


@pytest.mark.parametrize("k", list(admissible_up_to(6)), ids=str)
def test_reference_dp_matches_nested_loops(k):
    # keep the enumeration under ~35k tuples
    N = {1: 60, 2: 60, 3: 60, 4: 30, 5: 20}[len(k)]
    assert exact_truncated(k, N) == naive_truncated(k, N)


@given(st.sampled_from(list(admissible_up_to(6))), st.integers(1, 80))
@settings(max_examples=60, deadline=None)
def test_monotone_in_cutoff(k, N):
    N = max(N, len(k))
    assert zeta_truncated(k, N + 1).real >= zeta_truncated(k, N).real


@pytest.mark.parametrize("k", [(2,), (1, 2), (2, 3), (1, 1, 3)])
def test_precision_scaling(k):
    lo = zeta_truncated(k, 200, PrecisionContext(bits=128))
    hi = zeta_truncated(k, 200, PrecisionContext(bits=256))
    with gmpy2.context(precision=300):
        assert abs(mpc(hi) - mpc(lo)) < mpfr(2) ** -(128 - 8) * abs(mpc(hi))


def test_complex_reduces_to_integer_case():
    assert mzf_complex(["2"], 3) == rounded(Fraction(49, 36))


def test_complex_matches_double_loop():
    s1, s2, N = mpc("1.5+1j"), mpc("2.5-1j"), 12
    with gmpy2.context(precision=256):
        ref = mpc(0)
        for n1, n2 in itertools.combinations(range(1, N + 1), 2):
            ref += gmpy2.exp(-s1 * gmpy2.log(n1)) * gmpy2.exp(-s2 * gmpy2.log(n2))
        got = mzf_complex(["1.5,1", "2.5,-1"], N)
        assert abs(got - ref) <= mpfr(2) ** -112 * abs(ref)


def test_domain_violation_names_position():
    with pytest.raises(OutsideDomainError) as info:
        mzf_complex(["0.5", "1.0"], 10)
    assert info.value.position == 1
    with pytest.raises(OutsideDomainError) as info:
        mzf_complex(["3", "1.02"], 10)
    assert info.value.position == 2


@given(st.lists(st.floats(-2, 4, allow_nan=False), min_size=1, max_size=3))
@settings(max_examples=60, deadline=None)
def test_accepted_inputs_satisfy_every_condition(res):
    s = [repr(x) for x in res]
    try:
        mzf_complex(s, 5)
    except OutsideDomainError:
        return
    r = len(res)
    for l in range(1, r + 1):
        assert sum(res[l - 1:]) > r - l + 1 + 0.05


def test_zeta2_against_pi():
    ev = zeta((2,), PrecisionContext(eps=1e-10))
    with mpmath.workdps(60):
        ref = mpmath.pi**2 / 6
        assert abs(mpmath.mpf(str(ev.value.real)) - ref) <= mpmath.mpf(str(ev.error_estimate))
    assert ev.error_estimate <= 1e-10
    assert ev.heuristic


def test_euler_identity_within_estimates():
    a, b = zeta((1, 2)), zeta((3,))
    assert abs(a.value - b.value) <= a.error_estimate + b.error_estimate


def test_zeta22_from_harmonic_relation():
    z22, z2, z4 = zeta((2, 2)), zeta((2,)), zeta((4,))
    with gmpy2.context(precision=128):
        rhs = (z2.value**2 - z4.value) / 2
        tol = z22.error_estimate + 2 * abs(z2.value) * z2.error_estimate + z4.error_estimate
        assert abs(z22.value - rhs) <= tol


@pytest.mark.parametrize("k, eps", [((3,), 1e-20), ((5,), 1e-20), ((1, 1, 1, 2), 1e-18), ((1, 1, 1, 1, 1, 2), 1e-15)])
def test_against_mpmath(k, eps):
    # every index here is dual to a single zeta value
    ev = zeta(k, PrecisionContext(eps=eps))
    assert abs(ev.value - mp_zeta(sum(k))) < eps


def test_complex_mzf_against_mpmath():
    ev = mzf(["2.5,3"], PrecisionContext(eps=1e-20))
    assert abs(ev.value - mp_zeta((2.5, 3))) < 1e-20


def test_evaluation_invariants():
    ev = zeta((1, 1, 3))
    assert isinstance(ev, Evaluation)
    assert ev.error_estimate >= 0 and ev.terms_used >= 1 and ev.cancellation_ratio >= 1


def test_fixed_terms_mode():
    ev = zeta((2, 3), PrecisionContext(terms=512))
    assert ev.terms_used == 512


def test_cap_raises_with_best_estimate():
    with pytest.raises(ConvergenceError) as info:
        zeta((2,), PrecisionContext(eps=1e-60, max_terms=512))
    assert info.value.best is not None
    assert info.value.best.terms_used <= 512


def test_context_validation():
    with pytest.raises(ValueError):
        PrecisionContext(bits=32)
    with pytest.raises(ValueError):
        PrecisionContext(terms=100, eps=1e-10)


@pytest.mark.parametrize("s1, s2", [("2", "2"), ("1.5,2", "2.5,-1"), ("3.1", "2.2,0.7")])
def test_harmonic_residual_within_estimate(s1, s2):
    h = harmonic_residual(s1, s2)
    assert h.residual <= h.error_estimate


def test_harmonic_residual_swap_symmetric():
    a = harmonic_residual("1.5,2", "2.5,-1")
    b = harmonic_residual("2.5,-1", "1.5,2")
    assert a.residual == b.residual and a.error_estimate == b.error_estimate


def test_harmonic_domain():
    with pytest.raises(OutsideDomainError):
        harmonic_residual("1.02", "3")
