import sys
import os
import math
import numpy as np
import pytest

# Add app to path
sys.path.append(os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

from app.analytics.approx import (
    approx_g_periodic,
    approx_p_es,
    approx_p_periodic,
    approx_summary,
    agreement_fraction,
    asymptotic_balanced_w,
    basis_state_is_global,
    closed_form_p,
    decompose_recursive,
    expand_reduction,
    factor_out_constant_qubits,
    g_simple_branch,
    hamming_shells,
    is_local_max_basis,
    recompose,
    reduce_even_period,
    w_limit,
)
from app.analytics.groverian import OptimizerConfig, p_max
from app.analytics.states import EsSpec, PeriodicSpec, es_state, periodic_state, w_spec
from app.core.errors import SpecError


def test_es_approximation_branches():
    assert approx_p_es(4, 4) == pytest.approx(1 / 4)   # s = sqrt(Q): basis branch
    assert approx_p_es(4, 5) == pytest.approx(5 / 16)
    assert approx_p_es(4, 1) == 1.0
    with pytest.raises(SpecError):
        approx_p_es(4, 17)


@pytest.mark.parametrize("q,r,l,A,p,branch", [
    (8, 3, 0, 86, 86 / 256, "ascending"),
    (8, 17, 0, 16, 1 / 16, "descending"),   # A = sqrt(Q) belongs to the basis-state branch
    (8, 15, 0, 18, 18 / 256, "ascending"),
    (7, 9, 4, 14, 14 / 128, "ascending"),
    (7, 13, 0, 10, 1 / 10, "descending"),
    (8, 13, 3, 20, 20 / 256, "ascending"),
])
def test_periodic_approximation(q, r, l, A, p, branch):
    spec = PeriodicSpec(q=q, r=r, l=l)
    value, tag = approx_p_periodic(spec)
    assert spec.A == A
    assert value == pytest.approx(p)
    assert tag.branch == branch
    assert tag.boundary == pytest.approx(math.sqrt(2 ** q))


def test_simple_g_branches():
    assert approx_g_periodic(8, 15) == pytest.approx(math.log(15))
    assert approx_g_periodic(8, 16) == pytest.approx(math.log(256 / 16))
    assert approx_g_periodic(8, 101) == pytest.approx(math.log(256 / 101))
    assert g_simple_branch(8, 15).ascending
    assert not g_simple_branch(8, 16).ascending
    with pytest.raises(SpecError):
        approx_g_periodic(8, 0)


def test_odd_qubit_count_boundary_is_exact():
    # Q = 128, sqrt(Q) ~ 11.31: r = 11 ascending, r = 13 descending
    assert g_simple_branch(7, 11).ascending
    assert not g_simple_branch(7, 13).ascending


def test_summary_fields():
    summary = approx_summary(PeriodicSpec(q=10, r=37, l=13))
    assert set(summary) == {"p_accurate", "p_simple", "g_accurate", "g_simple", "branch", "A"}
    assert summary["A"] == 28
    assert summary["g_accurate"] == pytest.approx(-math.log(summary["p_accurate"]))
    assert summary["p_simple"] == pytest.approx(math.exp(-summary["g_simple"]))


def test_closed_forms():
    assert closed_form_p("ghz", 5) == 0.5
    assert closed_form_p("W", 10) == pytest.approx(0.38742, abs=1e-5)
    assert closed_form_p("balanced-w", 2) == pytest.approx(6 / 16)
    assert closed_form_p("balanced_w", 50) == pytest.approx(asymptotic_balanced_w(50), rel=0.01)
    assert closed_form_p("w", 2000) == pytest.approx(w_limit(), abs=1e-3)
    with pytest.raises(SpecError):
        closed_form_p("ghz", 1)
    with pytest.raises(SpecError):
        closed_form_p("cluster", 4)


def test_even_period_reduction_rebuilds_state_exactly():
    for q in range(2, 11):
        Q = 2 ** q
        for r in range(2, Q + 1, 2):
            for l in {0, 1, r // 2, r - 1}:
                spec = PeriodicSpec(q=q, r=r, l=l)
                reduction = reduce_even_period(spec)
                assert reduction.changed
                assert reduction.reduced == PeriodicSpec(q=q - 1, r=r // 2, l=l // 2)
                assert reduction.bits == [l % 2]
                assert np.array_equal(expand_reduction(reduction).amplitudes, periodic_state(spec).amplitudes)


def test_full_reduction_and_odd_period_noop():
    reduction = reduce_even_period(PeriodicSpec(q=6, r=12, l=5), full=True)
    assert reduction.reduced == PeriodicSpec(q=4, r=3, l=1)
    assert reduction.bits == [1, 0]
    assert np.array_equal(expand_reduction(reduction).amplitudes, periodic_state(PeriodicSpec(6, 12, 5)).amplitudes)

    odd = reduce_even_period(PeriodicSpec(q=5, r=7, l=2))
    assert not odd.changed
    assert odd.reduced == odd.original


def test_recursive_decomposition_rebuilds_state():
    for q in range(2, 9):
        Q = 2 ** q
        for r in range(1, Q + 1, 2):
            for l in {0, r // 2, r - 1}:
                spec = PeriodicSpec(q=q, r=r, l=l)
                dec = decompose_recursive(spec)
                assert dec.a0 + dec.a1 == spec.A
                assert np.allclose(recompose(dec).amplitudes, periodic_state(spec).amplitudes, atol=1e-12)
                if l == 0:
                    assert dec.parity_rule_holds
                    assert dec.formula_matches or dec.degenerate


def test_decomposition_reports_empty_high_half():
    dec = decompose_recursive(PeriodicSpec(q=4, r=11, l=0))
    # indices 0 and 11: both halves populated
    assert (dec.a0, dec.a1) == (1, 1)
    dec = decompose_recursive(PeriodicSpec(q=4, r=9, l=8))
    assert dec.a0 == 0
    assert dec.degenerate


def test_decomposition_of_shifted_period():
    dec = decompose_recursive(PeriodicSpec(q=8, r=13, l=3))
    assert (dec.a0, dec.a1) == (10, 10)
    assert dec.high_indices[0] == 133 - 128
    assert dec.l_prime_actual == 5
    # -128 mod 13 = 2: the closed form misses the shift when l != 0
    assert dec.l_prime_formula == 2
    assert not dec.formula_matches


def test_simple_formula_steps_away_on_descending_branch():
    # ceil((Q - l)/r) jumps to 2 just below r = Q - l; Q/r stays near 1
    q, l = 10, 13
    deviations = {}
    for r in range(l + 1, 2 ** q + 1, 2):
        summary = approx_summary(PeriodicSpec(q=q, r=r, l=l))
        if summary["branch"] == "descending":
            deviations[r] = abs(summary["g_simple"] - summary["g_accurate"])
    assert deviations[1009] == pytest.approx(math.log(2) - math.log(1024 / 1009))
    assert max(deviations.values()) > 0.5
    assert deviations[1011] < 0.02


def test_hamming_shells_sum_to_set_size():
    spec = w_spec(4)
    shells = hamming_shells(spec, 0)
    assert shells.tolist() == [0, 4, 0, 0, 0]
    shells = hamming_shells(spec, 1)
    assert shells.tolist() == [1, 0, 3, 0, 0]
    assert shells.sum() == spec.size
    with pytest.raises(SpecError):
        hamming_shells(spec, 16)


def test_agreement_fraction():
    spec = EsSpec.of(3, [0b000, 0b011, 0b101])
    assert agreement_fraction(spec, 0b000, [1]) == pytest.approx(2 / 3)
    assert agreement_fraction(spec, 0b000, [1, 2]) == pytest.approx(1 / 3)


def test_local_max_basis():
    assert is_local_max_basis(w_spec(4), 1)
    assert not is_local_max_basis(EsSpec.of(3, [0, 1]), 0)
    assert not is_local_max_basis(w_spec(4), 0)


def test_factoring_out_constant_qubits_preserves_p_max():
    spec = EsSpec.of(4, [0b1001, 0b1011, 0b1110])
    reduced, detached = factor_out_constant_qubits(spec)
    assert detached == {1: 1}
    assert reduced == EsSpec.of(3, [0b001, 0b011, 0b110])
    config = OptimizerConfig(seed=1)
    assert p_max(es_state(spec), config).p_max == pytest.approx(p_max(es_state(reduced), config).p_max, abs=1e-8)

    reduced, detached = factor_out_constant_qubits(EsSpec.of(2, [2]))
    assert reduced is None
    assert detached == {1: 1, 2: 0}


def test_basis_optimality_report():
    report = basis_state_is_global(PeriodicSpec(q=6, r=21, l=0).to_es())
    assert report.p_basis == pytest.approx(1 / 4)
    assert report.local_max
    assert report.p_numeric >= report.p_basis - 1e-12

    report = basis_state_is_global(w_spec(6))
    assert report.local_max
    assert not report.basis_is_global


def test_accurate_formula_is_a_lower_bound_for_numeric_p():
    for r in range(1, 65, 2):
        spec = PeriodicSpec(q=6, r=r, l=0)
        p_approx, _ = approx_p_periodic(spec)
        assert p_max(periodic_state(spec)).p_max >= p_approx - 1e-9


if __name__ == "__main__":
    try:
        test_closed_forms()
        test_full_reduction_and_odd_period_noop()
        test_hamming_shells_sum_to_set_size()
        print("\n✅ All tests passed!")
    except AssertionError as e:
        print(f"\n❌ Test failed: {e}")
    except Exception as e:
        print(f"\n❌ An error occurred: {e}")
