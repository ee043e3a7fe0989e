import sys
import os
from fractions import Fraction
import numpy as np
import pytest

# Add app to path
sys.path.append(os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

from app.analytics.qft import qft
from app.analytics.states import PeriodicSpec, ghz, periodic_state
from app.core.errors import FactoringError
from app.services.shorprep import (
    confirm_period,
    continued_fraction,
    convergents,
    default_register_width,
    extract_period,
    is_prime,
    measure_auxiliary,
    measure_register,
    modexp_superposition,
    order,
    prime_power_base,
    shor_demo,
)


@pytest.mark.parametrize("y,N,r", [(7, 15, 4), (2, 15, 4), (2, 21, 6), (4, 21, 3), (1, 15, 1), (14, 15, 2)])
def test_order(y, N, r):
    assert order(y, N) == r


def test_order_rejects_shared_factor():
    with pytest.raises(FactoringError):
        order(6, 15)


def test_modexp_table_partitions_register():
    table = modexp_superposition(15, 7, 8)
    assert table.r == 4
    assert sorted(table.classes) == [1, 4, 7, 13]
    assert sum(len(v) for v in table.classes.values()) == 256
    assert table.classes[7].tolist()[:3] == [1, 5, 9]
    assert table.shift_of(13) == 3
    with pytest.raises(FactoringError):
        modexp_superposition(15, 7, 3)


def test_measure_auxiliary_returns_periodic_spec():
    table = modexp_superposition(21, 2, 9)
    rng = np.random.default_rng(0)
    seen = set()
    for _ in range(60):
        z, spec = measure_auxiliary(table, rng)
        assert spec == PeriodicSpec(q=9, r=6, l=spec.l)
        assert pow(2, spec.l, 21) == z
        seen.add(spec.l)
    assert seen == set(range(6))


def test_measure_register_follows_probabilities():
    psi = periodic_state(PeriodicSpec(q=4, r=4, l=1))
    rng = np.random.default_rng(1)
    samples = {measure_register(psi, rng) for _ in range(50)}
    assert samples <= {1, 5, 9, 13}


def test_auxiliary_shift_is_uniform_over_the_period():
    table = modexp_superposition(15, 2, 8)
    rng = np.random.default_rng(7)
    draws = 10_000
    counts = np.bincount([measure_auxiliary(table, rng)[1].l for _ in range(draws)], minlength=4)
    assert counts.size == 4
    sigma = np.sqrt(draws * 0.25 * 0.75)
    assert np.all(np.abs(counts - draws / 4) <= 3 * sigma)


def test_register_samples_match_ghz_weights():
    psi = ghz(3)
    rng = np.random.default_rng(11)
    draws = 10_000
    samples = np.array([measure_register(psi, rng) for _ in range(draws)])
    assert set(samples.tolist()) <= {0, 7}
    assert abs(np.mean(samples == 0) - 0.5) <= 3 * np.sqrt(0.25 / draws)


def test_register_samples_concentrate_near_multiples_of_q_over_r():
    spec = PeriodicSpec(q=8, r=13, l=3)
    transformed = qft(periodic_state(spec))
    rng = np.random.default_rng(13)
    samples = np.array([measure_register(transformed, rng) for _ in range(10_000)])
    centres = {round(n * 256 / 13) % 256 for n in range(14)}
    near = {(c + d) % 256 for c in centres for d in (-1, 0, 1)}
    assert np.mean([int(j) in near for j in samples]) >= 0.9


def test_continued_fraction_and_convergents():
    assert continued_fraction(171, 512) == [0, 2, 1, 170]
    assert convergents([0, 2, 1, 170])[:3] == [Fraction(0), Fraction(1, 2), Fraction(1, 3)]
    assert convergents(continued_fraction(171, 512))[-1] == Fraction(171, 512)


def test_extract_period():
    # 171/512 ~ 1/3: order 6 of 2 mod 21 gives j near 512 * s / 6
    assert extract_period(171, 512, 21) == 3
    assert extract_period(256, 512, 21) == 2
    assert extract_period(0, 512, 21) is None
    with pytest.raises(FactoringError):
        extract_period(512, 512, 21)


def test_confirm_period_lifts_divisors():
    assert confirm_period(2, 3, 21) == 6
    assert confirm_period(2, 6, 21) == 6
    assert confirm_period(2, 5, 21) is None


def test_number_theory_helpers():
    assert [n for n in range(20) if is_prime(n)] == [2, 3, 5, 7, 11, 13, 17, 19]
    assert prime_power_base(27) == 3
    assert prime_power_base(49) == 7
    assert prime_power_base(15) is None
    assert default_register_width(15) == 8
    assert default_register_width(21) == 9


def test_classical_shortcuts():
    report = shor_demo(22, np.random.default_rng(0))
    assert report.success and report.factor == 2
    report = shor_demo(25, np.random.default_rng(0))
    assert report.success and report.factor == 5
    for bad in (3, 13):
        with pytest.raises(FactoringError):
            shor_demo(bad, np.random.default_rng(0))


@pytest.mark.parametrize("N", [15, 21])
def test_shor_finds_factor(N):
    successes = 0
    for seed in range(20):
        report = shor_demo(N, np.random.default_rng(seed), attempts=10)
        if report.success:
            assert N % report.factor == 0 and 1 < report.factor < N
            successes += 1
        assert len(report.attempts) <= 10
    assert successes >= 18


@pytest.mark.slow
@pytest.mark.parametrize("N", [15, 21])
def test_shor_success_rate_over_many_seeds(N):
    successes = sum(shor_demo(N, np.random.default_rng(seed)).success for seed in range(100))
    print(f"\nN={N}: {successes}/100")
    assert successes >= 90


def test_attempt_records_are_consistent():
    report = shor_demo(21, np.random.default_rng(3), attempts=10)
    for attempt in report.attempts:
        if attempt.j is not None:
            assert attempt.r_true == order(attempt.y, 21)
            assert 0 <= attempt.l < attempt.r_true
            assert 0 <= attempt.j < 2 ** report.q


if __name__ == "__main__":
    try:
        test_order(7, 15, 4)
        test_continued_fraction_and_convergents()
        test_shor_finds_factor(15)
        print("\n✅ All tests passed!")
    except AssertionError as e:
        print(f"\n❌ Test failed: {e}")
    except Exception as e:
        print(f"\n❌ An error occurred: {e}")
