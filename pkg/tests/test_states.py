import sys
import os
import math
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

# Add app to path
sys.path.append(os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

from app.analytics.states import (
    EsSpec,
    PeriodicSpec,
    balanced_w,
    balanced_w_spec,
    basis_state,
    build_state,
    complete_es,
    constant_qubits,
    es_state,
    ghz,
    is_reducible,
    parse_index_set,
    periodic_state,
    phase_gates,
    phased_es,
    random_state,
    w,
)
from app.analytics.qft import qft
from app.core.errors import SpecError
from app.core.statevec import StateVector, apply_local_unitary


@pytest.mark.parametrize("q,r,l,expected", [
    (3, 3, 0, [0, 3, 6]),
    (3, 3, 2, [2, 5]),
    (4, 5, 1, [1, 6, 11]),
    (2, 4, 3, [3]),
    (3, 1, 0, list(range(8))),
])
def test_periodic_indices(q, r, l, expected):
    spec = PeriodicSpec(q=q, r=r, l=l)
    assert spec.indices.tolist() == expected
    assert spec.A == len(expected)
    psi = periodic_state(spec)
    assert np.allclose(np.abs(psi.amplitudes[expected]), 1 / math.sqrt(len(expected)))
    assert psi.norm() == pytest.approx(1.0)


@pytest.mark.parametrize("q,r,l", [(0, 1, 0), (3, 0, 0), (3, 9, 0), (3, 3, 3), (3, 3, -1)])
def test_periodic_spec_rejects_invalid(q, r, l):
    with pytest.raises(SpecError):
        PeriodicSpec(q=q, r=r, l=l)


def test_es_spec_validation():
    with pytest.raises(SpecError):
        EsSpec.of(2, [])
    with pytest.raises(SpecError):
        EsSpec.of(2, [4])
    spec = EsSpec.of(3, [5, 1, 5])
    assert spec.size == 2
    assert spec.indices.tolist() == [1, 5]


def test_named_families():
    assert np.flatnonzero(ghz(3).amplitudes).tolist() == [0, 7]
    assert np.flatnonzero(w(3).amplitudes).tolist() == [1, 2, 4]
    assert balanced_w_spec(2).size == 6
    assert np.count_nonzero(balanced_w(3).amplitudes) == math.comb(6, 3)
    assert np.allclose(complete_es(3).amplitudes, np.full(8, 1 / math.sqrt(8)))
    assert abs(basis_state(3, 6).amplitudes[6]) == 1.0
    with pytest.raises(SpecError):
        basis_state(2, 4)


def test_phased_es_phases():
    spec = EsSpec.of(3, [1, 6])
    psi = phased_es(spec, 0.5)
    assert psi.amplitudes[6] == pytest.approx(np.exp(-2j * np.pi * 0.5 * 6 / 8) / math.sqrt(2))
    assert phased_es(spec, 0.0).allclose(es_state(spec))


@settings(deadline=None, max_examples=30)
@given(p=st.floats(min_value=-20.0, max_value=20.0, allow_nan=False), seed=st.integers(0, 10_000))
def test_phased_es_is_local_phase_gates_on_es(p, seed):
    rng = np.random.default_rng(seed)
    members = rng.choice(16, size=int(rng.integers(1, 17)), replace=False)
    spec = EsSpec.of(4, members.tolist())
    state = es_state(spec)
    for m, gate in enumerate(phase_gates(4, p), start=1):
        state = apply_local_unitary(state, m, gate)
    assert state.allclose(phased_es(spec, p), atol=1e-10)


def test_random_state_is_seeded_and_normalized():
    a = random_state(5, np.random.default_rng(11))
    b = random_state(5, np.random.default_rng(11))
    assert a.allclose(b, atol=0.0)
    assert a.norm() == pytest.approx(1.0)


def test_constant_qubits_and_reducibility():
    # 0b100 and 0b110: qubit 1 is always 1, qubit 3 always 0
    spec = EsSpec.of(3, [0b100, 0b110])
    assert constant_qubits(spec) == {1: 1, 3: 0}
    assert is_reducible(spec)
    assert not is_reducible(EsSpec.of(2, [0, 3]))
    # every even period fixes the least significant qubit
    assert 3 in constant_qubits(PeriodicSpec(q=3, r=2, l=1).to_es())


def test_parse_index_set():
    assert parse_index_set("0, 3 5") == [0, 3, 5]
    assert parse_index_set("0x3") == [3]
    with pytest.raises(SpecError):
        parse_index_set("1,two")


def test_build_state_by_kind():
    assert build_state("periodic", q=4, r=5, l=1).allclose(periodic_state(PeriodicSpec(4, 5, 1)))
    assert build_state("es", q=3, members="1,2").allclose(es_state(EsSpec.of(3, [1, 2])))
    assert build_state("balanced-w", q=4).allclose(balanced_w(2))
    assert build_state("random", q=3, seed=4).allclose(random_state(3, np.random.default_rng(4)))
    with pytest.raises(SpecError):
        build_state("periodic", q=4)
    with pytest.raises(SpecError):
        build_state("bell", q=2)
    with pytest.raises(SpecError):
        build_state("balanced-w", q=3)


@pytest.mark.parametrize("q,r,l", [(8, 13, 3), (6, 5, 2), (6, 8, 3)])
def test_transformed_periodic_state_follows_phased_pattern(q, r, l):
    # qft output = real profile times the phases of phased_es with p = l + r(A-1)/2
    spec = PeriodicSpec(q=q, r=r, l=l)
    p = spec.l + spec.r * (spec.A - 1) / 2
    pattern = phased_es(EsSpec.of(q, range(2 ** q)), p).amplitudes * math.sqrt(2 ** q)
    transformed = qft(periodic_state(spec))
    profile = np.real(transformed.amplitudes / pattern)
    rebuilt = StateVector.from_amplitudes(profile * pattern)
    assert rebuilt.equal_up_to_phase(transformed, atol=1e-10)
    assert not rebuilt.equal_up_to_phase(StateVector.from_amplitudes(np.abs(profile)), atol=1e-3)


if __name__ == "__main__":
    try:
        test_es_spec_validation()
        test_named_families()
        test_constant_qubits_and_reducibility()
        print("\n✅ All tests passed!")
    except AssertionError as e:
        print(f"\n❌ Test failed: {e}")
    except Exception as e:
        print(f"\n❌ An error occurred: {e}")
