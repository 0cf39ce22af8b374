import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from wforge import oracles
from wforge.core import InvalidArgument, roots
from wforge.gates import (
    GateSpec,
    PauliWord,
    PhaseVector,
    alpha_vector,
    clock,
    controlled_add,
    fourier,
    gate_matrix,
    hierarchy_level,
    is_clifford,
    is_pauli,
    p1,
    phase_s,
    shift,
    sqrt_z,
    tau_vector,
    u_ma,
)


def test_gate_matrix_examples():
    w = roots(3).omega
    assert np.allclose(gate_matrix(GateSpec.make("Z", 3)), np.diag([1, w, w * w]))
    assert np.allclose(gate_matrix(GateSpec.make("SQRTZ", 2)), np.diag([1, 1j]))
    assert np.allclose(gate_matrix(GateSpec.make("H", 2)), np.array([[1, 1], [1, -1]]) / math.sqrt(2))
    w5 = roots(5).omega
    assert np.allclose(gate_matrix(GateSpec.make("P1", 5, k=2)), np.diag([1, 1, w5, 1, 1]))


def test_gate_matrix_errors():
    with pytest.raises(InvalidArgument):
        gate_matrix(GateSpec.make("Z", 4))
    with pytest.raises(InvalidArgument):
        gate_matrix(GateSpec.make("P1", 3, k=3))
    with pytest.raises(InvalidArgument):
        gate_matrix(GateSpec.make("T2", 3))
    with pytest.raises(InvalidArgument):
        gate_matrix(GateSpec.make("NOPE", 3))


@pytest.mark.parametrize("d", [2, 3, 5, 7])
def test_all_primitives_unitary(d):
    specs = [
        GateSpec.make("X", d),
        GateSpec.make("X", d, p=d - 1),
        GateSpec.make("Z", d),
        GateSpec.make("S", d),
        GateSpec.make("H", d),
        GateSpec.make("CX", d),
        GateSpec.make("SQRTZ", d),
        GateSpec.make("UMA", d, m=2, a=1),
    ] + [GateSpec.make("P1", d, k=k) for k in range(d)]
    if d == 2:
        specs.append(GateSpec.make("T2", 2))
    for s in specs:
        U = gate_matrix(s)
        assert np.abs(U.conj().T @ U - np.eye(U.shape[0])).max() < 1e-12


@pytest.mark.parametrize("d", [2, 3, 5, 7])
def test_hadamard_maps_x_eigenstates(d):
    # the X eigenstate with eigenvalue omega^j is H^dag |j>; H sends it back to |j>
    H = fourier(d)
    X = shift(d)
    for j in range(d):
        v = H.conj().T[:, j]
        assert np.allclose(X @ v, roots(d).w(-j) * v) or np.allclose(X @ v, roots(d).w(j) * v)
        assert np.allclose(H @ v, np.eye(d)[:, j])
    # plus state = H|0> is the eigenvalue-1 eigenstate of X
    plus = H[:, 0]
    assert np.allclose(X @ plus, plus)


@pytest.mark.parametrize("d", [2, 3, 5, 7])
def test_sqrtz_power_is_z(d):
    assert np.abs(np.linalg.matrix_power(sqrt_z(d), d) - clock(d)).max() < 1e-12


def test_matches_oracle_matrices():
    for d in (2, 3, 5):
        assert np.allclose(fourier(d), oracles.fourier(d))
        for k in range(d):
            assert np.allclose(p1(d, k), oracles.p1(d, k))
        U = controlled_add(d)
        for c in range(d):
            for t in range(d):
                assert abs(U[c * d + (t + c) % d, c * d + t] - 1) < 1e-12


def test_s_formula():
    assert np.allclose(phase_s(2), np.diag([1, 1j]))
    w = roots(5).omega
    assert np.allclose(phase_s(5), np.diag([w ** (k * (k - 1) // 2) for k in range(5)]))


def test_is_pauli_examples():
    assert is_pauli(shift(5)) == PauliWord(5, (1,), (0,))
    w = roots(3).omega
    assert is_pauli(w * clock(3, 2)) == PauliWord(3, (0,), (2,))
    assert is_pauli(fourier(3)) is None
    assert is_pauli(np.kron(shift(3), clock(3))) == PauliWord(3, (1, 0), (0, 1))


def test_is_pauli_rejects_non_unitary():
    with pytest.raises(InvalidArgument):
        is_pauli(np.ones((3, 3)))


def test_is_clifford_examples():
    for U in (phase_s(5), fourier(5), controlled_add(5), np.eye(5)):
        assert is_clifford(U)
    assert not is_clifford(sqrt_z(5))
    assert not is_clifford(np.diag([1, 1, 1, np.exp(1j * 0.3)]))


@pytest.mark.parametrize(
    "U, d, want",
    [
        (sqrt_z(3), 3, 3),
        (shift(5), 5, 1),
        (u_ma(3, 1, 2), 3, 2),
        (p1(5, 0), 5, 4),
        (p1(3, 0), 3, 2),
        (sqrt_z(5), 5, 5),
        (u_ma(3, 1, 1), 3, 1),
        (u_ma(3, 2, 1), 3, 3),
        (u_ma(5, 1, 3), 5, 3),
    ],
)
def test_hierarchy_examples(U, d, want):
    assert hierarchy_level(U, d=d) == want


def test_hierarchy_bound_marker():
    assert hierarchy_level(sqrt_z(5), max_level=3, d=5) is None
    assert hierarchy_level(np.diag([1, np.exp(0.123j)]), max_level=4, d=2) is None


@pytest.mark.parametrize("d", [2, 3, 5])
def test_hierarchy_table(d):
    assert hierarchy_level(shift(d), d=d) == 1
    assert hierarchy_level(clock(d), d=d) == 1
    for U in (phase_s(d), fourier(d), controlled_add(d)):
        assert hierarchy_level(U, d=d) == 2
        assert is_clifford(U)


def test_tau_alpha_vectors():
    assert alpha_vector(5) == (PhaseVector(5, (0, 0, 4, 0, 1)), True)
    assert tau_vector(3).exponents == (0, 2, 2)
    assert alpha_vector(3)[1] is False
    assert alpha_vector(7)[1] is True
    with pytest.raises(InvalidArgument):
        tau_vector(2)


@pytest.mark.parametrize("d", [5, 7, 11])
def test_alpha_recurrence(d):
    alpha, ok = alpha_vector(d)
    assert ok and alpha.exponents[0] == 0
    for k in range(d):
        assert (alpha.exponents[(k + 1) % d] - alpha.exponents[k]) % d == (-k * k) % d


def test_phase_vector_reduction():
    pv = PhaseVector(3, (4, -1, 7))
    assert pv.exponents == (1, 2, 1)
    assert PhaseVector(3, (1, 2, 9), "zeta").exponents == (1, 2, 0)
    with pytest.raises(InvalidArgument):
        PhaseVector(3, (1, 2))


@settings(max_examples=25, deadline=None)
@given(st.sampled_from([2, 3, 5]), st.integers(0, 4), st.integers(0, 4), st.floats(0, 6.28))
def test_pauli_detection_property(d, a, b, theta):
    U = np.exp(1j * theta) * shift(d, a) @ clock(d, b)
    assert is_pauli(U) == PauliWord(d, (a,), (b,))


@settings(max_examples=20, deadline=None)
@given(st.sampled_from([3, 5]), st.lists(st.integers(0, 4), min_size=1, max_size=4))
def test_clifford_level_consistency(d, word):
    # products of Clifford generators stay at level <= 2
    gens = [phase_s(d), fourier(d), shift(d), clock(d)]
    U = np.eye(d, dtype=complex)
    for w in word:
        U = gens[w % 4] @ U
    lvl = hierarchy_level(U, d=d)
    assert is_clifford(U) and lvl is not None and lvl <= 2
