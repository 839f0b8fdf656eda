import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.linalg import expm

from cloning_lab.fock_core import (
    ConvergenceError,
    CutoffError,
    FockOperator,
    FockSpace,
    FockVector,
    TruncationWarning,
    basis_vector,
    coherent_state,
    displacement,
    expm_action,
    expm_multiply,
    identity,
    make_annihilation,
    make_creation,
    make_number,
    make_quadratures,
    tail_mass,
    tensor,
)


def test_space_shape_and_indexing():
    sp = FockSpace(2, 3)
    assert sp.levels == 4
    assert sp.shape == (4, 4)
    assert sp.dim == 16
    # big-endian: the first mode is the slow index
    assert sp.index((1, 0)) == 4
    assert sp.index((0, 1)) == 1
    assert tuple(sp.occupations()[sp.index((2, 3))]) == (2, 3)
    assert sp.total_photons()[sp.index((2, 3))] == 5


@pytest.mark.parametrize("modes,cutoff", [(0, 3), (4, 3), (1, 0)])
def test_space_rejects_bad_shape(modes, cutoff):
    with pytest.raises(ValueError):
        FockSpace(modes, cutoff)


def test_space_dimension_guard():
    with pytest.raises(ValueError):
        FockSpace(3, 40)


def test_index_out_of_range():
    with pytest.raises(ValueError):
        FockSpace(2, 3).index((4, 0))
    with pytest.raises(IndexError):
        make_annihilation(FockSpace(2, 3), mode=2)


def test_annihilation_elements():
    sp = FockSpace(1, 5)
    a = make_annihilation(sp).matrix
    for n in range(1, 6):
        assert a[n - 1, n] == pytest.approx(math.sqrt(n))
    assert np.count_nonzero(a) == 5
    assert np.allclose(make_creation(sp).matrix, a.T)
    assert np.allclose(np.diag(make_number(sp).matrix), np.arange(6))


def test_quadrature_vacuum_values():
    sp = FockSpace(1, 6)
    q, p = make_quadratures(sp)
    vac = basis_vector(sp, (0,))
    assert q.expectation(vac).real == pytest.approx(0.0)
    assert (q @ q).expectation(vac).real == pytest.approx(0.5)
    assert (p @ p).expectation(vac).real == pytest.approx(0.5)
    assert q.element((0,), (1,)) == pytest.approx(1 / math.sqrt(2))
    assert q.is_hermitian() and p.is_hermitian()


@pytest.mark.parametrize("modes", [1, 2])
def test_commutator_away_from_the_edge(modes):
    sp = FockSpace(modes, 10)
    for mode in range(modes):
        q, p = make_quadratures(sp, mode)
        comm = (q @ p - p @ q).matrix
        low = np.flatnonzero(sp.occupations().max(axis=1) <= 8)
        assert np.allclose(comm[np.ix_(low, low)], 1j * np.eye(low.size), atol=1e-12)


def test_different_modes_commute():
    sp = FockSpace(2, 5)
    q0, _ = make_quadratures(sp, 0)
    _, p1 = make_quadratures(sp, 1)
    assert np.allclose((q0 @ p1 - p1 @ q0).matrix, 0)


def test_tensor_product():
    one = FockSpace(1, 3)
    a = make_annihilation(one)
    ab = tensor(a, identity(one))
    assert ab.space == FockSpace(2, 3)
    assert np.allclose(ab.matrix, make_annihilation(FockSpace(2, 3), 0).matrix)
    assert np.allclose(tensor(identity(one), a).matrix, make_annihilation(FockSpace(2, 3), 1).matrix)
    with pytest.raises(ValueError):
        tensor(a, identity(FockSpace(1, 4)))


def test_operator_arithmetic_and_space_checks():
    sp = FockSpace(1, 4)
    n = make_number(sp)
    assert np.allclose((2 * n - n).matrix, n.matrix)
    assert np.allclose((n + identity(sp)).matrix, n.matrix + np.eye(5))
    with pytest.raises(ValueError):
        n + identity(FockSpace(1, 3))
    op = FockOperator(sp, np.arange(25.0).reshape(5, 5))
    assert not op.is_hermitian()
    assert op.hermiticity_error() > 0
    with pytest.raises(ValueError):
        FockOperator(sp, np.eye(4))


def test_vector_basics():
    sp = FockSpace(2, 2)
    v = FockVector(sp, np.arange(9.0))
    assert v.normalized().norm == pytest.approx(1.0)
    assert v.as_tensor()[1, 2] == 5
    w = FockVector.from_tensor(sp, v.as_tensor())
    assert np.allclose(w.amplitudes, v.amplitudes)
    assert basis_vector(sp, (1, 1)).fidelity(basis_vector(sp, (1, 1))) == pytest.approx(1.0)
    assert np.isclose(v.normalized().probabilities().sum(), 1.0)
    with pytest.raises(ValueError):
        FockVector(sp, np.zeros(9)).normalized()


def test_coherent_state_values():
    sp = FockSpace(1, 20)
    c = coherent_state(1.0, sp)
    assert abs(c.amplitudes[0]) == pytest.approx(math.exp(-0.5), abs=1e-5)
    assert abs(c.amplitudes[0]) ** 2 == pytest.approx(math.exp(-1), abs=1e-5)
    assert np.allclose(coherent_state(0.0, sp).amplitudes, basis_vector(sp, (0,)).amplitudes)
    assert c.norm == pytest.approx(1.0)
    # <n> = |alpha|^2
    beta = 0.8 - 0.6j
    assert make_number(sp).expectation(coherent_state(beta, sp)).real == pytest.approx(1.0, abs=1e-10)


def test_coherent_product_state():
    sp = FockSpace(2, 12)
    c = coherent_state([0.5, 0.3j], sp)
    a0 = make_annihilation(sp, 0)
    a1 = make_annihilation(sp, 1)
    assert a0.expectation(c) == pytest.approx(0.5, abs=1e-8)
    assert a1.expectation(c) == pytest.approx(0.3j, abs=1e-8)
    with pytest.raises(ValueError):
        coherent_state([1, 2, 3], sp)


def test_coherent_truncation_warning():
    with pytest.warns(TruncationWarning):
        coherent_state(3.0, FockSpace(1, 5))
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        coherent_state(0.5, FockSpace(1, 20))


def test_displacement_vacuum_element():
    sp = FockSpace(1, 30)
    d = displacement(1.0, sp)
    assert d.element((0,), (0,)).real == pytest.approx(0.60653, abs=1e-5)
    assert np.allclose(displacement(0.0, sp).matrix, np.eye(31))


def test_displacement_matches_generator_exponential():
    # oracle: exp(alpha a^dag - conj(alpha) a) truncated on a much larger box
    alpha = 0.7 - 0.4j
    big = FockSpace(1, 80)
    a = make_annihilation(big).matrix
    ref = expm(alpha * a.T - np.conj(alpha) * a)
    d = displacement(alpha, FockSpace(1, 10)).matrix
    assert np.allclose(d, ref[:11, :11], atol=1e-12)


@given(st.floats(-2, 2), st.floats(-2, 2))
@settings(max_examples=25, deadline=None)
def test_displacement_generates_coherent_states(re, im):
    alpha = complex(re, im)
    if abs(alpha) > 2:
        alpha = 2 * alpha / abs(alpha)
    sp = FockSpace(1, 30)
    shifted = FockVector(sp, displacement(alpha, sp).matrix[:, 0])
    assert shifted.fidelity(coherent_state(alpha, sp)) >= 1 - 1e-8


def test_expm_action_zero_generator():
    sp = FockSpace(1, 5)
    v = coherent_state(0.4, sp)
    out = expm_action(FockOperator(sp, np.zeros((6, 6))), v)
    assert np.allclose(out.amplitudes, v.amplitudes)


def test_expm_action_number_phase():
    sp = FockSpace(1, 6)
    theta = 0.37
    out = expm_action(1j * theta * make_number(sp), basis_vector(sp, (1,)))
    assert out.amplitudes[1] == pytest.approx(np.exp(1j * theta), abs=1e-12)


def test_quarter_turn_maps_q_to_p():
    sp = FockSpace(1, 30)
    alpha = 0.7 + 0.2j
    q, p = make_quadratures(sp)
    v = coherent_state(alpha, sp)
    turned = expm_action(1j * (math.pi / 2) * make_number(sp), v)
    assert q.expectation(v).real == pytest.approx(math.sqrt(2) * alpha.real, abs=1e-10)
    assert p.expectation(turned).real == pytest.approx(math.sqrt(2) * alpha.real, abs=1e-10)
    assert turned.fidelity(coherent_state(1j * alpha, sp)) == pytest.approx(1.0, abs=1e-10)


def test_expm_action_rejects_non_skew():
    sp = FockSpace(1, 4)
    with pytest.raises(ValueError):
        expm_action(make_number(sp), basis_vector(sp, (0,)))


def test_expm_multiply_reports_non_convergence():
    m = np.diag(np.full(4, 0.9))
    with pytest.raises(ConvergenceError):
        expm_multiply(m, np.ones(4), tol=1e-300, max_terms=3)


@given(st.integers(0, 2**32 - 1))
@settings(max_examples=30, deadline=None)
def test_expm_action_preserves_norm(seed):
    rng = np.random.default_rng(seed)
    sp = FockSpace(2, 3)
    h = rng.standard_normal((sp.dim, sp.dim)) + 1j * rng.standard_normal((sp.dim, sp.dim))
    h = 0.5 * (h + h.conj().T)
    v = FockVector(sp, rng.standard_normal(sp.dim) + 0j).normalized()
    out = expm_action(1j * FockOperator(sp, h), v)
    assert out.norm == pytest.approx(1.0, abs=1e-10)
    assert np.allclose(out.amplitudes, expm(1j * h) @ v.amplitudes, atol=1e-10)


@given(st.integers(0, 2**32 - 1))
@settings(max_examples=30, deadline=None)
def test_builders_are_hermitian(seed):
    rng = np.random.default_rng(seed)
    sp = FockSpace(int(rng.integers(1, 3)), int(rng.integers(1, 8)))
    mode = int(rng.integers(sp.mode_count))
    q, p = make_quadratures(sp, mode)
    assert q.is_hermitian() and p.is_hermitian() and make_number(sp, mode).is_hermitian()
    assert (q @ q + p @ p).is_hermitian()


def test_tail_mass():
    sp = FockSpace(2, 3)
    v = (basis_vector(sp, (0, 0)).amplitudes + basis_vector(sp, (3, 1)).amplitudes) / math.sqrt(2)
    assert tail_mass(FockVector(sp, v)) == pytest.approx(0.5)
    block = np.column_stack([basis_vector(sp, (0, 0)).amplitudes, v])
    assert tail_mass(block, sp) == pytest.approx(0.5)
    assert tail_mass(basis_vector(sp, (2, 2))) == 0.0


def test_cutoff_error_carries_tail():
    err = CutoffError("too small", tail_mass=0.1)
    assert err.tail_mass == 0.1
