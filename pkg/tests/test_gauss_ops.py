import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad
from scipy.special import eval_hermite, gammaln

from cloning_lab.fock_core import CutoffError, FockSpace, basis_vector, make_annihilation, make_number, make_quadratures
from cloning_lab.gauss_ops import (
    QuadraticExponentialSpec,
    WeightPair,
    beam_splitter_rotation,
    bmode_observables,
    gauss_axis_matrix,
    gauss_axis_operator,
    joint_fidelity_operator,
    single_clone_terms,
    truncation_stability,
    weighted_single_clone_operator,
)
from cloning_lab.spectral import power_iteration


def _wavefunction(n, x):
    # position-space Fock state for Q = (a + a^dag)/sqrt2
    log_norm = -0.5 * (n * math.log(2.0) + gammaln(n + 1) + 0.5 * math.log(math.pi))
    return math.exp(log_norm) * eval_hermite(n, x) * math.exp(-0.5 * x * x)


def _quad_element(m, n, kappa=0.5):
    val, _ = quad(lambda x: _wavefunction(m, x) * _wavefunction(n, x) * math.exp(-kappa * x * x), -30, 30, limit=200)
    return val


def test_leading_elements():
    g = gauss_axis_matrix("Q", 6)
    assert g[0, 0] == pytest.approx(math.sqrt(2 / 3), abs=1e-12)
    assert g[1, 1] == pytest.approx((2 / 3) ** 1.5, abs=1e-12)
    assert g[0, 2] == pytest.approx(-0.192450, abs=1e-6)
    assert g[0, 1] == 0.0


@pytest.mark.parametrize("m,n", [(0, 0), (2, 0), (3, 1), (4, 4), (7, 3), (10, 6), (12, 12), (9, 8)])
def test_elements_against_quadrature(m, n):
    g = gauss_axis_matrix("Q", 14)
    assert g[m, n] == pytest.approx(_quad_element(m, n), abs=1e-11)


@pytest.mark.parametrize("kappa", [0.25, 1.0, 2.0])
def test_other_coefficients_against_quadrature(kappa):
    g = gauss_axis_matrix("Q", 8, kappa)
    for m, n in [(0, 0), (2, 4), (5, 5), (6, 0)]:
        assert g[m, n] == pytest.approx(_quad_element(m, n, kappa), abs=1e-11)


def test_p_axis_against_large_box_spectral_oracle():
    big = FockSpace(1, 160)
    _, p = make_quadratures(big)
    w, v = np.linalg.eigh((p @ p).matrix)
    ref = (v * np.exp(-0.5 * w)) @ v.conj().T
    assert np.allclose(gauss_axis_matrix("P", 13), ref[:13, :13], atol=1e-9)


def test_p_axis_sign_pattern():
    gq = gauss_axis_matrix("Q", 8)
    gp = gauss_axis_matrix("P", 8)
    k = np.arange(8)
    phase = (1j) ** (k[:, None] - k[None, :])
    assert np.allclose(gp, np.real(phase * gq))


@pytest.mark.parametrize("axis", ["Q", "P"])
def test_gauss_matrix_shape_properties(axis):
    g = gauss_axis_matrix(axis, 25)
    assert np.allclose(g, g.T)
    k = np.arange(25)
    assert np.all(g[(k[:, None] - k[None, :]) % 2 == 1] == 0)
    w = np.linalg.eigvalsh(g)
    assert w.min() > 0 and w.max() < 1


def test_gauss_matrix_rejects_bad_input():
    with pytest.raises(ValueError):
        gauss_axis_matrix("X", 4)
    with pytest.raises(ValueError):
        gauss_axis_matrix("Q", 4, coefficient=0.0)


def test_gauss_operator_embedding():
    sp = FockSpace(2, 4)
    op = gauss_axis_operator("P", sp, mode=1)
    assert np.allclose(op.matrix, np.kron(np.eye(5), gauss_axis_matrix("P", 5)))


def test_spec_validation():
    with pytest.raises(ValueError):
        QuadraticExponentialSpec((("Q", 0, 0.5), ("P", 0, 0.5)))
    with pytest.raises(ValueError):
        QuadraticExponentialSpec((("Q", 0, 0.5), ("Q", 0, 0.5)))
    with pytest.raises(ValueError):
        QuadraticExponentialSpec((("Q", 0, -1.0),))
    with pytest.raises(ValueError):
        QuadraticExponentialSpec(())
    with pytest.raises(IndexError):
        QuadraticExponentialSpec((("Q", 3, 0.5),)).materialize(FockSpace(2, 3))


def test_spec_materializes_product_terms():
    sp = FockSpace(2, 6)
    t1, t2 = single_clone_terms(sp)
    s1 = QuadraticExponentialSpec((("Q", 0, 0.5), ("P", 1, 0.5))).materialize(sp)
    s2 = QuadraticExponentialSpec((("P", 0, 0.5), ("Q", 1, 0.5))).materialize(sp)
    assert np.allclose(s1.matrix, t1.matrix)
    assert np.allclose(s2.matrix, t2.matrix)


def test_rotated_spec_is_bmode_observable():
    sp = FockSpace(2, 5)
    f1, _ = bmode_observables(sp)
    spec = QuadraticExponentialSpec((("Q", 0, 0.5), ("P", 1, 0.5)), rotated=True)
    assert np.allclose(spec.materialize(sp).matrix, f1.matrix, atol=1e-13)


def test_weight_pair():
    w = WeightPair(2.0, 6.0)
    assert w.normalized() == WeightPair(0.25, 0.75)
    assert w.swapped() == WeightPair(6.0, 2.0)
    assert w.ratio == pytest.approx(3.0)
    with pytest.raises(ValueError):
        WeightPair(-1.0, 2.0)
    with pytest.raises(ValueError):
        WeightPair(0.0, 0.0)


def test_single_clone_vacuum_element():
    sp = FockSpace(2, 12)
    op = weighted_single_clone_operator((1, 0), sp)
    assert op.element((0, 0), (0, 0)).real == pytest.approx(2 / 3, abs=1e-12)


@given(st.floats(0.0, 1.0))
@settings(max_examples=20, deadline=None)
def test_weighted_operator_is_psd_and_bounded(l1):
    if l1 == 0.0:
        l1 = 1e-3
    sp = FockSpace(2, 6)
    op = weighted_single_clone_operator((l1, 1 - l1), sp)
    assert op.is_hermitian(1e-12)
    w = np.linalg.eigvalsh(op.matrix)
    assert w.min() >= -1e-12
    assert w.max() <= 1 + 1e-12


def test_weighted_operator_requires_two_modes():
    with pytest.raises(ValueError):
        weighted_single_clone_operator((0.5, 0.5), FockSpace(1, 4))


def test_parity_commutes_with_operator():
    sp = FockSpace(2, 8)
    op = weighted_single_clone_operator((0.3, 0.7), sp).matrix
    n = np.diag(make_number(sp, 0).matrix + make_number(sp, 1).matrix).real
    parity = np.diag((-1.0) ** n)
    assert np.allclose(parity @ op, op @ parity)


def test_symmetric_top_eigenvalue_monotone_in_cutoff():
    tops = [power_iteration(weighted_single_clone_operator((0.5, 0.5), FockSpace(2, c))).eigenvalue for c in (6, 10, 14)]
    assert tops[0] <= tops[1] + 1e-12 <= tops[2] + 2e-12


def test_beam_splitter_rotation_heisenberg_map():
    sp = FockSpace(2, 8)
    v = beam_splitter_rotation(sp)
    a0 = make_annihilation(sp, 0).matrix
    a1 = make_annihilation(sp, 1).matrix
    low = np.flatnonzero(sp.total_photons() <= sp.cutoff - 1)
    lhs0 = (v.T @ a0 @ v)[np.ix_(low, low)]
    lhs1 = (v.T @ a1 @ v)[np.ix_(low, low)]
    assert np.allclose(lhs0, ((a0 + a1) / math.sqrt(2))[np.ix_(low, low)], atol=1e-12)
    assert np.allclose(lhs1, ((a0 - a1) / math.sqrt(2))[np.ix_(low, low)], atol=1e-12)
    inner = np.flatnonzero(sp.total_photons() <= sp.cutoff)
    assert np.allclose(v[:, inner].T @ v[:, inner], np.eye(inner.size), atol=1e-12)


def test_bmode_against_large_box_exponential():
    big = FockSpace(2, 26)
    q0, p0 = make_quadratures(big, 0)
    q1, p1 = make_quadratures(big, 1)
    small = FockSpace(2, 3)
    idx = [big.index(o) for o in small.occupations()]
    f1, f2 = bmode_observables(small)
    for x, y, f in ((q0 + q1, p0 - p1, f1), (q0 - q1, p0 + p1, f2)):
        h = ((x @ x) + (y @ y)).matrix / 4
        w, u = np.linalg.eigh(h)
        ref = (u * np.exp(-w)) @ u.conj().T
        assert np.allclose(ref[np.ix_(idx, idx)], f.matrix, atol=1e-10)


def test_bmode_vacuum_and_swap_symmetry():
    sp = FockSpace(2, 6)
    f1, f2 = bmode_observables(sp)
    assert f1.element((0, 0), (0, 0)).real == pytest.approx(2 / 3, abs=1e-12)
    assert f2.element((0, 0), (0, 0)).real == pytest.approx(2 / 3, abs=1e-12)
    # f2 is f1 with the second mode's parity flipped
    parity = np.diag((-1.0) ** sp.occupations()[:, 1])
    assert np.allclose(parity @ f1.matrix @ parity, f2.matrix, atol=1e-12)


def test_joint_operator_values():
    op = joint_fidelity_operator(FockSpace(2, 4), circuit_cutoff=14)
    assert op.is_hermitian(1e-10)
    w, v = np.linalg.eigh(op.matrix)
    assert w.min() >= -1e-10
    assert w[-1] == pytest.approx(0.5, abs=2e-3)
    assert op.matrix[0, 0].real == pytest.approx(0.5, abs=2e-3)
    assert abs(v[0, -1]) ** 2 >= 0.99
    assert op.element((1, 1), (1, 1)).real < 0.5


def test_joint_operator_cutoff_diagnostic():
    with pytest.raises(CutoffError):
        joint_fidelity_operator(FockSpace(2, 4), circuit_cutoff=12)
    with pytest.raises(CutoffError):
        joint_fidelity_operator(FockSpace(2, 8), circuit_cutoff=6)


def test_truncation_stability():
    v, change, stable = truncation_stability(lambda c: 1 - 2.0 ** -c, 20)
    assert stable and change < 1e-4
    _, _, stable = truncation_stability(lambda c: 1.0 / c, 4)
    assert not stable


def test_vacuum_basis_is_dominant_for_product_endpoint():
    sp = FockSpace(2, 10)
    op = weighted_single_clone_operator((1, 0), sp)
    vac = basis_vector(sp, (0, 0))
    assert op.expectation(vac).real == pytest.approx(2 / 3)
