import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from catspec.core import ModelParams, ParameterError
from catspec.field_meanfield import RadialProfile, radial_grid
from catspec.field_variational import (Lambda_scale, Orbital, build_q_hamiltonian, ground_state,
                                       lambda_from_scaled, pair_energy_orbitals, quartic, solve_orbitals,
                                       spectrum_and_figures, symmetric_width, two_mode_couplings,
                                       write_widths_csv)
from catspec.tridiag import TridiagonalHamiltonian
from catspec.twomode_exact import build_hamiltonian, diagonalize

R = radial_grid(25.0, 25000)


def integrate(f):
    return RadialProfile(R, 0 * R, 0 * R).integrate(f)


def test_free_orbitals_are_oscillator_states():
    st_ = solve_orbitals(ModelParams(20, 0.0, 0.0), 0.0)
    np.testing.assert_allclose(st_.widths, 1 / math.sqrt(2), rtol=1e-6)
    assert st_.amps[0] == 0.0
    assert not st_.failed


def test_inputs_checked():
    with pytest.raises(ParameterError):
        solve_orbitals(ModelParams(9, 0.1, 0.3), 0.1)
    with pytest.raises(ParameterError):
        solve_orbitals(ModelParams(20, 0.1, 0.3), 0.1, vari_coupling=3.0)
    with pytest.raises(ParameterError):
        build_q_hamiltonian([1.0] * 5, ModelParams(20, 0.1, 0.3), 0.1)


def test_majority_orbital_is_denser(lab_params):
    lam = lambda_from_scaled(lab_params, 0.8)
    s = solve_orbitals(lab_params, lam)
    n = lab_params.n_atoms
    for m in range(1, n // 2, 37):
        assert s.amps[n - m] > s.amps[m]


@settings(max_examples=20, deadline=None)
@given(w=st.lists(st.floats(0.4, 2.0), min_size=2, max_size=2), c=st.lists(st.floats(0.1, 1.0), min_size=2, max_size=2),
       v=st.floats(0.4, 2.0))
def test_orbital_integrals_against_quadrature(w, c, v):
    o1 = Orbital.mixture(w, c)
    o2 = Orbital.gaussian(v)
    f1, f2 = o1.values(R), o2.values(R)
    assert integrate(f1 * f1) == pytest.approx(1.0, rel=1e-8)
    assert o1.overlap(o2) == pytest.approx(integrate(f1 * f2), rel=1e-8)
    assert quartic(o1, o1, o2, o2) == pytest.approx(integrate(f1 ** 2 * f2 ** 2), rel=1e-8)
    prof = RadialProfile(R, f1, 0 * R)
    kin_pot = prof.integrate(f1 * (0.5 * R * R * f2)) + prof.integrate(
        f1 * (-0.5 * np.gradient(np.gradient(R * f2, R), R) / R))
    assert o1.one_body(o2) == pytest.approx(kin_pot, rel=1e-5)


def test_mixture_of_one_width_is_the_gaussian():
    a, b = Orbital.mixture([0.9, 0.9], [0.3, 0.7]), Orbital.gaussian(0.9)
    assert a.overlap(b) == pytest.approx(1.0, rel=1e-14)
    assert pair_energy_orbitals(3, a, 5, a, 0.1, 0.2, 0.3) == pytest.approx(
        pair_energy_orbitals(3, b, 5, b, 0.1, 0.2, 0.3), rel=1e-13)


@pytest.mark.parametrize("coupling", [1.0, 2.0])
def test_equal_widths_reduce_to_two_mode(coupling):
    p = ModelParams(60, 0.2, 0.6)
    lam = 0.37
    width = solve_orbitals(p, coupling * lam, coupling).widths[30]
    q = build_q_hamiltonian([width] * 61, p, lam)
    u0, u1 = two_mode_couplings(width, p)
    two = build_hamiltonian(ModelParams(60, u0, u1, lam, apply_tilde_rescale=False))
    shift = q.matrix.diag - two.diag
    assert np.ptp(shift) < 1e-10
    np.testing.assert_allclose(q.matrix.offdiag, two.offdiag, atol=1e-12)
    assert q.asymmetry < 1e-12


def test_zero_coupling_spectrum_is_diagonal():
    p = ModelParams(40, 0.2, 0.6)
    s = solve_orbitals(p, 0.0)
    q = build_q_hamiltonian(s.widths, p, 0.0)
    assert np.all(q.matrix.offdiag == 0)
    spec = diagonalize(q.matrix, 4, want_vectors=False)
    np.testing.assert_allclose(spec.eigenvalues, np.sort(q.matrix.diag)[:4], rtol=1e-14)


def test_q_matrix_persymmetric_and_parity(lab_params):
    lam = lambda_from_scaled(lab_params, 1.3)
    s = solve_orbitals(lab_params, lam, stride=25)
    h = build_q_hamiltonian(s.widths, lab_params, lam).matrix
    assert h.is_persymmetric()
    spec = diagonalize(h, 4)
    assert list(spec.parities) == [1, -1, 1, -1]
    assert np.sum(spec.eigenvectors[0] ** 2) == pytest.approx(1.0, abs=1e-10)


def test_Lambda_scale_is_independent_of_lambda(lab_params):
    a = symmetric_width(lab_params)
    assert Lambda_scale(lab_params) == pytest.approx(lab_params.n_atoms * (4 * math.pi * a * a) ** -1.5, rel=1e-12)
    assert lambda_from_scaled(lab_params, 2.0) == pytest.approx(2 * lambda_from_scaled(lab_params, 1.0))


def test_ground_state_and_widths_csv(tmp_path):
    p = ModelParams(30, 0.2, 0.6)
    g = ground_state(p, 0.3)
    assert np.sum(g.qvec ** 2) == pytest.approx(1.0, abs=1e-10)
    np.testing.assert_allclose(g.qvec, g.qvec[::-1], atol=1e-10)
    path = tmp_path / "w.csv"
    with open(path, "w") as fh:
        write_widths_csv(g, fh)
    assert path.read_text().splitlines()[0] == "m,a_m"


def test_sweep_isolates_bad_rows():
    rows = spectrum_and_figures(ModelParams(5, 0.2, 0.6), [0.5, 1.5])
    assert [r.valid for r in rows] == [False, False]
    rows = spectrum_and_figures(ModelParams(40, 0.2, 0.6), [0.5, 1.5])
    assert all(r.valid for r in rows)
    assert rows[0].ratio < rows[1].ratio
