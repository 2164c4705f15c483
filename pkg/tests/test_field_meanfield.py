import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from catspec.core import ModelParams, ParameterError
from catspec.field_meanfield import (GaussianPair, NormalizationError, NotCatRegimeError, RadialProfile,
                                     cat_energy_ordering_gaussian, cat_energy_ordering_profiles,
                                     energy_functional, functional_components, gauss_one_body,
                                     gauss_one_body_cross, gauss_overlap, gauss_quartic, gaussian_Lambda0,
                                     minimize_gaussian, radial_grid, relax_gpe, residual, solve_thomas_fermi,
                                     stationarity_operator, tf_Lambda0, tf_r0, tf_symmetric_components,
                                     tf_symmetric_norm, write_profile_csv)
from catspec.twomode_meanfield import BranchLabel, cat_energies, mean_field_branches

FREE1 = ModelParams(1, 0.0, 0.0)
R = radial_grid(10.0, 4096)


def oscillator(r, n=1.0):
    return math.sqrt(n) * np.pi ** -0.75 * np.exp(-r * r / 2)


def test_oscillator_energy():
    prof = RadialProfile(R, oscillator(R), np.zeros_like(R))
    assert prof.norm() == pytest.approx(1.0, abs=1e-10)
    assert energy_functional(prof, FREE1, 0.0) == pytest.approx(1.5, abs=1e-5)
    half = RadialProfile(R, oscillator(R, 0.5), oscillator(R, 0.5))
    assert energy_functional(half, FREE1, 1.0) == pytest.approx(0.5, abs=1e-5)


def test_unnormalized_profile_rejected():
    with pytest.raises(NormalizationError):
        energy_functional(RadialProfile(R, 2 * oscillator(R), 0 * R), FREE1, 0.0)


def test_profile_validation_and_csv(tmp_path):
    with pytest.raises(ValueError):
        RadialProfile(R, R[:-1], R)
    with pytest.raises(ValueError):
        RadialProfile(R, R * np.nan, R)
    prof = RadialProfile(R[:3], [1.0, 2.0, 3.0], [0.0, 0.0, 0.0])
    path = tmp_path / "p.csv"
    with open(path, "w") as fh:
        write_profile_csv(prof, fh)
    lines = path.read_text().splitlines()
    assert lines[0] == "r,alpha,beta" and len(lines) == 4


def test_functional_gradient_matches_equations():
    p = ModelParams(50, 0.3, 0.7)
    r = radial_grid(6.0, 400)
    prof = RadialProfile(r, np.exp(-r * r / 3) * (1 + 0.2 * r), 0.8 * np.exp(-r * r / 2))
    lam = 0.4
    ga, gb = stationarity_operator(prof, p, lam)
    w = 4 * math.pi * prof.h * r * r
    for i in (10, 100, 250):
        for comp, g in (("alpha", ga), ("beta", gb)):
            step = 1e-6
            vals = []
            for s in (step, -step):
                arr = getattr(prof, comp).copy()
                arr[i] += s
                other = RadialProfile(r, arr, prof.beta) if comp == "alpha" else RadialProfile(r, prof.alpha, arr)
                vals.append(functional_components(other, p, lam)["total"])
            fd = (vals[0] - vals[1]) / (2 * step)
            assert fd == pytest.approx(2 * w[i] * g[i], rel=1e-6, abs=1e-10)


def test_tf_radius_examples():
    p = ModelParams(1000, 0.001, 0.003, apply_tilde_rescale=False)
    assert tf_r0(p) == pytest.approx((15 * 4 / (8 * math.pi)) ** 0.2, rel=1e-12)
    assert tf_r0(p) == pytest.approx(1.19010, abs=1e-5)
    unit = ModelParams(1, 8 * math.pi / 15 / 2, 8 * math.pi / 15 / 2, apply_tilde_rescale=False)
    assert tf_r0(unit) == pytest.approx(1.0, abs=1e-12)
    assert tf_symmetric_norm(tf_r0(p), 0.004) == pytest.approx(1000, rel=1e-12)


def test_tf_symmetric_energy_against_closed_form():
    p = ModelParams(1000, 0.5, 1.5, apply_tilde_rescale=False)
    (sol,) = solve_thomas_fermi(p, 5.0 * tf_Lambda0(p))
    exact = tf_symmetric_components(p, 5.0 * tf_Lambda0(p))["total"]
    assert sol.branch == "symmetric"
    assert sol.energy_tf == pytest.approx(exact, rel=1e-4)
    assert sol.profile.norm() == pytest.approx(1000, rel=1e-3)


def test_tf_degenerate_pair():
    p = ModelParams(1000, 0.2, 0.6, apply_tilde_rescale=False)
    lam = 0.5 * 0.3 * tf_Lambda0(p) * 0.4
    plus, minus = solve_thomas_fermi(p, lam)
    assert (plus.branch, minus.branch) == ("plus", "minus")
    assert plus.energy == pytest.approx(minus.energy, rel=1e-12)
    inner = p.n_atoms and plus.profile.r_grid <= plus.r1
    np.testing.assert_array_equal(plus.profile.alpha[inner], minus.profile.beta[inner])
    assert plus.r1 < plus.r2
    assert np.all(plus.profile.beta[plus.profile.r_grid < plus.r2 * 0.99] > 0)


def test_tf_requires_repulsion():
    with pytest.raises(ParameterError):
        solve_thomas_fermi(ModelParams(10, -1.0, 0.5), 0.1)


def test_gaussian_integrals_against_quadrature():
    r = radial_grid(20.0, 20000)
    a, b = 0.8, 1.3
    phi = lambda w: (2 * math.pi * w * w) ** -0.75 * np.exp(-r * r / (4 * w * w))
    prof = RadialProfile(r, phi(a), 0 * r)
    assert prof.integrate(phi(a) * phi(b)) == pytest.approx(gauss_overlap(a, b), rel=1e-8)
    assert prof.integrate(phi(a) ** 2 * phi(b) ** 2) == pytest.approx(gauss_quartic(a, b), rel=1e-8)
    assert energy_functional(prof, FREE1, 0.0) == pytest.approx(gauss_one_body(a), rel=1e-6)
    assert gauss_one_body_cross(a, a) == pytest.approx(gauss_one_body(a), rel=1e-14)


def test_gaussian_free_oscillator():
    g = minimize_gaussian(FREE1, 0.0)
    assert g.symmetric.width_a == pytest.approx(1 / math.sqrt(2), abs=1e-6)
    assert g.symmetric_energy == pytest.approx(1.5, abs=1e-10)


def test_gaussian_symmetric_only_when_u0_dominates():
    g = minimize_gaussian(ModelParams(1000, 0.6, 0.2), 0.05)
    assert g.degenerate_partner is None
    assert g.pair.n_a == pytest.approx(500.0)


def test_gaussian_pair_and_mirror(lab_params):
    lam = 0.5 * 5.0 * (lab_params.u1 - lab_params.u0) * (999 / 1000)
    g = minimize_gaussian(lab_params, lam)
    assert g.degenerate_partner is not None
    assert g.energy < g.symmetric_energy
    assert g.pair.n_atoms == pytest.approx(1000, rel=1e-12)
    m = g.degenerate_partner
    assert (m.n_a, m.width_a) == pytest.approx((g.pair.n_b, g.pair.width_b))
    assert m.energy(lab_params, lam) == pytest.approx(g.energy, rel=1e-12)


def test_gaussian_transition_lies_between_known_bounds(lab_params):
    L0 = gaussian_Lambda0(lab_params)
    assert 5.0 < L0 < tf_Lambda0(lab_params)


def test_relax_free_oscillator():
    r = radial_grid(8.0, 1024)
    seed = RadialProfile(r, np.exp(-r * r / 3), 0 * r).normalized(1)
    res = relax_gpe(FREE1, 0.0, seed)
    assert res.energy == pytest.approx(1.5, abs=1e-4)
    assert res.energy <= res.seed_energy
    assert res.residual <= 1e-6


def test_relax_strong_coupling_is_symmetric():
    p = ModelParams(200, 0.2, 0.6)
    r = radial_grid(8.0, 512)
    seed = RadialProfile(r, np.exp(-r * r / 2), 0.5 * np.exp(-r * r / 3)).normalized(200)
    res = relax_gpe(p, 20.0, seed)
    np.testing.assert_allclose(res.profile.alpha, res.profile.beta, atol=1e-6 * np.abs(res.profile.alpha).max())
    assert residual(res.profile, p, 20.0)[0] <= 1e-6


def test_cat_ordering_two_mode_reduction():
    n, u0, u1, L = 20, 0.3, 0.9, 0.8
    fp = ModelParams(n, u0, u1)
    width = 0.9
    q = gauss_quartic(width, width)
    tp = ModelParams(n, u0 * q, u1 * q).with_Lambda(L, default_tilde=True)
    b = {x.label: x for x in mean_field_branches(tp)}
    pair = GaussianPair.from_counts(b[BranchLabel.PLUS].alpha ** 2, width, b[BranchLabel.PLUS].beta ** 2, width)
    field = cat_energy_ordering_gaussian(fp, tp.lam, pair)
    two = cat_energies(tp)
    shift = n * gauss_one_body(width)
    assert field.E_plus - shift == pytest.approx(two.e_plus, abs=1e-8)
    assert field.E_minus - shift == pytest.approx(two.e_minus, abs=1e-8)


def test_cat_ordering_profiles_match_closed_form():
    p = ModelParams(30, 0.2, 0.8)
    lam = 0.3
    pair = GaussianPair.from_counts(22.0, 0.8, 8.0, 1.1)
    r = radial_grid(12.0, 6000)
    grid = cat_energy_ordering_profiles(p, lam, pair.profile(r), pair.mirrored().profile(r))
    closed = cat_energy_ordering_gaussian(p, lam, pair)
    assert grid.log_overlap == pytest.approx(closed.log_overlap, rel=1e-6)
    assert grid.E_plus == pytest.approx(closed.E_plus, rel=1e-5)
    assert grid.E_minus == pytest.approx(closed.E_minus, rel=1e-5)


def test_cat_ordering_vanishing_overlap():
    c = cat_energy_ordering_gaussian(ModelParams(1000, 0.2, 0.6), 0.05, GaussianPair.from_counts(990, 0.7, 10, 1.5))
    assert c.E_plus == c.E_mid == c.E_minus


def test_cat_ordering_needs_distinct_branches():
    with pytest.raises(NotCatRegimeError):
        cat_energy_ordering_gaussian(ModelParams(10, 0.2, 0.6), 0.1, GaussianPair.from_counts(5, 1, 5, 1))


@settings(max_examples=25, deadline=None)
@given(frac=st.floats(0.55, 0.95), a=st.floats(0.5, 1.5), b=st.floats(0.5, 1.5), lam=st.floats(0.0, 2.0))
def test_cat_ordering_sign(frac, a, b, lam):
    n = 40
    c = cat_energy_ordering_gaussian(ModelParams(n, 0.1, 0.5), lam, GaussianPair.from_counts(frac * n, a, (1 - frac) * n, b))
    if c.reduced_cross < 0:
        assert c.E_plus <= c.E_mid <= c.E_minus
    else:
        assert c.E_plus >= c.E_mid >= c.E_minus
    # the shift eps*D is resolvable in floating point
    if math.exp(c.log_overlap) * abs(c.reduced_cross) > 1e-12 * abs(c.E_mid):
        assert (c.E_plus < c.E_mid < c.E_minus) == (c.reduced_cross < 0)
