import numpy as np
import pytest
from scipy.linalg import expm

from catspec.adiabatic import RampSchedule, StepRejected, energy, evolve, max_dt, parity_leak
from catspec.core import ModelParams, ParameterError
from catspec.twomode_exact import build_hamiltonian, diagonalize

P = ModelParams(12, 0.1, 0.3)


def test_ramp_shapes():
    r = RampSchedule(1.5, 0.7, 10.0)
    assert r.Lambda(0) == 1.5 and r.Lambda(10) == 0.7 and r.Lambda(20) == 0.7
    assert r.Lambda(5) == pytest.approx(1.1)
    s = RampSchedule(1.5, 0.7, 10.0, "smoothstep")
    assert s.Lambda(5) == pytest.approx(1.1)
    assert s.Lambda(1) > r.Lambda(1)


@pytest.mark.parametrize("args", [(0.7, 1.5, 1.0), (1.5, 0.0, 1.0), (1.5, 0.7, 0.0), (1.5, 0.7, 1.0, "cubic")])
def test_invalid_ramps(args):
    with pytest.raises(ParameterError):
        RampSchedule(*args)


def test_dt_limit_enforced():
    with pytest.raises(ParameterError):
        evolve(P, RampSchedule(1.2, 1.0, 1.0), dt=2 * max_dt(P, 1.2))


def test_constant_hamiltonian_keeps_ground_state():
    tab = evolve(P, RampSchedule(1.2, 1.2, 20.0))
    np.testing.assert_allclose(tab.fid0, 1.0, atol=1e-12)
    np.testing.assert_allclose(tab.norm, 1.0, atol=1e-12)
    e = diagonalize(build_hamiltonian(P.with_Lambda(1.2)), 1).eigenvalues[0]
    assert energy(P, 1.2, tab.final_state) == pytest.approx(e, abs=1e-10)


def test_against_matrix_exponential():
    ramp = RampSchedule(1.3, 0.8, 2.0)
    tab = evolve(P, ramp, dt=max_dt(P, 1.3) / 8)
    psi = diagonalize(build_hamiltonian(P.with_Lambda(1.3)), 1).eigenvectors[0].astype(complex)
    steps = 4000
    dt = ramp.duration / steps
    for k in range(steps):
        h = build_hamiltonian(P.with_Lambda(ramp.Lambda((k + 0.5) * dt))).dense()
        psi = expm(-1j * dt * h) @ psi
    assert abs(np.vdot(psi, tab.final_state)) ** 2 == pytest.approx(1.0, abs=1e-6)


def test_norm_parity_and_recording():
    tab = evolve(P, RampSchedule(1.5, 0.7, 30.0), record_every=7)
    assert tab.max_step_drift < 1e-12
    assert np.max(np.abs(tab.norm - 1)) < 1e-10
    assert parity_leak(tab.final_state) < 1e-20
    assert tab.t[0] == 0 and tab.t[-1] == pytest.approx(30.0)
    assert np.all(np.diff(tab.t) > 0)
    assert np.all(tab.fid01 >= tab.fid0 - 1e-15) and np.all(tab.fid01 <= 1 + 1e-12)
    assert len(list(tab.rows())) == len(tab.t)


def test_slower_ramps_follow_better():
    short = evolve(P, RampSchedule(1.5, 0.7, 2.0)).fid01[-1]
    long = evolve(P, RampSchedule(1.5, 0.7, 40.0)).fid01[-1]
    assert long > short


def test_step_rejected_is_an_error_type():
    assert issubclass(StepRejected, RuntimeError)


def test_sudden_quench_keeps_the_initial_state():
    ramp = RampSchedule(1.5, 0.7, 1e-6)
    tab = evolve(P, ramp)
    start = diagonalize(build_hamiltonian(P.with_Lambda(1.5)), 1).eigenvectors[0]
    end = diagonalize(build_hamiltonian(P.with_Lambda(0.7)), 1).eigenvectors[0]
    assert tab.fid0[-1] == pytest.approx(float(start @ end) ** 2, abs=1e-8)
