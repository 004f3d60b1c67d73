import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from beamanalog.beam_core import DomainError, aluminium_beam, modal_frequency
from beamanalog.modal import (
    ModalState,
    StepSizeError,
    beat_solution,
    energy_partition,
    first_transfer_minimum,
    integrate,
    mode_ode,
    mode_profile,
    project_initial_conditions,
    read_trajectory_csv,
    required_dt,
    simulate_modes,
    spillover_check,
    trajectory_csv,
    transfer_time,
    triangle_profile,
    unit_energy_state,
)
from oracles import beat_energy_mech

BETA = aluminium_beam().beta


def period(system):
    return 2 * math.pi / system.omega


def test_mode_ode_uncoupled():
    s = mode_ode(3, 0.8, 0.0)
    assert s.gyroscopic == 0
    fast, slow = s.frequencies()
    assert fast == pytest.approx(modal_frequency(3, 0.8)) and slow == pytest.approx(fast)


def test_mode_ode_characteristic_roots():
    s = mode_ode(2, 0.5, 0.07)
    A = s.matrix()
    ev = np.linalg.eigvals(A)
    assert np.allclose(ev.real, 0, atol=1e-9)
    w = np.sort(np.abs(ev.imag))[::2]
    # roots of beta^2 w^2 - rho (m pi)^2 w - (m pi)^4 = 0
    a, b, c = s.beta**2, -s.rho * (2 * math.pi) ** 2, -((2 * math.pi) ** 4)
    r = np.sort(np.roots([a, b, c]))
    assert r.sum() == pytest.approx(s.rho * (2 * math.pi) ** 2 / s.beta**2, rel=1e-12)
    np.testing.assert_allclose(np.sort(np.abs(r)), np.sort(w), rtol=1e-10)
    assert w[1] - w[0] == pytest.approx(s.splitting, rel=1e-9)


def test_mode_scaling():
    a, b = mode_ode(1, 1.0, 0.3), mode_ode(2, 1.0, 0.3)
    assert b.stiffness == pytest.approx(16 * a.stiffness)
    assert b.gyroscopic == pytest.approx(4 * a.gyroscopic)


@pytest.mark.parametrize("args", [(0, 1, 0), (1, 0, 0), (1, 1, -0.1), (1.5, 1, 0)])
def test_mode_ode_domain(args):
    with pytest.raises(DomainError):
        mode_ode(*args)


def test_uncoupled_cosine():
    s = mode_ode(1, BETA, 0.0)
    tr = integrate(s, ModalState(1, u=1.0), 10 * period(s), period(s) / 64)
    np.testing.assert_allclose(tr.u, np.cos(s.omega * tr.tau), atol=1e-6)
    assert np.all(tr.psi == 0)


def test_dt_refused():
    s = mode_ode(1, BETA, BETA / 16)
    with pytest.raises(StepSizeError) as info:
        integrate(s, unit_energy_state(1), 1.0, 2 * required_dt(s))
    assert info.value.required_dt == pytest.approx(required_dt(s))
    with pytest.raises(DomainError):
        integrate(s, unit_energy_state(1), 1.0, -0.001)


@pytest.mark.parametrize("m,ratio", [(1, 1 / 16), (2, 1 / 8), (1, 0.5)])
def test_matches_closed_form(m, ratio):
    s = mode_ode(m, BETA, BETA * ratio)
    x0 = ModalState(m, u=0.3, udot=-1.0, psi=0.2, psidot=0.5)
    tr = integrate(s, x0, 1.2 * transfer_time(s), required_dt(s) / 2)
    ref = beat_solution(s, x0, tr.tau)
    assert np.abs(tr.states - ref).max() < 1e-6 * np.abs(ref).max()


def test_energy_partition_and_exchange():
    s = mode_ode(1, BETA, BETA / 16)
    x0 = unit_energy_state(1)
    e_m, e_e = energy_partition(x0, s)
    assert e_m == pytest.approx(1.0) and e_e == 0.0
    tr = integrate(s, x0, 1.5 * transfer_time(s), required_dt(s) / 2)
    e_m, e_e = tr.energies()
    assert tr.energy_drift < 1e-8
    np.testing.assert_allclose(e_m, beat_energy_mech(1, BETA, BETA / 16, x0.u, tr.tau), atol=1e-9)
    tau, frac = first_transfer_minimum(tr)
    assert frac < 1e-4
    assert tau == pytest.approx(8 * period(s), rel=0.01)


def test_exchange_period_matches_integrator():
    s = mode_ode(1, BETA, BETA / 16)
    x0 = unit_energy_state(1)
    tr = integrate(s, x0, 2.2 * transfer_time(s), required_dt(s) / 2)
    e_m, _ = tr.energies()
    # back to nearly all-mechanical at one exchange period 2 pi / splitting
    k = np.argmin(np.abs(tr.tau - 2 * math.pi / s.splitting))
    window = slice(max(k - 40, 0), k + 40)
    assert e_m[window].max() == pytest.approx(1.0, abs=1e-3)


@pytest.mark.parametrize("ratio", [1 / 8, 1 / 16, 1 / 32])
def test_transfer_time_formula(ratio):
    s = mode_ode(1, BETA, BETA * ratio)
    assert transfer_time(s) == pytest.approx(math.pi * BETA**2 / (s.rho * math.pi**2), rel=1e-14)
    tr = integrate(s, unit_energy_state(1), 1.3 * transfer_time(s), required_dt(s) / 2)
    tau, _ = first_transfer_minimum(tr)
    assert tau == pytest.approx(transfer_time(s), rel=0.01)


def test_no_transfer_when_uncoupled():
    s = mode_ode(1, BETA, 0.0)
    tr = integrate(s, unit_energy_state(1), 10 * period(s), required_dt(s))
    assert tr.energies()[1].max() < 1e-12
    assert first_transfer_minimum(tr)[0] == math.inf
    assert transfer_time(s) == math.inf


def test_frequency_split_from_spectrum():
    s = mode_ode(1, BETA, BETA / 16)
    dt = period(s) / 48
    T = 40 * 2 * math.pi / s.splitting
    tr = integrate(s, unit_energy_state(1), T, dt)
    u = tr.u * np.hanning(len(tr.u))
    nfft = 1 << 20
    spec = np.abs(np.fft.rfft(u, nfft))
    freqs = 2 * math.pi * np.fft.rfftfreq(nfft, dt)
    peaks = []
    for target in s.frequencies():
        k = np.argmin(np.abs(freqs - target))
        lo = k - 200
        j = lo + int(np.argmax(spec[lo:k + 200]))
        a, b, c = np.log(spec[j - 1 : j + 2])
        shift = 0.5 * (a - c) / (a - 2 * b + c)
        peaks.append(freqs[j] + shift * (freqs[1] - freqs[0]))
    assert peaks[0] - peaks[1] == pytest.approx(s.splitting, rel=0.01)


def test_time_reversal():
    s = mode_ode(2, BETA, BETA / 10)
    x0 = ModalState(2, u=0.4, udot=0.1, psi=-0.2, psidot=0.3)
    T = 5 * period(s)
    dt = required_dt(s) / 3
    fwd = integrate(s, x0, T, dt)
    back = integrate(s, fwd.final(), -T, -dt)
    np.testing.assert_allclose(back.states[-1], x0.vector(), atol=1e-6)


def test_projection_examples():
    p = project_initial_conditions(mode_profile(1), 5)
    np.testing.assert_allclose(p.coefficients, [1, 0, 0, 0, 0], atol=1e-12)
    assert p.states[0] == ModalState(1, u=pytest.approx(1.0))
    p = project_initial_conditions(lambda e: math.sin(2 * math.pi * e) + 0.5 * math.sin(3 * math.pi * e), 5)
    np.testing.assert_allclose(p.coefficients, [0, 1, 0.5, 0, 0], atol=1e-12)
    assert p.residual < 1e-10


@pytest.mark.parametrize("peak", [0.5, 0.3])
def test_projection_triangle(peak):
    p = project_initial_conditions(triangle_profile(peak), 12, points=[peak])
    m = np.arange(1, 13)
    analytic = 2 * np.sin(m * math.pi * peak) / (m**2 * math.pi**2 * peak * (1 - peak))
    np.testing.assert_allclose(p.coefficients, analytic, atol=1e-8)
    assert p.residual > 0


def test_projection_rejects_bad_ends():
    with pytest.raises(DomainError):
        project_initial_conditions(lambda e: 1.0 + 0 * e, 3)


def test_spillover_two_modes():
    states = [ModalState(1, u=0.5), ModalState(2, u=0.1, psidot=0.2), ModalState(3)]
    s3 = mode_ode(3, BETA, BETA / 16)
    run = simulate_modes(BETA, BETA / 16, states, 20 * 2 * math.pi / mode_ode(1, BETA, 0).omega, required_dt(s3) / 2)
    assert spillover_check(run) < 1e-10
    assert np.all(run[3].states == 0)
    with pytest.raises(DomainError):
        spillover_check({1: run[1]})


@settings(max_examples=15, deadline=None)
@given(st.lists(st.floats(-1, 1), min_size=8, max_size=8), st.floats(0, 0.5))
def test_spillover_random(values, ratio):
    states = [ModalState(m, *values[2 * (m - 1) : 2 * m], 0.0, 0.0) for m in range(1, 5)]
    if all(v == 0 for v in values):
        return
    dt = required_dt(mode_ode(4, BETA, BETA * ratio)) / 1.5
    run = simulate_modes(BETA, BETA * ratio, states, 0.5, dt)
    assert spillover_check(run) < 1e-10


def test_csv_round_trip():
    s = mode_ode(1, BETA, BETA / 16)
    tr = integrate(s, unit_energy_state(1), period(s), required_dt(s))
    text = trajectory_csv(tr)
    assert text.splitlines()[0] == "tau,u,udot,psi,psidot,E_mech,E_elec"
    data = read_trajectory_csv(text)
    np.testing.assert_allclose(data[:, 1:5], tr.states, rtol=1e-11, atol=1e-300)
    assert trajectory_csv(tr) == text
