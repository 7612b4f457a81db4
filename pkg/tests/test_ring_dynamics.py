import math

import numpy as np
import pytest

from ringbdg.ring_model import TWO_PI, Parity, RingParams
from ringbdg.ring_dynamics import (
    BlowUpError,
    NoGrowthWindowError,
    RingFields,
    RingGrid,
    angular_momenta,
    evolve,
    measure_growth_rate,
    mode_amplitudes,
    prepare_uniform,
    ring_norms,
    seed_noise,
    step,
    total_energy,
)


@pytest.mark.parametrize("n", [8, 12, 100, 0])
def test_grid_rejects_bad_sizes(n):
    with pytest.raises(ValueError):
        RingGrid(n)


def test_grid_modes_cover_both_signs():
    grid = RingGrid(16)
    modes = np.sort(grid.modes)
    np.testing.assert_array_equal(modes, np.arange(-8, 8))


def test_prepare_uniform_values():
    grid = RingGrid(32)
    params = RingParams(kappa_mag=0.5, gamma=1.0, n0=TWO_PI)
    sym = prepare_uniform(params, Parity.SYMMETRIC, grid)
    np.testing.assert_allclose(sym.chi_u, 1.0)
    np.testing.assert_allclose(sym.chi_d, 1.0)
    anti = prepare_uniform(params, Parity.ANTISYMMETRIC, grid)
    np.testing.assert_allclose(anti.chi_u, 1.0)
    np.testing.assert_allclose(anti.chi_d, -1.0)
    assert sym.tau == 0.0

    alpha_u, alpha_d = mode_amplitudes(sym)
    assert abs(alpha_u[0]) ** 2 == pytest.approx(TWO_PI)
    np.testing.assert_allclose(alpha_u[1:], 0.0, atol=1e-14)
    np.testing.assert_allclose(alpha_d[1:], 0.0, atol=1e-14)

    nu, nd = ring_norms(sym)
    assert nu == pytest.approx(params.n0)
    assert nd == pytest.approx(params.n0)


def test_seed_noise_deterministic_and_zero_mode_untouched():
    grid = RingGrid(64)
    params = RingParams.from_epsilon(1.0, 0.5)
    fields = prepare_uniform(params, Parity.SYMMETRIC, grid)
    one = seed_noise(fields, 1e-4, seed=42)
    two = seed_noise(fields, 1e-4, seed=42)
    np.testing.assert_array_equal(one.chi_u, two.chi_u)
    np.testing.assert_array_equal(one.chi_d, two.chi_d)
    other = seed_noise(fields, 1e-4, seed=43)
    assert np.any(one.chi_u != other.chi_u)

    alpha_u, _ = mode_amplitudes(one)
    base_u, _ = mode_amplitudes(fields)
    assert alpha_u[0] == pytest.approx(base_u[0], abs=1e-13)
    assert one.noise_amplitude == 1e-4


def test_seed_noise_statistics():
    # each nonzero mode receives a complex Gaussian of per-component std
    # amplitude*sqrt(n0/2pi); the mean modulus of such a draw is
    # std*sqrt(pi/2) (Rayleigh)
    grid = RingGrid(32)
    params = RingParams(kappa_mag=0.0, gamma=0.0, n0=TWO_PI)
    fields = prepare_uniform(params, Parity.SYMMETRIC, grid)
    amplitude = 1e-4
    samples = []
    for seed in range(200):
        noisy = seed_noise(fields, amplitude, seed)
        alpha_u, alpha_d = mode_amplitudes(noisy)
        samples.append(np.abs(alpha_u[1:]))
        samples.append(np.abs(alpha_d[1:]))
    mean_abs = np.mean(samples)
    expected = amplitude * math.sqrt(math.pi / 2.0)
    assert mean_abs == pytest.approx(expected, rel=0.05)


def test_free_single_mode_evolves_exactly():
    # gamma = 0, kappa = 0: each Fourier mode only picks up exp(-i m^2 tau)
    grid = RingGrid(32)
    params = RingParams(kappa_mag=0.0, gamma=0.0)
    m = 3
    chi = np.exp(1j * m * grid.angles)
    fields = RingFields(grid=grid, chi_u=chi.copy(), chi_d=chi.copy())
    dt, n_steps = 1e-2, 500
    for _ in range(n_steps):
        fields = step(fields, dt, params)
    expected = chi * np.exp(-1j * m * m * dt * n_steps)
    np.testing.assert_allclose(fields.chi_u, expected, atol=1e-12)
    np.testing.assert_allclose(fields.chi_d, expected, atol=1e-12)


def test_linear_josephson_oscillation_period():
    # gamma = 0, all atoms start in the upper ring; population returns with
    # period pi/kappa and sits fully in the lower ring at the half period
    grid = RingGrid(16)
    kappa = 0.8
    params = RingParams(kappa_mag=kappa, kappa_sign=-1, gamma=0.0)
    n = grid.n_points
    start = RingFields(
        grid=grid,
        chi_u=np.ones(n, dtype=complex),
        chi_d=np.zeros(n, dtype=complex),
    )
    period = math.pi / kappa
    n_steps = 400

    fields = start
    for _ in range(n_steps):
        fields = step(fields, period / 2 / n_steps, params)
    nu, nd = ring_norms(fields)
    assert nu == pytest.approx(0.0, abs=1e-12)
    assert nd == pytest.approx(TWO_PI, rel=1e-12)

    for _ in range(n_steps):
        fields = step(fields, period / 2 / n_steps, params)
    nu, nd = ring_norms(fields)
    assert nu == pytest.approx(TWO_PI, rel=1e-12)
    assert nd == pytest.approx(0.0, abs=1e-12)


def test_uniform_state_accumulates_exact_phase():
    # stationary symmetric background: chi(tau) = chi(0) exp(-i mu tau)
    # holds per step because every sub-step acts as a pure phase on it
    params = RingParams.from_epsilon(2.0, 1.5, -1)
    mu_ground = 2.0 - 1.5
    fields = prepare_uniform(params, Parity.SYMMETRIC, RingGrid(32))
    start = fields.chi_u.copy()
    dt, n_steps = 1e-3, 1000
    for _ in range(n_steps):
        fields = step(fields, dt, params)
    expected = start * np.exp(-1j * mu_ground * dt * n_steps)
    np.testing.assert_allclose(fields.chi_u, expected, atol=1e-12)
    np.testing.assert_allclose(fields.chi_d, expected, atol=1e-12)


def test_step_rejects_bad_dt_and_nonfinite_fields():
    params = RingParams.from_epsilon(1.0, 0.5)
    fields = prepare_uniform(params, Parity.SYMMETRIC, RingGrid(16))
    with pytest.raises(ValueError):
        step(fields, 0.0, params)
    chi_bad = fields.chi_u.copy()
    chi_bad[3] = np.nan
    broken = RingFields(grid=fields.grid, chi_u=chi_bad, chi_d=fields.chi_d, tau=1.25)
    with pytest.raises(BlowUpError) as excinfo:
        step(broken, 1e-3, params)
    assert excinfo.value.tau == pytest.approx(1.25 + 1e-3)


def test_evolve_conserves_total_norm_and_linear_energy():
    params = RingParams(kappa_mag=0.7, kappa_sign=-1, gamma=0.0)
    fields = seed_noise(prepare_uniform(params, Parity.ANTISYMMETRIC, RingGrid(64)), 1e-3, 5)
    record = evolve(fields, 1e-3, 3000, params, record_every=100)
    total = record.norm_u + record.norm_d
    np.testing.assert_allclose(total, total[0], rtol=1e-12)
    np.testing.assert_allclose(record.energy, record.energy[0], rtol=1e-12)
    assert np.all(np.diff(record.times) > 0)
    assert np.all(record.norm_u > 0) and np.all(record.norm_d > 0)


def test_evolve_total_norm_with_interactions():
    params = RingParams.from_epsilon(2.0, 1.5)
    fields = seed_noise(prepare_uniform(params, Parity.ANTISYMMETRIC, RingGrid(64)), 1e-4, 3)
    record = evolve(fields, 1e-3, 2000, params, record_every=50)
    total = record.norm_u + record.norm_d
    np.testing.assert_allclose(total, total[0], rtol=1e-12)


def test_evolve_validates_tracked_modes():
    params = RingParams.from_epsilon(1.0, 0.5)
    fields = prepare_uniform(params, Parity.SYMMETRIC, RingGrid(16))
    with pytest.raises(ValueError):
        evolve(fields, 1e-3, 10, params, modes_to_track=(8,))


def test_strang_splitting_is_second_order():
    # error against a much finer reference must drop ~4x when dt halves;
    # measured on the growing antisymmetric state before saturation
    params = RingParams.from_epsilon(2.0, 1.5)
    base = seed_noise(prepare_uniform(params, Parity.ANTISYMMETRIC, RingGrid(64)), 1e-4, 11)
    tau_end = 0.4

    def final_state(dt):
        fields = base
        n_steps = round(tau_end / dt)
        assert abs(n_steps * dt - tau_end) < 1e-12
        for _ in range(n_steps):
            fields = step(fields, dt, params)
        return fields

    reference = final_state(6.25e-5)

    def error(dt):
        state = final_state(dt)
        return max(
            np.max(np.abs(state.chi_u - reference.chi_u)),
            np.max(np.abs(state.chi_d - reference.chi_d)),
        )

    ratio = error(1e-3) / error(5e-4)
    assert 3.2 < ratio < 4.8


def test_coupling_sign_flip_is_a_gauge_transform():
    # evolving (u, d) at +|kappa| must equal evolving (u, -d) at -|kappa|
    # with the lower ring negated back afterwards
    plus = RingParams.from_epsilon(1.3, 0.9, +1)
    minus = RingParams.from_epsilon(1.3, 0.9, -1)
    grid = RingGrid(64)
    fields = seed_noise(prepare_uniform(plus, Parity.SYMMETRIC, grid), 1e-3, 21)
    mirrored = RingFields(grid=grid, chi_u=fields.chi_u.copy(), chi_d=-fields.chi_d)

    a, b = fields, mirrored
    for _ in range(1000):
        a = step(a, 1e-3, plus)
        b = step(b, 1e-3, minus)
    assert np.max(np.abs(a.chi_u - b.chi_u)) <= 1e-12
    assert np.max(np.abs(a.chi_d + b.chi_d)) <= 1e-12


def test_angular_momenta_of_plane_waves():
    grid = RingGrid(32)
    chi_u = np.exp(1j * 2 * grid.angles)
    chi_d = np.exp(-1j * 3 * grid.angles)
    fields = RingFields(grid=grid, chi_u=chi_u, chi_d=chi_d)
    lu, ld = angular_momenta(fields)
    assert lu == pytest.approx(2.0)
    assert ld == pytest.approx(-3.0)


def test_total_energy_of_uniform_states():
    params = RingParams.from_epsilon(2.0, 1.5, -1)
    grid = RingGrid(32)
    sym = prepare_uniform(params, Parity.SYMMETRIC, grid)
    anti = prepare_uniform(params, Parity.ANTISYMMETRIC, grid)
    # per ring: interaction (gamma/2)|chi|^4 * 2pi = pi*gamma; tunnel term
    # -+ 2 kappa n0 depending on parity
    interaction = params.gamma * math.pi * 2  # both rings
    assert total_energy(sym, params) == pytest.approx(interaction - 2 * 1.5 * TWO_PI)
    assert total_energy(anti, params) == pytest.approx(interaction + 2 * 1.5 * TWO_PI)


def test_measured_growth_rate_matches_linear_prediction():
    # antisymmetric background at eps=2, kappa=1.5: the m=1 branch grows at
    # rate Im sqrt((1 + 2 - 3)^2 - 4) = 2
    params = RingParams.from_epsilon(2.0, 1.5, -1)
    fields = seed_noise(prepare_uniform(params, Parity.ANTISYMMETRIC, RingGrid(128)), 1e-4, 1)
    record = evolve(fields, 1e-4, 40_000, params, record_every=100)
    fit = measure_growth_rate(record, 1)
    assert fit.rate == pytest.approx(2.0, rel=0.05)
    assert fit.n_points >= 10
    assert fit.residual < 0.05


def test_stable_background_has_no_growth_window():
    params = RingParams.from_epsilon(2.0, 1.5, -1)
    fields = seed_noise(prepare_uniform(params, Parity.SYMMETRIC, RingGrid(128)), 1e-4, 1)
    record = evolve(fields, 1e-4, 20_000, params, record_every=100)
    with pytest.raises(NoGrowthWindowError):
        measure_growth_rate(record, 1)


def test_measure_growth_rate_requires_amplitude():
    params = RingParams.from_epsilon(2.0, 1.5, -1)
    fields = prepare_uniform(params, Parity.ANTISYMMETRIC, RingGrid(64))
    record = evolve(fields, 1e-3, 100, params, record_every=10)
    with pytest.raises(ValueError):
        measure_growth_rate(record, 1)
    with pytest.raises(ValueError):
        measure_growth_rate(record, 5)  # not tracked
