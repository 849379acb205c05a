import math

import numpy as np
import pytest

from coherence_orders import dephasing as dp
from coherence_orders.coherence import decompose
from coherence_orders.errors import EmptyGrid, NegativeTime, ParamOutOfRange, TopologyMismatch
from coherence_orders.states import make_state

from helpers import random_density

FIG = dict(gamma=10.0, Gamma=100.0)


def test_beta_examples():
    k = dp.OUKernel(10.0, 100.0)
    assert dp.beta(0.0, k) == 0
    assert dp.beta(0.1, k) == pytest.approx(0.5 * math.exp(-1), rel=1e-12)
    # long-time asymptote (Gamma / 2 gamma^2)(gamma t - 1); the linear term
    # alone is only reached slowly, 10% off at t = 10 / gamma
    t = 10 / 10.0
    assert dp.beta(t, k) == pytest.approx(0.5 * (10 * t - 1), rel=1e-4)
    assert dp.beta(1000 / 10.0, k) == pytest.approx(100 * 100 / 20, rel=0.01)
    with pytest.raises(NegativeTime):
        dp.beta(-1.0, k)


def test_beta_small_time_branch():
    k = dp.OUKernel(10.0, 100.0)
    for t in (1e-9, 5e-6, 9.9e-6, 1.01e-5):
        exact = 100 / (2 * 100) * (10 * t + math.expm1(-10 * t))
        assert dp.beta(t, k) == pytest.approx(exact, rel=1e-7)
        # beta ~ Gamma t^2 / 4 near zero
        assert dp.beta(t, k) == pytest.approx(100 * t * t / 4, rel=1e-3)


@pytest.mark.parametrize("t", [0.01, 0.1, 0.7])
def test_beta_quadrature_cross_check(t):
    k = dp.OUKernel(10.0, 100.0)
    assert dp.beta_quadrature(t, k) == pytest.approx(dp.beta(t, k), rel=1e-8)
    gauss = dp.GenericKernel(lambda u: np.exp(-(u * u)))
    assert gauss.beta(t) == pytest.approx(dp.beta_quadrature(t, gauss), rel=1e-8)


def test_common_channel_examples():
    model = dp.NoiseModel(couplings=(1.0,), **FIG)
    rho = make_state("plus", n_qubits=3)
    res = dp.evolve(rho, [0.05], model)
    c1 = math.exp(-0.5 * (0.5 + math.exp(-0.5) - 1))
    assert res.normalized[0, 1] == pytest.approx(c1, rel=1e-12)
    assert res.normalized[0, 1] == pytest.approx(0.948, abs=5e-4)
    assert res.normalized[0, 3] == pytest.approx(c1**9, rel=1e-12)
    assert res.normalized[0, 0] == pytest.approx(1, rel=1e-14)


def test_diagonal_unchanged(rng):
    rho = np.diag(rng.dirichlet(np.ones(4))).astype(complex)
    for topo in (dp.COMMON, dp.INDEPENDENT):
        model = dp.NoiseModel(couplings=(1.0, 0.5) if topo == dp.INDEPENDENT else (1.0,), topology=topo, **FIG)
        np.testing.assert_allclose(dp.apply_channel(rho, 0.3, model), rho, atol=1e-15)


def test_bell_pair_rate():
    model = dp.NoiseModel(couplings=(1.0, 0.6), topology=dp.INDEPENDENT, **FIG)
    rho = make_state("bell_phi_plus")
    t = 0.2
    out = decompose(dp.apply_independent(rho, t, model))
    expected = math.exp(-(1 + 0.36) * dp.beta(t, model))
    assert abs(out[2][0, 3]) == pytest.approx(0.5 * expected, rel=1e-12)


def test_independent_third_order():
    model = dp.NoiseModel(couplings=(1.0, 0.8, 0.2), topology=dp.INDEPENDENT, **FIG)
    res = dp.evolve(make_state("plus", n_qubits=3), [0.1], model)
    assert res.normalized[0, 3] == pytest.approx(math.exp(-1.68 * 0.5 * math.exp(-1)), rel=1e-12)
    assert res.normalized[0, 3] == pytest.approx(0.7342, abs=1e-4)


def test_common_matches_independent_with_shared_kernel_at_order_extremes():
    # for |+> states with equal couplings the order-N sector decays as N lambda^2 beta
    # independently but N^2 lambda^2 beta commonly
    rho = make_state("plus", n_qubits=3)
    t = 0.2
    b = dp.beta(t, dp.OUKernel(10, 100))
    com = dp.evolve(rho, [t], dp.NoiseModel(**FIG)).normalized[0, 3]
    ind = dp.evolve(rho, [t], dp.NoiseModel(couplings=(1, 1, 1), topology=dp.INDEPENDENT, **FIG)).normalized[0, 3]
    assert com == pytest.approx(math.exp(-9 * b))
    assert ind == pytest.approx(math.exp(-3 * b))


def test_larmor_phase():
    model = dp.NoiseModel(gamma=10.0, Gamma=0.0, omega0=3.0)
    rho = make_state("ghz", n_qubits=2)
    out = dp.apply_common(rho, 0.4, model)
    assert out[0, 3] == pytest.approx(0.5 * np.exp(-1j * 2 * 3.0 * 0.4))


def test_channels_keep_valid_states(rng):
    for topo, lam in ((dp.COMMON, (0.7,)), (dp.INDEPENDENT, (1.0, 0.3, 0.5))):
        model = dp.NoiseModel(couplings=lam, topology=topo, omega0=2.0, **FIG)
        for _ in range(10):
            rho = random_density(3, rng)
            for t in (0.0, 0.05, 0.4, 2.0):
                out = dp.apply_channel(rho, t, model)
                np.testing.assert_allclose(out, out.conj().T, atol=1e-12)
                assert np.trace(out).real == pytest.approx(1, abs=1e-10)
                assert np.linalg.eigvalsh(out).min() >= -1e-9
                np.testing.assert_allclose(np.diag(out), np.diag(rho), atol=1e-12)


def test_monotone_decay_and_hierarchy(rng):
    model = dp.NoiseModel(**FIG)
    times = np.linspace(0, 1, 60)
    for _ in range(5):
        res = dp.evolve(random_density(3, rng), times, model)
        assert np.all(np.diff(res.per_order_l1[:, 1:], axis=0) <= 1e-12)
        norm = res.normalized
        assert np.all(norm[:, 2] <= norm[:, 1] + 1e-12)
        assert np.all(norm[:, 3] <= norm[:, 2] + 1e-12)
        np.testing.assert_allclose(norm[:, 0], 1, atol=1e-12)


def test_fig3b_coincidence():
    model = dp.NoiseModel(couplings=(1.0, 0.8, 0.2), topology=dp.INDEPENDENT, **FIG)
    res = dp.evolve(make_state("plus", n_qubits=3), np.linspace(0, 1, 100), model)
    np.testing.assert_allclose(res.normalized[:, 0], res.normalized[:, 2], atol=1e-9)


def test_model_validation():
    with pytest.raises(ParamOutOfRange):
        dp.NoiseModel(gamma=0.0, Gamma=1.0)
    with pytest.raises(ParamOutOfRange):
        dp.NoiseModel(gamma=1.0, Gamma=-1.0)
    with pytest.raises(ParamOutOfRange):
        dp.NoiseModel(gamma=1.0, Gamma=1.0, topology="shared")
    rho = make_state("plus", n_qubits=2)
    with pytest.raises(TopologyMismatch):
        dp.apply_common(rho, 0.1, dp.NoiseModel(topology=dp.INDEPENDENT, **FIG))
    with pytest.raises(TopologyMismatch):
        dp.apply_independent(rho, 0.1, dp.NoiseModel(**FIG))
    with pytest.raises(ParamOutOfRange):
        dp.apply_common(rho, 0.1, dp.NoiseModel(couplings=(1.0, 0.5), **FIG))
    with pytest.raises(EmptyGrid):
        dp.evolve(rho, [], dp.NoiseModel(**FIG))
    with pytest.raises(EmptyGrid):
        dp.monte_carlo_dephase(rho, [], dp.NoiseModel(**FIG), 10, 1)


# --------------------------------------------------------------------------
# Monte Carlo


def test_mc_without_noise_is_exact():
    model = dp.NoiseModel(gamma=10.0, Gamma=0.0, omega0=5.0)
    rho = make_state("plus", n_qubits=2)
    grid = np.linspace(0, 0.3, 31)
    mc = dp.monte_carlo_dephase(rho, grid, model, n_traj=3, seed=1)
    exact = dp.evolve(rho, grid, model)
    np.testing.assert_allclose(mc.states, exact.states, atol=1e-13)
    np.testing.assert_allclose(mc.stderr[:, 1:], 0, atol=1e-13)


def test_mc_gaussian_identity():
    # [exp(i kappa int B)] -> exp(-kappa^2 beta) with error shrinking like 1/sqrt(n)
    model = dp.NoiseModel(couplings=(0.8,), **FIG)
    rho = make_state("plus", n_qubits=1)
    grid = np.arange(0, 0.2 + 5e-4, 1e-3)
    t = grid[-1]
    target = math.exp(-0.64 * dp.beta(t, model))
    errs = []
    for n in (250, 4000):
        mc = dp.monte_carlo_dephase(rho, grid, model, n, seed=3, report_times=[t])
        z = mc.pattern_mean[0]
        errs.append(abs(abs(z[np.any(mc.patterns != 0, axis=1)][0]) - target))
        assert errs[-1] < 4 * mc.pattern_stderr[0].max() + 1e-12
    assert mc.normalized[0, 1] == pytest.approx(target, abs=4 * mc.stderr[0, 1])


def test_mc_deterministic_across_workers():
    model = dp.NoiseModel(couplings=(1.0, 0.8, 0.2), topology=dp.INDEPENDENT, **FIG)
    rho = make_state("plus", n_qubits=3)
    grid = np.arange(0, 0.1 + 5e-4, 1e-3)
    kw = dict(n_traj=700, seed=11, report_times=grid[::20], chunk_size=64)
    a = dp.monte_carlo_dephase(rho, grid, model, workers=1, **kw)
    b = dp.monte_carlo_dephase(rho, grid, model, workers=4, **kw)
    assert a.normalized.tobytes() == b.normalized.tobytes()
    assert a.stderr.tobytes() == b.stderr.tobytes()
    c = dp.monte_carlo_dephase(rho, grid, model, workers=1, **{**kw, "seed": 12})
    assert not np.array_equal(a.normalized, c.normalized)


def test_mc_thread_env(monkeypatch):
    monkeypatch.setenv(dp.THREADS_ENV, "3")
    assert dp.default_workers() == 3
    monkeypatch.setenv(dp.THREADS_ENV, "nonsense")
    assert dp.default_workers() == 1


def test_mc_independent_per_coefficient_factors():
    model = dp.NoiseModel(couplings=(1.0, 0.8, 0.2), topology=dp.INDEPENDENT, **FIG)
    rho = make_state("plus", n_qubits=3)
    grid = np.arange(0, 0.3 + 5e-4, 1e-3)
    rep = [0.1, 0.3]
    mc = dp.monte_carlo_dephase(rho, grid, model, 4000, seed=5, report_times=rep)
    lam2 = np.array([1.0, 0.64, 0.04])
    for i, t in enumerate(rep):
        b = dp.beta(t, model)
        for w, z, se in zip(mc.patterns, mc.pattern_mean[i], mc.pattern_stderr[i]):
            expected = math.exp(-np.abs(w) @ lam2 * b)
            assert abs(z.real - expected) <= 4 * se[0] + 1e-12
            assert abs(z.imag) <= 4 * se[1] + 1e-12
