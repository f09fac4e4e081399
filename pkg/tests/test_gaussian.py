"""Tests for the Gaussian state / drift-diffusion layer."""

import numpy as np
import pytest
from numpy.testing import assert_allclose
from scipy.integrate import solve_ivp

from cvcluster import (
    DriftDiffusion,
    GaussianState,
    InvalidParameterError,
    InvalidTransformError,
    NonHurwitzError,
    QuadraticHamiltonian,
    UnphysicalStateError,
    apply_mode_transform,
    builtin_transform,
    drift_diffusion,
    evolve,
    purity,
    steady_state,
    symplectic_eigenvalues,
    symplectic_form,
    two_mode_drift_diffusion,
)

BETA_GRID = [0.3, 0.6, 1.0, 2.5, 4.0]
R_GRID = [0.0, 0.2, 0.5, 0.8, 0.95]


def random_generator(rng, n_modes=5, max_damping=2.0):
    """Random quadratic Hamiltonian with random per-mode loss."""
    f = rng.normal(size=(n_modes, n_modes)) + 1j * rng.normal(size=(n_modes, n_modes))
    f = 0.5 * (f + f.conj().T)
    g = rng.normal(size=(n_modes, n_modes)) + 1j * rng.normal(size=(n_modes, n_modes))
    g = 0.5 * (g + g.T)
    damping = rng.uniform(0.0, max_damping, size=n_modes)
    return drift_diffusion(QuadraticHamiltonian(f, g), damping)


# ---------------------------------------------------------------- structure


def test_symplectic_form_interleaved():
    omega = symplectic_form(2)
    expected = np.array(
        [[0, 1, 0, 0], [-1, 0, 0, 0], [0, 0, 0, 1], [0, 0, -1, 0]], dtype=float
    )
    assert_allclose(omega, expected)


def test_quadratic_hamiltonian_validation():
    with pytest.raises(InvalidParameterError):
        QuadraticHamiltonian(np.array([[0, 1j], [1j, 0]]), np.zeros((2, 2)))  # not Hermitian
    with pytest.raises(InvalidParameterError):
        QuadraticHamiltonian(np.zeros((2, 2)), np.array([[0, 1], [-1, 0]]))  # not symmetric


def test_gaussian_state_symmetrizes_and_validates():
    cov = 0.5 * np.eye(2)
    cov[0, 1] = 1e-13  # tiny asymmetry is symmetrised away
    state = GaussianState(("m",), np.zeros(2), cov)
    assert_allclose(state.cov, state.cov.T)
    with pytest.raises(UnphysicalStateError):
        GaussianState(("m",), np.zeros(2), 0.4 * np.eye(2))


def test_vacuum_state():
    vac = GaussianState.vacuum(("a", "b"))
    assert_allclose(vac.cov, 0.5 * np.eye(4))
    assert_allclose(vac.mean, 0.0)
    assert vac.mode_labels == ("a", "b")


def test_marginal_picks_blocks():
    rng = np.random.default_rng(7)
    dd = random_generator(rng, 3)
    state = evolve(GaussianState.vacuum(("x", "y", "z")), dd, 0.7)
    sub = state.marginal(("z", "x"))
    assert sub.mode_labels == ("z", "x")
    assert_allclose(sub.cov[0:2, 0:2], state.cov[4:6, 4:6])
    assert_allclose(sub.cov[0:2, 2:4], state.cov[4:6, 0:2])


# ----------------------------------------------------------- drift_diffusion


def test_drift_harmonic_rotation():
    h = QuadraticHamiltonian(np.array([[0.7]]), np.zeros((1, 1)))
    dd = drift_diffusion(h, [0.0])
    assert_allclose(dd.A, np.array([[0.0, 0.7], [-0.7, 0.0]]), atol=1e-15)
    assert_allclose(dd.D, 0.0, atol=1e-15)


def test_drift_pure_decay():
    h = QuadraticHamiltonian(np.zeros((1, 1)), np.zeros((1, 1)))
    dd = drift_diffusion(h, [1.3])
    assert_allclose(dd.A, -0.65 * np.eye(2), atol=1e-15)
    assert_allclose(dd.D, 0.65 * np.eye(2), atol=1e-15)
    assert_allclose(steady_state(dd), 0.5 * np.eye(2), atol=1e-12)


def test_drift_rejects_negative_damping():
    h = QuadraticHamiltonian(np.zeros((1, 1)), np.zeros((1, 1)))
    with pytest.raises(InvalidParameterError):
        drift_diffusion(h, [-0.1])


@pytest.mark.parametrize("beta", BETA_GRID)
@pytest.mark.parametrize("r", R_GRID)
def test_two_mode_eigenvalue_law(beta, r):
    """Drift spectrum of the damped cavity + combined mode pair:
    lambda_+- = -kappa/2 +- sqrt((kappa/2)^2 - beta^2 (1 - r^2)), each twice."""
    kappa = 1.0
    dd = two_mode_drift_diffusion(beta, r, kappa)
    eigvals = np.linalg.eigvals(dd.A)
    disc = (kappa / 2) ** 2 - beta**2 * (1 - r**2)
    for lam in (-kappa / 2 + np.sqrt(complex(disc)), -kappa / 2 - np.sqrt(complex(disc))):
        matches = np.sum(np.abs(eigvals - lam) < 1e-10)
        assert matches >= 2, f"eigenvalue {lam} not doubly present in {eigvals}"


# -------------------------------------------------------------------- evolve


def test_evolve_vacuum_is_fixed_point_of_decay():
    dd = drift_diffusion(QuadraticHamiltonian(np.zeros((1, 1)), np.zeros((1, 1))), [0.8])
    vac = GaussianState.vacuum(("a",))
    out = evolve(vac, dd, 3.21)
    assert_allclose(out.cov, vac.cov, atol=1e-14)
    assert_allclose(out.mean, 0.0, atol=1e-14)


def test_evolve_relaxation_to_vacuum():
    dd = drift_diffusion(QuadraticHamiltonian(np.zeros((1, 1)), np.zeros((1, 1))), [1.0])
    hot = GaussianState(("a",), np.zeros(2), 1.5 * np.eye(2))
    out = evolve(hot, dd, 60.0)
    assert_allclose(out.cov, 0.5 * np.eye(2), atol=1e-12)


def test_evolve_matches_lyapunov_at_long_time():
    dd = two_mode_drift_diffusion(2.5, 0.5, 1.0)
    out = evolve(GaussianState.vacuum(("a", "d")), dd, 12.0)
    assert np.abs(out.cov - steady_state(dd)).max() < 1e-3


def test_evolve_rejects_negative_time():
    dd = two_mode_drift_diffusion(1.0, 0.2, 1.0)
    with pytest.raises(InvalidParameterError):
        evolve(GaussianState.vacuum(("a", "d")), dd, -0.1)


def test_evolve_matches_ode_oracle_on_ten_by_ten():
    """Closed-form propagation against an independent adaptive ODE solve."""
    rng = np.random.default_rng(42)
    for _ in range(3):
        dd = random_generator(rng, 5)
        state = GaussianState.vacuum(tuple("abcde"))
        t_final = 0.9

        def rhs(_, y):
            sigma = y[:100].reshape(10, 10)
            dsig = dd.A @ sigma + sigma @ dd.A.T + dd.D
            dmean = dd.A @ y[100:]
            return np.concatenate([dsig.reshape(-1), dmean])

        mean0 = rng.normal(size=10) * 0.3
        state = GaussianState(state.mode_labels, mean0, state.cov)
        y0 = np.concatenate([state.cov.reshape(-1), mean0])
        sol = solve_ivp(rhs, (0.0, t_final), y0, rtol=1e-12, atol=1e-13, dense_output=False)
        ref_cov = sol.y[:100, -1].reshape(10, 10)
        ref_mean = sol.y[100:, -1]
        out = evolve(state, dd, t_final)
        assert np.abs(out.cov - ref_cov).max() < 1e-9
        assert np.abs(out.mean - ref_mean).max() < 1e-9


def test_evolve_semigroup_property():
    rng = np.random.default_rng(3)
    dd = random_generator(rng, 3)
    state = GaussianState.vacuum(("a", "b", "c"))
    one = evolve(evolve(state, dd, 0.4), dd, 0.9)
    two = evolve(state, dd, 1.3)
    assert np.abs(one.cov - two.cov).max() < 1e-9


def test_evolve_preserves_uncertainty_at_all_sampled_times():
    rng = np.random.default_rng(11)
    for _ in range(4):
        dd = random_generator(rng, 3)
        state = GaussianState.vacuum(("a", "b", "c"))
        for t in np.linspace(0.05, 2.0, 9):
            out = evolve(state, dd, float(t))
            assert symplectic_eigenvalues(out.cov).min() >= 0.5 - 1e-9


def test_evolve_converges_to_steady_state_at_analytic_rate():
    dd = two_mode_drift_diffusion(2.5, 0.5, 1.0)
    target = steady_state(dd)
    max_re = np.linalg.eigvals(dd.A).real.max()
    times = np.array([4.0, 8.0, 12.0])
    gaps = np.array(
        [np.abs(evolve(GaussianState.vacuum(("a", "d")), dd, t).cov - target).max() for t in times]
    )
    assert gaps[0] > gaps[1] > gaps[2]
    # covariance gap decays like e^{2 max Re(lambda) T}; allow 20% rate slack
    slope = np.polyfit(times, np.log(gaps), 1)[0]
    assert slope <= 0.8 * 2 * max_re


# -------------------------------------------------------------- steady_state


def test_steady_state_squeezed_vacuum_direction():
    """The combined mode ends in squeezed vacuum with the q quadrature
    carrying e^{-2 xi} / 2, the cavity in vacuum, no correlations."""
    r = 0.5
    xi = np.arctanh(r)
    sigma = steady_state(two_mode_drift_diffusion(1.7, r, 1.0))
    expected = np.diag([0.5, 0.5, np.exp(-2 * xi) / 2, np.exp(2 * xi) / 2])
    assert_allclose(sigma, expected, atol=1e-12)


def test_steady_state_no_squeezing_is_vacuum():
    sigma = steady_state(two_mode_drift_diffusion(1.0, 0.0, 1.0))
    assert_allclose(sigma, 0.5 * np.eye(4), atol=1e-12)


def test_steady_state_rejects_non_hurwitz():
    h = QuadraticHamiltonian(np.zeros((2, 2)), np.zeros((2, 2)))
    dd = drift_diffusion(h, [1.0, 0.0])  # second mode undamped and uncoupled
    with pytest.raises(NonHurwitzError) as err:
        steady_state(dd)
    assert abs(err.value.eigenvalue) < 1e-12


def test_steady_state_residual_is_tiny():
    dd = two_mode_drift_diffusion(3.0, 0.8, 1.0)
    sigma = steady_state(dd)
    residual = np.linalg.norm(dd.A @ sigma + sigma @ dd.A.T + dd.D)
    assert residual <= 1e-10 * (
        np.linalg.norm(dd.A) * np.linalg.norm(sigma) + np.linalg.norm(dd.D)
    )


# ------------------------------------------------------- mode transformations


def test_apply_identity_transform():
    state = GaussianState.vacuum(("a", "b"))
    out = apply_mode_transform(state, np.eye(2, dtype=complex))
    assert_allclose(out.cov, state.cov, atol=1e-15)


def test_vacuum_is_phase_invariant():
    state = GaussianState.vacuum(("a",))
    out = apply_mode_transform(state, np.array([[np.exp(0.73j)]]))
    assert_allclose(out.cov, state.cov, atol=1e-14)


def test_transform_round_trip():
    u = builtin_transform("linear").matrix
    rng = np.random.default_rng(5)
    dd = random_generator(rng, 4)
    state = evolve(GaussianState.vacuum(tuple("wxyz")), dd, 0.6)
    back = apply_mode_transform(apply_mode_transform(state, u), u.conj().T)
    assert np.abs(back.cov - state.cov).max() < 1e-12
    assert np.abs(back.mean - state.mean).max() < 1e-12


def test_transform_preserves_symplectic_spectrum_and_purity():
    from scipy.stats import unitary_group

    rng = np.random.default_rng(17)
    dd = random_generator(rng, 4)
    state = evolve(GaussianState.vacuum(tuple("wxyz")), dd, 0.8)
    for seed in range(4):
        u = unitary_group.rvs(4, random_state=seed)
        out = apply_mode_transform(state, u)
        assert_allclose(
            symplectic_eigenvalues(out.cov), symplectic_eigenvalues(state.cov), atol=1e-10
        )
        assert abs(purity(out.cov) - purity(state.cov)) < 1e-10


def test_non_unitary_transform_rejected_with_deviation():
    state = GaussianState.vacuum(("a", "b"))
    bad = np.array([[1.0, 0.1], [0.0, 1.0]], dtype=complex)
    with pytest.raises(InvalidTransformError) as err:
        apply_mode_transform(state, bad)
    assert err.value.deviation > 0.1


# ------------------------------------------- symplectic eigenvalues / purity


def test_vacuum_spectrum_and_purity():
    cov = 0.5 * np.eye(6)
    assert_allclose(symplectic_eigenvalues(cov), [0.5, 0.5, 0.5], atol=1e-14)
    assert abs(purity(cov) - 1.0) < 1e-14


def test_squeezed_vacuum_is_pure():
    xi = 0.8
    cov = np.diag([np.exp(-2 * xi) / 2, np.exp(2 * xi) / 2])
    assert_allclose(symplectic_eigenvalues(cov), [0.5], atol=1e-12)
    assert abs(purity(cov) - 1.0) < 1e-12


def test_thermal_state_purity_half():
    cov = np.eye(2)  # one thermal mode, nu = 1
    assert_allclose(symplectic_eigenvalues(cov), [1.0], atol=1e-14)
    assert abs(purity(cov) - 0.5) < 1e-14  # 1 / sqrt(det(2 sigma)) = 1/2


def test_unphysical_covariance_diagnosed():
    with pytest.raises(UnphysicalStateError):
        symplectic_eigenvalues(0.4 * np.eye(2))
    with pytest.raises(UnphysicalStateError):
        purity(0.4 * np.eye(2))


def test_drift_diffusion_validation():
    with pytest.raises(InvalidParameterError):
        DriftDiffusion(np.zeros((3, 3)), np.zeros((3, 3)))  # odd dimension
    with pytest.raises(InvalidParameterError):
        DriftDiffusion(np.zeros((2, 2)), -np.eye(2))  # not psd
