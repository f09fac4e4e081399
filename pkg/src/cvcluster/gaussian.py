"""Gaussian states of bosonic modes and their dissipative linear dynamics.

States are parametrised by the mean vector and covariance matrix of the
quadratures q_j = (a_j + a_j^dag)/sqrt(2), p_j = -i(a_j - a_j^dag)/sqrt(2),
stored in the interleaved order (q_1, p_1, ..., q_n, p_n).  With this
normalisation the vacuum has mean zero and covariance I/2, so every
quadrature variance is 1/2.

Quadratic Hamiltonians H = sum_ij F_ij a_i^dag a_j
                         + 1/2 sum_ij (G_ij a_i^dag a_j^dag + h.c.)
together with single-mode loss channels gamma_i * D[a_i] generate linear
moment equations

    d<x>/dt   = A <x>
    d sigma/dt = A sigma + sigma A^T + D

and this module builds (A, D), integrates them exactly through a matrix
exponential, and solves for the unique steady state when A is Hurwitz.

Every value is immutable after construction (frozen dataclasses over
read-only arrays) and every operation is a pure function, so states and
generators are safe to share between threads.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import expm, solve_continuous_lyapunov

from .errors import (
    InvalidParameterError,
    InvalidTransformError,
    NonHurwitzError,
    SimulationError,
    UnphysicalStateError,
)

#: Vacuum variance of a single quadrature.
VACUUM_VARIANCE = 0.5

#: Tolerance for Hermiticity / symmetry checks on Hamiltonian matrices.
MATRIX_SYMMETRY_TOL = 1e-12

#: Symplectic eigenvalues may undershoot 1/2 by at most this much.
UNCERTAINTY_TOL = 1e-9

#: A is Hurwitz when every eigenvalue real part lies below this threshold.
HURWITZ_THRESHOLD = -1e-12


def symplectic_form(n_modes: int) -> np.ndarray:
    """Symplectic form Omega with [x_k, x_l] = i Omega_kl, interleaved order."""
    omega = np.zeros((2 * n_modes, 2 * n_modes))
    for m in range(n_modes):
        omega[2 * m, 2 * m + 1] = 1.0
        omega[2 * m + 1, 2 * m] = -1.0
    return omega


def _readonly(a: np.ndarray) -> np.ndarray:
    a = np.array(a, copy=True)
    a.flags.writeable = False
    return a


@dataclass(frozen=True, eq=False)
class QuadraticHamiltonian:
    """Quadratic bosonic Hamiltonian in the (F, G) parametrisation.

    ``F`` (Hermitian) multiplies a_i^dag a_j and describes beam-splitter
    couplings and free rotations; ``G`` (symmetric) multiplies
    1/2 a_i^dag a_j^dag + h.c. and describes squeezing-type couplings.
    Both carry units of rate.
    """

    F: np.ndarray
    G: np.ndarray

    def __post_init__(self):
        F = np.asarray(self.F, dtype=complex)
        G = np.asarray(self.G, dtype=complex)
        if F.ndim != 2 or F.shape[0] != F.shape[1] or F.shape != G.shape:
            raise InvalidParameterError(
                f"F and G must be square matrices of equal shape, got {F.shape} and {G.shape}"
            )
        herm_dev = np.abs(F - F.conj().T).max(initial=0.0)
        if herm_dev > MATRIX_SYMMETRY_TOL:
            raise InvalidParameterError(f"F is not Hermitian (deviation {herm_dev:.3e})")
        sym_dev = np.abs(G - G.T).max(initial=0.0)
        if sym_dev > MATRIX_SYMMETRY_TOL:
            raise InvalidParameterError(f"G is not symmetric (deviation {sym_dev:.3e})")
        object.__setattr__(self, "F", _readonly(F))
        object.__setattr__(self, "G", _readonly(G))

    @property
    def n_modes(self) -> int:
        return self.F.shape[0]

    def real_form(self) -> np.ndarray:
        """Return the symmetric matrix H_R with H = 1/2 x^T H_R x.

        Writing a = (q + ip)/sqrt(2) and collecting terms gives, in
        q/p block form,

            H_qq = Re F + Re G      H_qp = -Im F + Im G
            H_pq = +Im F + Im G     H_pp = Re F - Re G

        which is then interleaved to match the quadrature ordering.
        """
        n = self.n_modes
        h = np.zeros((2 * n, 2 * n))
        h[0::2, 0::2] = self.F.real + self.G.real
        h[1::2, 1::2] = self.F.real - self.G.real
        h[0::2, 1::2] = -self.F.imag + self.G.imag
        h[1::2, 0::2] = self.F.imag + self.G.imag
        return h


@dataclass(frozen=True, eq=False)
class DriftDiffusion:
    """Moment-space generator: drift matrix A and diffusion matrix D."""

    A: np.ndarray
    D: np.ndarray

    def __post_init__(self):
        A = np.asarray(self.A, dtype=float)
        D = np.asarray(self.D, dtype=float)
        if A.shape != D.shape or A.ndim != 2 or A.shape[0] != A.shape[1] or A.shape[0] % 2:
            raise InvalidParameterError(f"A, D must be equal square 2n x 2n, got {A.shape}, {D.shape}")
        if np.abs(D - D.T).max(initial=0.0) > MATRIX_SYMMETRY_TOL:
            raise InvalidParameterError("diffusion matrix must be symmetric")
        if np.linalg.eigvalsh(D).min() < -1e-12:
            raise InvalidParameterError("diffusion matrix must be positive semidefinite")
        object.__setattr__(self, "A", _readonly(A))
        object.__setattr__(self, "D", _readonly(0.5 * (D + D.T)))

    @property
    def n_modes(self) -> int:
        return self.A.shape[0] // 2


@dataclass(frozen=True, eq=False)
class GaussianState:
    """Gaussian state given by quadrature means and covariances.

    The covariance matrix is symmetrised on construction and checked
    against the uncertainty relation (all symplectic eigenvalues at
    least 1/2 up to UNCERTAINTY_TOL).
    """

    mode_labels: tuple[str, ...]
    mean: np.ndarray
    cov: np.ndarray

    def __post_init__(self):
        labels = tuple(self.mode_labels)
        mean = np.asarray(self.mean, dtype=float)
        cov = np.asarray(self.cov, dtype=float)
        n = len(labels)
        if mean.shape != (2 * n,) or cov.shape != (2 * n, 2 * n):
            raise InvalidParameterError(
                f"{n} modes need mean (2n,) and cov (2n, 2n); got {mean.shape}, {cov.shape}"
            )
        if not (np.isfinite(mean).all() and np.isfinite(cov).all()):
            raise InvalidParameterError("mean and cov must be finite")
        cov = 0.5 * (cov + cov.T)
        nu_min = _symplectic_spectrum(cov).min()
        if nu_min < VACUUM_VARIANCE - UNCERTAINTY_TOL:
            raise UnphysicalStateError(
                f"covariance violates the uncertainty relation (min symplectic eigenvalue {nu_min!r})"
            )
        object.__setattr__(self, "mode_labels", labels)
        object.__setattr__(self, "mean", _readonly(mean))
        object.__setattr__(self, "cov", _readonly(cov))

    @classmethod
    def vacuum(cls, mode_labels) -> "GaussianState":
        labels = tuple(mode_labels)
        n = len(labels)
        return cls(labels, np.zeros(2 * n), VACUUM_VARIANCE * np.eye(2 * n))

    @property
    def n_modes(self) -> int:
        return len(self.mode_labels)

    def mode_index(self, label: str) -> int:
        return self.mode_labels.index(label)

    def marginal(self, labels) -> "GaussianState":
        """Reduced state over the given mode labels (Gaussian partial trace)."""
        keep = [self.mode_index(lbl) for lbl in labels]
        idx = np.array([[2 * m, 2 * m + 1] for m in keep]).reshape(-1)
        return GaussianState(
            tuple(self.mode_labels[m] for m in keep),
            self.mean[idx],
            self.cov[np.ix_(idx, idx)],
        )


def drift_diffusion(h: QuadraticHamiltonian, damping) -> DriftDiffusion:
    """Moment-space generator for Hamiltonian ``h`` plus single-mode loss.

    ``damping[i]`` is the Lindblad rate gamma_i of the dissipator
    gamma_i * D[a_i] (so the field amplitude of a lone damped mode
    relaxes at gamma_i / 2 and its covariance settles to I/2):

        A = Omega H_R - 1/2 diag(gamma, each entry twice)
        D =            1/2 diag(gamma, each entry twice)
    """
    rates = np.asarray(damping, dtype=float)
    if rates.shape != (h.n_modes,):
        raise InvalidParameterError(f"damping must have length {h.n_modes}, got {rates.shape}")
    if (rates < 0).any():
        raise InvalidParameterError("damping rates must be nonnegative")
    half = 0.5 * np.repeat(rates, 2)
    a = symplectic_form(h.n_modes) @ h.real_form() - np.diag(half)
    return DriftDiffusion(a, np.diag(half))


def evolve(state: GaussianState, dd: DriftDiffusion, t: float) -> GaussianState:
    """Propagate a Gaussian state for time ``t`` under ``dd``.

    Uses the closed-form solution

        mean(t)  = e^{At} mean(0)
        sigma(t) = e^{At} sigma(0) e^{A^T t} + int_0^t e^{As} D e^{A^T s} ds

    with the integral evaluated through the block matrix exponential of
    [[A, D], [0, -A^T]], exact up to the accuracy of ``expm``.
    """
    if t < 0:
        raise InvalidParameterError(f"evolution time must be nonnegative, got {t}")
    if dd.n_modes != state.n_modes:
        raise InvalidParameterError(
            f"generator acts on {dd.n_modes} modes but state has {state.n_modes}"
        )
    if t == 0:
        return state
    n2 = 2 * state.n_modes
    block = np.zeros((2 * n2, 2 * n2))
    block[:n2, :n2] = dd.A
    block[:n2, n2:] = dd.D
    block[n2:, n2:] = -dd.A.T
    eb = expm(block * t)
    prop = eb[:n2, :n2]
    accumulated = eb[:n2, n2:] @ prop.T
    cov = prop @ state.cov @ prop.T + accumulated
    return GaussianState(state.mode_labels, prop @ state.mean, cov)


def steady_state(dd: DriftDiffusion) -> np.ndarray:
    """Unique covariance solving A sigma + sigma A^T + D = 0.

    Raises NonHurwitzError when A has spectrum outside the open left
    half-plane, reporting the offending eigenvalue.
    """
    eigvals = np.linalg.eigvals(dd.A)
    worst = eigvals[np.argmax(eigvals.real)]
    if worst.real >= HURWITZ_THRESHOLD:
        raise NonHurwitzError("drift matrix is not Hurwitz, no steady state", worst)
    sigma = solve_continuous_lyapunov(dd.A, -dd.D)
    sigma = 0.5 * (sigma + sigma.T)
    residual = np.linalg.norm(dd.A @ sigma + sigma @ dd.A.T + dd.D)
    bound = 1e-10 * (np.linalg.norm(dd.A) * np.linalg.norm(sigma) + np.linalg.norm(dd.D))
    if residual > bound:
        raise SimulationError(
            f"Lyapunov solve residual {residual:.3e} exceeds bound {bound:.3e}"
        )
    return sigma


def symplectic_from_unitary(u: np.ndarray, tol: float = 1e-10) -> np.ndarray:
    """Orthogonal symplectic matrix induced on quadratures by a mode unitary.

    For d_j = sum_k U_jk c_k the quadratures mix as
    q'_j = sum_k (Re U_jk q_k - Im U_jk p_k),
    p'_j = sum_k (Im U_jk q_k + Re U_jk p_k).
    """
    u = np.asarray(u, dtype=complex)
    n = u.shape[0]
    if u.shape != (n, n):
        raise InvalidParameterError(f"transform must be square, got {u.shape}")
    deviation = float(np.linalg.norm(u @ u.conj().T - np.eye(n)))
    if deviation > tol:
        raise InvalidTransformError("mode transform is not unitary", deviation)
    s = np.zeros((2 * n, 2 * n))
    s[0::2, 0::2] = u.real
    s[0::2, 1::2] = -u.imag
    s[1::2, 0::2] = u.imag
    s[1::2, 1::2] = u.real
    return s


def apply_mode_transform(state: GaussianState, u: np.ndarray, new_labels=None) -> GaussianState:
    """Re-express ``state`` in the mode basis d = U c.

    The induced quadrature map is symplectic and orthogonal, so
    symplectic eigenvalues (hence purity) are preserved exactly.
    """
    if u.shape[0] != state.n_modes:
        raise InvalidParameterError(
            f"transform is {u.shape[0]}-mode but state has {state.n_modes} modes"
        )
    s = symplectic_from_unitary(u)
    labels = tuple(new_labels) if new_labels is not None else state.mode_labels
    return GaussianState(labels, s @ state.mean, s @ state.cov @ s.T)


def _symplectic_spectrum(cov: np.ndarray) -> np.ndarray:
    """Raw symplectic eigenvalues (pair-averaged, ascending), no validation."""
    n = cov.shape[0] // 2
    mods = np.sort(np.abs(np.linalg.eigvals(symplectic_form(n) @ cov)))
    return 0.5 * (mods[0::2] + mods[1::2])


def symplectic_eigenvalues(cov: np.ndarray) -> np.ndarray:
    """Symplectic eigenvalues of a physical covariance matrix, ascending.

    These are the moduli of the spectrum of i Omega sigma, deduplicated;
    all equal to 1/2 exactly for pure states.
    """
    cov = np.asarray(cov, dtype=float)
    if not np.isfinite(cov).all():
        raise InvalidParameterError("covariance must be finite")
    nu = _symplectic_spectrum(0.5 * (cov + cov.T))
    if nu.min() < VACUUM_VARIANCE - UNCERTAINTY_TOL:
        raise UnphysicalStateError(
            f"covariance violates the uncertainty relation (min symplectic eigenvalue {nu.min()!r})"
        )
    return nu


def purity(cov: np.ndarray) -> float:
    """Purity of the Gaussian state: 1 / prod(2 nu_i) = 1 / sqrt(det(2 sigma))."""
    nu = symplectic_eigenvalues(cov)
    return float(1.0 / np.prod(2.0 * nu))
