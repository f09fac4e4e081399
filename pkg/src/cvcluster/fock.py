"""Brute-force number-state oracle for the cavity + combined-mode model.

Integrates the two-mode master equation

    drho/dt = -i [beta (a^dag d + r a^dag d^dag) + h.c., rho]
              + 2 kappa (a rho a^dag - 1/2 {a^dag a, rho})

in a truncated Fock basis with a fixed-step fourth-order scheme and
extracts quadrature moments from the density matrix.  Entirely independent
of the Gaussian solver (no shared dynamics code), which makes it a
cross-check: for moderate r and adequate cutoffs every covariance entry
must match the Gaussian evolution.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .errors import CutoffTooSmallError, InvalidParameterError, UnphysicalStateError

#: Steps between leakage-guard / hermiticity enforcement passes.
_GUARD_EVERY = 25


@dataclass(frozen=True)
class FockConfig:
    """Truncated-basis integration settings.

    ``cutoff_a`` / ``cutoff_d`` are the largest retained photon numbers
    (basis dimension cutoff + 1).  ``leakage_guard`` bounds the population
    allowed on the top number states before the run aborts.
    """

    beta: float
    r: float
    kappa: float
    t_final: float
    cutoff_a: int = 20
    cutoff_d: int = 20
    dt: float = 0.01
    leakage_guard: float = 1e-6

    def __post_init__(self):
        if self.cutoff_a < 4 or self.cutoff_d < 4:
            raise InvalidParameterError("cutoffs must be at least 4")
        if self.dt <= 0:
            raise InvalidParameterError(f"dt must be positive, got {self.dt}")
        if not 0.0 < self.leakage_guard < 1.0:
            raise InvalidParameterError("leakage_guard must lie in (0, 1)")
        if not 0.0 <= self.r < 1.0:
            raise InvalidParameterError(f"r must lie in [0, 1), got {self.r}")
        if self.beta < 0 or self.kappa < 0:
            raise InvalidParameterError("beta and kappa must be nonnegative")
        if self.t_final < 0:
            raise InvalidParameterError("t_final must be nonnegative")


def destroy(dim: int) -> sp.csr_matrix:
    """Annihilation operator on a dim-dimensional number basis."""
    return sp.diags(np.sqrt(np.arange(1, dim)), 1, format="csr").astype(complex)


def quadrature_operators(dims) -> list[sp.csr_matrix]:
    """Sparse (q_1, p_1, q_2, p_2, ...) operators on the tensor space."""
    ops = []
    eyes = [sp.identity(d, format="csr", dtype=complex) for d in dims]
    for mode, dim in enumerate(dims):
        a_local = destroy(dim)
        factors_a = [a_local if m == mode else eyes[m] for m in range(len(dims))]
        a = factors_a[0]
        for f in factors_a[1:]:
            a = sp.kron(a, f, format="csr")
        ops.append(((a + a.conj().T) / np.sqrt(2)).tocsr())
        ops.append((-1j * (a - a.conj().T) / np.sqrt(2)).tocsr())
    return ops


def covariance_from_density(rho: np.ndarray, dims) -> np.ndarray:
    """Quadrature covariance matrix of a density matrix over the given modes.

    Symmetrised second moments, same vacuum-variance-1/2 convention as the
    Gaussian layer.  Validates trace, Hermiticity and positivity first.
    """
    rho = np.asarray(rho, dtype=complex)
    dims = tuple(int(d) for d in dims)
    total = int(np.prod(dims))
    if rho.shape != (total, total):
        raise InvalidParameterError(f"rho must be {total} x {total} for dims {dims}")
    if abs(np.trace(rho) - 1.0) > 1e-8:
        raise UnphysicalStateError(f"trace(rho) = {np.trace(rho)!r}, expected 1")
    if np.abs(rho - rho.conj().T).max() > 1e-8:
        raise UnphysicalStateError("rho is not Hermitian")
    if np.linalg.eigvalsh(0.5 * (rho + rho.conj().T)).min() < -1e-9:
        raise UnphysicalStateError("rho has a significantly negative eigenvalue")
    quads = [x.toarray() for x in quadrature_operators(dims)]
    means = np.array([np.trace(rho @ x).real for x in quads])
    n2 = len(quads)
    cov = np.empty((n2, n2))
    for i in range(n2):
        xi_rho = quads[i] @ rho
        for j in range(i, n2):
            # Re <x_j x_i> is the symmetrised moment for Hermitian operators
            sym = np.trace(quads[j] @ xi_rho).real
            cov[i, j] = cov[j, i] = sym - means[i] * means[j]
    return cov


def _liouvillian(config: FockConfig) -> tuple[sp.csr_matrix, int]:
    """Vectorised generator acting on row-major vec(rho)."""
    da, dd = config.cutoff_a + 1, config.cutoff_d + 1
    a = sp.kron(destroy(da), sp.identity(dd, format="csr", dtype=complex), format="csr")
    d = sp.kron(sp.identity(da, format="csr", dtype=complex), destroy(dd), format="csr")
    h = config.beta * (a.conj().T @ d + config.r * (a.conj().T @ d.conj().T))
    h = (h + h.conj().T).tocsr()
    number_a = (a.conj().T @ a).tocsr()
    gamma = 2.0 * config.kappa
    dim = da * dd
    eye = sp.identity(dim, format="csr", dtype=complex)
    # vec(A rho B) = (A kron B^T) vec(rho) in row-major vectorisation
    lindblad = (
        -1j * (sp.kron(h, eye) - sp.kron(eye, h.T))
        + gamma * sp.kron(a, a.conj())
        - 0.5 * gamma * (sp.kron(number_a, eye) + sp.kron(eye, number_a.T))
    )
    return lindblad.tocsr(), dim


def _top_level_population(rho: np.ndarray, da: int, dd: int) -> float:
    pops = np.diag(rho).real.reshape(da, dd)
    return float(pops[-1, :].sum() + pops[:, -1].sum() - pops[-1, -1])


@dataclass(frozen=True)
class FockResult:
    """Density matrix and Gaussian-layer-compatible moments."""

    rho: np.ndarray
    mean: np.ndarray
    covariance: np.ndarray
    trace_error: float
    leakage: float
    steps: int


def integrate_two_mode(config: FockConfig) -> FockResult:
    """Evolve the two-mode vacuum under the damped coupled-mode dynamics.

    Classic fixed-step RK4 on the vectorised density matrix; Hermiticity
    is re-enforced and the leakage guard checked every few steps.  Aborts
    with CutoffTooSmallError when the top number states accumulate more
    population than ``leakage_guard``.
    """
    lindblad, dim = _liouvillian(config)
    da, dd = config.cutoff_a + 1, config.cutoff_d + 1
    rho = np.zeros((dim, dim), dtype=complex)
    rho[0, 0] = 1.0
    vec = rho.reshape(-1)
    n_steps = int(round(config.t_final / config.dt))
    dt = config.dt
    leakage = 0.0
    for step in range(1, n_steps + 1):
        k1 = lindblad @ vec
        k2 = lindblad @ (vec + 0.5 * dt * k1)
        k3 = lindblad @ (vec + 0.5 * dt * k2)
        k4 = lindblad @ (vec + dt * k3)
        vec = vec + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if step % _GUARD_EVERY == 0 or step == n_steps:
            rho = vec.reshape(dim, dim)
            rho = 0.5 * (rho + rho.conj().T)
            leakage = _top_level_population(rho, da, dd)
            if leakage > config.leakage_guard:
                raise CutoffTooSmallError(
                    f"population reached the truncation boundary at t = {step * dt:.4g}; "
                    "increase cutoff_a / cutoff_d",
                    leakage,
                )
            vec = rho.reshape(-1)
    rho = vec.reshape(dim, dim)
    rho = 0.5 * (rho + rho.conj().T)
    trace_error = abs(np.trace(rho).real - 1.0)
    xs = quadrature_operators((da, dd))
    mean = np.array([np.trace(rho @ x.toarray()).real for x in xs])
    cov = covariance_from_density(rho, (da, dd))
    return FockResult(
        rho=rho,
        mean=mean,
        covariance=cov,
        trace_error=trace_error,
        leakage=leakage,
        steps=n_steps,
    )
