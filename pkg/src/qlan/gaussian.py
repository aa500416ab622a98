"""Truncated Fock-space limit model: thermal and displaced thermal states,
Weyl operators, and the classical-quantum Gaussian product state.

One oscillator mode per eigenvalue pair (j, k), j < k, ordered like
tableaux.pairs(d), so mode occupation numbers and block basis labels share
the same indexing.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import tableaux as tb
from .models import Spectrum, LocalParams, covariance

DISPLACEMENT_CONSTANTS = {"sqrt2": 1.0 / math.sqrt(2.0), "two": 0.5}


@dataclass(frozen=True)
class FockSpec:
    """Multimode truncated Fock space: one mode per pair (j, k)."""

    d: int
    cutoff: int

    def __post_init__(self):
        if self.cutoff < 1:
            raise ValueError("cutoff must be >= 1")

    @property
    def modes(self) -> tuple[tuple[int, int], ...]:
        return tb.pairs(self.d)

    @property
    def nmodes(self) -> int:
        return len(self.modes)

    @property
    def dim(self) -> int:
        return (self.cutoff + 1) ** self.nmodes

    def index(self, occupation: tuple[int, ...]) -> int:
        """Flat index of a number state given per-mode occupations."""
        idx = 0
        for occ in occupation:
            if not 0 <= occ <= self.cutoff:
                raise ValueError(f"occupation {occupation} outside cutoff")
            idx = idx * (self.cutoff + 1) + occ
        return idx


def annihilation(N: int) -> np.ndarray:
    a = np.zeros((N + 1, N + 1), dtype=complex)
    for k in range(1, N + 1):
        a[k - 1, k] = math.sqrt(k)
    return a


def thermal(beta: float, N: int) -> np.ndarray:
    """Geometric mixture of number states at inverse temperature beta,
    renormalized on the truncation."""
    if beta <= 0:
        raise ValueError("beta must be positive")
    p = np.exp(-beta * np.arange(N + 1))
    return np.diag(p / p.sum()).astype(complex)


def thermal_tail(beta: float, N: int) -> float:
    """Raw mass of the untruncated thermal state beyond level N."""
    return math.exp(-beta * (N + 1))


def weyl(z: complex, N: int) -> np.ndarray:
    """Displacement operator exp(z a^dag - conj(z) a) on the truncation."""
    a = annihilation(N)
    gen = z * a.conj().T - np.conj(z) * a
    H = -1j * gen
    vals, vecs = np.linalg.eigh(H)
    return (vecs * np.exp(1j * vals)) @ vecs.conj().T


def coherent_vector(z: complex, N: int) -> np.ndarray:
    """Coefficients e^{-|z|^2/2} z^m / sqrt(m!) of the displaced vacuum."""
    ks = np.arange(N + 1)
    logs = ks * np.log(np.abs(z)) if z != 0 else np.where(ks == 0, 0.0, -np.inf)
    half_lfact = np.array([math.lgamma(k + 1) / 2 for k in ks])
    mags = np.exp(-abs(z) ** 2 / 2 + logs - half_lfact)
    phases = np.exp(1j * np.angle(z) * ks) if z != 0 else np.ones(N + 1)
    return mags * phases


def displaced_thermal(beta: float, z: complex, N: int) -> np.ndarray:
    """W(z)* thermal W(z); its first-moment is -z in this convention."""
    W = weyl(z, N)
    return W.conj().T @ thermal(beta, N) @ W


def char_fn(rho: np.ndarray, z: complex) -> complex:
    """Characteristic function Tr[rho W(z)] on the truncation of rho."""
    N = rho.shape[0] - 1
    return complex(np.trace(rho @ weyl(z, N)))


def multimode_number_state(spec: FockSpec, occupation: tuple[int, ...]) -> np.ndarray:
    v = np.zeros(spec.dim, dtype=complex)
    v[spec.index(occupation)] = 1.0
    return v


def tensor_modes(mats: list[np.ndarray]) -> np.ndarray:
    out = mats[0]
    for M in mats[1:]:
        out = np.kron(out, M)
    return out


def mode_betas(spec_mu: Spectrum) -> tuple[float, ...]:
    """Inverse temperatures ln(mu_j / mu_k) per mode."""
    return tuple(
        math.log(spec_mu.mu[j - 1] / spec_mu.mu[k - 1])
        for j, k in tb.pairs(spec_mu.d)
    )


def limit_quantum_state(
    spec_mu: Spectrum,
    zeta: tuple[complex, ...],
    fock: FockSpec,
    disp_const: float = DISPLACEMENT_CONSTANTS["sqrt2"],
) -> np.ndarray:
    """Product over modes of displaced thermal states with amplitude
    disp_const * zeta_jk / sqrt(mu_j - mu_k)."""
    if spec_mu.d != fock.d:
        raise ValueError("spectrum and Fock space dimension mismatch")
    mats = []
    for idx, (j, k) in enumerate(fock.modes):
        beta = math.log(spec_mu.mu[j - 1] / spec_mu.mu[k - 1])
        gap = spec_mu.mu[j - 1] - spec_mu.mu[k - 1]
        # displaced_thermal(beta, z) has first moment -z, so negate to put
        # the mean along +zeta, the direction the finite-n blocks rotate to
        z = -disp_const * zeta[idx] / math.sqrt(gap)
        if z == 0:
            mats.append(thermal(beta, fock.cutoff))
        else:
            mats.append(displaced_thermal(beta, z, fock.cutoff))
    return tensor_modes(mats)


@dataclass(frozen=True)
class LimitState:
    """Gaussian limit: classical N(u, V(mu)) paired with the multimode
    displaced thermal state."""

    mean: np.ndarray
    cov: np.ndarray
    quantum: np.ndarray
    fock: FockSpec


def limit_state(
    spec_mu: Spectrum,
    theta: LocalParams,
    fock: FockSpec,
    disp_const: float = DISPLACEMENT_CONSTANTS["sqrt2"],
) -> LimitState:
    quantum = limit_quantum_state(spec_mu, theta.zeta, fock, disp_const)
    return LimitState(
        mean=np.array(theta.u, dtype=float),
        cov=covariance(spec_mu),
        quantum=quantum,
        fock=fock,
    )


def partial_trace_to_mode(rho: np.ndarray, fock: FockSpec, mode_idx: int) -> np.ndarray:
    """Reduce a multimode state to a single mode."""
    dims = [fock.cutoff + 1] * fock.nmodes
    T = rho.reshape(dims + dims)
    for m in reversed(range(fock.nmodes)):
        if m == mode_idx:
            continue
        T = np.trace(T, axis1=m, axis2=T.ndim // 2 + m)
    return T
