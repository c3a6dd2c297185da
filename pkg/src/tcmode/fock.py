"""Truncated Fock-space operators and the operator-built photon distributions.

Everything here works in a dim-dimensional number basis: ladder matrices,
unitary squeeze and displacement operators via matrix exponentials, and
density compositions of the form rho = D S rho0 S^dag D^dag (displacement
applied last).  This is the normative construction for the distribution
kinds whose printed closed forms rely on special functions defined
elsewhere, and the independent cross-check for all the rest.

Convention: the squeeze phase psi is fixed so that for psi = 0 a real
displacement lies along the anti-squeezed quadrature, which is what the
variance columns of the closed-form moments require (verified by test).
"""

from __future__ import annotations

import math

import numpy as np
from scipy.linalg import expm

from .errors import NumericalError, ParameterError, TruncationError

__all__ = [
    "annihilation",
    "squeeze_matrix",
    "displacement_matrix",
    "thermal_weights",
    "oracle_dim",
    "gaussian_fock_oracle",
]

# Mass allowed in the last guard row before the truncation is rejected.
GUARD_ROW_TOL = 1e-13

# Gauss-Hermite orders tried for the thermal phase-space convolution.
_GH_ORDERS = (8, 12, 16, 24, 32, 48)
_GH_MOMENT_TOL = 1e-8


def annihilation(dim: int) -> np.ndarray:
    """Photon annihilation ladder matrix, a[n, n+1] = sqrt(n+1)."""
    return np.diag(np.sqrt(np.arange(1.0, dim)), 1)


def squeeze_matrix(dim: int, r: float, psi: float = 0.0) -> np.ndarray:
    """Unitary squeeze exp((r/2)(e^{i psi} adag^2 - e^{-i psi} a^2))."""
    a = annihilation(dim)
    a2 = a @ a
    if psi == 0.0:
        gen = 0.5 * r * (a2.T - a2)
    else:
        phase = np.exp(1j * psi)
        gen = 0.5 * r * (phase * a2.T - np.conj(phase) * a2)
    return expm(gen)


def displacement_matrix(dim: int, beta: float) -> np.ndarray:
    """Unitary displacement exp(beta (adag - a)) for real beta >= 0."""
    a = annihilation(dim)
    return expm(beta * (a.T - a))


def thermal_weights(dim: int, nbar: float) -> np.ndarray:
    """Diagonal of a thermal state truncated to dim levels."""
    if nbar == 0.0:
        w = np.zeros(dim)
        w[0] = 1.0
        return w
    ratio = nbar / (nbar + 1.0)
    return np.exp(np.arange(dim) * math.log(ratio)) / (nbar + 1.0)


def oracle_dim(n_max: int, nbar: float, r: float) -> int:
    """Operator-space dimension: n_max plus a guard band.

    The band absorbs the photons scattered upward by squeezing and
    displacement so that the last row can be used as a leakage probe.
    """
    band = max(20, math.ceil(6.0 * math.sqrt(nbar + 1.0))
               + math.ceil(4.0 * r * math.sqrt(max(n_max, 1))))
    return n_max + band + 1


class _Displacer:
    """Applies D(gamma) for arbitrary complex gamma from one eigendecomposition.

    D(gamma) = R(theta) exp(|gamma|(adag - a)) R(-theta) with
    R(theta) = diag(e^{i n theta}), so a single Hermitian diagonalization of
    i(adag - a) serves every displacement of a given dimension.
    """

    def __init__(self, dim: int):
        a = annihilation(dim)
        h, u = np.linalg.eigh(1j * (a.T - a))
        self._h = h
        self._u = u
        self._n = np.arange(dim)

    def matrix(self, gamma: complex) -> np.ndarray:
        mag, theta = abs(gamma), np.angle(gamma)
        core = (self._u * np.exp(-1j * mag * self._h)) @ self._u.conj().T
        if theta == 0.0:
            return core
        rot = np.exp(1j * theta * self._n)
        return (core * np.conj(rot)[None, :]) * rot[:, None]

    def apply(self, gamma: complex, vec: np.ndarray) -> np.ndarray:
        mag, theta = abs(gamma), np.angle(gamma)
        v = vec if theta == 0.0 else np.exp(-1j * theta * self._n) * vec
        v = self._u @ (np.exp(-1j * mag * self._h) * (self._u.conj().T @ v))
        if theta != 0.0:
            v = np.exp(1j * theta * self._n) * v
        return v


def _base_density(spec, dim: int) -> np.ndarray:
    if spec.kind in ("fock", "squeezed-fock", "displaced-fock",
                     "squeezed-displaced-fock"):
        w = np.zeros(dim)
        w[spec.fock_l] = 1.0
    elif spec.kind in ("thermal", "mixed-coherent-thermal",
                       "squeezed-thermal", "displaced-squeezed-thermal"):
        w = thermal_weights(dim, spec.n_thermal)
    else:
        w = np.zeros(dim)
        w[0] = 1.0
    return np.diag(w).astype(np.complex128)


def _diag_of_sandwich(op: np.ndarray, rho: np.ndarray) -> np.ndarray:
    """diag(op rho op^dag) without forming the full product."""
    t = op @ rho
    return np.real(np.einsum("nl,nl->n", t, np.conj(op)))


def gaussian_fock_oracle(spec, dim: int) -> np.ndarray:
    """Photon-number probabilities from explicit truncated-operator algebra.

    Builds the base density (vacuum, Fock level, or thermal diagonal),
    conjugates with the squeeze and then the displacement, and for the
    squeezed-coherent-plus-thermal mixture convolves with the thermal
    P-function by 2-D Gauss-Hermite quadrature.  Returns the diagonal,
    length dim.  Raises TruncationError when the last guard row retains
    more than GUARD_ROW_TOL probability.
    """
    if dim < 2 or dim <= spec.fock_l:
        raise ParameterError(f"oracle dimension {dim} too small for {spec.kind}")
    rho = _base_density(spec, dim)
    if spec.r > 0.0:
        s = squeeze_matrix(dim, spec.r, spec.psi)
        rho = s @ rho @ s.conj().T

    if spec.kind == "mixed-squeezed-coherent-thermal" and spec.n_thermal > 0.0:
        if spec.beta > 0.0:
            d = displacement_matrix(dim, spec.beta)
            rho = d @ rho @ d.conj().T
        probs = _thermal_convolution(rho, spec.n_thermal, dim)
    else:
        if spec.beta > 0.0:
            d = displacement_matrix(dim, spec.beta)
            probs = _diag_of_sandwich(d, rho)
        else:
            probs = np.real(np.diag(rho)).copy()

    if probs[-1] > GUARD_ROW_TOL:
        raise TruncationError(
            f"guard row holds {probs[-1]:.3e} probability at dim={dim}",
            achieved_tail=float(probs[-1]))
    if np.any(np.isnan(probs)):
        raise NumericalError(f"NaN probability from operator build of {spec.kind}")
    return probs


def _thermal_convolution(rho: np.ndarray, n_thermal: float, dim: int) -> np.ndarray:
    """Mix rho with thermal noise: integral of D(alpha) rho D(alpha)^dag
    against the isotropic Gaussian P-function of variance n_thermal.

    The Gauss-Hermite order is raised until the first two moments of the
    result stabilize.
    """
    scale = math.sqrt(n_thermal)
    disp = _Displacer(dim)
    nvec = np.arange(dim)
    prev_mean = prev_var = None
    for order in _GH_ORDERS:
        nodes, weights = np.polynomial.hermite.hermgauss(order)
        probs = np.zeros(dim)
        for i in range(order):
            for j in range(order):
                alpha = scale * complex(nodes[i], nodes[j])
                dmat = disp.matrix(alpha)
                probs += (weights[i] * weights[j] / math.pi) * \
                    _diag_of_sandwich(dmat, rho)
        mean = float(nvec @ probs)
        var = float((nvec * nvec) @ probs) - mean * mean
        if prev_mean is not None:
            tol = _GH_MOMENT_TOL * max(1.0, abs(mean))
            if abs(mean - prev_mean) <= tol and \
                    abs(var - prev_var) <= _GH_MOMENT_TOL * max(1.0, abs(var)):
                return probs
        prev_mean, prev_var = mean, var
    raise NumericalError(
        f"thermal convolution failed to stabilize by order {_GH_ORDERS[-1]}")
