"""Invariant blocks of the Tavis-Cummings Hamiltonian and their eigensystems.

The Hamiltonian for N identical two-level molecules coupled to one field
mode conserves the cooperation number r and the total excitation c = n + m,
so it splits into real symmetric tridiagonal blocks along the photon
ladder.  Blocks are scaled so that their eigenvalues are the effective
values q whose pairwise differences (in units of the dimensionless time
gamma*t) set every oscillation frequency downstream.

Half-integer quantum numbers are carried as doubled integers (2r, 2c) to
keep all bookkeeping exact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy.linalg import eigh_tridiagonal

from .errors import NumericalError, ParameterError

__all__ = [
    "TCBlock",
    "EigenSystem",
    "MultiplicityTable",
    "multiplicity",
    "multiplicity_table",
    "emission_block",
    "absorption_block",
    "diagonalize",
    "eigensystem",
    "clear_block_cache",
]

# Orthonormality guard: residual above ORTHO_TOL * dim aborts the run
# instead of silently feeding a bad basis into the spectra.
ORTHO_TOL = 1e-12


@dataclass(frozen=True)
class TCBlock:
    """One invariant (r, c) block: symmetric tridiagonal matrix + photon offset.

    Rows/columns are indexed by k = photon number - n_min.  The matrix holds
    (c*I - H_block) in coupling units, so diag[k] = -(n_min + k) * detuning
    and offdiag[k] couples photon numbers n_min+k and n_min+k+1.
    """

    n_tlm: int
    two_r: int
    two_c: int
    n_min: int
    diag: np.ndarray
    offdiag: np.ndarray
    detuning: float

    @property
    def r(self) -> float:
        return self.two_r / 2

    @property
    def c(self) -> float:
        return self.two_c / 2

    @property
    def dim(self) -> int:
        return len(self.diag)

    def matrix(self) -> np.ndarray:
        """Dense form, mainly for tests and the dense-evolution validator."""
        m = np.diag(self.diag)
        if self.dim > 1:
            m += np.diag(self.offdiag, 1) + np.diag(self.offdiag, -1)
        return m


@dataclass(frozen=True)
class EigenSystem:
    """Sorted eigenvalues q and orthonormal eigenvector columns A of a block.

    A[k, j] is the weight of photon number n_min + k in eigenvector j; the
    first nonzero component of every column is positive.
    """

    q: np.ndarray
    A: np.ndarray


@dataclass(frozen=True)
class MultiplicityTable:
    """Exact sector multiplicities P(r) for N two-level molecules."""

    n_tlm: int
    values: dict[Fraction, Fraction]


def multiplicity(n_tlm: int, r) -> Fraction:
    """Exact multiplicity P(r) of the spin-r sector among n_tlm molecules.

    P(r) = N!(2r+1) / ((N/2 + r + 1)! (N/2 - r)!), computed with integer
    arithmetic.  Raises ParameterError for an (N, r) pairing that does not
    occur (r outside [0, N/2] or N - 2r odd).
    """
    if n_tlm < 1:
        raise ParameterError(f"n_tlm must be positive, got {n_tlm}")
    two_r = Fraction(r) * 2
    if two_r.denominator != 1:
        raise ParameterError(f"r must be integer or half-integer, got {r}")
    two_r = int(two_r)
    if two_r < 0 or two_r > n_tlm or (n_tlm - two_r) % 2 != 0:
        raise ParameterError(f"invalid (N, r) pairing: N={n_tlm}, r={r}")
    upper = (n_tlm + two_r) // 2 + 1
    lower = (n_tlm - two_r) // 2
    return Fraction(math.factorial(n_tlm) * (two_r + 1),
                    math.factorial(upper) * math.factorial(lower))


def multiplicity_table(n_tlm: int) -> MultiplicityTable:
    """All P(r) for r = N/2, N/2-1, ..., down to 0 or 1/2."""
    values = {}
    for two_r in range(n_tlm % 2, n_tlm + 1, 2):
        values[Fraction(two_r, 2)] = multiplicity(n_tlm, Fraction(two_r, 2))
    return MultiplicityTable(n_tlm=n_tlm, values=values)


def _build_block(n_tlm: int, two_r: int, two_c: int, beta: float) -> TCBlock:
    n_min = max(0, (two_c - two_r) // 2)
    n_top = (two_c + two_r) // 2
    dim = n_top - n_min + 1
    if dim < 1:
        raise ParameterError(f"empty block: 2r={two_r}, 2c={two_c}")
    diag = -beta * (n_min + np.arange(dim, dtype=np.float64))
    off = np.empty(max(dim - 1, 0), dtype=np.float64)
    for k in range(dim - 1):
        n = n_min + k
        # m of the higher-photon state |n+1>, doubled
        two_m = two_c - 2 * (n + 1)
        ladder4 = (two_r - two_m) * (two_r + two_m + 2)  # 4*(r-m)(r+m+1)
        off[k] = math.sqrt(n + 1) * math.sqrt(ladder4) / 2.0
    if not (np.all(np.isfinite(diag)) and np.all(np.isfinite(off))):
        raise NumericalError(
            f"non-finite block entry for N={n_tlm}, 2c={two_c}, beta={beta}")
    diag.flags.writeable = False
    off.flags.writeable = False
    return TCBlock(n_tlm=n_tlm, two_r=two_r, two_c=two_c, n_min=n_min,
                   diag=diag, offdiag=off, detuning=beta)


def emission_block(n_tlm: int, n: int, beta: float = 0.0) -> TCBlock:
    """Block holding initial photon number n with all molecules up.

    r = N/2 and c = n + N/2, so the block spans photon numbers n .. n+N
    and has dimension N + 1.
    """
    if n_tlm < 1:
        raise ParameterError(f"n_tlm must be positive, got {n_tlm}")
    if n < 0:
        raise ParameterError(f"photon number must be nonnegative, got {n}")
    return _build_block(n_tlm, n_tlm, 2 * n + n_tlm, beta)


def absorption_block(n_tlm: int, n: int, beta: float = 0.0) -> TCBlock:
    """Block holding initial photon number n with all molecules down.

    r = N/2 and c = n - N/2, so the block spans photon numbers
    max(0, n-N) .. n and has dimension min(N, n) + 1.
    """
    if n_tlm < 1:
        raise ParameterError(f"n_tlm must be positive, got {n_tlm}")
    if n < 0:
        raise ParameterError(f"photon number must be nonnegative, got {n}")
    return _build_block(n_tlm, n_tlm, 2 * n - n_tlm, beta)


def diagonalize(block: TCBlock) -> EigenSystem:
    """Full eigendecomposition of a block, with deterministic conventions.

    Eigenvalues ascend; each eigenvector's first nonzero component is made
    positive.  Raises NumericalError (carrying the block identity) on solver
    failure or when the orthonormality residual exceeds ORTHO_TOL * dim.
    """
    ident = (f"block N={block.n_tlm}, 2r={block.two_r}, 2c={block.two_c}, "
             f"beta={block.detuning}")
    if block.dim == 1:
        q = np.array([block.diag[0]])
        a = np.array([[1.0]])
    else:
        try:
            q, a = eigh_tridiagonal(block.diag, block.offdiag)
        except Exception as exc:
            raise NumericalError(f"eigensolver failed for {ident}: {exc}") from exc
        # Fix the global sign of each column.  For an unreduced tridiagonal
        # matrix the first component never vanishes mathematically.
        first = np.argmax(np.abs(a) > 0.0, axis=0)
        signs = np.sign(a[first, np.arange(a.shape[1])])
        signs[signs == 0] = 1.0
        a = a * signs
    resid = np.max(np.abs(a.T @ a - np.eye(block.dim)))
    if not resid < ORTHO_TOL * block.dim:
        raise NumericalError(
            f"orthonormality residual {resid:.3e} for {ident}")
    q.flags.writeable = False
    a.flags.writeable = False
    return EigenSystem(q=q, A=a)


# Read-through eigensystem cache.  Plain dict: lookups and inserts are
# atomic under the GIL and last-writer-wins is acceptable because values
# for equal keys are identical.
_CACHE: dict[tuple, EigenSystem] = {}


def eigensystem(n_tlm: int, n: int, beta: float, mode: str) -> EigenSystem:
    """Cached eigensystem of the emission or absorption block for photon n."""
    key = (n_tlm, n, float(beta), mode)
    hit = _CACHE.get(key)
    if hit is not None:
        return hit
    if mode == "emission":
        block = emission_block(n_tlm, n, beta)
    elif mode == "absorption":
        block = absorption_block(n_tlm, n, beta)
    else:
        raise ParameterError(f"unknown mode {mode!r}")
    eig = diagonalize(block)
    _CACHE[key] = eig
    return eig


def clear_block_cache() -> None:
    _CACHE.clear()
