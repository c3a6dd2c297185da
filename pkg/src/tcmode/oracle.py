"""Brute-force validator: dense evolution in the joint field x spin space.

Builds the full (scaled) Hamiltonian over |n> x |r=N/2, m> without any
block bookkeeping, diagonalizes it once, and propagates each initial basis
state exactly.  Used by tests and the `oracle` CLI subcommand to check the
spectral path end to end; never used in production runs.
"""

from __future__ import annotations

import numpy as np

from .distributions import PhotonDistribution
from .errors import NumericalError, ParameterError
from .spectra import TimeSeries

__all__ = ["JointSystem", "build_joint", "evolve_photon_number"]

MAX_JOINT_DIM = 40000
UNITARITY_TOL = 1e-12
SECTOR_TOL = 1e-12


class JointSystem:
    """Dense scaled Hamiltonian over the product basis.

    Row index = n * (N + 1) + i_m with i_m = m + N/2 in 0..N, photon number
    n in 0..n_max.  The matrix equals c*I - H in coupling units restricted
    to each conserved sector, matching the block construction.
    """

    def __init__(self, n_tlm: int, n_max: int, beta: float, h: np.ndarray):
        self.n_tlm = n_tlm
        self.n_max = n_max
        self.beta = beta
        self.h = h

    @property
    def dim(self) -> int:
        return self.h.shape[0]

    def index(self, n: int, two_m: int) -> int:
        if not (0 <= n <= self.n_max):
            raise ParameterError(f"photon number {n} outside 0..{self.n_max}")
        if (two_m + self.n_tlm) % 2 != 0 or abs(two_m) > self.n_tlm:
            raise ParameterError(f"invalid 2m={two_m} for N={self.n_tlm}")
        return n * (self.n_tlm + 1) + (two_m + self.n_tlm) // 2

    def two_c_of_row(self) -> np.ndarray:
        """Doubled conserved quantum number 2c = 2n + 2m for every row."""
        n_tlm = self.n_tlm
        n = np.repeat(np.arange(self.n_max + 1), n_tlm + 1)
        two_m = np.tile(np.arange(-n_tlm, n_tlm + 1, 2), self.n_max + 1)
        return 2 * n + two_m


def build_joint(n_tlm: int, n_max: int, beta: float = 0.0) -> JointSystem:
    """Assemble the dense scaled Hamiltonian from ladder operators."""
    if n_tlm < 1 or n_max < 0:
        raise ParameterError(f"invalid sizes N={n_tlm}, n_max={n_max}")
    dim = (n_max + 1) * (n_tlm + 1)
    if dim > MAX_JOINT_DIM:
        raise ParameterError(
            f"joint dimension {dim} exceeds the desk-scale guard {MAX_JOINT_DIM}")
    a = np.diag(np.sqrt(np.arange(1.0, n_max + 1)), 1)
    # Collective spin raising in the |r, m> ladder, m ascending.
    r = n_tlm / 2.0
    m = np.arange(-r, r)
    rp = np.diag(np.sqrt((r - m) * (r + m + 1.0)), -1)
    nphot = np.diag(np.arange(n_max + 1, dtype=np.float64))
    eye_m = np.eye(n_tlm + 1)
    h = (-beta) * np.kron(nphot, eye_m) + np.kron(a, rp) + np.kron(a.T, rp.T)
    return JointSystem(n_tlm=n_tlm, n_max=n_max, beta=beta, h=h)


def evolve_photon_number(sys: JointSystem, dist: PhotonDistribution,
                         tlm: str, times) -> TimeSeries:
    """Mean photon number over time for all molecules initially up or down.

    Diagonalizes the joint Hamiltonian once and propagates each initially
    occupied |n, +-N/2> exactly, weighting by the photon distribution.
    Raises NumericalError if state norm or sector confinement degrade.
    """
    if tlm not in ("up", "down"):
        raise ParameterError(f"tlm must be 'up' or 'down', got {tlm!r}")
    pad = sys.n_tlm if tlm == "up" else 0
    if dist.n_max + pad > sys.n_max:
        raise ParameterError(
            f"field truncation n_max={sys.n_max} too small: need "
            f"{dist.n_max + pad} for dist support {dist.n_max} with tlm={tlm}")
    times = np.ascontiguousarray(times, dtype=np.float64)
    if not np.all(np.isfinite(times)):
        raise ParameterError("times must be finite")

    w, v = np.linalg.eigh(sys.h)
    phases = np.exp(-1j * np.outer(w, times))           # (dim, T)
    nphot_row = np.repeat(np.arange(sys.n_max + 1, dtype=np.float64),
                          sys.n_tlm + 1)
    two_c = sys.two_c_of_row()
    two_m0 = sys.n_tlm if tlm == "up" else -sys.n_tlm

    total = np.zeros(len(times))
    for n0 in range(dist.n_max + 1):
        rho_n = dist.probs[n0]
        if rho_n == 0.0:
            continue
        row0 = sys.index(n0, two_m0)
        coeff = v @ (phases * v[row0][:, None])          # (dim, T) amplitudes
        pop = np.abs(coeff) ** 2
        norms = pop.sum(axis=0)
        if np.max(np.abs(norms - 1.0)) > UNITARITY_TOL:
            raise NumericalError(
                f"norm drift {np.max(np.abs(norms - 1.0)):.3e} from n0={n0}")
        outside = pop[two_c != 2 * n0 + two_m0].sum(axis=0)
        if len(outside) and outside.max() > SECTOR_TOL:
            raise NumericalError(
                f"sector leakage {outside.max():.3e} from n0={n0}")
        total += rho_n * (nphot_row @ pop)
    return TimeSeries(times=times, values=total, label="intensity")
