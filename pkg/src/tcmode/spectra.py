"""Exact spectral representations of the emission and absorption observables.

For every initial photon number n, the relevant invariant block contributes
one oscillating term per eigenvalue pair (j < j'): frequency |q_j - q_j'|/2
in units of the dimensionless time gamma*t, amplitude
-4 * rho_nn * A_f^j A_f^j' * sum_p p A^j A^j' where row f holds the initial
photon number (bottom of the block for emission, top for absorption) and p
counts photons exchanged.  S1 (all molecules up) adds photons to the field,
S4 (all molecules down) removes them; intensities are nbar + S1 and
nbar - S4 with the squared-coupling prefactor reported separately.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from ._evaluate import eval_terms, resolve_threads
from .blocks import eigensystem
from .distributions import PhotonDistribution
from .errors import NumericalError, ParameterError

__all__ = [
    "ModeSpectrum",
    "TimeSeries",
    "CapacityScan",
    "emission_spectrum",
    "absorption_spectrum",
    "evaluate",
    "intensity",
    "s1_single_tlm_closed",
    "s1_windowed",
    "capacity_scan",
    "default_amp_floor",
]

# Eigenvalue pairs closer than this merge into one zero-frequency term.
DEGENERACY_TOL = 1e-13

# Intensity may dip below zero only by numerical noise.
INTENSITY_FLOOR = -1e-9


def default_amp_floor(n_tlm: int) -> float:
    return 1e-16 * n_tlm


@dataclass(frozen=True)
class ModeSpectrum:
    """Frequency/amplitude pairs that represent S1 or S4 exactly.

    Terms are stored as parallel arrays in a fixed order (ascending photon
    number n, then eigenvalue pair (j, j') lexicographic) so summation is
    reproducible.
    """

    omegas: np.ndarray
    amplitudes: np.ndarray
    n_tlm: int
    mode: str                 # "emission" | "absorption"
    detuning: float
    dist_digest: str
    amp_floor: float
    dropped_mass: float

    @property
    def n_terms(self) -> int:
        return len(self.omegas)

    @property
    def terms(self) -> list[tuple[float, float]]:
        return list(zip(self.omegas.tolist(), self.amplitudes.tolist()))


@dataclass(frozen=True)
class TimeSeries:
    """Observable sampled on a gamma*t grid."""

    times: np.ndarray
    values: np.ndarray
    label: str                # "S1" | "S4" | "intensity"

    def __post_init__(self):
        if len(self.times) != len(self.values):
            raise ParameterError("times and values must have equal length")
        if len(self.times) > 1 and not np.all(np.diff(self.times) > 0):
            raise ParameterError("times must be strictly increasing")


@dataclass(frozen=True)
class CapacityScan:
    """Peak absorption vs. coherent mean, with its quadratic fit."""

    points: list[tuple[float, float]]
    fit: tuple[float, float, float]
    residual_rms: float


def _block_terms(eig, rho_n: float, mode: str, amp_floor: float):
    """Terms contributed by one block: (omegas, amps, dropped_mass)."""
    dim = len(eig.q)
    if dim < 2:
        return None
    a = eig.A
    if mode == "emission":
        front = a[0]
        weights = np.arange(dim, dtype=np.float64)
    else:
        front = a[-1]
        weights = np.arange(dim - 1, -1, -1, dtype=np.float64)
    w = a.T @ (a * weights[:, None])
    ju, jv = np.triu_indices(dim, k=1)
    amps = -4.0 * rho_n * front[ju] * front[jv] * w[ju, jv]
    dq = eig.q[jv] - eig.q[ju]

    degenerate = dq < DEGENERACY_TOL
    merged = None
    if np.any(degenerate):
        merged = float(amps[degenerate].sum())
        amps = amps[~degenerate]
        dq = dq[~degenerate]

    keep = np.abs(amps) >= amp_floor
    dropped = float(np.abs(amps[~keep]).sum())
    omegas = dq[keep] / 2.0
    amps = amps[keep]
    if merged is not None:
        omegas = np.append(omegas, 0.0)
        amps = np.append(amps, merged)
    return omegas, amps, dropped


def _build_spectrum(dist: PhotonDistribution, n_tlm: int, beta: float,
                    mode: str, amp_floor: float | None,
                    threads: int) -> ModeSpectrum:
    if n_tlm < 1:
        raise ParameterError(f"n_tlm must be positive, got {n_tlm}")
    if amp_floor is None:
        amp_floor = default_amp_floor(n_tlm)
    n_start = 0 if mode == "emission" else 1
    ns = [n for n in range(n_start, dist.n_max + 1) if dist.probs[n] > 0.0]

    def worker(n):
        eig = eigensystem(n_tlm, n, beta, mode)
        return _block_terms(eig, dist.probs[n], mode, amp_floor)

    threads = resolve_threads(threads)
    if threads > 1 and len(ns) > 4:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(worker, ns))
    else:
        results = [worker(n) for n in ns]

    parts_w, parts_a, dropped = [], [], 0.0
    for res in results:
        if res is None:
            continue
        parts_w.append(res[0])
        parts_a.append(res[1])
        dropped += res[2]
    omegas = np.concatenate(parts_w) if parts_w else np.empty(0)
    amps = np.concatenate(parts_a) if parts_a else np.empty(0)
    omegas.flags.writeable = False
    amps.flags.writeable = False
    return ModeSpectrum(omegas=omegas, amplitudes=amps, n_tlm=n_tlm,
                        mode=mode, detuning=beta, dist_digest=dist.digest,
                        amp_floor=amp_floor, dropped_mass=dropped)


def emission_spectrum(dist: PhotonDistribution, n_tlm: int, beta: float = 0.0,
                      amp_floor: float | None = None,
                      threads: int = 1) -> ModeSpectrum:
    """Spectrum of S1 for all molecules initially up."""
    return _build_spectrum(dist, n_tlm, beta, "emission", amp_floor, threads)


def absorption_spectrum(dist: PhotonDistribution, n_tlm: int, beta: float = 0.0,
                        amp_floor: float | None = None,
                        threads: int = 1) -> ModeSpectrum:
    """Spectrum of S4 for all molecules initially down.

    Photon number 0 contributes nothing (its block is one-dimensional)."""
    return _build_spectrum(dist, n_tlm, beta, "absorption", amp_floor, threads)


def evaluate(spectrum: ModeSpectrum, times, threads: int = 1,
             backend: str | None = None) -> TimeSeries:
    """Sample the spectrum: value(t) = sum_k amp_k * sin^2(omega_k * t)."""
    times = np.ascontiguousarray(times, dtype=np.float64)
    if len(times) > 1 and not np.all(np.diff(times) > 0):
        raise ParameterError("times must be strictly increasing")
    values = eval_terms(spectrum.omegas, spectrum.amplitudes, times,
                        threads=threads, backend=backend)
    label = "S1" if spectrum.mode == "emission" else "S4"
    return TimeSeries(times=times, values=values, label=label)


def intensity(series: TimeSeries, nbar: float) -> TimeSeries:
    """Field intensity in photon-number units: nbar + S1 or nbar - S4."""
    if series.label == "S1":
        values = nbar + series.values
    elif series.label == "S4":
        values = nbar - series.values
    else:
        raise ParameterError(f"intensity needs an S1 or S4 series, "
                             f"got {series.label!r}")
    low = values.min() if len(values) else 0.0
    if low < INTENSITY_FLOOR:
        raise NumericalError(
            f"intensity dipped to {low:.3e}; upstream numerical fault")
    return TimeSeries(times=series.times, values=values, label="intensity")


def s1_single_tlm_closed(dist: PhotonDistribution, times) -> TimeSeries:
    """Single-molecule resonant emission, summed directly:
    S1 = sum_n rho_nn sin^2(sqrt(n+1) gamma t).  Serves as the N=1 oracle."""
    times = np.ascontiguousarray(times, dtype=np.float64)
    freqs = np.sqrt(np.arange(1.0, dist.n_max + 2))
    grid = np.sin(freqs[:, None] * times[None, :])
    values = dist.probs @ (grid * grid)
    return TimeSeries(times=times, values=values, label="S1")


def s1_windowed(dist: PhotonDistribution, times,
                width_sigmas: float) -> TimeSeries:
    """Single-molecule emission restricted to photon numbers within
    width_sigmas standard deviations of the mean."""
    if not width_sigmas > 0:
        # A zero-width window still covers a zero-variance distribution.
        if not (width_sigmas == 0 and dist.var_closed == 0):
            raise ParameterError(f"width_sigmas must be > 0, got {width_sigmas}")
    sigma = math.sqrt(max(dist.var_closed, 0.0))
    lo = max(0, math.ceil(dist.mean_closed - width_sigmas * sigma))
    hi = min(dist.n_max, math.floor(dist.mean_closed + width_sigmas * sigma))
    if lo > hi:
        raise ParameterError(
            f"empty photon window [{lo}, {hi}] for width_sigmas={width_sigmas}")
    times = np.ascontiguousarray(times, dtype=np.float64)
    freqs = np.sqrt(np.arange(lo + 1.0, hi + 2.0))
    grid = np.sin(freqs[:, None] * times[None, :])
    values = dist.probs[lo:hi + 1] @ (grid * grid)
    return TimeSeries(times=times, values=values, label="S1")


def capacity_scan(n_tlm: int, nbars, t_max: float, t_steps: int,
                  tail_tol: float = 1e-12, threads: int = 1) -> CapacityScan:
    """Peak photons absorbed from a coherent field, per mean photon number,
    with a least-squares quadratic fit over the scan points."""
    from .distributions import DistSpec, TailPolicy, make_distribution

    nbars = [float(v) for v in nbars]
    if not nbars:
        raise ParameterError("nbars must be nonempty")
    times = np.linspace(0.0, t_max, t_steps)
    points = []
    for nbar in nbars:
        dist = make_distribution(DistSpec(kind="coherent", beta=math.sqrt(nbar)),
                                 TailPolicy(tail_tol=tail_tol))
        spec = absorption_spectrum(dist, n_tlm, threads=threads)
        series = evaluate(spec, times, threads=threads)
        points.append((nbar, float(series.values.max(initial=0.0))))
    xs = np.array([p[0] for p in points])
    ys = np.array([p[1] for p in points])
    deg = min(2, len(points) - 1)
    coeffs = np.polynomial.polynomial.polyfit(xs, ys, deg)
    c = np.zeros(3)
    c[:len(coeffs)] = coeffs
    resid = ys - (c[0] + c[1] * xs + c[2] * xs * xs)
    rms = float(np.sqrt(np.mean(resid ** 2)))
    return CapacityScan(points=points, fit=(float(c[0]), float(c[1]), float(c[2])),
                        residual_rms=rms)
