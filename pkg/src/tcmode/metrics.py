"""Envelope and regularity metrics for oscillating observables.

Used to quantify collapse/revival and the regularity of the slow
rise-and-fall modulation: the envelope is a sliding maximum of the
deviation from a reference level, and regularity is the coefficient of
variation of the spacings between envelope peaks.
"""

from __future__ import annotations

import numpy as np
from scipy.signal import find_peaks

from .errors import ParameterError

__all__ = ["sliding_max", "envelope", "peak_spacing_cv"]


def sliding_max(values: np.ndarray, times: np.ndarray, width: float) -> np.ndarray:
    """Running maximum over a centered window of the given time width."""
    if width <= 0:
        raise ParameterError(f"window width must be positive, got {width}")
    dt = times[1] - times[0]
    half = int(round(width / 2.0 / dt))
    n = len(values)
    out = np.empty(n)
    for i in range(n):
        out[i] = values[max(0, i - half):min(n, i + half + 1)].max()
    return out


def envelope(times: np.ndarray, values: np.ndarray, width: float,
             center: float | None = None) -> np.ndarray:
    """Sliding max of |values - center|; center defaults to the series mean."""
    if center is None:
        center = float(values.mean())
    return sliding_max(np.abs(values - center), times, width)


def peak_spacing_cv(times: np.ndarray, values: np.ndarray, width: float = 2.0,
                    prominence_frac: float = 0.5) -> tuple[float, int]:
    """Coefficient of variation of envelope peak spacings.

    Peaks are local maxima of the envelope with prominence above
    prominence_frac times the envelope's standard deviation; sliding-max
    plateaus are reduced to their midpoints.  Returns (cv, n_spacings).
    A regular rise-and-fall gives a small cv, chaotic modulation a large
    one.  Requires at least three spacings.
    """
    env = envelope(times, values, width)
    peaks, props = find_peaks(env, prominence=prominence_frac * env.std(),
                              plateau_size=1)
    mids = ((props["left_edges"] + props["right_edges"]) // 2).astype(int)
    spacings = np.diff(times[mids])
    if len(spacings) < 3:
        raise ParameterError(
            f"only {len(spacings)} envelope peak spacings found; "
            "not enough for a regularity estimate")
    return float(spacings.std() / spacings.mean()), len(spacings)
