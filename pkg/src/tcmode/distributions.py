"""Truncated photon-number distributions and their declared moments.

Twelve diagonal field states are supported.  Six have self-contained
closed forms (coherent, thermal, Fock, displaced thermal mixture,
squeezed vacuum, displaced Fock); the rest are built from truncated
squeeze/displacement operators because their printed expansions lean on
special functions that are defined elsewhere.  The operator machinery in
:mod:`tcmode.fock` doubles as an independent cross-check for every kind.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass
from math import cos, cosh, sinh

import numpy as np
from scipy.special import gammaln

from . import fock
from .errors import NumericalError, ParameterError, TruncationError

__all__ = [
    "KINDS",
    "DistSpec",
    "TailPolicy",
    "PhotonDistribution",
    "closed_form_moments",
    "make_distribution",
    "empirical_moments",
    "displaced_fock_pn",
    "squeezed_coherent_closed",
]

KINDS = (
    "coherent",
    "thermal",
    "fock",
    "mixed-coherent-thermal",
    "squeezed-vacuum",
    "squeezed-fock",
    "squeezed-thermal",
    "squeezed-coherent",
    "mixed-squeezed-coherent-thermal",
    "displaced-squeezed-thermal",
    "displaced-fock",
    "squeezed-displaced-fock",
)

# Fields each kind is allowed to read; everything else must be zero.
_RELEVANT = {
    "coherent": {"beta"},
    "thermal": {"n_thermal"},
    "fock": {"fock_l"},
    "mixed-coherent-thermal": {"beta", "n_thermal"},
    "squeezed-vacuum": {"r"},
    "squeezed-fock": {"r", "fock_l"},
    "squeezed-thermal": {"r", "n_thermal"},
    "squeezed-coherent": {"beta", "r", "psi"},
    "mixed-squeezed-coherent-thermal": {"beta", "r", "psi", "n_thermal"},
    "displaced-squeezed-thermal": {"beta", "r", "psi", "n_thermal"},
    "displaced-fock": {"beta", "fock_l"},
    "squeezed-displaced-fock": {"beta", "r", "psi", "fock_l"},
}

# Kinds realized directly from closed forms vs. operator algebra.
_CLOSED_FORM = {"coherent", "thermal", "fock", "mixed-coherent-thermal",
                "squeezed-vacuum", "displaced-fock"}

_NEG_CLAMP = -1e-14
_FLUSH = 1e-300
_GROW_ROUNDS = 8


@dataclass(frozen=True)
class DistSpec:
    """Parameters of one photon distribution.

    beta is the displacement magnitude (coherent mean = beta**2),
    n_thermal the thermal mean, r and psi the squeeze magnitude and phase,
    fock_l the Fock level.  Fields a kind does not use must stay zero.
    """

    kind: str
    beta: float = 0.0
    n_thermal: float = 0.0
    r: float = 0.0
    psi: float = 0.0
    fock_l: int = 0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ParameterError(f"unknown distribution kind {self.kind!r}")
        for name, value in (("beta", self.beta), ("n_thermal", self.n_thermal),
                            ("r", self.r)):
            if not (value >= 0.0 and math.isfinite(value)):
                raise ParameterError(f"{name} must be finite and >= 0, got {value}")
        if not math.isfinite(self.psi):
            raise ParameterError(f"psi must be finite, got {self.psi}")
        if self.fock_l < 0 or self.fock_l != int(self.fock_l):
            raise ParameterError(f"fock_l must be a nonnegative integer, "
                                 f"got {self.fock_l}")
        relevant = _RELEVANT[self.kind]
        for name in ("beta", "n_thermal", "r", "psi", "fock_l"):
            if name not in relevant and getattr(self, name) != 0:
                raise ParameterError(
                    f"field {name} is irrelevant for kind {self.kind!r} "
                    f"and must be zero")


@dataclass(frozen=True)
class TailPolicy:
    """Truncation control: target tail mass and optional hard cap on n."""

    tail_tol: float = 1e-12
    n_cap: int | None = None

    def __post_init__(self):
        if not self.tail_tol > 0:
            raise ParameterError(f"tail_tol must be > 0, got {self.tail_tol}")


@dataclass(frozen=True)
class PhotonDistribution:
    """Truncated diagonal photon density with its declared moments."""

    probs: np.ndarray
    tail_mass: float
    mean_closed: float
    var_closed: float
    spec: DistSpec

    @property
    def n_max(self) -> int:
        return len(self.probs) - 1

    @property
    def digest(self) -> str:
        s = self.spec
        key = (f"{s.kind}|{s.beta!r}|{s.n_thermal!r}|{s.r!r}|{s.psi!r}|"
               f"{s.fock_l}|{self.n_max}")
        return hashlib.sha1(key.encode()).hexdigest()[:12]


def closed_form_moments(spec: DistSpec) -> tuple[float, float]:
    """Declared (mean, variance) for the given kind."""
    b2 = spec.beta ** 2
    nt = spec.n_thermal
    r, psi, l = spec.r, spec.psi, spec.fock_l
    kind = spec.kind
    if kind == "coherent":
        return b2, b2
    if kind == "thermal":
        return nt, nt * nt + nt
    if kind == "fock":
        return float(l), 0.0
    if kind == "mixed-coherent-thermal":
        return b2 + nt, b2 * (1 + 2 * nt) + nt * nt + nt
    if kind == "squeezed-vacuum":
        return sinh(r) ** 2, sinh(2 * r) ** 2 / 2
    if kind == "squeezed-fock":
        return (l + (2 * l + 1) * sinh(r) ** 2,
                0.5 * (l * l + l + 1) * sinh(2 * r) ** 2)
    if kind == "squeezed-thermal":
        return (nt + (2 * nt + 1) * sinh(r) ** 2,
                -0.25 + (nt + 0.5) ** 2 * cosh(4 * r))
    if kind == "squeezed-coherent":
        return (sinh(r) ** 2 + b2,
                b2 * (cosh(2 * r) + cos(psi) * sinh(2 * r))
                + sinh(2 * r) ** 2 / 2)
    if kind == "mixed-squeezed-coherent-thermal":
        return (sinh(r) ** 2 + b2 + nt,
                b2 * (cosh(2 * r) + cos(psi) * sinh(2 * r))
                + sinh(2 * r) ** 2 / 2
                + 2 * nt * (sinh(r) ** 2 + b2) + nt * nt + nt)
    if kind == "displaced-squeezed-thermal":
        return (nt + (2 * nt + 1) * sinh(r) ** 2 + b2,
                -0.25 + b2 * (1 + 2 * nt) * (cosh(2 * r) + cos(psi) * sinh(2 * r))
                + (nt + 0.5) ** 2 * cosh(4 * r))
    if kind == "displaced-fock":
        return l + b2, (2 * l + 1) * b2
    if kind == "squeezed-displaced-fock":
        return (b2 + (2 * l + 1) * sinh(r) ** 2 + l,
                b2 * (cosh(2 * r) + cos(psi) * sinh(2 * r)) * (2 * l + 1)
                + 0.5 * (l * l + l + 1) * sinh(2 * r) ** 2)
    raise ParameterError(f"unknown distribution kind {kind!r}")


# ---------------------------------------------------------------------------
# closed-form probability arrays


def _coherent_probs(nbar: float, length: int) -> np.ndarray:
    if nbar == 0.0:
        out = np.zeros(length)
        out[0] = 1.0
        return out
    n = np.arange(length)
    return np.exp(n * math.log(nbar) - nbar - gammaln(n + 1.0))


def _thermal_probs(nbar: float, length: int) -> np.ndarray:
    if nbar == 0.0:
        out = np.zeros(length)
        out[0] = 1.0
        return out
    n = np.arange(length)
    return np.exp(n * math.log(nbar / (nbar + 1.0))) / (nbar + 1.0)


def _fock_probs(level: int, length: int) -> np.ndarray:
    out = np.zeros(length)
    if level < length:
        out[level] = 1.0
    return out


def _displaced_thermal_probs(beta2: float, nt: float, length: int) -> np.ndarray:
    """Coherent signal plus thermal noise: geometric weight times a Laguerre
    polynomial at negative argument, evaluated by a recurrence that carries
    the geometric damping along to avoid overflow."""
    if nt == 0.0:
        return _coherent_probs(beta2, length)
    if beta2 == 0.0:
        return _thermal_probs(nt, length)
    s = nt / (nt + 1.0)
    x = -beta2 / (nt * (nt + 1.0))
    pref = math.exp(-beta2 / (nt + 1.0)) / (nt + 1.0)
    out = np.empty(length)
    t_prev = 1.0                 # s^0 * L_0(x)
    out[0] = pref * t_prev
    if length == 1:
        return out
    t_cur = s * (1.0 - x)        # s^1 * L_1(x)
    out[1] = pref * t_cur
    for n in range(1, length - 1):
        t_next = (s * (2 * n + 1 - x) * t_cur - s * s * n * t_prev) / (n + 1)
        t_prev, t_cur = t_cur, t_next
        out[n + 1] = pref * t_cur
    return out


def _squeezed_vacuum_probs(r: float, length: int) -> np.ndarray:
    out = np.zeros(length)
    out[0] = 1.0 / cosh(r)
    t2 = math.tanh(r) ** 2
    for n in range(0, length - 2, 2):
        out[n + 2] = out[n] * t2 * (n + 1.0) / (n + 2.0)
    return out


def displaced_fock_pn(n: int, l: int, beta2: float) -> float:
    """Probability of photon number n in a displaced Fock state |l, beta>.

    Stable evaluation: logarithmic factorial prefactor and an upward
    recurrence of degree min(n, l) for the associated Laguerre polynomial.
    Raises NumericalError instead of returning a silent infinity.
    """
    if n < 0 or l < 0:
        raise ParameterError("photon indices must be nonnegative")
    if beta2 < 0:
        raise ParameterError(f"beta2 must be >= 0, got {beta2}")
    if beta2 == 0.0:
        return 1.0 if n == l else 0.0
    k, d = min(n, l), abs(n - l)
    # L_k^d(beta2) by upward recurrence in the degree.
    l_prev = 1.0
    l_cur = 1.0 + d - beta2 if k >= 1 else 1.0
    for j in range(1, k):
        l_next = ((2 * j + 1 + d - beta2) * l_cur - (j + d) * l_prev) / (j + 1)
        l_prev, l_cur = l_cur, l_next
    lag = l_cur if k >= 1 else 1.0
    if lag == 0.0:
        return 0.0
    logp = (gammaln(k + 1.0) - gammaln(k + d + 1.0)
            + d * math.log(beta2) - beta2 + 2.0 * math.log(abs(lag)))
    value = math.exp(logp)
    if not math.isfinite(value):
        raise NumericalError(
            f"displaced Fock probability overflow at n={n}, l={l}, beta2={beta2}")
    return value


def _displaced_fock_probs(level: int, beta2: float, length: int) -> np.ndarray:
    return np.array([displaced_fock_pn(n, level, beta2) for n in range(length)])


def squeezed_coherent_closed(spec: DistSpec, length: int) -> np.ndarray:
    """Printed squeezed-coherent closed form, normalized numerically.

    Hermite polynomial of complex argument with the squeeze-phase offset,
    evaluated by a scaled recurrence; the overall normalization constant is
    not reproduced here, so the result is normalized to unit sum.
    """
    if spec.kind != "squeezed-coherent":
        raise ParameterError("closed form applies to squeezed-coherent only")
    r, psi, beta = spec.r, spec.psi, spec.beta
    if r == 0.0:
        return _coherent_probs(beta ** 2, length)
    t = math.tanh(r)
    z = (beta / math.sqrt(2.0)) * (np.exp(-1j * (psi + math.pi) / 2) / math.sqrt(t)
                                   + np.exp(1j * (psi + math.pi) / 2) * math.sqrt(t))
    # g_n = H_n(z) * (t/2)^{n/2} / sqrt(n!) keeps the recurrence in range.
    c = t / 2.0
    out = np.empty(length)
    g_prev = 1.0 + 0.0j
    out[0] = abs(g_prev) ** 2
    if length > 1:
        g_cur = 2.0 * z * math.sqrt(c)
        out[1] = abs(g_cur) ** 2
        for n in range(1, length - 1):
            g_next = (2.0 * z * math.sqrt(c / (n + 1)) * g_cur
                      - 2.0 * c * math.sqrt(n / (n + 1.0)) * g_prev)
            g_prev, g_cur = g_cur, g_next
            out[n + 1] = abs(g_cur) ** 2
    total = out.sum()
    if not (total > 0 and math.isfinite(total)):
        raise NumericalError("squeezed-coherent closed form over/underflowed")
    return out / total


# ---------------------------------------------------------------------------
# operator-built probability arrays


def _operator_probs(spec: DistSpec, length: int) -> np.ndarray:
    """Efficient operator construction (vector or weighted-column form)."""
    mean, _ = closed_form_moments(spec)
    dim = fock.oracle_dim(length, mean, spec.r)
    kind = spec.kind
    s = fock.squeeze_matrix(dim, spec.r, spec.psi) if spec.r > 0 \
        else np.eye(dim)
    if kind == "squeezed-fock":
        return np.abs(s[:, spec.fock_l]) ** 2
    if kind == "squeezed-thermal":
        return np.abs(s) ** 2 @ fock.thermal_weights(dim, spec.n_thermal)
    if kind == "squeezed-coherent":
        v = s[:, 0]
        if spec.beta > 0:
            v = fock._Displacer(dim).apply(spec.beta, v.astype(np.complex128))
        return np.abs(v) ** 2
    if kind == "squeezed-displaced-fock":
        v = s[:, spec.fock_l]
        if spec.beta > 0:
            v = fock._Displacer(dim).apply(spec.beta, v.astype(np.complex128))
        return np.abs(v) ** 2
    if kind == "displaced-squeezed-thermal":
        op = s
        if spec.beta > 0:
            op = fock.displacement_matrix(dim, spec.beta) @ s
        return np.abs(op) ** 2 @ fock.thermal_weights(dim, spec.n_thermal)
    if kind == "mixed-squeezed-coherent-thermal":
        return _squeezed_coherent_plus_thermal(spec, dim)
    raise ParameterError(f"no operator path for kind {kind!r}")


def _squeezed_coherent_plus_thermal(spec: DistSpec, dim: int) -> np.ndarray:
    """Thermal P-function convolution of the displaced squeezed vacuum,
    by adaptive 2-D Gauss-Hermite quadrature on state vectors."""
    s = fock.squeeze_matrix(dim, spec.r, spec.psi) if spec.r > 0 else np.eye(dim)
    psi_sc = s[:, 0].astype(np.complex128)
    if spec.n_thermal == 0.0:
        if spec.beta > 0:
            psi_sc = fock._Displacer(dim).apply(spec.beta, psi_sc)
        return np.abs(psi_sc) ** 2
    disp = fock._Displacer(dim)
    scale = math.sqrt(spec.n_thermal)
    nvec = np.arange(dim)
    prev = None
    for order in fock._GH_ORDERS:
        nodes, weights = np.polynomial.hermite.hermgauss(order)
        probs = np.zeros(dim)
        for i in range(order):
            for j in range(order):
                gamma = spec.beta + scale * complex(nodes[i], nodes[j])
                v = disp.apply(gamma, psi_sc)
                probs += (weights[i] * weights[j] / math.pi) * np.abs(v) ** 2
        mean = float(nvec @ probs)
        var = float((nvec * nvec) @ probs) - mean * mean
        if prev is not None:
            ok_mean = abs(mean - prev[0]) <= fock._GH_MOMENT_TOL * max(1.0, abs(mean))
            ok_var = abs(var - prev[1]) <= fock._GH_MOMENT_TOL * max(1.0, abs(var))
            if ok_mean and ok_var:
                return probs
        prev = (mean, var)
    raise NumericalError("thermal convolution failed to stabilize")


# ---------------------------------------------------------------------------
# assembly


def _raw_probs(spec: DistSpec, length: int) -> np.ndarray:
    kind = spec.kind
    if kind == "coherent":
        return _coherent_probs(spec.beta ** 2, length)
    if kind == "thermal":
        return _thermal_probs(spec.n_thermal, length)
    if kind == "fock":
        return _fock_probs(spec.fock_l, length)
    if kind == "mixed-coherent-thermal":
        return _displaced_thermal_probs(spec.beta ** 2, spec.n_thermal, length)
    if kind == "squeezed-vacuum":
        return _squeezed_vacuum_probs(spec.r, length)
    if kind == "displaced-fock":
        return _displaced_fock_probs(spec.fock_l, spec.beta ** 2, length)
    return _operator_probs(spec, length)


def make_distribution(spec: DistSpec,
                      policy: TailPolicy = TailPolicy()) -> PhotonDistribution:
    """Truncated distribution for the given kind and tail policy.

    n_max is the smallest n whose cumulative tail falls below tail_tol.
    Raises TruncationError (with the achieved tail mass) when the policy
    cannot be met under n_cap, NumericalError on NaN or genuinely negative
    probabilities.
    """
    mean, var = closed_form_moments(spec)
    length = int(mean + 10.0 * math.sqrt(var + 1.0)) + 25
    if policy.n_cap is not None:
        length = max(length, policy.n_cap + 2)

    operator_built = spec.kind not in _CLOSED_FORM
    for _ in range(_GROW_ROUNDS):
        probs = _raw_probs(spec, length)
        probs = _sanitize(probs, spec)
        if operator_built and probs[-1] > fock.GUARD_ROW_TOL:
            # Unitarity on the truncated space reflects escaping mass back
            # inside, so a populated guard row means the build is not to be
            # trusted yet; enlarge and retry.
            length = int(length * 1.6) + 40
            continue
        tail = 1.0 - np.cumsum(probs)
        hits = np.nonzero(tail < policy.tail_tol)[0]
        if hits.size:
            n_max = int(hits[0])
            if policy.n_cap is not None and n_max > policy.n_cap:
                raise TruncationError(
                    f"tail_tol {policy.tail_tol} needs n_max={n_max}, above "
                    f"n_cap={policy.n_cap}; achieved tail "
                    f"{tail[policy.n_cap]:.3e}",
                    achieved_tail=float(tail[policy.n_cap]))
            kept = probs[:n_max + 1].copy()
            total = math.fsum(kept.tolist())
            if total > 1.0 + 1e-12:
                raise NumericalError(
                    f"probability sum {total} exceeds 1 for {spec.kind}")
            kept.flags.writeable = False
            return PhotonDistribution(probs=kept, tail_mass=1.0 - total,
                                      mean_closed=mean, var_closed=var,
                                      spec=spec)
        if policy.n_cap is not None and length > policy.n_cap + 1:
            raise TruncationError(
                f"tail_tol {policy.tail_tol} unreachable under "
                f"n_cap={policy.n_cap}; achieved tail "
                f"{tail[policy.n_cap]:.3e}",
                achieved_tail=float(tail[policy.n_cap]))
        length = int(length * 1.6) + 40
    raise TruncationError(
        f"tail_tol {policy.tail_tol} not reached by n={length} for {spec.kind}",
        achieved_tail=float(1.0 - math.fsum(probs.tolist())))


def _sanitize(probs: np.ndarray, spec: DistSpec) -> np.ndarray:
    if np.any(np.isnan(probs)):
        raise NumericalError(f"NaN probability for kind {spec.kind!r}")
    low = probs.min()
    if low < _NEG_CLAMP:
        raise NumericalError(
            f"probability {low:.3e} below clamp threshold for {spec.kind!r}")
    probs = probs.copy()
    probs[probs < _FLUSH] = 0.0
    return probs


def empirical_moments(dist: PhotonDistribution) -> tuple[float, float]:
    """(mean, variance) of the truncated, renormalized probabilities,
    computed with compensated summation."""
    if not dist.tail_mass < 1e-9:
        raise ParameterError(
            f"tail mass {dist.tail_mass:.3e} too large for moment estimates")
    p = dist.probs.tolist()
    total = math.fsum(p)
    m1 = math.fsum(n * v for n, v in enumerate(p)) / total
    m2 = math.fsum(n * n * v for n, v in enumerate(p)) / total
    return m1, m2 - m1 * m1
