"""Spin coherent states and the stereographic (Q, P) chart of the unit sphere.

The chart sends the south pole ``Jz = -1`` to the origin and the north pole
to the boundary circle ``Q^2 + P^2 = 4``:

    Q = sqrt(2) Jx / sqrt(1 - Jz),    P = sqrt(2) Jy / sqrt(1 - Jz).

It is area preserving (``dQ dP = dJz dphi``), so (Q, P) is a canonical pair.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln, xlogy

from .errors import DomainError, ProjectionSingularityError
from .spin import TWO_PI, DickeBasis

NORM_TOL = 1e-10


def _one_minus_jz(s):
    # 1 - Jz without cancellation near the north pole
    x, y, z = s[..., 0], s[..., 1], s[..., 2]
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(z > 0, (x * x + y * y) / (1.0 + z), 1.0 - z)


def _azimuth(x, y):
    phi = np.mod(np.arctan2(y, x), TWO_PI)
    return np.where(phi >= TWO_PI, phi - TWO_PI, phi)


def stereographic(s):
    """Vectorized ``(Q, P)`` of unit vectors ``s`` with shape ``(..., 3)``."""
    s = np.asarray(s, dtype=float)
    d = _one_minus_jz(s)
    if np.any(d <= 0):
        raise ProjectionSingularityError("stereographic projection undefined at the north pole")
    f = np.sqrt(2.0 / d)
    return s[..., 0] * f, s[..., 1] * f


def spins_from_qp(Q, P):
    """Vectorized inverse of :func:`stereographic`; returns shape ``(..., 3)``."""
    Q = np.asarray(Q, dtype=float)
    P = np.asarray(P, dtype=float)
    r2 = Q * Q + P * P
    if np.any(r2 >= 4.0):
        raise DomainError("point on or outside the disk Q^2 + P^2 < 4")
    h = 0.5 * np.sqrt(4.0 - r2)
    return np.stack([Q * h, P * h, 0.5 * r2 - 1.0], axis=-1)


def angles_from_spins(s):
    s = np.asarray(s, dtype=float)
    rho = np.hypot(s[..., 0], s[..., 1])
    return np.arctan2(rho, s[..., 2]), _azimuth(s[..., 0], s[..., 1])


def spins_from_angles(theta, phi):
    theta = np.asarray(theta, dtype=float)
    phi = np.asarray(phi, dtype=float)
    st = np.sin(theta)
    return np.stack([st * np.cos(phi), st * np.sin(phi), np.cos(theta)], axis=-1)


@dataclass(frozen=True)
class PhasePoint:
    """A point of the sphere stored in both (Q, P) and (theta, phi) form."""

    Q: float
    P: float
    theta: float
    phi: float

    def __post_init__(self):
        if not self.Q**2 + self.P**2 < 4.0:
            raise DomainError(f"(Q, P) = ({self.Q}, {self.P}) is outside the open disk")

    @classmethod
    def from_qp(cls, Q, P):
        s = spins_from_qp(Q, P)
        theta, phi = angles_from_spins(s)
        return cls(float(Q), float(P), float(theta), float(phi))

    @classmethod
    def from_angles(cls, theta, phi):
        return stereographic_from_spin(spins_from_angles(theta, phi))

    @property
    def spin(self):
        return spins_from_angles(self.theta, self.phi)


def stereographic_from_spin(s) -> PhasePoint:
    s = np.asarray(s, dtype=float)
    if s.shape != (3,):
        raise ValueError("expected a single 3-vector")
    if abs(np.linalg.norm(s) - 1.0) > NORM_TOL:
        raise DomainError(f"spin vector not normalized: |s| = {np.linalg.norm(s)!r}")
    Q, P = stereographic(s)
    theta, phi = angles_from_spins(s)
    return PhasePoint(float(Q), float(P), float(theta), float(phi))


def spin_from_stereographic(p: PhasePoint):
    return spins_from_qp(p.Q, p.P)


def geodesic_distance(a, b):
    """Great-circle angle between two points (PhasePoints or unit 3-vectors)."""
    sa = a.spin if isinstance(a, PhasePoint) else np.asarray(a, dtype=float)
    sb = b.spin if isinstance(b, PhasePoint) else np.asarray(b, dtype=float)
    cross = np.linalg.norm(np.cross(sa, sb), axis=-1)
    dot = np.sum(sa * sb, axis=-1)
    return np.arctan2(cross, dot)


@dataclass(frozen=True)
class CoherentState:
    center: PhasePoint
    amplitudes: np.ndarray
    J: int


def coherent_amplitudes(spins, J):
    """Normalized coherent-state amplitudes, one column per unit vector in ``spins``.

    ``c_m ~ sqrt(C(2J, m+J)) cos(theta/2)^(m+J) sin(theta/2)^(J-m) exp(-i m phi)``
    evaluated in log space, so ``J`` in the thousands does not overflow.
    The state is centred at ``s``: ``<J> = J s``.

    Returns an array of shape ``(2J+1, n_points)``.
    """
    s = np.atleast_2d(np.asarray(spins, dtype=float))
    cos2 = 0.5 * (1.0 + s[:, 2])
    sin2 = 0.5 * _one_minus_jz(s)
    phi = _azimuth(s[:, 0], s[:, 1])
    n = np.arange(2 * J + 1, dtype=float)[:, None]
    log_binom = gammaln(2 * J + 1.0) - gammaln(n + 1.0) - gammaln(2 * J - n + 1.0)
    log_amp = 0.5 * (log_binom + xlogy(n, cos2[None, :]) + xlogy(2 * J - n, sin2[None, :]))
    log_amp -= log_amp.max(axis=0, keepdims=True)
    mag = np.exp(log_amp)
    mag /= np.linalg.norm(mag, axis=0, keepdims=True)
    m = n - J
    return mag * np.exp(-1j * m * phi[None, :])


def coherent_state(p: PhasePoint, basis: DickeBasis) -> CoherentState:
    """Spin coherent state centred at ``p``, explicitly normalized.

    Equivalent to ``exp(zeta J+) |J, -J>`` with ``zeta = (Q - iP) / sqrt(4 - Q^2 - P^2)``.
    """
    if not p.Q**2 + p.P**2 < 4.0:
        raise DomainError("coherent state centre outside the disk")
    amps = coherent_amplitudes(spin_from_stereographic(p), basis.J)[:, 0]
    return CoherentState(center=p, amplitudes=amps, J=basis.J)
