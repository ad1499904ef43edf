"""Classical kicked top: stroboscopic map on the unit sphere and Lyapunov exponents.

One period is a kick followed by free precession, both exact rotations:

    s -> R_z(alpha) R_x(k * s_x) s

with ``R_x(t)`` turning (y, z) by ``t`` and ``R_z(a)`` turning (x, y) by ``a``.
This is the Heisenberg-picture limit of ``U^dag J U / J`` for the Floquet
operator in :mod:`kickedtop.spin`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .spin import ModelParams

RENORM_TOL = _kernels.RENORM_TOL
DEFAULT_WARMUP = 100


def make_rng(seed, *stream):
    """Counter-based generator for substream ``stream`` of ``seed``."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([int(seed), *map(int, stream)])))


def _renormalize(s):
    n = np.linalg.norm(s, axis=-1, keepdims=True)
    return np.where(np.abs(n - 1.0) > RENORM_TOL, s / n, s)


def rot_x(theta, v):
    c, s = np.cos(theta), np.sin(theta)
    x, y, z = v[..., 0], v[..., 1], v[..., 2]
    return np.stack([x, c * y - s * z, s * y + c * z], axis=-1)


def rot_z(alpha, v):
    c, s = math.cos(alpha), math.sin(alpha)
    x, y, z = v[..., 0], v[..., 1], v[..., 2]
    return np.stack([c * x - s * y, s * x + c * y, z], axis=-1)


def kick(s, k):
    s = np.asarray(s, dtype=float)
    return rot_x(k * s[..., 0], s)


def map_step(s, params: ModelParams, renormalize=True):
    """One period of the map for unit vector(s) ``s`` of shape ``(..., 3)``."""
    out = rot_z(params.alpha, kick(s, params.k))
    return _renormalize(out) if renormalize else out


def inverse_map_step(s, params: ModelParams):
    s = rot_z(-params.alpha, np.asarray(s, dtype=float))
    return _renormalize(rot_x(-params.k * s[..., 0], s))


def orbit(s0, params: ModelParams, n_steps):
    """Points ``f(s0), ..., f^n(s0)`` as an ``(n_steps, 3)`` array."""
    out = np.empty((int(n_steps), 3))
    _kernels.orbit(np.asarray(s0, dtype=float), params.k, params.alpha, int(n_steps), out)
    return out


def jacobian(s, params: ModelParams):
    """3x3 derivative of ``map_step`` (extended off the sphere by the same formula)."""
    s = np.asarray(s, dtype=float)
    th = params.k * s[0]
    c, sn = math.cos(th), math.sin(th)
    rx = np.array([[1.0, 0.0, 0.0], [0.0, c, -sn], [0.0, sn, c]])
    kicked = rx @ s
    # d/dtheta of R_x(theta) s, times d(theta)/ds = k e_x
    drx_s = np.array([0.0, -kicked[2], kicked[1]])
    dk = rx + params.k * np.outer(drx_s, [1.0, 0.0, 0.0])
    ca, sa = math.cos(params.alpha), math.sin(params.alpha)
    rz = np.array([[ca, -sa, 0.0], [sa, ca, 0.0], [0.0, 0.0, 1.0]])
    return rz @ dk


@dataclass(frozen=True)
class TangentState:
    base: np.ndarray
    v: np.ndarray
    log_norm_accum: float = 0.0


def random_tangent(s, rng):
    """Random unit vector(s) tangent to the sphere at ``s``."""
    s = np.atleast_2d(np.asarray(s, dtype=float))
    g = rng.standard_normal(s.shape)
    g -= np.sum(g * s, axis=1, keepdims=True) * s
    return g / np.linalg.norm(g, axis=1, keepdims=True)


def tangent_step(t: TangentState, params: ModelParams) -> TangentState:
    """Push the tangent vector through the exact Jacobian, then re-project and renormalize."""
    s = t.base
    th = params.k * s[0]
    kicked = rot_x(th, s)
    w = rot_x(th, t.v) + (params.k * t.v[0]) * np.array([0.0, -kicked[2], kicked[1]])
    base = _renormalize(rot_z(params.alpha, kicked))
    u = rot_z(params.alpha, w)
    u = u - np.dot(u, base) * base
    norm = float(np.linalg.norm(u))
    return TangentState(base=base, v=u / norm, log_norm_accum=t.log_norm_accum + math.log(norm))


@dataclass(frozen=True)
class FTLEResult:
    """Finite-time exponent ``value`` over ``tau`` kicks; NaN when ``regular_flag`` is set."""

    value: float
    tau: int
    aligned: bool
    regular_flag: bool = False


def ftle_batch(points, taus, params: ModelParams, warmup=DEFAULT_WARMUP, seed=0,
               v0=None, backward=True, stream=0):
    """Finite-time Lyapunov exponents for many starting points and windows at once.

    Parameters
    ----------
    points : (n, 3) array
        Unit vectors; each starts its own trajectory.
    taus : sequence of int
        Window lengths. All windows share the same start, so one run of
        ``max(taus)`` steps yields every value.
    warmup : int
        Renormalized alignment steps applied to the tangent vector before the
        window. With ``backward=True`` they run along the stored backward
        orbit, so the aligned vector sits at the starting point itself and
        the window begins there. With ``backward=False`` the base point moves
        forward ``warmup`` steps and the window starts where it lands.
    seed, stream : int
        Select the generator for the random initial tangent vectors.
    v0 : (n, 3) array, optional
        Explicit initial tangent vectors (overrides the generator).

    Returns
    -------
    (n, len(taus)) array ordered like ``taus``.
    """
    pts = np.ascontiguousarray(np.atleast_2d(np.asarray(points, dtype=float)))
    taus = np.asarray(taus, dtype=np.int64)
    if taus.size == 0 or np.any(taus < 1):
        raise ValueError("window lengths must be >= 1")
    if warmup < 0:
        raise ValueError("warmup must be >= 0")
    if v0 is None:
        v0 = random_tangent(pts, make_rng(seed, 1, stream))
    v0 = np.ascontiguousarray(np.atleast_2d(np.asarray(v0, dtype=float)))
    checkpoints, inverse = np.unique(taus, return_inverse=True)
    out = np.empty((pts.shape[0], checkpoints.size))
    _kernels.ftle_checkpoints(pts, v0, params.k, params.alpha, int(warmup), bool(backward),
                              checkpoints.astype(np.int64), out)
    return out[:, inverse.ravel()]


def ftle(x0, tau, params: ModelParams, warmup=DEFAULT_WARMUP, seed=0, v0=None, backward=True):
    """FTLE of a single trajectory over ``tau`` kicks after tangent alignment."""
    if tau < 1:
        raise ValueError("tau must be >= 1")
    vv = None if v0 is None else np.atleast_2d(v0)
    val = ftle_batch(np.atleast_2d(x0), [tau], params, warmup=warmup, seed=seed, v0=vv,
                     backward=backward)[0, 0]
    return FTLEResult(value=float(val), tau=int(tau), aligned=warmup > 0)


def asymptotic_lyapunov(x0, T, params: ModelParams, warmup=DEFAULT_WARMUP, seed=0):
    return ftle(x0, T, params, warmup=warmup, seed=seed).value


def regular_threshold(T):
    """Default cut ``max(10 ln T / T, 1e-3)`` below which an exponent counts as zero."""
    return max(10.0 * math.log(T) / T, 1e-3)


def classify_regular(lambda_inf, T, threshold=None):
    eps = regular_threshold(T) if threshold is None else threshold
    return np.asarray(lambda_inf) < eps


def sphere_uniform(n, rng):
    """``n`` points uniform in area (uniform in cos(theta) and phi)."""
    u = rng.uniform(-1.0, 1.0, n)
    phi = rng.uniform(0.0, 2.0 * np.pi, n)
    r = np.sqrt(1.0 - u * u)
    return np.stack([r * np.cos(phi), r * np.sin(phi), u], axis=1)


@dataclass(frozen=True)
class ChaoticFraction:
    mu: float
    stderr: float
    n_chaotic: int
    n_samples: int
    T: int
    threshold: float
    lambdas: np.ndarray


def chaotic_fraction(params: ModelParams, n_samples=1000, T=10**5, seed=0,
                     warmup=DEFAULT_WARMUP, threshold=None) -> ChaoticFraction:
    """Fraction of area-uniform initial conditions classified chaotic.

    The standard error is the binomial ``sqrt(mu (1 - mu) / n)``.
    """
    if n_samples < 1:
        raise ValueError("n_samples must be >= 1")
    rng = make_rng(seed, 2)
    pts = sphere_uniform(n_samples, rng)
    lam = ftle_batch(pts, [T], params, warmup=warmup, seed=seed, stream=2)[:, 0]
    eps = regular_threshold(T) if threshold is None else threshold
    chaotic = ~classify_regular(lam, T, eps)
    n_ch = int(chaotic.sum())
    mu = n_ch / n_samples
    return ChaoticFraction(mu=mu, stderr=math.sqrt(mu * (1.0 - mu) / n_samples), n_chaotic=n_ch,
                           n_samples=n_samples, T=int(T), threshold=eps, lambdas=lam)
