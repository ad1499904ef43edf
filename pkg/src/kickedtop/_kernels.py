"""Compiled per-trajectory loops for the classical map.

Every kernel works on one trajectory per outer iteration with no shared
mutable state, so results do not depend on the number of threads.
"""

import math
import os

import numba
import numpy as np

if "NUMBA_THREADING_LAYER" not in os.environ:
    # the bundled TBB is too old on some systems; avoid the noisy probe
    numba.config.THREADING_LAYER = "workqueue"

RENORM_TOL = 1e-12


@numba.njit(cache=True, inline="always")
def _step(x, y, z, k, ca, sa):
    th = k * x
    c = math.cos(th)
    s = math.sin(th)
    y1 = c * y - s * z
    z1 = s * y + c * z
    return ca * x - sa * y1, sa * x + ca * y1, z1


@numba.njit(cache=True, inline="always")
def _inverse_step(x, y, z, k, ca, sa):
    x0 = ca * x + sa * y
    y0 = -sa * x + ca * y
    th = k * x0
    c = math.cos(th)
    s = math.sin(th)
    return x0, c * y0 + s * z, -s * y0 + c * z


@numba.njit(cache=True, inline="always")
def _renorm(x, y, z):
    n = math.sqrt(x * x + y * y + z * z)
    if abs(n - 1.0) > RENORM_TOL:
        return x / n, y / n, z / n
    return x, y, z


@numba.njit(cache=True, inline="always")
def _tangent(x, y, z, vx, vy, vz, k, ca, sa):
    """Advance base and tangent by one step; returns new base, unit tangent and log stretch."""
    th = k * x
    c = math.cos(th)
    s = math.sin(th)
    y1 = c * y - s * z
    z1 = s * y + c * z
    dth = k * vx
    wy = c * vy - s * vz - dth * z1
    wz = s * vy + c * vz + dth * y1
    nx = ca * x - sa * y1
    ny = sa * x + ca * y1
    nz = z1
    nx, ny, nz = _renorm(nx, ny, nz)
    ux = ca * vx - sa * wy
    uy = sa * vx + ca * wy
    uz = wz
    d = ux * nx + uy * ny + uz * nz
    ux -= d * nx
    uy -= d * ny
    uz -= d * nz
    norm = math.sqrt(ux * ux + uy * uy + uz * uz)
    return nx, ny, nz, ux / norm, uy / norm, uz / norm, math.log(norm)


@numba.njit(cache=True)
def orbit(s0, k, alpha, n_steps, out):
    ca = math.cos(alpha)
    sa = math.sin(alpha)
    x, y, z = s0[0], s0[1], s0[2]
    for t in range(n_steps):
        x, y, z = _step(x, y, z, k, ca, sa)
        x, y, z = _renorm(x, y, z)
        out[t, 0] = x
        out[t, 1] = y
        out[t, 2] = z


@numba.njit(cache=True, parallel=True)
def ftle_checkpoints(points, v0, k, alpha, warmup, backward, checkpoints, out):
    """Cumulative mean log-stretching at each checkpoint step count.

    ``out[i, j] = (1/c_j) * sum of log stretch over the first c_j steps``
    of the window started at ``points[i]`` (``backward=True``) or at the
    point reached after ``warmup`` forward alignment steps.
    """
    ca = math.cos(alpha)
    sa = math.sin(alpha)
    n = points.shape[0]
    n_cp = checkpoints.shape[0]
    total = checkpoints[n_cp - 1]
    for i in numba.prange(n):
        x, y, z = points[i, 0], points[i, 1], points[i, 2]
        vx, vy, vz = v0[i, 0], v0[i, 1], v0[i, 2]
        if backward and warmup > 0:
            past = np.empty((warmup, 3))
            px, py, pz = x, y, z
            for t in range(warmup):
                px, py, pz = _inverse_step(px, py, pz, k, ca, sa)
                px, py, pz = _renorm(px, py, pz)
                past[warmup - 1 - t, 0] = px
                past[warmup - 1 - t, 1] = py
                past[warmup - 1 - t, 2] = pz
            # re-tangentialize the initial vector at the earliest base point
            bx, by, bz = past[0, 0], past[0, 1], past[0, 2]
            d = vx * bx + vy * by + vz * bz
            vx -= d * bx
            vy -= d * by
            vz -= d * bz
            nv = math.sqrt(vx * vx + vy * vy + vz * vz)
            vx /= nv
            vy /= nv
            vz /= nv
            for t in range(warmup):
                _, _, _, vx, vy, vz, _ = _tangent(past[t, 0], past[t, 1], past[t, 2], vx, vy, vz, k, ca, sa)
            # vx.. is now attached to the stored successor, i.e. the start point
            d = vx * x + vy * y + vz * z
            vx -= d * x
            vy -= d * y
            vz -= d * z
            nv = math.sqrt(vx * vx + vy * vy + vz * vz)
            vx /= nv
            vy /= nv
            vz /= nv
        elif warmup > 0:
            for t in range(warmup):
                x, y, z, vx, vy, vz, _ = _tangent(x, y, z, vx, vy, vz, k, ca, sa)
        acc = 0.0
        j = 0
        for t in range(1, total + 1):
            x, y, z, vx, vy, vz, ls = _tangent(x, y, z, vx, vy, vz, k, ca, sa)
            acc += ls
            while j < n_cp and checkpoints[j] == t:
                out[i, j] = acc / t
                j += 1


@numba.njit(cache=True, parallel=True)
def ftle_windows(points, v0, k, alpha, transient, tau, n_windows, out_vals, out_pts):
    """Consecutive ``tau``-step FTLE windows along long trajectories."""
    ca = math.cos(alpha)
    sa = math.sin(alpha)
    for i in numba.prange(points.shape[0]):
        x, y, z = points[i, 0], points[i, 1], points[i, 2]
        vx, vy, vz = v0[i, 0], v0[i, 1], v0[i, 2]
        for t in range(transient):
            x, y, z, vx, vy, vz, _ = _tangent(x, y, z, vx, vy, vz, k, ca, sa)
        for w in range(n_windows):
            out_pts[i, w, 0] = x
            out_pts[i, w, 1] = y
            out_pts[i, w, 2] = z
            acc = 0.0
            for t in range(tau):
                x, y, z, vx, vy, vz, ls = _tangent(x, y, z, vx, vy, vz, k, ca, sa)
                acc += ls
            out_vals[i, w] = acc / tau
