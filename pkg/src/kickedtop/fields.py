"""Phase-space grids and scalar fields: PR, FTLE and Gaussian-smoothed FTLE."""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import scipy.sparse as sps
from scipy.spatial import cKDTree

from . import classical
from .coherent import angles_from_spins, coherent_amplitudes, spins_from_angles, spins_from_qp, stereographic
from .errors import ConfigError, DimensionMismatchError
from .spin import FloquetSpectrum, ModelParams

FIELD_FORMAT = "kickedtop-field/1"
DEFAULT_CAP = 1e-6
GRID_MODES = ("sphere", "disk", "trajectory")


@dataclass(frozen=True, eq=False)
class Grid:
    """Sample points on the sphere.

    ``rows``/``cols`` locate each point in a ``shape`` raster (row-major in the
    generating coordinates: cos(theta) x phi for ``sphere``, P x Q for
    ``disk``). Both raster modes are equal-area, so ``area`` is constant.
    """

    spins: np.ndarray
    mode: str
    shape: tuple
    rows: np.ndarray
    cols: np.ndarray
    area: np.ndarray
    cap: float = DEFAULT_CAP

    def __len__(self):
        return self.spins.shape[0]

    @property
    def theta(self):
        return angles_from_spins(self.spins)[0]

    @property
    def phi(self):
        return angles_from_spins(self.spins)[1]

    @property
    def qp(self):
        return stereographic(self.spins)

    @property
    def resolution(self):
        return "x".join(str(n) for n in self.shape)

    def raster(self, values, fill=np.nan):
        """Scatter per-point ``values`` into a ``shape`` matrix."""
        if self.mode == "trajectory":
            raise ValueError("trajectory samples have no raster layout")
        out = np.full(self.shape, fill, dtype=float)
        out[self.rows, self.cols] = values
        return out


def _outside_cap(spins, cap):
    # geodesic distance from the north pole is theta
    return angles_from_spins(spins)[0] >= cap


def sphere_grid(n_u=200, n_phi=200, cap=DEFAULT_CAP) -> Grid:
    """Cell centres of an ``n_u x n_phi`` raster uniform in cos(theta) and phi."""
    u = -1.0 + (np.arange(n_u) + 0.5) * (2.0 / n_u)
    phi = (np.arange(n_phi) + 0.5) * (2.0 * np.pi / n_phi)
    rows, cols = np.meshgrid(np.arange(n_u), np.arange(n_phi), indexing="ij")
    uu, pp = np.meshgrid(u, phi, indexing="ij")
    s = spins_from_angles(np.arccos(uu), pp).reshape(-1, 3)
    keep = _outside_cap(s, cap)
    cell = (2.0 / n_u) * (2.0 * np.pi / n_phi)
    return Grid(spins=s[keep], mode="sphere", shape=(n_u, n_phi), rows=rows.ravel()[keep],
                cols=cols.ravel()[keep], area=np.full(int(keep.sum()), cell), cap=cap)


def disk_grid(n_q=200, n_p=200, cap=DEFAULT_CAP) -> Grid:
    """Cell centres of a uniform (Q, P) raster on [-2, 2]^2 restricted to the disk."""
    q = -2.0 + (np.arange(n_q) + 0.5) * (4.0 / n_q)
    p = -2.0 + (np.arange(n_p) + 0.5) * (4.0 / n_p)
    rows, cols = np.meshgrid(np.arange(n_p), np.arange(n_q), indexing="ij")
    pp, qq = np.meshgrid(p, q, indexing="ij")
    r2 = qq * qq + pp * pp
    # 4 - r2 = 2 (1 - cos theta): stay clear of the boundary circle by the cap
    inside = (4.0 - r2) > 2.0 * (1.0 - math.cos(cap))
    s = spins_from_qp(qq[inside], pp[inside])
    cell = (4.0 / n_q) * (4.0 / n_p)
    return Grid(spins=s, mode="disk", shape=(n_p, n_q), rows=rows[inside], cols=cols[inside],
                area=np.full(s.shape[0], cell), cap=cap)


def make_grid(mode, resolution, cap=DEFAULT_CAP) -> Grid:
    n1, n2 = resolution
    if mode == "sphere":
        return sphere_grid(n1, n2, cap)
    if mode == "disk":
        return disk_grid(n2, n1, cap)
    raise ConfigError(f"unknown grid mode {mode!r}")


def point_grid(spins, cap=DEFAULT_CAP) -> Grid:
    """Unstructured samples (e.g. trajectory points), equal weight each."""
    s = np.asarray(spins, dtype=float)
    n = s.shape[0]
    idx = np.arange(n)
    return Grid(spins=s, mode="trajectory", shape=(n,), rows=idx, cols=np.zeros(n, dtype=int),
                area=np.full(n, 4.0 * np.pi / max(n, 1)), cap=cap)


@dataclass(eq=False)
class ScalarField:
    """Values on a grid with a validity mask (``True`` = valid)."""

    grid: Grid
    values: np.ndarray
    mask: np.ndarray
    label: str
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        self.mask = np.asarray(self.mask, dtype=bool)
        if self.values.shape != (len(self.grid),) or self.mask.shape != (len(self.grid),):
            raise DimensionMismatchError("field values/mask do not match the grid")
        if not np.all(np.isfinite(self.values[self.mask])):
            raise ValueError(f"{self.label} field has non-finite values at valid points")

    @property
    def valid_values(self):
        return self.values[self.mask]


# ---------------------------------------------------------------------------
# participation ratio


def participation_ratio(state, spectrum: FloquetSpectrum):
    """Normalized PR ``1 / (N sum_j |<phi_j|psi>|^4)`` of one state."""
    psi = getattr(state, "amplitudes", state)
    psi = np.asarray(psi, dtype=complex)
    if psi.shape != (spectrum.N,):
        raise DimensionMismatchError(f"state has dimension {psi.shape}, spectrum has N={spectrum.N}")
    c2 = np.abs(spectrum.eigenvectors.conj().T @ psi) ** 2
    return float(1.0 / (spectrum.N * np.sum(c2 * c2)))


def participation_ratios(spins, spectrum: FloquetSpectrum, chunk=2048):
    """PR of the coherent states centred at each row of ``spins``."""
    spins = np.atleast_2d(spins)
    N = spectrum.N
    J = (N - 1) // 2
    VH = spectrum.eigenvectors.conj().T
    out = np.empty(spins.shape[0])
    for lo in range(0, spins.shape[0], chunk):
        psi = coherent_amplitudes(spins[lo:lo + chunk], J)
        c2 = np.abs(VH @ psi) ** 2
        out[lo:lo + chunk] = 1.0 / (N * np.sum(c2 * c2, axis=0))
    return out


def pr_field(grid: Grid, spectrum: FloquetSpectrum, regular_mask=None) -> ScalarField:
    """PR at every grid point; points flagged regular are computed but marked invalid."""
    values = participation_ratios(grid.spins, spectrum)
    mask = np.ones(len(grid), dtype=bool) if regular_mask is None else ~np.asarray(regular_mask, bool)
    p = spectrum.params
    meta = {"J": (spectrum.N - 1) // 2}
    if p is not None:
        meta.update(k=p.k, alpha=p.alpha)
    return ScalarField(grid, values, mask, "PR", meta)


# ---------------------------------------------------------------------------
# finite-time Lyapunov fields


@dataclass(eq=False)
class FTLEFields:
    """FTLE fields for several windows plus the regular/chaotic classification."""

    grid: Grid
    fields: dict
    lambda_T: np.ndarray
    regular: np.ndarray
    T: int
    threshold: float


def ftle_fields(grid: Grid, taus, params: ModelParams, T=10**5, warmup=classical.DEFAULT_WARMUP,
                seed=0, threshold=None, backward=True) -> FTLEFields:
    """Uniform-measure FTLE fields for every window in ``taus`` from one pass.

    Each point is also classified with its exponent over ``T`` kicks; regular
    points are masked in every field.
    """
    taus = [int(t) for t in taus]
    if T < max(taus):
        raise ConfigError(f"classification horizon T={T} shorter than the largest window")
    lam = classical.ftle_batch(grid.spins, taus + [int(T)], params, warmup=warmup, seed=seed,
                               backward=backward)
    eps = classical.regular_threshold(T) if threshold is None else threshold
    regular = classical.classify_regular(lam[:, -1], T, eps)
    out = {}
    for j, tau in enumerate(taus):
        meta = {"tau": tau, "k": params.k, "alpha": params.alpha, "measure": "uniform", "T": int(T)}
        out[tau] = ScalarField(grid, lam[:, j], ~regular, "FTLE", meta)
    return FTLEFields(grid, out, lam[:, -1], regular, int(T), eps)


def ftle_field(grid: Grid, tau, params: ModelParams, measure="uniform", **kw) -> ScalarField:
    if measure == "uniform":
        return ftle_fields(grid, [tau], params, **kw).fields[int(tau)]
    if measure == "natural":
        return natural_ftle_field(params, tau, n_samples=len(grid), **kw)
    raise ConfigError(f"unknown sampling measure {measure!r}")


def chaotic_seeds(params: ModelParams, n, T=10**5, seed=0, warmup=classical.DEFAULT_WARMUP,
                  threshold=None, batch=256, max_tries=40):
    """``n`` area-uniform random points whose exponent over ``T`` kicks is positive."""
    rng = classical.make_rng(seed, 3)
    eps = classical.regular_threshold(T) if threshold is None else threshold
    found = []
    for attempt in range(max_tries):
        cand = classical.sphere_uniform(batch, rng)
        lam = classical.ftle_batch(cand, [T], params, warmup=warmup, seed=seed, stream=100 + attempt)[:, 0]
        found.extend(cand[lam >= eps])
        if len(found) >= n:
            return np.array(found[:n])
    raise RuntimeError(f"found only {len(found)} chaotic seeds in {max_tries * batch} draws")


def natural_ftle_field(params: ModelParams, tau, n_samples=40000, n_traj=100, transient=1000,
                       T=10**5, warmup=classical.DEFAULT_WARMUP, seed=0, threshold=None,
                       backward=True) -> ScalarField:
    """FTLE windows sampled along long chaotic trajectories (natural measure).

    Each trajectory contributes consecutive ``tau``-step windows after a
    ``transient``; each value is attributed to its window's starting point.
    """
    del backward  # the transient already aligns the tangent vector
    tau = int(tau)
    starts = chaotic_seeds(params, n_traj, T=T, seed=seed, warmup=warmup, threshold=threshold)
    n_windows = max(1, -(-int(n_samples) // n_traj))
    v0 = classical.random_tangent(starts, classical.make_rng(seed, 4))
    vals = np.empty((n_traj, n_windows))
    pts = np.empty((n_traj, n_windows, 3))
    from ._kernels import ftle_windows

    ftle_windows(np.ascontiguousarray(starts), v0, params.k, params.alpha, int(transient), tau,
                 n_windows, vals, pts)
    grid = point_grid(pts.reshape(-1, 3))
    meta = {"tau": tau, "k": params.k, "alpha": params.alpha, "measure": "natural",
            "n_traj": n_traj, "transient": transient}
    return ScalarField(grid, vals.ravel(), np.ones(vals.size, bool), "FTLE", meta)


# ---------------------------------------------------------------------------
# Gaussian smoothing on the sphere


class GaussianSmoother:
    """Spherical Gaussian average over geodesic distance, truncated at ``truncate`` sigma.

    The sparse weight matrix depends only on the grids and ``sigma2``, so one
    smoother serves every FTLE window on the same grid.
    """

    def __init__(self, source: Grid, sigma2, targets: Grid | None = None, truncate=4.0):
        if not sigma2 > 0:
            raise ConfigError("sigma2 must be positive")
        self.source = source
        self.targets = source if targets is None else targets
        self.sigma2 = float(sigma2)
        gamma_max = min(truncate * math.sqrt(sigma2), math.pi)
        chord = 2.0 * math.sin(0.5 * gamma_max) * (1.0 + 1e-12)
        t_tree = cKDTree(self.targets.spins)
        s_tree = cKDTree(source.spins)
        pairs = t_tree.sparse_distance_matrix(s_tree, chord, output_type="ndarray")
        gamma = 2.0 * np.arcsin(np.clip(0.5 * pairs["v"], 0.0, 1.0))
        keep = gamma <= gamma_max
        i, j = pairs["i"][keep], pairs["j"][keep]
        w = np.exp(-gamma[keep] ** 2 / (2.0 * sigma2)) * source.area[j]
        W = sps.coo_matrix((w, (i, j)), shape=(len(self.targets), len(source))).tocsr()
        W.sum_duplicates()
        W.sort_indices()
        self.weights = W

    def __call__(self, field_: ScalarField) -> ScalarField:
        if field_.grid is not self.source and len(field_.grid) != len(self.source):
            raise DimensionMismatchError("field lives on a different grid")
        valid = field_.mask.astype(float)
        vals = np.where(field_.mask, field_.values, 0.0)
        num = self.weights @ (vals * valid)
        den = self.weights @ valid
        ok = den > 0
        out = np.zeros(len(self.targets))
        out[ok] = num[ok] / den[ok]
        if np.any(field_.mask):
            # a convex combination cannot leave the sample range; clip rounding only
            lo, hi = field_.valid_values.min(), field_.valid_values.max()
            out[ok] = np.clip(out[ok], lo, hi)
        meta = dict(field_.meta, sigma2=self.sigma2)
        return ScalarField(self.targets, out, ok, "GFTLE", meta)


def gftle_field(ftle: ScalarField, sigma2, targets: Grid | None = None, truncate=4.0) -> ScalarField:
    return GaussianSmoother(ftle.grid, sigma2, targets, truncate)(ftle)


def partition_by_intervals(field_: ScalarField, edges):
    """Indices of valid points in each interval ``[e_i, e_{i+1})``.

    Values below ``edges[0]`` or above ``edges[-1]`` join the end intervals,
    so the buckets partition the valid points.
    """
    edges = np.asarray(edges, dtype=float)
    if edges.size < 2 or np.any(np.diff(edges) <= 0):
        raise ValueError("edges must be strictly increasing with at least two entries")
    idx = np.flatnonzero(field_.mask)
    bucket = np.digitize(field_.values[idx], edges[1:-1])
    return [idx[bucket == b] for b in range(edges.size - 1)]


# ---------------------------------------------------------------------------
# file I/O

COLUMNS = ("theta", "phi", "Q", "P", "value", "mask")


def _fmt(x):
    return format(float(x), ".17g")


def write_field_csv(field_: ScalarField, path, sidecar=None):
    """CSV with ``#`` header lines (format, label, parameters, grid) then one row per point.

    A JSON sidecar ``<path>.json`` records ``sidecar`` (full config, seed).
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    g = field_.grid
    theta, phi = angles_from_spins(g.spins)
    with np.errstate(divide="ignore", invalid="ignore"):
        Q, P = stereographic(g.spins)
    header = {"format": FIELD_FORMAT, "label": field_.label}
    header.update({k: field_.meta[k] for k in sorted(field_.meta)})
    header.update(grid=g.mode, resolution=g.resolution, cap=_fmt(g.cap), points=len(g))
    with open(path, "w", newline="") as fh:
        for key, val in header.items():
            fh.write(f"# {key}={val}\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(COLUMNS)
        for i in range(len(g)):
            w.writerow([_fmt(theta[i]), _fmt(phi[i]), _fmt(Q[i]), _fmt(P[i]),
                        _fmt(field_.values[i]), int(field_.mask[i])])
    if sidecar is not None:
        with open(path.with_name(path.name + ".json"), "w") as fh:
            json.dump(sidecar, fh, indent=2, sort_keys=True)
            fh.write("\n")
    return path


def _parse_scalar(text):
    for conv in (int, float):
        try:
            return conv(text)
        except ValueError:
            pass
    return text


def read_field_csv(path, grid: Grid | None = None) -> ScalarField:
    """Inverse of :func:`write_field_csv`; rebuilds the raster grid from the header."""
    header = {}
    with open(path) as fh:
        lines = fh.read().splitlines()
    body = 0
    while lines[body].startswith("#"):
        key, _, val = lines[body][2:].partition("=")
        header[key] = val
        body += 1
    if header.get("format") != FIELD_FORMAT:
        raise ValueError(f"{path}: unsupported field format {header.get('format')!r}")
    data = np.array([row.split(",") for row in lines[body + 1:]], dtype=float).reshape(-1, 6)
    mode = header["grid"]
    cap = float(header["cap"])
    if grid is None:
        if mode == "trajectory":
            grid = point_grid(spins_from_angles(data[:, 0], data[:, 1]), cap)
        else:
            res = tuple(int(n) for n in header["resolution"].split("x"))
            grid = make_grid(mode, res if mode == "sphere" else (res[0], res[1]), cap)
    if len(grid) != data.shape[0]:
        raise DimensionMismatchError(f"{path}: {data.shape[0]} rows for a grid of {len(grid)} points")
    reserved = {"format", "label", "grid", "resolution", "cap", "points"}
    meta = {k: _parse_scalar(v) for k, v in header.items() if k not in reserved}
    return ScalarField(grid, data[:, 4], data[:, 5] > 0, header["label"], meta)
