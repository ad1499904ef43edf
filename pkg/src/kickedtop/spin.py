"""Angular momentum algebra in the Dicke basis and the kicked-top Floquet operator.

Basis ordering is fixed throughout the package: index ``i`` holds the Dicke
state ``|J, m>`` with ``m = i - J``, i.e. ascending ``m = -J, ..., +J``.

The one-period operator is

    U = exp(-i alpha Jz) exp(-i k Jx^2 / (2J)),

and ``U |phi_j> = exp(i phi_j) |phi_j>`` defines the eigenphases.
"""

from __future__ import annotations

import hashlib
import os
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import scipy.linalg as sla

from .errors import ConfigError, EigensolverError, NonUnitaryError, NumericalError

TWO_PI = 2.0 * np.pi

UNITARITY_TOL = 1e-8
CACHE_FORMAT = "kickedtop-spectrum/1"
CACHE_ENV = "KICKEDTOP_CACHE_DIR"


@dataclass(frozen=True)
class ModelParams:
    """Kick strength ``k``, precession angle ``alpha`` (rad) and integer spin ``J``."""

    k: float
    alpha: float
    J: int

    def __post_init__(self):
        if isinstance(self.J, bool) or int(self.J) != self.J or self.J < 1:
            raise ConfigError(f"J must be a positive integer, got {self.J!r}")
        object.__setattr__(self, "J", int(self.J))
        object.__setattr__(self, "k", float(self.k))
        object.__setattr__(self, "alpha", float(self.alpha))
        if not np.isfinite(self.k) or self.k < 0:
            raise ConfigError(f"k must be finite and >= 0, got {self.k}")
        if not 0.0 <= self.alpha < TWO_PI:
            raise ConfigError(f"alpha must lie in [0, 2pi), got {self.alpha}")

    @property
    def N(self) -> int:
        return 2 * self.J + 1

    @property
    def hbar_eff(self) -> float:
        return 1.0 / self.J

    def with_k(self, k):
        return ModelParams(k=k, alpha=self.alpha, J=self.J)


@dataclass(frozen=True)
class DickeBasis:
    J: int

    def __post_init__(self):
        if int(self.J) != self.J or self.J < 1:
            raise ConfigError(f"J must be a positive integer, got {self.J!r}")
        object.__setattr__(self, "J", int(self.J))

    @property
    def N(self) -> int:
        return 2 * self.J + 1

    @property
    def m(self) -> np.ndarray:
        return np.arange(-self.J, self.J + 1, dtype=float)


def ladder_coefficients(J):
    """``sqrt(J(J+1) - m(m+1))`` for ``m = -J .. J-1``: the ``J+`` matrix elements."""
    m = np.arange(-J, J, dtype=float)
    return np.sqrt(J * (J + 1.0) - m * (m + 1.0))


def build_jx_jy_jz(basis: DickeBasis):
    """Dense complex matrices of Jx, Jy, Jz in the ascending-m Dicke basis."""
    N = basis.N
    jp = np.zeros((N, N), dtype=complex)
    idx = np.arange(N - 1)
    jp[idx + 1, idx] = ladder_coefficients(basis.J)
    jm = jp.T.copy()
    jx = 0.5 * (jp + jm)
    jy = -0.5j * (jp - jm)
    jz = np.diag(basis.m).astype(complex)
    return jx, jy, jz


def _jx_eigensystem(J):
    # Jx is real symmetric tridiagonal with zero diagonal in the Dicke basis.
    off = 0.5 * ladder_coefficients(J)
    N = 2 * J + 1
    try:
        w, V = sla.eigh_tridiagonal(np.zeros(N), off)
    except (sla.LinAlgError, ValueError) as exc:
        raise EigensolverError(f"Jx eigensolver failed for J={J}: {exc}") from exc
    jx_v = np.zeros_like(V)
    jx_v[1:] += off[:, None] * V[:-1]
    jx_v[:-1] += off[:, None] * V[1:]
    residual = float(np.max(np.abs(jx_v - V * w)))
    if residual > 1e-9 * max(J, 1):
        raise EigensolverError(f"Jx eigendecomposition residual {residual:.3e}", residual)
    return w, V


def unitarity_residual(U):
    N = U.shape[0]
    return float(np.max(np.abs(U.conj().T @ U - np.eye(N))))


def build_floquet(params: ModelParams, tol=1e-10):
    """Floquet matrix U. Raises :class:`NumericalError` if ``max|U^dag U - 1| > tol``."""
    J = params.J
    w, V = _jx_eigensystem(J)
    kick = (V * np.exp(-1j * params.k * w**2 / (2.0 * J))) @ V.T
    m = np.arange(-J, J + 1, dtype=float)
    U = np.exp(-1j * params.alpha * m)[:, None] * kick
    res = unitarity_residual(U)
    if res > tol:
        raise NumericalError(f"Floquet operator not unitary: residual {res:.3e}", res)
    return U


def parity_sectors(basis: DickeBasis):
    """Index sets of the two eigenspaces of ``exp(-i pi Jz)``: even m first, odd m second."""
    m = np.arange(-basis.J, basis.J + 1)
    idx = np.arange(basis.N)
    return idx[m % 2 == 0], idx[m % 2 != 0]


@dataclass(frozen=True)
class FloquetSpectrum:
    """Eigenphases in ``[0, 2pi)`` (ascending) with eigenvectors as columns.

    ``sectors`` labels each eigenvector by its parity under ``exp(-i pi Jz)``
    (+1 even m, -1 odd m, 0 if it mixes sectors).
    """

    eigenphases: np.ndarray
    eigenvectors: np.ndarray
    unitarity_residual: float
    sectors: np.ndarray
    params: ModelParams | None = field(default=None, compare=False)

    @property
    def N(self) -> int:
        return self.eigenphases.shape[0]

    def reconstruct(self):
        V = self.eigenvectors
        return (V * np.exp(1j * self.eigenphases)) @ V.conj().T

    def sector_phases(self, label):
        return np.sort(self.eigenphases[self.sectors == label])


def _wrap_phases(z):
    ph = np.mod(np.angle(z), TWO_PI)
    return np.where(ph >= TWO_PI, ph - TWO_PI, ph)


def _schur_block(block, tol):
    try:
        T, Z = sla.schur(block, output="complex")
    except (sla.LinAlgError, ValueError) as exc:
        raise EigensolverError(f"Schur decomposition failed: {exc}") from exc
    off = float(np.max(np.abs(np.triu(T, 1)))) if T.shape[0] > 1 else 0.0
    if off > tol:
        raise EigensolverError(f"Schur form not diagonal (off-diagonal {off:.3e})", off)
    return np.diag(T), Z


def _canonical_order(phases, vectors):
    # Fix each vector's global phase (largest component real positive), then
    # sort by phase with ties broken by position of that component.
    lead = np.argmax(np.abs(vectors), axis=0)
    cols = np.arange(vectors.shape[1])
    pivot = vectors[lead, cols]
    vectors = vectors * (np.abs(pivot) / pivot)[None, :]
    order = np.lexsort((lead, phases))
    return phases[order], vectors[:, order], order


def diagonalize_floquet(U, sectors=None, params=None, tol=UNITARITY_TOL):
    """Spectral decomposition of a unitary matrix via complex Schur form.

    Parameters
    ----------
    U : (N, N) complex array
        Unitary matrix; rejected if ``max|U^dag U - 1| > tol``.
    sectors : sequence of index arrays, optional
        Invariant coordinate blocks (e.g. from :func:`parity_sectors`). Each
        block is diagonalized on its own; coupling between blocks above
        ``tol`` is an error.
    params : ModelParams, optional
        Stored on the result for bookkeeping.

    Returns
    -------
    FloquetSpectrum
    """
    U = np.asarray(U, dtype=complex)
    N = U.shape[0]
    res = unitarity_residual(U)
    if res > tol:
        raise NonUnitaryError(f"input is not unitary: residual {res:.3e}", res)

    if sectors is None:
        eig, vecs = _schur_block(U, tol)
        labels = _parity_labels(vecs)
    else:
        blocks = [np.asarray(s, dtype=int) for s in sectors]
        if sum(len(b) for b in blocks) != N:
            raise ValueError("sectors do not partition the basis")
        eig = np.empty(N, dtype=complex)
        vecs = np.zeros((N, N), dtype=complex)
        labels = np.zeros(N, dtype=np.int8)
        col = 0
        for s_idx, b in enumerate(blocks):
            others = np.setdiff1d(np.arange(N), b)
            leak = float(np.max(np.abs(U[np.ix_(others, b)]))) if others.size else 0.0
            if leak > tol:
                raise NumericalError(f"sector {s_idx} not invariant under U (leak {leak:.3e})", leak)
            e, Z = _schur_block(U[np.ix_(b, b)], tol)
            n = len(b)
            eig[col:col + n] = e
            vecs[b, col:col + n] = Z
            labels[col:col + n] = 1 if s_idx == 0 else -1
            col += n

    phases, vecs, order = _canonical_order(_wrap_phases(eig), vecs)
    return FloquetSpectrum(
        eigenphases=phases,
        eigenvectors=vecs,
        unitarity_residual=res,
        sectors=labels[order],
        params=params,
    )


def _parity_labels(vecs):
    N = vecs.shape[0]
    J = (N - 1) // 2
    sign = np.where(np.arange(-J, J + 1) % 2 == 0, 1.0, -1.0)
    expect = np.einsum("i,ij->j", sign, np.abs(vecs) ** 2)
    labels = np.zeros(N, dtype=np.int8)
    labels[expect > 1 - 1e-8] = 1
    labels[expect < -1 + 1e-8] = -1
    return labels


def floquet_spectrum(params: ModelParams):
    """Build U and diagonalize it per parity sector."""
    U = build_floquet(params)
    return diagonalize_floquet(U, sectors=parity_sectors(DickeBasis(params.J)), params=params)


# ---------------------------------------------------------------------------
# on-disk cache


def default_cache_dir():
    env = os.environ.get(CACHE_ENV)
    if env:
        return Path(env)
    return Path.home() / ".cache" / "kickedtop"


def cache_key(params: ModelParams):
    text = f"{CACHE_FORMAT}|J={params.J}|k={params.k!r}|alpha={params.alpha!r}"
    return hashlib.sha256(text.encode()).hexdigest()


def _content_hash(phases, vecs_ri, residual):
    h = hashlib.sha256()
    h.update(np.ascontiguousarray(phases).tobytes())
    h.update(np.ascontiguousarray(vecs_ri).tobytes())
    h.update(np.float64(residual).tobytes())
    return h.hexdigest()


def save_spectrum(spectrum: FloquetSpectrum, path):
    """Write ``spectrum`` to an ``.npz`` container (layout documented in README)."""
    p = spectrum.params
    if p is None:
        raise ValueError("spectrum has no ModelParams attached")
    vecs_ri = np.ascontiguousarray(
        np.stack([spectrum.eigenvectors.real, spectrum.eigenvectors.imag], axis=-1)
    )
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_name(path.name + ".tmp")
    with open(tmp, "wb") as fh:
        np.savez(
            fh,
            format=np.array(CACHE_FORMAT),
            J=np.int64(p.J),
            k=np.float64(p.k),
            alpha=np.float64(p.alpha),
            eigenphases=spectrum.eigenphases.astype(np.float64),
            eigenvectors=vecs_ri,
            unitarity_residual=np.float64(spectrum.unitarity_residual),
            sectors=spectrum.sectors.astype(np.int8),
            content_hash=np.array(_content_hash(spectrum.eigenphases, vecs_ri, spectrum.unitarity_residual)),
        )
    os.replace(tmp, path)
    return path


def load_spectrum(path):
    with np.load(path, allow_pickle=False) as data:
        fmt = str(data["format"])
        if fmt != CACHE_FORMAT:
            raise ValueError(f"unsupported spectrum format {fmt!r}")
        phases = data["eigenphases"]
        vecs_ri = data["eigenvectors"]
        residual = float(data["unitarity_residual"])
        if _content_hash(phases, vecs_ri, residual) != str(data["content_hash"]):
            raise ValueError(f"spectrum cache {path} failed its content hash check")
        params = ModelParams(k=float(data["k"]), alpha=float(data["alpha"]), J=int(data["J"]))
        return FloquetSpectrum(
            eigenphases=phases,
            eigenvectors=vecs_ri[..., 0] + 1j * vecs_ri[..., 1],
            unitarity_residual=residual,
            sectors=data["sectors"],
            params=params,
        )


class SpectrumCache:
    """Directory of cached spectra keyed by ``(J, k, alpha)``."""

    def __init__(self, directory=None):
        self.directory = Path(directory) if directory is not None else default_cache_dir()

    def path_for(self, params: ModelParams):
        return self.directory / f"spectrum-J{params.J}-{cache_key(params)[:20]}.npz"

    def get(self, params: ModelParams):
        path = self.path_for(params)
        if path.exists():
            try:
                spec = load_spectrum(path)
            except (ValueError, KeyError, OSError):
                spec = None
            if spec is not None and spec.params == params:
                return spec
        spec = floquet_spectrum(params)
        save_spectrum(spec, path)
        return spec
