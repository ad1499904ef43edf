"""Experiment orchestration: correspondence runs, phase diagrams and figure data."""

from __future__ import annotations

import dataclasses
import hashlib
import json
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import classical, fields, stats
from .errors import ConfigError
from .spin import TWO_PI, ModelParams, SpectrumCache

log = logging.getLogger(__name__)

DESK_TAUS = (1, 3, 10, 30, 60, 100, 200, 500, 1000, 5000)
PHASE_DIAGRAM_KS = (1.0, 2.0, 3.0, 4.0, 6.0, 10.0)
MANIFEST = "manifest.json"


@dataclass
class ExperimentConfig:
    k: float = 3.0
    alpha: float = 0.84
    J: int = 100
    grid_mode: str = "sphere"
    resolution: tuple = (200, 200)
    polar_cap: float = fields.DEFAULT_CAP
    taus: tuple = DESK_TAUS
    warmup: int = classical.DEFAULT_WARMUP
    warmup_mode: str = "backward"
    horizon: int = 100_000
    threshold: float | None = None
    measure: str = "uniform"
    sigma2: float | None = None
    n_bins: int = stats.DEFAULT_BINS
    seed: int = 0
    output_dir: str = "runs/desk"
    threads: int = 1
    k_list: tuple = PHASE_DIAGRAM_KS
    n_samples: int = 1000
    n_traj: int = 100
    transient: int = 1000
    band: float = 0.02

    def __post_init__(self):
        self.resolution = tuple(int(n) for n in self.resolution)
        self.taus = tuple(int(t) for t in self.taus)
        self.k_list = tuple(float(k) for k in self.k_list)
        self.validate()

    def validate(self):
        try:
            self.params
            for k in self.k_list:
                ModelParams(k, self.alpha, self.J)
        except (TypeError, ValueError) as exc:
            raise ConfigError(str(exc)) from exc
        checks = [
            (self.grid_mode in ("sphere", "disk"), f"grid_mode must be sphere or disk, got {self.grid_mode!r}"),
            (len(self.resolution) == 2 and min(self.resolution) >= 2, "resolution needs two sizes >= 2"),
            (len(self.taus) >= 1 and min(self.taus) >= 1, "taus must be a nonempty list of integers >= 1"),
            (len(set(self.taus)) == len(self.taus), "taus must not repeat"),
            (self.horizon >= max(self.taus, default=1), "horizon must be >= the largest tau"),
            (self.warmup >= 0, "warmup must be >= 0"),
            (self.warmup_mode in ("backward", "forward"), "warmup_mode must be backward or forward"),
            (self.measure in ("uniform", "natural"), "measure must be uniform or natural"),
            (self.sigma2 is None or self.sigma2 > 0, "sigma2 must be positive"),
            (self.threshold is None or self.threshold > 0, "threshold must be positive"),
            (self.n_bins >= 2, "n_bins must be >= 2"),
            (self.threads >= 1, "threads must be >= 1"),
            (len(self.k_list) >= 1, "k_list must be nonempty"),
            (self.n_samples >= 1 and self.n_traj >= 1 and self.transient >= 0, "sample counts must be positive"),
            (0 <= self.band < 1, "band must lie in [0, 1)"),
            (0 < self.polar_cap < 0.1, "polar_cap must be a small positive angle"),
        ]
        for ok, msg in checks:
            if not ok:
                raise ConfigError(msg)

    @property
    def params(self) -> ModelParams:
        return ModelParams(self.k, self.alpha, self.J)

    @property
    def smoothing_sigma2(self):
        return 1.0 / self.J if self.sigma2 is None else self.sigma2

    def to_dict(self):
        d = dataclasses.asdict(self)
        for key in ("resolution", "taus", "k_list"):
            d[key] = list(d[key])
        return d

    def portable_dict(self):
        """Everything that determines results (the output location does not)."""
        d = self.to_dict()
        d.pop("output_dir")
        return d

    @classmethod
    def from_dict(cls, d):
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = set(d) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        try:
            return cls(**d)
        except TypeError as exc:
            raise ConfigError(str(exc)) from exc

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    @classmethod
    def from_json(cls, text):
        try:
            return cls.from_dict(json.loads(text))
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config is not valid JSON: {exc}") from exc

    def config_hash(self):
        blob = json.dumps(self.portable_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()[:16]

    def replace(self, **changes):
        return dataclasses.replace(self, **changes)


PROFILES = {
    "desk": {},
    # long-running: hours on a single core
    "paper": {"J": 500, "horizon": 1_000_000, "resolution": (400, 400), "output_dir": "runs/paper"},
}


def profile(name, **overrides):
    if name not in PROFILES:
        raise ConfigError(f"unknown profile {name!r}; choose from {sorted(PROFILES)}")
    d = ExperimentConfig().to_dict()
    d.update(PROFILES[name])
    d.update(overrides)
    return ExperimentConfig.from_dict(d)


def set_threads(n):
    import numba

    numba.set_num_threads(max(1, min(int(n), numba.config.NUMBA_NUM_THREADS)))


# ---------------------------------------------------------------------------
# comparison curves


def extremal_window(values, taus, kind="max", band=0.02):
    """Contiguous run of windows whose value lies within ``band`` of the extremum.

    Returns ``(i_lo, i_hi, i_ext)`` as indices into ``taus``.
    """
    v = np.asarray(values, dtype=float)
    i_ext = int(np.argmax(v) if kind == "max" else np.argmin(v))
    ext = v[i_ext]
    tol = band * abs(ext)
    inside = (v >= ext - tol) if kind == "max" else (v <= ext + tol)
    lo = hi = i_ext
    while lo > 0 and inside[lo - 1]:
        lo -= 1
    while hi < len(v) - 1 and inside[hi + 1]:
        hi += 1
    return lo, hi, i_ext


def windows_meet(a, b):
    """True when two index ranges overlap or sit next to each other."""
    return a[0] <= b[1] + 1 and b[0] <= a[1] + 1


@dataclass
class ComparisonCurve:
    taus: list
    pearson: list
    js: list
    J: int
    k: float
    alpha: float
    band: float = 0.02
    n_points: list = field(default_factory=list)

    def __post_init__(self):
        if not len(self.taus) == len(self.pearson) == len(self.js):
            raise ValueError("curve lengths do not match the window list")

    @property
    def pearson_extremum(self):
        return extremal_window(self.pearson, self.taus, "max", self.band)

    @property
    def js_extremum(self):
        return extremal_window(self.js, self.taus, "min", self.band)

    @property
    def pearson_window(self):
        lo, hi, _ = self.pearson_extremum
        return self.taus[lo], self.taus[hi]

    @property
    def js_window(self):
        lo, hi, _ = self.js_extremum
        return self.taus[lo], self.taus[hi]

    @property
    def tau_max_pearson(self):
        return self.taus[self.pearson_extremum[2]]

    @property
    def tau_min_js(self):
        return self.taus[self.js_extremum[2]]

    @property
    def windows_agree(self):
        return windows_meet(self.pearson_extremum[:2], self.js_extremum[:2])

    def to_dict(self):
        return {
            "taus": list(self.taus), "pearson": list(self.pearson), "js": list(self.js),
            "J": self.J, "k": self.k, "alpha": self.alpha, "band": self.band,
            "n_points": list(self.n_points),
            "tau_max_pearson": self.tau_max_pearson, "tau_min_js": self.tau_min_js,
            "pearson_window": list(self.pearson_window), "js_window": list(self.js_window),
            "windows_agree": self.windows_agree,
        }


def compare_fields(pr, gftle, n_bins=stats.DEFAULT_BINS):
    """Pearson coefficient and JS distance of PR vs GFTLE over their joint valid points."""
    a, b = stats.joint_valid(pr, gftle)
    cp = stats.pearson(a, b)
    ha = stats.histogram(stats.normalize_for_comparison(a), (0.0, 1.0), n_bins)
    hb = stats.histogram(stats.normalize_for_comparison(b), (0.0, 1.0), n_bins)
    return cp, stats.js_distance(ha, hb), int(a.size)


# ---------------------------------------------------------------------------
# run directory helpers


def _fmt(x):
    return format(float(x), ".17g")


def _write_json(path, obj):
    tmp = Path(str(path) + ".tmp")
    with open(tmp, "w") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True)
        fh.write("\n")
    tmp.replace(path)


def stats_record(quantity, params, value, error=None, binning=None, **extra):
    rec = {"quantity": quantity, "params": params, "value": value, "error_estimate": error,
           "binning": binning}
    rec.update(extra)
    return rec


class RunDir:
    """Output directory with a manifest of completed stages."""

    def __init__(self, config: ExperimentConfig, resume=True):
        self.config = config
        self.path = Path(config.output_dir)
        self.path.mkdir(parents=True, exist_ok=True)
        self.manifest_path = self.path / MANIFEST
        self.manifest = None
        if resume and self.manifest_path.exists():
            with open(self.manifest_path) as fh:
                m = json.load(fh)
            if m.get("config_hash") == config.config_hash():
                self.manifest = m
        if self.manifest is None:
            self.manifest = {"config_hash": config.config_hash(), "config": config.portable_dict(),
                             "stages": {}, "complete": False}
            self.save()

    def done(self, stage):
        return stage in self.manifest["stages"]

    def mark(self, stage, info=None):
        self.manifest["stages"][stage] = info if info is not None else True
        self.save()

    def save(self):
        _write_json(self.manifest_path, self.manifest)

    def file(self, name):
        return self.path / name

    def sidecar(self, **extra):
        d = {"config": self.config.portable_dict(), "config_hash": self.config.config_hash(),
             "seed": self.config.seed}
        d.update(extra)
        return d


def ftle_name(tau):
    return f"ftle_tau{tau:06d}.csv"


def gftle_name(tau):
    return f"gftle_tau{tau:06d}.csv"


def natural_name(tau):
    return f"ftle_natural_tau{tau:06d}.csv"


@dataclass
class CorrespondenceResult:
    curve: ComparisonCurve
    run_dir: Path
    manifest: dict


def run_correspondence(config: ExperimentConfig, cache: SpectrumCache | None = None, resume=True,
                       stop_after=None) -> CorrespondenceResult:
    """Full PR vs GFTLE comparison across the configured time windows.

    Stages (each recorded in ``manifest.json`` and skipped on resume):
    ``classical`` (FTLE fields for all windows plus regular mask), ``pr``,
    optional ``natural`` histograms, then one ``tau:<n>`` stage per window.
    ``stop_after`` ends the run early after the named stage (used to test
    resumption).
    """
    set_threads(config.threads)
    cache = cache or SpectrumCache()
    run = RunDir(config, resume=resume)
    params = config.params
    grid = fields.make_grid(config.grid_mode, config.resolution, config.polar_cap)
    taus = list(config.taus)
    backward = config.warmup_mode == "backward"

    def maybe_stop(stage):
        if stop_after == stage:
            raise _StopRun(stage)

    try:
        if run.done("classical"):
            ftle = {t: fields.read_field_csv(run.file(ftle_name(t)), grid) for t in taus}
            lam_T = fields.read_field_csv(run.file("lyapunov_T.csv"), grid)
            regular = ~lam_T.mask
        else:
            log.info("classical stage: %d points, T=%d", len(grid), config.horizon)
            F = fields.ftle_fields(grid, taus, params, T=config.horizon, warmup=config.warmup,
                                   seed=config.seed, threshold=config.threshold, backward=backward)
            ftle = F.fields
            regular = F.regular
            for t in taus:
                fields.write_field_csv(ftle[t], run.file(ftle_name(t)), run.sidecar(tau=t))
            lam_T = fields.ScalarField(grid, F.lambda_T, ~F.regular, "LYAPUNOV",
                                       {"T": F.T, "k": params.k, "alpha": params.alpha,
                                        "threshold": F.threshold})
            fields.write_field_csv(lam_T, run.file("lyapunov_T.csv"), run.sidecar(T=F.T))
            run.mark("classical", {"regular_fraction": float(F.regular.mean()), "threshold": F.threshold})
        maybe_stop("classical")

        if run.done("pr"):
            pr = fields.read_field_csv(run.file("pr_field.csv"), grid)
        else:
            spectrum = cache.get(params)
            pr = fields.pr_field(grid, spectrum, regular)
            fields.write_field_csv(pr, run.file("pr_field.csv"), run.sidecar(J=params.J))
            run.mark("pr", {"unitarity_residual": spectrum.unitarity_residual})
        maybe_stop("pr")

        if config.measure == "natural" and not run.done("natural"):
            for t in taus:
                nat = fields.natural_ftle_field(params, t, n_samples=len(grid), n_traj=config.n_traj,
                                                transient=config.transient, T=config.horizon,
                                                warmup=config.warmup, seed=config.seed,
                                                threshold=config.threshold)
                fields.write_field_csv(nat, run.file(natural_name(t)), run.sidecar(tau=t))
            run.mark("natural")

        smoother = None
        for t in taus:
            stage = f"tau:{t}"
            if run.done(stage):
                continue
            if smoother is None:
                smoother = fields.GaussianSmoother(grid, config.smoothing_sigma2)
            g = smoother(ftle[t])
            fields.write_field_csv(g, run.file(gftle_name(t)), run.sidecar(tau=t))
            cp, djs, n = compare_fields(pr, g, config.n_bins)
            run.mark(stage, {"pearson": cp, "js": djs, "n_points": n})
            maybe_stop(stage)

        layers = layer_edges(ftle[_closest(taus, 100)], pr)
        run.manifest["layers"] = layers
        st = run.manifest["stages"]
        curve = ComparisonCurve(
            taus=taus,
            pearson=[st[f"tau:{t}"]["pearson"] for t in taus],
            js=[st[f"tau:{t}"]["js"] for t in taus],
            J=params.J, k=params.k, alpha=params.alpha, band=config.band,
            n_points=[st[f"tau:{t}"]["n_points"] for t in taus],
        )
        write_curve(curve, run)
        run.manifest["curve"] = curve.to_dict()
        run.manifest["complete"] = True
        run.save()
    except _StopRun:
        pass
    return CorrespondenceResult(
        curve=_curve_from_manifest(run.manifest, config) if run.manifest["complete"] else None,
        run_dir=run.path, manifest=run.manifest)


class _StopRun(Exception):
    pass


def _closest(taus, target):
    return min(taus, key=lambda t: (abs(math.log(t / target)), t))


def _curve_from_manifest(m, config):
    c = m["curve"]
    return ComparisonCurve(c["taus"], c["pearson"], c["js"], c["J"], c["k"], c["alpha"], c["band"],
                           c["n_points"])


def layer_edges(ftle, pr, **kw):
    """Layer boundaries at the minima between modes of the FTLE and PR densities."""
    out = {}
    for name, f in (("ftle", ftle), ("pr", pr)):
        v = f.valid_values
        lo, hi = float(v.min()), float(v.max())
        try:
            peaks, minima = stats.find_modes(stats.normalize_for_comparison(v), **kw)
        except (ValueError, stats.DegenerateDataError):
            peaks, minima = np.array([]), np.array([])
        out[name] = {
            "tau": f.meta.get("tau"),
            "modes": [lo + (hi - lo) * x for x in peaks],
            "edges": [lo] + [lo + (hi - lo) * x for x in minima] + [hi],
        }
    return out


def write_curve(curve: ComparisonCurve, run: RunDir):
    with open(run.file("comparison_curve.dat"), "w") as fh:
        fh.write(f"# config_hash={run.config.config_hash()}\n")
        fh.write(f"# J={curve.J} k={curve.k!r} alpha={curve.alpha!r} band={curve.band!r}\n")
        fh.write(f"# pearson_window={curve.pearson_window[0]}:{curve.pearson_window[1]}"
                 f" js_window={curve.js_window[0]}:{curve.js_window[1]}\n")
        fh.write("# tau pearson js n_points\n")
        for t, cp, d, n in zip(curve.taus, curve.pearson, curve.js, curve.n_points):
            fh.write(f"{t} {_fmt(cp)} {_fmt(d)} {n}\n")
    _write_json(run.file("comparison_curve.json"), curve.to_dict())
    params = {"J": curve.J, "k": curve.k, "alpha": curve.alpha}
    binning = {"support": [0.0, 1.0], "n_bins": run.config.n_bins, "normalization": "min-max"}
    with open(run.file("stats.jsonl"), "w") as fh:
        for t, cp, d in zip(curve.taus, curve.pearson, curve.js):
            fh.write(json.dumps(stats_record("pearson", params, cp, tau=t), sort_keys=True) + "\n")
            fh.write(json.dumps(stats_record("js_distance", params, d, binning=binning, tau=t),
                                sort_keys=True) + "\n")


# ---------------------------------------------------------------------------
# phase diagram


def run_phase_diagram(config: ExperimentConfig, cache: SpectrumCache | None = None):
    """Chaotic fraction, spacing ratio and mean PR for every k in ``config.k_list``."""
    set_threads(config.threads)
    cache = cache or SpectrumCache()
    out = Path(config.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    grid = fields.make_grid(config.grid_mode, config.resolution, config.polar_cap)
    rows = []
    for k in config.k_list:
        params = ModelParams(k, config.alpha, config.J)
        cf = classical.chaotic_fraction(params, config.n_samples, config.horizon, seed=config.seed,
                                        warmup=config.warmup, threshold=config.threshold)
        spec = cache.get(params)
        r_sec = stats.spacing_ratio(spec, per_sector=True)
        r_full = stats.spacing_ratio(spec, per_sector=False)
        prs = fields.participation_ratios(grid.spins, spec)
        rows.append({
            "k": k, "mu": cf.mu, "mu_err": cf.stderr, "r_sector": r_sec.mean, "r_full": r_full.mean,
            "degeneracies": r_sec.degeneracies, "mean_pr": float(np.mean(prs)),
            "mean_pr_err": float(np.std(prs) / math.sqrt(prs.size)),
        })
        log.info("k=%g mu=%.3f r=%.3f <PR>=%.4f", k, cf.mu, r_sec.mean, rows[-1]["mean_pr"])
    h = config.config_hash()
    with open(out / "phase_diagram.dat", "w") as fh:
        fh.write(f"# config_hash={h}\n")
        fh.write(f"# J={config.J} alpha={config.alpha!r} n_samples={config.n_samples} T={config.horizon}\n")
        fh.write("# k mu mu_err r_sector r_full mean_pr mean_pr_err\n")
        for r in rows:
            fh.write(" ".join(_fmt(r[c]) for c in ("k", "mu", "mu_err", "r_sector", "r_full",
                                                     "mean_pr", "mean_pr_err")) + "\n")
    _write_json(out / "phase_diagram.json", {"config_hash": h, "config": config.portable_dict(), "rows": rows})
    with open(out / "phase_diagram_stats.jsonl", "w") as fh:
        for r in rows:
            p = {"J": config.J, "k": r["k"], "alpha": config.alpha}
            for q, v, e in (("chaotic_fraction", r["mu"], r["mu_err"]),
                            ("spacing_ratio_sector", r["r_sector"], None),
                            ("spacing_ratio_full", r["r_full"], None),
                            ("mean_pr", r["mean_pr"], r["mean_pr_err"])):
                fh.write(json.dumps(stats_record(q, p, v, e), sort_keys=True) + "\n")
    return rows


# ---------------------------------------------------------------------------
# plot-ready output


def _write_matrix(path, mat, header):
    with open(path, "w") as fh:
        for line in header:
            fh.write(f"# {line}\n")
        for row in mat:
            fh.write(" ".join("NaN" if not np.isfinite(x) else _fmt(x) for x in row) + "\n")


def _write_hist(path, h: stats.Histogram, header):
    with open(path, "w") as fh:
        for line in header:
            fh.write(f"# {line}\n")
        fh.write(f"# support={_fmt(h.support[0])}:{_fmt(h.support[1])} n_bins={h.n_bins}"
                 f" samples={h.sample_count} clipped={h.clipped}\n")
        fh.write("# bin_lo bin_hi center probability\n")
        e = h.edges
        for i in range(h.n_bins):
            fh.write(f"{_fmt(e[i])} {_fmt(e[i + 1])} {_fmt(0.5 * (e[i] + e[i + 1]))} {_fmt(h.densities[i])}\n")


def _raw_hist(f, n_bins):
    v = f.valid_values
    lo, hi = float(v.min()), float(v.max())
    if not hi > lo:
        hi = lo + 1.0
    return stats.histogram(v, (lo, hi), n_bins)


def emit_figure_data(run_dir, render=True):
    """Write gnuplot-ready matrices, histograms and curves (plus PNGs) under ``run_dir/plots``."""
    run_dir = Path(run_dir)
    files = []
    plots = run_dir / "plots"
    plots.mkdir(exist_ok=True)
    manifest = None
    if (run_dir / MANIFEST).exists():
        with open(run_dir / MANIFEST) as fh:
            manifest = json.load(fh)
    pd_json = run_dir / "phase_diagram.json"
    if manifest is None and not pd_json.exists():
        raise FileNotFoundError(f"{run_dir} holds neither a correspondence run nor a phase diagram")

    if manifest is not None:
        if not manifest.get("complete"):
            raise ValueError(f"run in {run_dir} is incomplete; finish it with `compare` first")
        config = ExperimentConfig.from_dict(dict(manifest["config"], output_dir=str(run_dir)))
        h = manifest["config_hash"]
        grid = fields.make_grid(config.grid_mode, config.resolution, config.polar_cap)
        header = [f"config_hash={h}", f"J={config.J} k={config.k!r} alpha={config.alpha!r}",
                  f"grid={config.grid_mode} resolution={grid.resolution}"]
        pr = fields.read_field_csv(run_dir / "pr_field.csv", grid)
        to_render = [("pr_field", pr)]
        hists_g, hists_f = {}, {}
        for t in config.taus:
            to_render.append((f"ftle_tau{t:06d}", fields.read_field_csv(run_dir / ftle_name(t), grid)))
            to_render.append((f"gftle_tau{t:06d}", fields.read_field_csv(run_dir / gftle_name(t), grid)))
        for name, f in to_render:
            mat = grid.raster(np.where(f.mask, f.values, np.nan))
            p = plots / f"{name}.mat"
            _write_matrix(p, mat, header + [f"label={f.label} rows={mat.shape[0]} cols={mat.shape[1]}",
                                            "masked points written as NaN"])
            files.append(p)
            hist = _raw_hist(f, config.n_bins)
            p = plots / f"hist_{name}.dat"
            _write_hist(p, hist, header + [f"label={f.label}"])
            files.append(p)
            if name.startswith("gftle"):
                hists_g[f"tau={f.meta.get('tau')}"] = hist
            elif name.startswith("ftle"):
                hists_f[f"tau={f.meta.get('tau')}"] = hist
            if render:
                files.append(render_field(f, plots / f"{name}.png"))
        if config.measure == "natural":
            for t in config.taus:
                nat = fields.read_field_csv(run_dir / natural_name(t))
                p = plots / f"hist_ftle_natural_tau{t:06d}.dat"
                _write_hist(p, _raw_hist(nat, config.n_bins), header + ["label=FTLE natural measure"])
                files.append(p)
        curve = _curve_from_manifest(manifest, config)
        for q, ys in (("pearson", curve.pearson), ("js", curve.js)):
            p = plots / f"{q}_curve.dat"
            with open(p, "w") as fh:
                fh.write("\n".join(f"# {line}" for line in header) + "\n")
                fh.write(f"# tau {q}\n")
                for t, y in zip(curve.taus, ys):
                    fh.write(f"{t} {_fmt(y)}\n")
            files.append(p)
        if render:
            from . import plotting

            files.append(plotting.plot_curve(curve, plots / "comparison_curve.png"))
            files.append(plotting.plot_histograms(hists_f, plots / "hist_ftle.png", "FTLE"))
            files.append(plotting.plot_histograms(hists_g, plots / "hist_gftle.png", "GFTLE"))
            files.append(plotting.plot_histograms({"PR": _raw_hist(pr, config.n_bins)},
                                                  plots / "hist_pr.png", "PR"))

    if pd_json.exists():
        with open(pd_json) as fh:
            pdata = json.load(fh)
        rows = pdata["rows"]
        for q in ("mu", "r_sector", "mean_pr"):
            p = plots / f"phase_diagram_{q}.dat"
            with open(p, "w") as fh:
                fh.write(f"# config_hash={pdata['config_hash']}\n# k {q}\n")
                for r in rows:
                    fh.write(f"{_fmt(r['k'])} {_fmt(r[q])}\n")
            files.append(p)
        if render:
            from . import plotting

            files.append(plotting.plot_phase_diagram(rows, plots / "phase_diagram.png"))
    return files


def render_field(f, path):
    from . import plotting

    tau = f.meta.get("tau")
    title = f.label if tau is None else f"{f.label}, tau={tau}"
    return plotting.plot_field(f, path, title=title)
