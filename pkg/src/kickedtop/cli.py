"""Command-line entry point: ``kickedtop <subcommand> [options]``.

Every subcommand accepts the experiment options below; values come from
the built-in profile, then an optional JSON ``--config`` file, then
explicit flags. Results go to ``--output-dir`` and a tab-separated summary
is printed on stdout.

Exit codes: 0 success, 2 configuration error, 3 numerical failure,
4 I/O failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np

from . import fields, pipeline, stats
from .errors import ConfigError, DomainError, KickedTopError
from .spin import SpectrumCache

EXIT_OK, EXIT_CONFIG, EXIT_NUMERICAL, EXIT_IO = 0, 2, 3, 4

log = logging.getLogger("kickedtop")


def _ints(text):
    return tuple(int(x) for x in text.replace(",", " ").split())


def _floats(text):
    return tuple(float(x) for x in text.replace(",", " ").split())


def _pair(text):
    v = _ints(text.replace("x", " "))
    return v * 2 if len(v) == 1 else v


# (flag, config key, type, help)
CONFIG_FLAGS = [
    ("--k", "k", float, "kick strength"),
    ("--alpha", "alpha", float, "precession angle"),
    ("--J", "J", int, "spin quantum number"),
    ("--grid-mode", "grid_mode", str, "sphere (u, phi) or disk (Q, P)"),
    ("--resolution", "resolution", _pair, "grid size, e.g. 200x200"),
    ("--polar-cap", "polar_cap", float, "excluded polar cap half-angle"),
    ("--taus", "taus", _ints, "comma separated FTLE windows"),
    ("--warmup", "warmup", int, "tangent alignment steps"),
    ("--warmup-mode", "warmup_mode", str, "backward or forward"),
    ("--horizon", "horizon", int, "classification horizon T"),
    ("--threshold", "threshold", float, "regular/chaotic threshold (default from T)"),
    ("--measure", "measure", str, "uniform or natural"),
    ("--sigma2", "sigma2", float, "smoothing variance (default 1/J)"),
    ("--n-bins", "n_bins", int, "histogram bins"),
    ("--seed", "seed", int, "random seed"),
    ("--output-dir", "output_dir", str, "run directory"),
    ("--threads", "threads", int, "worker threads"),
    ("--k-list", "k_list", _floats, "kick strengths for phase-diagram"),
    ("--n-samples", "n_samples", int, "samples for the chaotic fraction"),
    ("--n-traj", "n_traj", int, "trajectories for the natural measure"),
    ("--transient", "transient", int, "transient steps for the natural measure"),
    ("--band", "band", float, "relative band defining extremal windows"),
]


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    g = common.add_argument_group("experiment")
    g.add_argument("--profile", default="desk", help="base profile: desk or paper")
    g.add_argument("--config", help="JSON file with config values")
    for flag, key, typ, hlp in CONFIG_FLAGS:
        g.add_argument(flag, dest=key, type=typ, default=argparse.SUPPRESS, help=hlp)
    common.add_argument("-v", "--verbose", action="count", default=0)

    p = argparse.ArgumentParser(prog="kickedtop", description="Kicked-top quantum-classical correspondence.")
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("spectrum", parents=[common], help="diagonalize U and store it in the cache")
    s = sub.add_parser("pr-field", parents=[common], help="participation-ratio field on the grid")
    s.add_argument("--mask", help="field CSV whose mask is applied (e.g. lyapunov_T.csv)")
    sub.add_parser("ftle-field", parents=[common], help="FTLE fields for every window plus the regular mask")
    s = sub.add_parser("gftle", parents=[common], help="smooth FTLE field files in the run directory")
    s.add_argument("inputs", nargs="*", help="FTLE CSVs (default: one per configured window)")
    s = sub.add_parser("compare", parents=[common], help="full PR vs GFTLE correspondence run")
    s.add_argument("--no-resume", action="store_true", help="ignore completed stages")
    s.add_argument("--stop-after", help=argparse.SUPPRESS)
    sub.add_parser("phase-diagram", parents=[common], help="chaotic fraction, spacing ratio and mean PR versus k")
    s = sub.add_parser("emit-plots", parents=[common], help="plot-ready data files and figures for a run")
    s.add_argument("run_dir", nargs="?", help="run directory (default: --output-dir)")
    s.add_argument("--no-render", action="store_true", help="data files only")
    return p


def config_from_args(args):
    base = pipeline.profile(args.profile).to_dict()
    if args.config:
        with open(args.config) as fh:
            text = fh.read()
        try:
            base.update(json.loads(text))
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{args.config}: not valid JSON: {exc}") from exc
    for _, key, _, _ in CONFIG_FLAGS:
        if key in vars(args):
            base[key] = getattr(args, key)
    return pipeline.ExperimentConfig.from_dict(base)


def _emit(rows):
    for row in rows:
        print("\t".join(str(x) for x in row))


def cmd_spectrum(cfg, args):
    cache = SpectrumCache()
    spec = cache.get(cfg.params)
    r = stats.spacing_ratio(spec)
    _emit([("J", "k", "alpha", "N", "unitarity_residual", "r_sector", "path"),
           (cfg.J, cfg.k, cfg.alpha, spec.N, f"{spec.unitarity_residual:.3e}", f"{r.mean:.6f}",
            cache.path_for(cfg.params))])


def _out(cfg):
    out = Path(cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _sidecar(cfg, **extra):
    return dict(config=cfg.portable_dict(), config_hash=cfg.config_hash(), **extra)


def _grid(cfg):
    return fields.make_grid(cfg.grid_mode, cfg.resolution, cfg.polar_cap)


def _field_row(path, f):
    v = f.valid_values
    return (path, f.label, int(f.mask.sum()), f"{v.min():.6g}", f"{v.mean():.6g}", f"{v.max():.6g}")


HEAD = ("file", "label", "valid", "min", "mean", "max")


def cmd_pr_field(cfg, args):
    pipeline.set_threads(cfg.threads)
    grid = _grid(cfg)
    regular = None
    if args.mask:
        regular = ~fields.read_field_csv(args.mask, grid).mask
    spec = SpectrumCache().get(cfg.params)
    f = fields.pr_field(grid, spec, regular)
    path = _out(cfg) / "pr_field.csv"
    fields.write_field_csv(f, path, _sidecar(cfg, J=cfg.J))
    _emit([HEAD, _field_row(path, f)])


def cmd_ftle_field(cfg, args):
    pipeline.set_threads(cfg.threads)
    out = _out(cfg)
    grid = _grid(cfg)
    rows = [HEAD]
    if cfg.measure == "natural":
        for t in cfg.taus:
            f = fields.natural_ftle_field(cfg.params, t, n_samples=len(grid), n_traj=cfg.n_traj,
                                          transient=cfg.transient, T=cfg.horizon, warmup=cfg.warmup,
                                          seed=cfg.seed, threshold=cfg.threshold)
            path = out / pipeline.natural_name(t)
            fields.write_field_csv(f, path, _sidecar(cfg, tau=t))
            rows.append(_field_row(path, f))
        _emit(rows)
        return
    F = fields.ftle_fields(grid, cfg.taus, cfg.params, T=cfg.horizon, warmup=cfg.warmup, seed=cfg.seed,
                           threshold=cfg.threshold, backward=cfg.warmup_mode == "backward")
    for t in cfg.taus:
        path = out / pipeline.ftle_name(t)
        fields.write_field_csv(F.fields[t], path, _sidecar(cfg, tau=t))
        rows.append(_field_row(path, F.fields[t]))
    lam = fields.ScalarField(grid, F.lambda_T, ~F.regular, "LYAPUNOV",
                             {"T": F.T, "k": cfg.k, "alpha": cfg.alpha, "threshold": F.threshold})
    path = out / "lyapunov_T.csv"
    fields.write_field_csv(lam, path, _sidecar(cfg, T=F.T))
    rows.append(_field_row(path, lam))
    _emit(rows)


def cmd_gftle(cfg, args):
    out = _out(cfg)
    inputs = [Path(p) for p in args.inputs] or [out / pipeline.ftle_name(t) for t in cfg.taus]
    smoother = None
    rows = [HEAD]
    for p in inputs:
        f = fields.read_field_csv(p)
        if smoother is None:
            smoother = fields.GaussianSmoother(f.grid, cfg.smoothing_sigma2)
        g = smoother(f)
        tau = f.meta.get("tau")
        name = pipeline.gftle_name(int(tau)) if tau is not None else "gftle_" + p.name
        path = out / name
        fields.write_field_csv(g, path, _sidecar(cfg, tau=tau, source=p.name))
        rows.append(_field_row(path, g))
    _emit(rows)


def cmd_compare(cfg, args):
    res = pipeline.run_correspondence(cfg, resume=not args.no_resume, stop_after=args.stop_after)
    if res.curve is None:
        print(f"# stopped early; partial run in {res.run_dir}")
        return
    c = res.curve
    print(f"# config_hash={cfg.config_hash()} run_dir={res.run_dir}")
    _emit([("tau", "pearson", "js", "n_points")]
          + [(t, f"{p:.6f}", f"{d:.6f}", n) for t, p, d, n in zip(c.taus, c.pearson, c.js, c.n_points)])
    print(f"# pearson_window={c.pearson_window[0]}:{c.pearson_window[1]}"
          f" js_window={c.js_window[0]}:{c.js_window[1]} windows_agree={c.windows_agree}")


def cmd_phase_diagram(cfg, args):
    rows = pipeline.run_phase_diagram(cfg)
    cols = ("k", "mu", "mu_err", "r_sector", "r_full", "mean_pr", "mean_pr_err")
    _emit([cols] + [tuple(f"{r[c]:.6g}" for c in cols) for r in rows])


def cmd_emit_plots(cfg, args):
    run_dir = Path(args.run_dir or cfg.output_dir)
    for p in pipeline.emit_figure_data(run_dir, render=not args.no_render):
        print(p)


COMMANDS = {
    "spectrum": cmd_spectrum,
    "pr-field": cmd_pr_field,
    "ftle-field": cmd_ftle_field,
    "gftle": cmd_gftle,
    "compare": cmd_compare,
    "phase-diagram": cmd_phase_diagram,
    "emit-plots": cmd_emit_plots,
}


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2),
                        format="%(asctime)s %(name)s %(levelname)s %(message)s")
    try:
        cfg = config_from_args(args)
        COMMANDS[args.command](cfg, args)
    except (ConfigError, DomainError) as exc:
        print(f"kickedtop: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (KickedTopError, ArithmeticError, np.linalg.LinAlgError) as exc:
        print(f"kickedtop: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (OSError, ValueError, KeyError) as exc:
        # missing or malformed run files
        print(f"kickedtop: I/O failure: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
