"""Acceptance gate: one test and one printed verdict line per criterion.

Criteria 5 and 6 share the default desk-profile run (several minutes);
criterion 4 builds J=200 spectra and classifies 3000 trajectories of 1e5
kicks. Everything else runs in seconds.
"""

import math
import time

import numpy as np

from kickedtop import classical, fields, pipeline, stats
from kickedtop.spin import (DickeBasis, ModelParams, build_floquet, build_jx_jy_jz, diagonalize_floquet,
                            floquet_spectrum, unitarity_residual)


def test_criterion_1_algebra(report):
    t0 = time.perf_counter()
    worst = {"comm": 0.0, "casimir": 0.0, "unitary": 0.0, "recon": 0.0, "parity": 0.0, "sectors": 0.0}
    for J in (10, 50, 200):
        jx, jy, jz = build_jx_jy_jz(DickeBasis(J))
        c = max(np.abs(jx @ jy - jy @ jx - 1j * jz).max(), np.abs(jy @ jz - jz @ jy - 1j * jx).max(),
                np.abs(jz @ jx - jx @ jz - 1j * jy).max())
        worst["comm"] = max(worst["comm"], c / J)
        cas = jx @ jx + jy @ jy + jz @ jz - J * (J + 1) * np.eye(2 * J + 1)
        worst["casimir"] = max(worst["casimir"], np.abs(cas).max())
        p = ModelParams(3.0, 0.84, J)
        U = build_floquet(p)
        worst["unitary"] = max(worst["unitary"], unitarity_residual(U))
        spec = floquet_spectrum(p)
        worst["recon"] = max(worst["recon"], np.abs(spec.reconstruct() - U).max())
        R = np.diag(np.exp(-1j * np.pi * np.arange(-J, J + 1)))
        worst["parity"] = max(worst["parity"], np.abs(U @ R - R @ U).max())
        full = diagonalize_floquet(U)  # no sector split
        d = np.abs(np.angle(np.exp(1j * (np.sort(full.eigenphases) - np.sort(spec.eigenphases)))))
        worst["sectors"] = max(worst["sectors"], d.max())
    dt = time.perf_counter() - t0
    ok = (worst["comm"] < 1e-12 and worst["casimir"] < 1e-10 and worst["unitary"] < 1e-10
          and worst["recon"] < 1e-8 and worst["parity"] < 1e-10 and worst["sectors"] < 1e-10 and dt < 60)
    report(1, ok, " ".join(f"{k}={v:.1e}" for k, v in worst.items()), dt)
    assert ok, worst


def test_criterion_2_jacobian(report):
    t0 = time.perf_counter()
    worst = 0.0
    h = 1e-6
    for k in (3.0, 10.0):
        p = ModelParams(k, 0.84, 10)
        for s in classical.sphere_uniform(100, classical.make_rng(11, int(k))):
            J = classical.jacobian(s, p)
            fd = np.column_stack([(classical.map_step(s + h * e, p, renormalize=False)
                                   - classical.map_step(s - h * e, p, renormalize=False)) / (2 * h)
                                  for e in np.eye(3)])
            worst = max(worst, np.linalg.norm(J - fd) / np.linalg.norm(fd))
    dt = time.perf_counter() - t0
    ok = worst < 1e-6
    report(2, ok, f"max relative error {worst:.2e} over 200 points", dt)
    assert ok


def test_criterion_3_integrable_limit(report):
    t0 = time.perf_counter()
    p = ModelParams(0.0, 0.84, 100)
    pts = classical.sphere_uniform(200, classical.make_rng(12))
    lam = np.abs(classical.ftle_batch(pts, [1, 10, 100, 1000], p)).max()
    spec = floquet_spectrum(p)
    pr = fields.participation_ratios(np.array([[0.0, 0.0, -1.0]]), spec)[0]
    pr_err = abs(pr - 1.0 / spec.N)
    mu = classical.chaotic_fraction(p, n_samples=1000, T=10**4).mu
    dt = time.perf_counter() - t0
    ok = lam < 1e-10 and pr_err < 1e-12 and mu == 0.0
    report(3, ok, f"max|FTLE|={lam:.1e} |PR_south - 1/N|={pr_err:.1e} mu={mu}", dt)
    assert ok


def test_criterion_4_transition(report, tmp_path):
    t0 = time.perf_counter()
    cfg = pipeline.profile("desk", J=200, k_list=(1.0, 3.0, 10.0), n_samples=1000, horizon=10**5,
                           output_dir=str(tmp_path))
    rows = {r["k"]: r for r in pipeline.run_phase_diagram(cfg)}
    dt = time.perf_counter() - t0
    r1, r3, r10 = rows[1.0], rows[3.0], rows[10.0]
    checks = {
        "mu(1)<0.05": r1["mu"] < 0.05,
        "mu(10)>0.95": r10["mu"] > 0.95,
        "r(1)~poisson": abs(r1["r_sector"] - stats.POISSON_R) < 0.05,
        "r(10)>0.50": r10["r_sector"] > 0.50,
        "PR monotone": r1["mean_pr"] < r3["mean_pr"] < r10["mean_pr"],
        "runtime<30min": dt < 1800,
    }
    ok = all(checks.values())
    detail = (f"mu={r1['mu']:.3f}/{r3['mu']:.3f}/{r10['mu']:.3f} "
              f"r={r1['r_sector']:.4f}/{r3['r_sector']:.4f}/{r10['r_sector']:.4f} "
              f"<PR>={r1['mean_pr']:.4f}/{r3['mean_pr']:.4f}/{r10['mean_pr']:.4f}"
              + "".join(f" !{k}" for k, v in checks.items() if not v))
    report(4, ok, detail, dt)
    assert ok, checks


def test_criterion_5_multimodality(report, desk_run):
    cfg, res, run_seconds, out = desk_run
    t0 = time.perf_counter()
    grid = fields.make_grid(cfg.grid_mode, cfg.resolution, cfg.polar_cap)
    ftle = fields.read_field_csv(out / pipeline.ftle_name(100), grid)
    pr = fields.read_field_csv(out / "pr_field.csv", grid)
    f_peaks, _ = stats.find_modes(stats.normalize_for_comparison(ftle.valid_values))
    p_peaks, _ = stats.find_modes(stats.normalize_for_comparison(pr.valid_values))
    dt = run_seconds + time.perf_counter() - t0
    ok = len(f_peaks) >= 2 and len(p_peaks) >= 2 and dt < 1200
    report(5, ok, f"FTLE modes at {np.round(f_peaks, 3).tolist()}, PR modes at {np.round(p_peaks, 3).tolist()}"
           " (normalized, bandwidth 0.02)", dt)
    assert ok


def test_criterion_6_optimal_window(report, desk_run):
    cfg, res, run_seconds, out = desk_run
    c = res.curve
    taus = list(c.taus)
    cp = dict(zip(taus, c.pearson))
    i_max = int(np.argmax(c.pearson))
    i_min = int(np.argmin(c.js))
    checks = {
        "Cp interior max": 3 < taus[i_max] < 5000,
        "Cp max > Cp(1), Cp(5000)": c.pearson[i_max] > cp[1] and c.pearson[i_max] > cp[5000],
        "DJS interior min": 0 < i_min < len(taus) - 1,
        "windows meet": c.windows_agree,
    }
    ok = all(checks.values())
    detail = (f"Cp max {c.pearson[i_max]:.4f} at tau={taus[i_max]} (Cp(1)={cp[1]:.3f}, Cp(5000)={cp[5000]:.3f});"
              f" DJS min {c.js[i_min]:.4f} at tau={taus[i_min]};"
              f" windows Cp {c.pearson_window[0]}:{c.pearson_window[1]} DJS {c.js_window[0]}:{c.js_window[1]}"
              + "".join(f" !{k}" for k, v in checks.items() if not v))
    report(6, ok, detail, run_seconds)
    assert ok, checks


def test_criterion_7_statistics(report):
    t0 = time.perf_counter()
    rng = np.random.default_rng(13)
    x, y = rng.normal(size=(2, 1000))
    y += 0.5 * x
    affine = abs(stats.pearson(3 * x + 1, 0.2 * y - 5) - stats.pearson(x, y))
    h = stats.histogram(rng.random(1000), (0, 1), 20)
    js_same = stats.js_distance(h, h)
    a = stats.Histogram((0.0, 1.0), 4, np.array([0.5, 0.5, 0, 0]), 2)
    b = stats.Histogram((0.0, 1.0), 4, np.array([0, 0, 0.5, 0.5]), 2)
    js_disjoint = abs(stats.js_distance(a, b) - math.sqrt(math.log(2)))
    g = fields.make_grid("sphere", (40, 40))
    sm = fields.GaussianSmoother(g, 1 / 30)
    mask = np.ones(len(g), bool)
    const = np.abs(sm(fields.ScalarField(g, np.full(len(g), 2.5), mask, "FTLE")).values - 2.5).max()
    v = rng.normal(size=len(g))
    out = sm(fields.ScalarField(g, v, mask, "FTLE")).values
    convex = out.min() >= v.min() and out.max() <= v.max()
    norm = abs(stats.histogram(rng.normal(size=5000), (-1, 1), 37).densities.sum() - 1.0)
    dt = time.perf_counter() - t0
    ok = affine < 1e-12 and js_same == 0.0 and js_disjoint < 1e-12 and const < 1e-12 and convex and norm < 1e-12
    report(7, ok, f"affine={affine:.1e} js(F,F)={js_same} |js_max-sqrt(ln2)|={js_disjoint:.1e}"
           f" const={const:.1e} convex={convex} |sum-1|={norm:.1e}", dt)
    assert ok


def test_criterion_8_determinism(report, tmp_path):
    t0 = time.perf_counter()
    from kickedtop import cli

    args = ["compare", "--J", "30", "--resolution", "40x40", "--taus", "1,10,100", "--horizon", "2000",
            "--seed", "5", "--threads", "1"]
    assert cli.main(args + ["--output-dir", str(tmp_path / "a")]) == 0
    assert cli.main(args + ["--output-dir", str(tmp_path / "b")]) == 0
    names = sorted(p.name for p in (tmp_path / "a").iterdir())
    same = [n for n in names if (tmp_path / "a" / n).read_bytes() == (tmp_path / "b" / n).read_bytes()]
    data = [n for n in names if n.endswith((".csv", ".dat"))]
    dt = time.perf_counter() - t0
    ok = len(data) >= 8 and same == names
    report(8, ok, f"{len(same)}/{len(names)} files byte-identical ({len(data)} field/curve files)", dt)
    assert ok, sorted(set(names) - set(same))

