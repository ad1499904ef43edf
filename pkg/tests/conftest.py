import os
import time
from pathlib import Path

import pytest

ACCEPTANCE = []


@pytest.fixture(scope="session", autouse=True)
def _isolated_cache(tmp_path_factory):
    # spectra built during tests never touch the user's cache
    if "KICKEDTOP_CACHE_DIR" not in os.environ:
        os.environ["KICKEDTOP_CACHE_DIR"] = str(tmp_path_factory.mktemp("spectra"))
    yield


@pytest.fixture(scope="session")
def report():
    """Collects one verdict line per acceptance criterion."""

    def add(n, ok, detail, seconds):
        ACCEPTANCE.append((n, ok, detail, seconds))
        print(f"\ncriterion {n}: {'PASS' if ok else 'FAIL'}  {detail}  [{seconds:.1f} s]")

    return add


@pytest.fixture(scope="session")
def desk_run(tmp_path_factory):
    """Default desk-profile correspondence run (k=3, alpha=0.84, J=100, 200x200, T=1e5).

    Set KICKEDTOP_DESK_RUN to a directory to keep the run between sessions;
    completed stages are resumed rather than recomputed.
    """
    from kickedtop import pipeline

    out = os.environ.get("KICKEDTOP_DESK_RUN") or str(tmp_path_factory.mktemp("desk"))
    cfg = pipeline.profile("desk", output_dir=out)
    t0 = time.perf_counter()
    res = pipeline.run_correspondence(cfg)
    return cfg, res, time.perf_counter() - t0, Path(out)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n, ok, detail, sec in sorted(ACCEPTANCE):
        terminalreporter.write_line(f"criterion {n}: {'PASS' if ok else 'FAIL'}  {detail}  [{sec:.1f} s]")
