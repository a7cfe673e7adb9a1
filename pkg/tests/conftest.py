from pathlib import Path

import numpy as np
import pytest

from hierentropy.raster import RasterImage, load_image

FIXTURES = Path(__file__).parent / "fixtures"
PHOTO = FIXTURES / "astronaut.png"

RED, GREEN, BLUE = (255, 0, 0), (0, 255, 0), (0, 0, 255)


def two_half_image(size=8):
    px = np.zeros((size, size, 3))
    px[:, : size // 2] = RED
    px[:, size // 2:] = BLUE
    return RasterImage(px)


def checker_quadrant_image(size=256):
    """Top-left quadrant: 1-pixel red/blue checkerboard; the rest flat green."""
    px = np.zeros((size, size, 3))
    px[...] = GREEN
    half = size // 2
    yy, xx = np.mgrid[0:half, 0:half]
    px[:half, :half] = np.where(((xx + yy) % 2 == 0)[..., None], RED, BLUE)
    return RasterImage(px)


def random_labels(rng, shape, max_clusters=32):
    k = int(rng.integers(1, max_clusters + 1))
    return rng.integers(0, k, size=shape)


@pytest.fixture(scope="session")
def photo():
    return load_image(PHOTO)


@pytest.fixture
def rng():
    return np.random.default_rng(20240613)


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n, text): acceptance criterion number and summary")


# criterion number -> (summary, passed so far)
_criteria = {}
_criteria_markers = {}


def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.when == "setup" and report.failed):
        return
    marker = _criteria_markers.get(report.nodeid)
    if marker is not None:
        n, text = marker
        ok = _criteria.get(n, (text, True))[1] and report.passed
        _criteria[n] = (text, ok)


def pytest_collection_modifyitems(items):
    for item in items:
        m = item.get_closest_marker("criterion")
        if m is not None:
            _criteria_markers[item.nodeid] = m.args


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_criteria):
        text, ok = _criteria[n]
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] {n:>2}. {text}")
