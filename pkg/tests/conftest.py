import numpy as np
import pytest

from qsurf.scene import load_scene, scene_from_dict

DEMO_SCENES = ("sphpoly", "torus", "franke_3balls")

_ACCEPTANCE = {}


@pytest.fixture
def criterion():
    """Record one acceptance line; the summary is printed at the end of the run."""

    def record(number, title, ok, detail=""):
        _ACCEPTANCE[number] = (title, bool(ok), detail)
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_ACCEPTANCE):
        title, ok, detail = _ACCEPTANCE[number]
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] {number:>2}. {title}  {detail}")


@pytest.fixture(scope="session")
def scenes():
    return {name: load_scene(name) for name in DEMO_SCENES + ("franke_ball_plane",)}


@pytest.fixture(scope="session")
def desk_samples(scenes):
    """Desk-scale samples, M0 = 1e5 Halton attempts per scene."""
    return {name: sc.sample(M0=100_000) for name, sc in scenes.items()}


@pytest.fixture(scope="session")
def full_torus():
    return scene_from_dict({"name": "full_torus", "surface": {"kind": "torus", "R": 3, "r": 2},
                            "region": {"kind": "full"}, "M0": 100_000, "P0": [0, -3, 2]})


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
