import json

import numpy as np
import pytest

from real_subbundle_lab.curve import build_curve

# The four standing fixtures, one per topological type reachable with a
# squarefree even sextic and the +1 lift:
#   c1: f = (x^2+1)(x^2+2)(x^2+3)        -> (n,a,m) = (1,0,0)
#   c2: f = (x^2-1)(x^2+4)(x^2+1) shape  -> (1,1,1)   (one pair of real roots)
#   c3: f = (x^2-1)(x^2+2)(x^2-1) shape  -> (2,1,2)   (two pairs)
#   c4: f = (x^2-1)(x^2-4)(x^2-9)        -> (3,0,3)   (three pairs)
FIXTURE_COEFFS = {
    "c1": [6.0, 0.0, 11.0, 0.0, 6.0, 0.0, 1.0],
    "c2": [-4.0, 0.0, -1.0, 0.0, 4.0, 0.0, 1.0],
    "c3": [2.0, 0.0, -1.0, 0.0, -2.0, 0.0, 1.0],
    "c4": [-36.0, 0.0, 49.0, 0.0, -14.0, 0.0, 1.0],
}

FIXTURE_TYPES = {
    "c1": (1, 0, 0),
    "c2": (1, 1, 1),
    "c3": (2, 1, 2),
    "c4": (3, 0, 3),
}


@pytest.fixture(scope="session")
def curves():
    return {name: build_curve(coeffs) for name, coeffs in FIXTURE_COEFFS.items()}


@pytest.fixture(scope="session")
def c1(curves):
    return curves["c1"]


@pytest.fixture(scope="session")
def c2(curves):
    return curves["c2"]


@pytest.fixture(scope="session")
def c3(curves):
    return curves["c3"]


@pytest.fixture(scope="session")
def c4(curves):
    return curves["c4"]


@pytest.fixture()
def rng():
    return np.random.default_rng(20260825)


@pytest.fixture()
def curve_file(tmp_path):
    """Write a fixture curve spec to disk and return the path."""

    def write(name, **overrides):
        spec = {"coeffs": FIXTURE_COEFFS[name], "lift_sign": 1, "tol": 1e-9}
        spec.update(overrides)
        path = tmp_path / f"{name}.json"
        path.write_text(json.dumps(spec))
        return str(path)

    return write
