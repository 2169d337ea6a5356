import numpy as np
import pytest

from aipoints import canonicalize, normalize_to_unit_area


@pytest.fixture
def unit_square():
    return canonicalize([[0, 0], [1, 0], [1, 1], [0, 1]])


@pytest.fixture
def origin_square():
    return canonicalize([[-0.5, -0.5], [0.5, -0.5], [0.5, 0.5], [-0.5, 0.5]])


@pytest.fixture
def triangle():
    return canonicalize([[0, 0], [1, 0], [0, 1]])


@pytest.fixture
def quad_raw():
    # generic convex quadrilateral with no affine symmetry, area 1.035
    return canonicalize([[0, 0], [1, 0], [1.3, 0.8], [0.2, 1.1]])


@pytest.fixture
def quad_unit(quad_raw):
    body, _ = normalize_to_unit_area(quad_raw)
    return body


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
