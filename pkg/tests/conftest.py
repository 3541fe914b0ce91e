import numpy as np
import pytest

from minkbill.geometry import Ball, VPolytope


@pytest.fixture
def triangle():
    return VPolytope(np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]))


@pytest.fixture
def square():
    return VPolytope(np.array([[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]]))


@pytest.fixture
def sym_square():
    return VPolytope(np.array([[1.0, 1.0], [-1.0, 1.0], [-1.0, -1.0], [1.0, -1.0]]))


@pytest.fixture
def disk():
    return Ball(np.zeros(2), 1.0)


@pytest.fixture
def simplex3():
    return VPolytope(np.array([[0.0, 0.0, 0.0], [1.0, 0.0, 0.0],
                               [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]))
