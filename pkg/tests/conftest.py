from fractions import Fraction

import pytest

from mukai_walls.mukai_core import NSClass, SurfaceData, frame_constants

# elliptic K3 with section: basis (sigma, f), H = sigma + 4f, D = sigma - 2f
EK3_GRAM = [[-2, 1], [1, 0]]
EK3_H = (1, 4)
EK3_D = NSClass((1, -2))


@pytest.fixture(scope="session")
def ek3():
    return SurfaceData(1, EK3_GRAM, EK3_H)


@pytest.fixture(scope="session")
def ab1():
    """Abelian surface with NS = Z H, (H^2) = 2."""
    return SurfaceData(0, [[2]], [1])


@pytest.fixture(scope="session")
def ab_hyp():
    """Abelian surface with NS the hyperbolic plane, H = (1, 1)."""
    return SurfaceData(0, [[0, 1], [1, 0]], [1, 1])


@pytest.fixture(scope="session")
def ek3_frames(ek3):
    return {
        "0": frame_constants(ek3, [0, 0]),
        "D/2": frame_constants(ek3, EK3_D / 2),
        "D/3": frame_constants(ek3, EK3_D / 3),
    }


def F(x):
    return Fraction(x)
