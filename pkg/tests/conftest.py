import pytest

from limulrich import monoring as mr
from limulrich.exactlin import FieldSpec

F2 = FieldSpec(2)
F3 = FieldSpec(3)


@pytest.fixture(scope="session")
def segre():
    return mr.segre_ring(F2, 2)


@pytest.fixture(scope="session")
def segre_sop(segre):
    # a = x1x2, d = y1y2, b + c = x1y2 + y1x2
    return [mr.parse_element(segre, s) for s in ("x1*x2", "y1*y2", "x1*y2 + y1*x2")]


@pytest.fixture(scope="session")
def plane():
    return mr.poly_ring(F2, 2)


@pytest.fixture(scope="session")
def double_line():
    """F_2[x,y]/(x^2), dimension 1."""
    return mr.poly_ring(F2, 2, [(2, 0)], declared_dim=1)
