import numpy as np
import pytest

from transferprices.divisions import (
    DivisionModel,
    Family,
    PowerProductionParams,
    PowerSalesParams,
    QuadProductionParams,
    QuadSalesParams,
    Role,
)
from transferprices.firm import FirmInstance


def make_power_sales(A=2.0, alpha=0.5, eps1=0.5, c=10.0):
    return DivisionModel(Role.SALES, Family.POWER, PowerSalesParams(A, alpha, eps1), c)


def make_power_production(B=1.0, beta=2.0, eps2=0.1, c=10.0):
    return DivisionModel(Role.PRODUCTION, Family.POWER, PowerProductionParams(B, beta, eps2), c)


@pytest.fixture
def tiny_power():
    # One sales division f(x) = (2/0.5)((x+0.5)^0.5 - 0.5^0.5) against one
    # production division g(y) = (1/2)((y+0.1)^2 - 0.1^2) on [0, 10].
    return FirmInstance(
        d=1,
        sales=(make_power_sales(),),
        production=(make_power_production(),),
        c=10.0,
    )


def make_quad_sales(a, A, c=10.0, validate=True):
    return DivisionModel(
        Role.SALES,
        Family.QUADRATIC,
        QuadSalesParams(np.asarray(a, dtype=float), np.asarray(A, dtype=float), validate=validate),
        c,
        validate=validate,
    )


def make_quad_production(b, B, c=10.0, validate=True):
    return DivisionModel(
        Role.PRODUCTION,
        Family.QUADRATIC,
        QuadProductionParams(np.asarray(b, dtype=float), np.asarray(B, dtype=float), validate=validate),
        c,
        validate=validate,
    )
