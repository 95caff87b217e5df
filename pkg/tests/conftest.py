"""
    Dummy conftest.py for ramancomb.

    If you don't know what this is for, just leave it empty.
    Read more about conftest.py under:
    - https://docs.pytest.org/en/stable/fixture.html
    - https://docs.pytest.org/en/stable/writing_plugins.html
"""

import json
from decimal import Decimal, localcontext

import pytest
from hypothesis import settings

from ramancomb.model.scattering import SidebandWindow

settings.register_profile("ramancomb", max_examples=40, deadline=None)
settings.load_profile("ramancomb")


def decimal_bessel(order, x, digits=60):
    """J_order(x) from the power series in 60-digit decimal arithmetic."""
    n = abs(order)
    with localcontext() as context:
        context.prec = digits
        half = Decimal(repr(float(x))) / 2
        if half == 0:
            value = Decimal(1) if n == 0 else Decimal(0)
        else:
            term = half**n
            for k in range(1, n + 1):
                term /= k
            value = term
            square = -half * half
            k = 0
            while True:
                k += 1
                term = term * square / (k * (n + k))
                value += term
                if abs(term) < Decimal(10) ** (-digits + 5) and k > half:
                    break
        if order < 0 and n % 2:
            value = -value
        return float(value)


@pytest.fixture
def series_oracle():
    return decimal_bessel


@pytest.fixture
def small_window():
    return SidebandWindow.symmetric(3)


@pytest.fixture
def write_config(tmp_path):
    """Write a scenario dict to a JSON file and return its path."""

    def write(data, name="scenario.json"):
        path = tmp_path / name
        path.write_text(json.dumps(data, indent=2))
        return path

    return write
