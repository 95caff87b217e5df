"""Integer-order Bessel functions of the first kind.

Small arguments use the ascending power series. Everything else uses Miller's
downward recurrence normalised with the completeness identity
J_0(x)^2 + 2 * sum_k J_k(x)^2 = 1.
"""

import logging
import math
from dataclasses import dataclass

import numpy as np

from ramancomb.exceptions import DomainError, OrderRangeError

logger = logging.getLogger(__name__)

MAX_ORDER = 10**6
SERIES_ARGUMENT = 2.0

# Miller iterates are rescaled before their squares could overflow.
_RESCALE_ABOVE = 1e140
_RESCALE_BY = 1e-140
_SEED = 1e-30


def _check_argument(x):
    x = float(x)
    if not math.isfinite(x):
        raise DomainError(f"Bessel argument must be finite, got {x}")
    if x < 0:
        raise DomainError(f"Bessel argument must be non-negative, got {x}")
    return x


def _check_order(order):
    if int(order) != order:
        raise DomainError(f"Bessel order must be an integer, got {order}")
    order = int(order)
    if abs(order) > MAX_ORDER:
        raise DomainError(f"|order| must not exceed {MAX_ORDER}, got {order}")
    return order


def _series(n, x):
    """Ascending series sum_k (-1)^k (x/2)^(2k+n) / (k! (n+k)!) for n >= 0."""
    if x == 0.0:
        return 1.0 if n == 0 else 0.0
    half = 0.5 * x
    log_lead = n * math.log(half) - math.lgamma(n + 1)
    if log_lead < -745.0:
        return 0.0
    term = math.exp(log_lead)
    total = term
    step = -half * half
    k = 0
    while True:
        k += 1
        term *= step / (k * (n + k))
        total += term
        if abs(term) <= 1e-17 * abs(total):
            return total


def miller_start_order(n_max, x):
    """Order at which the downward recurrence is seeded."""
    reach = max(n_max, math.ceil(x))
    return reach + 20 + int(math.sqrt(40.0 * max(n_max, x)))


def _miller(n_max, x):
    start = miller_start_order(n_max, x)
    values = np.zeros(start + 2)
    values[start] = _SEED
    two_over_x = 2.0 / x
    for k in range(start, 0, -1):
        values[k - 1] = k * two_over_x * values[k] - values[k + 1]
        if abs(values[k - 1]) > _RESCALE_ABOVE:
            values[k - 1:] *= _RESCALE_BY
    norm = math.sqrt(values[0] ** 2 + 2.0 * float(np.dot(values[1:], values[1:])))
    logger.debug("Miller recurrence from order %d at x=%g", start, x)
    return values[: n_max + 1] / norm


def nonnegative_orders(n_max, x):
    """J_0(x) ... J_{n_max}(x) as one array."""
    x = _check_argument(x)
    n_max = _check_order(n_max)
    if n_max < 0:
        raise DomainError(f"n_max must be non-negative, got {n_max}")
    if x < SERIES_ARGUMENT:
        values = np.zeros(n_max + 1)
        for n in range(n_max + 1):
            values[n] = _series(n, x)
            if values[n] == 0.0 and n > 0:
                break
        return values
    return _miller(n_max, x)


def _reflect(order, value):
    # J_{-n} = (-1)^n J_n
    return -value if order < 0 and order % 2 else value


def bessel_j(order, x):
    """Bessel function of the first kind J_order(x).

    Args:
        order (int): integer order, |order| <= 10**6.
        x (float): finite, non-negative argument.

    Returns:
        float: J_order(x).
    """
    order = _check_order(order)
    x = _check_argument(x)
    n = abs(order)
    if x < SERIES_ARGUMENT or x * x < n + 1:
        value = _series(n, x)
    else:
        value = float(_miller(n, x)[n])
    return _reflect(order, value)


@dataclass(frozen=True)
class BesselRow:
    """J_q(x) for every order q of a contiguous range [q_min, q_max]."""

    x: float
    q_min: int
    q_max: int
    values: np.ndarray

    @property
    def orders(self):
        return np.arange(self.q_min, self.q_max + 1)

    def __len__(self):
        return self.q_max - self.q_min + 1

    def __getitem__(self, q):
        if not self.q_min <= q <= self.q_max:
            raise OrderRangeError(q, (self.q_min, self.q_max))
        return float(self.values[q - self.q_min])

    def squares(self):
        return self.values**2

    def completeness_defect(self):
        return abs(float(np.sum(self.values**2)) - 1.0)


def bessel_row(x, window):
    """Evaluate J_q(x) over a sideband window in a single recurrence pass.

    Args:
        x (float): non-negative argument, normally kappa*L.
        window (SidebandWindow): orders to evaluate.

    Returns:
        BesselRow
    """
    return bessel_range(x, window.q_min, window.q_max)


def bessel_range(x, q_min, q_max):
    """J_q(x) for q_min <= q <= q_max; the range need not contain 0."""
    x = _check_argument(x)
    q_min, q_max = int(q_min), int(q_max)
    if q_max < q_min:
        raise DomainError(f"empty window [{q_min}, {q_max}]")
    reach = _check_order(max(abs(q_min), abs(q_max)))
    table = nonnegative_orders(reach, x)
    orders = np.arange(q_min, q_max + 1)
    values = table[np.abs(orders)]
    odd_negative = (orders < 0) & (orders % 2 == 1)
    values = np.where(odd_negative, -values, values)
    values.setflags(write=False)
    return BesselRow(x=x, q_min=q_min, q_max=q_max, values=values)
