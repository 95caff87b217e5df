"""Two-photon interference of one photon in sideband 0 and one in sideband 1."""

import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy import optimize

from ramancomb.exceptions import DomainError, RootShortfallError
from ramancomb.model.analytic import StatisticsRecord
from ramancomb.model.scattering import check_kappa_L, default_window, phase
from ramancomb.model.specfun import bessel_range, nonnegative_orders

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class TwoPhotonOutput:
    """Amplitudes of |2_q> and |1_k 1_l> (k < l) in the scattered state."""

    amp2: dict
    amp11: dict

    def norm(self):
        return sum(abs(a) ** 2 for a in self.amp2.values()) + sum(
            abs(a) ** 2 for a in self.amp11.values()
        )


def _bessel_with_lag(kappa_L, window):
    row = bessel_range(kappa_L, window.q_min - 1, window.q_max)
    return lambda q: row[q]


def two_photon_output(kappa_L, window=None):
    kappa_L = check_kappa_L(kappa_L)
    window = default_window(kappa_L) if window is None else window
    j = _bessel_with_lag(kappa_L, window)
    amp2 = {
        q: complex(phase(2 * q - 1) * math.sqrt(2.0) * j(q) * j(q - 1)) for q in window
    }
    amp11 = {}
    for k in window:
        for l in range(k + 1, window.q_max + 1):
            amp11[(k, l)] = complex(phase(k + l - 1) * (j(k) * j(l - 1) + j(l) * j(k - 1)))
    return TwoPhotonOutput(amp2=amp2, amp11=amp11)


def two_photon_probabilities(kappa_L, window=None):
    """W2 (both photons in q), W11 (one in k, one in l), W1 (exactly one in q), mean."""
    kappa_L = check_kappa_L(kappa_L)
    window = default_window(kappa_L) if window is None else window
    j = _bessel_with_lag(kappa_L, window)
    w2, w1, mean = {}, {}, {}
    for q in window:
        t, s = j(q) ** 2, j(q - 1) ** 2
        w2[q] = 2.0 * t * s
        w1[q] = t + s - 4.0 * t * s
        mean[q] = t + s
    w11 = {}
    for k in window:
        for l in range(k + 1, window.q_max + 1):
            w11[(k, l)] = (j(k) * j(l - 1) + j(l) * j(k - 1)) ** 2
    return {"W2": w2, "W11": w11, "W1": w1, "mean": mean}


def coincidence_probability(kappa_L):
    """W_01 = (J_0^2 - J_1^2)^2, the chance both photons leave in their input sidebands."""
    j0, j1 = nonnegative_orders(1, check_kappa_L(kappa_L))
    return (j0 * j0 - j1 * j1) ** 2


def _contrast(x):
    j0, j1 = nonnegative_orders(1, x)
    return j0 * j0 - j1 * j1


def find_interference_zeros(max_kappa_L, count=3, step=0.01):
    """Effective lengths in (0, max_kappa_L] where W_01 vanishes, i.e. J_0^2 = J_1^2.

    Raises:
        RootShortfallError: fewer than ``count`` zeros exist below ``max_kappa_L``;
            the zeros that were found travel with the error.
    """
    max_kappa_L = check_kappa_L(max_kappa_L)
    if max_kappa_L <= 0:
        raise DomainError("max_kappa_L must be positive")
    points = max(2, int(math.ceil(max_kappa_L / step)) + 1)
    grid = np.linspace(0.0, max_kappa_L, points)
    values = np.array([_contrast(x) for x in grid])
    roots = []
    for left, right, f_left, f_right in zip(grid[:-1], grid[1:], values[:-1], values[1:]):
        if len(roots) == count:
            break
        if f_right == 0.0:
            roots.append(float(right))
        elif f_left * f_right < 0:
            roots.append(optimize.bisect(_contrast, left, right, xtol=1e-13))
    logger.debug("interference zeros below %g: %s", max_kappa_L, roots)
    if len(roots) < count:
        raise RootShortfallError(
            f"found {len(roots)} of {count} interference zeros below kappa_L={max_kappa_L}",
            roots,
        )
    return roots


def two_photon_record(kappa_L, window=None, orders=None, pairs=None):
    kappa_L = check_kappa_L(kappa_L)
    window = default_window(kappa_L) if window is None else window
    probabilities = two_photon_probabilities(kappa_L, window)
    orders = list(window) if orders is None else list(orders)
    pairs = [(0, 1)] if pairs is None else [tuple(sorted(p)) for p in pairs]
    record = StatisticsRecord(kappa_L=kappa_L, input_total=2.0)
    for q in orders:
        record.put(q, "mean_photon", probabilities["mean"][q])
        record.put(q, "W2", probabilities["W2"][q])
        record.put(q, "W1", probabilities["W1"][q])
    for k, l in pairs:
        record.put_pair(k, l, "W11", probabilities["W11"][(k, l)])
    total = float(sum(probabilities["mean"].values()))
    record.scalars["total_mean"] = total
    record.scalars["conservation_defect"] = abs(total - 2.0)
    record.scalars["total_probability"] = float(
        sum(probabilities["W2"].values()) + sum(probabilities["W11"].values())
    )
    return record
