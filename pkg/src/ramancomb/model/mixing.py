"""Sideband statistics for two occupied inputs, at q=0 and at q=nu.

Each output mode is b_q = A b_0 + B b_nu with A = i^q J_q and
B = i^(q-nu) J_{q-nu}, the two inputs being independent.
"""

import logging
import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from ramancomb.data.states import optimal_quadrature, quadrature_squeezing
from ramancomb.exceptions import DomainError, OrderRangeError, UndefinedStatisticError
from ramancomb.model.analytic import StatisticsRecord, undefined_as_nan
from ramancomb.model.scattering import SidebandWindow, check_kappa_L, default_window, phase
from ramancomb.model.specfun import bessel_range

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class TwoModeScenario:
    input0: object
    input_nu: object
    nu: int
    kappa_L: float
    window: object = None

    def __post_init__(self):
        if int(self.nu) != self.nu or self.nu == 0:
            raise DomainError(f"second input order nu must be a nonzero integer, got {self.nu}")
        object.__setattr__(self, "nu", int(self.nu))
        object.__setattr__(self, "kappa_L", check_kappa_L(self.kappa_L))
        if self.window is None:
            window = default_window(self.kappa_L).union(SidebandWindow.covering([self.nu]))
            object.__setattr__(self, "window", window)
        elif self.nu not in self.window:
            raise DomainError(f"window {self.window} must contain nu={self.nu}")

    @cached_property
    def bessel(self):
        # covers J_q and J_{q-nu} for every q in the window
        return bessel_range(
            self.kappa_L,
            self.window.q_min - max(self.nu, 0),
            self.window.q_max - min(self.nu, 0),
        )

    @cached_property
    def moments0(self):
        return self.input0.moments()

    @cached_property
    def moments_nu(self):
        return self.input_nu.moments()

    @property
    def input_total(self):
        return self.moments0.n_mean + self.moments_nu.n_mean

    def coefficients(self, q):
        """(A, B) = (i^q J_q, i^(q-nu) J_{q-nu})."""
        if q not in self.window:
            raise OrderRangeError(q, self.window)
        a = complex(phase(q) * self.bessel[q])
        b = complex(phase(q - self.nu) * self.bessel[q - self.nu])
        return a, b


def two_mode_mean(scn, q):
    """<n_q> = J_q^2 n_0 + J_{q-nu}^2 n_nu + 2 Re[i^-nu <b_0^dag><b_nu>] J_q J_{q-nu}"""
    a, b = scn.coefficients(q)
    m0, mn = scn.moments0, scn.moments_nu
    cross = a.conjugate() * b * m0.m_b.conjugate() * mn.m_b
    return abs(a) ** 2 * m0.n_mean + abs(b) ** 2 * mn.n_mean + 2.0 * cross.real


def two_mode_second_moment(scn, q):
    """<b_q^dag^2 b_q^2> expanded over the two independent inputs."""
    a, b = scn.coefficients(q)
    m0, mn = scn.moments0, scn.moments_nu
    a2, b2 = abs(a) ** 2, abs(b) ** 2
    ab = a.conjugate() * b
    interference = (
        2.0 * a2 * ab * m0.m_b2dag_b * mn.m_b
        + 2.0 * b2 * ab * m0.m_b.conjugate() * mn.m_bdag_b2
        + ab * ab * m0.m_b2.conjugate() * mn.m_b2
    )
    return (
        a2 * a2 * m0.m_b2dag_b2
        + b2 * b2 * mn.m_b2dag_b2
        + 4.0 * a2 * b2 * m0.n_mean * mn.n_mean
        + 2.0 * interference.real
    )


def _deltas(m0, mn):
    delta0 = m0.n_mean * mn.n_mean - abs(m0.m_b) ** 2 * abs(mn.m_b) ** 2
    delta1 = (m0.m_b2dag_b - m0.n_mean * m0.m_b.conjugate()) * mn.m_b
    delta2 = m0.m_b.conjugate() * (mn.m_bdag_b2 - mn.n_mean * mn.m_b)
    delta3 = m0.m_b2.conjugate() * mn.m_b2 - m0.m_b.conjugate() ** 2 * mn.m_b**2
    return delta0, delta1, delta2, delta3


def two_mode_gamma2(scn, q):
    """Gamma_q^(2): the two input Gammas weighted by J^4 plus the Delta_0..Delta_3 mixing terms."""
    a, b = scn.coefficients(q)
    m0, mn = scn.moments0, scn.moments_nu
    a2, b2 = abs(a) ** 2, abs(b) ** 2
    ab = a.conjugate() * b
    gamma0 = m0.m_b2dag_b2 - m0.n_mean**2
    gamma_nu = mn.m_b2dag_b2 - mn.n_mean**2
    delta0, delta1, delta2, delta3 = _deltas(m0, mn)
    return (
        a2 * a2 * gamma0
        + b2 * b2 * gamma_nu
        + 2.0 * a2 * b2 * delta0
        + 4.0 * (a2 * ab * delta1).real
        + 4.0 * (b2 * ab * delta2).real
        + 2.0 * (ab * ab * delta3).real
    )


def two_mode_g2(scn, q):
    mean = two_mode_mean(scn, q)
    if mean == 0.0:
        raise UndefinedStatisticError(f"sideband {q} is empty at kappa_L={scn.kappa_L}")
    if mean**2 == 0.0:
        raise UndefinedStatisticError(f"sideband {q} too weak to resolve g2 at kappa_L={scn.kappa_L}")
    return 1.0 + two_mode_gamma2(scn, q) / mean**2


def two_mode_amplitudes(scn, q):
    """(<b_q>, <b_q^2>)"""
    a, b = scn.coefficients(q)
    m0, mn = scn.moments0, scn.moments_nu
    mean = a * m0.m_b + b * mn.m_b
    square = a * a * m0.m_b2 + 2.0 * a * b * m0.m_b * mn.m_b + b * b * mn.m_b2
    return mean, square


def two_mode_squeezing(scn, q, phi):
    mean, square = two_mode_amplitudes(scn, q)
    return quadrature_squeezing(two_mode_mean(scn, q), mean, square, phi)


def two_mode_squeezing_superposition(scn, q, phi):
    """J_q^2 S_0(phi - q pi/2) + J_{q-nu}^2 S_nu(phi - (q - nu) pi/2)"""
    a, b = scn.coefficients(q)
    m0, mn = scn.moments0, scn.moments_nu
    s0 = quadrature_squeezing(m0.n_mean, m0.m_b, m0.m_b2, phi - q * math.pi / 2)
    s_nu = quadrature_squeezing(mn.n_mean, mn.m_b, mn.m_b2, phi - (q - scn.nu) * math.pi / 2)
    return abs(a) ** 2 * s0 + abs(b) ** 2 * s_nu


def two_mode_normalized_squeezing(scn, q, phi):
    mean = two_mode_mean(scn, q)
    if mean == 0.0:
        raise UndefinedStatisticError(f"sideband {q} is empty at kappa_L={scn.kappa_L}")
    return two_mode_squeezing(scn, q, phi) / mean


def two_mode_best_squeezing(scn, q):
    mean, square = two_mode_amplitudes(scn, q)
    return optimal_quadrature(two_mode_mean(scn, q), mean, square)


def two_mode_record(scn, orders=None, phi=0.0):
    orders = list(scn.window) if orders is None else list(orders)
    record = StatisticsRecord(kappa_L=scn.kappa_L, input_total=scn.input_total)
    for q in orders:
        angle = phi + q * math.pi / 2
        record.put(q, "mean_photon", two_mode_mean(scn, q))
        record.put(q, "gamma2", two_mode_gamma2(scn, q))
        record.put(q, "g2", undefined_as_nan(two_mode_g2, scn, q))
        record.put(q, "squeezing", two_mode_squeezing(scn, q, angle))
        record.put(
            q, "normalized_squeezing", undefined_as_nan(two_mode_normalized_squeezing, scn, q, angle)
        )
        record.put(q, "best_squeezing", two_mode_best_squeezing(scn, q)[1])
    total = float(np.sum([two_mode_mean(scn, q) for q in scn.window]))
    record.scalars["total_mean"] = total
    record.scalars["conservation_defect"] = abs(total - scn.input_total)
    return record
