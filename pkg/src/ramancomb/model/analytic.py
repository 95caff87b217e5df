"""Closed-form photon statistics of the sidebands generated from a probe at q=0.

Every output quantity is the input quantity reweighted by Bessel factors
J_q(kappa_L); normalised statistics are therefore replicated in every
populated sideband.
"""

import itertools
import logging
import math
from collections import Counter
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from scipy import optimize, stats

from ramancomb.data.states import (
    Coherent,
    Fock,
    MomentSet,
    Truncated,
    check_correlation_order,
    normalized_autocorrelation,
    optimal_quadrature,
    quadrature_squeezing,
)
from ramancomb.exceptions import DomainError, OrderRangeError, UndefinedStatisticError
from ramancomb.model.scattering import (
    check_kappa_L,
    default_window,
    phase,
    propagate_coherent,
    scattering_matrix,
)
from ramancomb.model.specfun import bessel_j, bessel_row, nonnegative_orders

logger = logging.getLogger(__name__)

SQUEEZING_GRID_POINTS = 64
ENUMERATION_MAX_PHOTONS = 6
ENUMERATION_MAX_WIDTH = 13


@dataclass
class StatisticsRecord:
    """Named observables of one parameter point.

    ``sidebands`` maps q to {observable: value}, ``pairs`` maps (k, l) to
    {observable: value}, ``distributions`` maps q to p_q(0..n_max). Undefined
    statistics are stored as NaN; ``unresolved`` names the NaN keys that are
    defined but too small to estimate.
    """

    kappa_L: float
    input_total: float
    sidebands: dict = field(default_factory=dict)
    pairs: dict = field(default_factory=dict)
    distributions: dict = field(default_factory=dict)
    scalars: dict = field(default_factory=dict)
    unresolved: set = field(default_factory=set)

    def put(self, q, name, value):
        self.sidebands.setdefault(int(q), {})[name] = float(value)

    def put_pair(self, k, l, name, value):
        self.pairs.setdefault((int(k), int(l)), {})[name] = float(value)

    def observables(self):
        """Flat {key: value} view, e.g. ``g2[1]``, ``g_kl[0,1]``, ``marginal[0][2]``."""
        flat = {}
        for q, values in sorted(self.sidebands.items()):
            for name, value in values.items():
                flat[f"{name}[{q}]"] = value
        for (k, l), values in sorted(self.pairs.items()):
            for name, value in values.items():
                flat[f"{name}[{k},{l}]"] = value
        for q, probabilities in sorted(self.distributions.items()):
            for n, value in enumerate(probabilities):
                flat[f"marginal[{q}][{n}]"] = float(value)
        flat.update(self.scalars)
        return flat


def undefined_as_nan(function, *args):
    try:
        return function(*args)
    except UndefinedStatisticError:
        return math.nan


def base_state(state):
    return state.base if isinstance(state, Truncated) else state


def is_single_photon(state):
    base = base_state(state)
    return isinstance(base, Fock) and base.n == 1


@dataclass(frozen=True)
class SingleModeScenario:
    """Probe ``input`` at q=0, every other sideband initially empty."""

    input: object
    kappa_L: float
    window: object = None

    def __post_init__(self):
        object.__setattr__(self, "kappa_L", check_kappa_L(self.kappa_L))
        if self.window is None:
            object.__setattr__(self, "window", default_window(self.kappa_L))

    @cached_property
    def bessel(self):
        return bessel_row(self.kappa_L, self.window)

    @cached_property
    def input_moments(self):
        return self.input.moments()

    def j(self, q):
        if q not in self.window:
            raise OrderRangeError(q, self.window)
        return self.bessel[q]


def _check_moment_order(n):
    if int(n) != n or n < 1:
        raise DomainError(f"moment order must be a positive integer, got {n}")
    return int(n)


def sideband_moment(scn, q, n):
    """<b_q^dag^n b_q^n> = J_q^2n <b_0^dag^n b_0^n>"""
    n = _check_moment_order(n)
    return scn.j(q) ** (2 * n) * scn.input.factorial_moment(n)


def mean_photon(scn, q):
    return sideband_moment(scn, q, 1)


def autocorrelation(scn, q, n):
    """Gamma_q^(n) = J_q^2n Gamma_in^(n), Gamma^(n) = <b^dag^n b^n> - <b^dag b>^n."""
    n = _check_moment_order(n)
    gamma_in = scn.input.factorial_moment(n) - scn.input_moments.n_mean**n
    return scn.j(q) ** (2 * n) * gamma_in


def normalized_autocorrelation_out(scn, q, n):
    """g_q^(n) = g_in^(n) whenever J_q != 0; the J_q powers cancel exactly."""
    n = check_correlation_order(n)
    if scn.j(q) == 0.0:
        raise UndefinedStatisticError(f"sideband {q} is empty at kappa_L={scn.kappa_L}")
    return normalized_autocorrelation(scn.input, n)


def cross_gamma(scn, k, l):
    """Gamma_kl^(2) = J_k^2 J_l^2 Gamma_in^(2); equals Gamma_k^(2) for k == l."""
    if k == l:
        return autocorrelation(scn, k, 2)
    gamma_in = scn.input.factorial_moment(2) - scn.input_moments.n_mean**2
    return scn.j(k) ** 2 * scn.j(l) ** 2 * gamma_in


def cross_correlation(scn, k, l):
    """(Gamma_kl^(2), g_kl^(2)) of sidebands k and l."""
    if k == l:
        return autocorrelation(scn, k, 2), normalized_autocorrelation_out(scn, k, 2)
    gamma = cross_gamma(scn, k, l)
    if scn.j(k) == 0.0 or scn.j(l) == 0.0:
        raise UndefinedStatisticError(f"g_kl undefined: sideband {k} or {l} is empty")
    return gamma, normalized_autocorrelation(scn.input, 2)


def marginal_pnd(scn, q, n_max):
    """p_q(n) for n = 0..n_max.

    Each input photon reaches sideband q independently with probability J_q^2,
    so p_q(n) = sum_m Binomial(n; m, J_q^2) p_in(m), summed up to the input's
    support bound.
    """
    if int(n_max) != n_max or n_max < 0:
        raise DomainError(f"n_max must be a non-negative integer, got {n_max}")
    transmission = scn.j(q) ** 2
    support = scn.input.support_bound()
    p_in = scn.input.distribution(support)
    m = np.arange(support + 1)[:, None]
    n = np.arange(int(n_max) + 1)[None, :]
    return p_in @ stats.binom.pmf(n, m, transmission)


def _check_occupations(occupations, window):
    for q, count in occupations.items():
        if q not in window:
            raise OrderRangeError(q, window)
        if int(count) != count or count < 0:
            raise DomainError(f"occupation of sideband {q} must be a non-negative integer")


def _multinomial(counts):
    total = math.factorial(sum(counts))
    for count in counts:
        total //= math.factorial(count)
    return total


def joint_pnd(scn, occupations):
    """P({n_q}) = p_in(N) N!/prod(n_q!) prod J_q^(2 n_q), N = sum n_q."""
    _check_occupations(occupations, scn.window)
    counts = [int(c) for c in occupations.values() if c]
    total = sum(counts)
    weight = float(_multinomial(counts))
    for q, count in occupations.items():
        if count:
            weight *= scn.j(q) ** (2 * int(count))
    return scn.input.distribution(total)[total] * weight


def sideband_moments(scn, q):
    """MomentSet of sideband q after scattering."""
    j = scn.j(q)
    m = scn.input_moments
    return MomentSet(
        m_b=complex(phase(q) * j * m.m_b),
        m_b2=complex(phase(2 * q) * j * j * m.m_b2),
        n_mean=j * j * m.n_mean,
        m_b2dag_b2=j**4 * m.m_b2dag_b2,
        m_b2dag_b=complex(phase(-q) * j**3 * m.m_b2dag_b),
    )


def squeezing_factor_out(scn, q, phi):
    """S_q(phi); satisfies S_q(phi + q pi/2) = J_q^2 S_in(phi)."""
    m = sideband_moments(scn, q)
    return quadrature_squeezing(m.n_mean, m.m_b, m.m_b2, phi)


def normalized_squeezing_out(scn, q, phi):
    """s_q(phi) = S_q(phi) / <n_q>."""
    mean = mean_photon(scn, q)
    if mean == 0.0:
        raise UndefinedStatisticError(f"sideband {q} is empty at kappa_L={scn.kappa_L}")
    return squeezing_factor_out(scn, q, phi) / mean


def best_squeezing(scn, q):
    """(phi, S) at the most squeezed quadrature of sideband q."""
    m = sideband_moments(scn, q)
    return optimal_quadrature(m.n_mean, m.m_b, m.m_b2)


def squeezing_profile(scn, q, points=SQUEEZING_GRID_POINTS):
    """S_q sampled on ``points`` angles in [0, pi)."""
    phis = np.linspace(0.0, math.pi, points, endpoint=False)
    values = np.array([squeezing_factor_out(scn, q, phi) for phi in phis])
    return phis, values


def coherent_output(scn):
    """Coherent amplitudes alpha_q = i^q J_q alpha of every sideband."""
    if not isinstance(scn.input, Coherent):
        raise DomainError(f"coherent_output needs a coherent input, got {scn.input.kind}")
    matrix = scattering_matrix(scn.kappa_L, scn.window)
    return propagate_coherent({0: scn.input.alpha}, matrix)


def fock_output_coefficient(n_photons, occupations, kappa_L):
    """Amplitude of |{n_q}> in the scattered N-photon Fock state.

    C = sqrt(N!/prod n_q!) prod i^(q n_q) J_q^n_q, and 0 unless sum n_q = N.
    """
    kappa_L = check_kappa_L(kappa_L)
    counts = {int(q): int(c) for q, c in occupations.items() if c}
    if sum(counts.values()) != n_photons:
        return 0j
    value = complex(math.sqrt(_multinomial(list(counts.values()))))
    for q, count in counts.items():
        value *= phase(q * count) * bessel_j(q, kappa_L) ** count
    return complex(value)


def single_photon_concurrence(k, l, kappa_L):
    """Concurrence 2|J_k J_l| between sidebands k and l of the scattered photon."""
    if k == l:
        raise DomainError("concurrence needs two distinct sidebands")
    kappa_L = check_kappa_L(kappa_L)
    return 2.0 * abs(bessel_j(k, kappa_L) * bessel_j(l, kappa_L))


def enumerate_occupations(window, n_photons):
    """Every occupation {q: n_q} of the window with sum n_q = n_photons."""
    if n_photons > ENUMERATION_MAX_PHOTONS or window.width > ENUMERATION_MAX_WIDTH:
        raise DomainError(
            f"enumeration limited to N <= {ENUMERATION_MAX_PHOTONS} and width <= "
            f"{ENUMERATION_MAX_WIDTH}, got N={n_photons}, width={window.width}"
        )
    for orders in itertools.combinations_with_replacement(window.orders.tolist(), n_photons):
        yield dict(Counter(orders))


def _derivative(q, x):
    values = nonnegative_orders(q + 1, x)
    return 0.5 * (values[q - 1] - values[q + 1])


def optimal_kappa_L(q, step=0.05):
    """Effective length of the first maximum of |J_q|, where sideband q peaks."""
    q = abs(int(q))
    if q == 0:
        return 0.0
    x = 0.5 * q
    while _derivative(q, x + step) > 0:
        x += step
    root = optimize.bisect(lambda s: _derivative(q, s), x, x + step, xtol=1e-13)
    logger.debug("first peak of J_%d at kappa_L=%.12f", q, root)
    return root


def peak_fraction(q):
    """Largest share J_q^2 of the input photons sideband q ever receives."""
    if q == 0:
        return 1.0
    return bessel_j(q, optimal_kappa_L(q)) ** 2


def equivalent_squeezing_parameter(squeezing):
    """r of the squeezed vacuum whose best quadrature has S = exp(-2r) - 1."""
    if not squeezing > -1.0:
        raise DomainError(f"squeezing factor must exceed -1, got {squeezing}")
    return -0.5 * math.log1p(squeezing)


def photon_statistics_class(g2, tolerance=1e-12):
    if g2 < 1.0 - tolerance:
        return "sub-Poissonian"
    if g2 > 1.0 + tolerance:
        return "super-Poissonian"
    return "Poissonian"


def single_mode_record(scn, orders=None, pairs=(), n_max=None, phi=0.0):
    """StatisticsRecord of a single-mode scenario.

    Squeezing is reported at phi + q pi/2, the angle that maps the input's phi
    quadrature onto sideband q.
    """
    orders = list(scn.window) if orders is None else list(orders)
    record = StatisticsRecord(kappa_L=scn.kappa_L, input_total=scn.input_moments.n_mean)
    for q in orders:
        record.put(q, "mean_photon", mean_photon(scn, q))
        record.put(q, "gamma2", autocorrelation(scn, q, 2))
        record.put(q, "g2", undefined_as_nan(normalized_autocorrelation_out, scn, q, 2))
        record.put(q, "squeezing", squeezing_factor_out(scn, q, phi + q * math.pi / 2))
        record.put(q, "best_squeezing", best_squeezing(scn, q)[1])
        if n_max is not None:
            record.distributions[q] = marginal_pnd(scn, q, n_max)
    for k, l in pairs:
        record.put_pair(k, l, "gamma_kl", cross_gamma(scn, k, l))
        g_kl = undefined_as_nan(lambda: cross_correlation(scn, k, l)[1])
        record.put_pair(k, l, "g_kl", g_kl)
        if is_single_photon(scn.input) and k != l:
            record.put_pair(k, l, "concurrence", single_photon_concurrence(k, l, scn.kappa_L))
    total = float(np.sum(scn.bessel.squares())) * scn.input_moments.n_mean
    record.scalars["total_mean"] = total
    record.scalars["conservation_defect"] = abs(total - record.input_total)
    return record
