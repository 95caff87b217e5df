"""Linear input-output transform of the sideband annihilation operators.

b_q(out) = sum_q' U_qq' b_q'(in) with U_qq' = i^(q-q') J_{q-q'}(kappa*L).
"""

import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy import constants
from scipy.linalg import toeplitz

from ramancomb.exceptions import DomainError, OrderRangeError
from ramancomb.model.specfun import bessel_range, nonnegative_orders

logger = logging.getLogger(__name__)

DEFAULT_TAIL_EPSILON = 1e-12
DEFAULT_RADIUS_MARGIN = 15

# i**k for k mod 4, kept exact
_POWERS_OF_I = np.array([1.0, 1.0j, -1.0, -1.0j])


def phase(k):
    """Exact i**k for integer k (scalar or array)."""
    return _POWERS_OF_I[np.mod(k, 4)]


def check_kappa_L(kappa_L):
    kappa_L = float(kappa_L)
    if not math.isfinite(kappa_L) or kappa_L < 0:
        raise DomainError(f"kappa_L must be finite and non-negative, got {kappa_L}")
    return kappa_L


@dataclass(frozen=True)
class SidebandWindow:
    """Contiguous range of sideband orders, always containing the carrier q=0."""

    q_min: int
    q_max: int

    def __post_init__(self):
        if int(self.q_min) != self.q_min or int(self.q_max) != self.q_max:
            raise DomainError(f"window bounds must be integers, got {self}")
        object.__setattr__(self, "q_min", int(self.q_min))
        object.__setattr__(self, "q_max", int(self.q_max))
        if not self.q_min <= 0 <= self.q_max:
            raise DomainError(
                f"window [{self.q_min}, {self.q_max}] must contain the carrier q=0"
            )

    @classmethod
    def symmetric(cls, radius):
        radius = int(radius)
        if radius < 0:
            raise DomainError(f"window radius must be non-negative, got {radius}")
        return cls(-radius, radius)

    @classmethod
    def covering(cls, orders, radius=0):
        """Smallest window holding [-radius, radius] and every given order."""
        orders = [int(q) for q in orders]
        return cls(min([-int(radius), 0] + orders), max([int(radius), 0] + orders))

    @property
    def width(self):
        return self.q_max - self.q_min + 1

    @property
    def orders(self):
        return np.arange(self.q_min, self.q_max + 1)

    def __contains__(self, q):
        return self.q_min <= q <= self.q_max

    def __iter__(self):
        return iter(range(self.q_min, self.q_max + 1))

    def index(self, q):
        if q not in self:
            raise OrderRangeError(q, self)
        return int(q) - self.q_min

    def union(self, other):
        return SidebandWindow(min(self.q_min, other.q_min), max(self.q_max, other.q_max))

    def __str__(self):
        return f"[{self.q_min}, {self.q_max}]"


def default_window(kappa_L):
    return SidebandWindow.symmetric(math.ceil(check_kappa_L(kappa_L)) + DEFAULT_RADIUS_MARGIN)


@dataclass(frozen=True)
class ScatteringMatrix:
    kappa_L: float
    window: SidebandWindow
    entries: np.ndarray

    def __getitem__(self, orders):
        q, q_prime = orders
        return complex(self.entries[self.window.index(q), self.window.index(q_prime)])

    def adjoint(self):
        return self.entries.conj().T


def scattering_matrix(kappa_L, window):
    """Build the Toeplitz scattering matrix U on a window.

    Args:
        kappa_L (float): effective medium length, >= 0.
        window (SidebandWindow): retained sideband orders.

    Returns:
        ScatteringMatrix: read-only, exactly the identity at kappa_L = 0.
    """
    kappa_L = check_kappa_L(kappa_L)
    span = window.width - 1
    row = bessel_range(kappa_L, -span, span)
    lags = np.arange(0, span + 1)
    first_column = phase(lags) * row.values[span + lags]
    first_row = phase(-lags) * row.values[span - lags]
    entries = toeplitz(first_column, first_row)
    entries.setflags(write=False)
    return ScatteringMatrix(kappa_L=kappa_L, window=window, entries=entries)


def unitarity_defect(matrix, orders=(0,)):
    """Largest | sum |U|^2 - 1 | over the rows and columns of the given orders.

    Rows near the window edge always miss the Bessel mass that falls outside
    the window, so the check is taken on the orders that carry input light,
    by default the carrier.
    """
    indices = [matrix.window.index(q) for q in orders]
    weights = np.abs(matrix.entries) ** 2
    row_norms = weights[indices, :].sum(axis=1)
    column_norms = weights[:, indices].sum(axis=0)
    return float(max(np.max(np.abs(row_norms - 1.0)), np.max(np.abs(column_norms - 1.0))))


def recommend_window(kappa_L, tail_epsilon=DEFAULT_TAIL_EPSILON):
    """Smallest symmetric window whose excluded Bessel mass is below ``tail_epsilon``.

    The excluded mass for radius R is 2 * sum_{k>R} J_k(kappa_L)^2. The radius is
    never smaller than one.
    """
    kappa_L = check_kappa_L(kappa_L)
    if not 0.0 < tail_epsilon < 1.0:
        raise DomainError(f"tail_epsilon must lie in (0, 1), got {tail_epsilon}")
    reach = math.ceil(kappa_L) + 20 + 10 * math.ceil(kappa_L ** (1.0 / 3.0))
    squares = nonnegative_orders(reach, kappa_L) ** 2
    # tails[R] = 2 * sum_{k > R} J_k^2
    tails = 2.0 * np.append(np.cumsum(squares[::-1])[::-1][1:], 0.0)
    below = np.nonzero(tails < tail_epsilon)[0]
    radius = max(1, int(below[0]) if below.size else reach)
    logger.debug(
        "recommend_window(kappa_L=%g, eps=%g) -> radius %d", kappa_L, tail_epsilon, radius
    )
    return SidebandWindow.symmetric(radius)


def _as_vector(amplitudes, window):
    vector = np.zeros(window.width, dtype=complex)
    for q, alpha in amplitudes.items():
        vector[window.index(q)] = complex(alpha)
    return vector


def _as_map(vector, window):
    return {int(q): complex(a) for q, a in zip(window.orders, vector)}


def propagate_coherent(input_amplitudes, matrix):
    """Map input coherent amplitudes {q: alpha_q} to output amplitudes on the window."""
    vector = _as_vector(input_amplitudes, matrix.window)
    return _as_map(matrix.entries @ vector, matrix.window)


def p_representation_preimage(amplitudes, matrix):
    """Apply the adjoint transform, alpha'_q = sum_q' i^-(q-q') J_{q-q'} alpha_q'.

    The output P function at {alpha_q} equals the input P function at the
    preimage {alpha'_q}.
    """
    vector = _as_vector(amplitudes, matrix.window)
    return _as_map(matrix.adjoint() @ vector, matrix.window)


def single_mode_p_argument(amplitudes, matrix):
    """For an input occupying q=0 only: (alpha'_0, norm of the other alpha'_q).

    P_out vanishes unless the second value is zero.
    """
    preimage = p_representation_preimage(amplitudes, matrix)
    carrier = preimage.pop(0)
    off_support = math.sqrt(sum(abs(a) ** 2 for a in preimage.values()))
    return carrier, off_support


@dataclass(frozen=True)
class PhysicalParameters:
    """SI parameters of the Raman medium and probe.

    Attributes:
        molecular_density (float): molecules per m^3.
        probe_frequency (float): probe angular frequency in rad/s.
        coupling_constant (float): d_0 in SI units.
        raman_coherence (float): |rho_ab|, at most 1/2.
        medium_length (float): medium length in m.
    """

    molecular_density: float
    probe_frequency: float
    coupling_constant: float
    raman_coherence: float
    medium_length: float

    def __post_init__(self):
        for name in (
            "molecular_density",
            "probe_frequency",
            "coupling_constant",
            "raman_coherence",
            "medium_length",
        ):
            value = float(getattr(self, name))
            if not math.isfinite(value) or value < 0:
                raise DomainError(f"{name} must be finite and non-negative, got {value}")
        if self.raman_coherence > 0.5:
            raise DomainError(
                f"raman_coherence must lie in [0, 0.5], got {self.raman_coherence}"
            )

    @property
    def kappa(self):
        """Coupling per unit length, 2 hbar N w0 d0 rho0 / (eps0 c)."""
        return (
            2.0
            * constants.hbar
            * self.molecular_density
            * self.probe_frequency
            * self.coupling_constant
            * self.raman_coherence
            / (constants.epsilon_0 * constants.c)
        )


def compute_kappa_L(params):
    return params.kappa * params.medium_length


def medium_length_for(kappa_L, params):
    """Medium length giving ``kappa_L`` with the other parameters of ``params``."""
    kappa_L = check_kappa_L(kappa_L)
    if params.kappa == 0.0:
        raise DomainError("kappa vanishes; no medium length reaches a nonzero kappa_L")
    return kappa_L / params.kappa


def bandwidth_ratio(kappa_L, carrier_to_modulation):
    """kappa_L * w_m / w_0; the transform assumes this is much smaller than one."""
    kappa_L = check_kappa_L(kappa_L)
    if not carrier_to_modulation > 0:
        raise DomainError(
            f"carrier_to_modulation must be positive, got {carrier_to_modulation}"
        )
    return kappa_L / carrier_to_modulation
