"""Input states of a single sideband: moments, photon-number distributions and
Fock-space amplitudes.

Quadratures follow X(phi) = b^dag exp(i phi) + b exp(-i phi) everywhere.
"""

import cmath
import logging
import math
from abc import ABC, abstractmethod
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy import stats

from ramancomb.exceptions import ConfigError, DomainError, UndefinedStatisticError

logger = logging.getLogger(__name__)

SUPPORT_TAIL = 1e-13
MAX_CORRELATION_ORDER = 4


@dataclass(frozen=True)
class MomentSet:
    """Low-order moments of one mode.

    Attributes:
        m_b (complex): <b>
        m_b2 (complex): <b^2>
        n_mean (float): <b^dag b>
        m_b2dag_b2 (float): <b^dag^2 b^2>
        m_b2dag_b (complex): <b^dag^2 b>
    """

    m_b: complex
    m_b2: complex
    n_mean: float
    m_b2dag_b2: float
    m_b2dag_b: complex

    @property
    def m_bdag_b2(self):
        """<b^dag b^2>"""
        return self.m_b2dag_b.conjugate()


VACUUM_MOMENTS = MomentSet(0j, 0j, 0.0, 0.0, 0j)


def quadrature_squeezing(n_mean, m_b, m_b2, phi):
    """Squeezing factor S(phi) = <(Delta X)^2> - 1.

    S < 0 marks squeezing of the phi-quadrature; S >= -1 for every state.
    """
    m_b = complex(m_b)
    variance = (complex(m_b2) - m_b * m_b) * cmath.exp(-2j * phi)
    return 2.0 * (n_mean - abs(m_b) ** 2) + 2.0 * variance.real


def optimal_quadrature(n_mean, m_b, m_b2):
    """Angle in [0, pi) minimising S(phi) and the minimum itself."""
    m_b = complex(m_b)
    spread = complex(m_b2) - m_b * m_b
    base = 2.0 * (n_mean - abs(m_b) ** 2)
    if spread == 0:
        return 0.0, base
    phi = ((cmath.phase(spread) + math.pi) / 2.0) % math.pi
    return phi, base - 2.0 * abs(spread)


def _unit_vector(n, length):
    vector = np.zeros(length, dtype=complex)
    if n < length:
        vector[n] = 1.0
    return vector


def _check_nonnegative(name, value):
    value = float(value)
    if not math.isfinite(value) or value < 0:
        raise DomainError(f"{name} must be finite and non-negative, got {value}")
    return value


class ModeState(ABC):
    """State of a single sideband mode."""

    kind = None
    pure = True

    @abstractmethod
    def moments(self):
        """MomentSet of the state."""

    @abstractmethod
    def distribution(self, n_max):
        """Photon-number probabilities p(0..n_max)."""

    @abstractmethod
    def to_dict(self):
        """Tagged record used in scenario configs."""

    def factorial_moment(self, n):
        """<b^dag^n b^n>, summed over the distribution by default."""
        n_max = self.support_bound()
        k = np.arange(n_max + 1)
        falling = np.array([math.perm(int(j), n) for j in k], dtype=float)
        return float(np.dot(self.distribution(n_max), falling))

    def support_bound(self, tail=SUPPORT_TAIL):
        """Smallest n_max with 1 - sum_{n <= n_max} p(n) <= tail."""
        n_max = 16
        while n_max <= 10**6:
            cumulative = np.cumsum(self.distribution(n_max))
            hits = np.nonzero(cumulative >= 1.0 - tail)[0]
            if hits.size:
                return int(hits[0])
            n_max *= 2
        raise DomainError(f"{self} has no support bound below 10**6 photons")

    def amplitudes(self, cap):
        """Fock amplitudes c_0..c_cap of a pure state (not renormalised)."""
        raise DomainError(f"{self.kind} state is mixed and has no amplitudes")

    def components(self, cap):
        """Convex decomposition [(weight, amplitudes)] over Fock levels <= cap."""
        return [(1.0, self.amplitudes(cap))]

    @property
    def mean_photon(self):
        return self.moments().n_mean


@dataclass(frozen=True)
class Vacuum(ModeState):
    kind = "vacuum"

    def moments(self):
        return VACUUM_MOMENTS

    def distribution(self, n_max):
        return _unit_vector(0, n_max + 1).real

    def factorial_moment(self, n):
        return 0.0

    def support_bound(self, tail=SUPPORT_TAIL):
        return 0

    def amplitudes(self, cap):
        return _unit_vector(0, cap + 1)

    def to_dict(self):
        return {"kind": self.kind}


@dataclass(frozen=True)
class Coherent(ModeState):
    alpha: complex

    kind = "coherent"

    def __post_init__(self):
        alpha = complex(self.alpha)
        if not cmath.isfinite(alpha):
            raise DomainError(f"coherent amplitude must be finite, got {alpha}")
        object.__setattr__(self, "alpha", alpha)

    @property
    def intensity(self):
        return abs(self.alpha) ** 2

    def moments(self):
        alpha = self.alpha
        return MomentSet(
            m_b=alpha,
            m_b2=alpha * alpha,
            n_mean=self.intensity,
            m_b2dag_b2=self.intensity**2,
            m_b2dag_b=alpha.conjugate() ** 2 * alpha,
        )

    def distribution(self, n_max):
        if self.intensity == 0.0:
            return _unit_vector(0, n_max + 1).real
        return stats.poisson.pmf(np.arange(n_max + 1), self.intensity)

    def factorial_moment(self, n):
        return self.intensity**n

    def amplitudes(self, cap):
        values = np.zeros(cap + 1, dtype=complex)
        values[0] = math.exp(-0.5 * self.intensity)
        for n in range(1, cap + 1):
            values[n] = values[n - 1] * self.alpha / math.sqrt(n)
        return values

    def to_dict(self):
        return {"kind": self.kind, "alpha": [self.alpha.real, self.alpha.imag]}


@dataclass(frozen=True)
class Fock(ModeState):
    n: int

    kind = "fock"

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 0:
            raise DomainError(f"Fock photon number must be a non-negative integer, got {self.n}")
        object.__setattr__(self, "n", int(self.n))

    def moments(self):
        return MomentSet(0j, 0j, float(self.n), float(self.n * (self.n - 1)), 0j)

    def distribution(self, n_max):
        return _unit_vector(self.n, n_max + 1).real

    def factorial_moment(self, n):
        return float(math.perm(self.n, n))

    def support_bound(self, tail=SUPPORT_TAIL):
        return self.n

    def amplitudes(self, cap):
        return _unit_vector(self.n, cap + 1)

    def to_dict(self):
        return {"kind": self.kind, "n": self.n}


@dataclass(frozen=True)
class Thermal(ModeState):
    mean: float

    kind = "thermal"
    pure = False

    def __post_init__(self):
        object.__setattr__(self, "mean", _check_nonnegative("thermal mean", self.mean))

    def moments(self):
        return MomentSet(0j, 0j, self.mean, 2.0 * self.mean**2, 0j)

    def distribution(self, n_max):
        # Boltzmann law N^n / (N + 1)^(n + 1)
        return stats.geom.pmf(np.arange(n_max + 1), 1.0 / (self.mean + 1.0), loc=-1)

    def factorial_moment(self, n):
        return math.factorial(n) * self.mean**n

    def support_bound(self, tail=SUPPORT_TAIL):
        if self.mean == 0.0:
            return 0
        ratio = self.mean / (self.mean + 1.0)
        # cumulative mass up to n is 1 - ratio^(n+1)
        return max(0, math.ceil(math.log(tail) / math.log(ratio)) - 1)

    def components(self, cap):
        weights = self.distribution(cap)
        return [(float(w), _unit_vector(m, cap + 1)) for m, w in enumerate(weights) if w > 0]

    def to_dict(self):
        return {"kind": self.kind, "mean": self.mean}


@dataclass(frozen=True)
class SqueezedVacuum(ModeState):
    """S(xi)|0> with xi = r exp(i theta)."""

    r: float
    theta: float = 0.0

    kind = "squeezed_vacuum"

    def __post_init__(self):
        object.__setattr__(self, "r", _check_nonnegative("squeezing parameter r", self.r))
        theta = float(self.theta)
        if not math.isfinite(theta):
            raise DomainError(f"squeezing angle must be finite, got {theta}")
        object.__setattr__(self, "theta", theta % (2.0 * math.pi))

    def moments(self):
        sinh, cosh = math.sinh(self.r), math.cosh(self.r)
        return MomentSet(
            m_b=0j,
            m_b2=-cmath.exp(1j * self.theta) * sinh * cosh,
            n_mean=sinh**2,
            m_b2dag_b2=(sinh * cosh) ** 2 + 2.0 * sinh**4,
            m_b2dag_b=0j,
        )

    def distribution(self, n_max):
        probabilities = np.zeros(n_max + 1)
        t2 = math.tanh(self.r) ** 2
        weight = 1.0 / math.cosh(self.r)
        for m in range(0, n_max // 2 + 1):
            if m:
                weight *= t2 * (2 * m - 1) / (2 * m)
            probabilities[2 * m] = weight
        return probabilities

    def factorial_moment(self, n):
        sinh, cosh = math.sinh(self.r), math.cosh(self.r)
        if n == 1:
            return sinh**2
        if n == 2:
            return (sinh * cosh) ** 2 + 2.0 * sinh**4
        return super().factorial_moment(n)

    def amplitudes(self, cap):
        values = np.zeros(cap + 1, dtype=complex)
        ratio = -cmath.exp(1j * self.theta) * math.tanh(self.r)
        values[0] = 1.0 / math.sqrt(math.cosh(self.r))
        for m in range(1, cap // 2 + 1):
            values[2 * m] = values[2 * m - 2] * ratio * math.sqrt((2 * m - 1) / (2 * m))
        return values

    def to_dict(self):
        return {"kind": self.kind, "r": self.r, "theta": self.theta}


@dataclass(frozen=True)
class Truncated(ModeState):
    """A state restricted to Fock levels 0..cap and renormalised.

    This is what a Fock-space simulation with photon cap ``cap`` actually holds;
    all quantities are evaluated numerically from the truncated amplitudes or
    populations.
    """

    base: ModeState
    cap: int

    def __post_init__(self):
        if int(self.cap) != self.cap or self.cap < 0:
            raise DomainError(f"photon cap must be a non-negative integer, got {self.cap}")
        object.__setattr__(self, "cap", int(self.cap))

    @property
    def kind(self):
        return self.base.kind

    @property
    def pure(self):
        return self.base.pure

    @cached_property
    def _kept(self):
        if self.pure:
            return self.base.amplitudes(self.cap)
        return self.base.distribution(self.cap)

    @cached_property
    def leakage(self):
        kept = self._kept
        mass = float(np.sum(np.abs(kept) ** 2)) if self.pure else float(np.sum(kept))
        return max(0.0, 1.0 - mass)

    @cached_property
    def populations(self):
        kept = self._kept
        weights = np.abs(kept) ** 2 if self.pure else np.asarray(kept, dtype=float)
        if weights.sum() == 0.0:
            raise DomainError(f"{self.base} has no population at or below {self.cap} photons")
        return weights / weights.sum()

    def amplitudes(self, cap=None):
        if not self.pure:
            return super().amplitudes(cap)
        self.populations  # raises when nothing survives the cap
        values = self._kept / math.sqrt(float(np.sum(np.abs(self._kept) ** 2)))
        if cap is None or cap == self.cap:
            return values
        padded = np.zeros(cap + 1, dtype=complex)
        keep = min(cap, self.cap) + 1
        padded[:keep] = values[:keep]
        return padded

    def components(self, cap=None):
        cap = self.cap if cap is None else cap
        if self.pure:
            return [(1.0, self.amplitudes(cap))]
        return [
            (float(w), _unit_vector(m, cap + 1))
            for m, w in enumerate(self.populations)
            if w > 0 and m <= cap
        ]

    def distribution(self, n_max):
        probabilities = np.zeros(n_max + 1)
        keep = min(n_max, self.cap) + 1
        probabilities[:keep] = self.populations[:keep]
        return probabilities

    def support_bound(self, tail=SUPPORT_TAIL):
        return int(np.nonzero(self.populations)[0][-1])

    def factorial_moment(self, n):
        k = np.arange(self.cap + 1)
        falling = np.array([math.perm(int(j), n) for j in k], dtype=float)
        return float(np.dot(self.populations, falling))

    def moments(self):
        n = np.arange(self.cap + 1)
        n_mean = float(np.dot(self.populations, n))
        m_b2dag_b2 = float(np.dot(self.populations, n * (n - 1)))
        if not self.pure:
            return MomentSet(0j, 0j, n_mean, m_b2dag_b2, 0j)
        c = self.amplitudes()
        m_b = complex(np.sum(c[:-1].conj() * c[1:] * np.sqrt(n[1:])))
        m_b2 = complex(np.sum(c[:-2].conj() * c[2:] * np.sqrt(n[2:] * (n[2:] - 1))))
        m_b2dag_b = complex(np.sum(c[1:].conj() * c[:-1] * n[:-1] * np.sqrt(n[1:])))
        return MomentSet(m_b, m_b2, n_mean, m_b2dag_b2, m_b2dag_b)

    def to_dict(self):
        return {**self.base.to_dict(), "cap": self.cap}


def truncated(state, cap):
    return Truncated(state, cap)


def photon_number_distribution(state, n_max):
    if int(n_max) != n_max or n_max < 0:
        raise DomainError(f"n_max must be a non-negative integer, got {n_max}")
    return np.asarray(state.distribution(int(n_max)), dtype=float)


def moments(state):
    return state.moments()


def input_squeezing_factor(state, phi):
    m = state.moments()
    return quadrature_squeezing(m.n_mean, m.m_b, m.m_b2, phi)


def check_correlation_order(order):
    if int(order) != order or not 1 <= order <= MAX_CORRELATION_ORDER:
        raise DomainError(
            f"correlation order must be an integer in [1, {MAX_CORRELATION_ORDER}], got {order}"
        )
    return int(order)


def normalized_autocorrelation(state, order):
    """g^(n) = <b^dag^n b^n> / <b^dag b>^n of the input state."""
    order = check_correlation_order(order)
    n_mean = state.moments().n_mean
    if n_mean == 0.0:
        raise UndefinedStatisticError(f"g^({order}) undefined for an empty {state.kind} state")
    return state.factorial_moment(order) / n_mean**order


_STATE_FIELDS = {
    "vacuum": (Vacuum, ()),
    "coherent": (Coherent, ("alpha",)),
    "fock": (Fock, ("n",)),
    "thermal": (Thermal, ("mean",)),
    "squeezed_vacuum": (SqueezedVacuum, ("r", "theta")),
}


def state_from_dict(record, field="state"):
    """Build a ModeState from its tagged record."""
    if not isinstance(record, dict):
        raise ConfigError("mode state must be an object with a 'kind'", field=field)
    kind = record.get("kind")
    if kind not in _STATE_FIELDS:
        raise ConfigError(
            f"unknown state kind {kind!r}; expected one of {sorted(_STATE_FIELDS)}",
            field=f"{field}.kind",
        )
    cls, names = _STATE_FIELDS[kind]
    unknown = set(record) - set(names) - {"kind"}
    if unknown:
        raise ConfigError(f"unexpected keys {sorted(unknown)} for {kind}", field=field)
    kwargs = {}
    for name in names:
        if name not in record:
            if kind == "squeezed_vacuum" and name == "theta":
                continue
            raise ConfigError(f"missing '{name}'", field=f"{field}.{name}")
        value = record[name]
        if name == "alpha" and isinstance(value, (list, tuple)):
            if len(value) != 2:
                raise ConfigError("alpha must be a number or [re, im]", field=f"{field}.alpha")
            value = complex(value[0], value[1])
        kwargs[name] = value
    try:
        return cls(**kwargs)
    except (DomainError, TypeError) as error:
        raise ConfigError(str(error), field=field) from error


def state_to_dict(state):
    return state.to_dict()
