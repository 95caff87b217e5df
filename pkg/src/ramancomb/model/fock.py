"""Truncated multimode Fock space.

States |{n_q}> with sum n_q <= photon_cap are ordered by total photon number N
and, inside each N block, lexicographically in q (ascending). The hopping
Hamiltonian -g sum_q (b_q b_{q+1}^dag + h.c.) conserves N, so it is stored
and exponentiated block by block.
"""

import itertools
import logging
from dataclasses import dataclass, field

import numpy as np
from scipy import sparse
from scipy.linalg import expm
from scipy.special import comb

from ramancomb.exceptions import (
    CapacityError,
    DomainError,
    OrderRangeError,
    TruncationError,
    WindowTooSmallError,
)
from ramancomb.model.scattering import check_kappa_L

logger = logging.getLogger(__name__)

DEFAULT_BASIS_LIMIT = 2_000_000
DENSE_BLOCK_LIMIT = 2000
BOUNDARY_TOLERANCE = 1e-6
NORM_TOLERANCE = 1e-9
LEAKAGE_TOLERANCE = 1e-6


def _stars_table(cap, width):
    """stars[R, m] = C(R + m, m): compositions of at most R photons into m modes."""
    stars = np.ones((cap + 1, width + 1), dtype=np.int64)
    for total in range(1, cap + 1):
        for modes in range(1, width + 1):
            stars[total, modes] = stars[total - 1, modes] + stars[total, modes - 1]
    return stars


def basis_size(width, photon_cap):
    return int(comb(width + photon_cap, photon_cap, exact=True))


def _compositions(total, parts, memo):
    """All occupation rows of ``parts`` modes holding ``total`` photons, lexicographic."""
    key = (total, parts)
    if key not in memo:
        if parts == 1:
            memo[key] = np.array([[total]], dtype=np.int16)
        else:
            pieces = []
            for first in range(total + 1):
                rest = _compositions(total - first, parts - 1, memo)
                head = np.full((len(rest), 1), first, dtype=np.int16)
                pieces.append(np.hstack([head, rest]))
            memo[key] = np.vstack(pieces)
    return memo[key]


class FockBasis:
    """Graded lexicographic Fock basis of a sideband window.

    Args:
        window (SidebandWindow): modes of the basis.
        photon_cap (int): largest total photon number kept.
        limit (int): largest basis size accepted.
    """

    def __init__(self, window, photon_cap, limit=DEFAULT_BASIS_LIMIT):
        if int(photon_cap) != photon_cap or photon_cap < 0:
            raise DomainError(f"photon cap must be a non-negative integer, got {photon_cap}")
        self.window = window
        self.photon_cap = int(photon_cap)
        self.width = window.width
        self._stars = _stars_table(self.photon_cap, self.width)
        self.size = int(self._stars[self.photon_cap, self.width])
        if self.size > limit:
            raise CapacityError(
                f"basis of {self.size} states (window {window}, cap {photon_cap}) "
                f"exceeds the limit of {limit}"
            )
        # offsets[N] = number of states holding fewer than N photons
        block_sizes = self._stars[:, self.width - 1]
        self.offsets = np.concatenate([[0], np.cumsum(block_sizes)])
        memo = {}
        self.occupations = np.vstack(
            [_compositions(total, self.width, memo) for total in range(self.photon_cap + 1)]
        )
        self.occupations.setflags(write=False)
        self.totals = self.occupations.sum(axis=1, dtype=np.int64)
        logger.debug("Fock basis: window %s, cap %d, %d states", window, photon_cap, self.size)

    def __len__(self):
        return self.size

    def block(self, total):
        """Slice of the states holding exactly ``total`` photons."""
        return slice(int(self.offsets[total]), int(self.offsets[total + 1]))

    def ranks(self, occupations):
        """Basis indices of occupation rows (vectorised inverse of ``occupations``)."""
        occupations = np.atleast_2d(np.asarray(occupations, dtype=np.int64))
        totals = occupations.sum(axis=1)
        # photons still to place before each position
        remaining = totals[:, None] - np.cumsum(occupations, axis=1) + occupations
        modes_after = self.width - 1 - np.arange(self.width)
        skipped = self._stars[remaining, modes_after] - self._stars[remaining - occupations, modes_after]
        return self.offsets[totals] + skipped.sum(axis=1)

    def mode(self, q):
        if q not in self.window:
            raise OrderRangeError(q, self.window)
        return self.window.index(q)

    def index(self, occupation):
        """Index of {q: n_q}."""
        row = np.zeros(self.width, dtype=np.int64)
        for q, count in occupation.items():
            row[self.mode(q)] = count
        if row.min() < 0 or row.sum() > self.photon_cap:
            raise DomainError(f"occupation {occupation} is not in the basis")
        return int(self.ranks(row)[0])

    def occupation(self, index):
        return {
            int(q): int(n) for q, n in zip(self.window.orders, self.occupations[index]) if n
        }

    def lowering(self, q, count=1):
        """Sources, targets and factors of b_q^count acting on every basis state."""
        i = self.mode(q)
        sources = np.nonzero(self.occupations[:, i] >= count)[0]
        lowered = self.occupations[sources].astype(np.int64)
        n = lowered[:, i].astype(float)
        lowered[:, i] -= count
        factors = np.ones(len(sources))
        for k in range(count):
            factors *= np.sqrt(n - k)
        return sources, self.ranks(lowered), factors


@dataclass
class MultimodeFockVector:
    """Pure state on a FockBasis."""

    basis: FockBasis
    amplitudes: np.ndarray
    leakage: float = 0.0
    boundary_population: float = 0.0

    def norm(self):
        return float(np.linalg.norm(self.amplitudes))

    def populations(self):
        return np.abs(self.amplitudes) ** 2


@dataclass
class FockMixture:
    """Convex mixture of pure states sharing one basis."""

    basis: FockBasis
    components: list
    leakage: float = 0.0
    boundary_population: float = 0.0
    input_total: float = field(default=0.0)

    @property
    def pure(self):
        return len(self.components) == 1 and self.components[0][0] == 1.0

    def populations(self):
        total = np.zeros(self.basis.size)
        for weight, vector in self.components:
            total += weight * np.abs(vector) ** 2
        return total

    def norm(self):
        return float(sum(w * np.vdot(v, v).real for w, v in self.components))


def as_mixture(state):
    if isinstance(state, FockMixture):
        return state
    mixture = FockMixture(
        basis=state.basis,
        components=[(1.0, state.amplitudes)],
        leakage=state.leakage,
        boundary_population=state.boundary_population,
    )
    mixture.input_total = mean_total_photons(mixture)
    return mixture


def mean_total_photons(state):
    return float(np.dot(state.populations(), state.basis.totals))


def _product_amplitudes(basis, factors):
    occupations = basis.occupations
    idle = [i for i in range(basis.width) if i not in factors]
    rows = np.nonzero(~np.any(occupations[:, idle] != 0, axis=1))[0] if idle else np.arange(basis.size)
    values = np.ones(len(rows), dtype=complex)
    for i, vector in factors.items():
        padded = np.zeros(basis.photon_cap + 1, dtype=complex)
        keep = min(len(vector), basis.photon_cap + 1)
        padded[:keep] = vector[:keep]
        values *= padded[occupations[rows, i]]
    amplitudes = np.zeros(basis.size, dtype=complex)
    amplitudes[rows] = values
    return amplitudes


def prepare_mixture(basis, inputs, caps=None, max_leakage=LEAKAGE_TOLERANCE):
    """Product input state, mixed inputs expanded over Fock levels.

    Args:
        basis (FockBasis): target basis.
        inputs (dict): {q: ModeState}; unlisted sidebands start in vacuum.
        caps (dict): optional per-input photon caps, default the basis cap.
        max_leakage (float): largest probability allowed to fall above the caps.

    Returns:
        FockMixture: renormalised, with the lost probability in ``leakage``.
    """
    caps = caps or {}
    per_mode = []
    for q, state in sorted(inputs.items()):
        cap = min(int(caps.get(q, basis.photon_cap)), basis.photon_cap)
        per_mode.append([(basis.mode(q), weight, vector) for weight, vector in state.components(cap)])
    components, kept = [], 0.0
    for choice in itertools.product(*per_mode):
        weight = float(np.prod([w for _, w, _ in choice]))
        amplitudes = _product_amplitudes(basis, {i: v for i, _, v in choice})
        mass = weight * float(np.vdot(amplitudes, amplitudes).real)
        if mass > 0.0:
            components.append((mass, amplitudes / np.linalg.norm(amplitudes)))
            kept += mass
    leakage = max(0.0, 1.0 - kept)
    if leakage > max_leakage:
        raise TruncationError(
            f"photon cap {basis.photon_cap} loses {leakage:.3g} of the input state; "
            "raise the cap",
            leakage=leakage,
        )
    components = [(mass / kept, vector) for mass, vector in components]
    mixture = FockMixture(basis=basis, components=components, leakage=leakage)
    mixture.input_total = mean_total_photons(mixture)
    logger.debug("prepared %d component(s), leakage %.3g", len(components), leakage)
    return mixture


def prepare_state(basis, inputs, caps=None, max_leakage=LEAKAGE_TOLERANCE):
    """Pure product input state as a MultimodeFockVector."""
    for q, state in inputs.items():
        if not state.pure:
            raise DomainError(f"input at q={q} is mixed; use prepare_mixture")
    mixture = prepare_mixture(basis, inputs, caps=caps, max_leakage=max_leakage)
    (_, amplitudes), = mixture.components
    return MultimodeFockVector(basis=basis, amplitudes=amplitudes, leakage=mixture.leakage)


@dataclass(frozen=True)
class HamiltonianMatrix:
    """H/hbar = -g sum_q (b_q b_{q+1}^dag + b_{q+1} b_q^dag), one sparse block per N."""

    basis: FockBasis
    coupling: float
    blocks: tuple

    def matrix(self):
        return sparse.block_diag(self.blocks, format="csr")


def build_hamiltonian(basis, coupling=1.0):
    """Hopping Hamiltonian between neighbouring sidebands with uniform coupling g."""
    blocks = []
    for total in range(basis.photon_cap + 1):
        span = basis.block(total)
        occupations = basis.occupations[span]
        size = len(occupations)
        rows, cols, values = [], [], []
        for i in range(basis.width - 1):
            sources = np.nonzero(occupations[:, i] > 0)[0]
            moved = occupations[sources].astype(np.int64)
            amplitude = np.sqrt(moved[:, i] * (moved[:, i + 1] + 1.0))
            moved[:, i] -= 1
            moved[:, i + 1] += 1
            targets = basis.ranks(moved) - span.start
            rows += [targets, sources]
            cols += [sources, targets]
            values += [-coupling * amplitude, -coupling * amplitude]
        if rows:
            block = sparse.coo_matrix(
                (np.concatenate(values), (np.concatenate(rows), np.concatenate(cols))),
                shape=(size, size),
            ).tocsr()
        else:
            block = sparse.csr_matrix((size, size))
        blocks.append(block.astype(complex))
    return HamiltonianMatrix(basis=basis, coupling=float(coupling), blocks=tuple(blocks))


def krylov_expm_multiply(matrix, vector, time, tolerance=1e-12, dimension=20):
    """exp(-i time H) v for Hermitian sparse H by Arnoldi projection.

    The interval is split into substeps whose a-posteriori error estimate
    stays below ``tolerance`` per unit time.
    """
    result = np.asarray(vector, dtype=complex).copy()
    n = len(result)
    dimension = min(dimension, n)
    remaining, step, substeps = float(time), float(time), 0
    while remaining > 0.0:
        beta = np.linalg.norm(result)
        if beta == 0.0:
            break
        basis = np.zeros((n, dimension + 1), dtype=complex)
        hessenberg = np.zeros((dimension + 1, dimension), dtype=complex)
        basis[:, 0] = result / beta
        size, exhausted = dimension, False
        for j in range(dimension):
            w = matrix @ basis[:, j]
            for i in range(j + 1):
                hessenberg[i, j] = np.vdot(basis[:, i], w)
                w -= hessenberg[i, j] * basis[:, i]
            h = np.linalg.norm(w)
            hessenberg[j + 1, j] = h
            if h <= 1e-13 * beta:
                size, exhausted = j + 1, True
                break
            basis[:, j + 1] = w / h
        step = min(step, remaining)
        while True:
            coefficients = expm(-1j * step * hessenberg[:size, :size])[:, 0]
            error = 0.0 if exhausted else beta * abs(hessenberg[size, size - 1] * coefficients[-1])
            if error <= tolerance * step / time or step < 1e-12 * time:
                break
            step *= 0.5
        result = beta * (basis[:, :size] @ coefficients)
        remaining -= step
        substeps += 1
    logger.debug("Krylov propagation of %d states in %d substeps", n, substeps)
    return result


def _propagate(hamiltonian, amplitudes, time, cache):
    basis = hamiltonian.basis
    evolved = np.zeros_like(amplitudes)
    for total in range(basis.photon_cap + 1):
        span = basis.block(total)
        segment = amplitudes[span]
        if not np.any(segment):
            continue
        block = hamiltonian.blocks[total]
        if span.stop - span.start <= DENSE_BLOCK_LIMIT:
            if total not in cache:
                cache[total] = expm(-1j * time * block.toarray())
            evolved[span] = cache[total] @ segment
        else:
            evolved[span] = krylov_expm_multiply(block, segment, time)
    return evolved


def _edge_population(basis, populations):
    edges = basis.occupations[:, [0, basis.width - 1]].sum(axis=1)
    return float(np.dot(populations, edges))


def evolve(state, kappa_L, hamiltonian=None, boundary_tolerance=BOUNDARY_TOLERANCE):
    """Propagate for the effective length kappa_L, i.e. g t = kappa_L / 2.

    Raises:
        WindowTooSmallError: population arriving in the two edge modes of the
            window exceeds ``boundary_tolerance``.
    """
    kappa_L = check_kappa_L(kappa_L)
    mixture = as_mixture(state)
    basis = mixture.basis
    hamiltonian = hamiltonian or build_hamiltonian(basis)
    time = kappa_L / (2.0 * hamiltonian.coupling)
    before = _edge_population(basis, mixture.populations())
    cache = {}
    components = []
    for weight, vector in mixture.components:
        evolved = _propagate(hamiltonian, vector, time, cache) if time > 0 else vector.copy()
        drift = abs(np.linalg.norm(evolved) - np.linalg.norm(vector))
        if drift > NORM_TOLERANCE:
            logger.warning("norm drift %.3g during evolution at kappa_L=%g", drift, kappa_L)
        components.append((weight, evolved))
    evolved_mixture = FockMixture(
        basis=basis,
        components=components,
        leakage=mixture.leakage,
        input_total=mixture.input_total,
    )
    boundary = _edge_population(basis, evolved_mixture.populations())
    evolved_mixture.boundary_population = boundary
    if boundary - before > boundary_tolerance:
        raise WindowTooSmallError(
            f"edge modes of window {basis.window} hold {boundary:.3g} photons at "
            f"kappa_L={kappa_L}; widen the window",
            leakage=boundary,
        )
    if isinstance(state, MultimodeFockVector):
        return MultimodeFockVector(
            basis=basis,
            amplitudes=components[0][1],
            leakage=state.leakage,
            boundary_population=boundary,
        )
    return evolved_mixture
