"""Brute-force ground truth for the analytic engines.

The input state is built on a truncated Fock basis, evolved exactly under the
hopping Hamiltonian and measured; ``compare`` then lines the result up against
an analytic StatisticsRecord observable by observable.
"""

import logging
import math
from dataclasses import dataclass, field

import numpy as np
import pandas as pd

from ramancomb.data.states import Fock, Truncated, Vacuum, optimal_quadrature, quadrature_squeezing
from ramancomb.exceptions import CapacityError, DomainError
from ramancomb.model.analytic import StatisticsRecord
from ramancomb.model.fock import (
    BOUNDARY_TOLERANCE,
    DEFAULT_BASIS_LIMIT,
    LEAKAGE_TOLERANCE,
    FockBasis,
    _product_amplitudes,
    as_mixture,
    basis_size,
    build_hamiltonian,
    evolve,
    prepare_mixture,
)
from ramancomb.model.scattering import SidebandWindow, check_kappa_L, propagate_coherent, scattering_matrix

logger = logging.getLogger(__name__)

ORACLE_RADIUS_MARGIN = 12
# normalised correlations are not resolved below this mean photon number
RESOLVED_MEAN = 1e-6
CAP_LEAKAGE_TARGET = 1e-10
AUTO_CAP_CEILING = 24
AUTO_BASIS_BUDGET = 1_000_000
DEFAULT_TOLERANCE = 1e-8
SPIN_FLIP = np.kron([[0, -1j], [1j, 0]], [[0, -1j], [1j, 0]])
# scalars that describe the run rather than the scattered light
BOOKKEEPING = {"total_mean", "conservation_defect", "total_probability", "norm", "boundary_population"}


def oracle_window(kappa_L, orders=(0,)):
    radius = math.ceil(check_kappa_L(kappa_L)) + ORACLE_RADIUS_MARGIN
    return SidebandWindow.covering(orders, radius)


def build_basis(window, photon_cap, limit=DEFAULT_BASIS_LIMIT):
    return FockBasis(window, photon_cap, limit=limit)


def choose_photon_cap(state, target=CAP_LEAKAGE_TARGET, ceiling=AUTO_CAP_CEILING):
    """Smallest cap whose truncation loses at most ``target`` of the state."""
    if isinstance(state, Fock):
        return state.n
    if isinstance(state, Vacuum):
        return 0
    if isinstance(state, Truncated):
        return state.cap
    cumulative = np.cumsum(state.distribution(ceiling))
    hits = np.nonzero(cumulative >= 1.0 - target)[0]
    return int(hits[0]) if hits.size else ceiling


def _fit_caps(inputs, window, caps, budget, fixed=()):
    """Lower automatic caps, largest first, until the basis fits ``budget``."""
    requested = dict(caps)
    caps = dict(caps)
    while basis_size(window.width, sum(caps.values())) > budget:
        shrinkable = [
            q
            for q, state in inputs.items()
            if q not in fixed and not isinstance(state, Fock) and caps[q] > 0
        ]
        if not shrinkable:
            raise CapacityError(
                f"inputs need a cap of {sum(caps.values())} photons on window {window}, "
                f"more than {budget} basis states"
            )
        largest = max(shrinkable, key=lambda q: caps[q])
        caps[largest] -= 1
    for q, cap in caps.items():
        if cap < requested[q]:
            logger.debug("cap of sideband %d lowered from %d to %d to fit %d basis states", q, requested[q], cap, budget)
    return caps


def _lowered_expectation(basis, vector, q, count):
    sources, targets, factors = basis.lowering(q, count)
    return complex(np.sum(vector[targets].conj() * factors * vector[sources]))


def reduced_pair_density(vector, basis, k, l):
    """Reduced density matrix of sidebands k and l on {|00>, |01>, |10>, |11>}."""
    i, j = basis.mode(k), basis.mode(l)
    occupations = basis.occupations
    rows = np.nonzero((occupations[:, i] <= 1) & (occupations[:, j] <= 1) & (vector != 0))[0]
    rest = occupations[rows].astype(np.int64)
    local = 2 * rest[:, i] + rest[:, j]
    rest[:, [i, j]] = 0
    keys = basis.ranks(rest)
    rho = np.zeros((4, 4), dtype=complex)
    for key in np.unique(keys):
        chosen = keys == key
        environment = np.zeros(4, dtype=complex)
        environment[local[chosen]] = vector[rows[chosen]]
        rho += np.outer(environment, environment.conj())
    return rho


def concurrence(rho):
    """Two-qubit concurrence by the spin-flip construction.

    The lambdas are the singular values of sqrt(rho) sqrt(rho~); eigenvalues of
    rho below 1e-14 count as zero.
    """
    values, vectors = np.linalg.eigh(rho)
    values = np.where(values > 1e-14, values, 0.0)
    root = (vectors * np.sqrt(values)) @ vectors.conj().T
    flipped = SPIN_FLIP @ root.conj() @ SPIN_FLIP
    lambdas = np.sort(np.linalg.svd(root @ flipped, compute_uv=False))[::-1]
    return max(0.0, float(lambdas[0] - lambdas[1:].sum()))


def measure(state, orders=None, pairs=(), phi=0.0, kappa_L=math.nan):
    """StatisticsRecord of a Fock-space state.

    Quadrature observables need coherence between photon-number blocks and are
    only reported for pure states; concurrence only when no more than one
    photon is present.
    """
    mixture = as_mixture(state)
    basis = mixture.basis
    orders = list(basis.window) if orders is None else list(orders)
    populations = mixture.populations()
    occupations = basis.occupations
    record = StatisticsRecord(kappa_L=kappa_L, input_total=mixture.input_total)
    means = {}
    for q in basis.window:
        means[q] = float(np.dot(populations, occupations[:, basis.mode(q)]))
    vector = mixture.components[0][1] if mixture.pure else None
    for q in orders:
        n = occupations[:, basis.mode(q)].astype(float)
        second = float(np.dot(populations, n * (n - 1.0)))
        mean = means[q]
        record.put(q, "mean_photon", mean)
        record.put(q, "gamma2", second - mean * mean)
        if mean > RESOLVED_MEAN:
            record.put(q, "g2", second / mean**2)
        else:
            record.put(q, "g2", math.nan)
            record.unresolved.add(f"g2[{q}]")
        if vector is not None:
            m_b = _lowered_expectation(basis, vector, q, 1)
            m_b2 = _lowered_expectation(basis, vector, q, 2) if basis.photon_cap >= 2 else 0j
            record.put(q, "b_re", m_b.real)
            record.put(q, "b_im", m_b.imag)
            record.put(q, "b2_re", m_b2.real)
            record.put(q, "b2_im", m_b2.imag)
            record.put(q, "squeezing", quadrature_squeezing(mean, m_b, m_b2, phi + q * math.pi / 2))
            record.put(q, "best_squeezing", optimal_quadrature(mean, m_b, m_b2)[1])
        marginal = np.bincount(
            occupations[:, basis.mode(q)], weights=populations, minlength=basis.photon_cap + 1
        )
        record.distributions[q] = marginal
        record.put(q, "W1", marginal[1] if basis.photon_cap >= 1 else 0.0)
        if basis.photon_cap >= 2:
            record.put(q, "W2", populations[basis.index({q: 2})])
    single_photon = vector is not None and not np.any(populations[basis.totals > 1] > 0)
    for k, l in pairs:
        nk = occupations[:, basis.mode(k)].astype(float)
        nl = occupations[:, basis.mode(l)].astype(float)
        joint = float(np.dot(populations, nk * (nl - (k == l))))
        record.put_pair(k, l, "gamma_kl", joint - means[k] * means[l])
        populated = means[k] > RESOLVED_MEAN and means[l] > RESOLVED_MEAN
        if populated:
            record.put_pair(k, l, "g_kl", joint / (means[k] * means[l]))
        else:
            record.put_pair(k, l, "g_kl", math.nan)
            record.unresolved.add(f"g_kl[{k},{l}]")
        if k != l and basis.photon_cap >= 2:
            record.put_pair(k, l, "W11", populations[basis.index({k: 1, l: 1})])
        if single_photon and k != l:
            rho = reduced_pair_density(vector, basis, k, l)
            record.put_pair(k, l, "concurrence", concurrence(rho))
    total = float(sum(means.values()))
    record.scalars["total_mean"] = total
    record.scalars["conservation_defect"] = abs(total - mixture.input_total)
    record.scalars["norm"] = mixture.norm()
    record.scalars["boundary_population"] = mixture.boundary_population
    return record


def coherent_fidelity(state, alphas, kappa_L):
    """|<product coherent state|psi>|^2 against the scattered coherent amplitudes."""
    mixture = as_mixture(state)
    if not mixture.pure:
        raise DomainError("coherent fidelity needs a pure state")
    basis = mixture.basis
    matrix = scattering_matrix(kappa_L, basis.window)
    output = propagate_coherent(alphas, matrix)
    factors = {}
    for q, alpha in output.items():
        values = np.zeros(basis.photon_cap + 1, dtype=complex)
        values[0] = math.exp(-0.5 * abs(alpha) ** 2)
        for n in range(1, basis.photon_cap + 1):
            values[n] = values[n - 1] * alpha / math.sqrt(n)
        factors[basis.mode(q)] = values
    reference = _product_amplitudes(basis, factors)
    return float(abs(np.vdot(reference, mixture.components[0][1])) ** 2)


@dataclass
class OracleRun:
    """Measured record of one oracle evolution and the truncation it used."""

    record: StatisticsRecord
    caps: dict
    basis_size: int
    leakage: float
    boundary_population: float
    state: object = field(repr=False, default=None)

    def truncated_inputs(self, inputs):
        """The inputs as the basis actually held them, for the analytic side."""
        return {q: Truncated(state, self.caps[q]) for q, state in inputs.items()}


def run_oracle(
    inputs,
    kappa_L,
    window=None,
    caps=None,
    orders=None,
    pairs=(),
    phi=0.0,
    max_leakage=LEAKAGE_TOLERANCE,
    boundary_tolerance=BOUNDARY_TOLERANCE,
    basis_budget=AUTO_BASIS_BUDGET,
):
    """Prepare, evolve and measure ``inputs`` ({q: ModeState}) at ``kappa_L``."""
    kappa_L = check_kappa_L(kappa_L)
    if not inputs:
        raise DomainError("the oracle needs at least one input sideband")
    window = window or oracle_window(kappa_L, list(inputs))
    caps = dict(caps or {})
    chosen = {q: caps.get(q, choose_photon_cap(state)) for q, state in inputs.items()}
    fitted = _fit_caps(inputs, window, chosen, basis_budget, fixed=set(caps))
    basis = build_basis(window, sum(fitted.values()))
    logger.info(
        "oracle at kappa_L=%g: window %s, caps %s, %d states", kappa_L, window, fitted, basis.size
    )
    prepared = prepare_mixture(basis, inputs, caps=fitted, max_leakage=max_leakage)
    evolved = evolve(prepared, kappa_L, build_hamiltonian(basis), boundary_tolerance=boundary_tolerance)
    record = measure(evolved, orders=orders, pairs=pairs, phi=phi, kappa_L=kappa_L)
    return OracleRun(
        record=record,
        caps=fitted,
        basis_size=basis.size,
        leakage=prepared.leakage,
        boundary_population=evolved.boundary_population,
        state=evolved,
    )


def _family(key):
    return key.split("[", 1)[0]


@dataclass
class DeviationRow:
    observable: str
    compared: int
    max_deviation: float
    worst: str
    tolerance: float

    @property
    def passed(self):
        return self.max_deviation <= self.tolerance


@dataclass
class DeviationReport:
    """Per-observable agreement between two records."""

    label: str
    rows: list

    @property
    def passed(self):
        return all(row.passed for row in self.rows)

    def failures(self):
        return [row for row in self.rows if not row.passed]

    def to_frame(self):
        frame = pd.DataFrame(
            [
                {
                    "scenario": self.label,
                    "observable": row.observable,
                    "compared": row.compared,
                    "max_deviation": row.max_deviation,
                    "tolerance": row.tolerance,
                    "worst": row.worst,
                    "passed": row.passed,
                }
                for row in self.rows
            ],
            columns=["scenario", "observable", "compared", "max_deviation", "tolerance", "worst", "passed"],
        )
        return frame

    def to_dict(self):
        return {
            "scenario": self.label,
            "passed": self.passed,
            "rows": self.to_frame().drop(columns="scenario").to_dict(orient="records"),
        }


def compare(analytic, oracle, tolerances=None, default_tolerance=DEFAULT_TOLERANCE, label=""):
    """Max absolute deviation per observable family over the keys both records share.

    Keys undefined on both sides, or unresolved on either, are skipped. Any
    other key that is NaN on one side only lands in an ``undefined`` row that
    fails. A ``conservation`` row checks both records' photon-number
    bookkeeping.
    """
    tolerances = tolerances or {}
    left, right = analytic.observables(), oracle.observables()
    unresolved = analytic.unresolved | oracle.unresolved
    families = {}
    one_sided = []
    for key in sorted(set(left) & set(right)):
        if key in BOOKKEEPING:
            continue
        a, b = left[key], right[key]
        if math.isnan(a) and math.isnan(b):
            continue
        if math.isnan(a) or math.isnan(b):
            if key not in unresolved:
                one_sided.append(key)
            continue
        deviation = abs(a - b)
        entry = families.setdefault(_family(key), [0, 0.0, key])
        entry[0] += 1
        if deviation >= entry[1]:
            entry[1], entry[2] = deviation, key
    rows = [
        DeviationRow(name, count, worst_value, worst_key, tolerances.get(name, default_tolerance))
        for name, (count, worst_value, worst_key) in sorted(families.items())
    ]
    if one_sided:
        rows.append(DeviationRow("undefined", len(one_sided), float(len(one_sided)), one_sided[0], 0.0))
    defects = [
        record.scalars["conservation_defect"]
        for record in (analytic, oracle)
        if "conservation_defect" in record.scalars
    ]
    if defects:
        rows.append(
            DeviationRow(
                "conservation",
                len(defects),
                max(defects),
                "conservation_defect",
                tolerances.get("conservation", default_tolerance),
            )
        )
    report = DeviationReport(label=label, rows=rows)
    for row in report.failures():
        logger.warning("%s: %s deviates by %.3g at %s", label, row.observable, row.max_deviation, row.worst)
    return report
