"""Batch evaluation: kappa_L sweeps, figure panels and the oracle equivalence suite."""

import itertools
import logging
import math
from dataclasses import dataclass, field
from functools import partial
from multiprocessing import Pool

import numpy as np
import pandas as pd
from tqdm import tqdm

from ramancomb.data.figures import FIGURES
from ramancomb.data.states import Coherent, Fock, SqueezedVacuum, Thermal
from ramancomb.exceptions import ConfigError, DomainError
from ramancomb.model import analytic, mixing
from ramancomb.model.analytic import SingleModeScenario, single_mode_record, undefined_as_nan
from ramancomb.model.fock import LEAKAGE_TOLERANCE
from ramancomb.model.interference import two_photon_probabilities, two_photon_record
from ramancomb.model.mixing import TwoModeScenario, two_mode_record
from ramancomb.model.oracle import DEFAULT_TOLERANCE, DeviationRow, compare, oracle_window, run_oracle
from ramancomb.model.scattering import SidebandWindow, recommend_window
from ramancomb.utils.config import parse_config

logger = logging.getLogger(__name__)

ORACLE_REPORTED_MARGIN = 3
ORACLE_PAIR_REACH = 3


def resolve_window(config):
    """Sideband window of a scenario, covering every order it reports."""
    needed = (
        list(config.sidebands)
        + [q for q, _ in config.inputs]
        + [q for pair in config.pairs for q in pair]
    )
    if isinstance(config.window, tuple):
        window = SidebandWindow(*config.window)
        missing = [q for q in needed if q not in window]
        if missing:
            raise ConfigError(f"window {window} misses orders {sorted(set(missing))}", field="window")
        return window
    if config.window == "auto":
        window = recommend_window(config.max_kappa_L)
    else:
        window = SidebandWindow.symmetric(config.window)
    return window.union(SidebandWindow.covering(needed))


def _ratio(numerator, denominator):
    return numerator / denominator if denominator != 0.0 else math.nan


def _single_point(config, window, kappa_L):
    scn = SingleModeScenario(config.input_map[0], kappa_L, window)
    moments = scn.input_moments
    gamma_in = scn.input.factorial_moment(2) - moments.n_mean**2
    row = {}
    for name in config.sideband_observables():
        for q in config.sidebands:
            angle = config.phi + q * math.pi / 2
            if name == "marginal":
                for n, value in enumerate(analytic.marginal_pnd(scn, q, config.n_max)):
                    row[f"marginal[{q}][{n}]"] = value
                continue
            if name == "mean_photon":
                value = analytic.mean_photon(scn, q)
            elif name == "gamma2":
                value = analytic.autocorrelation(scn, q, 2)
            elif name == "g2":
                value = undefined_as_nan(analytic.normalized_autocorrelation_out, scn, q, 2)
            elif name == "squeezing":
                value = analytic.squeezing_factor_out(scn, q, angle)
            elif name == "normalized_squeezing":
                value = undefined_as_nan(analytic.normalized_squeezing_out, scn, q, angle)
            elif name == "best_squeezing":
                value = analytic.best_squeezing(scn, q)[1]
            elif name == "mean_ratio":
                value = _ratio(analytic.mean_photon(scn, q), moments.n_mean)
            else:
                value = _ratio(analytic.autocorrelation(scn, q, 2), gamma_in)
            row[f"{name}[{q}]"] = value
    for name in config.pair_observables():
        for k, l in config.pairs:
            if name == "gamma_kl":
                value = analytic.cross_gamma(scn, k, l)
            elif name == "g_kl":
                value = undefined_as_nan(lambda: analytic.cross_correlation(scn, k, l)[1])
            elif name == "gamma_kl_ratio":
                value = _ratio(analytic.cross_gamma(scn, k, l), gamma_in)
            else:
                value = analytic.single_photon_concurrence(k, l, kappa_L)
            row[f"{name}[{k},{l}]"] = value
    total = float(np.sum(scn.bessel.squares())) * moments.n_mean
    return row, total, moments.n_mean


_TWO_MODE = {
    "mean_photon": lambda scn, q, phi: mixing.two_mode_mean(scn, q),
    "gamma2": lambda scn, q, phi: mixing.two_mode_gamma2(scn, q),
    "g2": lambda scn, q, phi: undefined_as_nan(mixing.two_mode_g2, scn, q),
    "squeezing": lambda scn, q, phi: mixing.two_mode_squeezing(scn, q, phi),
    "normalized_squeezing": lambda scn, q, phi: undefined_as_nan(
        mixing.two_mode_normalized_squeezing, scn, q, phi
    ),
    "best_squeezing": lambda scn, q, phi: mixing.two_mode_best_squeezing(scn, q)[1],
}


def _two_mode_point(config, window, kappa_L):
    inputs = config.input_map
    nu = config.nu
    scn = TwoModeScenario(inputs[0], inputs[nu], nu, kappa_L, window)
    row = {}
    for name in config.sideband_observables():
        for q in config.sidebands:
            row[f"{name}[{q}]"] = _TWO_MODE[name](scn, q, config.phi + q * math.pi / 2)
    total = float(sum(mixing.two_mode_mean(scn, q) for q in scn.window))
    return row, total, scn.input_total


def _two_photon_point(config, window, kappa_L):
    probabilities = two_photon_probabilities(kappa_L, window)
    lookup = {"mean_photon": probabilities["mean"], "W2": probabilities["W2"], "W1": probabilities["W1"]}
    row = {}
    for name in config.sideband_observables():
        for q in config.sidebands:
            row[f"{name}[{q}]"] = lookup[name][q]
    for k, l in config.pairs:
        row[f"W11[{k},{l}]"] = probabilities["W11"][tuple(sorted((k, l)))]
    return row, float(sum(probabilities["mean"].values())), 2.0


_POINT = {"single": _single_point, "two": _two_mode_point, "two_photon": _two_photon_point}


def evaluate_point(config, window, kappa_L):
    """One output row: kappa_L, the requested observables, then the photon bookkeeping."""
    values, total, input_total = _POINT[config.mode](config, window, float(kappa_L))
    row = {"kappa_L": float(kappa_L)}
    row.update({key: float(value) for key, value in values.items()})
    row["total_mean"] = total
    row["conservation_defect"] = abs(total - input_total)
    return row


def run_config(config, jobs=1, progress=False):
    """Evaluate every sweep point; rows keep the sweep order whatever ``jobs`` is."""
    window = resolve_window(config)
    values = config.kappa_values()
    logger.debug("sweep of %d points on window %s", len(values), window)
    worker = partial(evaluate_point, config, window)
    bar = dict(total=len(values), disable=not progress, desc=config.mode, leave=False)
    if jobs > 1 and len(values) > 1:
        with Pool(jobs) as pool:
            rows = list(tqdm(pool.imap(worker, values, chunksize=max(1, len(values) // (4 * jobs))), **bar))
    else:
        rows = [worker(value) for value in tqdm(values, **bar)]
    return pd.DataFrame(rows, columns=list(rows[0]))


def order_profile(spec, panel):
    """Long-format table of an orders panel: one row per (order, observable)."""
    data = dict(spec.kappa, kappa_L=panel.kappa_L, observables=list(panel.observables))
    if panel.fixed is None:
        data["sidebands"] = list(panel.orders)
    else:
        data["pairs"] = [[panel.fixed, l] for l in panel.orders]
    config = parse_config(data)
    row = evaluate_point(config, resolve_window(config), panel.kappa_L)
    records = []
    for name in panel.observables:
        for order in panel.orders:
            key = f"{name}[{order}]" if panel.fixed is None else f"{name}[{panel.fixed},{order}]"
            records.append({"kappa_L": panel.kappa_L, "order": order, "observable": name, "value": row[key]})
    return pd.DataFrame(records, columns=["kappa_L", "order", "observable", "value"])


def figure_tables(name, jobs=1, progress=False):
    """{panel: DataFrame} for one figure."""
    if name not in FIGURES:
        raise ConfigError(f"unknown figure {name!r}; expected one of {sorted(FIGURES)}", field="figure")
    spec = FIGURES[name]
    tables = {"kappa": run_config(parse_config(spec.kappa), jobs=jobs, progress=progress)}
    if spec.orders is not None:
        tables["orders"] = order_profile(spec, spec.orders)
    return tables


@dataclass(frozen=True)
class OracleCase:
    """One analytic-versus-oracle scenario."""

    label: str
    mode: str
    inputs: dict
    kappa_L: float
    caps: dict = None
    max_leakage: float = LEAKAGE_TOLERANCE
    boltzmann: bool = False
    tolerances: dict = field(default_factory=dict)


def default_oracle_suite():
    cases = []
    for kappa_L in (0.5, 1.44, 2.0, 5.0):
        for n in (1, 2, 3):
            cases.append(OracleCase(f"fock{n} kL={kappa_L:g}", "single", {0: Fock(n)}, kappa_L))
        cases.append(OracleCase(f"coherent0.5 kL={kappa_L:g}", "single", {0: Coherent(0.5)}, kappa_L))
        cases.append(
            OracleCase(f"photon pair kL={kappa_L:g}", "two_photon", {0: Fock(1), 1: Fock(1)}, kappa_L)
        )
    cases.append(
        OracleCase(
            "coherent0.5+squeezed0.3 kL=1.44",
            "two",
            {0: Coherent(0.5), 1: SqueezedVacuum(0.3)},
            1.44,
            caps={0: 3, 1: 2},
            max_leakage=1e-2,
        )
    )
    cases.append(
        OracleCase("thermal1 kL=0.5", "single", {0: Thermal(1.0)}, 0.5, caps={0: 5}, max_leakage=0.05, boltzmann=True)
    )
    return cases


def cases_from_config(config):
    return [
        OracleCase(f"{config.mode} kL={kappa_L:g}", config.mode, config.input_map, float(kappa_L))
        for kappa_L in config.kappa_values()
    ]


def _boltzmann_row(case, run, orders):
    """Oracle marginals of a thermal probe against thermal light of mean N J_q^2."""
    scn = SingleModeScenario(case.inputs[0], case.kappa_L, run.state.basis.window)
    cap = run.state.basis.photon_cap
    worst, worst_key = 0.0, ""
    for q in orders:
        expected = Thermal(case.inputs[0].mean * scn.j(q) ** 2).distribution(cap)
        deviation = float(np.max(np.abs(run.record.distributions[q] - expected)))
        if deviation >= worst:
            worst, worst_key = deviation, f"marginal[{q}]"
    return DeviationRow("boltzmann", len(orders), worst, worst_key, 2.0 * run.leakage)


def run_oracle_case(case, radius=None, tolerance=DEFAULT_TOLERANCE):
    """Run both engines on ``case`` and compare; the analytic side sees the truncated inputs."""
    if radius is None:
        window = oracle_window(case.kappa_L, list(case.inputs))
    else:
        if radius < 1:
            raise DomainError("oracle window radius must be at least 1")
        window = SidebandWindow.covering(list(case.inputs), radius)
    reach = math.ceil(case.kappa_L) + ORACLE_REPORTED_MARGIN
    orders = [q for q in window if abs(q) <= reach]
    near = [q for q in orders if abs(q) <= ORACLE_PAIR_REACH]
    pairs = list(itertools.combinations(near, 2))
    run = run_oracle(
        case.inputs,
        case.kappa_L,
        window=window,
        caps=case.caps,
        orders=orders,
        pairs=pairs,
        max_leakage=case.max_leakage,
    )
    truncated = run.truncated_inputs(case.inputs)
    if case.mode == "single":
        scn = SingleModeScenario(truncated[0], case.kappa_L, window)
        reference = single_mode_record(scn, orders=orders, pairs=pairs, n_max=sum(run.caps.values()))
    elif case.mode == "two":
        nu = next(q for q in case.inputs if q != 0)
        scn = TwoModeScenario(truncated[0], truncated[nu], nu, case.kappa_L, window)
        reference = two_mode_record(scn, orders=orders)
    else:
        reference = two_photon_record(case.kappa_L, window, orders=orders, pairs=pairs)
    report = compare(reference, run.record, case.tolerances, default_tolerance=tolerance, label=case.label)
    if case.boltzmann:
        report.rows.append(_boltzmann_row(case, run, orders))
    return report


def oracle_check(cases=None, radius=None, tolerance=DEFAULT_TOLERANCE, progress=False):
    """DeviationReports of every case (default: the desk-scale equivalence suite)."""
    cases = default_oracle_suite() if cases is None else cases
    reports = []
    for case in tqdm(cases, disable=not progress, desc="oracle", leave=False):
        reports.append(run_oracle_case(case, radius=radius, tolerance=tolerance))
    return reports


def reports_frame(reports):
    frames = [report.to_frame() for report in reports]
    return pd.concat(frames, ignore_index=True) if frames else pd.DataFrame()
