"""Parameter sets behind each published figure.

Every figure has a ``kappa`` panel (observables against kappa_L for a few
sidebands) and most have an ``orders`` panel (observables against the
sideband order at fixed kappa_L).
"""

from dataclasses import dataclass

FOCK5 = {"kind": "fock", "n": 5}
THERMAL1 = {"kind": "thermal", "mean": 1.0}
SQUEEZED1 = {"kind": "squeezed_vacuum", "r": 1.0, "theta": 0.0}
COHERENT20 = {"kind": "coherent", "alpha": [20.0, 0.0]}
PHOTON = {"kind": "fock", "n": 1}


@dataclass(frozen=True)
class OrdersPanel:
    kappa_L: float
    orders: tuple
    observables: tuple
    fixed: int = None


@dataclass(frozen=True)
class FigureSpec:
    name: str
    caption: str
    kappa: dict
    orders: OrdersPanel = None


FIGURES = {
    "fig2": FigureSpec(
        name="fig2",
        caption="mean photon number and Gamma^(2) scaled to the probe's initial values",
        kappa={
            "mode": "single",
            "inputs": [{"q": 0, "state": FOCK5}],
            "kappa_L": {"start": 0.0, "stop": 10.0, "steps": 501},
            "observables": ["mean_ratio", "gamma2_ratio"],
            "sidebands": [0, 1, 5],
        },
        orders=OrdersPanel(5.0, tuple(range(0, 16)), ("mean_ratio", "gamma2_ratio")),
    ),
    "fig3": FigureSpec(
        name="fig3",
        caption="cross-correlation Gamma_kl^(2) with k=1, scaled to the input Gamma^(2)",
        kappa={
            "mode": "single",
            "inputs": [{"q": 0, "state": FOCK5}],
            "kappa_L": {"start": 0.0, "stop": 10.0, "steps": 501},
            "observables": ["gamma_kl_ratio"],
            "pairs": [[1, 0], [1, 2], [1, 5]],
        },
        orders=OrdersPanel(5.0, tuple(range(0, 16)), ("gamma_kl_ratio",), fixed=1),
    ),
    "fig4": FigureSpec(
        name="fig4",
        caption="g^(2) for Fock(5) in sideband 0 and thermal light (mean 1) in sideband 1",
        kappa={
            "mode": "two",
            "inputs": [{"q": 0, "state": FOCK5}, {"q": 1, "state": THERMAL1}],
            "kappa_L": {"start": 0.0, "stop": 10.0, "steps": 501},
            "observables": ["g2"],
            "sidebands": [-1, 2],
        },
        orders=OrdersPanel(5.0, tuple(range(-15, 16)), ("g2",)),
    ),
    "fig5": FigureSpec(
        name="fig5",
        caption="normalised squeezing s_q(q pi/2), squeezed vacuum r=1 at 0 and thermal light at 1",
        kappa={
            "mode": "two",
            "inputs": [{"q": 0, "state": SQUEEZED1}, {"q": 1, "state": THERMAL1}],
            "kappa_L": {"start": 0.0, "stop": 10.0, "steps": 501},
            "observables": ["normalized_squeezing"],
            "sidebands": [-1, 2],
        },
        orders=OrdersPanel(5.0, tuple(range(-15, 16)), ("normalized_squeezing",)),
    ),
    "fig6": FigureSpec(
        name="fig6",
        caption="squeezing S_q(q pi/2) and mean photon number, squeezed vacuum at 0, alpha=20 at 1",
        kappa={
            "mode": "two",
            "inputs": [{"q": 0, "state": SQUEEZED1}, {"q": 1, "state": COHERENT20}],
            "kappa_L": {"start": 0.0, "stop": 6.0, "steps": 301},
            "observables": ["squeezing", "mean_photon"],
            "sidebands": [0, 1, 3],
        },
    ),
    "fig7": FigureSpec(
        name="fig7",
        caption="coincidence probability W_01 for one photon in each of sidebands 0 and 1",
        kappa={
            "mode": "two_photon",
            "inputs": [{"q": 0, "state": PHOTON}, {"q": 1, "state": PHOTON}],
            "kappa_L": {"start": 0.0, "stop": 6.0, "steps": 601},
            "observables": ["W11"],
            "pairs": [[0, 1]],
            "sidebands": [],
        },
    ),
}


def figure_names():
    return sorted(FIGURES)
