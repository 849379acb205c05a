"""Coherence orders of multiqubit states: decomposition, dephasing and metrology."""

__version__ = "0.1.0"

from .closed_forms import ClosedForm, closed_form
from .coherence import OrderDecomposition, c_l1, c_trace, decompose, mqi, mqi_spectrum, project_mode
from .dephasing import NoiseModel, OUKernel, apply_channel, beta, evolve, monte_carlo_dephase
from .errors import CoherenceError
from .metrology import MetrologyReport, PhaseEncoding, qfi, squared_speed, witness
from .operator_basis import count_order_elements, element_order, expand, reconstruct
from .states import StateFamilySpec, make_state

__all__ = [
    "ClosedForm",
    "CoherenceError",
    "MetrologyReport",
    "NoiseModel",
    "OUKernel",
    "OrderDecomposition",
    "PhaseEncoding",
    "StateFamilySpec",
    "apply_channel",
    "beta",
    "c_l1",
    "c_trace",
    "closed_form",
    "count_order_elements",
    "decompose",
    "element_order",
    "evolve",
    "expand",
    "make_state",
    "monte_carlo_dephase",
    "mqi",
    "mqi_spectrum",
    "project_mode",
    "qfi",
    "reconstruct",
    "squared_speed",
    "witness",
]
