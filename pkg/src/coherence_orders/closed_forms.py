"""Analytic metrology values for the five three-qubit example families.

Each function returns the QFI, squared speed, highest-order speed term,
F_I and F_I at the highest order, all for the collective-Z encoding with
phase ``tau``. These are independent of the numerical routines in
:mod:`coherence_orders.metrology` and serve as fixtures for it.

Two expressions here differ from forms in circulation and were settled by
direct numerical evaluation:

* example 3, QFI: closed forms exist for the four angles
  phi in {0, pi/6, pi/4, pi/3}; other angles give ``nan``. A general-angle
  expression that does not match direct evaluation is kept as
  :func:`example3_printed_qfi` so the disagreement stays testable.
* example 3, B_{tau,3}: carries a factor p^2.
* example 4, S_tau: the bracket is 1 - 2p + 4p^2 + 2p^2 (cos 2tau + 2 cos tau).
"""

from __future__ import annotations

import math
from typing import NamedTuple

from .errors import ParamOutOfRange, UnknownExample

CLASSICAL_QFI = 0.75  # QFI of |+++>


class ClosedForm(NamedTuple):
    f_q: float
    s_tau: float
    b: float
    f_i: float
    f_i_mmax: float
    m: int  # order the b / f_i_mmax values refer to


# phi -> coefficient c with F_Q = c p^2 / (1 + 3p)
EXAMPLE3_PANELS = {
    0.0: 9.0,
    math.pi / 6: 111 / 16,
    math.pi / 4: 19 / 4,
    math.pi / 3: 39 / 16,
}


def example3_printed_qfi(p: float, phi: float) -> float:
    """p^2 (9 + cos^2 phi) cos^2 phi / (2 (1 + 3p)); not the QFI of example 3."""
    c2 = math.cos(phi) ** 2
    return p * p * (9 + c2) * c2 / (2 * (1 + 3 * p))


def _panel(phi: float):
    for key, coef in EXAMPLE3_PANELS.items():
        if abs(phi - key) < 1e-12:
            return coef
    return None


def _check(value, name, lo, hi):
    if value is None:
        raise ParamOutOfRange(f"parameter {name} is required")
    if not lo - 1e-15 <= value <= hi + 1e-15:
        raise ParamOutOfRange(f"{name}={value} outside [{lo}, {hi}]")
    return value


def _example1(tau, p, phi):
    phi = _check(phi, "phi", 0, math.pi)
    s2 = math.sin(phi) ** 2
    f_q = (19 + math.cos(2 * phi)) * s2 / 8
    s = (
        (9 + 3 * math.cos(2 * phi) + 8 * math.cos(tau) + 4 * s2 * math.cos(2 * tau))
        * s2
        * math.sin(tau / 2) ** 2
        / (2 * tau**2)
    )
    b = s2 * s2 * math.sin(1.5 * tau) ** 2 / tau**2
    return ClosedForm(f_q, s, b, f_q, 2.25 * s2 * s2, 3)


def _example2(tau, p, phi):
    phi = _check(phi, "phi", 0, math.pi)
    s = math.sin(2 * phi) ** 2
    b = s * math.sin(tau) ** 2 / tau**2
    return ClosedForm(s, b, b, s, s, 2)


def _example3(tau, p, phi):
    p = _check(p, "p", 0, 1)
    phi = _check(phi, "phi", 0, math.pi / 2)
    c2 = math.cos(phi) ** 2
    coef = _panel(phi)
    f_q = coef * p * p / (1 + 3 * p) if coef is not None else math.nan
    s = (
        p * p
        * (9 - 3 * math.cos(2 * phi) + 8 * math.cos(tau) + 4 * c2 * math.cos(2 * tau))
        * c2
        * math.sin(tau / 2) ** 2
        / (2 * tau**2)
    )
    b = p * p * c2 * c2 * math.sin(1.5 * tau) ** 2 / tau**2
    f_i = (19 - math.cos(2 * phi)) * p * p * c2 / 8
    return ClosedForm(f_q, s, b, f_i, 2.25 * p * p * c2 * c2, 3)


def _example4(tau, p, phi):
    p = _check(p, "p", 0, 1)
    f_q = (3 + 8 * p * (1 + 2 * p)) / 12
    s = (1 - 2 * p + 4 * p * p + 2 * p * p * (math.cos(2 * tau) + 2 * math.cos(tau))) * math.sin(tau / 2) ** 2 / tau**2
    b = p * p * math.sin(1.5 * tau) ** 2 / tau**2
    return ClosedForm(f_q, s, b, (1 + 2 * p * (5 * p - 1)) / 4, 2.25 * p * p, 3)


def _example5(tau, p, phi):
    p = _check(p, "p", 0, 1)
    f_q = 0.75 * (1 + 2 * p)
    s = (
        (3 * (5 - 6 * p + 9 * p * p) + 8 * (1 + 3 * p * p) * math.cos(tau) + (1 + 3 * p) ** 2 * math.cos(2 * tau))
        * math.sin(tau / 2) ** 2
        / (8 * tau**2)
    )
    b = (1 + 3 * p) ** 2 * math.sin(1.5 * tau) ** 2 / (16 * tau**2)
    return ClosedForm(f_q, s, b, 3 / 8 * (2 + p * (5 * p - 1)), 9 / 64 * (1 + 3 * p) ** 2, 3)


_EXAMPLES = {1: _example1, 2: _example2, 3: _example3, 4: _example4, 5: _example5}

# which StateFamilySpec parameters each example takes
EXAMPLE_PARAMS = {1: ("phi",), 2: ("phi",), 3: ("p", "phi"), 4: ("p",), 5: ("p",)}


def closed_form(example_id: int, tau: float = math.pi / 6, p: float | None = None, phi: float | None = None) -> ClosedForm:
    """Evaluate the analytic values of one example family.

    Args:
        example_id: 1 to 5.
        tau: encoded phase (non-zero).
        p: mixing weight, for examples 3 to 5.
        phi: angle, for examples 1 to 3.

    Raises:
        UnknownExample: for an id outside 1..5.
        ParamOutOfRange: for a missing or out-of-range parameter.
    """
    try:
        fn = _EXAMPLES[int(example_id)]
    except (KeyError, ValueError, TypeError):
        raise UnknownExample(f"no example {example_id!r}; choose 1-5") from None
    if tau == 0:
        raise ParamOutOfRange("tau must be non-zero")
    return fn(float(tau), p, phi)
