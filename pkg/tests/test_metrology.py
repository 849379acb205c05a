import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from coherence_orders import metrology as mt
from coherence_orders.closed_forms import EXAMPLE3_PANELS, closed_form, example3_printed_qfi
from coherence_orders.constants import GHR_QFI_FACTOR
from coherence_orders.errors import InvalidState, OrderOutOfRange, ParamOutOfRange, UnknownExample, ZeroTau
from coherence_orders.states import FAMILIES, ghz_ket, make_state, plus_ket, validate_state

from helpers import collective_z, qfi_eig, qfi_fidelity, random_density, random_pure

TAU = math.pi / 6


def enc(n, tau=TAU):
    return mt.PhaseEncoding.collective(n, tau)


# --------------------------------------------------------------------------
# states


def test_ghz_state_corners():
    rho = make_state("ghz", n_qubits=3)
    assert np.count_nonzero(rho) == 4
    for r, c in ((0, 0), (0, 7), (7, 0), (7, 7)):
        assert rho[r, c] == pytest.approx(0.5)


def test_family_edge_cases():
    ex4 = make_state("example4", p=0.0)
    plus00 = np.kron(plus_ket(1), np.eye(4)[0])
    np.testing.assert_allclose(ex4, np.outer(plus00, plus00.conj()), atol=1e-15)
    np.testing.assert_allclose(make_state("example3", p=0.0, phi=0.3), np.eye(8) / 8)


@pytest.mark.parametrize("name", FAMILIES)
def test_all_families_valid(name):
    kw = {"p": 0.4, "phi": 0.7}
    validate_state(make_state(name, **kw))


def test_family_parameter_errors():
    with pytest.raises(ParamOutOfRange):
        make_state("example3", p=1.2, phi=0.1)
    with pytest.raises(ParamOutOfRange):
        make_state("ghz_family", n_qubits=3, p=0.5, phi=2.0)
    with pytest.raises(ParamOutOfRange):
        make_state("example4")
    with pytest.raises(ParamOutOfRange):
        make_state("nope")


def test_validate_state_errors():
    with pytest.raises(InvalidState):
        validate_state(np.eye(2))
    with pytest.raises(InvalidState):
        validate_state(np.diag([1.5, -0.5]))
    with pytest.raises(InvalidState):
        validate_state(np.array([[0.5, 0.1], [0.3, 0.5]]))


# --------------------------------------------------------------------------
# fixtures


def test_qfi_examples():
    assert mt.qfi(make_state("ghz", n_qubits=3), enc(3)) == pytest.approx(9 / 4, rel=1e-12)
    assert mt.qfi(make_state("plus", n_qubits=3), enc(3)) == pytest.approx(3 / 4, rel=1e-12)
    assert mt.qfi(np.diag([0.5, 0.25, 0.25, 0]).astype(complex), enc(2)) == 0
    assert GHR_QFI_FACTOR * mt.qfi(make_state("ghz", n_qubits=3), enc(3)) == pytest.approx(9)


def test_squared_speed_matches_trace_formula(rng):
    for n in (1, 2, 3):
        rho = random_density(n, rng)
        e = enc(n, 0.7)
        rt = e.rotate(rho)
        direct = (np.trace(rho @ rho) - np.trace(rt @ rho)).real / 0.7**2
        assert mt.squared_speed(rho, e) == pytest.approx(direct, abs=1e-12)


def test_squared_speed_examples():
    assert mt.squared_speed(make_state("w", n_qubits=3), enc(3, 0.5)) == pytest.approx(0, abs=1e-14)
    phi = 0.3
    expected = math.sin(2 * phi) ** 2 * math.sin(TAU) ** 2 / TAU**2
    assert mt.squared_speed(make_state("example2", phi=phi), enc(3)) == pytest.approx(expected, rel=1e-12)
    with pytest.raises(ZeroTau):
        mt.squared_speed(make_state("w"), enc(3, 0.0))


def test_b_term_examples():
    ghz = make_state("ghz", n_qubits=3)
    assert mt.b_term(ghz, enc(3), 3) == pytest.approx(18 / math.pi**2, rel=1e-12)
    assert mt.b_term(ghz, enc(3), 0) == 0
    p = 0.35
    ex5 = make_state("example5", p=p)
    assert mt.b_term(ex5, enc(3), 3) == pytest.approx((1 + 3 * p) ** 2 / (16 * TAU**2) * math.sin(1.5 * TAU) ** 2)
    with pytest.raises(OrderOutOfRange):
        mt.b_term(ghz, enc(3), 4)


def test_f_i_examples():
    assert mt.f_i_m(make_state("ghz", n_qubits=3), 3) == pytest.approx(9 / 4)
    phi = 1.1
    ex2 = make_state("example2", phi=phi)
    assert mt.f_i(ex2) == pytest.approx(math.sin(2 * phi) ** 2)
    assert mt.f_i_m(ex2, 2) == pytest.approx(math.sin(2 * phi) ** 2)
    assert mt.f_i(np.diag([0.3, 0.7]).astype(complex)) == 0


def test_witness_examples():
    rep = mt.witness(make_state("ghz", n_qubits=3), enc(3))
    assert rep.m_max == 3 and rep.witness_b and rep.witness_fi
    assert rep.b_mmax == pytest.approx(1.8238, abs=1e-4)
    rep = mt.witness(make_state("plus", n_qubits=3), enc(3))
    assert rep.f_i_mmax == pytest.approx(9 / 64) and not rep.witness_fi
    rep = mt.witness(np.diag([0.1, 0.2, 0.3, 0.4]).astype(complex), enc(2))
    assert rep.m_max == 0 and not rep.witness_b and not rep.witness_fi
    assert set(rep.to_dict()) >= {"f_q", "s_tau", "b_mmax", "i_m"}


def test_encoding_validation():
    with pytest.raises(ValueError):
        mt.PhaseEncoding(np.array([0.3, -0.3]), 0.1)
    with pytest.raises(ValueError):
        mt.PhaseEncoding(np.ones((2, 2)), 0.1)
    e = mt.PhaseEncoding(np.diag([0.5, -0.5]), 0.2)
    assert e.max_order() == 1 and e.n_qubits == 1


# --------------------------------------------------------------------------
# closed forms


def test_closed_form_anchors():
    assert closed_form(1, phi=math.pi / 2).f_q == pytest.approx(9 / 4)
    assert closed_form(5, p=1.0).f_q == pytest.approx(9 / 4)
    assert all(v == 0 for v in closed_form(2, phi=0.0)[:5])
    with pytest.raises(UnknownExample):
        closed_form(6, p=0.5)
    with pytest.raises(ParamOutOfRange):
        closed_form(3, p=0.5)


@pytest.mark.parametrize("ex,kw", [(1, "phi"), (2, "phi"), (3, "p"), (4, "p"), (5, "p")])
def test_closed_forms_match_library(ex, kw):
    for x in np.linspace(0.05, 0.95, 7):
        params = {kw: x * (math.pi if kw == "phi" else 1.0)}
        if ex == 3:
            params["phi"] = math.pi / 4
        name = f"example{ex}"
        rho = make_state(name, **params)
        cf = closed_form(ex, TAU, **params)
        rep = mt.witness(rho, enc(3))
        assert rep.f_q == pytest.approx(cf.f_q, rel=1e-9)
        assert rep.s_tau == pytest.approx(cf.s_tau, rel=1e-9)
        assert rep.b_tau_m[cf.m] == pytest.approx(cf.b, rel=1e-9)
        assert rep.f_i == pytest.approx(cf.f_i, rel=1e-9)
        assert mt.f_i_m(rho, cf.m) == pytest.approx(cf.f_i_mmax, rel=1e-9)


def test_example3_panels_against_oracle():
    h = collective_z(3)
    for phi, coef in EXAMPLE3_PANELS.items():
        for p in np.linspace(0, 1, 11):
            rho = make_state("example3", p=p, phi=phi)
            assert qfi_eig(rho, h) == pytest.approx(coef * p * p / (1 + 3 * p), rel=1e-9, abs=1e-12)
    # the general-angle expression does not match direct evaluation
    assert example3_printed_qfi(1.0, 0.0) == pytest.approx(1.25)
    assert closed_form(3, p=1.0, phi=0.0).f_q == pytest.approx(2.25)
    assert math.isnan(closed_form(3, p=0.5, phi=0.1).f_q)


# --------------------------------------------------------------------------
# structure


def test_qfi_matches_oracles(rng):
    for n in (1, 2):
        h = collective_z(n)
        for _ in range(5):
            rho = random_density(n, rng)
            val = mt.qfi(rho, enc(n))
            assert val == pytest.approx(qfi_eig(rho, h), rel=1e-10)
            assert val == pytest.approx(qfi_fidelity(rho, h), rel=1e-5)
            assert mt.qfi(rho, enc(n), eig_method="jacobi") == pytest.approx(val, rel=1e-9)


def test_pure_state_qfi_is_variance(rng):
    for n in (1, 2, 3, 4):
        psi = random_pure(n, rng)
        e = enc(n)
        assert mt.qfi(np.outer(psi, psi.conj()), e) == pytest.approx(mt.generator_variance(psi, e), abs=1e-10)
    assert mt.generator_variance(ghz_ket(3), enc(3)) == pytest.approx(9 / 4)


def test_qfi_additive(rng):
    for n in (1, 2):
        rho = random_density(n, rng)
        both = np.kron(rho, rho)
        assert mt.qfi(both, enc(2 * n)) == pytest.approx(2 * mt.qfi(rho, enc(n)), abs=1e-9)


def test_plus_plus_and_entangled_phi_equal():
    a = mt.qfi(make_state("plus", n_qubits=2), enc(2))
    b = mt.qfi(make_state("phi_entangled"), enc(2))
    assert a == pytest.approx(0.5)
    assert abs(a - b) < 1e-12


def test_saturation_small_tau():
    ghz = make_state("ghz", n_qubits=3)
    e = enc(3, 1e-3)
    assert abs(mt.b_term(ghz, e, 3) - mt.qfi(ghz, e)) < 1e-4


def one_pair_state(n, m, c):
    d = 2**n
    rho = np.eye(d, dtype=complex) / d
    r, col = (1, 2) if m == 0 else (0, 2**m - 1)
    rho[r, col] = rho[col, r] = c
    return rho


def test_order_monotonicity():
    for n in (2, 3, 4):
        c = 0.8 / 2**n
        values = [mt.qfi(one_pair_state(n, m, c), enc(n)) for m in range(n + 1)]
        assert values[0] == pytest.approx(0, abs=1e-15)
        assert all(b >= a - 1e-15 for a, b in zip(values, values[1:]))


@settings(max_examples=80, deadline=None)
@given(
    n=st.integers(1, 4),
    seed=st.integers(0, 2**32 - 1),
    tau=st.floats(1e-3, math.pi - 1e-3),
    rank=st.integers(1, 3),
)
def test_bound_chain(n, seed, tau, rank):
    rng = np.random.default_rng(seed)
    rho = random_density(n, rng, rank=min(rank, 2**n))
    rep = mt.witness(rho, enc(n, tau))
    assert 0 <= rep.b_mmax <= rep.s_tau + 1e-12
    assert rep.s_tau <= rep.f_q + 1e-9
    assert rep.s_tau == pytest.approx(rep.b_tau_m.sum(), abs=1e-10)
    assert rep.f_i <= rep.f_q + 1e-9
    if rep.m_max * tau <= math.pi / 2:
        assert 8 / math.pi**2 * rep.f_i <= rep.s_tau + 1e-9
