"""Unit tests for the parametrically driven Duffing oscillator model."""

import cmath
import math

import numpy as np
import pytest

from fpsteady import kerr, oracle, paramp, sweep
from fpsteady.errors import DegenerateState, DomainError
from fpsteady.phasespace import GridSpec

# a generic mixed-drive point reused across tests
P = paramp.ParampParams(delta=0.7, eps1=1.2 + 0.8j, eps2=1.5 - 0.6j,
                        u=-0.9, gamma1=1.0, gamma2=0.4)


@pytest.fixture(scope="module")
def p_state():
    spec = sweep._oracle_spec_for_paramp(P, 40)
    return oracle.steady_state(oracle.build_liouvillian(spec), [40])


def test_params_validation():
    with pytest.raises(DomainError):
        paramp.ParampParams(delta=0.0, eps1=0.0, eps2=1.0, u=1.0, gamma1=0.0)
    with pytest.raises(DomainError):
        paramp.ParampParams(delta=0.0, eps1=0.0, eps2=1.0, u=1.0, gamma1=1.0,
                            gamma2=-0.1)
    with pytest.raises(DomainError):
        paramp.ParampParams(delta=0.0, eps1=0.0, eps2=1.0, u=0.0, gamma1=1.0,
                            gamma2=0.0)


def test_derived_quantities():
    d = paramp.derived(P)
    assert d.kappa1 == pytest.approx(P.gamma1 + 1j * P.delta)
    assert d.kappa2 == pytest.approx(P.gamma2 + 1j * P.u)
    assert d.a_const == pytest.approx(d.kappa1 / d.kappa2)
    assert d.sqrt_ratio**2 == pytest.approx(P.eps2 / d.kappa2)
    assert d.b_const == pytest.approx(-P.eps1 / (d.sqrt_ratio * d.kappa2))


def test_moment_trivial_cases():
    assert paramp.moment(P, 0, 0) == 1.0 + 0j
    with pytest.raises(DomainError):
        paramp.moment(P, -1, 0)
    # two-photon drive only: odd moments vanish by parity
    p0 = paramp.ParampParams(delta=0.3, eps1=0.0, eps2=1.2, u=0.8, gamma1=1.0)
    assert paramp.moment(p0, 0, 1) == 0j
    assert paramp.moment(p0, 2, 1) == 0j


def test_moments_match_oracle(p_state):
    for m, n, string in ((1, 1, "ad0 a0"), (0, 1, "a0"), (0, 2, "a0 a0"),
                         (2, 2, "ad0 ad0 a0 a0"), (1, 2, "ad0 a0 a0")):
        ref = oracle.expectation_string(p_state, string)
        val = paramp.moment(P, m, n)
        assert abs(val - ref) <= 1e-8 * max(abs(ref), 1e-9), (m, n)


def test_pure_coherent_drive_reduces_to_kerr():
    p = paramp.ParampParams(delta=-0.4, eps1=0.7 + 0.2j, eps2=0.0,
                            u=1.1, gamma1=1.0, gamma2=0.3)
    k1 = p.gamma1 + 1j * p.delta
    k2 = p.gamma2 + 1j * p.u
    for m, n in ((1, 1), (0, 1), (0, 2)):
        assert paramp.moment(p, m, n) == kerr.moment(p.eps1, k1, k2, m, n)
    assert paramp.pn(p, 2) == kerr.pn(p.eps1, k1, k2, 2)


def test_pn_matches_oracle_and_sums(p_state):
    for n in range(10):
        ref = p_state.rho[n, n].real
        assert abs(paramp.pn(P, n) - ref) <= max(1e-8 * ref, 1e-10), n
    total = sum(paramp.pn(P, n) for n in range(40))
    assert total == pytest.approx(1.0, abs=1e-10)
    with pytest.raises(DomainError):
        paramp.pn(P, -1)


def test_qfunction_matches_oracle(p_state):
    grid = GridSpec.square(3.0, 41)
    qa = paramp.qfunction(P, grid)
    qo = oracle.qfunction_from_rho(p_state, grid)
    assert float(np.max(np.abs(qa.values - qo.values))) < 1e-8
    assert qa.normalization_estimate == pytest.approx(1.0, abs=0.02)


def test_min_quadrature_vacuum():
    p = paramp.ParampParams(delta=0.0, eps1=0.0, eps2=0.0, u=1.0, gamma1=1.0)
    rec = paramp.min_quadrature_uncertainty(p)
    assert rec["value"] == pytest.approx(0.5)
    assert rec["theta_star"] == pytest.approx(math.pi / 2.0)


def test_min_quadrature_squeezed_below_vacuum():
    p = paramp.ParampParams(delta=0.0, eps1=0.0, eps2=0.5, u=0.001, gamma1=1.0)
    rec = paramp.min_quadrature_uncertainty(p)
    assert 0.25 < rec["value"] < 0.5


def test_min_quadrature_small_u_regression():
    # near-threshold, tiny-U point: the I-sums cancel over ~1e3 log units and
    # once silently dropped sub-threshold terms; values frozen against a
    # 60-digit reference
    for e2, expected in ((0.995, 0.25350076229450735),
                         (1.0, 0.30645670837856187),
                         (1.005, 0.4820000807218321)):
        p = paramp.ParampParams(delta=0.0, eps1=0.0, eps2=e2, u=1e-4,
                                gamma1=1.0)
        rec = paramp.min_quadrature_uncertainty(p)
        assert rec["value"] == pytest.approx(expected, rel=1e-9), e2


def test_classical_fixed_points_probes():
    cases = (
        (0.0, 0.5, paramp.Phase.One),
        (0.0, 2.0, paramp.Phase.Two),
        (-2.0, 1.5, paramp.Phase.Three),
        (2.0, 1.5, paramp.Phase.One),  # pair amplitudes would be negative
    )
    for delta, e2, expected in cases:
        p = paramp.ParampParams(delta=delta, eps1=0.0, eps2=e2, u=1.0,
                                gamma1=1.0)
        fps = paramp.classical_fixed_points(p)
        assert fps.phase is expected, (delta, e2)
        assert fps.stable_count == expected.value
        # nonzero fixed points come in +-alpha pairs
        nonzero = [pt.alpha for pt in fps.points if pt.alpha != 0]
        for a in nonzero:
            assert any(cmath.isclose(a, -b) for b in nonzero)


def test_classical_fixed_points_validation():
    with pytest.raises(DomainError):
        paramp.classical_fixed_points(
            paramp.ParampParams(delta=0.0, eps1=0.1, eps2=1.0, u=1.0, gamma1=1.0))
    with pytest.raises(DomainError):
        paramp.classical_fixed_points(
            paramp.ParampParams(delta=0.0, eps1=0.0, eps2=1.0, u=1.0,
                                gamma1=1.0, gamma2=0.5))
    with pytest.raises(DomainError):
        paramp.classical_fixed_points(
            paramp.ParampParams(delta=0.0, eps1=0.0, eps2=1.0, u=0.0,
                                gamma1=1.0, gamma2=0.5))


def test_cat_metrics_bimodal():
    p = paramp.ParampParams(delta=0.0, eps1=0.0, eps2=1.15, u=0.1,
                            gamma1=1.0, gamma2=0.05)
    cm = paramp.cat_metrics(p, GridSpec.square(4.0, 121))
    a1, a2 = cm.peak_positions
    assert abs(a1 + a2) < 0.15  # opposite-phase coherent pair
    assert cm.mean_photons == pytest.approx(2.2, rel=0.06)
    assert cm.peak_value > 0
    assert 0.0 <= cm.bridge_ratio <= 1.0
    assert cm.bridge_value >= 0.0


def test_cat_metrics_unimodal_raises():
    p = paramp.ParampParams(delta=-12.0, eps1=0.0, eps2=2.0, u=5.0, gamma1=1.0)
    with pytest.raises(DegenerateState):
        paramp.cat_metrics(p, GridSpec.square(3.5, 101))


def test_phase_enum_values():
    assert [ph.value for ph in paramp.Phase] == [1, 2, 3]
