"""Unit tests for the truncated-Fock Lindblad steady-state oracle."""

import math

import numpy as np
import pytest

from fpsteady import oracle
from fpsteady.errors import DimensionError, DomainError, SingularSystem
from fpsteady.phasespace import GridSpec


def _linear_cavity_spec(delta, eps, kappa, dim):
    return oracle.FockOperatorSpec(
        dims=[dim],
        hamiltonian_terms=[
            (delta, "ad0 a0"),
            (1j * eps, "ad0"),
            (-1j * np.conj(eps), "a0"),
        ],
        collapse_ops=[(math.sqrt(kappa), "a0")],
    )


def test_spec_validation():
    with pytest.raises(DomainError):
        oracle.FockOperatorSpec(dims=[1])
    with pytest.raises(DimensionError):
        oracle.FockOperatorSpec(dims=[100, 100])


def test_non_hermitian_hamiltonian_rejected():
    spec = oracle.FockOperatorSpec(dims=[4], hamiltonian_terms=[(1.0, "a0")],
                                   collapse_ops=[(1.0, "a0")])
    with pytest.raises(DomainError):
        oracle.build_liouvillian(spec)


def test_ladder_string_unknown_token():
    with pytest.raises(DomainError):
        oracle.ladder_string([4], "b0")


def test_undriven_cavity_relaxes_to_vacuum():
    spec = _linear_cavity_spec(0.7, 0.0, 1.3, 6)
    state = oracle.steady_state(oracle.build_liouvillian(spec), [6])
    expected = np.zeros((6, 6))
    expected[0, 0] = 1.0
    assert np.allclose(state.rho, expected, atol=1e-12)
    assert state.residual_norm < 1e-10


def test_driven_cavity_is_coherent():
    delta, eps, kappa, dim = 0.4, 0.9, 1.1, 25
    spec = _linear_cavity_spec(delta, eps, kappa, dim)
    state = oracle.steady_state(oracle.build_liouvillian(spec), [dim])
    alpha = eps / (kappa / 2.0 + 1j * delta)
    assert oracle.expectation_string(state, "a0") == pytest.approx(alpha, rel=1e-10)
    assert oracle.expectation_string(state, "ad0 a0").real == pytest.approx(
        abs(alpha) ** 2, rel=1e-10)
    # physicality invariants
    eig = np.linalg.eigvalsh(state.rho)
    assert eig.min() >= -1e-8
    assert float(np.trace(state.rho @ state.rho).real) <= 1.0 + 1e-10
    assert state.residual_norm < 1e-10


def test_steady_state_shape_mismatch():
    spec = _linear_cavity_spec(0.0, 0.1, 1.0, 4)
    liou = oracle.build_liouvillian(spec)
    with pytest.raises(DomainError):
        oracle.steady_state(liou, [5])


def test_degenerate_kernel_raises():
    # purely unitary evolution: every diagonal state is steady
    spec = oracle.FockOperatorSpec(dims=[4], hamiltonian_terms=[(1.0, "ad0 a0")])
    with pytest.raises(SingularSystem):
        oracle.steady_state(oracle.build_liouvillian(spec), [4])


def test_converged_solve_flags_convergence():
    builder = lambda dims: _linear_cavity_spec(0.0, 0.5, 1.0, dims[0])
    res = oracle.converged_solve(builder, {"n": "ad0 a0"}, [4])
    assert res["truncation_converged"]
    assert res["values"]["n"].real == pytest.approx(1.0, rel=1e-8)


def test_reduced_rho_product_state():
    # two uncoupled driven cavities: partial trace returns each factor
    def spec(dims):
        return oracle.FockOperatorSpec(
            dims=dims,
            hamiltonian_terms=[
                (1j * 0.3, "ad0"), (-1j * 0.3, "a0"),
                (1j * 0.1, "ad1"), (-1j * 0.1, "a1"),
            ],
            collapse_ops=[(1.0, "a0"), (1.0, "a1")],
        )
    dims = [8, 6]
    state = oracle.steady_state(oracle.build_liouvillian(spec(dims)), dims)
    r0 = oracle.reduced_rho(state, 0)
    r1 = oracle.reduced_rho(state, 1)
    assert r0.shape == (8, 8) and r1.shape == (6, 6)
    assert np.trace(r0).real == pytest.approx(1.0, abs=1e-12)
    assert np.trace(r1).real == pytest.approx(1.0, abs=1e-12)
    # <a> of each factor matches the full-state expectation
    assert np.trace(r0 @ oracle.destroy(8).toarray()) == pytest.approx(
        oracle.expectation_string(state, "a0"), abs=1e-12)
    assert np.trace(r1 @ oracle.destroy(6).toarray()) == pytest.approx(
        oracle.expectation_string(state, "a1"), abs=1e-12)


def test_qfunction_from_rho_vacuum():
    rho = np.zeros((5, 5), dtype=complex)
    rho[0, 0] = 1.0
    grid = GridSpec.square(2.0, 21)  # includes alpha = 0
    q = oracle.qfunction_from_rho(rho, grid)
    xs, ys = grid.axes()
    xg, yg = np.meshgrid(xs, ys, indexing="ij")
    expected = np.exp(-(xg**2 + yg**2)) / math.pi
    assert np.allclose(q.values, expected, atol=1e-14)
    assert q.normalization_estimate == pytest.approx(1.0, abs=0.01)


def test_qfunction_from_rho_coherent_peak():
    delta, eps, kappa, dim = 0.0, 0.8, 2.0, 25
    spec = _linear_cavity_spec(delta, eps, kappa, dim)
    state = oracle.steady_state(oracle.build_liouvillian(spec), [dim])
    alpha = eps / (kappa / 2.0)
    q = oracle.qfunction_from_rho(state, GridSpec.square(3.0, 61))
    i, j = np.unravel_index(np.argmax(q.values), q.values.shape)
    assert abs(complex(q.x_axis[i], q.y_axis[j]) - alpha) < 0.11
    assert q.values.max() == pytest.approx(1.0 / math.pi, rel=1e-3)
