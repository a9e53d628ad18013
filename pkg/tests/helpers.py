"""Shared test utilities: random parameter draws and oracle builders."""

import cmath
import math

import numpy as np

from fpsteady import oracle, paramp, transmon


def draw_paramp(rng, eps1_real=False, eps1_zero=False):
    """Random moderate-excitation parametric-Duffing parameter set."""
    if eps1_zero:
        eps1 = 0.0
    else:
        eps1 = rng.uniform(0.0, 1.0)
        if not eps1_real:
            eps1 *= cmath.exp(1j * rng.uniform(0.0, 2.0 * math.pi))
    return paramp.ParampParams(
        delta=rng.uniform(-2.0, 2.0),
        eps1=eps1,
        eps2=rng.uniform(0.2, 2.0) * cmath.exp(1j * rng.uniform(0.0, 2.0 * math.pi)),
        u=rng.choice([-1.0, 1.0]) * rng.uniform(0.2, 2.0),
        gamma1=1.0,
        gamma2=rng.uniform(0.0, 0.5),
    )


def draw_transmon(rng):
    """Random weakly driven cavity-transmon parameter set."""
    return transmon.TransmonCavityParams(
        delta_c=rng.uniform(-5.0, 5.0),
        delta_ct=rng.uniform(-10.0, 10.0),
        g=rng.uniform(0.5, 3.0),
        chi=-rng.uniform(0.5, 3.0),
        gamma_c=rng.uniform(0.5, 2.0),
        gamma_t=rng.uniform(0.0, 0.3),
        epsilon=rng.uniform(0.05, 1.5) * cmath.exp(1j * rng.uniform(0.0, 2.0 * math.pi)),
    )


def two_mode_steady(p, dims):
    """Brute-force steady state of the full cavity-transmon master equation."""
    spec = oracle.FockOperatorSpec(
        dims=dims,
        hamiltonian_terms=[
            (p.delta_c, "ad0 a0"),
            (1j * p.epsilon, "ad0"),
            (-1j * np.conj(p.epsilon), "a0"),
            (1j * p.g, "a0 ad1"),
            (-1j * p.g, "ad0 a1"),
            (p.delta_t, "ad1 a1"),
            (p.chi / 2.0, "ad1 ad1 a1 a1"),
        ],
        collapse_ops=[
            (math.sqrt(p.gamma_c), "a0"),
            (math.sqrt(p.gamma_t), "a1"),
        ],
    )
    return oracle.steady_state(oracle.build_liouvillian(spec), dims)


def kerr_oracle_steady(eps, delta, chi, gamma, dim):
    """Single-mode driven Kerr oracle: drift eps - (gamma/2 + i delta) alpha
    - i chi alpha^2 beta, i.e. kerr.moment(eps, gamma/2 + 1j*delta, 1j*chi)."""
    spec = oracle.FockOperatorSpec(
        dims=[dim],
        hamiltonian_terms=[
            (delta, "ad0 a0"),
            (chi / 2.0, "ad0 ad0 a0 a0"),
            (1j * eps, "ad0"),
            (-1j * np.conj(eps), "a0"),
        ],
        collapse_ops=[(math.sqrt(gamma), "a0")],
    )
    return oracle.steady_state(oracle.build_liouvillian(spec), [dim])
