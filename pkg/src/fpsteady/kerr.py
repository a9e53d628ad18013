"""Analytic steady state of a driven Kerr oscillator with complex parameters.

The single-oscillator phase-space drift treated here is

    d(alpha)/dt = eps - kappa1 * alpha - kappa2 * alpha**2 * beta,

whose steady state has closed-form normally-ordered moments in terms of
gamma functions and the generalised hypergeometric function 0F2 with
d = 2 * kappa1 / kappa2.  The eliminated cavity-transmon system lands here with
kappa1 = gamma_t_eff / 2 and kappa2 = i * chi, and the coherently driven
Duffing limit of the parametric model with kappa1 = gamma1 + i*delta and
kappa2 = gamma2 + i*u.

Everything is evaluated in log space with one shared principal branch so
the enormous 0F2 magnitudes at strong drive cancel before exponentiation.
"""

from __future__ import annotations

import cmath
import math

import numpy as np

from . import specfn
from .errors import DomainError
from .phasespace import GridSpec, QGrid


def _log_prefactor(eps, kappa2, n, m):
    # log[(2 eps/kappa2)^m * conj(2 eps/kappa2)^n], principal branch shared
    # by numerator and normalisation
    lr = cmath.log(2.0 * eps / kappa2)
    return m * lr + n * lr.conjugate()


def moment(eps, kappa1, kappa2, n, m, control=None):
    """Normally-ordered steady-state moment <b^dag^n b^m>."""
    if n < 0 or m < 0:
        raise DomainError("moment orders must be nonnegative")
    if kappa2 == 0:
        raise DomainError("kappa2 must be nonzero for the analytic solution")
    if n == 0 and m == 0:
        return 1.0 + 0j
    if eps == 0:
        return 0j
    d = 2.0 * kappa1 / kappa2
    x = 8.0 * abs(eps / kappa2) ** 2
    log_val = (
        _log_prefactor(eps, kappa2, n, m)
        + specfn.log_gamma(d)
        + specfn.log_gamma(d.conjugate())
        - specfn.log_gamma(d + m)
        - specfn.log_gamma(d.conjugate() + n)
        + specfn.hyp0f2_log_ratio(d, d.conjugate(), m, n, x, control=control)
    )
    return cmath.exp(log_val)


def modified_moment(eps, kappa1, kappa2, n, m, control=None):
    """Moment-like integral with the exp(-alpha*beta) weight inserted.

    Same structure as ``moment`` but the numerator 0F2 carries argument
    |eps/kappa2|**2 (half the normalisation argument).  These are the
    coefficients of the Q-function double series.
    """
    if kappa2 == 0:
        raise DomainError("kappa2 must be nonzero for the analytic solution")
    d = 2.0 * kappa1 / kappa2
    x = 8.0 * abs(eps / kappa2) ** 2
    if eps == 0:
        return 1.0 + 0j if n == 0 and m == 0 else 0j
    log_val = (
        _log_prefactor(eps, kappa2, n, m)
        + specfn.log_gamma(d)
        + specfn.log_gamma(d.conjugate())
        - specfn.log_gamma(d + m)
        - specfn.log_gamma(d.conjugate() + n)
        + specfn.hyp0f2_log_ratio(
            d, d.conjugate(), m, n, x, control=control, x_num=x / 2.0
        )
    )
    return cmath.exp(log_val)


def pn(eps, kappa1, kappa2, n, control=None):
    """Fock-state occupation P(n) of the steady state."""
    if n < 0:
        raise DomainError("n must be nonnegative")
    if eps == 0:
        return 1.0 if n == 0 else 0.0
    value = modified_moment(eps, kappa1, kappa2, n, n, control=control)
    value /= math.factorial(n) if n <= 20 else math.exp(math.lgamma(n + 1))
    prob = value.real
    # the exact expression is real; tiny negative round-off is clipped
    return max(prob, 0.0)


def qfunction_coefficients(eps, kappa1, kappa2, order, control=None):
    """Coefficient matrix C[k, l] of the Q-function double series.

    Q(alpha) = (1/pi) exp(-|alpha|^2) Re sum_{k,l} C[k,l]
    conj(alpha)^k alpha^l with C[k,l] = modified_moment(n=l, m=k)/(k! l!).
    This is the coherent-state expansion of the generalized-P steady state,
    so it agrees pointwise with <alpha|rho|alpha>/pi.
    """
    c = np.zeros((order, order), dtype=complex)
    for k in range(order):
        for l in range(k, order):
            val = modified_moment(eps, kappa1, kappa2, l, k, control=control)
            val *= math.exp(-math.lgamma(k + 1) - math.lgamma(l + 1))
            c[k, l] = val
            c[l, k] = val.conjugate()
    return c


def evaluate_q_series(coeffs, grid_spec):
    """Evaluate the Q double series on an alpha-plane grid.

    Grid axes are Re(alpha), Im(alpha).  Returns (values, imag_leak) where
    imag_leak is the largest imaginary residue of the nominally real sum.
    """
    xs, ys = grid_spec.axes()
    xg, yg = np.meshgrid(xs, ys, indexing="ij")
    u = (xg + 1j * yg).ravel()
    order = coeffs.shape[0]
    powers = u[:, None] ** np.arange(order)[None, :]
    series = np.einsum("ik,kl,il->i", powers.conj(), coeffs, powers)
    prefactor = np.exp(-(xg**2 + yg**2)).ravel() / math.pi
    return (prefactor * series.real).reshape(xg.shape), np.max(
        np.abs(series.imag) * prefactor
    )


def qfunction(eps, kappa1, kappa2, grid_spec, control=None,
              start_order=8, max_order=512, shell_tol=1e-10):
    """Q-function on a grid, adaptively doubling the series order.

    Doubling stops once the added shells change the grid maximum by less
    than ``shell_tol``.
    """
    control = control or specfn.DEFAULT_CONTROL
    spec = grid_spec if isinstance(grid_spec, GridSpec) else GridSpec(*grid_spec)
    order = start_order
    prev = None
    while order <= max_order:
        coeffs = qfunction_coefficients(eps, kappa1, kappa2, order, control=control)
        values, _ = evaluate_q_series(coeffs, spec)
        if prev is not None and np.max(np.abs(values - prev)) < shell_tol * max(
            1.0, np.max(np.abs(values))
        ):
            break
        prev = values
        order *= 2
    else:
        raise specfn.NonConvergence(
            f"Q-function series did not stabilise below order {max_order}"
        )
    xs, ys = spec.axes()
    dx, dy = spec.cell()
    return QGrid(
        x_axis=xs,
        y_axis=ys,
        values=values,
        normalization_estimate=float(values.sum() * dx * dy),
    )
