"""Analytic steady state of the cavity-transmon system after adiabatic
elimination of the cavity.

With gamma_c >> gamma_t the cavity follows the transmon instantaneously,
alpha_1 = (2/gamma_c_eff)(eps - g alpha_2), and the transmon obeys a driven
Duffing Fokker-Planck equation with complex effective parameters
(gamma_t_eff, eps_eff).  All moments reduce to the closed forms in
:mod:`fpsteady.kerr`; cavity moments follow by binomial expansion of the
elimination relation.

All frequencies and rates are angular (rad/s).
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from . import kerr
from .errors import DomainError
from .phasespace import GridSpec

# Cavity moments expand (eps - g*alpha_2)^m (eps* - g*beta_2)^n binomially;
# high orders are outside the regime the solution is used in.
MAX_CAVITY_ORDER = 8


@dataclass(frozen=True)
class TransmonCavityParams:
    """Physical parameters of the driven cavity-transmon system.

    delta_c = omega_c - omega_d, delta_ct = omega_t - omega_c (so the
    transmon detuning is delta_c + delta_ct).  chi is the transmon
    anharmonicity (typically negative).
    """

    delta_c: float
    delta_ct: float
    g: float
    chi: float
    gamma_c: float
    gamma_t: float
    epsilon: complex

    def __post_init__(self):
        if self.gamma_c <= 0:
            raise DomainError("gamma_c must be positive")
        if self.gamma_t < 0:
            raise DomainError("gamma_t must be nonnegative")
        if self.chi == 0:
            raise DomainError(
                "chi = 0 degenerates the analytic solution (d -> infinity)"
            )

    @property
    def delta_t(self):
        return self.delta_c + self.delta_ct


@dataclass(frozen=True)
class EffectiveDuffingParams:
    """Complex effective single-oscillator parameters after elimination."""

    gamma_c_eff: complex
    gamma_t_eff: complex
    eps_eff: complex
    d: complex


def effective_params(p: TransmonCavityParams) -> EffectiveDuffingParams:
    """gamma_c_eff, gamma_t_eff, eps_eff and d from the physical parameters."""
    gce = p.gamma_c + 2j * p.delta_c
    gte = p.gamma_t + 2j * p.delta_t + 4.0 * p.g**2 / gce
    eps_eff = 2.0 * p.g * p.epsilon / gce
    return EffectiveDuffingParams(
        gamma_c_eff=gce,
        gamma_t_eff=gte,
        eps_eff=eps_eff,
        d=gte / (2j * p.chi),
    )


def _kerr_args(p: TransmonCavityParams):
    eff = effective_params(p)
    return eff.eps_eff, eff.gamma_t_eff / 2.0, 1j * p.chi


def transmon_moment(p: TransmonCavityParams, n: int, m: int, control=None) -> complex:
    """Normally-ordered transmon moment <b^dag^n b^m> in the steady state."""
    eps, k1, k2 = _kerr_args(p)
    return kerr.moment(eps, k1, k2, n, m, control=control)


def transmon_pn(p: TransmonCavityParams, n: int, control=None) -> float:
    """Steady-state Fock occupation P(n) of the transmon."""
    eps, k1, k2 = _kerr_args(p)
    return kerr.pn(eps, k1, k2, n, control=control)


def transmon_qfunction(p: TransmonCavityParams, grid_spec, control=None, **kwargs):
    """Husimi Q of the transmon on an alpha-plane grid (1/pi convention)."""
    eps, k1, k2 = _kerr_args(p)
    return kerr.qfunction(eps, k1, k2, grid_spec, control=control, **kwargs)


def cavity_moment(p: TransmonCavityParams, n: int, m: int, control=None) -> complex:
    """Cavity moment <a^dag^n a^m> via the adiabatic elimination relation.

    <a^dag^n a^m> = (2/gce)^m (2/gce*)^n sum_{j<=m,k<=n} C(m,j) C(n,k)
    eps^(m-j) (eps*)^(n-k) (-g)^(j+k) <b^dag^k b^j>.
    """
    if n < 0 or m < 0:
        raise DomainError("moment orders must be nonnegative")
    if n + m > MAX_CAVITY_ORDER:
        raise DomainError(f"cavity moments supported up to total order {MAX_CAVITY_ORDER}")
    eff = effective_params(p)
    gce = eff.gamma_c_eff
    eps = complex(p.epsilon)
    total = 0j
    for j in range(m + 1):
        for k in range(n + 1):
            total += (
                math.comb(m, j)
                * math.comb(n, k)
                * eps ** (m - j)
                * eps.conjugate() ** (n - k)
                * (-p.g) ** (j + k)
                * transmon_moment(p, k, j, control=control)
            )
    return (2.0 / gce) ** m * (2.0 / gce.conjugate()) ** n * total


def reflection(p: TransmonCavityParams, control=None) -> float:
    """Reflected-amplitude magnitude R = |1 - gamma_c <a> / eps|."""
    if p.epsilon == 0:
        raise DomainError("reflection undefined at zero drive")
    a_mean = cavity_moment(p, 0, 1, control=control)
    return abs(1.0 - p.gamma_c * a_mean / p.epsilon)


def _cubic_real_roots(c3, c2, c1, c0):
    # Depressed-cubic closed form (Cardano / trigonometric), real coefficients.
    a, b, c = c2 / c3, c1 / c3, c0 / c3
    p_ = b - a * a / 3.0
    q_ = 2.0 * a**3 / 27.0 - a * b / 3.0 + c
    shift = -a / 3.0
    disc = (q_ / 2.0) ** 2 + (p_ / 3.0) ** 3
    if disc > 0:
        s = math.sqrt(disc)
        u = math.copysign(abs(-q_ / 2.0 + s) ** (1.0 / 3.0), -q_ / 2.0 + s)
        v = math.copysign(abs(-q_ / 2.0 - s) ** (1.0 / 3.0), -q_ / 2.0 - s)
        return [u + v + shift]
    if p_ == 0:
        return [shift]
    r = math.sqrt(-p_ / 3.0)
    arg = max(-1.0, min(1.0, 3.0 * q_ / (2.0 * p_ * r)))
    phi = math.acos(arg)
    return [2.0 * r * math.cos((phi - 2.0 * math.pi * k) / 3.0) + shift for k in range(3)]


def predict_peaks(p: TransmonCavityParams, k: int) -> list:
    """Drive detunings Delta_c of the k-photon transmon resonance.

    Solves Delta_c + Delta_ct - 4 g^2 Delta_c/(gamma_c^2 + 4 Delta_c^2)
    = k*chi as a real cubic in Delta_c; returns the real roots sorted
    ascending (1 to 3 of them).
    """
    if k < 0:
        raise DomainError("k must be nonnegative")
    rhs = k * p.chi - p.delta_ct
    if p.g == 0:
        return [rhs]
    # (Delta - rhs)(gamma_c^2 + 4 Delta^2) - 4 g^2 Delta = 0
    c3, c2 = 4.0, -4.0 * rhs
    c1 = p.gamma_c**2 - 4.0 * p.g**2
    c0 = -p.gamma_c**2 * rhs

    def f(x):
        return ((c3 * x + c2) * x + c1) * x + c0

    def fp(x):
        return (3.0 * c3 * x + 2.0 * c2) * x + c1

    roots = []
    for x in _cubic_real_roots(c3, c2, c1, c0):
        for _ in range(50):
            d = fp(x)
            if d == 0:
                break
            step = f(x) / d
            x -= step
            if abs(step) <= 1e-15 * max(abs(x), 1.0):
                break
        roots.append(x)
    roots.sort()
    # collapse numerically coincident roots
    out = []
    scale = max(abs(r) for r in roots) + p.gamma_c
    for r in roots:
        if not out or abs(r - out[-1]) > 1e-9 * scale:
            out.append(r)
    return out


@dataclass
class MomentTable:
    """Triangular table of moments <b^dag^n b^m> (or cavity) up to max_order."""

    max_order: int
    entries: dict

    def __getitem__(self, key):
        n, m = key
        return self.entries[(n, m)]


def moment_table(p: TransmonCavityParams, max_order: int, which="transmon",
                 control=None) -> MomentTable:
    """Tabulate all moments with n + m <= max_order for one mode."""
    fn = {"transmon": transmon_moment, "cavity": cavity_moment}.get(which)
    if fn is None:
        raise DomainError(f"unknown mode {which!r}")
    entries = {}
    for n in range(max_order + 1):
        for m in range(n, max_order + 1 - n):
            val = fn(p, n, m, control=control)
            entries[(n, m)] = val
            entries[(m, n)] = val.conjugate()
    return MomentTable(max_order=max_order, entries=entries)


def duffing_validity(p: TransmonCavityParams, ej_over_ec: float, control=None) -> dict:
    """Estimate whether the Duffing approximation of the transmon holds.

    The cosine well holds roughly sqrt(E_J/(8 E_C)) oscillator levels; the
    approximation is trusted while the steady-state excitation stays below
    that.
    """
    if ej_over_ec <= 0:
        raise DomainError("E_J/E_C must be positive")
    levels = math.sqrt(ej_over_ec / 8.0)
    nbar = transmon_moment(p, 1, 1, control=control).real
    return {
        "levels_in_well": levels,
        "mean_excitation": nbar,
        "valid": nbar < levels,
    }
