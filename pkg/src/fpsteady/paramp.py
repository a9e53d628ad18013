"""Analytic steady state of the coherently + parametrically driven Duffing
oscillator with one- and two-photon loss.

The generalized-P Fokker-Planck equation with drift
eps1 - kappa1*alpha + (eps2 - kappa2*alpha^2)*beta (kappa1 = gamma1 + i*Delta,
kappa2 = gamma2 + i*U) satisfies the potential conditions, giving moments as
ratios I_mn/I_00 of single sums over terminating Gauss 2F1 values at z = 2.
The same machinery yields P(n), the Husimi Q-function, the classical
(mean-field) fixed-point structure, the squeezing metric and cat-state
quality metrics.

All frequencies and rates are angular (rad/s).  Single-photon loss enters the
master equation at rate 2*gamma1, pair loss at gamma2.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from . import kerr, specfn
from .errors import DegenerateState, DomainError, NonConvergence
from .phasespace import GridSpec, QGrid

# never truncate the j-sum before j = m + n + this margin (early terms can be
# non-monotone), and require this many consecutive quiet terms to stop
_MIN_EXTRA_TERMS = 10
_QUIET_TERMS = 5


@dataclass(frozen=True)
class ParampParams:
    """Physical parameters of the parametrically driven Duffing oscillator."""

    delta: float
    eps1: complex
    eps2: complex
    u: float
    gamma1: float
    gamma2: float = 0.0

    def __post_init__(self):
        if self.gamma1 <= 0:
            raise DomainError("gamma1 must be positive")
        if self.gamma2 < 0:
            raise DomainError("gamma2 must be nonnegative")
        if self.gamma2 == 0 and self.u == 0:
            raise DomainError("kappa2 = gamma2 + iU must be nonzero")


@dataclass(frozen=True)
class DerivedParampParams:
    kappa1: complex
    kappa2: complex
    a_const: complex
    b_const: complex
    sqrt_ratio: complex  # principal sqrt(eps2/kappa2); 0 when eps2 = 0


def derived(p: ParampParams) -> DerivedParampParams:
    """kappa1, kappa2, A, B and the shared branch of sqrt(eps2/kappa2).

    B = -eps1/sqrt(eps2*kappa2) is tied to the same branch:
    sqrt(eps2*kappa2) := sqrt(eps2/kappa2) * kappa2, so flipping the branch
    flips B and the prefactor root together (the moments are invariant by a
    Pfaff transformation of the 2F1).
    """
    k1 = p.gamma1 + 1j * p.delta
    k2 = p.gamma2 + 1j * p.u
    s = cmath.sqrt(p.eps2 / k2) if p.eps2 != 0 else 0j
    b = -p.eps1 / (s * k2) if p.eps2 != 0 else 0j
    return DerivedParampParams(
        kappa1=k1, kappa2=k2, a_const=k1 / k2, b_const=b, sqrt_ratio=s
    )


class _FTable:
    """Cached values F_p = 2F1(-p, A - B; 2A; 2) for one (A, B) pair.

    With no coherent drive (B = 0) the closed form at c = 2b applies:
    F_(2m+1) = 0 and F_(2m) = (1/2)_m / (A + 1/2)_m, built multiplicatively.
    Otherwise each value is a terminating sum with an extended-precision
    fallback under heavy cancellation.  Values are held as (mantissa,
    log_scale) pairs because the closed-form products underflow doubles long
    before the series they feed has converged (e.g. |A| ~ 1000 near the
    ideal-amplifier threshold).
    """

    _RENORM = 1e-100
    _LOG_RENORM = math.log(1e-100)

    def __init__(self, a_const, b_const, control=None):
        self.a = complex(a_const)
        self.b = complex(b_const)
        self.control = control
        self.closed_form = b_const == 0
        self._vals = [(1.0 + 0j, 0.0)]

    def value(self, p):
        """(mantissa, log_scale) with F_p = mantissa * exp(log_scale)."""
        while len(self._vals) <= p:
            q = len(self._vals)
            if self.closed_form:
                if q % 2 == 1:
                    entry = (0j, 0.0)
                else:
                    m = q // 2
                    v, ls = self._vals[q - 2]
                    v = v * (m - 0.5) / (self.a + m - 0.5)
                    if v != 0 and abs(v) < self._RENORM:
                        v /= self._RENORM
                        ls += self._LOG_RENORM
                    entry = (v, ls)
            else:
                entry = (
                    specfn.hyp2f1_terminating(
                        q, self.a - self.b, 2.0 * self.a, 2.0, control=self.control
                    ),
                    0.0,
                )
            self._vals.append(entry)
        return self._vals[p]


def _i_sum(d: DerivedParampParams, m, n, ftab, control, weight_two=True):
    """I_mn = sum_j (w^j/j!) r^(j+n) conj(r)^(j+m) F_(j+n) conj(F_(j+m)).

    w = 2 for moments; w = 1 for the exp(-alpha*beta)-weighted integrals that
    build P(n) and the Q-function.  r = -sqrt(eps2/kappa2).  Returns
    (mantissa, log_scale); the prefactor and the F values can individually
    leave double range even though each term is tame, so everything is
    combined through log-scaled accumulation.
    """
    control = control or specfn.DEFAULT_CONTROL
    r = -d.sqrt_ratio
    rc = r.conjugate()
    w = 2.0 if weight_two else 1.0
    acc = specfn.LogScaledSum()
    prefac = r**n * rc**m  # j = 0 term weight, mantissa part
    prefac_log = 0.0
    quiet = 0
    jfloor = m + n + _MIN_EXTRA_TERMS
    for j in range(control.max_terms):
        f1, ls1 = ftab.value(j + n)
        f2, ls2 = ftab.value(j + m)
        term = prefac * f1 * f2.conjugate()
        term_log = prefac_log + ls1 + ls2
        acc.add(term, term_log)
        if j >= jfloor:
            quiet_now = (
                term == 0
                or term_log + math.log(abs(term))
                <= math.log(control.rel_tol) + acc.log_abs()
            )
            if quiet_now:
                quiet += 1
                if quiet >= _QUIET_TERMS:
                    return acc.mantissa, acc.log_scale
            else:
                quiet = 0
        prefac = prefac * (w * r * rc) / (j + 1.0)
        mag = abs(prefac)
        if mag > specfn._RESCALE_LIMIT or (mag != 0 and mag < _FTable._RENORM):
            prefac_log += math.log(mag)
            prefac /= mag
    raise NonConvergence(
        f"I_{m}{n} sum did not converge within {control.max_terms} terms"
    )


def moment(p: ParampParams, m: int, n: int, control=None) -> complex:
    """Normally-ordered steady-state moment <c^dag^m c^n> = I_mn / I_00."""
    if m < 0 or n < 0:
        raise DomainError("moment orders must be nonnegative")
    if m == 0 and n == 0:
        return 1.0 + 0j
    if p.eps2 == 0:
        # pure coherent drive: the Eq.-(7)-style Kerr solution applies
        d = derived(p)
        return kerr.moment(p.eps1, d.kappa1, d.kappa2, m, n, control=control)
    if p.eps1 == 0 and (m + n) % 2 == 1:
        return 0j  # parity symmetry of the two-photon-driven state
    d = derived(p)
    ftab = _FTable(d.a_const, d.b_const, control)
    num, ls_num = _i_sum(d, m, n, ftab, control)
    den, ls_den = _i_sum(d, 0, 0, ftab, control)
    return num / den * math.exp(ls_num - ls_den)


def pn(p: ParampParams, n: int, control=None) -> float:
    """Steady-state Fock occupation P(n)."""
    if n < 0:
        raise DomainError("n must be nonnegative")
    if p.eps2 == 0:
        d = derived(p)
        return kerr.pn(p.eps1, d.kappa1, d.kappa2, n, control=control)
    d = derived(p)
    ftab = _FTable(d.a_const, d.b_const, control)
    num, ls_num = _i_sum(d, n, n, ftab, control, weight_two=False)
    den, ls_den = _i_sum(d, 0, 0, ftab, control)
    val = (num / den).real * math.exp(ls_num - ls_den - math.lgamma(n + 1))
    return max(val, 0.0)


def _q_coefficients(p: ParampParams, order, control=None):
    d = derived(p)
    ftab = _FTable(d.a_const, d.b_const, control)
    den, ls_den = _i_sum(d, 0, 0, ftab, control)
    c = np.zeros((order, order), dtype=complex)
    for k in range(order):
        for l in range(k, order):
            num, ls_num = _i_sum(d, l, k, ftab, control, weight_two=False)
            val = num / den * math.exp(
                ls_num - ls_den - math.lgamma(k + 1) - math.lgamma(l + 1)
            )
            c[k, l] = val
            c[l, k] = val.conjugate()
    return c


def qfunction(p: ParampParams, grid_spec, control=None, start_order=8,
              max_order=512, shell_tol=1e-10) -> QGrid:
    """Husimi Q on an alpha-plane grid (axes Re alpha, Im alpha, 1/pi norm).

    Q(alpha) = (1/pi) e^(-|alpha|^2) Re sum_{k,l} C[k,l] conj(alpha)^k
    alpha^l with C[k,l] the exp(-alpha*beta)-weighted moment integrals;
    series order doubles adaptively as in the Kerr module.
    """
    if p.eps2 == 0:
        d = derived(p)
        return kerr.qfunction(p.eps1, d.kappa1, d.kappa2, grid_spec,
                              control=control, start_order=start_order,
                              max_order=max_order, shell_tol=shell_tol)
    spec = grid_spec if isinstance(grid_spec, GridSpec) else GridSpec(*grid_spec)
    order = start_order
    prev = None
    while order <= max_order:
        coeffs = _q_coefficients(p, order, control=control)
        values, _ = kerr.evaluate_q_series(coeffs, spec)
        if prev is not None and np.max(np.abs(values - prev)) < shell_tol * max(
            1.0, np.max(np.abs(values))
        ):
            break
        prev = values
        order *= 2
    else:
        raise NonConvergence(
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


class Phase(Enum):
    """Classical phase of the parametric oscillator by stable-point count."""

    One = 1
    Two = 2
    Three = 3


@dataclass(frozen=True)
class FixedPoint:
    alpha: complex
    stable: bool
    eigenvalues: tuple


@dataclass(frozen=True)
class FixedPointSet:
    points: tuple
    phase: Phase

    @property
    def stable_count(self):
        return sum(1 for pt in self.points if pt.stable)


def _jacobian_eigenvalues(p: ParampParams, alpha):
    # mean-field flow d(alpha)/dt = -kappa1 alpha + eps2 conj(alpha)
    #                               - iU |alpha|^2 alpha
    k1 = p.gamma1 + 1j * p.delta
    pa = -k1 - 2j * p.u * abs(alpha) ** 2
    qa = p.eps2 - 1j * p.u * alpha**2
    root = cmath.sqrt(abs(qa) ** 2 - pa.imag**2)
    return (pa.real + root, pa.real - root)


def classical_fixed_points(p: ParampParams) -> FixedPointSet:
    """Mean-field fixed points and their stability (eps1 = 0, gamma2 = 0).

    Nonzero amplitudes satisfy U|alpha|^2 = -Delta +- sqrt(|eps2|^2 -
    gamma1^2); phases follow in closed form from exp(-2i phi) =
    (gamma1 + i(Delta + U rho^2))/eps2.
    """
    if p.eps1 != 0:
        raise DomainError("mean-field classifier defined for eps1 = 0 only")
    if p.gamma2 != 0:
        raise DomainError("mean-field classifier defined for gamma2 = 0 only")
    if p.u == 0:
        raise DomainError("U must be nonzero for the mean-field amplitudes")
    points = []
    ev0 = _jacobian_eigenvalues(p, 0j)
    points.append(
        FixedPoint(alpha=0j, stable=all(e.real < 0 for e in ev0), eigenvalues=ev0)
    )
    disc = abs(p.eps2) ** 2 - p.gamma1**2
    if disc > 0 and p.eps2 != 0:
        root = math.sqrt(disc)
        for sign in (+1.0, -1.0):
            rho2 = (-p.delta + sign * root) / p.u
            if rho2 <= 0:
                continue
            phase = (
                -cmath.log((p.gamma1 + 1j * (p.delta + p.u * rho2)) / p.eps2) / 2j
            )
            alpha = math.sqrt(rho2) * cmath.exp(1j * phase.real)
            for a in (alpha, -alpha):
                ev = _jacobian_eigenvalues(p, a)
                points.append(
                    FixedPoint(
                        alpha=a,
                        stable=all(e.real < 0 for e in ev),
                        eigenvalues=ev,
                    )
                )
    stable = sum(1 for pt in points if pt.stable)
    if not 1 <= stable <= 3:
        raise DegenerateState(f"unexpected stable-point count {stable}")
    return FixedPointSet(points=tuple(points), phase=Phase(stable))


def min_quadrature_uncertainty(p: ParampParams, control=None) -> dict:
    """Minimum quadrature uncertainty and the optimal angle.

    DX_min = min_theta Var(X_theta) = <c^dag c> - |<cc>| + 1/2 for
    X_theta = (c e^{-i theta} + c^dag e^{i theta})/sqrt(2), reached at
    theta* = (pi - arg<cc>)/2.  Vacuum gives 0.5; the ideal parametric
    amplifier at threshold gives the intracavity limit 0.25.  No mean
    subtraction is applied, matching the paper's usage (it only differs
    when eps1 != 0).
    """
    nbar = moment(p, 1, 1, control=control).real
    cc = moment(p, 0, 2, control=control)
    return {
        "value": nbar - abs(cc) + 0.5,
        "theta_star": (math.pi - cmath.phase(cc)) / 2.0 if cc != 0 else math.pi / 2.0,
    }


@dataclass(frozen=True)
class CatMetrics:
    peak_positions: tuple
    peak_value: float
    bridge_value: float
    bridge_ratio: float
    mean_photons: float


def cat_metrics(p: ParampParams, grid_spec, control=None, n_samples=201) -> CatMetrics:
    """Bimodality metrics of the steady-state Q-function.

    Locates the two dominant Q maxima and samples Q along the straight
    segment between them; ``bridge_value`` is the minimum found there.  Two
    coherent states always overlap somewhere on that segment, so
    ``bridge_ratio`` reports only the distortion-induced excess: the
    two-Gaussian (ideal coherent-state pair) contribution at the bridge
    point is subtracted before normalizing by the smaller peak.
    """
    q = qfunction(p, grid_spec, control=control)
    maxima = q.local_maxima()
    if len(maxima) < 2:
        raise DegenerateState("Q-function is not bimodal on this grid")
    maxima.sort(key=lambda ij: q.values[ij], reverse=True)
    (i1, j1), (i2, j2) = maxima[0], maxima[1]
    if abs(i1 - i2) < 2 and abs(j1 - j2) < 2:
        raise DegenerateState("Q maxima not separated by at least two grid cells")
    xs, ys = q.x_axis, q.y_axis
    a1 = complex(xs[i1], ys[j1])
    a2 = complex(xs[i2], ys[j2])
    # bilinear interpolation of Q along the inter-peak segment
    ts = np.linspace(0.0, 1.0, n_samples)
    px = xs[i1] + ts * (xs[i2] - xs[i1])
    py = ys[j1] + ts * (ys[j2] - ys[j1])
    dx, dy = (xs[1] - xs[0]), (ys[1] - ys[0])
    fi = np.clip((px - xs[0]) / dx, 0, len(xs) - 1 - 1e-9)
    fj = np.clip((py - ys[0]) / dy, 0, len(ys) - 1 - 1e-9)
    i0 = fi.astype(int)
    j0 = fj.astype(int)
    wi = fi - i0
    wj = fj - j0
    v = (
        q.values[i0, j0] * (1 - wi) * (1 - wj)
        + q.values[i0 + 1, j0] * wi * (1 - wj)
        + q.values[i0, j0 + 1] * (1 - wi) * wj
        + q.values[i0 + 1, j0 + 1] * wi * wj
    )
    kmin = int(np.argmin(v))
    bridge = float(v[kmin])
    s_min = complex(px[kmin], py[kmin])
    peak = float(min(q.values[i1, j1], q.values[i2, j2]))
    baseline = float(
        q.values[i1, j1] * math.exp(-abs(s_min - a1) ** 2)
        + q.values[i2, j2] * math.exp(-abs(s_min - a2) ** 2)
    )
    return CatMetrics(
        peak_positions=(a1, a2),
        peak_value=peak,
        bridge_value=bridge,
        bridge_ratio=max(bridge - baseline, 0.0) / peak,
        mean_photons=moment(p, 1, 1, control=control).real,
    )
