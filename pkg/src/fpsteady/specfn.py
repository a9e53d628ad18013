"""Complex special functions and overflow-safe series machinery.

Everything here is a pure function of its inputs.  The two hypergeometric
routines are the workhorses for all the analytic steady-state formulas:
``hyp0f2_log_ratio`` evaluates log-ratios of 0F2 values so that the huge
magnitudes reached at strong drive cancel before exponentiation, and
``hyp2f1_terminating`` evaluates the finite 2F1 sums at z=2 with compensated
summation plus an arbitrary-precision fallback when the alternating terms
cancel catastrophically.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import mpmath

from .errors import DomainError, NonConvergence, PoleError

# Tolerance for "is a nonpositive integer" pole detection.
POLE_TOL = 1e-12

# Cancellation indicator (max partial magnitude / result magnitude) above
# which a terminating 2F1 sum is re-done in extended precision.
CANCELLATION_THRESHOLD = 1e6

# Rescale running sums once magnitudes pass this, to keep doubles finite.
_RESCALE_LIMIT = 1e250
_RESCALE_FACTOR = 1e-250


@dataclass
class SeriesControl:
    """Truncation policy for all infinite sums in the package."""

    rel_tol: float = 1e-14
    max_terms: int = 10_000
    use_compensated_sum: bool = True

    def __post_init__(self):
        if self.rel_tol <= 0:
            raise DomainError("rel_tol must be positive")
        if self.max_terms < 1:
            raise DomainError("max_terms must be >= 1")


DEFAULT_CONTROL = SeriesControl()


class KahanSum:
    """Compensated (Kahan) accumulator for complex terms."""

    __slots__ = ("_s", "_c")

    def __init__(self):
        self._s = 0j
        self._c = 0j

    def add(self, term):
        y = term - self._c
        t = self._s + y
        self._c = (t - self._s) - y
        self._s = t

    def scale(self, factor):
        self._s *= factor
        self._c *= factor

    @property
    def value(self):
        return self._s


class LogScaledSum:
    """Accumulator for complex terms given as (mantissa, log_scale) pairs.

    Each term equals mantissa * exp(log_scale); the running sum keeps its own
    offset (largest log seen) so wildly over/underflowing term factors can be
    combined without leaving double range.
    """

    __slots__ = ("_s", "_log")

    def __init__(self):
        self._s = 0j
        self._log = -math.inf

    def add(self, mantissa, log_scale=0.0):
        if mantissa == 0:
            return
        if self._s == 0:
            self._s = complex(mantissa)
            self._log = log_scale
        else:
            d = log_scale - self._log
            if d > 0.0:
                self._s = self._s * math.exp(-d) + mantissa
                self._log = log_scale
            else:
                self._s += mantissa * math.exp(d)
        # Re-anchor the offset to the running sum itself; otherwise _log can
        # ratchet up to the largest term scale ever seen, after which exp(d)
        # underflows to 0 for ordinary terms and they are silently dropped.
        mag = abs(self._s)
        if mag != 0.0 and not 1e-50 < mag < 1e50:
            self._log += math.log(mag)
            self._s /= mag

    @property
    def mantissa(self):
        return self._s

    @property
    def log_scale(self):
        return self._log if self._s != 0 else 0.0

    def log_abs(self):
        """log|sum|, or -inf for an empty/zero sum."""
        if self._s == 0:
            return -math.inf
        return math.log(abs(self._s)) + self._log


def _plain_or_kahan(control):
    if control.use_compensated_sum:
        return KahanSum()

    class _Plain:
        __slots__ = ("value",)

        def __init__(self):
            self.value = 0j

        def add(self, term):
            self.value += term

        def scale(self, factor):
            self.value *= factor

    return _Plain()


def is_nonpositive_integer(z, tol=POLE_TOL):
    z = complex(z)
    nearest = round(z.real)
    return nearest <= 0 and abs(z - nearest) <= tol


# Lanczos approximation, g = 7, 9 coefficients (accurate to ~1e-13 relative
# in the right half-plane).
_LANCZOS_G = 7.0
_LANCZOS_P = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)
_LOG_SQRT_2PI = 0.5 * math.log(2.0 * math.pi)


def _lanczos_log_gamma(z):
    # Valid for Re(z) >= 0.5; principal branch (t stays in the right
    # half-plane and the rational factor never leaves a neighbourhood of 1).
    w = z - 1.0
    x = _LANCZOS_P[0]
    for i, p in enumerate(_LANCZOS_P[1:]):
        x += p / (w + i + 1.0)
    t = w + _LANCZOS_G + 0.5
    return _LOG_SQRT_2PI + (w + 0.5) * cmath.log(t) - t + cmath.log(x)


def log_gamma(z):
    """Principal-branch log Gamma for complex z.

    Values on the negative real axis are the limit from above, matching
    scipy.special.loggamma.
    """
    z = complex(z)
    if is_nonpositive_integer(z):
        raise PoleError(f"log_gamma pole at z={z}")
    if z.real >= 0.5:
        return _lanczos_log_gamma(z)
    # Shift into the right half-plane via log Gamma(z) =
    # log Gamma(z+n) - sum_k Log(z+k).  Each Log is principal, so the sum
    # stays on the principal branch (continuation from the positive reals).
    n = int(math.ceil(0.5 - z.real))
    acc = 0j
    for k in range(n):
        acc += cmath.log(z + k)
    return _lanczos_log_gamma(z + n) - acc


def complex_power(base, expnt):
    """exp(expnt * Log(base)) with the principal log.

    Conjugation identity conj(base**expnt) == conj(base)**conj(expnt) holds
    by construction away from the negative real axis.
    """
    base = complex(base)
    expnt = complex(expnt)
    if base == 0:
        if expnt.imag == 0 and expnt.real > 0:
            return 0j
        raise DomainError("0 may only be raised to a positive real power")
    return cmath.exp(expnt * cmath.log(base))


def hyp0f2_log_ratio(a1, a2, m, n, x, control=None, x_num=None):
    """log[ 0F2(a1+m, a2+n; x_num) / 0F2(a1, a2; x) ].

    Both series are summed term-by-term in lockstep with a shared rescaling
    so that the (potentially enormous) magnitudes cancel in the ratio.
    ``x_num`` defaults to ``x``; the distinct-argument form is needed by the
    P(n) and Q-function formulas whose numerator series carries argument
    x/2 relative to the normalisation.
    """
    control = control or DEFAULT_CONTROL
    a1 = complex(a1)
    a2 = complex(a2)
    if m < 0 or n < 0:
        raise DomainError("m, n must be nonnegative")
    if x < 0:
        raise DomainError("x must be nonnegative")
    if x_num is None:
        x_num = x
    for val in (a1, a2, a1 + m, a2 + n):
        if is_nonpositive_integer(val):
            raise PoleError(f"0F2 lower parameter {val} is a nonpositive integer")
    if m == 0 and n == 0 and x_num == x:
        return 0j
    if x == 0 and x_num == 0:
        return 0j

    b1, b2 = a1 + m, a2 + n
    s_num = _plain_or_kahan(control)
    s_den = _plain_or_kahan(control)
    t_num = 1.0 + 0j
    t_den = 1.0 + 0j
    s_num.add(t_num)
    s_den.add(t_den)
    quiet = 0
    for k in range(control.max_terms):
        t_num = t_num * x_num / ((b1 + k) * (b2 + k) * (k + 1))
        t_den = t_den * x / ((a1 + k) * (a2 + k) * (k + 1))
        s_num.add(t_num)
        s_den.add(t_den)
        mag = max(abs(t_num), abs(t_den), abs(s_num.value), abs(s_den.value))
        if mag > _RESCALE_LIMIT:
            # shared factor cancels in the ratio
            t_num *= _RESCALE_FACTOR
            t_den *= _RESCALE_FACTOR
            s_num.scale(_RESCALE_FACTOR)
            s_den.scale(_RESCALE_FACTOR)
        if (
            abs(t_num) <= control.rel_tol * abs(s_num.value)
            and abs(t_den) <= control.rel_tol * abs(s_den.value)
        ):
            quiet += 1
            if quiet >= 2:
                return cmath.log(s_num.value / s_den.value)
        else:
            quiet = 0
    raise NonConvergence(
        f"0F2 ratio did not converge within {control.max_terms} terms (x={x})"
    )


def hyp2f1_terminating(jneg, b, c, z, control=None, return_indicator=False):
    """Terminating 2F1(-jneg, b; c; z) = sum_{k=0}^{jneg} (-jneg)_k (b)_k / (c)_k z^k / k!.

    Compensated summation throughout.  The cancellation indicator is
    max(|partial sum|) / |result|; when it exceeds CANCELLATION_THRESHOLD the
    sum is redone in extended precision (mpmath) with enough digits to
    absorb the cancellation.
    """
    control = control or DEFAULT_CONTROL
    if jneg < 0:
        raise DomainError("jneg must be nonnegative")
    b = complex(b)
    c = complex(c)
    acc = _plain_or_kahan(control)
    term = 1.0 + 0j
    acc.add(term)
    max_partial = 1.0
    for k in range(jneg):
        denom = c + k
        if abs(denom) <= POLE_TOL:
            raise PoleError(f"2F1 Pochhammer denominator vanishes at (c)_{k + 1}")
        term = term * ((k - jneg) * (b + k)) / (denom * (k + 1)) * z
        acc.add(term)
        max_partial = max(max_partial, abs(acc.value), abs(term))
    result = acc.value
    indicator = max_partial / abs(result) if result != 0 else math.inf
    if indicator > CANCELLATION_THRESHOLD:
        result = _hyp2f1_terminating_mp(jneg, b, c, z, max_partial)
    if return_indicator:
        return result, indicator
    return result


def _hyp2f1_terminating_mp(jneg, b, c, z, max_partial):
    # Digits lost to cancellation ~ log10(max_partial / |result|), and the
    # result magnitude is not known ahead of time; raise the precision until
    # the computed value sits safely above the round-off floor.
    dps = 40 + max(0, int(math.log10(max(max_partial, 1.0))))
    for _ in range(20):
        with mpmath.workdps(dps):
            bm = mpmath.mpc(b)
            cm = mpmath.mpc(c)
            zm = mpmath.mpc(z)
            term = mpmath.mpc(1)
            total = mpmath.mpc(1)
            peak = mpmath.mpf(1)
            for k in range(jneg):
                term = term * ((k - jneg) * (bm + k)) / ((cm + k) * (k + 1)) * zm
                total += term
                peak = max(peak, abs(term), abs(total))
            if total == 0:
                # exact cancellation (binary-exact inputs); not round-off
                return 0j
            noise_floor = peak * mpmath.mpf(10) ** (25 - dps)
            if abs(total) > noise_floor:
                return complex(total)
            lost = int(mpmath.log10(peak / abs(total))) + 1
        dps = max(dps + 50, lost + 40)
    raise NonConvergence("extended-precision 2F1 fallback failed to stabilise")
