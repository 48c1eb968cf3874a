"""
Truncated Series Service
========================

Handles formal power series arithmetic at a fixed truncation order:
- Ring operations (add, mul, inverse, integer powers)
- log / exp, composition, derivative, integral
- Compositional reversion
- Lagrange inversion coefficient extraction for σ(t)

Coefficients may be floats, mpmath.mpf, fractions.Fraction or LaurentPoly;
every routine only uses ring arithmetic plus division by integers, so exact
rational inputs stay exact.
"""

import math
from fractions import Fraction
from numbers import Number
from typing import Dict, List, Optional, Sequence

import mpmath
import numpy as np

from app.config import settings
from app.exceptions import DomainError, SingularReversion
from app.schemas.series import SigmaCoefficients
from utils.logger import init_logger

# Configure logger
logger = init_logger("SeriesService")


def _div_int(value, k: int):
    """Divide a ring element by a positive integer without leaving Q."""
    if isinstance(value, (int, Fraction)) and not isinstance(value, bool):
        return Fraction(value) / k
    return value / k


class LaurentPoly:
    """
    Finitely supported Laurent polynomial in n.

    Fields:
        terms (Dict[int, coefficient]): n-exponent -> coefficient, zeros dropped.
    """

    __slots__ = ("terms",)

    def __init__(self, terms: Optional[Dict[int, object]] = None):
        self.terms = {k: v for k, v in (terms or {}).items() if v != 0}

    @classmethod
    def monomial(cls, exponent: int, coeff=1) -> "LaurentPoly":
        return cls({exponent: coeff})

    def coeff(self, exponent: int):
        return self.terms.get(exponent, 0)

    def support(self) -> List[int]:
        return sorted(self.terms)

    def evaluate(self, n: float) -> float:
        return sum(c * n ** k for k, c in self.terms.items())

    def _coerce(self, other) -> "LaurentPoly":
        if isinstance(other, LaurentPoly):
            return other
        if isinstance(other, Number) or isinstance(other, mpmath.mpf):
            return LaurentPoly({0: other})
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        terms = dict(self.terms)
        for k, v in other.terms.items():
            terms[k] = terms.get(k, 0) + v
        return LaurentPoly(terms)

    __radd__ = __add__

    def __neg__(self):
        return LaurentPoly({k: -v for k, v in self.terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, LaurentPoly):
            if isinstance(other, Number) or isinstance(other, mpmath.mpf):
                return LaurentPoly({k: v * other for k, v in self.terms.items()})
            return NotImplemented
        terms: Dict[int, object] = {}
        for k1, v1 in self.terms.items():
            for k2, v2 in other.terms.items():
                terms[k1 + k2] = terms.get(k1 + k2, 0) + v1 * v2
        return LaurentPoly(terms)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, LaurentPoly):
            if set(other.terms) != {0}:
                raise DomainError("LaurentPoly division only by constants")
            other = other.terms[0]
        if isinstance(other, int):
            return LaurentPoly({k: _div_int(v, other) for k, v in self.terms.items()})
        return LaurentPoly({k: v / other for k, v in self.terms.items()})

    def __eq__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return False
        return self.terms == other.terms

    def __ne__(self, other):
        return not self == other

    __hash__ = None

    def __repr__(self):
        body = " + ".join(f"{v}*n^{k}" for k, v in sorted(self.terms.items(), reverse=True))
        return f"LaurentPoly({body or '0'})"


class TruncatedSeries:
    """
    Power series c_0 + c_1 t + ... + c_N t^N, arithmetic closed at order N.

    Fields:
        coeffs (List): coefficients c_0..c_N.
        order (int): truncation order N.
    """

    __slots__ = ("coeffs", "order")

    def __init__(self, coeffs: Sequence, order: Optional[int] = None):
        coeffs = list(coeffs)
        if not coeffs:
            raise DomainError("TruncatedSeries needs at least one coefficient")
        order = len(coeffs) - 1 if order is None else order
        zero = coeffs[0] * 0
        coeffs = coeffs[: order + 1] + [zero] * (order + 1 - len(coeffs))
        self.coeffs = coeffs
        self.order = order

    # Construction helpers

    @classmethod
    def variable(cls, order: int, one=1.0) -> "TruncatedSeries":
        zero = one * 0
        return cls([zero, one] + [zero] * (order - 1), order)

    @classmethod
    def constant(cls, value, order: int) -> "TruncatedSeries":
        return cls([value] + [value * 0] * order, order)

    @property
    def zero(self):
        return self.coeffs[0] * 0

    @property
    def one(self):
        return self.zero + 1

    def __getitem__(self, k: int):
        return self.coeffs[k]

    def __len__(self):
        return self.order + 1

    def __iter__(self):
        return iter(self.coeffs)

    def __repr__(self):
        return f"TruncatedSeries(order={self.order}, coeffs={self.coeffs[:6]}{'...' if self.order > 5 else ''})"

    def _common(self, other: "TruncatedSeries") -> int:
        return min(self.order, other.order)

    def truncate(self, order: int) -> "TruncatedSeries":
        return TruncatedSeries(self.coeffs[: order + 1], order)

    def valuation(self) -> int:
        for k, c in enumerate(self.coeffs):
            if c != 0:
                return k
        return self.order + 1

    # Ring operations

    def __add__(self, other):
        if not isinstance(other, TruncatedSeries):
            coeffs = list(self.coeffs)
            coeffs[0] = coeffs[0] + other
            return TruncatedSeries(coeffs, self.order)
        n = self._common(other)
        return TruncatedSeries([self.coeffs[k] + other.coeffs[k] for k in range(n + 1)], n)

    __radd__ = __add__

    def __neg__(self):
        return TruncatedSeries([-c for c in self.coeffs], self.order)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, TruncatedSeries):
            return TruncatedSeries([c * other for c in self.coeffs], self.order)
        n = self._common(other)
        a, b = self.coeffs, other.coeffs
        out = []
        for k in range(n + 1):
            acc = a[0] * b[k]
            for j in range(1, k + 1):
                if a[j] != 0:
                    acc = acc + a[j] * b[k - j]
            out.append(acc)
        return TruncatedSeries(out, n)

    __rmul__ = __mul__

    def scale(self, factor) -> "TruncatedSeries":
        return TruncatedSeries([c * factor for c in self.coeffs], self.order)

    def div_int(self, k: int) -> "TruncatedSeries":
        return TruncatedSeries([_div_int(c, k) for c in self.coeffs], self.order)

    def inverse(self) -> "TruncatedSeries":
        """Multiplicative inverse; requires an invertible constant term."""
        c0 = self.coeffs[0]
        if c0 == 0:
            raise DomainError("series inverse requires c0 != 0")
        inv0 = self.one / c0 if not isinstance(c0, int) else Fraction(1, c0)
        out = [inv0]
        for k in range(1, self.order + 1):
            acc = self.zero
            for j in range(1, k + 1):
                acc = acc + self.coeffs[j] * out[k - j]
            out.append(-acc * inv0)
        return TruncatedSeries(out, self.order)

    def __truediv__(self, other):
        if isinstance(other, TruncatedSeries):
            return self * other.inverse()
        if isinstance(other, int):
            return self.div_int(other)
        return TruncatedSeries([c / other for c in self.coeffs], self.order)

    def __pow__(self, k: int) -> "TruncatedSeries":
        if k < 0:
            return self.inverse() ** (-k)
        result = TruncatedSeries.constant(self.one, self.order)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base if k > 1 else base
            k >>= 1
        return result

    # Calculus

    def derivative(self) -> "TruncatedSeries":
        coeffs = [self.coeffs[k] * k for k in range(1, self.order + 1)] or [self.zero]
        return TruncatedSeries(coeffs, max(self.order - 1, 0))

    def integral(self) -> "TruncatedSeries":
        """Antiderivative vanishing at 0, truncated back to the same order."""
        coeffs = [self.zero] + [_div_int(self.coeffs[k], k + 1) for k in range(self.order)]
        return TruncatedSeries(coeffs, self.order)

    def evaluate(self, x):
        """Horner evaluation at a point."""
        acc = self.coeffs[-1]
        for c in reversed(self.coeffs[:-1]):
            acc = acc * x + c
        return acc

    def log(self) -> "TruncatedSeries":
        """
        Series logarithm via L_k = (k s_k - Σ_{j<k} j L_j s_{k-j}) / (k s_0).

        Raises:
            DomainError: c0 not positive, or an exact non-unit constant term.
        """
        s = self.coeffs
        c0 = s[0]
        if c0 == 1:
            log0 = self.zero
        elif isinstance(c0, (Fraction, int, LaurentPoly)):
            raise DomainError("exact series log requires c0 == 1")
        elif isinstance(c0, mpmath.mpf):
            if c0 <= 0:
                raise DomainError("series log requires c0 > 0")
            log0 = mpmath.log(c0)
        else:
            if not c0 > 0:
                raise DomainError("series log requires c0 > 0")
            log0 = float(np.log(c0))
        out = [log0]
        for k in range(1, self.order + 1):
            acc = s[k] * k
            for j in range(1, k):
                acc = acc - out[j] * s[k - j] * j
            out.append(_div_int(acc, k) if c0 == 1 else acc / (c0 * k))
        return TruncatedSeries(out, self.order)

    def exp(self) -> "TruncatedSeries":
        """Series exponential; requires c0 == 0."""
        if self.coeffs[0] != 0:
            raise DomainError("series exp requires c0 == 0")
        out = [self.one]
        for n in range(1, self.order + 1):
            acc = self.zero
            for k in range(1, n + 1):
                acc = acc + self.coeffs[k] * out[n - k] * k
            out.append(_div_int(acc, n))
        return TruncatedSeries(out, self.order)

    def compose(self, inner: "TruncatedSeries") -> "TruncatedSeries":
        """self(inner(t)) by Horner; requires inner.c0 == 0."""
        if inner.coeffs[0] != 0:
            raise DomainError("compose requires inner series with c0 == 0")
        n = self._common(inner)
        inner = inner.truncate(n)
        acc = TruncatedSeries.constant(self.coeffs[n], n)
        for k in range(n - 1, -1, -1):
            acc = acc * inner + self.coeffs[k]
        return acc

    def revert(self) -> "TruncatedSeries":
        """
        Compositional inverse g with self(g(t)) = t + O(t^{N+1}).

        Flow:
        1. g_1 = 1/f_1
        2. For n >= 2, [t^n] Σ_k f_k g^k = 0 fixes g_n; the powers g^k = t^k h^k
           (h = g/t) are tabulated with the J.C.P. Miller recurrence, so each
           new coefficient only reads entries that are already known.

        Raises:
            SingularReversion: c0 != 0 or c1 == 0
        """
        f = self.coeffs
        N = self.order
        if f[0] != 0:
            raise SingularReversion("reversion requires c0 == 0")
        if N < 1 or f[1] == 0:
            raise SingularReversion("reversion requires c1 != 0")
        one = self.one
        g1 = one / f[1] if not isinstance(f[1], int) else Fraction(1, f[1])
        g = [self.zero, g1] + [self.zero] * (N - 1)
        # table[k][m] = [t^m] h^k
        table: Dict[int, List] = {}
        for n in range(2, N + 1):
            table[n] = [g1 ** n]
            acc = self.zero
            for k in range(2, n + 1):
                row = table[k]
                m = n - k
                while len(row) <= m:
                    mm = len(row)
                    s = self.zero
                    for j in range(1, mm + 1):
                        s = s + g[j + 1] * row[mm - j] * ((k + 1) * j - mm)
                    row.append(s / (g1 * mm))
                if f[k] != 0:
                    acc = acc + f[k] * row[m]
            g[n] = -acc / f[1]
        return TruncatedSeries(g, N)

    def to_float(self) -> List[float]:
        return [float(c) for c in self.coeffs]


def lagrange_coefficients(f: TruncatedSeries) -> List:
    """
    Taylor coefficients c_V of the inverse of f by Lagrange inversion,
    c_V = (1/V) [σ^{V-1}] (σ/f(σ))^V, for V = 1..N.
    """
    if f[0] != 0 or f[1] == 0:
        raise SingularReversion("Lagrange inversion requires c0 == 0 and c1 != 0")
    N = f.order
    shifted = TruncatedSeries(f.coeffs[1:] + [f.zero], N)
    h = shifted.inverse()
    out = []
    power = h
    for V in range(1, N + 1):
        out.append(_div_int(power[V - 1], V))
        if V < N:
            power = power * h
    return out


class SeriesService:
    """Service building the σ-equation series G(σ) and its inversion."""

    def __init__(self, extended_dps: Optional[int] = None):
        """
        Initialize service.

        Args:
            extended_dps (Optional[int]): mpmath precision for extended mode
        """
        self.extended_dps = extended_dps or settings.EXTENDED_DPS

    @staticmethod
    def _scalars(tau, h, exact: bool, extended: bool):
        if exact:
            tau = Fraction(tau)
            q = Fraction(h) if h is not None else Fraction(1)
            return tau, q, (q + 1 / q) / 2, Fraction(1)
        if extended:
            tau = mpmath.mpf(tau)
            q = mpmath.exp(mpmath.mpf(h))
            return tau, q, mpmath.cosh(mpmath.mpf(h)), mpmath.mpf(1)
        return float(tau), math.exp(h), math.cosh(h), 1.0

    def g_series(self, tau, h, order: int, exact: bool = False, extended: bool = False) -> TruncatedSeries:
        """
        The map σ -> t = G(σ) = 𝔍(σ; τ, 0, q) + ... as a series in σ.

        G(σ) = -(τ²/9)σ(σ²-3) - (1/3)σ/(1+σ)² + (2/3)σ²(cosh H - 1)/(1-σ²)²
        with the poles expanded geometrically.

        Args:
            tau: coupling τ (Fraction when exact)
            h: magnetic field H, or q = e^H itself when exact
            order (int): truncation order
            exact (bool): rational coefficients; `h` is then q
            extended (bool): mpmath coefficients
        """
        tau, _, cosh_h, one = self._scalars(tau, h, exact, extended)
        zero = one * 0
        coeffs = [zero] * (order + 1)
        tau2 = tau * tau
        if order >= 1:
            coeffs[1] = coeffs[1] + tau2 / 3
        if order >= 3:
            coeffs[3] = coeffs[3] - tau2 / 9
        # -(1/3) Σ (-1)^{k-1} k σ^k
        for k in range(1, order + 1):
            coeffs[k] = coeffs[k] - one * ((-1) ** (k - 1) * k) / 3
        # (2/3)(C-1) Σ j σ^{2j}
        field = (cosh_h - 1) * 2 / 3
        for j in range(1, order // 2 + 1):
            coeffs[2 * j] = coeffs[2 * j] + field * j
        return TruncatedSeries(coeffs, order)

    def sigma_series(self, tau, h, order: int, exact: bool = False, extended: bool = False) -> TruncatedSeries:
        """σ(t) as a truncated series, by reversion of t = G(σ)."""
        return self.g_series(tau, h, order, exact=exact, extended=extended).revert()

    def lagrange_sigma_coeffs(
            self,
            tau: float,
            h: float,
            order: Optional[int] = None,
            extended: bool = False,
            exact: bool = False
        ) -> SigmaCoefficients:
        """
        σ_V = V! [t^V] σ(t) by reversion and by Lagrange extraction.

        Flow:
        1. Build G(σ) to the requested order
        2. Revert it (power-table reversion)
        3. Extract (1/V)[σ^{V-1}](σ/G)^V independently
        4. Compare the two routes

        Args:
            tau (float): 0 < τ < 1
            h (float): magnetic field H (q when exact)
            order (Optional[int]): number of coefficients, default settings.SERIES_ORDER
            extended (bool): run in mpmath at settings.EXTENDED_DPS
            exact (bool): rational arithmetic

        Returns:
            SigmaCoefficients: both coefficient lists and their discrepancy

        Raises:
            DomainError: τ outside (0, 1)
        """
        order = order or settings.SERIES_ORDER
        if not 0 < float(tau) < 1:
            raise DomainError(f"tau must lie in (0, 1), got {tau}")
        with mpmath.mp.workdps(self.extended_dps):
            g = self.g_series(tau, h, order, exact=exact, extended=extended)
            reverted = g.revert().coeffs[1:]
            lagrange = lagrange_coefficients(g)
            worst = 0.0
            for x, y in zip(reverted, lagrange):
                scale = max(abs(x), abs(y))
                if scale:
                    worst = max(worst, float(abs(x - y) / scale))
            factorials = [math.factorial(V) for V in range(1, order + 1)]
            by_reversion = [float(c * f) for c, f in zip(reverted, factorials)]
            by_lagrange = [float(c * f) for c, f in zip(lagrange, factorials)]
        if worst > 1e-9:
            logger.warning(f"Reversion and Lagrange extraction disagree: max rel diff {worst:.3e} at tau={tau}, H={h}")
        logger.info(f"Computed {order} sigma coefficients at tau={tau}, H={h}")
        return SigmaCoefficients(
            tau=float(tau),
            h=float(h) if not exact else float(np.log(float(h))),
            order=order,
            by_reversion=by_reversion,
            by_lagrange=by_lagrange,
            max_relative_discrepancy=worst,
        )

    def taylor_sigma_coeffs(self, tau, h, order: int, extended: bool = True) -> List:
        """Raw Taylor coefficients c_V = [t^V] σ(t) (mpf when extended)."""
        with mpmath.mp.workdps(self.extended_dps):
            g = self.g_series(tau, h, order, extended=extended)
            return lagrange_coefficients(g)

