"""Exact q-expansions of eta quotients.

Exponents are stored in units of 1/24: a QSeries is q^(val24/24) times an
integer-step power series, known up to (but excluding) q^(prec24/24).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .kernels import series_mul

__all__ = [
    "EtaQuotient",
    "QSeries",
    "TruncationError",
    "expand",
    "ligozat_check",
    "LigozatReport",
    "X_QUOTIENT",
    "F_QUOTIENT",
    "xy_series",
    "weierstrass_residual_series",
    "verify_weierstrass_identity",
    "IdentityCheck",
    "STURM_BOUND",
]

# (7/12) [SL2(Z) : Gamma_0(243)] = (7/12) * 324
STURM_BOUND = 189


class TruncationError(ValueError):
    pass


@dataclass(frozen=True)
class EtaQuotient:
    """prod eta(d z)^r_d on Gamma_0(level)."""

    exponents: tuple[tuple[int, int], ...]
    level: int

    def __init__(self, exponents, level: int):
        items = tuple(sorted((int(d), int(r)) for d, r in dict(exponents).items() if r))
        for d, _ in items:
            if d <= 0 or level % d:
                raise ValueError(f"{d} does not divide the level {level}")
        object.__setattr__(self, "exponents", items)
        object.__setattr__(self, "level", level)

    @property
    def weight(self) -> Fraction:
        return Fraction(sum(r for _, r in self.exponents), 2)

    @property
    def val24(self) -> int:
        return sum(d * r for d, r in self.exponents)

    def __mul__(self, other: "EtaQuotient") -> "EtaQuotient":
        ex = dict(self.exponents)
        for d, r in other.exponents:
            ex[d] = ex.get(d, 0) + r
        return EtaQuotient(ex, math.lcm(self.level, other.level))

    def __pow__(self, k: int) -> "EtaQuotient":
        return EtaQuotient({d: r * k for d, r in self.exponents}, self.level)

    def __str__(self):
        return " ".join(f"eta({d}z)^{r}" for d, r in self.exponents) or "1"


X_QUOTIENT = EtaQuotient({9: 1, 27: 1, 3: -1, 81: -1}, 243)
F_QUOTIENT = EtaQuotient({27: 1, 3: -1}, 81)


class QSeries:
    __slots__ = ("val24", "coeffs", "prec24")

    def __init__(self, val24: int, coeffs, prec24: int):
        coeffs = list(coeffs)
        nterms = max(0, -(-(prec24 - val24) // 24))
        coeffs = coeffs[:nterms] + [0] * (nterms - len(coeffs))
        # strip leading zeros so that the valuation is honest
        k = 0
        while k < len(coeffs) and coeffs[k] == 0:
            k += 1
        if k == len(coeffs):
            val24 = prec24
            coeffs = []
        elif k:
            val24 += 24 * k
            coeffs = coeffs[k:]
        self.val24 = val24
        self.coeffs = coeffs
        self.prec24 = prec24

    # -- views ---------------------------------------------------------------

    @property
    def valuation(self) -> Fraction:
        return Fraction(self.val24, 24)

    @property
    def order(self) -> Fraction:
        return Fraction(self.prec24, 24)

    def is_zero(self) -> bool:
        return not self.coeffs

    def terms(self):
        """(exponent, coefficient) pairs with nonzero coefficient."""
        for k, c in enumerate(self.coeffs):
            if c:
                yield Fraction(self.val24 + 24 * k, 24), c

    def coefficient(self, exponent) -> int | Fraction:
        e24 = Fraction(exponent) * 24
        if e24.denominator != 1 or e24 >= self.prec24:
            raise TruncationError(f"q^{exponent} is beyond the known range")
        k, rem = divmod(int(e24) - self.val24, 24)
        if rem or k < 0 or k >= len(self.coeffs):
            return 0
        return self.coeffs[k]

    def leading(self):
        if not self.coeffs:
            raise ZeroDivisionError("series is zero to the known precision")
        return self.coeffs[0]

    def max_abs(self):
        return max((abs(c) for c in self.coeffs), default=0)

    def dump(self) -> str:
        """One line per coefficient: 'numerator/24<TAB>coefficient'."""
        return "\n".join(f"{self.val24 + 24 * k}/24\t{c}" for k, c in enumerate(self.coeffs)) + "\n"

    def evaluate(self, tau, mp):
        """Value of the truncated series at tau (complex, mpmath context mp)."""
        q = mp.expj(2 * mp.pi * tau)
        total = mp.mpc(0)
        for c in reversed(self.coeffs):
            total = total * q + c
        return total * mp.expj(2 * mp.pi * tau * self.val24 / 24)

    # -- arithmetic --------------------------------------------------------

    def _align(self, other: "QSeries"):
        if (self.val24 - other.val24) % 24:
            raise ValueError("series exponents differ by a non-integer")

    def __add__(self, other):
        if isinstance(other, (int, Fraction)):
            other = QSeries.constant(other, self.prec24)
        self._align(other)
        val = min(self.val24, other.val24)
        prec = min(self.prec24, other.prec24)
        n = max(0, -(-(prec - val) // 24))
        out = [0] * n
        for s in (self, other):
            off = (s.val24 - val) // 24
            for k, c in enumerate(s.coeffs):
                if off + k < n:
                    out[off + k] += c
        return QSeries(val, out, prec)

    __radd__ = __add__

    def __neg__(self):
        return QSeries(self.val24, [-c for c in self.coeffs], self.prec24)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return QSeries(self.val24, [c * other for c in self.coeffs], self.prec24)
        if self.is_zero() or other.is_zero():
            return QSeries(self.val24 + other.val24, [], min(self.val24 + other.prec24, other.val24 + self.prec24))
        val = self.val24 + other.val24
        prec = min(self.val24 + other.prec24, other.val24 + self.prec24)
        n = max(0, -(-(prec - val) // 24))
        if all(isinstance(c, int) for c in self.coeffs) and all(isinstance(c, int) for c in other.coeffs):
            out = series_mul(self.coeffs, other.coeffs, n)
        else:
            out = [0] * n
            for i, a in enumerate(self.coeffs[:n]):
                if a:
                    for j, b in enumerate(other.coeffs[: n - i]):
                        out[i + j] += a * b
        return QSeries(val, out, prec)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        result = None
        base = self
        while k:
            if k & 1:
                result = base if result is None else result * base
            k >>= 1
            if k:
                base = base * base
        return result if result is not None else QSeries.constant(1, self.prec24 - self.val24)

    def inverse(self) -> "QSeries":
        lead = self.leading()
        n = len(self.coeffs)
        exact_int = lead in (1, -1) and all(isinstance(c, int) for c in self.coeffs)
        inv_lead = lead if exact_int else Fraction(1) / lead
        out = [0] * n
        for k in range(n):
            s = 1 if k == 0 else 0
            for j in range(1, k + 1):
                s -= self.coeffs[j] * out[k - j]
            out[k] = s * inv_lead
        # relative precision is preserved
        return QSeries(-self.val24, out, -self.val24 + (self.prec24 - self.val24))

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return QSeries(self.val24, [Fraction(c) / other for c in self.coeffs], self.prec24)
        return self * other.inverse()

    @classmethod
    def constant(cls, c, prec24: int) -> "QSeries":
        return cls(0, [c], prec24)

    def __repr__(self):
        head = ", ".join(f"{c}q^{e}" for e, c in list(self.terms())[:4])
        return f"QSeries({head}, ... + O(q^{self.order}))"


# ---------------------------------------------------------------------------
# expansion


def _euler_product(nterms: int) -> list[int]:
    """prod (1 - q^n) to nterms coefficients, by the pentagonal number theorem."""
    out = [0] * nterms
    k = 0
    while True:
        progressed = False
        for kk in ((k,) if k == 0 else (k, -k)):
            e = kk * (3 * kk - 1) // 2
            if e < nterms:
                out[e] += -1 if kk % 2 else 1
                progressed = True
        if not progressed:
            break
        k += 1
    return out


def _eta_power_series(d: int, r: int, nterms: int) -> list[int]:
    """prod (1 - q^{dn})^r to nterms coefficients (integer exponents of q)."""
    base = _euler_product(-(-nterms // d) + 1)
    spread = [0] * nterms
    for k, c in enumerate(base):
        if k * d < nterms:
            spread[k * d] = c
    s = QSeries(0, spread, 24 * nterms)
    if r < 0:
        s = s.inverse()
        r = -r
    out = s ** r
    coeffs = out.coeffs + [0] * (nterms - len(out.coeffs))
    return coeffs[:nterms]


def expand(eq: EtaQuotient, order) -> QSeries:
    """Laurent expansion of the eta quotient, exact for exponents < order."""
    order24 = Fraction(order) * 24
    if order24.denominator != 1:
        raise ValueError("order must be a multiple of 1/24")
    order24 = int(order24)
    val24 = eq.val24
    if order24 <= val24:
        raise TruncationError("order does not exceed the valuation")
    nterms = -(-(order24 - val24) // 24)
    result = QSeries(val24, [1], val24 + 24 * nterms)
    for d, r in eq.exponents:
        result = result * QSeries(0, _eta_power_series(d, r, nterms), 24 * nterms)
    result = QSeries(result.val24, result.coeffs, order24)
    if not all(isinstance(c, int) for c in result.coeffs):
        raise AssertionError("eta quotient expansion produced non-integer coefficients")
    return result


# ---------------------------------------------------------------------------
# Ligozat


@dataclass(frozen=True)
class LigozatReport:
    weight_zero: bool
    sum_d_r: bool
    sum_n_over_d_r: bool
    square_product: bool

    @property
    def is_function_on_gamma0(self) -> bool:
        return self.weight_zero and self.sum_d_r and self.sum_n_over_d_r and self.square_product

    def details(self) -> dict:
        return {
            "weight zero": self.weight_zero,
            "sum d r_d = 0 mod 24": self.sum_d_r,
            "sum (N/d) r_d = 0 mod 24": self.sum_n_over_d_r,
            "prod d^r_d is a rational square": self.square_product,
        }


def _is_rational_square(x: Fraction) -> bool:
    if x < 0:
        return False
    return all(math.isqrt(v) ** 2 == v for v in (x.numerator, x.denominator))


def ligozat_check(eq: EtaQuotient, level: int | None = None) -> LigozatReport:
    """The sufficient conditions for an eta quotient to be a function on X_0(N)."""
    N = eq.level if level is None else level
    prod = Fraction(1)
    for d, r in eq.exponents:
        prod *= Fraction(d) ** r
    return LigozatReport(
        weight_zero=sum(r for _, r in eq.exponents) == 0,
        sum_d_r=sum(d * r for d, r in eq.exponents) % 24 == 0,
        sum_n_over_d_r=sum((N // d) * r for d, r in eq.exponents) % 24 == 0,
        square_product=_is_rational_square(prod),
    )


# ---------------------------------------------------------------------------
# the parametrization and its equation


def _ab_series(order):
    """A = eta9^4 + 9 eta9 eta81^3 and B = eta27^4 - 3 eta9 eta81^3."""

    def q(spec):
        return expand(EtaQuotient(spec, 243), order)

    t = q({9: 1, 81: 3})
    return q({9: 4}) + t * 9, q({27: 4}) - t * 3


def xy_series(order) -> tuple[QSeries, QSeries]:
    """q-expansions of x and y, known for exponents below `order`."""
    x = expand(X_QUOTIENT, order)
    # y has valuation -3 and B valuation 9/2: expand A, B far enough
    A, B = _ab_series(Fraction(order) + Fraction(15, 2))
    y = -(A / B) - 2
    y = QSeries(y.val24, y.coeffs, min(y.prec24, int(Fraction(order) * 24)))
    return x, y


def weierstrass_residual_series(order, x_quotient: EtaQuotient = X_QUOTIENT) -> QSeries:
    """den^3 (A^2 + 3AB + 3B^2) - num^3 B^2 where x = num/den as eta products.

    For the true x this is eta3^3 eta81^3 (A^2 + 3AB + 3B^2) - eta9^3 eta27^3 B^2,
    a holomorphic form of weight 7 that vanishes exactly when y^2 + y = x^3 - 1.
    """
    A, B = _ab_series(order)
    num = EtaQuotient({d: 3 * r for d, r in x_quotient.exponents if r > 0}, x_quotient.level)
    den = EtaQuotient({d: -3 * r for d, r in x_quotient.exponents if r < 0}, x_quotient.level)
    left = expand(den, order)
    right = expand(num, order)
    return left * (A * A + A * B * 3 + B * B * 3) - right * (B * B)


@dataclass(frozen=True)
class IdentityCheck:
    residual: int
    order: Fraction
    sturm_bound: int
    certified: bool

    def __bool__(self):
        return self.residual == 0

    @property
    def note(self) -> str:
        if self.residual:
            return "identity fails"
        if not self.certified:
            return "zero on the computed range, below certification bound"
        return "certified"


def verify_weierstrass_identity(order=250, x_quotient: EtaQuotient = X_QUOTIENT) -> IdentityCheck:
    """Largest coefficient of the cleared-denominator form of y^2 + y - x^3 + 1 below q^order.

    The form has weight 7 on Gamma_0(243), so vanishing of the coefficients
    up to the Sturm bound proves the identity.
    """
    order = Fraction(order)
    if order <= Fraction(27, 2):
        raise TruncationError("order must exceed the valuation 27/2 of the weight 7 form")
    res = weierstrass_residual_series(order, x_quotient)
    return IdentityCheck(res.max_abs(), order, STURM_BOUND, order > STURM_BOUND)
