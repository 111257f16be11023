"""High precision values of eta and of the modular functions x, y, f, h.

Every evaluation first moves the argument into the standard fundamental
domain of SL2(Z), using eta(tau + 1) = e^{pi i/12} eta(tau) and
eta(-1/tau) = sqrt(-i tau) eta(tau), and only then sums the q-series.
For points of K the reduction is done exactly on CycloNumbers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import mpmath

from .cyclofield import CycloNumber, W
from .modcurve import ProjMatrix

__all__ = [
    "PrecisionContext",
    "PrecisionError",
    "PoleError",
    "UhpPoint",
    "eta",
    "eta_values",
    "phi_point",
    "phi_cusp",
    "eval_x",
    "eval_f",
    "eval_h",
    "product_shift",
    "product_identity_residual",
    "product_constant",
]


class PrecisionError(ArithmeticError):
    """Raised when a numerical result cannot be certified to the requested digits."""


class PoleError(ArithmeticError):
    pass


@dataclass
class PrecisionContext:
    """Working precision: `digits` are promised, `guard` extra digits are carried.

    Each context owns a private mpmath context, so values created under one
    context can be told apart from values of another (``value.context``).
    """

    digits: int = 60
    guard: int = 15
    mp: mpmath.ctx_mp.MPContext = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.digits <= 0 or self.guard <= 0:
            raise ValueError("digits and guard must be positive")
        self.mp = mpmath.MPContext()
        self.mp.dps = self.digits + self.guard

    @property
    def eps(self):
        """Accuracy promised to callers: 10^-(digits)."""
        return self.mp.mpf(10) ** (-self.digits)

    def owns(self, value) -> bool:
        return getattr(value, "context", None) is self.mp

    def check(self, *values):
        for v in values:
            if hasattr(v, "context") and v.context is not self.mp:
                raise ValueError("value belongs to a different PrecisionContext")

    def embed(self, z):
        """Embed an exact CycloNumber (or a number) as a complex value of this context."""
        if isinstance(z, CycloNumber):
            return z.to_complex(self.mp)
        if isinstance(z, Fraction):
            return self.mp.mpc(self.mp.mpf(z.numerator) / z.denominator)
        return self.mp.mpc(z)

    def scaled(self, factor: float) -> "PrecisionContext":
        return PrecisionContext(max(1, int(math.ceil(self.digits * factor))), self.guard)

    # constants
    def omega(self):
        return self.embed(W)

    def root(self, a, n: int):
        """Principal real n-th root of a positive rational."""
        mp = self.mp
        a = Fraction(a)
        return mp.root(mp.mpf(a.numerator) / a.denominator, n)


@dataclass(frozen=True)
class UhpPoint:
    """A point of the upper half plane, exact when it lies in K."""

    exact: CycloNumber | None
    approx: object

    @classmethod
    def of(cls, tau, ctx: PrecisionContext) -> "UhpPoint":
        if isinstance(tau, UhpPoint):
            ctx.check(tau.approx)
            return tau
        if isinstance(tau, CycloNumber):
            if tau.imag_sign() <= 0:
                raise ValueError(f"{tau} is not in the upper half plane")
            return cls(tau, ctx.embed(tau))
        z = ctx.mp.mpc(tau)
        if z.imag <= 0:
            raise ValueError("point is not in the upper half plane")
        return cls(None, z)


# ---------------------------------------------------------------------------
# eta


def _eta_series(z, mp):
    """q^{1/24} sum (-1)^n q^{n(3n-1)/2}, for z with Im z >= sqrt(3)/2."""
    q = mp.expj(2 * mp.pi * z)
    tol = mp.mpf(2) ** (-mp.prec - 10)
    total = mp.mpc(1)
    n = 1
    while True:
        e1 = n * (3 * n - 1) // 2
        e2 = n * (3 * n + 1) // 2
        t1 = q**e1
        t2 = q**e2
        term = t1 + t2
        if n % 2:
            total -= term
        else:
            total += term
        if abs(t1) < tol:
            break
        n += 1
    return mp.expj(2 * mp.pi * z / 24) * total


def _reduce_exact(tau: CycloNumber, mp):
    """Reduce exactly; return (reduced point, multiplier) with eta(tau) = mult * eta(reduced)."""
    mult = mp.mpc(1)
    r = tau
    half = Fraction(1, 2)
    shift = 0  # accumulated translations, folded into one exponential
    while True:
        n = math.floor(r.real_part() + half)
        if n:
            r = r - n
            shift += n
        if r.norm() < 1:
            # eta(r) = sqrt(-i r') eta(r'), r' = -1/r
            mult *= mp.expj(mp.pi * shift / 12)
            shift = 0
            r = CycloNumber(-1) / r
            mult *= mp.sqrt(-1j * r.to_complex(mp))
            continue
        break
    mult *= mp.expj(mp.pi * shift / 12)
    return r, mult


def _reduce_numeric(z, mp):
    mult = mp.mpc(1)
    shift = 0
    while True:
        n = int(mp.floor(z.real + mp.mpf(1) / 2))
        if n:
            z = z - n
            shift += n
        if abs(z) < 1:
            mult *= mp.expj(mp.pi * shift / 12)
            shift = 0
            z = -1 / z
            mult *= mp.sqrt(-1j * z)
            continue
        break
    mult *= mp.expj(mp.pi * shift / 12)
    return z, mult


def eta(tau, ctx: PrecisionContext):
    """Dedekind eta at tau (CycloNumber, UhpPoint or complex)."""
    pt = UhpPoint.of(tau, ctx)
    mp = ctx.mp
    if pt.exact is not None:
        r, mult = _reduce_exact(pt.exact, mp)
        return mult * _eta_series(r.to_complex(mp), mp)
    z, mult = _reduce_numeric(pt.approx, mp)
    return mult * _eta_series(z, mp)


def eta_values(tau, ds, ctx: PrecisionContext) -> dict:
    """{d: eta(d tau)} for the given multipliers d."""
    pt = UhpPoint.of(tau, ctx)
    if pt.exact is not None:
        return {d: eta(pt.exact * d, ctx) for d in ds}
    return {d: eta(pt.approx * d, ctx) for d in ds}


# ---------------------------------------------------------------------------
# the parametrization X_0(243) -> E9


def _xy_from_etas(e, ctx: PrecisionContext):
    mp = ctx.mp
    e3, e9, e27, e81 = e[3], e[9], e[27], e[81]
    x = e9 * e27 / (e3 * e81)
    t = e9 * e81**3
    num = e9**4 + 9 * t
    a, b = e27**4, 3 * t
    den = a - b
    y = -num / den - 2
    scale = max(abs(a), abs(b))
    if scale == 0 or abs(den) < scale * mp.mpf(10) ** (-ctx.guard):
        # the eta formula only selects the root; the curve equation gives the digits
        disc = mp.sqrt(1 + 4 * (x**3 - 1))
        roots = ((-1 + disc) / 2, (-1 - disc) / 2)
        y = min(roots, key=lambda r: abs(r - y))
    return x, y


def eval_x(tau, ctx: PrecisionContext):
    e = eta_values(tau, (3, 9, 27, 81), ctx)
    return e[9] * e[27] / (e[3] * e[81])


def phi_point(tau, ctx: PrecisionContext):
    """Image of tau on E9: y^2 + y = x^3 - 1, as a complex CurvePoint."""
    from .ellcurve import E9, CurvePoint

    pt = UhpPoint.of(tau, ctx)
    x, y = _xy_from_etas(eta_values(pt, (3, 9, 27, 81), ctx), ctx)
    res = abs(y * y + y - x**3 + 1)
    if res > ctx.eps * max(1, abs(x) ** 3):
        raise PrecisionError(f"on-curve residual {mpmath.nstr(res, 5)} exceeds 1e-{ctx.digits}")
    return CurvePoint(E9, x, y)


def _cusp_width(c: int, N: int = 243) -> int:
    return N // math.gcd(c * c, N)


def phi_cusp(r, ctx: PrecisionContext):
    """Value of the parametrization at the cusp r (a rational number).

    Evaluated as the limit of Phi(g(iy)) with g(infinity) = r, at a height y
    where the neighbourhood of the cusp is exhausted to working precision.
    A pole shows up as growth of |x| and is reported as the point at infinity.
    """
    from .ellcurve import E9, CurvePoint
    from .cyclofield import xgcd

    r = Fraction(r)
    a, c = r.numerator, r.denominator
    g, s, t = xgcd(a, c)  # s a + t c = 1
    m = ProjMatrix(a, -t, c, s)  # det = a s + t c = 1, m(inf) = a / c
    width = _cusp_width(c)
    mp = ctx.mp
    work = PrecisionContext(ctx.digits + ctx.guard, ctx.guard)
    wmp = work.mp
    y0 = wmp.mpf(width) * (ctx.digits + ctx.guard) * wmp.log(10) / (2 * wmp.pi) + 5

    def at(y):
        z = wmp.mpc(0, y)
        img = (m.a * z + m.b) / (m.c * z + m.d)
        return _xy_from_etas(eta_values(img, (3, 9, 27, 81), work), work)

    x1, y1 = at(y0)
    x2, y2 = at(y0 * 1.25)
    if abs(x2) > 10 * abs(x1) and abs(x1) > wmp.mpf(10) ** (ctx.digits // 4):
        return CurvePoint.infinity(E9)
    if abs(x1 - x2) > ctx.eps * max(1, abs(x1)) or abs(y1 - y2) > ctx.eps * max(1, abs(y1)):
        raise PrecisionError("cusp limit did not stabilise")
    return CurvePoint(E9, mp.mpc(x2), mp.mpc(y2))


# ---------------------------------------------------------------------------
# f and h


def eval_f(tau, ctx: PrecisionContext):
    """f(tau) = eta(27 tau) / eta(3 tau)."""
    e = eta_values(tau, (3, 27), ctx)
    return e[27] / e[3]


def eval_h(tau, ctx: PrecisionContext):
    """h(tau) = f(tau/3)^-3.

    With this exponent h(omega/3) = 3 sqrt(-3); the cube f(omega/9)^3 itself
    is the reciprocal 1/(3 sqrt(-3)).
    """
    pt = UhpPoint.of(tau, ctx)
    third = pt.exact / 3 if pt.exact is not None else pt.approx / 3
    return eval_f(third, ctx) ** -3


def product_shift(p: int, case: int) -> int:
    """The residue j in 1..26 with j p = 4 (case 1) or 1 (case 2) mod 27."""
    target = {1: 4, 2: 1}[case]
    return (target * pow(p, -1, 27)) % 27


_NORMALIZERS = {1: ProjMatrix(2, -1, 9, -4), 2: ProjMatrix(1, 0, -9, 1)}


def product_identity_residual(p: int, case: int, ctx: PrecisionContext, j: int | None = None):
    """|x(M(p w/9)) - e^{pi i/6} sqrt3 f(p(w-j)/27) f(p w/9) / f(p(w-j)/9)|."""
    if p % 9 not in (4, 7):
        raise ValueError("p must be 4 or 7 mod 9")
    if j is None:
        j = product_shift(p, case)
    mp = ctx.mp
    base = W * Fraction(p, 9)
    tau = _NORMALIZERS[case].act(base)
    lhs = eval_x(tau, ctx)
    wj = W - j
    rhs = (
        mp.expj(mp.pi / 6)
        * mp.sqrt(3)
        * eval_f(wj * Fraction(p, 27), ctx)
        * eval_f(base, ctx)
        / eval_f(wj * Fraction(p, 9), ctx)
    )
    return abs(lhs - rhs)


def product_constant(ctx: PrecisionContext):
    """f((w-7)/27) f(w/9) / f((w-7)/9), which equals -e^{pi i/6} / 3^{1/6}."""
    a = eval_f((W - 7) / 27, ctx)
    b = eval_f(W / 9, ctx)
    c = eval_f((W - 7) / 9, ctx)
    return a * b / c
