"""Curves with j = 0 that occur in the construction, and their arithmetic.

Models
    E9          y^2 + y = x^3 - 1
    eta(n)      y^2 + y = 3 n x^3 - 1        (E9 is eta(1/3))
    shortw(n)   y^2 = x^3 - 432 n^2
    fermat(n)   x^3 + y^3 = n                (identity at (1:-1:0))

Coordinates may be Fractions, CycloNumbers (elements of K) or mpmath complex
numbers.  The group law is carried out on the short Weierstrass model, which
every other model is transported to.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .cyclofield import CycloNumber, W

__all__ = [
    "CurveModel",
    "CurvePoint",
    "E9",
    "EtaModel",
    "ShortW",
    "Fermat",
    "add",
    "negate",
    "mul",
    "mul_endo",
    "omega_map",
    "model_transport",
    "torsion_list",
    "cubic_twist",
    "canonical_height",
    "naive_height",
    "is_three_cube",
    "primitive_cube_root",
    "e1_3torsion_shapes",
    "CurveError",
]


class CurveError(ValueError):
    pass


@dataclass(frozen=True)
class CurveModel:
    kind: str  # "E9", "eta", "shortw", "fermat"
    n: Fraction = Fraction(1)

    def __post_init__(self):
        if self.kind not in ("E9", "eta", "shortw", "fermat"):
            raise CurveError(f"unknown model kind {self.kind!r}")
        object.__setattr__(self, "n", Fraction(self.n))
        if self.kind == "E9":
            object.__setattr__(self, "n", Fraction(1, 3))
        if self.n <= 0:
            raise CurveError("n must be positive")

    def __str__(self):
        if self.kind == "E9":
            return "E9"
        return f"{self.kind}({self.n})"

    def equation(self) -> str:
        n = self.n
        return {
            "E9": "y^2 + y = x^3 - 1",
            "eta": f"y^2 + y = {3 * n}x^3 - 1",
            "shortw": f"y^2 = x^3 - {432 * n * n}",
            "fermat": f"x^3 + y^3 = {n}",
        }[self.kind]

    def residual(self, x, y):
        n = self.n
        if self.kind in ("E9", "eta"):
            return y * y + y - 3 * n * x * x * x + 1
        if self.kind == "shortw":
            return y * y - x * x * x + 432 * n * n
        return x * x * x + y * y * y - n

    @property
    def shortw(self) -> "CurveModel":
        return CurveModel("shortw", self.n)


E9 = CurveModel("E9")


def EtaModel(n) -> CurveModel:
    return CurveModel("eta", n)


def ShortW(n) -> CurveModel:
    return CurveModel("shortw", n)


def Fermat(n) -> CurveModel:
    return CurveModel("fermat", n)


def _is_exact(v) -> bool:
    return isinstance(v, (int, Fraction, CycloNumber))


def _is_zero(v, scale=None) -> bool:
    if _is_exact(v):
        return v == 0
    ctx = v.context
    tol = ctx.mpf(2) ** (-int(ctx.prec * 0.75))
    return abs(v) <= tol * max(1, abs(scale) if scale is not None else 1)


class CurvePoint:
    """An affine point (x, y) of a model, or the identity (x = y = None)."""

    __slots__ = ("model", "x", "y")

    def __init__(self, model: CurveModel, x, y):
        self.model = model
        if isinstance(x, int):
            x = Fraction(x)
        if isinstance(y, int):
            y = Fraction(y)
        self.x = x
        self.y = y

    @classmethod
    def infinity(cls, model: CurveModel) -> "CurvePoint":
        return cls(model, None, None)

    @classmethod
    def from_projective(cls, model: CurveModel, X, Y, Z) -> "CurvePoint":
        if Z == 0:
            if model.kind != "fermat" or X + Y != 0:
                raise CurveError("only (1:-1:0) lies at infinity on the Fermat model")
            return cls.infinity(model)
        return cls(model, Fraction(X) / Z if _is_exact(X) else X / Z, Fraction(Y) / Z if _is_exact(Y) else Y / Z)

    @property
    def is_infinity(self) -> bool:
        return self.x is None

    def is_exact(self) -> bool:
        return self.is_infinity or (_is_exact(self.x) and _is_exact(self.y))

    def residual(self):
        if self.is_infinity:
            return 0
        return self.model.residual(self.x, self.y)

    def on_curve(self) -> bool:
        if self.is_infinity:
            return True
        r = self.residual()
        if self.is_exact():
            return r == 0
        return _is_zero(r, max(abs(self.x), abs(self.y)) ** 3)

    def is_rational(self) -> bool:
        if self.is_infinity:
            return True
        return all(isinstance(c, Fraction) or (isinstance(c, CycloNumber) and c.is_rational()) for c in (self.x, self.y))

    def to_rational(self) -> "CurvePoint":
        if self.is_infinity:
            return self
        if not self.is_rational():
            raise CurveError("point is not rational")
        cv = lambda c: c.a if isinstance(c, CycloNumber) else Fraction(c)
        return CurvePoint(self.model, cv(self.x), cv(self.y))

    def projective(self) -> tuple[int, int, int]:
        """Integral projective coordinates (X:Y:Z) with gcd 1 (rational points only)."""
        if self.is_infinity:
            return (1, -1, 0) if self.model.kind == "fermat" else (0, 1, 0)
        p = self.to_rational()
        if self.model.kind != "fermat":
            raise CurveError("projective triples are used for the Fermat model only")
        den = math.lcm(p.x.denominator, p.y.denominator)
        X, Y = int(p.x * den), int(p.y * den)
        g = math.gcd(math.gcd(X, Y), den)
        return X // g, Y // g, den // g

    def __eq__(self, other):
        if not isinstance(other, CurvePoint):
            return NotImplemented
        return self.model == other.model and self.x == other.x and self.y == other.y

    def __hash__(self):
        return hash((self.model, self.x, self.y))

    def __add__(self, other):
        return add(self, other)

    def __neg__(self):
        return negate(self)

    def __sub__(self, other):
        return add(self, negate(other))

    def __rmul__(self, k):
        if isinstance(k, CycloNumber):
            return mul_endo(k, self)
        return mul(k, self)

    def close_to(self, other: "CurvePoint", tol) -> bool:
        if self.model != other.model:
            return False
        if self.is_infinity or other.is_infinity:
            return self.is_infinity and other.is_infinity
        return abs(_to_num(self.x, tol) - _to_num(other.x, tol)) < tol and abs(
            _to_num(self.y, tol) - _to_num(other.y, tol)
        ) < tol

    def __str__(self):
        if self.is_infinity:
            return f"{self.model}: infinity"
        if self.model.kind == "fermat" and self.is_rational():
            X, Y, Z = self.projective()
            return f"{self.model}: ({X}:{Y}:{Z})"
        return f"{self.model}: x={self.x}, y={self.y}"

    __repr__ = __str__


def _to_num(c, like):
    """Complex value of an exact coordinate, in the mpmath context of `like`."""
    if _is_exact(c):
        mp = like.context
        if isinstance(c, CycloNumber):
            return c.to_complex(mp)
        c = Fraction(c)
        return mp.mpf(c.numerator) / c.denominator
    return c


# ---------------------------------------------------------------------------
# transports between models


def _to_shortw(P: CurvePoint) -> CurvePoint:
    m = P.model
    S = m.shortw
    if P.is_infinity:
        return CurvePoint.infinity(S)
    n = m.n
    x, y = P.x, P.y
    if m.kind in ("E9", "eta"):
        return CurvePoint(S, 12 * n * x, 12 * n * (2 * y + 1))
    if m.kind == "fermat":
        s = x + y
        if _is_zero(s):
            return CurvePoint.infinity(S)
        return CurvePoint(S, 12 * n / s, 36 * n * (x - y) / s)
    return P


def _from_shortw(P: CurvePoint, target: CurveModel) -> CurvePoint:
    if P.is_infinity:
        return CurvePoint.infinity(target)
    n = target.n
    u, v = P.x, P.y
    if target.kind in ("E9", "eta"):
        return CurvePoint(target, u / (12 * n), (v / (12 * n) - 1) / 2)
    if target.kind == "fermat":
        if _is_zero(u):
            raise CurveError("point of order 2 has no affine Fermat image")
        return CurvePoint(target, (36 * n + v) / (6 * u), (36 * n - v) / (6 * u))
    return CurvePoint(target, u, v)


def _cube_ratio(a: Fraction) -> Fraction | None:
    """Rational k with k^3 = a, if any."""
    a = Fraction(a)
    def icbrt(m):
        r = round(abs(m) ** (1 / 3)) if m else 0
        for c in (r - 1, r, r + 1):
            if c >= 0 and c**3 == abs(m):
                return c if m >= 0 else -c
        return None
    num, den = icbrt(a.numerator), icbrt(a.denominator)
    if num is None or den is None:
        return None
    return Fraction(num, den)


def model_transport(P: CurvePoint, target: CurveModel) -> CurvePoint:
    """Carry P to another model of the same curve over Q.

    Models with parameters n and n k^3 (k rational) are isomorphic through
    the short Weierstrass scaling (x, y) -> (k^2 x, k^3 y).
    """
    if P.model == target:
        return P
    k = _cube_ratio(target.n / P.model.n)
    if k is None:
        raise CurveError(f"{P.model} and {target} are not isomorphic over Q")
    S = _to_shortw(P)
    if k != 1 and not S.is_infinity:
        S = CurvePoint(target.shortw, k * k * S.x, k * k * k * S.y)
    else:
        S = CurvePoint(target.shortw, S.x, S.y)
    return _from_shortw(S, target)


# ---------------------------------------------------------------------------
# group law


def _add_shortw(P: CurvePoint, Q: CurvePoint) -> CurvePoint:
    if P.is_infinity:
        return Q
    if Q.is_infinity:
        return P
    x1, y1, x2, y2 = P.x, P.y, Q.x, Q.y
    exact = _is_exact(x1) and _is_exact(x2)
    if _is_zero(x1 - x2, None if exact else abs(x1)):
        if _is_zero(y1 + y2, None if exact else abs(y1)):
            return CurvePoint.infinity(P.model)
        lam = 3 * x1 * x1 / (2 * y1)
    else:
        lam = (y2 - y1) / (x2 - x1)
    x3 = lam * lam - x1 - x2
    y3 = lam * (x1 - x3) - y1
    return CurvePoint(P.model, x3, y3)


def _check_same(P: CurvePoint, Q: CurvePoint):
    if P.model != Q.model:
        raise CurveError(f"points on different models {P.model} and {Q.model}")
    if not (P.is_infinity or Q.is_infinity) and P.is_exact() != Q.is_exact():
        raise CurveError("cannot mix exact and floating coordinates")


def add(P: CurvePoint, Q: CurvePoint) -> CurvePoint:
    _check_same(P, Q)
    return _from_shortw(_add_shortw(_to_shortw(P), _to_shortw(Q)), P.model)


def negate(P: CurvePoint) -> CurvePoint:
    if P.is_infinity:
        return P
    k = P.model.kind
    if k in ("E9", "eta"):
        return CurvePoint(P.model, P.x, -1 - P.y)
    if k == "fermat":
        return CurvePoint(P.model, P.y, P.x)
    return CurvePoint(P.model, P.x, -P.y)


def mul(k: int, P: CurvePoint) -> CurvePoint:
    if k < 0:
        return mul(-k, negate(P))
    S = _to_shortw(P)
    R = CurvePoint.infinity(S.model)
    while k:
        if k & 1:
            R = _add_shortw(R, S)
        S = _add_shortw(S, S)
        k >>= 1
    return _from_shortw(R, P.model)


def _omega_like(c):
    if isinstance(c, CycloNumber):
        return W
    if isinstance(c, (int, Fraction)):
        return W
    mp = c.context
    return mp.mpc(-0.5, mp.sqrt(3) / 2)


def omega_map(P: CurvePoint) -> CurvePoint:
    """[w]: (x, y) -> (w x, y) on the short Weierstrass model."""
    if P.is_infinity:
        return P
    S = _to_shortw(P)
    if S.is_infinity:
        return P
    x = S.x
    if isinstance(x, (int, Fraction)):
        x = CycloNumber(x)
        S = CurvePoint(S.model, x, CycloNumber.coerce(S.y))
    return _from_shortw(CurvePoint(S.model, _omega_like(x) * x, S.y), P.model)


def mul_endo(a, P: CurvePoint) -> CurvePoint:
    """[m + k w] P."""
    a = CycloNumber.coerce(a)
    if not a.is_integral():
        raise CurveError(f"{a} is not in Z[w]")
    m, k = int(a.a), int(a.b)
    if k == 0:
        return mul(m, P)
    if P.is_exact() and not P.is_infinity:
        P = CurvePoint(P.model, CycloNumber.coerce(P.x), CycloNumber.coerce(P.y))
    return add(mul(m, P), mul(k, omega_map(P)))


# ---------------------------------------------------------------------------
# torsion and twists


def torsion_list(model: CurveModel, field: str = "K") -> list[CurvePoint]:
    """Torsion subgroup over Q, K or L = K(cbrt p), for the models where it is known."""
    if model == EtaModel(1):
        inf = CurvePoint.infinity(model)
        rational = [inf, CurvePoint(model, 1, 1), CurvePoint(model, 1, -2)]
        if field == "Q":
            return rational
        if field in ("K", "L"):
            w2 = W * W
            pts = [inf, CurvePoint(model, CycloNumber(0), W), CurvePoint(model, CycloNumber(0), w2)]
            for x in (CycloNumber(1), W, w2):
                pts.append(CurvePoint(model, x, CycloNumber(1)))
                pts.append(CurvePoint(model, x, CycloNumber(-2)))
            return pts
    if model.kind == "fermat" and model.n >= 3 and model.n.denominator == 1 and field == "Q":
        return [CurvePoint.infinity(model)]
    raise CurveError(f"torsion of {model} over {field} is not tabulated")


def cubic_twist(P: CurvePoint, a) -> CurvePoint:
    """(x, y) -> (x / cbrt a, y), from eta(b) (or E9, b = 1/3) to eta(a b).

    The real cube root is used.  For exact points this requires a to be a
    rational cube.
    """
    m = P.model
    if m.kind not in ("E9", "eta"):
        raise CurveError("cubic twists act on the eta models")
    a = Fraction(a)
    target = EtaModel(m.n * a)
    if P.is_infinity:
        return CurvePoint.infinity(target)
    if P.is_exact():
        k = _cube_ratio(a)
        if k is None:
            raise CurveError(f"{a} is not a cube in Q")
        return CurvePoint(target, P.x / k, P.y)
    mp = P.x.context
    root = mp.cbrt(mp.mpf(a.numerator) / a.denominator)
    return CurvePoint(target, P.x / root, P.y)


# ---------------------------------------------------------------------------
# heights


def naive_height(P: CurvePoint) -> float:
    """log max(|num x|, |den x|) on the short Weierstrass model."""
    S = _to_shortw(P.to_rational())
    if S.is_infinity:
        return 0.0
    x = Fraction(S.x)
    return math.log(max(abs(x.numerator), x.denominator))


def _bad_primes(n: Fraction) -> list[int]:
    m = 6 * n.numerator * n.denominator
    out, d = [], 2
    while d * d <= m:
        if m % d == 0:
            out.append(d)
            while m % d == 0:
                m //= d
        d += 1
    if m > 1:
        out.append(m)
    return out


def _vp(x: Fraction, p: int) -> int:
    if x == 0:
        return 10**9
    v, a, b = 0, x.numerator, x.denominator
    while a % p == 0:
        a //= p
        v += 1
    while b % p == 0:
        b //= p
        v -= 1
    return v


def _nonsingular_at(S: CurvePoint, p: int) -> bool:
    # the only singular point of y^2 = x^3 - 432 n^2 modulo p | 6n is (0, 0)
    if S.is_infinity:
        return True
    return not (_vp(S.x, p) > 0 and _vp(S.y, p) > 0)


def canonical_height(P: CurvePoint, digits: int = 30, max_multiplier: int = 64) -> float:
    """Canonical height, normalized as lim log max(|num|, |den|)(x(2^k P)) / 4^k.

    Computed on y^2 = x^3 + B (B = -432 n^2) as the sum of the archimedean
    local height (Tate's series; x is bounded below on real points since
    B < 0) and log of the denominator of x, after replacing P by a multiple
    with nonsingular reduction at every prime of bad reduction.
    """
    import mpmath

    S = _to_shortw(P.to_rational())
    if S.is_infinity:
        return 0.0
    S = CurvePoint(S.model, Fraction(S.x), Fraction(S.y))
    bad = _bad_primes(S.model.n)
    m = 1
    for p in bad:
        k, Q = 1, S
        while not _nonsingular_at(Q, p):
            k += 1
            Q = _add_shortw(Q, S)
            if Q.is_infinity:
                return 0.0
            if k > max_multiplier:
                raise CurveError(f"no multiple of P below {max_multiplier} reduces nonsingularly at {p}")
        m = math.lcm(m, k)
    Q = mul(m, S) if m > 1 else S
    if Q.is_infinity:
        return 0.0
    mp = mpmath.MPContext()
    mp.dps = digits + 10
    B = -432 * S.model.n**2
    Bn = mp.mpf(B.numerator) / B.denominator
    x = mp.mpf(Q.x.numerator) / Q.x.denominator
    lam = mp.log(abs(x)) / 2
    k, weight = 0, mp.mpf(1) / 8
    while weight > mp.mpf(10) ** (-digits - 5):
        z = 1 - 8 * Bn / x**3
        lam += weight * mp.log(abs(z))
        x = (x**4 - 8 * Bn * x) / (4 * (x**3 + Bn))
        weight /= 4
        k += 1
    h_half = lam + mp.log(Q.x.denominator) / 2  # lim (1/2) h(2^k Q)/4^k, since den(x) is a square
    return float(2 * h_half / (m * m))


# ---------------------------------------------------------------------------
# arithmetic modulo p


def _require_1_mod_3(p: int):
    if p % 3 != 1:
        raise ValueError(f"{p} is not 1 mod 3")


def is_three_cube(p: int) -> bool:
    """Whether 3 is a cube modulo the prime p = 1 mod 3."""
    _require_1_mod_3(p)
    return pow(3, (p - 1) // 3, p) == 1


def primitive_cube_root(p: int) -> int:
    """Smallest u in [2, p-1] with u^3 = 1 mod p."""
    _require_1_mod_3(p)
    for u in range(2, p):
        if pow(u, 3, p) == 1:
            return u
    raise AssertionError("unreachable for p = 1 mod 3")


def e1_3torsion_shapes(p: int) -> set[tuple[int, int]]:
    """Pairs (x mod P, x mod conj P) for the finite 3-torsion points of y^2 + y = 3x^3 - 1.

    Here P is the prime above p in which w reduces to u = primitive_cube_root(p).
    """
    u = primitive_cube_root(p)
    u2 = u * u % p
    return {(0, 0), (1, 1), (u, u2), (u2, u)}
