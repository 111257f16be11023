"""Exact arithmetic in K = Q(w), w = (-1 + sqrt(-3))/2.

Elements are a + b*w with rational a, b.  Lattices are rank-2 Z-modules of K
kept in a canonical Hermite form, ideals of the orders Z[f*w] are lattices
with a conductor attached, and the ring class group

    (Z_K / f)^x / (Z / f)^x Z_K^x

is enumerated by brute force over residues.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence

__all__ = [
    "CycloNumber",
    "W",
    "Lattice",
    "OrderIdeal",
    "ClassRep",
    "conductor_of_lattice",
    "class_reps",
    "class_group",
    "chi3_class",
    "trace_subgroup_reps",
    "ideal_for_class",
    "ideal_act",
    "conjugate",
    "hnf2",
    "xgcd",
]


def xgcd(a: int, b: int) -> tuple[int, int, int]:
    """Return (g, s, t) with g = gcd(a, b) >= 0 and s*a + t*b = g."""
    s0, s1, t0, t1 = 1, 0, 0, 1
    while b:
        q, r = divmod(a, b)
        a, b = b, r
        s0, s1 = s1, s0 - q * s1
        t0, t1 = t1, t0 - q * t1
    if a < 0:
        return -a, -s0, -t0
    return a, s0, t0


def _frac(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, str):
        return Fraction(x)
    if isinstance(x, int):
        return Fraction(x)
    raise TypeError(f"cannot coerce {x!r} to an exact rational")


class CycloNumber:
    """An exact element a + b*w of Q(w)."""

    __slots__ = ("a", "b")

    def __init__(self, a=0, b=0):
        self.a = _frac(a)
        self.b = _frac(b)

    @classmethod
    def coerce(cls, x) -> "CycloNumber":
        if isinstance(x, CycloNumber):
            return x
        return cls(x, 0)

    @classmethod
    def parse(cls, text: str) -> "CycloNumber":
        """Inverse of ``str``: accepts ``"a/b+c/dw"``, ``"3"``, ``"-w"``, ``"1/2-5/3w"``."""
        s = text.replace(" ", "")
        if not s.endswith("w"):
            return cls(Fraction(s), 0)
        body = s[:-1]
        # split at the last sign that is not the leading one
        cut = max(body.rfind("+"), body.rfind("-"))
        if cut <= 0:
            real, imag = "0", body
        else:
            real, imag = body[:cut], body[cut:]
        if imag in ("", "+"):
            imag = "1"
        elif imag == "-":
            imag = "-1"
        return cls(Fraction(real), Fraction(imag))

    # -- arithmetic -------------------------------------------------------

    def __add__(self, other):
        other = _maybe(other)
        if other is NotImplemented:
            return other
        return CycloNumber(self.a + other.a, self.b + other.b)

    __radd__ = __add__

    def __neg__(self):
        return CycloNumber(-self.a, -self.b)

    def __sub__(self, other):
        other = _maybe(other)
        if other is NotImplemented:
            return other
        return CycloNumber(self.a - other.a, self.b - other.b)

    def __rsub__(self, other):
        other = _maybe(other)
        if other is NotImplemented:
            return other
        return other - self

    def __mul__(self, other):
        other = _maybe(other)
        if other is NotImplemented:
            return other
        a, b, c, d = self.a, self.b, other.a, other.b
        # w^2 = -1 - w
        bd = b * d
        return CycloNumber(a * c - bd, a * d + b * c - bd)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = _maybe(other)
        if other is NotImplemented:
            return other
        n = other.norm()
        if n == 0:
            raise ZeroDivisionError("division by zero in Q(w)")
        num = self * other.conjugate()
        return CycloNumber(num.a / n, num.b / n)

    def __rtruediv__(self, other):
        other = _maybe(other)
        if other is NotImplemented:
            return other
        return other / self

    def __pow__(self, k: int):
        if k < 0:
            return CycloNumber(1) / self ** (-k)
        result, base = CycloNumber(1), self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def conjugate(self) -> "CycloNumber":
        return CycloNumber(self.a - self.b, -self.b)

    def norm(self) -> Fraction:
        return self.a * self.a - self.a * self.b + self.b * self.b

    def trace(self) -> Fraction:
        return 2 * self.a - self.b

    # -- predicates and embeddings ------------------------------------------

    def real_part(self) -> Fraction:
        return self.a - self.b / 2

    def imag_sign(self) -> int:
        """Sign of the imaginary part (which is b*sqrt(3)/2)."""
        return (self.b > 0) - (self.b < 0)

    def is_integral(self) -> bool:
        return self.a.denominator == 1 and self.b.denominator == 1

    def is_rational(self) -> bool:
        return self.b == 0

    def to_complex(self, mp=None):
        """Embed into C with w the root in the upper half plane."""
        if mp is None:
            return complex(float(self.real_part()), float(self.b) * math.sqrt(3) / 2)
        re = mp.mpf(self.real_part().numerator) / self.real_part().denominator
        im = mp.mpf(self.b.numerator) / self.b.denominator * mp.sqrt(3) / 2
        return mp.mpc(re, im)

    # -- protocol ------------------------------------------------------------

    def __eq__(self, other):
        other = _maybe(other)
        if other is NotImplemented:
            return False
        return self.a == other.a and self.b == other.b

    def __hash__(self):
        return hash((self.a, self.b))

    def __bool__(self):
        return bool(self.a) or bool(self.b)

    def __str__(self):
        if self.b == 0:
            return str(self.a)
        if self.a == 0:
            return {1: "w", -1: "-w"}.get(self.b, f"{self.b}w")
        sign = "+" if self.b > 0 else "-"
        mag = abs(self.b)
        return f"{self.a}{sign}{'' if mag == 1 else mag}w"

    def __repr__(self):
        return f"CycloNumber({self})"


def _maybe(x):
    if isinstance(x, CycloNumber):
        return x
    if isinstance(x, (int, Fraction)):
        return CycloNumber(x, 0)
    return NotImplemented


W = CycloNumber(0, 1)


def conjugate(x: CycloNumber) -> CycloNumber:
    return CycloNumber.coerce(x).conjugate()


# ---------------------------------------------------------------------------
# lattices


def hnf2(vectors: Iterable[tuple[int, int]]) -> tuple[int, int, int]:
    """Hermite form (h11, h12, h22) of the full-rank lattice spanned by integer rows.

    Rows of the result are (h11, h12) and (0, h22) with h11, h22 > 0 and
    0 <= h12 < h22.
    """
    pivot = None
    zeros = 0
    for a, b in vectors:
        if a == 0:
            zeros = math.gcd(zeros, b)
            continue
        if pivot is None:
            pivot = (a, b)
            continue
        g0, c0 = pivot
        g, s, t = xgcd(g0, a)
        pivot = (g, s * c0 + t * b)
        zeros = math.gcd(zeros, (a // g) * c0 - (g0 // g) * b)
    if pivot is None or zeros == 0:
        raise ValueError("vectors do not span a rank-2 lattice")
    h11, h12 = pivot
    if h11 < 0:
        h11, h12 = -h11, -h12
    h22 = abs(zeros)
    return h11, h12 % h22, h22


class Lattice:
    """A rank-2 Z-submodule of K in canonical form.

    ``den * L`` is an integral lattice in the coordinates (a, b) of a + b*w,
    with Hermite basis (h11 + h12*w, h22*w); ``den`` is the least such integer.
    The basis ratio g2/g1 always lies in the upper half plane.
    """

    __slots__ = ("den", "hnf")

    def __init__(self, den: int, hnf: tuple[int, int, int]):
        self.den = den
        self.hnf = hnf

    @classmethod
    def from_generators(cls, gens: Sequence) -> "Lattice":
        gens = [CycloNumber.coerce(g) for g in gens]
        den = 1
        for g in gens:
            den = math.lcm(den, g.a.denominator, g.b.denominator)
        rows = [(int(g.a * den), int(g.b * den)) for g in gens]
        h11, h12, h22 = hnf2(rows)
        # pull out any common content so that den is minimal
        c = math.gcd(math.gcd(h11, h12), h22)
        c = math.gcd(c, den)
        if c > 1:
            den //= c
            h11, h12, h22 = h11 // c, h12 // c, h22 // c
        return cls(den, (h11, h12, h22))

    @classmethod
    def from_tau(cls, tau) -> "Lattice":
        """The lattice Z + Z*tau, written <tau>."""
        return cls.from_generators([CycloNumber(1), CycloNumber.coerce(tau)])

    @property
    def basis(self) -> tuple[CycloNumber, CycloNumber]:
        h11, h12, h22 = self.hnf
        d = self.den
        return CycloNumber(Fraction(h11, d), Fraction(h12, d)), CycloNumber(0, Fraction(h22, d))

    def tau(self) -> CycloNumber:
        """g2/g1 for the canonical basis; a point of the upper half plane."""
        g1, g2 = self.basis
        return g2 / g1

    def covolume(self) -> Fraction:
        """Index-like volume: |det| of the basis in (1, w) coordinates."""
        h11, _, h22 = self.hnf
        return Fraction(h11 * h22, self.den * self.den)

    def scale(self, lam) -> "Lattice":
        lam = CycloNumber.coerce(lam)
        return Lattice.from_generators([lam * g for g in self.basis])

    def contains(self, z) -> bool:
        z = CycloNumber.coerce(z)
        h11, h12, h22 = self.hnf
        a, b = z.a * self.den, z.b * self.den
        if a.denominator != 1 or b.denominator != 1:
            return False
        a, b = int(a), int(b)
        if a % h11:
            return False
        return (b - (a // h11) * h12) % h22 == 0

    def contains_lattice(self, other: "Lattice") -> bool:
        return all(self.contains(g) for g in other.basis)

    def coordinates(self, z) -> tuple[Fraction, Fraction]:
        """Rational coordinates of z in the canonical basis."""
        z = CycloNumber.coerce(z)
        h11, h12, h22 = self.hnf
        a, b = z.a * self.den, z.b * self.den
        c1 = a / h11
        c2 = (b - c1 * h12) / h22
        return c1, c2

    def __eq__(self, other):
        return isinstance(other, Lattice) and self.den == other.den and self.hnf == other.hnf

    def __hash__(self):
        return hash((self.den, self.hnf))

    def __str__(self):
        g1, g2 = self.basis
        return f"<{g1}, {g2}>"

    __repr__ = __str__


def _primitive_quadratic(tau: CycloNumber) -> tuple[int, int, int]:
    """Primitive (A, B, C), A > 0, with A*tau^2 + B*tau + C = 0."""
    if tau.is_rational():
        raise ValueError("tau must not be rational")
    tr, nm = tau.trace(), tau.norm()
    den = math.lcm(tr.denominator, nm.denominator)
    A, B, C = den, int(-tr * den), int(nm * den)
    g = math.gcd(math.gcd(A, B), C)
    return A // g, B // g, C // g


def conductor_of_lattice(L: Lattice) -> int:
    """Conductor f of the multiplier ring {x : xL in L} = Z[f*w]."""
    A, B, C = _primitive_quadratic(L.tau())
    f2, r = divmod(4 * A * C - B * B, 3)
    f = math.isqrt(f2)
    if r or f * f != f2:
        raise ArithmeticError(f"lattice {L} is not a lattice in Q(w)")
    return f


# ---------------------------------------------------------------------------
# ideals of non-maximal orders


class OrderIdeal:
    """An ideal of Z[f*w]; ``hnf`` is the canonical lattice of the ideal."""

    __slots__ = ("conductor", "generators", "hnf")

    def __init__(self, conductor: int, generators: Sequence[CycloNumber]):
        self.conductor = conductor
        self.generators = tuple(CycloNumber.coerce(g) for g in generators)
        self.hnf = Lattice.from_generators(self.generators)
        fw = CycloNumber(0, conductor)
        if not all(self.hnf.contains(fw * g) for g in self.hnf.basis):
            raise ValueError("generators do not span a Z[f w]-module")

    @classmethod
    def order(cls, f: int) -> "OrderIdeal":
        return cls(f, [CycloNumber(1), CycloNumber(0, f)])

    def norm(self) -> Fraction:
        # Z[f w] has covolume f in the {1, w} coordinates
        return self.hnf.covolume() / self.conductor

    def __mul__(self, other: "OrderIdeal") -> "OrderIdeal":
        if self.conductor != other.conductor:
            raise ValueError("ideals of different orders")
        gens = [g * h for g in self.hnf.basis for h in other.hnf.basis]
        return OrderIdeal(self.conductor, gens)

    def conjugate(self) -> "OrderIdeal":
        return OrderIdeal(self.conductor, [g.conjugate() for g in self.hnf.basis])

    def __eq__(self, other):
        return (
            isinstance(other, OrderIdeal)
            and self.conductor == other.conductor
            and self.hnf == other.hnf
        )

    def __hash__(self):
        return hash((self.conductor, self.hnf))

    def __repr__(self):
        return f"OrderIdeal(f={self.conductor}, {self.hnf})"


def _kernel_mod(r: int, s: int, f: int) -> list[tuple[int, int]]:
    """Generators of {(x, y) in Z^2 : r x + s y = 0 mod f}."""
    # the solutions form a lattice containing f Z^2; reduce to one congruence
    g, u, v = xgcd(r, s)
    gens = [(f, 0), (0, f)]
    # (s/g, -r/g) is always a solution
    if g:
        gens.append((s // g, -r // g))
        # multiples t*(u, v) map to t*g; need t*g = 0 mod f
        t = f // math.gcd(g, f)
        gens.append((t * u, t * v))
    return gens


def ideal_for_class(alpha, f: int) -> OrderIdeal:
    """The ideal alpha Z_K  n  Z[f w] of the order of conductor f."""
    alpha = alpha.alpha if isinstance(alpha, ClassRep) else CycloNumber.coerce(alpha)
    if not alpha.is_integral():
        raise ValueError("alpha must be integral")
    n = int(alpha.norm())
    if math.gcd(n, f) != 1:
        raise ValueError(f"norm({alpha}) = {n} is not prime to {f}")
    if f == 1:
        return OrderIdeal(1, [alpha, alpha * W])
    # x*alpha + y*alpha*w has w-coordinate r x + s y; need it = 0 mod f
    r = int(alpha.b)
    s = int((alpha * W).b)
    gens = [x * alpha + y * (alpha * W) for x, y in _kernel_mod(r, s, f)]
    return OrderIdeal(f, gens)


def ideal_act(I: OrderIdeal, L: Lattice) -> Lattice:
    """The lattice I*L, spanned by all products of generators."""
    fL = conductor_of_lattice(L)
    if I.conductor % fL:
        raise ValueError(f"ideal of conductor {I.conductor} cannot act on a lattice of conductor {fL}")
    return Lattice.from_generators([g * h for g in I.hnf.basis for h in L.basis])


# ---------------------------------------------------------------------------
# ring class groups


class ClassRep:
    """An integral alpha prime to the modulus f, standing for its ring class."""

    __slots__ = ("alpha", "modulus")

    def __init__(self, alpha, modulus: int):
        alpha = CycloNumber.coerce(alpha)
        if not alpha.is_integral():
            raise ValueError("class representatives must be integral")
        if math.gcd(int(alpha.norm()), modulus) != 1:
            raise ValueError(f"{alpha} is not invertible modulo {modulus}")
        self.alpha = alpha
        self.modulus = modulus

    def __eq__(self, other):
        return isinstance(other, ClassRep) and self.modulus == other.modulus and (
            class_group(self.modulus).index(self.alpha) == class_group(other.modulus).index(other.alpha)
        )

    def __hash__(self):
        return hash((self.modulus, class_group(self.modulus).index(self.alpha)))

    def __repr__(self):
        return f"ClassRep({self.alpha} mod {self.modulus})"


_UNITS = [(1, 0), (0, 1), (-1, -1), (-1, 0), (0, -1), (1, 1)]


class _ClassGroup:
    """Brute-force model of (Z_K/f)^x / (Z/f)^x Z_K^x."""

    def __init__(self, f: int):
        self.f = f
        scalars = [c for c in range(1, f + 1) if math.gcd(c, f) == 1] if f > 1 else [1]
        label: dict[tuple[int, int], int] = {}
        reps: list[tuple[int, int]] = []
        for a in range(f):
            for b in range(f):
                if (a, b) in label:
                    continue
                if math.gcd(a * a - a * b + b * b, f) != 1:
                    continue
                idx = len(reps)
                reps.append((a, b))
                for ua, ub in _UNITS:
                    # (a + b w)(ua + ub w)
                    ca = (a * ua - b * ub) % f
                    cb = (a * ub + b * ua - b * ub) % f
                    for c in scalars:
                        label[(c * ca % f, c * cb % f)] = idx
        self.label = label
        self.reps = reps

    def index(self, alpha: CycloNumber) -> int:
        key = (int(alpha.a) % self.f, int(alpha.b) % self.f)
        try:
            return self.label[key]
        except KeyError:
            raise ValueError(f"{alpha} is not invertible modulo {self.f}") from None

    def mul(self, i: int, j: int) -> int:
        a = CycloNumber(*self.reps[i]) * CycloNumber(*self.reps[j])
        return self.index(a)

    def __len__(self):
        return len(self.reps)


@lru_cache(maxsize=32)
def class_group(f: int) -> _ClassGroup:
    return _ClassGroup(f)


def class_reps(f: int) -> list[ClassRep]:
    if f < 1:
        raise ValueError("modulus must be positive")
    return [ClassRep(CycloNumber(a, b), f) for a, b in class_group(f).reps]


_BETA = CycloNumber(1, 3)  # 1 + 3w


def chi3_class(alpha) -> CycloNumber:
    """Value in {1, w, w^2} of the character of Gal(K(cbrt 3)|K) on the class of alpha mod 9.

    Calibrated so that 1 + 3w acts by cbrt(3) -> w*cbrt(3).
    """
    alpha = alpha.alpha if isinstance(alpha, ClassRep) else CycloNumber.coerce(alpha)
    G = class_group(9)
    i = G.index(alpha)
    table = {G.index(CycloNumber(1)): 0, G.index(_BETA): 1, G.index(_BETA * _BETA): 2}
    return W ** table[i]


def _cube_root_class_data(p: int):
    if p % 9 not in (4, 7):
        raise ValueError(f"p = {p} is not 4 or 7 mod 9; unsupported prime")
    return class_group(3 * p)


def trace_subgroup_reps(p: int) -> list[ClassRep]:
    """Representatives mod 9p for Gal(H_3p | K(cbrt p)), each fixing cbrt 3.

    The subgroup is the set of cubes in the class group mod 3p (index 3 since 3
    divides p - 1 exactly once); each cube class is lifted along 1 + 3p w so
    that it is trivial modulo 9.
    """
    G = _cube_root_class_data(p)
    cubes = sorted({G.index(CycloNumber(*G.reps[i]) ** 3) for i in range(len(G))})
    lift = CycloNumber(1, 3 * p)
    f = 9 * p
    out = []
    for i in cubes:
        a = CycloNumber(*G.reps[i])
        for k in range(3):
            cand = a * lift**k
            cand = CycloNumber(int(cand.a) % f, int(cand.b) % f)
            if chi3_class(cand) == 1:
                out.append(ClassRep(cand, f))
                break
        else:  # pragma: no cover - excluded by the group structure
            raise ArithmeticError(f"no lift of class {a} fixes cbrt 3")
    return out
