"""Matrices acting on CM points of X_0(243).

Everything here is exact: points are CycloNumbers in the upper half plane,
matrices are integer 2x2 matrices taken up to scalars.
"""

from __future__ import annotations

import itertools
import math
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .cyclofield import CycloNumber, Lattice, conductor_of_lattice, xgcd

__all__ = [
    "ProjMatrix",
    "ModWord",
    "AffineE9",
    "NormalizedIsogeny",
    "LEVEL",
    "V",
    "Winv",
    "T",
    "reduce_to_fundamental_domain",
    "gamma0_equivalent",
    "in_gamma0",
    "same_coset",
    "normalize_isogeny",
    "isogeny_between",
    "maut_group",
    "s3_words",
    "induced_e9_action",
    "automorphism_search",
    "SearchFailure",
    "StructureError",
    "MAutReport",
    "matching_words",
]

LEVEL = 243


class StructureError(ValueError):
    pass


class SearchFailure(LookupError):
    pass


class ProjMatrix:
    """Integer matrix [[a, b], [c, d]] with positive determinant, up to scalars."""

    __slots__ = ("a", "b", "c", "d")

    def __init__(self, a: int, b: int, c: int, d: int):
        if a * d - b * c <= 0:
            raise ValueError("determinant must be positive")
        g = math.gcd(math.gcd(a, b), math.gcd(c, d))
        a, b, c, d = a // g, b // g, c // g, d // g
        first = next(x for x in (a, b, c, d) if x)
        if first < 0:
            a, b, c, d = -a, -b, -c, -d
        self.a, self.b, self.c, self.d = a, b, c, d

    @classmethod
    def parse(cls, text: str) -> "ProjMatrix":
        nums = [int(x) for x in re.findall(r"-?\d+", text)]
        if len(nums) != 4:
            raise ValueError(f"cannot parse matrix {text!r}")
        return cls(*nums)

    @property
    def entries(self) -> tuple[int, int, int, int]:
        return self.a, self.b, self.c, self.d

    def det(self) -> int:
        return self.a * self.d - self.b * self.c

    def __matmul__(self, other: "ProjMatrix") -> "ProjMatrix":
        a, b, c, d = self.entries
        e, f, g, h = other.entries
        return ProjMatrix(a * e + b * g, a * f + b * h, c * e + d * g, c * f + d * h)

    def adjugate(self) -> "ProjMatrix":
        """Inverse up to scalar."""
        return ProjMatrix(self.d, -self.b, -self.c, self.a)

    def act(self, tau):
        """Mobius action on an exact point (CycloNumber) or a complex number."""
        a, b, c, d = self.entries
        if isinstance(tau, CycloNumber):
            return (tau * a + b) / (tau * c + d)
        return (a * tau + b) / (c * tau + d)

    def is_scalar(self) -> bool:
        return self.b == 0 and self.c == 0 and self.a == self.d

    def __eq__(self, other):
        return isinstance(other, ProjMatrix) and self.entries == other.entries

    def __hash__(self):
        return hash(self.entries)

    def __str__(self):
        return f"[[{self.a},{self.b}],[{self.c},{self.d}]]"

    __repr__ = __str__


IDENTITY = ProjMatrix(1, 0, 0, 1)
V = ProjMatrix(1, 0, 81, 1)
Winv = ProjMatrix(0, -1, 243, 0)  # the Atkin-Lehner involution w
T = ProjMatrix(9, 1, -243, -18)
S_MAT = ProjMatrix(0, -1, 1, 0)


def in_gamma0(m: ProjMatrix, N: int = LEVEL) -> bool:
    """Whether the projective class of m meets Gamma_0(N)."""
    return m.det() == 1 and m.c % N == 0


def same_coset(A: ProjMatrix, B: ProjMatrix, N: int = LEVEL) -> bool:
    """A and B define the same element of the normalizer modulo Gamma_0(N)."""
    return in_gamma0(A @ B.adjugate(), N)


# ---------------------------------------------------------------------------
# SL2(Z) reduction of exact points


def reduce_to_fundamental_domain(tau: CycloNumber) -> tuple[CycloNumber, ProjMatrix]:
    """Return (r, g) with g in SL2(Z), g(tau) = r in the closed fundamental domain.

    Boundary points are normalized (Re r in [-1/2, 1/2), and Re r <= 0 on the
    unit circle) so that SL2(Z)-equivalent points have identical reductions.
    """
    if tau.imag_sign() <= 0:
        raise ValueError("point is not in the upper half plane")
    g = IDENTITY
    r = tau
    half = Fraction(1, 2)
    while True:
        n = math.floor(r.real_part() + half)
        if n:
            r = r - n
            g = ProjMatrix(1, -n, 0, 1) @ g
        if r.norm() < 1:
            r = CycloNumber(-1) / r
            g = S_MAT @ g
            continue
        break
    if r.norm() == 1 and r.real_part() > 0:
        r = CycloNumber(-1) / r
        g = S_MAT @ g
    return r, g


@lru_cache(maxsize=None)
def _stabilizer(r: CycloNumber) -> tuple[ProjMatrix, ...]:
    out = []
    for a, b, c, d in itertools.product((-1, 0, 1), repeat=4):
        if a * d - b * c != 1:
            continue
        m = ProjMatrix(a, b, c, d)
        if m not in out and m.act(r) == r:
            out.append(m)
    return tuple(out)


def gamma0_equivalent(tau1: CycloNumber, tau2: CycloNumber, N: int = LEVEL) -> ProjMatrix | None:
    """A matrix g in Gamma_0(N) with g(tau1) = tau2, or None."""
    r1, g1 = reduce_to_fundamental_domain(tau1)
    r2, g2 = reduce_to_fundamental_domain(tau2)
    if r1 != r2:
        return None
    back = g2.adjugate()
    for s in _stabilizer(r1):
        cand = back @ s @ g1
        if in_gamma0(cand, N):
            return cand
    return None


# ---------------------------------------------------------------------------
# normalized isogenies


@dataclass(frozen=True)
class NormalizedIsogeny:
    """A cyclic 243-isogeny C/<1, tau> -> C/<1, 243 tau>, with its endpoints."""

    tau: CycloNumber
    source: Lattice
    target: Lattice
    conductor: int

    def __str__(self):
        return f"{self.source} -> {self.target} (tau = {self.tau}, conductor {self.conductor})"


def _order_in_quotient(v, sub: Lattice, N: int) -> int:
    for n in sorted(d for d in range(1, N + 1) if N % d == 0):
        if sub.contains(CycloNumber(v[0] * n, v[1] * n)):
            return n
    return 0


def normalize_isogeny(src: Lattice, dst: Lattice, multiplier=1, N: int = LEVEL) -> NormalizedIsogeny:
    """Rewrite C/src -> C/dst, z -> multiplier*z, in the form C/<1,tau> -> C/<1,N tau>."""
    mult = CycloNumber.coerce(multiplier)
    image = src.scale(mult)
    if not dst.contains_lattice(image):
        raise StructureError("multiplier*source is not contained in target")
    # work in coordinates of the target's canonical basis
    g1, g2 = dst.basis
    rows = []
    for z in image.basis:
        c1, c2 = dst.coordinates(z)
        rows.append((int(c1), int(c2)))
    (p, q), (r, s) = rows
    if abs(p * s - q * r) != N:
        raise StructureError(f"isogeny has degree {abs(p * s - q * r)}, expected {N}")
    if math.gcd(math.gcd(p, q), math.gcd(r, s)) != 1:
        raise StructureError("isogeny kernel is not cyclic")
    sub = Lattice.from_generators([CycloNumber(p, q), CycloNumber(r, s)])
    candidates = [(0, 1)] + [(1, k) for k in range(N)]
    e1 = next(v for v in candidates if _order_in_quotient(v, sub, N) == N)
    _, y2, x2neg = xgcd(e1[0], e1[1])
    f = (-x2neg, y2)  # e1[0]*f[1] - e1[1]*f[0] = 1
    for k in range(N):
        e2 = (f[0] + k * e1[0], f[1] + k * e1[1])
        if sub.contains(CycloNumber(*e2)):
            break
    else:  # pragma: no cover - excluded by cyclicity
        raise StructureError("no complement found")
    E1 = g1 * e1[0] + g2 * e1[1]
    E2 = g1 * e2[0] + g2 * e2[1]
    tau = E2 / (E1 * N)
    if tau.imag_sign() < 0:
        tau = -tau
    f_src, f_dst = conductor_of_lattice(src), conductor_of_lattice(dst)
    return NormalizedIsogeny(tau, src, dst, math.lcm(f_src, f_dst))


def isogeny_between(src: Lattice, dst: Lattice, N: int = LEVEL) -> NormalizedIsogeny:
    """Normalize the cyclic N-isogeny src -> dst given by a power-of-3 multiplier.

    This is how paths in the 3-isogeny tree compose: every edge is an inclusion
    of lattices up to a factor 3.
    """
    ratio = dst.covolume() / src.covolume()  # index of lam*src in dst is |lam|^2 / ratio
    for k in range(-12, 13):
        lam = Fraction(3) ** k
        if lam * lam != ratio * N:
            continue
        try:
            return normalize_isogeny(src, dst, CycloNumber(lam), N)
        except StructureError:
            continue
    raise StructureError(f"no cyclic {N}-isogeny {src} -> {dst} with a power-of-3 multiplier")


# ---------------------------------------------------------------------------
# words in w, v, t

_LETTERS = {
    "w": Winv,
    "v": V,
    "v^-1": V.adjugate(),
    "t": T,
    "t^-1": T.adjugate(),
}


class ModWord:
    """A word in w, v, v^-1, t, t^-1; the matrix is the left-to-right product."""

    __slots__ = ("letters",)

    def __init__(self, letters=()):
        letters = tuple(letters)
        for x in letters:
            if x not in _LETTERS:
                raise StructureError(f"unknown letter {x!r}")
        self.letters = letters

    @classmethod
    def parse(cls, text: str) -> "ModWord":
        letters = []
        for tok in re.findall(r"[A-Za-z](?:\^-?\d+)?", text):
            name, _, exp = tok.partition("^")
            k = int(exp) if exp else 1
            if name not in ("w", "v", "t"):
                raise StructureError(f"unknown letter {name!r}")
            if name == "w":
                k %= 2
                letters += ["w"] * k
            elif k >= 0:
                letters += [name] * k
            else:
                letters += [f"{name}^-1"] * (-k)
        return cls(letters)

    def __add__(self, other: "ModWord") -> "ModWord":
        return ModWord(self.letters + other.letters)

    def matrix(self) -> ProjMatrix:
        m = IDENTITY
        for x in self.letters:
            m = m @ _LETTERS[x]
        return m

    def __len__(self):
        return len(self.letters)

    def __eq__(self, other):
        return isinstance(other, ModWord) and self.letters == other.letters

    def __hash__(self):
        return hash(self.letters)

    def __str__(self):
        if not self.letters:
            return "1"
        out = []
        for name, grp in itertools.groupby(self.letters):
            k = len(list(grp))
            if name.endswith("^-1"):
                base = name[:-3]
                out.append(f"{base}^-{k}" if k > 1 else name)
            else:
                out.append(f"{name}^{k}" if k > 1 else name)
        return " ".join(out)

    __repr__ = __str__


_X = ModWord(["v^-1", "w", "v"])  # v^-1 w v


@lru_cache(maxsize=None)
def s3_words() -> tuple[ModWord, ...]:
    """The six elements of the S3 generated by w and v^-1 w v, as short words."""
    found: list[ModWord] = [ModWord()]
    frontier = [ModWord()]
    gens = [ModWord(["w"]), _X]
    while frontier:
        nxt = []
        for word in frontier:
            for g in gens:
                cand = word + g
                if not any(same_coset(cand.matrix(), f.matrix()) for f in found):
                    found.append(cand)
                    nxt.append(cand)
        frontier = nxt
    return tuple(found)


def _power(name: str, k: int) -> ModWord:
    return ModWord([name] * k)


@dataclass(frozen=True)
class MAutReport:
    elements: tuple[ModWord, ...]
    order: int
    normalizes_gamma0: bool
    w_squared_trivial: bool
    v_cubed_trivial: bool
    t_cubed_scalar: bool
    s3_normal: bool
    central_factor: ModWord | None

    def ok(self) -> bool:
        return (
            self.order == 18
            and self.normalizes_gamma0
            and self.w_squared_trivial
            and self.v_cubed_trivial
            and self.t_cubed_scalar
            and self.s3_normal
            and self.central_factor is not None
        )


def _coset_index(m: ProjMatrix, pool) -> int | None:
    for i, e in enumerate(pool):
        if same_coset(m, e.matrix()):
            return i
    return None


def maut_group() -> MAutReport:
    """Enumerate MAut(X_0(243)) and check it splits as S3 x Z/3.

    v normalizes S3 but does not centralize it modulo Gamma_0(243): it acts
    on S3 by an inner automorphism.  The Z/3 factor commuting with S3 is
    generated by v times a suitable 3-cycle; it is returned as central_factor.
    """
    s3 = s3_words()
    elems = []
    for s in s3:
        for j in range(3):
            word = s + _power("v", j)
            if _coset_index(word.matrix(), elems) is None:
                elems.append(word)
    normalizes = all(
        in_gamma0(e.matrix() @ g @ e.matrix().adjugate())
        for e in elems
        for g in (ProjMatrix(1, 1, 0, 1), ProjMatrix(1, 0, 243, 1), ProjMatrix(122, 1, 243, 2))
    )
    v_inv = V.adjugate()
    s3_normal = all(_coset_index(V @ s.matrix() @ v_inv, s3) is not None for s in s3)
    central = None
    for s in s3:
        z = _power("v", 1) + s
        zm = z.matrix()
        if in_gamma0(zm @ zm @ zm) and all(same_coset(zm @ x.matrix(), x.matrix() @ zm) for x in s3):
            central = z
            break
    w2 = in_gamma0(Winv @ Winv)
    v3 = in_gamma0(V @ V @ V)
    t3 = (T @ T @ T).is_scalar()
    return MAutReport(tuple(elems), len(elems), normalizes, w2, v3, t3, s3_normal, central)


# ---------------------------------------------------------------------------
# induced action on E9


@dataclass(frozen=True)
class AffineE9:
    """Z -> w^a_exp Z + b_mult * (0, w) on E9; exponents taken mod 3."""

    a_exp: int
    b_mult: int

    def __post_init__(self):
        object.__setattr__(self, "a_exp", self.a_exp % 3)
        object.__setattr__(self, "b_mult", self.b_mult % 3)

    def compose(self, inner: "AffineE9") -> "AffineE9":
        # (0, w) is fixed by [w], so the translation parts simply add
        return AffineE9(self.a_exp + inner.a_exp, self.b_mult + inner.b_mult)

    def __str__(self):
        a = ["", "w ", "w^2 "][self.a_exp]
        b = ["", " + (0,w)", " + (0,w^2)"][self.b_mult]
        return f"Z -> {a}Z{b}"


_LETTER_ACTION = {
    "w": AffineE9(0, 0),
    "v": AffineE9(2, 0),
    "v^-1": AffineE9(1, 0),
    "t": AffineE9(2, 1),
    "t^-1": AffineE9(1, 2),
}


def induced_e9_action(word: ModWord) -> AffineE9:
    """Affine map of E9 induced by the word: S3 acts trivially, v by w^2, t by w^2 Z + (0, w)."""
    if isinstance(word, str):
        word = ModWord.parse(word)
    out = AffineE9(0, 0)
    for x in word.letters:
        if x not in _LETTER_ACTION:
            raise StructureError(f"letter {x!r} does not act on E9")
        out = out.compose(_LETTER_ACTION[x])
    return out


def search_candidates() -> list[ModWord]:
    """The 54 words s t^i v^j, s in S3."""
    return [s + _power("t", i) + _power("v", j) for i in range(3) for j in range(3) for s in s3_words()]


def _search_taus(src, dst):
    t1 = src.tau if isinstance(src, NormalizedIsogeny) else src
    t2 = dst.tau if isinstance(dst, NormalizedIsogeny) else dst
    if isinstance(src, NormalizedIsogeny) and isinstance(dst, NormalizedIsogeny):
        if src.conductor != dst.conductor:
            raise ValueError("points have different conductors")
    return t1, t2


def matching_words(src: NormalizedIsogeny | CycloNumber, dst: NormalizedIsogeny | CycloNumber) -> list[ModWord]:
    """All words s t^i v^j sending src.tau to a Gamma_0(243)-equivalent of dst.tau.

    More than one word can match when the image is fixed by an involution of S3;
    all matches then induce the same map on E9.
    """
    t1, t2 = _search_taus(src, dst)
    return [w for w in search_candidates() if gamma0_equivalent(w.matrix().act(t1), t2) is not None]


def automorphism_search(src: NormalizedIsogeny | CycloNumber, dst: NormalizedIsogeny | CycloNumber) -> ModWord:
    """First word A among s t^i v^j with A(src.tau) Gamma_0(243)-equivalent to dst.tau."""
    t1, t2 = _search_taus(src, dst)
    for word in search_candidates():
        if gamma0_equivalent(word.matrix().act(t1), t2) is not None:
            return word
    raise SearchFailure(f"no element s t^i v^j maps {t1} to {t2}")
