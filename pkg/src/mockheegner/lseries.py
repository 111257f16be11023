"""Central L-values of E_n : x^3 + y^3 = n.

a_ell comes from counting points over F_ell.  With conductor N and root
number +1,

    L(E_n, 1) = 2 sum_{m >= 1} (a_m / m) exp(-2 pi m / sqrt N),

and L_alg = L(E_n, 1) * 2 pi cbrt(n) / (sqrt 3 Gamma(1/3)^3).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from pathlib import Path

import mpmath

from . import kernels

__all__ = [
    "a_ell",
    "primes_below",
    "dirichlet_coefficients",
    "LValue",
    "l_value",
    "l_alg",
    "symmetry_defect",
    "find_conductor",
    "load_conductors",
    "conductor_for",
    "TermCountError",
    "write_conductor_table",
]


class TermCountError(RuntimeError):
    pass


def primes_below(M: int) -> list[int]:
    if M < 3:
        return []
    sieve = bytearray([1]) * M
    sieve[0] = sieve[1] = 0
    for i in range(2, math.isqrt(M - 1) + 1):
        if sieve[i]:
            sieve[i * i :: i] = bytearray(len(range(i * i, M, i)))
    return [i for i in range(M) if sieve[i]]


def _prime_factors(n: int) -> list[int]:
    out, d = [], 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


def a_ell(n: int, ell: int) -> int:
    """Trace of Frobenius of x^3 + y^3 = n z^3 at the prime ell (0 at primes dividing 3n)."""
    return kernels.ap_batch(n, [ell])[0]


@lru_cache(maxsize=32)
def dirichlet_coefficients(n: int, M: int) -> tuple[int, ...]:
    """(a_0 = 0, a_1, ..., a_{M-1})."""
    ps = primes_below(M)
    ap = dict(zip(ps, kernels.ap_batch(n, ps)))
    bad = [3] + [q for q in _prime_factors(n) if q != 3]
    return tuple(kernels.an_table(ap, bad, M))


def _context(digits: int):
    mp = mpmath.MPContext()
    mp.dps = digits + 10
    return mp


def _terms_needed(N: int, digits: int, t: float = 1.0) -> int:
    # exp(-2 pi m t / sqrt N) < 10^-digits, with room for the sqrt(N) m growth of the tail
    margin = digits + 3 + math.log10(N)
    return int(math.sqrt(N) * margin * math.log(10) / (2 * math.pi * t)) + 10


def symmetry_defect(n: int, N: int, t: float = 1.1, digits: int = 20) -> tuple[float, int]:
    """Relative defect of theta(1/t) = eps t^2 theta(t), theta(t) = sum a_m exp(-2 pi m t / sqrt N).

    Returns (smallest defect over eps = +1, -1, that eps).
    """
    mp = _context(digits)
    M = _terms_needed(N, digits, 1 / t)
    an = dirichlet_coefficients(n, M)
    sN = mp.sqrt(N)

    def theta(s):
        q = mp.exp(-2 * mp.pi * s / sN)
        total, qm = mp.mpf(0), mp.mpf(1)
        for m in range(1, M):
            qm *= q
            if an[m]:
                total += an[m] * qm
        return total

    g1, g2 = theta(mp.mpf(1) / t), theta(mp.mpf(t))
    scale = max(abs(g1), abs(t * t * g2), mp.mpf(10) ** (-digits))
    best = min(((abs(g1 - eps * t * t * g2) / scale, eps) for eps in (1, -1)), key=lambda z: z[0])
    return float(best[0]), best[1]


def find_conductor(n: int, digits: int = 20) -> tuple[int, int]:
    """Conductor 3^e prod_{ell | n, ell != 3} ell^2 (2 <= e <= 5) passing the symmetry test, with its sign."""
    rest = 1
    for q in _prime_factors(n):
        if q != 3:
            rest *= q * q
    hits = []
    for e in range(2, 6):
        N = 3**e * rest
        d, eps = symmetry_defect(n, N, digits=digits)
        if d < 10 ** (-digits // 2):
            hits.append((N, eps))
    if len(hits) != 1:
        raise ValueError(f"conductor of E_{n} not determined: candidates {hits}")
    return hits[0]


def load_conductors(path: str | Path | None = None) -> dict[int, dict]:
    """n -> {"N": conductor, "sign": root number} from the JSON table."""
    if path is None:
        text = resources.files("mockheegner").joinpath("data/conductors.json").read_text()
    else:
        text = Path(path).read_text()
    raw = json.loads(text)
    return {int(k): v for k, v in raw.items()}


def conductor_for(n: int, table: dict | None = None) -> tuple[int, int]:
    table = load_conductors() if table is None else table
    if n in table:
        return table[n]["N"], table[n]["sign"]
    return find_conductor(n)


@dataclass(frozen=True)
class LValue:
    n: int
    N: int
    sign: int
    value: object  # mpf
    error: float
    terms: int

    def __float__(self):
        return float(self.value)


def l_value(n: int, N: int | None = None, digits: int = 15, terms: int | None = None, sign: int | None = None) -> LValue:
    """L(E_n, 1) by the exponentially convergent series; zero when the root number is -1."""
    if N is None:
        N, sign = conductor_for(n)
    if sign is None:
        _, sign = symmetry_defect(n, N)
    mp = _context(digits)
    M = terms if terms is not None else _terms_needed(N, digits)
    if sign == -1:
        return LValue(n, N, sign, mp.mpf(0), 0.0, 0)
    an = dirichlet_coefficients(n, M)
    q = mp.exp(-2 * mp.pi / mp.sqrt(N))
    total, qm = mp.mpf(0), mp.mpf(1)
    for m in range(1, M):
        qm *= q
        if an[m]:
            total += mp.mpf(an[m]) / m * qm
    # |a_m| <= d(m) sqrt(m) < m for large m, so the tail is below a geometric sum
    tail = float(2 * qm * M / (1 - q))
    if tail > 10 ** (-digits + 2) * max(1, abs(float(total))):
        raise TermCountError(f"{M} terms leave a tail of {tail:.2e}")
    return LValue(n, N, sign, 2 * total, tail, M)


def l_alg(n: int, N: int | None = None, digits: int = 15, terms: int | None = None, sign: int | None = None):
    """(L_alg(E_n, 1), nearest integer, flag); the flag is set when the value is more than 0.01 from an integer."""
    L = l_value(n, N, digits, terms, sign)
    mp = _context(digits)
    factor = 2 * mp.pi * mp.cbrt(n) / (mp.sqrt(3) * mp.gamma(mp.mpf(1) / 3) ** 3)
    val = mp.mpf(L.value) * factor
    k = int(mp.nint(val))
    return val, k, abs(val - k) > 0.01


def write_conductor_table(ns, path: str | Path) -> dict:
    """Derive conductors and root numbers for each n and store them as JSON."""
    table = {}
    for n in sorted(set(ns)):
        N, sign = find_conductor(n)
        table[str(n)] = {"N": N, "sign": sign}
    Path(path).write_text(json.dumps(table, indent=1) + "\n")
    return table
