"""Pure Python versions of the hot loops; the compiled module mirrors these."""


def count_fermat(n: int, ell: int) -> int:
    """Number of projective points of x^3 + y^3 = n z^3 over F_ell (ell prime, ell not dividing 3n)."""
    n %= ell
    cubes = [0] * ell
    for x in range(ell):
        cubes[x * x * x % ell] += 1
    affine = 0
    for x in range(ell):
        affine += cubes[(n - x * x * x) % ell]
    # points with z = 0: y^3 = -x^3, one for each cube root of -1
    return affine + cubes[ell - 1]


def ap_batch(n: int, primes) -> list:
    """a_ell = ell + 1 - #E(F_ell) for ell not dividing 3n, and 0 otherwise."""
    out = []
    for ell in primes:
        if ell == 3 or n % ell == 0:
            out.append(0)
        elif ell % 3 == 2:
            out.append(0)
        else:
            out.append(ell + 1 - count_fermat(n, ell))
    return out


def an_table(ap: dict, bad, M: int) -> list:
    """Dirichlet coefficients a_1..a_{M-1} (index 0 unused) from the a_ell."""
    an = [0] * M
    if M > 1:
        an[1] = 1
    spf = list(range(M))
    i = 2
    while i * i < M:
        if spf[i] == i:
            for j in range(i * i, M, i):
                if spf[j] == j:
                    spf[j] = i
        i += 1
    badset = set(bad)
    for m in range(2, M):
        ell = spf[m]
        k, r = 0, m
        while r % ell == 0:
            r //= ell
            k += 1
        if r > 1:
            an[m] = an[r] * an[m // r]
            continue
        # m = ell^k
        if ell in badset:
            an[m] = ap[ell] ** k
        elif k == 1:
            an[m] = ap[ell]
        else:
            an[m] = ap[ell] * an[m // ell] - ell * an[m // (ell * ell)]
    return an


def series_mul(a, b, length: int) -> list:
    """First `length` coefficients of the product of two integer power series."""
    out = [0] * length
    la, lb = min(len(a), length), min(len(b), length)
    for i in range(la):
        ai = a[i]
        if ai:
            top = min(lb, length - i)
            for j in range(top):
                out[i + j] += ai * b[j]
    return out
