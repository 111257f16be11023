import os
import subprocess
import sys
from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mockheegner import _kernels_py, kernels
from mockheegner.cyclofield import CycloNumber, W
from mockheegner.ellcurve import (
    E9,
    CurveError,
    CurvePoint,
    EtaModel,
    Fermat,
    ShortW,
    canonical_height,
    cubic_twist,
    e1_3torsion_shapes,
    is_three_cube,
    model_transport,
    mul,
    mul_endo,
    naive_height,
    negate,
    omega_map,
    primitive_cube_root,
    torsion_list,
)

# a rational point of infinite order on each model, from (2:-1:1) on x^3 + y^3 = 7
P7 = CurvePoint.from_projective(Fermat(7), 2, -1, 1)
MODELS = [Fermat(7), EtaModel(7), ShortW(7)]


def generator(model):
    return model_transport(P7, model)


def points(model):
    P = generator(model)
    return st.integers(-4, 4).map(lambda k: mul(k, P))


# -- group law -----------------------------------------------------------------


@pytest.mark.parametrize("model", MODELS, ids=str)
@settings(max_examples=100)
@given(data=st.data())
def test_group_axioms(model, data):
    P, Q, R = (data.draw(points(model)) for _ in range(3))
    O = CurvePoint.infinity(model)
    for X in (P, Q, R):
        assert X.on_curve()
    assert P + O == P
    assert P + Q == Q + P
    assert (P + Q) + R == P + (Q + R)
    assert P + negate(P) == O


@given(st.integers(-6, 6), st.integers(-6, 6))
def test_multiplication_is_additive(a, b):
    P = generator(EtaModel(7))
    assert mul(a, P) + mul(b, P) == mul(a + b, P)


def test_k_points_group_law():
    # [w] P has coordinates in K; the axioms hold there too
    P = generator(EtaModel(7))
    Q = omega_map(P)
    assert Q.on_curve() and not Q.is_rational()
    assert (P + Q) + Q == P + (Q + Q)
    assert P + Q - Q == CurvePoint(P.model, CycloNumber(P.x), CycloNumber(P.y))


def test_exact_and_complex_group_law_agree():
    mp = mpmath.MPContext()
    mp.dps = 40
    P = generator(EtaModel(7))
    Q = mul(3, P)
    num = lambda X: CurvePoint(X.model, mp.mpc(X.x.numerator) / X.x.denominator, mp.mpc(X.y.numerator) / X.y.denominator)
    assert (num(P) + num(Q)).close_to(P + Q, mp.mpf(10) ** -30)
    assert (num(P) + num(P)).close_to(mul(2, P), mp.mpf(10) ** -30)


def test_mixed_inputs_rejected():
    mp = mpmath.MPContext()
    with pytest.raises(CurveError):
        generator(EtaModel(7)) + generator(Fermat(7))
    P = generator(EtaModel(7))
    with pytest.raises(CurveError):
        P + CurvePoint(P.model, mp.mpc(1), mp.mpc(2))


# -- transports ----------------------------------------------------------------


def test_fermat_to_eta():
    Q = model_transport(P7, EtaModel(7))
    assert (Q.x, Q.y) == (1, 4)
    assert model_transport(Q, Fermat(7)) == P7
    inf = CurvePoint.infinity(Fermat(7))
    assert model_transport(inf, EtaModel(7)).is_infinity
    assert inf.projective() == (1, -1, 0)


def test_transport_scaling():
    Q = model_transport(P7, Fermat(56))
    assert Q.on_curve()
    assert model_transport(Q, Fermat(7)) == P7
    with pytest.raises(CurveError):
        model_transport(P7, Fermat(14))


@pytest.mark.parametrize("model", MODELS, ids=str)
def test_transport_round_trip(model):
    for k in (1, 2, -3):
        P = mul(k, generator(model))
        for other in MODELS:
            assert model_transport(model_transport(P, other), model) == P


def test_projective_normalization():
    P = mul(2, P7)
    X, Y, Z = P.projective()
    assert Z > 0 and X**3 + Y**3 == 7 * Z**3
    assert str(P7) == "fermat(7): (2:-1:1)"


# -- torsion and endomorphisms -------------------------------------------------


def test_torsion_lists():
    E1 = EtaModel(1)
    K = torsion_list(E1, "K")
    assert len(K) == 9 and len(set(K)) == 9
    assert all(mul(3, P).is_infinity for P in K)
    assert len(torsion_list(E1, "Q")) == 3
    assert torsion_list(Fermat(7), "Q") == [CurvePoint.infinity(Fermat(7))]
    with pytest.raises(CurveError):
        torsion_list(EtaModel(7), "K")


def test_fermat_one_torsion():
    P = CurvePoint.from_projective(Fermat(1), 1, 0, 1)
    assert not P.is_infinity and mul(3, P).is_infinity


def test_e9_torsion():
    A, B = CurvePoint(E9, CycloNumber(0), W), CurvePoint(E9, CycloNumber(0), W * W)
    assert A.on_curve() and B.on_curve()
    assert (A + B).is_infinity


def test_endomorphisms():
    P = generator(EtaModel(7))
    assert mul_endo(CycloNumber(1, 2), mul_endo(CycloNumber(1, 2), P)) == mul_endo(-3, P)
    assert omega_map(omega_map(omega_map(P))) == mul_endo(1, P)
    Q = mul_endo(W, P)
    assert Q + mul_endo(W * W, P) + mul_endo(1, P) == CurvePoint.infinity(P.model)
    with pytest.raises(CurveError):
        mul_endo(CycloNumber(Fraction(1, 2)), P)


def test_cubic_twist():
    P = CurvePoint(EtaModel(1), 1, -2)
    Q = cubic_twist(P, 8)
    assert Q.model == EtaModel(8) and Q.x == Fraction(1, 2) and Q.y == -2
    assert Q.on_curve()
    R = generator(EtaModel(7))
    assert cubic_twist(cubic_twist(R, 8), Fraction(1, 8)) == R
    assert cubic_twist(R, 27).on_curve()
    with pytest.raises(CurveError):
        cubic_twist(R, 2)
    with pytest.raises(CurveError):
        cubic_twist(P7, 8)


def test_cubic_twist_numeric():
    mp = mpmath.MPContext()
    mp.dps = 30
    T = CurvePoint(EtaModel(1), mp.mpc(1), mp.mpc(-2))
    S = cubic_twist(T, 7)
    assert S.on_curve()
    assert abs(S.x - 1 / mp.cbrt(7)) < 1e-25


# -- heights -------------------------------------------------------------------


def test_height_is_quadratic():
    P = generator(EtaModel(7))
    h = canonical_height(P)
    assert h > 0
    for k in (2, 3, -5):
        assert abs(canonical_height(mul(k, P)) - k * k * h) < 1e-8 * k * k
    assert canonical_height(model_transport(P, Fermat(7))) == pytest.approx(h, rel=1e-12)


def test_height_approximated_by_naive_heights():
    P = generator(ShortW(7))
    h = canonical_height(P)
    k = 6
    assert abs(naive_height(mul(2**k, P)) / 4**k - h) < 0.01


def test_height_of_torsion():
    for P in torsion_list(EtaModel(1), "Q"):
        assert canonical_height(P) == 0.0


# -- arithmetic modulo p -------------------------------------------------------


def test_three_is_cube():
    assert not is_three_cube(7)
    assert is_three_cube(61)
    assert [p for p in (7, 13, 31, 43, 61, 67, 79, 97, 103) if is_three_cube(p)] == [61, 67, 103]
    with pytest.raises(ValueError):
        is_three_cube(11)


def test_cube_roots_and_shapes():
    assert primitive_cube_root(7) == 2
    assert e1_3torsion_shapes(7) == {(0, 0), (1, 1), (2, 4), (4, 2)}


@pytest.mark.parametrize("p", [7, 13, 31, 43, 61])
def test_shapes_match_reduction(p):
    # reduce the K-torsion of y^2 + y = 3x^3 - 1 at the two primes above p
    u = primitive_cube_root(p)
    red = lambda c, r: int((c.a + c.b * r) % p)
    pts = [CurvePoint(EtaModel(1), CycloNumber.coerce(P.x), CycloNumber.coerce(P.y)) for P in torsion_list(EtaModel(1), "K") if not P.is_infinity]
    xs = {(red(P.x, u), red(P.x, u * u % p)) for P in pts}
    assert xs == e1_3torsion_shapes(p)


# -- compiled kernels ----------------------------------------------------------


def brute_force_ap(n, ell):
    count = sum(1 for x in range(ell) if (x**3 + 1) % ell == 0)  # (x:1:0) with x^3 = -1
    for x in range(ell):
        for y in range(ell):
            if (x**3 + y**3 - n) % ell == 0:
                count += 1
    return ell + 1 - count


@pytest.mark.parametrize("n", [7, 13, 2 * 2 * 7])
def test_ap_brute_force(n):
    primes = [q for q in range(5, 50) if all(q % d for d in range(2, q)) and q % 3 == 1 and n % q]
    assert kernels.ap_batch(n, primes) == [brute_force_ap(n, q) for q in primes]


def test_backends_agree():
    primes = [q for q in range(2, 400) if all(q % d for d in range(2, int(q**0.5) + 1))]
    ap = kernels.ap_batch(1813, primes)
    assert ap == _kernels_py.ap_batch(1813, primes)
    table = dict(zip(primes, ap))
    assert kernels.an_table(table, [3, 7, 37], 400) == _kernels_py.an_table(table, [3, 7, 37], 400)
    a, b = list(range(-20, 40)), [3, -1, 4, 1, -5, 9] * 10
    assert kernels.series_mul(a, b, 50) == _kernels_py.series_mul(a, b, 50)
    big = [10**15] * 5
    assert kernels.series_mul(big, big, 5) == _kernels_py.series_mul(big, big, 5)


def test_pure_python_switch():
    code = "from mockheegner import kernels; print(kernels.BACKEND)"
    env = dict(os.environ, MOCKHEEGNER_PURE="1")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"
    assert kernels.BACKEND in ("cython", "python")
