import json
from fractions import Fraction

import pytest
from conftest import construct_cached

from mockheegner import heegner
from mockheegner.cyclofield import W, chi3_class, conductor_of_lattice
from mockheegner.ellcurve import CurvePoint, Fermat, mul
from mockheegner.etaeval import PrecisionContext
from mockheegner.heegner import (
    CASE_M,
    StageError,
    base_lattices,
    base_point,
    certificate,
    check_prime,
    compare_with_table,
    conjugate_points,
    construct,
    default_digits,
    recognize_cyclo,
    rho_class,
    shimura_report,
    sigma_class,
)
from mockheegner.modcurve import gamma0_equivalent


def test_input_validation():
    with pytest.raises(ValueError, match="unsupported"):
        check_prime(11)
    with pytest.raises(ValueError, match="not prime"):
        check_prime(49)
    with pytest.raises(ValueError):
        check_prime(7, 3)
    assert default_digits(7) == 120 and default_digits(43) == 344


@pytest.mark.parametrize("case", [1, 2])
def test_base_point(case):
    P0 = base_point(7, case)
    assert P0.conductor == 63
    assert all(conductor_of_lattice(L) == 63 for L in base_lattices(7, case))
    assert gamma0_equivalent(P0.tau, CASE_M[case].act(W * Fraction(7, 9))) is not None


@pytest.mark.parametrize("p", [7, 13, 31])
def test_conjugate_points(p):
    pts = conjugate_points(p, 2)
    assert len(pts) == (p - 1) // 3
    P0 = base_point(p, 2)
    assert sum(gamma0_equivalent(P.tau, P0.tau) is not None for P in pts) == 1
    # distinct points of X0(243)
    for i, P in enumerate(pts):
        for Q in pts[i + 1 :]:
            assert gamma0_equivalent(P.tau, Q.tau) is None


def test_galois_classes():
    for p in (7, 13, 31, 43):
        assert chi3_class(rho_class(p)) == W
        assert chi3_class(sigma_class(p)) == 1


def test_recognition():
    ctx = PrecisionContext(60)
    z = (W * Fraction(-3, 7) + Fraction(5, 11)).to_complex(ctx.mp)
    assert recognize_cyclo(z, 60) == W * Fraction(-3, 7) + Fraction(5, 11)
    assert recognize_cyclo(ctx.mp.pi + 0j, 60) is None


# -- the construction ----------------------------------------------------------


def table_point(p, case):
    row = heegner.published_tables()[f"case{case}"]["rows"][str(p)]
    return CurvePoint(Fermat(p**case), Fraction(row["point"]["x"]), Fraction(row["point"]["y"]))


@pytest.mark.parametrize("p, case, k", [(7, 1, -4), (7, 2, 2), (13, 1, -1), (13, 2, -1)])
def test_construct_small(p, case, k):
    rep = construct_cached(p, case)
    assert rep.verdict == "nontorsion"
    P = rep.point
    assert P.model == Fermat(p**case) and P.is_rational() and P.on_curve()
    assert P == mul(k, table_point(p, case))
    assert rep.comparison == {"status": "MATCH", "multiple": k}
    assert rep.conjugates == (p - 1) // 3


@pytest.mark.parametrize("case", [1, 2])
def test_construct_torsion(case):
    rep = construct_cached(61, case)
    assert rep.verdict == "torsion"
    assert rep.point is None or rep.point.is_infinity
    assert rep.comparison["status"] == "MATCH"
    assert rep.certificate["three_is_cube"]


def test_construct_is_deterministic():
    a = construct(7, 2, table=False)
    b = construct(7, 2, table=False)
    assert a.to_json(timings=False) == b.to_json(timings=False)


def test_report_schema():
    d = json.loads(construct_cached(13, 1).to_json())
    assert {"p", "case", "model", "curve", "verdict", "digits", "conjugates", "certificate", "point", "timings"} <= set(d)
    assert d["curve"] == "x^3+y^3=13" and d["model"] == "fermat"
    X, Y, Z = (int(t) for t in d["point"]["projective"].strip("()").split(":"))
    assert X**3 + Y**3 == 13 * Z**3
    assert Fraction(d["point"]["x"]) == Fraction(X, Z)
    assert "timings" not in json.loads(construct_cached(13, 1).to_json(timings=False))


def test_stage_errors():
    with pytest.raises(StageError) as e:
        construct(11, 1)
    assert e.value.stage == "input"
    assert str(e.value).startswith("[input] ValueError")


def test_compare_detects_mismatch():
    rep = construct_cached(13, 1)
    fake = {"case1": {"rows": {"13": {"point": {"x": "2", "y": "-1"}}}}}
    assert compare_with_table(rep, fake)["status"] == "DIFFER"
    assert compare_with_table(rep, {"case1": {"rows": {}}})["status"] == "NO ROW"


# -- certificates --------------------------------------------------------------


@pytest.mark.parametrize("p, cube", [(7, False), (13, False), (61, True), (103, True)])
def test_certificate(p, cube):
    c = certificate(p)
    assert c["three_is_cube"] == cube
    assert c["disjoint"] == (not cube) == c["theorem_applies"]
    assert pow(c["u"], 3, p) == 1 and c["u"] != 1


def test_certificate_shapes_p7():
    c = certificate(7)
    assert c["torsion_shapes"] == [(0, 0), (1, 1), (2, 4), (4, 2)]
    assert not set(c["predicted_shapes"]) & set(c["torsion_shapes"])


# -- Galois action -------------------------------------------------------------


@pytest.mark.parametrize("p", [7, 13, 31, 43])
@pytest.mark.parametrize("case", [1, 2])
def test_shimura_report(p, case):
    r = shimura_report(p, case)
    assert r["ok"]
    assert r["rho"]["map"] == "Z -> w Z"
    assert r["sigma"]["chi3"] == "1"
    assert (r["rho"]["target_equivalent"] is None) == (case == 1)
