import time
from fractions import Fraction

import mpmath
import pytest
from hypothesis import given
from hypothesis import strategies as st

from mockheegner.qseries import (
    F_QUOTIENT,
    STURM_BOUND,
    X_QUOTIENT,
    EtaQuotient,
    QSeries,
    TruncationError,
    expand,
    ligozat_check,
    verify_weierstrass_identity,
    xy_series,
)


def naive_eta_product(exponents, nterms):
    """prod (1 - q^{dn})^{r_d} as a plain coefficient list, by repeated multiplication."""
    out = [1] + [0] * (nterms - 1)
    for d, r in exponents.items():
        for n in range(1, nterms):
            if d * n >= nterms:
                break
            factor = [0] * nterms
            factor[0] = 1
            factor[d * n] = -1
            if r < 0:  # 1/(1 - q^k) = sum q^{jk}
                factor = [1 if i % (d * n) == 0 else 0 for i in range(nterms)]
            for _ in range(abs(r)):
                out = [sum(out[i] * factor[k - i] for i in range(k + 1)) for k in range(nterms)]
    return out


def test_x_quotient_expansion():
    x = expand(X_QUOTIENT, 5)
    assert x.valuation == -2
    assert x.leading() == 1
    assert x.coeffs == naive_eta_product({9: 1, 27: 1, 3: -1, 81: -1}, len(x.coeffs))


def test_eta_expansion():
    e = expand(EtaQuotient({1: 1}, 1), 2)
    assert e.valuation == Fraction(1, 24)
    assert e.coefficient(Fraction(1, 24)) == 1
    assert e.coefficient(Fraction(25, 24)) == -1


def test_f_quotient_expansion():
    f = expand(F_QUOTIENT, 30)
    assert f.valuation == 1
    assert all(isinstance(c, int) for c in f.coeffs)
    assert f.coeffs == naive_eta_product({27: 1, 3: -1}, len(f.coeffs))


@given(
    st.dictionaries(st.sampled_from([1, 3, 9, 27, 81]), st.integers(-3, 3), max_size=3),
    st.dictionaries(st.sampled_from([1, 3, 9, 27, 81]), st.integers(-3, 3), max_size=3),
)
def test_expand_is_multiplicative(e1, e2):
    a, b = EtaQuotient(e1, 81), EtaQuotient(e2, 81)
    order = Fraction(max(a.val24, b.val24, (a * b).val24, 0), 24) + 6
    prod = expand(a, order) * expand(b, order)
    direct = expand(a * b, order)
    lo = max(prod.valuation, direct.valuation)
    for k in range(int(lo * 24), int(min(prod.order, direct.order) * 24)):
        e = Fraction(k, 24)
        assert prod.coefficient(e) == direct.coefficient(e)


def test_ligozat():
    assert ligozat_check(X_QUOTIENT, 243).is_function_on_gamma0
    assert ligozat_check(F_QUOTIENT, 81).is_function_on_gamma0
    eta = ligozat_check(EtaQuotient({1: 1}, 1), 1)
    assert not eta.is_function_on_gamma0
    assert eta.details()["weight zero"] is False


def test_ligozat_reports_each_condition():
    rep = ligozat_check(EtaQuotient({3: 1, 9: -1}, 27), 27)
    d = rep.details()
    assert len(d) == 4
    assert d["weight zero"] is True
    assert not rep.is_function_on_gamma0


def test_xy_valuations():
    x, y = xy_series(4)
    assert x.valuation == -2 and x.leading() == 1
    assert y.valuation == -3
    plus2 = y + QSeries.constant(2, y.prec24)
    assert plus2.valuation == -3


def test_identity_certified():
    t = time.perf_counter()
    res = verify_weierstrass_identity(250)
    assert res.residual == 0
    assert res.certified and res.note == "certified"
    assert time.perf_counter() - t < 30


def test_identity_below_bound_is_flagged():
    res = verify_weierstrass_identity(50)
    assert res.residual == 0
    assert not res.certified
    assert "below certification bound" in res.note
    assert STURM_BOUND == 189


def test_identity_negative_control():
    res = verify_weierstrass_identity(60, EtaQuotient({9: 1, 27: 1, 3: -9, 81: -1}, 243))
    assert res.residual != 0


def test_truncation_error():
    with pytest.raises(TruncationError):
        verify_weierstrass_identity(10)
    with pytest.raises(TruncationError):
        expand(X_QUOTIENT, -3)


def test_dump_format():
    lines = expand(F_QUOTIENT, 3).dump().splitlines()
    assert lines[0] == "24/24\t1"
    num, coef = lines[1].split("\t")
    assert num.endswith("/24") and int(coef) == int(coef)


def test_series_inverse():
    f = expand(F_QUOTIENT, 20)
    one = f * f.inverse()
    assert one.coefficient(0) == 1
    assert all(one.coefficient(Fraction(k)) == 0 for k in range(1, 15))


def test_evaluation_matches_eta_evaluation():
    from mockheegner.etaeval import PrecisionContext, eval_x

    ctx = PrecisionContext(30)
    tau = ctx.mp.mpc(0.1, 0.3)
    x = expand(X_QUOTIENT, 60)
    # |q| = e^{-0.6 pi}; the truncation error is below |q|^60
    assert abs(x.evaluate(tau, ctx.mp) - eval_x(tau, ctx)) < mpmath.mpf(10) ** -25
