from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from mockheegner.cyclofield import CycloNumber, Lattice, W, conductor_of_lattice
from mockheegner.modcurve import (
    IDENTITY,
    T,
    V,
    AffineE9,
    ModWord,
    ProjMatrix,
    SearchFailure,
    StructureError,
    Winv,
    automorphism_search,
    gamma0_equivalent,
    in_gamma0,
    induced_e9_action,
    isogeny_between,
    matching_words,
    maut_group,
    normalize_isogeny,
    reduce_to_fundamental_domain,
    s3_words,
    same_coset,
    search_candidates,
)


def lat(*gens):
    return Lattice.from_generators([CycloNumber.coerce(g) for g in gens])


def base_pair(p, j):
    return lat(1, W * Fraction(p, 9)), lat(1, (W * p + j) / 27)


gamma0 = st.tuples(st.integers(-4, 4), st.integers(-6, 6), st.integers(-3, 3)).map(
    lambda t: ProjMatrix(1 + t[1] * 243 * t[0], t[1], 243 * t[0], 1) @ ProjMatrix(1, t[2], 0, 1)
)
cm_points = st.tuples(st.integers(-40, 40), st.integers(1, 30), st.sampled_from([1, 3, 9, 27, 81, 243])).map(
    lambda t: (W * t[1] + t[0]) / t[2]
)


# -- matrices and words --------------------------------------------------------


def test_generators():
    assert T @ T @ T == ProjMatrix(729, 0, 0, 729)
    assert (T @ T @ T).is_scalar()
    assert (Winv @ Winv).is_scalar()
    assert in_gamma0(V @ V @ V)


def test_projective_equality():
    assert ProjMatrix(2, 0, 0, 2) == IDENTITY
    assert ProjMatrix(-1, 0, 0, -1) == IDENTITY
    assert ProjMatrix.parse(str(T)) == T


@given(st.lists(st.sampled_from(["w", "v", "v^-1", "t", "t^-1"]), max_size=6), st.lists(st.sampled_from(["w", "v", "t"]), max_size=6))
def test_word_matrix_respects_composition(a, b):
    u, v = ModWord(a), ModWord(b)
    assert (u + v).matrix() == u.matrix() @ v.matrix()


def test_word_parsing():
    assert ModWord.parse("(v^-1 w v w) v^2") == ModWord(["v^-1", "w", "v", "w", "v", "v"])
    assert str(ModWord.parse("w v^-1 w v t^2 v^2")) == "w v^-1 w v t^2 v^2"
    assert ModWord().matrix() == IDENTITY
    with pytest.raises(StructureError):
        ModWord.parse("x")


def test_maut_group():
    rep = maut_group()
    assert rep.order == 18 and len(rep.elements) == 18
    assert rep.ok()
    assert rep.t_cubed_scalar and rep.w_squared_trivial and rep.v_cubed_trivial
    assert rep.s3_normal
    assert str(rep.central_factor) == "v w v^-1 w v"


def test_rho_matrix_coset():
    A = ProjMatrix(327, 2, 53460, 327)
    assert same_coset(A, ModWord.parse("(v^-1 w v w) v^2").matrix())


def test_sigma_matrix_coset():
    A = ProjMatrix(18486, 103, 27459, 153)
    assert same_coset(A, ModWord.parse("(w v w v^2) t^2 v^2").matrix())


def test_s3_words():
    ws = s3_words()
    assert len(ws) == 6
    assert len(search_candidates()) == 54


# -- E9 actions ----------------------------------------------------------------


def test_induced_actions():
    assert induced_e9_action(ModWord.parse("v")) == AffineE9(2, 0)
    assert induced_e9_action(ModWord.parse("t")) == AffineE9(2, 1)
    assert induced_e9_action(ModWord.parse("(v^-1 w v w) v^2")) == AffineE9(1, 0)
    assert induced_e9_action(ModWord.parse("(w v w v^2) t^2 v^2")) == AffineE9(2, 2)
    for s in s3_words():
        assert induced_e9_action(s) == AffineE9(0, 0)


def test_affine_rendering():
    assert str(AffineE9(1, 0)) == "Z -> w Z"
    assert str(AffineE9(2, 2)) == "Z -> w^2 Z + (0,w^2)"


# -- reduction and equivalence -------------------------------------------------


@given(cm_points)
def test_reduction_lands_in_fundamental_domain(tau):
    r, g = reduce_to_fundamental_domain(tau)
    assert abs(r.real_part()) <= Fraction(1, 2)
    assert r.norm() >= 1
    assert g.act(tau) == r


@given(cm_points, gamma0)
def test_gamma0_witness(tau, g):
    img = g.act(tau)
    m = gamma0_equivalent(tau, img)
    assert m is not None and in_gamma0(m)
    assert m.act(tau) == img


def test_v_moves_the_base_point():
    P0 = normalize_isogeny(*base_pair(7, -1), 9)
    assert gamma0_equivalent(P0.tau, V.act(P0.tau)) is None


# -- normalization -------------------------------------------------------------


@pytest.mark.parametrize("p", [7, 13, 31, 43])
@pytest.mark.parametrize("case, j, M", [(1, -4, ProjMatrix(2, -1, 9, -4)), (2, -1, ProjMatrix(1, 0, -9, 1))])
def test_normalizing_matrices(p, case, j, M):
    P0 = normalize_isogeny(*base_pair(p, j), 9)
    assert gamma0_equivalent(P0.tau, M.act(W * Fraction(p, 9))) is not None
    assert P0.conductor == 9 * p


def test_already_normalized():
    tau = (W * 7 + 3) / 243
    P = normalize_isogeny(lat(1, tau), lat(1, 243 * tau), 243)
    assert gamma0_equivalent(P.tau, tau) is not None


def test_structure_errors():
    src, dst = base_pair(7, -1)
    with pytest.raises(StructureError):
        normalize_isogeny(src, dst, 3)  # wrong index
    with pytest.raises(StructureError):
        normalize_isogeny(src, src, 1)


@given(st.integers(-5, 5), st.integers(-5, 5))
def test_homothety_invariance(a, b):
    lam = CycloNumber(a, b)
    if not lam:
        return
    src, dst = base_pair(13, -4)
    P = normalize_isogeny(src, dst, 9)
    Q = normalize_isogeny(src.scale(lam), dst.scale(lam), 9)
    assert gamma0_equivalent(P.tau, Q.tau) is not None


@pytest.mark.parametrize("p", [7, 13])
def test_conductor_is_lcm(p):
    # left column of the tree against every right-column curve with i = -1 (mod 3)
    left = [lat(1, (W * p + k) / 9) for k in (0, 3, 6)] + [lat(1, W * 9 * p)]
    right = [lat(1, (W * p + i) / 27) for i in (2, 5, 8, 11, 14, 17, 20, 23, 26)]
    for s in left:
        for d in right:
            P = isogeny_between(s, d)
            assert P.conductor == 9 * p == max(conductor_of_lattice(s), conductor_of_lattice(d))


# -- search --------------------------------------------------------------------


def test_search_identity():
    P0 = normalize_isogeny(*base_pair(7, -1), 9)
    assert str(automorphism_search(P0, P0)) == "1"


def test_search_failure():
    P0 = normalize_isogeny(*base_pair(7, -1), 9)
    # a conductor-7 point cannot be reached from a conductor-63 one
    far = isogeny_between(lat(1, W * 7), lat(1, (W * 7 + 2) / 243))
    with pytest.raises((SearchFailure, ValueError)):
        automorphism_search(P0, far)


def test_matching_words_induce_one_map():
    P0 = normalize_isogeny(*base_pair(13, -1), 9)
    target = isogeny_between(lat(1, (W * 13 + 4) / 9), lat(1, (W * 13 - 13) / 27))
    words = matching_words(P0, target)
    assert words
    assert len({induced_e9_action(w) for w in words}) == 1
    assert induced_e9_action(words[0]) == AffineE9(2, 2)
