from fractions import Fraction as Q

import pytest
from hypothesis import given, settings, strategies as st

import models as M
from katoskel.fan import (
    barycentric_subdivision,
    fan_from_cone,
    fan_product,
    product_automorphism,
    star_subdivision,
    stratified_automorphism,
)
from katoskel.monoid import NotASubdivision
from katoskel.skeleton import (
    NotAProductFan,
    cell_of,
    check_product_homeomorphism,
    complex_action,
    complex_to_json,
    frac_str,
    parse_frac,
    product_skeleton,
    skeleton_of_fan,
    subdivide_complex,
)
from katoskel import topology as T

FAMILY = M.family((1, 2))
SEMISTABLE = [f for f in FAMILY if all(m == 1 for m in f[2])]


def sk(F):
    return skeleton_of_fan(F)


def prod(F, G, rule=None):
    Z = fan_product(F, G, branch_rule=rule)
    return product_skeleton(sk(F), sk(G), Z)


def test_quartic_circle():
    S = sk(M.circle2())
    assert S.f_vector() == [2, 2]
    assert S.bounded
    assert S.check_gluing() == []
    K = T.as_simplicial(S)
    assert T.homology(K).betti == [1, 1]


def test_weighted_segment():
    S = sk(fan_from_cone([(1, 0), (0, 1)], (1, 2)))
    assert S.faces["cone"].vertices == ((0, Q(1, 2)), (1, 0))
    assert S.f_vector() == [2, 1]


def test_projective_line_is_a_line():
    S = sk(M.line())
    assert S.f_vector() == [1, 2]
    assert not S.bounded
    assert S.faces["E"].vertices == ((1,),)
    for x in ("E+H0", "E+Hinf"):
        f = S.faces[x]
        assert len(f.vertices) == 1 and len(f.rays) == 1
    assert S.bounded_subcomplex().f_vector() == [1]
    assert S.check_gluing() == []


def test_horizontal_points_have_no_cell():
    F = M.tripod()
    for x, p in F.points.items():
        assert (cell_of(F, x) is None) == (not p.vertical)
    assert sk(F).f_vector() == [1, 3]


@pytest.mark.parametrize("lab,build,ms", FAMILY, ids=[f[0] for f in FAMILY])
def test_cells_and_gluing(lab, build, ms):
    F = build(*ms)
    S = sk(F)
    assert S.check_gluing() == []
    for x, f in S.faces.items():
        p = F.points[x]
        if p.stalk.is_free and all(c > 0 for c in p.pi):
            assert f.dim == p.dim - 1
        for v in f.vertices:
            assert f.contains(v)


def test_node_square():
    P = prod(M.segment(), M.segment())
    assert P.complex.f_vector() == [4, 4, 1]
    assert check_product_homeomorphism(P)
    top = "(E1+E2,E1+E2)"
    imgs = sorted(tuple(a) + tuple(b) for a, b in (P.project(top, v) for v in P.complex.faces[top].vertices))
    # the four corners of [0,1]^2 in the coordinates of the two factors
    assert imgs == [(0, 1, 0, 1), (0, 1, 1, 0), (1, 0, 0, 1), (1, 0, 1, 0)]


def test_identity_factor():
    for lab, build, ms in FAMILY:
        G = build(*ms)
        P = prod(M.point(), G)
        assert P.complex.f_vector() == sk(G).f_vector()
        assert check_product_homeomorphism(P)


def test_quartic_torus():
    P = prod(M.circle2(), M.circle2())
    assert P.complex.f_vector() == [4, 8, 4]
    assert check_product_homeomorphism(P)
    K = T.as_simplicial(P.complex)
    assert T.classify_closed_surface(K).name == "torus"


def test_quotient_is_not_a_product():
    # the involution swapping the double points of the quartic circle, acting diagonally
    Y = M.circle2()
    g = stratified_automorphism(Y, branch_map={"p_A": "p_B", "p_B": "p_A"})
    P = prod(Y, Y)
    Z = P.complex.fan
    gg = product_automorphism(Z, g, g)
    K = T.as_simplicial(P.complex)
    A = T.induced_action(K, [complex_action(P.complex, gg)])
    quotient = T.group_quotient(K, A)
    assert T.classify_closed_surface(quotient).name == "sphere"
    # the quotient of one factor is a segment, and segment x segment is a square
    square = prod(M.segment(), M.segment()).complex
    assert T.euler_characteristic(T.as_simplicial(square)) == 1
    assert T.euler_characteristic(quotient) == 2


def test_product_with_two_branches_fails():
    S = M.segment(2, 1)
    P = prod(S, S, {("E1+E2", "E1+E2"): 2})
    rep = check_product_homeomorphism(P)
    assert not rep
    assert any("(E1+E2,E1+E2)" in w for w in rep.witnesses)


def test_not_a_product_fan():
    F = M.segment()
    with pytest.raises(NotAProductFan):
        product_skeleton(sk(F), sk(F), F)
    Z = fan_product(F, F)
    with pytest.raises(NotAProductFan):
        product_skeleton(sk(M.segment()), sk(F), Z)


@settings(max_examples=30, deadline=None)
@given(st.sampled_from(FAMILY), st.sampled_from(SEMISTABLE))
def test_semistable_products_are_homeomorphic(fx, fy):
    X, Y = fx[1](*fx[2]), fy[1](*fy[2])
    for P in (prod(X, Y), prod(Y, X)):
        rep = check_product_homeomorphism(P)
        assert rep, rep.witnesses
        assert P.complex.check_gluing() == []


# subdivisions -------------------------------------------------------------------


def test_barycentric_square_cell():
    S = M.segment()
    Z = fan_product(S, S)
    G = barycentric_subdivision(Z)
    new = subdivide_complex(sk(Z), G)
    assert new.f_vector()[2] == 8
    assert new.check_gluing() == []


def test_identity_subdivision():
    F = M.circle2()
    S = sk(F)
    assert subdivide_complex(S, F) == S


def test_star_midpoint():
    F = fan_from_cone([(1, 0), (0, 1)], (1, 1))
    G = star_subdivision(F, "cone", (1, 1))
    new = subdivide_complex(sk(F), G)
    assert new.f_vector() == [3, 2]
    mids = [f.vertices[0] for x, f in new.faces.items() if f.dim == 0 and G.origin[x][0] == "cone"]
    assert mids == [(Q(1, 2),)]
    _, B = G.origin["[cone|*]"]
    assert [Q(sum(a * b[j] for a, b in zip(mids[0], B))) for j in range(2)] == [Q(1, 2), Q(1, 2)]


def test_subdivision_of_a_different_fan():
    F = M.circle2()
    G = barycentric_subdivision(fan_from_cone([(1, 0), (0, 1)], (1, 1)))
    with pytest.raises(NotASubdivision):
        subdivide_complex(sk(F), G)


def test_json_and_fractions():
    S = sk(fan_from_cone([(1, 0), (0, 1)], (1, 2)))
    d = complex_to_json(S)
    assert d["f_vector"] == [2, 1]
    top = next(f for f in d["faces"] if f["id"] == "cone")
    assert top["vertices"] == [["0/1", "1/2"], ["1/1", "0/1"]]
    assert parse_frac(frac_str(Q(-3, 4))) == Q(-3, 4)
    assert parse_frac(" 5/10 ") == Q(1, 2)
