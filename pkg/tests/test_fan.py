import itertools
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

import models as M
from katoskel import lattice as la
from katoskel.fan import (
    BranchRuleConflict,
    InconsistentStratification,
    MissingBranchRule,
    RayOutsideCone,
    ResolutionCapExceeded,
    barycentric_subdivision,
    fan_from_cone,
    fan_from_stratification,
    fan_product,
    fan_to_json,
    is_regular,
    model_from_json,
    model_to_json,
    n_monotonicity_check,
    product_automorphism,
    resolve,
    star_subdivision,
    stratified_automorphism,
)
from oracles import count_flags, laplace_det, square_poset

FAMILY = M.family((1, 2))


def ranks(F):
    return sorted(p.dim for p in F.points.values())


def test_quartic_fan():
    F = M.circle2()
    assert len(F.points) == 4
    assert ranks(F) == [1, 1, 2, 2]
    assert all(p.stalk.is_free for p in F.points.values())
    assert F.verify() == []
    assert F.semistable


def test_single_component():
    F = M.point()
    assert list(F.points) == ["E"]
    assert F.points["E"].stalk.dim == 1 and F.points["E"].pi == (1,)


def test_projective_line_fan():
    F = M.line()
    assert len(F.points) == 5
    assert sorted(x for x, p in F.points.items() if not p.vertical) == ["H0", "Hinf"]
    assert F.points["E+H0"].pi == (1, 0)


def test_specialization_closure_enforced():
    with pytest.raises(InconsistentStratification):
        M.fan("bad", [("E1", 1), ("E2", 1)], [["E1"], ["E1", "E2"]])


def test_branch_containment_must_be_named():
    # a double point stratum with two branches over a two-branch curve stratum is ambiguous
    with pytest.raises(InconsistentStratification):
        M.fan("bad", [("E1", 1), ("E2", 1), ("E3", 1)],
              [["E1"], ["E2"], ["E3"], (["E1", "E2"], ["a", "b"], {}), ["E2", "E3"], ["E1", "E3"],
               (["E1", "E2", "E3"], ["t"], {})])


def test_model_json_round_trip():
    F = M.circle2()
    data = model_to_json(F.model)
    assert model_to_json(model_from_json(data)) == data
    G = fan_from_stratification(model_from_json(data))
    assert fan_to_json(G) == fan_to_json(F)


# products ----------------------------------------------------------------------


def test_quartic_product_points():
    Y = M.circle2()
    Z = fan_product(Y, Y)
    assert len(Z.points) == 16
    by_rank = {}
    for p in Z.points.values():
        by_rank[p.dim] = by_rank.get(p.dim, 0) + 1
    assert by_rank == {1: 4, 2: 8, 3: 4}
    assert Z.verify() == []


def test_identity_factor():
    for lab, build, ms in FAMILY:
        G = build(*ms)
        Z = fan_product(M.point(), G)
        assert ranks(Z) == ranks(G)
        assert sorted(Z.inclusions[z][1] for z in Z.points) == sorted(G.points)


def test_node_times_node_stalk():
    S = M.segment()
    Z = fan_product(S, S)
    top = Z.points["(E1+E2,E1+E2)"]
    # oracle: irreducible points of {(a,b,c,d) in N^4 : a + b = c + d}
    pts = [v for v in itertools.product(range(3), repeat=4) if any(v) and v[0] + v[1] == v[2] + v[3]]
    irr = [v for v in pts if not any(u != v and all(0 <= a - b for a, b in zip(v, u)) for u in pts)]
    assert len(irr) == 4
    assert top.stalk.dim == 3
    assert len(top.stalk.hilbert_basis) == len(irr)
    assert len(top.stalk.extreme_rays) == 4
    assert not top.stalk.is_free


def test_missing_branch_rule():
    A = M.segment(2, 1)
    with pytest.raises(MissingBranchRule):
        fan_product(A, A)
    Z = fan_product(A, A, branch_rule={})
    assert Z.verify() == []


def test_branch_rule_conflicts_with_semistable_factor():
    Y = M.circle2()
    with pytest.raises(BranchRuleConflict):
        fan_product(Y, Y, branch_rule={("E1+E2#p_A", "E1+E2#p_A"): 2})


def test_monotonicity():
    Y = M.circle2()
    assert n_monotonicity_check(fan_product(Y, Y))
    explicit = {(x, y): 1 for x in Y.points for y in Y.points}
    assert n_monotonicity_check(fan_product(Y, Y, branch_rule=explicit))
    # more preimages over a specialization than over its generization: allowed
    deeper = fan_product(Y, Y, branch_rule={("E1+E2#p_A", "E1+E2#p_A"): 2}, enforce_semistable=False)
    assert n_monotonicity_check(deeper)
    # fewer preimages over a specialization: violation, reported with the pair
    shallow = fan_product(Y, Y, branch_rule={("E1", "E1"): 2}, enforce_semistable=False)
    rep = n_monotonicity_check(shallow)
    assert not rep
    assert (("E1+E2#p_A", "E1+E2#p_A"), ("E1", "E1")) in rep.violations


@settings(max_examples=25, deadline=None)
@given(st.sampled_from(FAMILY), st.sampled_from([f for f in FAMILY if all(m == 1 for m in f[2])]))
def test_semistable_products(fx, fy):
    X, Y = fx[1](*fx[2]), fy[1](*fy[2])
    Z = fan_product(X, Y)
    assert Z.verify() == []
    vertical_pairs = [(x, y) for x in X.vertical_points() for y in Y.vertical_points()]
    over = sorted(Z.inclusions[z][:2] for z in Z.vertical_points())
    # bijection on vertical points
    assert over == sorted(vertical_pairs)
    for z in Z.vertical_points():
        x, y = Z.inclusions[z][:2]
        assert Z.points[z].dim == X.points[x].dim + Y.points[y].dim - 1


# subdivisions ------------------------------------------------------------------


def maximal(F):
    top = max(p.dim for p in F.points.values())
    return [x for x, p in F.points.items() if p.dim == top]


def test_star_of_quadrant():
    F = fan_from_cone([(1, 0), (0, 1)], (1, 1))
    G = star_subdivision(F, "cone", (1, 1))
    assert len(maximal(G)) == 2
    assert all(G.points[x].stalk.is_free for x in maximal(G))
    assert G.verify() == []


def test_star_outside_cone():
    F = fan_from_cone([(1, 0), (0, 1)], (1, 1))
    with pytest.raises(RayOutsideCone):
        star_subdivision(F, "cone", (1, -1))


def test_barycentric_square_cone():
    F = fan_from_cone([(0, 0, 1), (1, 0, 1), (0, 1, 1), (1, 1, 1)], (0, 0, 1))
    G = barycentric_subdivision(F)
    assert len(maximal(G)) == count_flags(square_poset()) == 8
    assert G.verify() == []


def test_a1_cone_resolution():
    F = fan_from_cone([(1, 0), (1, 2)], (1, 0))
    assert not is_regular(F)
    G = resolve(F)
    assert is_regular(G)
    tops = maximal(G)
    assert len(tops) == 2
    # the new ray is (1, 1) in the original lattice
    rays = set()
    for x in tops:
        _, B = G.origin[x]
        for r in G.points[x].rays:
            rays.add(tuple(int(a) for a in la.vecmat(r, B)))
    assert rays == {(1, 0), (1, 1), (1, 2)}
    for x in tops:
        _, B = G.origin[x]
        R = [tuple(int(a) for a in la.vecmat(r, B)) for r in G.points[x].rays]
        assert abs(laplace_det([list(r) for r in R])) == 1


def test_star_on_a1_cone_is_regular():
    F = fan_from_cone([(1, 0), (1, 2)], (1, 0))
    G = star_subdivision(F, "cone", (1, 1))
    assert is_regular(G)


def test_resolve_keeps_regular_fans():
    F = M.triple3()
    assert is_regular(F)
    assert resolve(F) is F


def test_quartic_product_resolution():
    # the stalk over a pair of double points is {a+b = c+d}, which is not free
    Y = M.circle2()
    Z = fan_product(Y, Y)
    assert not is_regular(Z)
    G = resolve(Z)
    assert is_regular(G) and G.verify() == []
    assert len(G.points) == 24


def test_resolution_cap():
    F = fan_from_cone([(1, 0), (1, 5)], (1, 0))
    with pytest.raises(ResolutionCapExceeded):
        resolve(F, cap=1)


def _grid(d, k=3):
    return [v for v in itertools.product(range(k + 1), repeat=d) if any(v)]


@pytest.mark.parametrize("rays,pi", [
    ([(1, 0), (1, 2)], (1, 0)),
    ([(1, 0), (1, 3)], (1, 0)),
    ([(0, 0, 1), (1, 0, 1), (0, 1, 1), (1, 1, 1)], (0, 0, 1)),
    ([(1, 0, 0), (0, 1, 0), (1, 1, 2)], (1, 1, 0)),
])
def test_subdivision_preserves_support(rays, pi):
    F = fan_from_cone(rays, pi)
    d = len(pi)
    for G in (barycentric_subdivision(F), resolve(F)):
        assert G.verify() == []
        # every new cell lands in the old cell it came from
        for x in G.points:
            y, B = G.origin[x]
            for r in G.points[x].rays:
                assert F.contains_point(y, la.vecmat(r, B))
        cells = [(x, B) for x, (y, B) in G.origin.items() if y == "cone"]
        # every old lattice point of a grid is covered by a new cell
        for v in _grid(d):
            v = tuple(Fraction(a) for a in v)
            if not F.contains_point("cone", v):
                continue
            hit = False
            for x, B in cells:
                if len(B) != d:
                    continue
                c = la.solve_rows(B, v)
                if c is not None and G.contains_point(x, c):
                    hit = True
                    break
            assert hit, v


def test_automorphisms():
    Y = M.circle2()
    g = stratified_automorphism(Y, branch_map={"p_A": "p_B", "p_B": "p_A"})
    assert g("E1+E2#p_A") == "E1+E2#p_B"
    h = stratified_automorphism(Y, component_map={"E1": "E2", "E2": "E1"})
    assert h("E1") == "E2"
    Z = fan_product(Y, Y)
    d = product_automorphism(Z, g, g)
    assert d("(E1+E2#p_A,E1+E2#p_B)") == "(E1+E2#p_B,E1+E2#p_A)"
    with pytest.raises(ValueError):
        stratified_automorphism(M.segment(1, 2), component_map={"E1": "E2", "E2": "E1"})
