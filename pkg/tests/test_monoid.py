import itertools
import random

import pytest
from hypothesis import assume, given, settings, strategies as st

from katoskel import lattice as la
from katoskel.monoid import (
    AffineMonoid,
    DimensionMismatch,
    NotAFace,
    NotASubdivision,
    NotSharp,
    NotSpanningTree,
    ZeroUniformizer,
    bipartite_cone,
    bipartite_triangulation,
    bipartite_unimodularity_check,
    face_spanned_by,
    faces,
    free_monoid,
    is_free,
    is_saturated,
    monoid_from_generators,
    monoid_from_json,
    monoid_to_json,
    pushout_over_base,
    quotient_by_face,
    saturate,
    saturation_index,
    uniformizer,
)
from oracles import brute_hilbert_basis, brute_minimal_generators, minor_gcd

M3 = [(1, 0), (1, 1), (1, 2)]


def pointed_generators(rank, lo=0, hi=4, max_gens=4):
    vec = st.lists(st.integers(lo, hi), min_size=rank, max_size=rank).map(tuple).filter(any)
    return st.lists(vec, min_size=1, max_size=max_gens, unique=True)


def build(rank, gens):
    try:
        return AffineMonoid(rank, gens)
    except NotSharp:
        return None


# construction ----------------------------------------------------------------


def test_free_monoid():
    M = monoid_from_generators(2, [(1, 0), (0, 1)])
    assert M.hilbert_basis == [(0, 1), (1, 0)]
    assert is_free(M) and is_saturated(M)


def test_units_rejected():
    with pytest.raises(NotSharp):
        monoid_from_generators(1, [(1,), (-1,)])


def test_ragged_input_rejected():
    with pytest.raises(DimensionMismatch):
        monoid_from_generators(2, [(1, 0), (1,)])


def test_three_generator_cone():
    # brute-force enumeration of the saturation gives the same three elements
    M = monoid_from_generators(2, M3)
    assert M.hilbert_basis == sorted(M3) == brute_hilbert_basis(M3)
    assert not is_free(M)
    assert is_saturated(M)


def test_saturate_examples():
    S = saturate(monoid_from_generators(1, [(2,), (3,)]))
    assert S.hilbert_basis == [(1,)]
    assert not is_saturated(monoid_from_generators(1, [(2,), (3,)]))
    N2 = free_monoid(2)
    assert saturate(N2) == N2
    even = [(2, 0), (1, 1), (0, 2)]
    E = saturate(monoid_from_generators(2, even))
    assert E.hilbert_basis == sorted(even) == brute_hilbert_basis(even)


def test_minimal_generators_drop_redundant():
    M = monoid_from_generators(2, M3 + [(2, 2), (3, 3)])
    assert M.minimal_generators == sorted(M3)


def test_membership_of_non_saturated_monoid():
    M = monoid_from_generators(1, [(2,), (3,)])
    assert (1,) not in M
    assert all((k,) in M for k in range(2, 12))


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 3).flatmap(lambda r: st.tuples(st.just(r), pointed_generators(r, -2, 3, 4))))
def test_hilbert_basis_matches_brute_force(data):
    rank, gens = data
    M = build(rank, gens)
    assume(M is not None)
    assert M.hilbert_basis == brute_hilbert_basis(gens)
    assert M.minimal_generators == brute_minimal_generators(gens)


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 3).flatmap(lambda r: st.tuples(st.just(r), pointed_generators(r, 0, 4, 4))))
def test_saturation_idempotent(data):
    rank, gens = data
    M = AffineMonoid(rank, gens)
    S = saturate(M)
    assert saturate(S) == S
    assert is_saturated(S)
    assert (S == M) == is_saturated(M)


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 3).flatmap(lambda r: st.tuples(st.just(r), pointed_generators(r, 0, 3, 4))))
def test_hnf_equality(data):
    # equality is independent of the generating set chosen
    rank, gens = data
    M = saturate(AffineMonoid(rank, gens))
    extra = [la.add(a, b) for a, b in itertools.combinations(M.hilbert_basis, 2)]
    assert AffineMonoid(rank, list(M.hilbert_basis) + extra) == M


def test_json_round_trip():
    M = monoid_from_generators(2, M3)
    data = monoid_to_json(M, (1, 1))
    N, pi = monoid_from_json(data)
    assert N == M and pi == (1, 1)


# faces ---------------------------------------------------------------------------


@pytest.mark.parametrize("r", [1, 2, 3, 4])
def test_faces_of_free_monoid(r):
    assert len(faces(free_monoid(r))) == 2 ** r


def test_faces_of_three_generator_cone():
    F = faces(monoid_from_generators(2, M3))
    assert len(F) == 4
    assert sorted(f.members for f in F if f.dim == 1) == [((1, 0),), ((1, 2),)]
    # (1, 1) is interior: the smallest face containing it is everything
    assert face_spanned_by(monoid_from_generators(2, M3), [(1, 1)]).dim == 2


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 3).flatmap(lambda r: st.tuples(st.just(r), pointed_generators(r, 0, 3, 4))))
def test_faces_form_a_lattice(data):
    # faces are closed under intersection and the zero face lies in all of them
    rank, gens = data
    M = saturate(AffineMonoid(rank, gens))
    fs = {frozenset(f.members) for f in faces(M)}
    assert frozenset() in fs and frozenset(M.hilbert_basis) in fs
    for a, b in itertools.combinations(fs, 2):
        assert a & b in fs


def test_quotients():
    N2 = free_monoid(2)
    Q, tau = quotient_by_face(N2, face_spanned_by(N2, [(1, 0)]))
    assert Q.dim == 1 and tau((0, 1)) != (0,) and tau((1, 0)) == (0,)
    Q, _ = quotient_by_face(N2, face_spanned_by(N2, [(1, 1)]))
    assert Q.dim == 0
    Q, _ = quotient_by_face(N2, face_spanned_by(N2, []))
    assert Q.dim == 2
    M = monoid_from_generators(2, M3)
    Q, tau = quotient_by_face(M, face_spanned_by(M, [(1, 0)]))
    images = sorted(tau(g) for g in M3)
    # images 0, 1, 2 along the projection: the quotient is N
    assert Q.is_free and Q.dim == 1
    assert sorted(abs(x[0]) for x in images) == [0, 1, 2]


def test_not_a_face():
    N2 = free_monoid(2)
    with pytest.raises(NotAFace):
        face_spanned_by(N2, [(-1, 0)])


@settings(max_examples=30, deadline=None)
@given(st.integers(2, 3).flatmap(lambda r: st.tuples(st.just(r), pointed_generators(r, 0, 3, 4))), st.randoms())
def test_quotient_composition(data, rnd):
    rank, gens = data
    M = saturate(AffineMonoid(rank, gens))
    fs = faces(M)
    pairs = [(F, G) for F in fs for G in fs if set(F.members) <= set(G.members)]
    F, G = rnd.choice(pairs)
    Q1, t1 = quotient_by_face(M, F)
    Q2, t2 = quotient_by_face(Q1, face_spanned_by(Q1, [t1(g) for g in G.members]))
    Q, t = quotient_by_face(M, G)
    assert Q.dim == Q2.dim
    direct = [t(g) for g in M.hilbert_basis]
    comp = [t2(t1(g)) for g in M.hilbert_basis]
    if Q.dim == 0:
        return
    # the two projections differ by a lattice isomorphism
    U = [la.solve_rows(direct, c) for c in la.identity(Q.dim)]
    Umat = la.matmul([[x for x in row] for row in U], comp) if all(u is not None for u in U) else None
    assert Umat is not None
    assert all(x.denominator == 1 for row in Umat for x in row)
    assert abs(la.det([[int(x) for x in row] for row in Umat])) == 1
    assert sorted(tuple(int(x) for x in la.vecmat(h, Umat)) for h in Q.hilbert_basis) == Q2.hilbert_basis


# pushouts ----------------------------------------------------------------------


def test_pushout_snc_with_reduced_trait():
    N2, N1 = free_monoid(2), free_monoid(1)
    P = pushout_over_base(uniformizer(N2, (1, 1)), uniformizer(N1, (1,)))
    assert P.monoid.is_free and P.monoid.dim == 2 and P.torsion == 1
    assert sorted(P.left(g) for g in [(1, 0), (0, 1)]) == P.monoid.hilbert_basis


def test_pushout_substitution():
    N1 = free_monoid(1)
    P = pushout_over_base(uniformizer(N1, (2,)), uniformizer(N1, (1,)))
    assert P.monoid.dim == 1
    assert P.monoid.hilbert_basis == [P.left((1,))]
    assert P.pi == P.left((2,))


def test_pushout_with_ramified_trait():
    # e2 = 2f - e1 leaves the cone spanned by (1,0) and (-1,2) in the (e1, f) lattice
    N2, N1 = free_monoid(2), free_monoid(1)
    P = pushout_over_base(uniformizer(N2, (1, 1)), uniformizer(N1, (2,)), saturated=True)
    assert len(P.monoid.hilbert_basis) == 3
    assert brute_hilbert_basis([(1, 0), (-1, 2), (0, 1)]) == [(-1, 2), (0, 1), (1, 0)]
    assert set(P.monoid.hilbert_basis) == {P.left((1, 0)), P.left((0, 1)), P.right((1,))}
    plain = pushout_over_base(uniformizer(N2, (1, 1)), uniformizer(N1, (2,)), saturated=False)
    assert plain.monoid.is_saturated


def test_pushout_rank_formula():
    for a in itertools.product(range(1, 4), repeat=2):
        for b in range(1, 4):
            P = pushout_over_base(uniformizer(free_monoid(2), a), uniformizer(free_monoid(1), (b,)))
            assert P.monoid.dim == 2 + 1 - 1


def test_zero_uniformizer():
    N1 = free_monoid(1)
    with pytest.raises(ZeroUniformizer):
        pushout_over_base(uniformizer(N1, (0,)), uniformizer(N1, (1,)))
    u0 = uniformizer(free_monoid(2), (0, 0))
    with pytest.raises(ZeroUniformizer):
        saturation_index(u0)


def test_saturation_index_examples():
    assert saturation_index(uniformizer(free_monoid(2), (1, 1))) == 1
    assert saturation_index(uniformizer(free_monoid(2), (2, 3))) == 6
    assert saturation_index(uniformizer(free_monoid(1), (2,))) == 2
    assert saturation_index(uniformizer(free_monoid(2), (2, 0))) == 2


# bipartite cones -------------------------------------------------------------------


def test_bipartite_lattice_relation():
    # the x_ij satisfy exactly one relation, sum over one matching = sum over the other
    edges, rays = bipartite_cone(2, 2)
    assert la.rank(rays) == 3
    assert minor_gcd(la.hnf(rays)) == 1


@pytest.mark.parametrize("k", [1, 2, 3, 4])
def test_star_cone_is_free(k):
    tri = bipartite_triangulation(1, k)
    assert len(tri) == 1
    assert bipartite_unimodularity_check(1, k, tri)


def test_k22_subdivisions():
    for order in itertools.permutations(range(4)):
        tri = bipartite_triangulation(2, 2, order)
        assert len(tri) == 2
        assert bipartite_unimodularity_check(2, 2, tri)


def test_k23_staircases():
    stairs = [
        [[(0, 0), (0, 1), (0, 2), (1, 2)], [(0, 0), (0, 1), (1, 1), (1, 2)], [(0, 0), (1, 0), (1, 1), (1, 2)]],
        [[(0, 2), (0, 1), (0, 0), (1, 0)], [(0, 2), (0, 1), (1, 1), (1, 0)], [(0, 2), (1, 2), (1, 1), (1, 0)]],
    ]
    for s in stairs:
        assert bipartite_unimodularity_check(2, 3, s)


def test_bad_subdivisions():
    with pytest.raises(NotSpanningTree):
        bipartite_unimodularity_check(2, 2, [[(0, 0), (0, 1), (1, 1)], [(0, 0), (0, 1), (0, 0)]])
    with pytest.raises(NotASubdivision):
        bipartite_unimodularity_check(2, 2, [[(0, 0), (0, 1), (1, 1)]])
    with pytest.raises(NotASubdivision):
        tri = bipartite_triangulation(2, 2)
        bipartite_unimodularity_check(2, 2, tri + tri)


def test_random_pulling_orders_are_unimodular():
    rng = random.Random(7)
    for n1, n2 in [(2, 3), (3, 2), (2, 4)]:
        k = n1 * n2
        for _ in range(5):
            order = list(range(k))
            rng.shuffle(order)
            assert bipartite_unimodularity_check(n1, n2, bipartite_triangulation(n1, n2, order))
