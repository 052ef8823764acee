"""Sharp fine monoids inside integer lattices.

A monoid is stored by generators in an ambient Z^r.  Cone computations run in
coordinates of the group lattice M^gp (Hermite normal form basis), where the
cone is full dimensional.  Saturation always means saturation inside M^gp.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from math import gcd, lcm
from typing import Iterable, Sequence

from . import lattice as la


class NotSharp(ValueError):
    pass


class DimensionMismatch(ValueError):
    pass


class NotAFace(ValueError):
    pass


class ZeroUniformizer(ValueError):
    pass


class NotSpanningTree(ValueError):
    pass


class NotASubdivision(ValueError):
    pass


# ----------------------------------------------------------------------------
# rational polyhedral cones


class Cone:
    """Full-dimensional rational cone in Q^d given by integer generators."""

    def __init__(self, dim: int, gens: Iterable[Sequence[int]]):
        self.dim = dim
        prim = []
        for g in gens:
            g = la.vec(g)
            if len(g) != dim:
                raise DimensionMismatch(f"expected length {dim}, got {len(g)}")
            if any(g):
                p = la.primitive(g)
                if p not in prim:
                    prim.append(p)
        self.gens = sorted(prim)
        if dim and la.rank(self.gens) != dim:
            raise ValueError("generators do not span the ambient space")
        self.facets = self._facets()

    def _facets(self) -> list:
        d = self.dim
        if d == 0:
            return []
        if d == 1:
            signs = {g[0] > 0 for g in self.gens}
            if signs == {True}:
                return [(1,)]
            if signs == {False}:
                return [(-1,)]
            return []
        out = []
        for combo in itertools.combinations(self.gens, d - 1):
            if la.rank(combo) != d - 1:
                continue
            (n,) = la.nullspace(combo, d)
            vals = [la.dot(n, g) for g in self.gens]
            if all(v >= 0 for v in vals):
                pass
            elif all(v <= 0 for v in vals):
                n = la.scale(-1, n)
            else:
                continue
            if n not in out:
                out.append(n)
        return sorted(out)

    @property
    def pointed(self) -> bool:
        return self.dim == 0 or (bool(self.facets) and la.rank(self.facets) == self.dim)

    def contains(self, v: Sequence) -> bool:
        return all(la.dot(n, v) >= 0 for n in self.facets)

    def interior(self, v: Sequence) -> bool:
        return all(la.dot(n, v) > 0 for n in self.facets)

    @cached_property
    def rays(self) -> list:
        """Primitive extreme rays (pointed cones only)."""
        out = []
        for g in self.gens:
            active = [n for n in self.facets if la.dot(n, g) == 0]
            if len(active) == 0 and self.dim == 1:
                out.append(g)
            elif active and la.rank(active) == self.dim - 1:
                out.append(g)
        return sorted(out)

    @cached_property
    def grading(self) -> tuple:
        """Integer functional positive on every nonzero element of a pointed cone."""
        g = [0] * self.dim
        for n in self.facets:
            g = [a + b for a, b in zip(g, n)]
        return tuple(g)

    def face_of(self, ray_ids: frozenset) -> list:
        """Facet normals vanishing on the given rays."""
        return [n for n in self.facets if all(la.dot(n, self.rays[i]) == 0 for i in ray_ids)]

    @cached_property
    def faces(self) -> list:
        """All faces as frozensets of ray indices, from {0} up to the full cone."""
        full = frozenset(range(len(self.rays)))
        facet_sets = [frozenset(i for i, r in enumerate(self.rays) if la.dot(n, r) == 0) for n in self.facets]
        found = {full}
        stack = [full]
        while stack:
            F = stack.pop()
            for S in facet_sets:
                G = F & S
                if G not in found:
                    found.add(G)
                    stack.append(G)
        return sorted(found, key=lambda F: (self.face_dim(F), sorted(F)))

    def face_dim(self, F: frozenset) -> int:
        return la.rank([self.rays[i] for i in F]) if F else 0

    def triangulation(self, order: Sequence[int] | None = None) -> list:
        """Pulling triangulation; each simplicial cone is a sorted tuple of ray indices.

        `order` fixes which ray is pulled first; the default is the index order.
        """
        if not self.pointed:
            raise NotSharp("cone contains a line")
        order = list(range(len(self.rays))) if order is None else list(order)
        rank_of = {F: self.face_dim(F) for F in self.faces}
        memo: dict = {}

        def tri(F: frozenset) -> list:
            if F in memo:
                return memo[F]
            d = rank_of[F]
            if len(F) == d:
                res = [tuple(sorted(F))]
            else:
                r0 = next(i for i in order if i in F)
                res = []
                for G in self.faces:
                    if G < F and rank_of[G] == d - 1 and r0 not in G:
                        res.extend(tuple(sorted(S + (r0,))) for S in tri(G))
            memo[F] = res
            return res

        return tri(frozenset(range(len(self.rays))))


def parallelepiped_points(basis: Sequence[Sequence[int]]) -> list:
    """Lattice points sum(l_i v_i) with 0 <= l_i < 1 for a square nonsingular integer basis."""
    d = len(basis)
    H = la.hnf(basis)
    diag = [H[i][i] for i in range(d)]
    inv = la.inverse(basis)
    out = []
    for x in itertools.product(*[range(h) for h in diag]):
        lam = la.vecmat(x, inv)
        frac = [l - (l.numerator // l.denominator) for l in lam]
        p = la.vecmat(frac, basis)
        out.append(tuple(int(a) for a in p))
    return out


def hilbert_basis_of_cone(cone: Cone) -> list:
    """Hilbert basis of cone intersected with Z^d (cone pointed)."""
    if cone.dim == 0:
        return []
    rays = cone.rays
    cand = set(rays)
    for simplex in cone.triangulation():
        V = [rays[i] for i in simplex]
        for p in parallelepiped_points(V):
            if any(p):
                cand.add(p)
    grade = cone.grading
    cand = sorted(cand, key=lambda v: (la.dot(grade, v), v))
    hb = []
    for x in cand:
        gx = la.dot(grade, x)
        if not any(la.dot(grade, y) < gx and cone.contains(la.sub(x, y)) for y in hb):
            hb.append(x)
    return sorted(hb)


# ----------------------------------------------------------------------------
# monoids


class AffineMonoid:
    """Submonoid of Z^rank generated by finitely many vectors; always sharp."""

    def __init__(self, rank: int, generators: Iterable[Sequence[int]], _saturated: bool | None = None):
        gens = []
        for g in generators:
            g = la.vec(g)
            if len(g) != rank:
                raise DimensionMismatch(f"generator {g} has length {len(g)}, expected {rank}")
            if any(g) and g not in gens:
                gens.append(g)
        self.ambient_rank = rank
        self.generators = tuple(sorted(gens))
        self.group_basis = tuple(la.hnf(self.generators)) if gens else ()
        self.dim = len(self.group_basis)
        self._standard = self.dim == rank and list(self.group_basis) == [tuple(r) for r in la.identity(rank)]
        self._gc = [self.coords(g) for g in self.generators]
        self.cone = Cone(self.dim, self._gc)
        if not self.cone.pointed:
            raise NotSharp("the monoid contains a nonzero unit")
        self._known_saturated = _saturated

    # coordinates -------------------------------------------------------------

    def coords(self, v: Sequence[int]):
        """Coordinates of v in the group basis; None if v is not in M^gp."""
        if self.dim == 0:
            return () if not any(v) else None
        if self._standard:
            return tuple(int(a) for a in v) if all(Fraction(a).denominator == 1 for a in v) else None
        return la.coords(self.group_basis, v)

    def ambient(self, c: Sequence[int]) -> tuple:
        if self.dim == 0:
            return (0,) * self.ambient_rank
        return la.vecmat(c, self.group_basis)

    @cached_property
    def coord_matrix(self) -> list:
        """Rational r x dim matrix T with v T = coords(v) on the group."""
        if self.dim == 0:
            return [[] for _ in range(self.ambient_rank)]
        B = [list(r) for r in self.group_basis]
        Bt = la.transpose(B)
        G = la.matmul(B, Bt)
        return la.matmul(Bt, la.inverse(G))

    # membership ---------------------------------------------------------------

    def in_saturation(self, v: Sequence[int]) -> bool:
        c = self.coords(v)
        return c is not None and self.cone.contains(c)

    def _member_c(self, c: tuple, memo: dict) -> bool:
        if not any(c):
            return True
        if c in memo:
            return memo[c]
        memo[c] = False
        ok = False
        for g in self._gc:
            r = la.sub(c, g)
            if self.cone.contains(r) and self._member_c(r, memo):
                ok = True
                break
        memo[c] = ok
        return ok

    def contains(self, v: Sequence[int]) -> bool:
        c = self.coords(v)
        if c is None or not self.cone.contains(c):
            return False
        if self.is_saturated:
            return True
        return self._member_c(tuple(c), {})

    def __contains__(self, v) -> bool:
        return self.contains(v)

    # bases ----------------------------------------------------------------------

    @cached_property
    def hilbert_basis_coords(self) -> list:
        return hilbert_basis_of_cone(self.cone)

    @cached_property
    def hilbert_basis(self) -> list:
        """Hilbert basis of the saturation, in ambient coordinates."""
        return sorted(self.ambient(c) for c in self.hilbert_basis_coords)

    @cached_property
    def minimal_generators(self) -> list:
        """Irreducible elements of M itself."""
        out = []
        for g, c in zip(self.generators, self._gc):
            red = False
            for h in self._gc:
                if h == c:
                    continue
                r = la.sub(c, h)
                if self.cone.contains(r) and self._member_c(r, {}):
                    red = True
                    break
            if not red:
                out.append(g)
        return sorted(out)

    @cached_property
    def is_saturated(self) -> bool:
        if self._known_saturated is not None:
            return self._known_saturated
        memo: dict = {}
        return all(self._member_c(tuple(c), memo) for c in self.hilbert_basis_coords)

    @property
    def is_free(self) -> bool:
        return self.is_saturated and len(self.hilbert_basis_coords) == self.dim

    @property
    def extreme_rays(self) -> list:
        return sorted(self.ambient(r) for r in self.cone.rays)

    @property
    def facet_normals(self) -> list:
        """Primitive facet functionals in coordinates dual to the group basis."""
        return list(self.cone.facets)

    # identity -------------------------------------------------------------------

    def _key(self):
        return (self.ambient_rank, self.group_basis, tuple(self.minimal_generators))

    def __eq__(self, other) -> bool:
        return isinstance(other, AffineMonoid) and self._key() == other._key()

    def __hash__(self) -> int:
        return hash(self._key())

    def __repr__(self) -> str:
        return f"AffineMonoid(rank={self.ambient_rank}, generators={list(self.minimal_generators)})"


def monoid_from_generators(rank: int, gens: Iterable[Sequence[int]]) -> AffineMonoid:
    return AffineMonoid(rank, gens)


def free_monoid(r: int) -> AffineMonoid:
    return AffineMonoid(r, la.identity(r), _saturated=True)


def saturate(M: AffineMonoid) -> AffineMonoid:
    if M.is_saturated:
        return M
    return AffineMonoid(M.ambient_rank, M.hilbert_basis, _saturated=True)


def is_saturated(M: AffineMonoid) -> bool:
    return M.is_saturated


def is_free(M: AffineMonoid) -> bool:
    return M.is_free


# ----------------------------------------------------------------------------
# homomorphisms


@dataclass(frozen=True)
class MonoidHom:
    """Homomorphism given by a matrix acting on row vectors of the source ambient lattice.

    Entries may be Fractions; the map only needs to be integral on the source group.
    """

    source: AffineMonoid
    target: AffineMonoid
    matrix: tuple

    def __post_init__(self):
        m = tuple(tuple(row) for row in self.matrix)
        object.__setattr__(self, "matrix", m)
        if len(m) != self.source.ambient_rank:
            raise DimensionMismatch("matrix rows must match the source rank")
        for g in self.source.generators:
            if not self.target.contains(self(g)):
                raise ValueError(f"image of {g} is not in the target monoid")

    def __call__(self, v: Sequence[int]) -> tuple:
        if not self.matrix:
            return (0,) * self.target.ambient_rank
        w = la.vecmat(v, self.matrix)
        if any(Fraction(x).denominator != 1 for x in w):
            raise ValueError(f"{v} is not in the source group")
        return tuple(int(x) for x in w)

    def compose(self, other: "MonoidHom") -> "MonoidHom":
        """other after self."""
        M = la.matmul(self.matrix, other.matrix) if self.matrix else []
        return MonoidHom(self.source, other.target, M)


NATURALS = AffineMonoid(1, [(1,)], _saturated=True)


def uniformizer(Q: AffineMonoid, pi: Sequence[int]) -> MonoidHom:
    """The map N -> Q sending 1 to pi."""
    return MonoidHom(NATURALS, Q, (tuple(pi),))


# ----------------------------------------------------------------------------
# faces


@dataclass(frozen=True)
class Face:
    parent: AffineMonoid
    members: tuple
    rays: tuple = field(default=(), compare=False)

    @property
    def dim(self) -> int:
        return la.rank(self.members) if self.members else 0

    def contains(self, v: Sequence[int]) -> bool:
        c = self.parent.coords(v)
        if c is None or not self.parent.cone.contains(c):
            return False
        normals = self._normals()
        return all(la.dot(n, c) == 0 for n in normals)

    def _normals(self) -> list:
        P = self.parent
        ids = frozenset(P.cone.rays.index(P.coords(r)) for r in self.rays)
        return P.cone.face_of(ids)


def faces(M: AffineMonoid) -> list:
    cone = M.cone
    hb = M.hilbert_basis_coords
    out = []
    for F in cone.faces:
        normals = cone.face_of(F)
        members = tuple(sorted(M.ambient(h) for h in hb if all(la.dot(n, h) == 0 for n in normals)))
        rays = tuple(sorted(M.ambient(cone.rays[i]) for i in F))
        out.append(Face(M, members, rays))
    return out


def face_spanned_by(M: AffineMonoid, elements: Iterable[Sequence[int]]) -> Face:
    """Smallest face containing the given elements."""
    els = [M.coords(e) for e in elements]
    if any(c is None or not M.cone.contains(c) for c in els):
        raise NotAFace("element outside the monoid")
    for F in faces(M):
        normals = F._normals()
        if all(la.dot(n, c) == 0 for n in normals for c in els):
            return F
    raise NotAFace("no face contains the elements")  # pragma: no cover


def _check_face(M: AffineMonoid, F: Face) -> Face:
    if F.parent != M:
        raise NotAFace("face belongs to a different monoid")
    for G in faces(M):
        if G.members == F.members:
            return G
    raise NotAFace(f"{list(F.members)} is not a face")


def quotient_by_face(M: AffineMonoid, F: Face) -> tuple[AffineMonoid, MonoidHom]:
    """Sharp quotient M/F with its projection."""
    F = _check_face(M, F)
    d = M.dim
    span = [M.coords(r) for r in F.rays]
    L = la.saturate_lattice(span, d) if span else []
    A = la.integer_kernel(L, d) if L else [tuple(int(i == j) for i in range(d)) for j in range(d)]
    k = len(A)
    At = la.transpose(A) if A else [[] for _ in range(d)]
    images = [tuple(la.dot(a, c) for a in A) for c in M._gc]
    Q = saturate(AffineMonoid(k, images))
    T = la.matmul(M.coord_matrix, At) if d and k else [[0] * k for _ in range(M.ambient_rank)]
    return Q, MonoidHom(M, Q, T)


# ----------------------------------------------------------------------------
# pushouts over N


@dataclass(frozen=True)
class Pushout:
    monoid: AffineMonoid
    pi: tuple
    torsion: int
    left: MonoidHom
    right: MonoidHom


def _uniformizer_image(u: MonoidHom) -> tuple:
    pi = u((1,))
    if not any(pi):
        raise ZeroUniformizer("the uniformizer maps to 0")
    return pi


def pushout_over_base(u1: MonoidHom, u2: MonoidHom, saturated: bool = True) -> Pushout:
    """Q1 + Q2 modulo pi1 = pi2, torsion discarded, optionally saturated."""
    p1, p2 = _uniformizer_image(u1), _uniformizer_image(u2)
    Q1, Q2 = u1.target, u2.target
    d1, d2 = Q1.dim, Q2.dim
    D = d1 + d2
    w = tuple(Q1.coords(p1)) + tuple(-x for x in Q2.coords(p2))
    t = la.content(w)
    w = tuple(x // t for x in w)
    A = la.integer_kernel([w], D)
    left_c = [tuple(la.dot(a, tuple(c) + (0,) * d2) for a in A) for c in Q1._gc]
    right_c = [tuple(la.dot(a, (0,) * d1 + tuple(c)) for a in A) for c in Q2._gc]
    P = AffineMonoid(D - 1, left_c + right_c)
    if saturated:
        P = saturate(P)
    At = la.transpose(A)
    T1 = la.matmul(Q1.coord_matrix, At[:d1]) if d1 else []
    T2 = la.matmul(Q2.coord_matrix, At[d1:]) if d2 else []
    left = MonoidHom(Q1, P, T1)
    right = MonoidHom(Q2, P, T2)
    pi = left(p1)
    assert pi == right(p2)
    return Pushout(P, pi, t, left, right)


def valuations(Q: AffineMonoid, pi: Sequence[int]) -> list:
    """Values of the primitive facet functionals on pi (multiplicities of the height-one primes)."""
    c = Q.coords(pi)
    return [la.dot(n, c) for n in Q.cone.facets]


def saturation_index(u: MonoidHom) -> int:
    pi = _uniformizer_image(u)
    out = 1
    for v in valuations(u.target, pi):
        if v > 0:
            out = lcm(out, v)
    return out


# ----------------------------------------------------------------------------
# bipartite cones


def bipartite_cone(n1: int, n2: int) -> tuple[list, list]:
    """Edges (i, j) of K_{n1,n2} and the functionals x_ij on Z^(n1+n2)."""
    edges = [(i, j) for i in range(n1) for j in range(n2)]
    rays = [tuple(int(k == i) + int(k == n1 + j) for k in range(n1 + n2)) for i, j in edges]
    return edges, rays


def _is_spanning_tree(n1: int, n2: int, tree: Sequence) -> bool:
    nodes = n1 + n2
    if len(tree) != nodes - 1 or len(set(tree)) != len(tree):
        return False
    parent = list(range(nodes))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for i, j in tree:
        if not (0 <= i < n1 and 0 <= j < n2):
            return False
        a, b = find(i), find(n1 + j)
        if a == b:
            return False
        parent[a] = b
    return True


def check_simplicial_subdivision(rays: Sequence[Sequence[int]], cells: Sequence[Sequence[int]]) -> None:
    """Raise NotASubdivision unless the simplicial cones on `cells` subdivide cone(rays).

    Certificate: every interior ridge borders exactly two cells on opposite sides,
    every boundary ridge exactly one, and a generic interior point lies in one cell.
    """
    basis = la.hnf(rays)
    d = len(basis)
    C = [la.coords(basis, r) for r in rays]
    cone = Cone(d, C)
    ridges: dict = {}
    for cell in cells:
        if len(cell) != d or la.rank([C[i] for i in cell]) != d:
            raise NotASubdivision(f"cell {tuple(cell)} is not a full simplicial cone")
        for k in cell:
            ridge = frozenset(cell) - {k}
            ridges.setdefault(ridge, []).append(k)
    hyperplanes = []
    for ridge, opposite in ridges.items():
        if d == 1:
            n = (1,)
        else:
            (n,) = la.nullspace([C[i] for i in ridge], d)
        hyperplanes.append(n)
        vals = [la.dot(n, c) for c in C]
        boundary = all(v >= 0 for v in vals) or all(v <= 0 for v in vals)
        if boundary:
            if d > 1 and len(opposite) != 1:
                raise NotASubdivision(f"boundary ridge {sorted(ridge)} used {len(opposite)} times")
        else:
            sides = sorted(la.dot(n, C[k]) > 0 for k in opposite)
            if sides != [False, True]:
                raise NotASubdivision(f"interior ridge {sorted(ridge)} not covered twice from both sides")
    for t in itertools.count(2):
        p = [0] * d
        for k, c in enumerate(C):
            w = t ** k + 1
            p = [a + w * b for a, b in zip(p, c)]
        if all(la.dot(n, p) != 0 for n in hyperplanes):
            break
    hits = 0
    for cell in cells:
        lam = la.solve_rows([C[i] for i in cell], p)
        if all(x > 0 for x in lam):
            hits += 1
    if hits != 1:
        raise NotASubdivision(f"generic point covered {hits} times")


def bipartite_unimodularity_check(n1: int, n2: int, subdivision: Sequence[Sequence]) -> bool:
    """True iff every spanning-tree cone is unimodular in the lattice generated by all x_ij."""
    edges, rays = bipartite_cone(n1, n2)
    trees = [tuple(sorted(tuple(e) for e in t)) for t in subdivision]
    for t in trees:
        if not _is_spanning_tree(n1, n2, t):
            raise NotSpanningTree(f"{list(t)} is not a spanning tree of K_{n1},{n2}")
    index = {e: k for k, e in enumerate(edges)}
    check_simplicial_subdivision(rays, [[index[e] for e in t] for t in trees])
    basis = la.hnf(rays)
    for t in trees:
        M = [la.coords(basis, rays[index[e]]) for e in t]
        if abs(la.det(M)) != 1:
            return False
    return True


def bipartite_triangulation(n1: int, n2: int, order: Sequence[int] | None = None) -> list:
    """Pulling triangulation of the bipartite cone, returned as spanning trees."""
    edges, rays = bipartite_cone(n1, n2)
    basis = la.hnf(rays)
    C = [la.coords(basis, r) for r in rays]
    cone = Cone(len(basis), C)
    ray_edge = {cone.rays[k]: k for k in range(len(cone.rays))}
    edge_of_ray = {ray_edge[la.primitive(c)]: edges[i] for i, c in enumerate(C)}
    if order is not None:
        order = [ray_edge[la.primitive(C[i])] for i in order]
    return [sorted(edge_of_ray[k] for k in simplex) for simplex in cone.triangulation(order)]


# ----------------------------------------------------------------------------
# serialization


def monoid_to_json(M: AffineMonoid, pi: Sequence[int] | None = None) -> dict:
    out = {"rank": M.ambient_rank, "generators": [list(g) for g in M.minimal_generators]}
    if pi is not None:
        out["pi"] = list(pi)
    return out


def monoid_from_json(data: dict) -> tuple[AffineMonoid, tuple | None]:
    M = AffineMonoid(int(data["rank"]), data["generators"])
    pi = tuple(int(x) for x in data["pi"]) if data.get("pi") is not None else None
    return M, pi
