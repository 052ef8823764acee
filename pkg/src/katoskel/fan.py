"""Kato fans presented combinatorially.

Every stalk C_x is stored in intrinsic coordinates: its group is Z^d and the
monoid is a full-dimensional saturated submonoid.  The dual lattice N_x = Z^d
carries the cone sigma_x of homomorphisms C_x -> R>=0.

A cospecialization x -> y (y a generization of x) is an integer d_x x d_y
matrix T with m |-> m T on M_x = C_x^gp.  Its transpose embeds N_y as a face
lattice of N_x.  The generic point (the zero cone) is never stored.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations
from fractions import Fraction
from typing import Callable, Iterable, Mapping, Sequence

from . import lattice as la
from .monoid import (
    AffineMonoid,
    Cone,
    NATURALS,
    free_monoid,
    hilbert_basis_of_cone,
    pushout_over_base,
    saturation_index,
    uniformizer,
)

GENERIC = "*"


class InconsistentStratification(ValueError):
    pass


class MissingBranchRule(ValueError):
    pass


class BranchRuleConflict(ValueError):
    pass


class RayOutsideCone(ValueError):
    pass


class ResolutionCapExceeded(RuntimeError):
    pass


# ----------------------------------------------------------------------------
# stratified input


@dataclass(frozen=True)
class Component:
    name: str
    kind: str = "vertical"
    multiplicity: int = 1

    def __post_init__(self):
        if self.kind not in ("vertical", "horizontal"):
            raise ValueError(f"unknown component kind {self.kind!r}")
        if self.kind == "vertical" and self.multiplicity < 1:
            raise ValueError("vertical multiplicities must be positive")


@dataclass(frozen=True)
class Stratum:
    components: frozenset
    branches: tuple = ("0",)
    # branch -> {sub-stratum key -> branch of that sub-stratum containing it}
    contained_in: Mapping = field(default_factory=dict, hash=False, compare=False)


@dataclass
class StratifiedModel:
    components: list
    strata: list
    name: str = ""
    overrides: dict = field(default_factory=dict)
    actions: dict = field(default_factory=dict)

    def component(self, name: str) -> Component:
        for c in self.components:
            if c.name == name:
                return c
        raise InconsistentStratification(f"unknown component {name!r}")

    def key(self, names: Iterable[str]) -> str:
        order = [c.name for c in self.components]
        return "+".join(sorted(names, key=order.index))

    def stratum(self, names: Iterable[str]):
        s = frozenset(names)
        for st in self.strata:
            if st.components == s:
                return st
        return None

    def point_id(self, names: Iterable[str], branch: str) -> str:
        st = self.stratum(names)
        k = self.key(names)
        return k if len(st.branches) == 1 else f"{k}#{branch}"


# ----------------------------------------------------------------------------
# fans


@dataclass(frozen=True)
class FanPoint:
    id: str
    stalk: AffineMonoid
    pi: tuple
    component_set: frozenset = frozenset()
    branch: str = "0"
    meta: Mapping = field(default_factory=dict, hash=False, compare=False)

    @property
    def vertical(self) -> bool:
        return any(self.pi)

    @property
    def dim(self) -> int:
        return self.stalk.dim

    @property
    def rays(self) -> list:
        """Primitive rays of sigma_x in N_x."""
        return list(self.stalk.cone.facets)


def _intrinsic(M: AffineMonoid) -> bool:
    return M.ambient_rank == M.dim and list(M.group_basis) == [tuple(r) for r in la.identity(M.dim)]


class KatoFan:
    """Finite fan: points with stalks and cospecialization matrices."""

    def __init__(self, points: Iterable[FanPoint], tau: Mapping, parent: "KatoFan | None" = None,
                 origin: Mapping | None = None, name: str = ""):
        self.points = {p.id: p for p in sorted(points, key=lambda p: (p.dim, p.id))}
        self.tau = {k: [list(r) for r in v] for k, v in tau.items()}
        for x in self.points:
            d = self.points[x].dim
            self.tau.setdefault((x, x), la.identity(d))
        for p in self.points.values():
            if not _intrinsic(p.stalk):
                raise ValueError(f"stalk of {p.id} is not in intrinsic coordinates")
            if not p.stalk.is_saturated:
                raise ValueError(f"stalk of {p.id} is not saturated")
        self.parent = parent
        self.origin = dict(origin or {})
        self.name = name
        self.product_of = None
        self.inclusions: dict = {}
        self.branch_counts: dict = {}

    # poset --------------------------------------------------------------------

    def generizations(self, x: str) -> list:
        return sorted((y for (a, y) in self.tau if a == x), key=lambda y: (self.points[y].dim, y))

    def specializations(self, y: str) -> list:
        return sorted((a for (a, b) in self.tau if b == y), key=lambda a: (self.points[a].dim, a))

    def is_generization(self, y: str, x: str) -> bool:
        """y lies in the closure-order below x (sigma_y is a face of sigma_x)."""
        return y == GENERIC or (x, y) in self.tau

    def iota(self, x: str, y: str, nu: Sequence) -> tuple:
        """Image in N_x of nu in N_y."""
        if y == GENERIC:
            return (0,) * self.points[x].dim
        T = self.tau[(x, y)]
        return tuple(sum(Fraction(T[i][j]) * nu[j] for j in range(len(nu))) for i in range(len(T)))

    def ids(self) -> list:
        return list(self.points)

    def vertical_points(self) -> list:
        return [x for x, p in self.points.items() if p.vertical]

    def height_one(self) -> list:
        return [x for x, p in self.points.items() if p.dim == 1]

    @property
    def semistable(self) -> bool:
        return all(saturation_index(uniformizer(p.stalk, p.pi)) == 1 for p in self.points.values() if p.vertical)

    def join(self, u: str, a: str, b: str) -> str:
        """Smallest face of sigma_u containing sigma_a and sigma_b."""
        cands = [y for y in self.generizations(u) if self.is_generization(a, y) and self.is_generization(b, y)]
        return min(cands, key=lambda y: (self.points[y].dim, y))

    def face_generators(self, x: str, y: str) -> list:
        """Hilbert basis elements of C_x killed by the cospecialization to y."""
        T = self.tau[(x, y)]
        return [h for h in self.points[x].stalk.hilbert_basis if not any(la.vecmat(h, T))]

    def contains_point(self, x: str, v: Sequence) -> bool:
        """Membership of v (in N_x coordinates, rational) in sigma_x."""
        return all(la.dot(g, v) >= 0 for g in self.points[x].stalk.hilbert_basis)

    # checks --------------------------------------------------------------------

    def verify(self) -> list:
        """Invariant violations, empty when the fan is well formed."""
        problems = []
        for (x, y), T in self.tau.items():
            px, py = self.points[x], self.points[y]
            if tuple(la.vecmat(px.pi, T)) != tuple(py.pi):
                problems.append(f"tau({x},{y}) does not preserve pi")
            if py.dim and la.rank(T) != py.dim:
                problems.append(f"tau({x},{y}) is not surjective")
            imgs = [la.vecmat(g, T) for g in px.stalk.generators]
            if any(not py.stalk.contains(i) for i in imgs):
                problems.append(f"tau({x},{y}) does not map into the stalk")
            if py.dim and la.hnf([i for i in imgs if any(i)]) != [tuple(r) for r in la.identity(py.dim)]:
                problems.append(f"tau({x},{y}) is not surjective on stalks")
        for (x, y) in self.tau:
            for z in self.generizations(y):
                if (x, z) not in self.tau:
                    problems.append(f"missing composite {x}->{z}")
                    continue
                comp = la.matmul(self.tau[(x, y)], self.tau[(y, z)])
                if comp != self.tau[(x, z)]:
                    problems.append(f"tau not functorial on {x}->{y}->{z}")
        for x, p in self.points.items():
            n_faces = len(p.stalk.cone.faces) - 1
            if len(self.generizations(x)) != n_faces:
                problems.append(f"{x}: {len(self.generizations(x))} generizations for {n_faces} nonzero faces")
        return problems


# ----------------------------------------------------------------------------
# construction from a stratification


def _projection(src: Sequence[str], dst: Sequence[str]) -> list:
    return [[int(a == b) for b in dst] for a in src]


def fan_from_stratification(m: StratifiedModel) -> KatoFan:
    names = [c.name for c in m.components]
    if len(set(names)) != len(names):
        raise InconsistentStratification("duplicate component names")
    keyed = {}
    for st in m.strata:
        if not st.components:
            raise InconsistentStratification("empty stratum")
        for n in st.components:
            m.component(n)
        if st.components in keyed:
            raise InconsistentStratification(f"stratum {m.key(st.components)} listed twice")
        if len(set(st.branches)) != len(st.branches) or not st.branches:
            raise InconsistentStratification(f"bad branch list on {m.key(st.components)}")
        keyed[st.components] = st

    def ordered(S):
        return [n for n in names if n in S]

    def container(S, b, T):
        """Branch of stratum T containing branch b of stratum S."""
        st_t = keyed.get(T)
        if st_t is None:
            raise InconsistentStratification(f"stratum {m.key(S)} lacks face {m.key(T)}")
        if len(st_t.branches) == 1:
            return st_t.branches[0]
        rule = keyed[S].contained_in.get(b, {})
        c = rule.get(m.key(T))
        if c is None or c not in st_t.branches:
            raise InconsistentStratification(
                f"branch {b} of {m.key(S)} does not say which branch of {m.key(T)} contains it")
        return c

    points = []
    tau = {}
    for S, st in keyed.items():
        comps = ordered(S)
        for b in st.branches:
            pid = m.point_id(S, b)
            ov = m.overrides.get((S, b))
            if ov is not None:
                stalk, pi = ov["stalk"], tuple(ov["pi"])
            else:
                stalk = free_monoid(len(comps))
                pi = tuple(m.component(n).multiplicity if m.component(n).kind == "vertical" else 0 for n in comps)
            points.append(FanPoint(pid, stalk, pi, frozenset(S), b))
    # sub-strata and containments
    for S, st in keyed.items():
        comps = ordered(S)
        subsets = [T for T in keyed if T < S]
        for b in st.branches:
            for r in range(1, len(S)):
                for T in combinations(comps, r):
                    T = frozenset(T)
                    if T not in keyed:
                        raise InconsistentStratification(f"stratum {m.key(S)} lacks face {m.key(T)}")
            for T in subsets:
                c = container(S, b, T)
                if (S, b) in m.overrides:
                    T_mat = m.overrides[(S, b)]["faces"][m.key(T)]
                else:
                    T_mat = _projection(comps, ordered(T))
                tau[(m.point_id(S, b), m.point_id(T, c))] = T_mat
    # transitivity of containment
    for S, st in keyed.items():
        for b in st.branches:
            for T in keyed:
                if not T < S:
                    continue
                c = container(S, b, T)
                for U in keyed:
                    if U < T and container(T, c, U) != container(S, b, U):
                        raise InconsistentStratification(
                            f"containments of {m.key(S)}#{b} through {m.key(T)} and directly into {m.key(U)} disagree")
    F = KatoFan(points, tau, name=m.name)
    F.model = m
    return F


# ----------------------------------------------------------------------------
# products


def _left_inverse(L: Sequence[Sequence]) -> list:
    """(L^t L)^-1 L^t for L of full column rank."""
    Lt = la.transpose(L)
    return la.matmul(la.inverse(la.matmul(Lt, L)), Lt)


def _solve_matrix(L: Sequence[Sequence], R: Sequence[Sequence], Linv: Sequence[Sequence] | None = None) -> list:
    """Integer T with L T = R, L of full column rank."""
    ncols = len(R[0]) if R and R[0] else 0
    if not ncols:
        return [[] for _ in range(len(L[0]) if L else 0)]
    if Linv is None:
        Linv = _left_inverse(L)
    T = la.matmul(Linv, R)
    if any(Fraction(x).denominator != 1 for row in T for x in row):
        raise ValueError("no integral solution")
    T = [[int(x) for x in row] for row in T]
    if la.matmul(L, T) != [list(map(int, row)) for row in R]:
        raise ValueError("no solution")
    return T


@lru_cache(maxsize=4096)
def _vertical_pair(A: AffineMonoid, pa: tuple, B: AffineMonoid, pb: tuple) -> tuple:
    P = pushout_over_base(uniformizer(A, pa), uniformizer(B, pb), saturated=True)
    Ix = [list(map(int, r)) for r in P.left.matrix]
    Iy = [list(map(int, r)) for r in P.right.matrix]
    return P.monoid, P.pi, Ix, Iy, P.torsion


def _direct_sum(A: AffineMonoid, B: AffineMonoid) -> AffineMonoid:
    a, b = A.dim, B.dim
    gens = [tuple(g) + (0,) * b for g in A.minimal_generators] + [(0,) * a + tuple(g) for g in B.minimal_generators]
    return AffineMonoid(a + b, gens, _saturated=True)


def _block(d1: int, d2: int, first: bool) -> list:
    n = d1 + d2
    rows = range(d1) if first else range(d1, n)
    return [[int(i == j) for j in range(n)] for i in rows]


def fan_product(F: KatoFan, G: KatoFan, branch_rule=None, enforce_semistable: bool = True) -> KatoFan:
    """Fiber product of two fans over the fan of the base trait."""
    semi = F.semistable or G.semistable
    if not semi and branch_rule is None:
        raise MissingBranchRule("neither factor is semistable; supply a branch rule")

    def n_of(x, y):
        if branch_rule is None:
            return 1
        if callable(branch_rule):
            n = branch_rule(x, y)
        else:
            n = branch_rule.get((x, y), branch_rule.get(f"({x},{y})", 1))
        n = int(n)
        if n < 1:
            raise ValueError("branch counts must be positive")
        if semi and enforce_semistable and n != 1:
            raise BranchRuleConflict(f"n({x},{y}) = {n} but a factor is semistable")
        return n

    fx = [GENERIC] + list(F.points)
    gy = [GENERIC] + list(G.points)
    pairs = {}
    for x in fx:
        for y in gy:
            if x == GENERIC and y == GENERIC:
                continue
            vx = x != GENERIC and F.points[x].vertical
            vy = y != GENERIC and G.points[y].vertical
            if vx != vy:
                continue
            if vx:
                px, py = F.points[x], G.points[y]
                S, pi, Ix, Iy, tors = _vertical_pair(px.stalk, tuple(px.pi), py.stalk, tuple(py.pi))
                pairs[(x, y)] = (S, pi, [r[:] for r in Ix], [r[:] for r in Iy], tors)
            else:
                A = F.points[x].stalk if x != GENERIC else AffineMonoid(0, [])
                B = G.points[y].stalk if y != GENERIC else AffineMonoid(0, [])
                S = _direct_sum(A, B)
                pairs[(x, y)] = (S, (0,) * S.dim, _block(A.dim, B.dim, True), _block(A.dim, B.dim, False), 1)

    counts = {}
    for (x, y) in pairs:
        counts[(x, y)] = n_of(x, y) if (x != GENERIC and y != GENERIC and F.points[x].vertical) else 1

    def pid(x, y, b):
        base = f"({x},{y})"
        return base if counts[(x, y)] == 1 else f"{base}#{b}"

    points = []
    for (x, y), (S, pi, Ix, Iy, tors) in pairs.items():
        for b in range(counts[(x, y)]):
            points.append(FanPoint(pid(x, y, b), S, tuple(pi), branch=str(b),
                                   meta={"pair": (x, y), "torsion": tors}))

    def gens_of(fan, x):
        return [GENERIC] if x == GENERIC else [GENERIC] + fan.generizations(x)

    def tau_of(fan, x, y):
        if y == GENERIC:
            d = fan.points[x].dim if x != GENERIC else 0
            return [[] for _ in range(d)]
        return fan.tau[(x, y)]

    tau = {}
    for (x, y), (S, pi, Ix, Iy, _) in pairs.items():
        Linv = _left_inverse(Ix + Iy) if S.dim else None
        for x2 in gens_of(F, x):
            for y2 in gens_of(G, y):
                if (x2, y2) not in pairs:
                    continue
                S2, _, Ix2, Iy2, _ = pairs[(x2, y2)]
                Tx, Ty = tau_of(F, x, x2), tau_of(G, y, y2)
                L = Ix + Iy
                R = (la.matmul(Tx, Ix2) if Tx and Tx[0] else [[0] * S2.dim for _ in Tx]) + \
                    (la.matmul(Ty, Iy2) if Ty and Ty[0] else [[0] * S2.dim for _ in Ty])
                T = _solve_matrix(L, R, Linv) if S2.dim else [[] for _ in range(S.dim)]
                for b in range(counts[(x, y)]):
                    b2 = b % counts[(x2, y2)]
                    tau[(pid(x, y, b), pid(x2, y2, b2))] = T
    Z = KatoFan(points, tau, name=f"{F.name} x {G.name}")
    Z.product_of = (F, G)
    Z.branch_counts = counts
    for (x, y), (S, pi, Ix, Iy, _) in pairs.items():
        for b in range(counts[(x, y)]):
            Z.inclusions[pid(x, y, b)] = (x, y, Ix, Iy)
    return Z


@dataclass
class MonotonicityReport:
    ok: bool
    violations: list

    def __bool__(self) -> bool:
        return self.ok


def n_monotonicity_check(Fprod: KatoFan) -> MonotonicityReport:
    """Branch counts must not drop under specialization: n(x', y') >= n(x, y)."""
    if Fprod.product_of is None:
        raise ValueError("not a product fan")
    bad = []
    for (z, z2) in Fprod.tau:
        if z == z2:
            continue
        p, p2 = Fprod.points[z].meta["pair"], Fprod.points[z2].meta["pair"]
        if Fprod.branch_counts[p] < Fprod.branch_counts[p2]:
            bad.append((p, p2))
    bad = sorted(set(bad))
    return MonotonicityReport(not bad, bad)


# ----------------------------------------------------------------------------
# subdivisions


def _dual_stalk(k: int, rays: Sequence[Sequence[int]]) -> AffineMonoid:
    """C = {m : m . r >= 0 for all rays}, for a full-dimensional cone spanned by rays in Z^k."""
    if k == 0:
        return AffineMonoid(0, [])
    cone = Cone(k, rays)
    dual = Cone(k, cone.facets)
    return AffineMonoid(k, hilbert_basis_of_cone(dual), _saturated=True)


def _coords_rational(B: Sequence[Sequence], v: Sequence):
    c = la.solve_rows(B, v)
    if c is None:
        raise ValueError("vector outside the lattice span")
    return c


def _lattice_coords(B, v) -> tuple:
    c = _coords_rational(B, v)
    if any(x.denominator != 1 for x in c):
        raise ValueError("vector outside the lattice")
    return tuple(int(x) for x in c)


def star_subdivision(F: KatoFan, point: str, ray: Sequence[int]) -> KatoFan:
    """Star subdivision at a lattice vector of sigma_point (given in N_point)."""
    if point not in F.points:
        raise KeyError(point)
    rho = la.vec(ray)
    pw = F.points[point]
    if len(rho) != pw.dim or not any(rho):
        raise RayOutsideCone("ray must be a nonzero vector of N_x")
    if not F.contains_point(point, rho):
        raise RayOutsideCone(f"{rho} is not in the cone of {point}")
    # move to the smallest face containing rho
    w = point
    zero = {h for h in pw.stalk.hilbert_basis if la.dot(h, rho) == 0}
    for y in F.generizations(point):
        if set(F.face_generators(point, y)) == zero:
            w = y
            break
    if w != point:
        T = F.tau[(point, w)]
        rho = _lattice_coords(la.transpose(T), rho)
    affected = [u for u in F.points if F.is_generization(w, u)]
    aff = set(affected)

    new_points, tau, origin = [], {}, {}
    for v in F.points:
        if v not in aff:
            new_points.append(F.points[v])
            origin[v] = (v, la.identity(F.points[v].dim))
    for (a, b), T in F.tau.items():
        if a not in aff and b not in aff:
            tau[(a, b)] = T

    def pid(u, g):
        return f"[{u}|{g}]"

    info = {}
    for u in affected:
        rho_u = tuple(int(x) for x in F.iota(u, w, rho))
        for g in [GENERIC] + F.generizations(u):
            if g != GENERIC and g in aff:
                continue
            if F.join(u, g, w) != u:
                continue
            span = [rho_u]
            if g != GENERIC:
                gp = F.points[g]
                span += [tuple(int(x) for x in F.iota(u, g, e)) for e in la.identity(gp.dim)]
            B = la.saturate_lattice(span, F.points[u].dim)
            k = len(B)
            rays = [_lattice_coords(B, rho_u)]
            if g != GENERIC:
                rays += [_lattice_coords(B, tuple(int(x) for x in F.iota(u, g, r))) for r in F.points[g].rays]
            stalk = _dual_stalk(k, rays)
            pi = tuple(la.dot(b, F.points[u].pi) for b in B)
            p = FanPoint(pid(u, g), stalk, pi, meta={"cell": (u, g), "ray": rho_u})
            new_points.append(p)
            origin[p.id] = (u, [list(b) for b in B])
            info[(u, g)] = B
    for (u, g), B in info.items():
        P = pid(u, g)
        k = len(B)

        def embed(vecs_in_u):
            cols = [_lattice_coords(B, v) for v in vecs_in_u]
            return la.transpose(cols) if cols else [[] for _ in range(k)]

        faces = [GENERIC] + ([] if g == GENERIC else F.generizations(g))
        for g2 in faces:
            if g2 != GENERIC:
                imgs = [tuple(int(x) for x in F.iota(u, g2, e)) for e in la.identity(F.points[g2].dim)]
                tau[(P, g2)] = embed(imgs)
            u2 = F.join(u, g2, w)
            B2 = info[(u2, g2)]
            imgs = [tuple(int(x) for x in F.iota(u, u2, b)) for b in B2]
            tau[(P, pid(u2, g2))] = embed(imgs)
    out = KatoFan(new_points, tau, parent=F, origin=origin, name=F.name)
    out.model = getattr(F, "model", None)
    return out


def barycentric_subdivision(F: KatoFan) -> KatoFan:
    order = sorted(F.points, key=lambda x: (-F.points[x].dim, x))
    cur = F
    for x in order:
        p = F.points[x]
        if p.dim < 2:
            continue
        rho = [0] * p.dim
        for r in p.rays:
            rho = [a + b for a, b in zip(rho, r)]
        cur = star_subdivision(cur, x, rho)
    return _flatten(cur, F)


def _flatten(G: KatoFan, F: KatoFan) -> KatoFan:
    """Re-parent an iterated subdivision directly onto F."""
    if G is F:
        return G
    origin = {}
    for x in G.points:
        y, M = x, la.identity(G.points[x].dim)
        H = G
        while H is not F:
            y0, B = H.origin[y]
            M = la.matmul(M, B) if M and B else B
            y = y0
            H = H.parent
        origin[x] = (y, M)
    out = KatoFan(G.points.values(), G.tau, parent=F, origin=origin, name=G.name)
    out.model = getattr(F, "model", None)
    return out


def is_regular(F: KatoFan) -> bool:
    return all(p.stalk.is_free for p in F.points.values())


def resolution_ray(F: KatoFan, x: str) -> tuple:
    """Greedy choice: minimal multiplicity, then lexicographic, among Hilbert elements of sigma_x."""
    p = F.points[x]
    cone = Cone(p.dim, p.rays)
    hb = hilbert_basis_of_cone(cone)
    rays = set(cone.rays)
    cands = [h for h in hb if h not in rays] or sorted(rays)
    return min(cands, key=lambda h: (la.dot(h, p.pi), h))


def resolve(F: KatoFan, cap: int = 200) -> KatoFan:
    cur = F
    for _ in range(cap):
        bad = [x for x, p in cur.points.items() if not p.stalk.is_free]
        if not bad:
            return _flatten(cur, F)
        x = min(bad, key=lambda y: (cur.points[y].dim, y))
        cur = star_subdivision(cur, x, resolution_ray(cur, x))
    raise ResolutionCapExceeded(f"fan not regular after {cap} star subdivisions")


def fan_from_cone(rays: Sequence[Sequence[int]], pi: Sequence[int], name: str = "cone") -> KatoFan:
    """Fan of one cone sigma (given by ray generators in N = Z^d) and all its faces.

    The closed point has stalk sigma^dual intersected with M; faces become generizations.
    """
    d = len(pi)
    top = Cone(d, rays)
    C = _dual_stalk(d, top.rays)
    faces = [F for F in top.faces if F]
    pts, info = [], {}
    for F in faces:
        span = [top.rays[i] for i in F]
        B = la.saturate_lattice(span, d)
        k = len(B)
        rs = [_lattice_coords(B, top.rays[i]) for i in sorted(F)]
        stalk = C if k == d else _dual_stalk(k, rs)
        fid = name if k == d else name + "/" + ".".join(str(i) for i in sorted(F))
        pts.append(FanPoint(fid, stalk, tuple(la.dot(b, pi) for b in B)))
        info[F] = (fid, B)
    tau = {}
    for F, (fid, B) in info.items():
        for G, (gid, B2) in info.items():
            if G <= F:
                cols = [_lattice_coords(B, b) for b in B2]
                tau[(fid, gid)] = la.transpose(cols)
    return KatoFan(pts, tau, name=name)


# ----------------------------------------------------------------------------
# automorphisms


@dataclass
class FanAutomorphism:
    """Point permutation with linear isomorphisms A_x : M_x -> M_{g x} (m |-> m A_x)."""

    perm: dict
    mats: dict

    def __call__(self, x: str) -> str:
        return self.perm[x]


def stratified_automorphism(F: KatoFan, component_map: Mapping | None = None,
                            branch_map: Mapping | None = None) -> FanAutomorphism:
    m = F.model
    cmap = {c.name: c.name for c in m.components}
    cmap.update(component_map or {})
    perm, mats = {}, {}
    names = [c.name for c in m.components]
    for x, p in F.points.items():
        S = p.component_set
        T = frozenset(cmap[n] for n in S)
        st = m.stratum(T)
        if st is None:
            raise ValueError(f"image of {x} is not a stratum")
        b = (branch_map or {}).get(p.branch, p.branch) if len(st.branches) > 1 else st.branches[0]
        y = m.point_id(T, b)
        src = [n for n in names if n in S]
        dst = [n for n in names if n in T]
        perm[x] = y
        mats[x] = [[int(cmap[a] == c) for c in dst] for a in src]
        if m.component(src[0]) and any(
                m.component(a).multiplicity != m.component(cmap[a]).multiplicity for a in src):
            raise ValueError("automorphism changes multiplicities")
    aut = FanAutomorphism(perm, mats)
    check_automorphism(F, aut)
    return aut


def check_automorphism(F: KatoFan, g: FanAutomorphism) -> None:
    if sorted(g.perm.values()) != sorted(F.points):
        raise ValueError("not a permutation of the fan points")
    for (x, y), T in F.tau.items():
        if (g(x), g(y)) not in F.tau:
            raise ValueError(f"{x}->{y} is not mapped to a cospecialization")
        lhs = la.matmul(T, g.mats[y]) if T and T[0] else []
        rhs = la.matmul(g.mats[x], F.tau[(g(x), g(y))]) if g.mats[x] and g.mats[x][0] else []
        if lhs != rhs:
            raise ValueError(f"automorphism not compatible with tau({x},{y})")
    for x, p in F.points.items():
        if tuple(la.vecmat(p.pi, g.mats[x])) != tuple(F.points[g(x)].pi):
            raise ValueError(f"automorphism moves pi at {x}")


def product_automorphism(Z: KatoFan, gx: FanAutomorphism, gy: FanAutomorphism) -> FanAutomorphism:
    """Diagonal action on a product fan without branching."""
    if Z.product_of is None:
        raise ValueError("not a product fan")
    if any(n != 1 for n in Z.branch_counts.values()):
        raise ValueError("diagonal action needs a product without extra branches")
    perm, mats = {}, {}

    def img(g, x):
        return GENERIC if x == GENERIC else g(x)

    def mat(g, x):
        return [] if x == GENERIC else g.mats[x]

    for z, (x, y, Ix, Iy) in Z.inclusions.items():
        x2, y2 = img(gx, x), img(gy, y)
        z2 = f"({x2},{y2})"
        _, _, Ix2, Iy2 = Z.inclusions[z2]
        Ax, Ay = mat(gx, x), mat(gy, y)
        R = (la.matmul(Ax, Ix2) if Ax else []) + (la.matmul(Ay, Iy2) if Ay else [])
        perm[z] = z2
        mats[z] = _solve_matrix(Ix + Iy, R)
    aut = FanAutomorphism(perm, mats)
    check_automorphism(Z, aut)
    return aut


# ----------------------------------------------------------------------------
# serialization


def model_from_json(data: Mapping) -> StratifiedModel:
    comps = [Component(c["name"], c.get("kind", "vertical"), int(c.get("multiplicity", 1)))
             for c in data["components"]]
    strata = []
    for s in data["strata"]:
        branches, contained = [], {}
        for b in s.get("branches", ["0"]):
            if isinstance(b, Mapping):
                branches.append(str(b["id"]))
                contained[str(b["id"])] = dict(b.get("in", {}))
            else:
                branches.append(str(b))
        strata.append(Stratum(frozenset(s["components"]), tuple(branches), contained))
    return StratifiedModel(comps, strata, name=data.get("name", ""), actions=dict(data.get("actions", {})))


def model_to_json(m: StratifiedModel) -> dict:
    out = {"schema": "stratified_model/v1", "name": m.name, "components": [], "strata": []}
    for c in m.components:
        d = {"name": c.name, "kind": c.kind}
        if c.kind == "vertical":
            d["multiplicity"] = c.multiplicity
        out["components"].append(d)
    for s in m.strata:
        names = [c.name for c in m.components if c.name in s.components]
        br = []
        for b in s.branches:
            if s.contained_in.get(b):
                br.append({"id": b, "in": dict(sorted(s.contained_in[b].items()))})
            else:
                br.append(b)
        out["strata"].append({"components": names, "branches": br})
    if m.actions:
        out["actions"] = m.actions
    return out


def fan_to_json(F: KatoFan) -> dict:
    pts = []
    for x, p in F.points.items():
        pts.append({
            "id": x,
            "rank": p.dim,
            "hilbert_basis": [list(h) for h in p.stalk.hilbert_basis],
            "pi": list(p.pi),
            "vertical": p.vertical,
            "free": p.stalk.is_free,
            "generizations": [y for y in F.generizations(x) if y != x],
        })
    return {"schema": "kato_fan/v1", "name": F.name, "points": pts}
