"""Skeleton cells sigma_x = {alpha >= 0 on C_x, alpha(pi) = 1} and their gluing."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from . import lattice as la
from .fan import GENERIC, FanAutomorphism, KatoFan
from .monoid import NotASubdivision


class NotAProductFan(ValueError):
    pass


def frac_str(q) -> str:
    q = Fraction(q)
    return f"{q.numerator}/{q.denominator}"


def parse_frac(s) -> Fraction:
    return Fraction(s) if not isinstance(s, str) else Fraction(s.strip())


@dataclass(frozen=True)
class SkeletonFace:
    id: str
    dim: int
    vertices: tuple  # rational points of N_x with alpha(pi) = 1
    rays: tuple  # primitive integer directions with alpha(pi) = 0
    inequalities: tuple  # Hilbert basis of C_x: alpha(g) >= 0
    pi: tuple

    @property
    def bounded(self) -> bool:
        return not self.rays

    def contains(self, alpha: Sequence) -> bool:
        return la.dot(alpha, self.pi) == 1 and all(la.dot(alpha, g) >= 0 for g in self.inequalities)


def cell_of(F: KatoFan, x: str) -> SkeletonFace | None:
    """The cell of a fan point, or None when pi = 0 (empty cell)."""
    p = F.points[x]
    if not p.vertical:
        return None
    verts, rays = [], []
    for r in p.rays:
        h = la.dot(r, p.pi)
        if h > 0:
            verts.append(tuple(Fraction(a, h) for a in r))
        else:
            rays.append(tuple(r))
    return SkeletonFace(x, p.dim - 1, tuple(sorted(verts)), tuple(sorted(rays)),
                        tuple(p.stalk.hilbert_basis), tuple(p.pi))


class PolyhedralComplex:
    """Cells of the vertical fan points, glued along the face embeddings."""

    def __init__(self, fan: KatoFan, faces: Mapping[str, SkeletonFace], name: str = ""):
        self.fan = fan
        self.faces = dict(sorted(faces.items(), key=lambda kv: (kv[1].dim, kv[0])))
        self.name = name

    # poset ---------------------------------------------------------------------

    def below(self, x: str) -> list:
        """Faces of the cell x (including x)."""
        return [y for y in self.fan.generizations(x) if y in self.faces]

    def above(self, y: str) -> list:
        return [x for x in self.fan.specializations(y) if x in self.faces]

    def embedding(self, x: str, y: str) -> list:
        """Matrix E with alpha_y |-> E alpha_y in N_x."""
        return self.fan.tau[(x, y)]

    def f_vector(self) -> list:
        if not self.faces:
            return []
        top = max(f.dim for f in self.faces.values())
        return [sum(1 for f in self.faces.values() if f.dim == k) for k in range(top + 1)]

    @property
    def bounded(self) -> bool:
        return all(f.bounded for f in self.faces.values())

    def subcomplex(self, ids: Iterable[str]) -> "PolyhedralComplex":
        keep = set()
        for x in ids:
            keep.update(self.below(x))
        return PolyhedralComplex(self.fan, {x: self.faces[x] for x in keep}, self.name)

    def bounded_subcomplex(self) -> "PolyhedralComplex":
        return PolyhedralComplex(self.fan, {x: f for x, f in self.faces.items() if f.bounded}, self.name)

    def image(self, x: str, y: str, alpha: Sequence) -> tuple:
        return self.fan.iota(x, y, alpha)

    # checks ----------------------------------------------------------------------

    def check_gluing(self) -> list:
        """The image of sigma_y in sigma_x is the face cut out by the generators killed by tau."""
        problems = []
        for x, fx in self.faces.items():
            for y in self.below(x):
                if y == x:
                    continue
                fy = self.faces[y]
                killed = self.fan.face_generators(x, y)
                expect_v = sorted(v for v in fx.vertices if all(la.dot(v, g) == 0 for g in killed))
                expect_r = sorted(r for r in fx.rays if all(la.dot(r, g) == 0 for g in killed))
                got_v = sorted(tuple(self.image(x, y, v)) for v in fy.vertices)
                got_r = sorted(tuple(int(a) for a in self.image(x, y, r)) for r in fy.rays)
                if got_v != expect_v or got_r != expect_r:
                    problems.append(f"{y} is not glued onto the matching face of {x}")
        return problems

    def __eq__(self, other) -> bool:
        return isinstance(other, PolyhedralComplex) and self.faces == other.faces

    def __repr__(self) -> str:
        return f"PolyhedralComplex(f={self.f_vector()}, bounded={self.bounded})"


def skeleton_of_fan(F: KatoFan) -> PolyhedralComplex:
    faces = {}
    for x in F.points:
        c = cell_of(F, x)
        if c is not None:
            faces[x] = c
    return PolyhedralComplex(F, faces, F.name)


def complex_action(Sk: PolyhedralComplex, g: FanAutomorphism) -> dict:
    """Cell permutation induced by a fan automorphism."""
    return {x: g(x) for x in Sk.faces}


# ----------------------------------------------------------------------------
# products


@dataclass
class ProductSkeleton:
    complex: PolyhedralComplex
    X: PolyhedralComplex
    Y: PolyhedralComplex
    maps: dict  # z -> (x, y, Ix, Iy); pr_X(alpha) = Ix alpha
    semistable: bool

    def project(self, z: str, alpha: Sequence) -> tuple:
        x, y, Ix, Iy = self.maps[z]
        a = tuple(sum(Fraction(r[j]) * alpha[j] for j in range(len(alpha))) for r in Ix)
        b = tuple(sum(Fraction(r[j]) * alpha[j] for j in range(len(alpha))) for r in Iy)
        return a, b


def product_skeleton(SkX: PolyhedralComplex, SkY: PolyhedralComplex, Fprod: KatoFan) -> ProductSkeleton:
    if Fprod.product_of is None:
        raise NotAProductFan("fan was not built by fan_product")
    FX, FY = Fprod.product_of
    if FX is not SkX.fan or FY is not SkY.fan:
        raise NotAProductFan("product fan does not come from the given skeletons")
    Sk = skeleton_of_fan(Fprod)
    maps = {z: Fprod.inclusions[z] for z in Sk.faces}
    return ProductSkeleton(Sk, SkX, SkY, maps, FX.semistable or FY.semistable)


@dataclass
class CheckReport:
    ok: bool
    witnesses: list = field(default_factory=list)

    def __bool__(self) -> bool:
        return self.ok


def _prim_dir(v) -> tuple:
    return la.primitive([Fraction(a) for a in v])


def check_product_homeomorphism(res: ProductSkeleton) -> CheckReport:
    """Face bijection with pairs, cellwise affine invertibility, and compatibility with gluing."""
    Sk, X, Y = res.complex, res.X, res.Y
    bad = []
    over: dict = {}
    for z, (x, y, _, _) in res.maps.items():
        over.setdefault((x, y), []).append(z)
    for x in X.faces:
        for y in Y.faces:
            n = len(over.get((x, y), []))
            if n != 1:
                bad.append(f"pair ({x},{y}) has {n} cells over it")
    for (x, y) in over:
        if x not in X.faces or y not in Y.faces:
            bad.append(f"cell over ({x},{y}) does not map to a product cell")
    fan = Sk.fan
    for z, (x, y, Ix, Iy) in res.maps.items():
        if x not in X.faces or y not in Y.faces:
            continue
        fz, fx, fy = Sk.faces[z], X.faces[x], Y.faces[y]
        if fz.dim != fx.dim + fy.dim:
            bad.append(f"{z}: dimension {fz.dim} != {fx.dim} + {fy.dim}")
            continue
        P = Ix + Iy
        if la.rank(P) != fan.points[z].dim:
            bad.append(f"{z}: cell map not injective")
            continue
        imgs = sorted(tuple(a) + tuple(b) for a, b in (res.project(z, v) for v in fz.vertices))
        want = sorted(tuple(v) + tuple(w) for v in fx.vertices for w in fy.vertices)
        if imgs != want:
            bad.append(f"{z}: vertices do not map onto products of vertices")
        rimg = sorted(_prim_dir(tuple(a) + tuple(b)) for a, b in (res.project(z, r) for r in fz.rays))
        rwant = sorted([tuple(r) + (0,) * len(fy.pi) for r in fx.rays] + [(0,) * len(fx.pi) + tuple(s) for s in fy.rays])
        if rimg != rwant:
            bad.append(f"{z}: recession directions do not match")
        # lattice index of the image inside {(a, b) : a(pi_x) = b(pi_y)}
        target = la.integer_kernel([list(fx.pi) + [-c for c in fy.pi]], len(fx.pi) + len(fy.pi))
        image = la.hnf(la.transpose(P))
        if image != la.hnf(target):
            bad.append(f"{z}: cell map is not unimodular")
    for (z, z2) in fan.tau:
        if z == z2 or z not in Sk.faces or z2 not in Sk.faces:
            continue
        x, y, Ix, Iy = res.maps[z]
        x2, y2, Ix2, Iy2 = res.maps[z2]
        if not (X.fan.is_generization(x2, x) and Y.fan.is_generization(y2, y)):
            bad.append(f"{z2} < {z} but projections are not faces")
            continue
        E = fan.tau[(z, z2)]
        lhs = la.matmul(Ix, E)
        rhs = la.matmul(X.fan.tau[(x, x2)], Ix2)
        lhs2 = la.matmul(Iy, E)
        rhs2 = la.matmul(Y.fan.tau[(y, y2)], Iy2)
        if lhs != rhs or lhs2 != rhs2:
            bad.append(f"projection does not commute with gluing on {z2} < {z}")
    return CheckReport(not bad, bad)


# ----------------------------------------------------------------------------
# subdivisions


def subdivide_complex(Sk: PolyhedralComplex, G: KatoFan) -> PolyhedralComplex:
    """Skeleton of a subdivided fan, checked against the original support."""
    if G is Sk.fan:
        return Sk
    if G.parent is not Sk.fan:
        raise NotASubdivision("fan is not a subdivision of the skeleton's fan")
    new = skeleton_of_fan(G)
    old_vertices = {}
    for x, f in Sk.faces.items():
        if f.dim == 0:
            old_vertices[x] = f.vertices[0]
    hit = set()
    for z, f in new.faces.items():
        x, B = G.origin[z]
        if x not in Sk.faces:
            raise NotASubdivision(f"{z} lies over a non-vertical cell {x}")
        parent = Sk.faces[x]
        for v in f.vertices:
            a = la.vecmat(v, B)
            if not parent.contains(a):
                raise NotASubdivision(f"vertex of {z} leaves cell {x}")
            if parent.dim == 0:
                hit.add(x)
        for r in f.rays:
            a = la.vecmat(r, B)
            if la.dot(a, parent.pi) != 0 or any(la.dot(a, g) < 0 for g in parent.inequalities):
                raise NotASubdivision(f"ray of {z} leaves the recession cone of {x}")
    if set(old_vertices) - hit:
        raise NotASubdivision("an old vertex is not covered")
    return new


# ----------------------------------------------------------------------------
# serialization


def complex_to_json(Sk: PolyhedralComplex) -> dict:
    faces = []
    for x, f in Sk.faces.items():
        faces.append({
            "id": x,
            "dim": f.dim,
            "vertices": [[frac_str(a) for a in v] for v in f.vertices],
            "rays": [list(r) for r in f.rays],
            "faces": [y for y in Sk.below(x) if y != x],
        })
    incl = []
    for x in Sk.faces:
        for y in Sk.below(x):
            if y != x:
                incl.append({"from": y, "to": x, "matrix": Sk.embedding(x, y)})
    return {"schema": "polyhedral_complex/v1", "name": Sk.name, "f_vector": Sk.f_vector(),
            "faces": faces, "inclusions": incl}
