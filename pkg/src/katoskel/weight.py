"""Weight functions from divisor data, their minimality loci, and the product identity.

On a cell sigma_x the weight is alpha |-> alpha(gamma_x) + m, where gamma_x in
M_x (x) Q is the local equation of the divisor: rho(gamma_x) equals the
multiplicity of the height-one point of each ray rho of sigma_x.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import lcm
from typing import Mapping, Sequence

from . import lattice as la
from .fan import FanAutomorphism, KatoFan
from .skeleton import CheckReport, PolyhedralComplex, ProductSkeleton, frac_str, parse_frac


class UnsupportedDivisorComponent(ValueError):
    pass


class NotQCartier(ValueError):
    pass


class EmptyFormList(ValueError):
    pass


@dataclass(frozen=True)
class LogDivisor:
    m: int
    mults: Mapping = field(default_factory=dict)
    # set by normalize_divisor: the result is d * D - n * div(pi)
    scale: int = 1
    shift: int = 0

    def __post_init__(self):
        if int(self.m) < 1:
            raise ValueError("the index m must be positive")
        object.__setattr__(self, "mults", {k: Fraction(v) for k, v in sorted(self.mults.items())})

    def mult(self, y: str) -> Fraction:
        return self.mults.get(y, Fraction(0))

    def plus(self, other: "LogDivisor") -> "LogDivisor":
        keys = set(self.mults) | set(other.mults)
        return LogDivisor(self.m, {k: self.mult(k) + other.mult(k) for k in keys})

    def scaled(self, c) -> "LogDivisor":
        return LogDivisor(self.m, {k: c * v for k, v in self.mults.items()})


def pi_divisor(F: KatoFan, m: int = 1) -> LogDivisor:
    """div(pi): multiplicity of pi along each vertical component."""
    return LogDivisor(m, {y: F.points[y].pi[0] for y in F.height_one() if F.points[y].vertical})


def ray_points(F: KatoFan, x: str) -> list:
    """(ray of sigma_x in N_x, height-one point) pairs."""
    out = []
    for y in F.generizations(x):
        if F.points[y].dim == 1:
            r = tuple(int(a) for a in F.iota(x, y, (1,)))
            out.append((r, y))
    return out


def _check_divisor(F: KatoFan, D: LogDivisor) -> None:
    h1 = set(F.height_one())
    for k in D.mults:
        if k not in h1:
            raise UnsupportedDivisorComponent(f"{k!r} is not a height-one point of the fan")


@dataclass
class PLWeight:
    complex: PolyhedralComplex
    divisor: LogDivisor
    gamma: dict  # fan point -> local equation in M_x (x) Q

    @property
    def m(self) -> int:
        return self.divisor.m

    def value(self, x: str, alpha: Sequence) -> Fraction:
        return la.dot(alpha, self.gamma[x]) + self.m

    def slope(self, x: str, direction: Sequence) -> Fraction:
        return la.dot(direction, self.gamma[x])

    def vertex_values(self, x: str) -> list:
        return [self.value(x, v) for v in self.complex.faces[x].vertices]

    def ray_slopes(self, x: str) -> list:
        return [self.slope(x, r) for r in self.complex.faces[x].rays]

    def functional(self, x: str) -> dict:
        return {"linear": [frac_str(a) for a in self.gamma[x]], "constant": self.m}

    def check_continuity(self) -> list:
        F = self.complex.fan
        bad = []
        for (x, y), T in F.tau.items():
            if x in self.gamma and y in self.gamma:
                img = tuple(la.vecmat(self.gamma[x], T)) if T and T[0] else ()
                if img != tuple(self.gamma[y]):
                    bad.append(f"weight jumps between {x} and {y}")
        return bad


def local_equation(F: KatoFan, x: str, D: LogDivisor) -> tuple:
    rp = ray_points(F, x)
    d = F.points[x].dim
    if d == 0:
        return ()
    rows_t = la.transpose([list(r) for r, _ in rp])
    g = la.solve_rows(rows_t, [D.mult(y) for _, y in rp])
    if g is None:
        raise NotQCartier(f"divisor is not Q-Cartier at {x}")
    return tuple(Fraction(a) for a in g)


def weight_function(Sk: PolyhedralComplex, D: LogDivisor, coefficients: Mapping | None = None) -> PLWeight:
    """PL weight; `coefficients` (boundary coefficients a_i of horizontal components) enables the range check."""
    F = Sk.fan
    _check_divisor(F, D)
    if coefficients:
        for y, a in coefficients.items():
            if D.mult(y) < D.m * (1 - Fraction(a)):
                raise ValueError(f"multiplicity along {y} is below m(1 - a)")
    gamma = {x: local_equation(F, x, D) for x in F.points}
    w = PLWeight(Sk, D, gamma)
    bad = w.check_continuity()
    if bad:
        raise ValueError("; ".join(bad))
    return w


# ----------------------------------------------------------------------------
# minimality


@dataclass
class Locus:
    status: str  # "ok" or "minus_infinity"
    minimum: Fraction | None
    cells: list
    complex: PolyhedralComplex | None

    def f_vector(self) -> list:
        return self.complex.f_vector() if self.complex is not None else []


def minimality_locus(w: PLWeight) -> Locus:
    Sk = w.complex
    for x in Sk.faces:
        if any(s < 0 for s in w.ray_slopes(x)):
            return Locus("minus_infinity", None, [], None)
    vals = [v for x in Sk.faces for v in w.vertex_values(x)]
    if not vals:
        return Locus("ok", None, [], Sk.subcomplex([]))
    mu = min(vals)
    cells = [x for x in Sk.faces
             if all(v == mu for v in w.vertex_values(x)) and all(s == 0 for s in w.ray_slopes(x))]
    return Locus("ok", mu, cells, Sk.subcomplex(cells))


def normalize_divisor(D: LogDivisor, F: KatoFan | PolyhedralComplex) -> LogDivisor:
    """d * D - n * div(pi) with d minimal, effective on vertical components, some vertical mult 0."""
    if isinstance(F, PolyhedralComplex):
        F = F.fan
    _check_divisor(F, D)
    vert = [y for y in F.height_one() if F.points[y].vertical]
    if not vert:
        raise ValueError("no vertical components")
    ratios = [D.mult(y) / F.points[y].pi[0] for y in vert]
    r = min(ratios)
    d = 1
    for q in [D.mult(y) for y in F.height_one()] + [r]:
        d = lcm(d, Fraction(q).denominator)
    n = int(d * r)
    mults = {}
    for y in F.height_one():
        v = d * D.mult(y)
        if y in vert:
            v -= n * F.points[y].pi[0]
        if v:
            mults[y] = v
    return LogDivisor(d * D.m, mults, scale=d, shift=n)


def characterization_check(Sk: PolyhedralComplex, D: LogDivisor) -> CheckReport:
    """A cell lies in the minimality locus iff the normalized divisor vanishes on every
    component through it (vertical and horizontal)."""
    F = Sk.fan
    Dn = normalize_divisor(D, F)
    loc = minimality_locus(weight_function(Sk, D))
    if loc.status != "ok":
        return CheckReport(False, ["weight unbounded below"])
    inside = set(loc.cells)
    bad = []
    for x in Sk.faces:
        pred = all(Dn.mult(y) == 0 for _, y in ray_points(F, x))
        if pred != (x in inside):
            bad.append(f"{x}: locus={x in inside} normalized-zero={pred}")
    return CheckReport(not bad, bad)


@dataclass
class EssentialSkeleton:
    cells: list
    complex: PolyhedralComplex
    loci: list


def essential_skeleton(Sk: PolyhedralComplex, forms: Sequence[LogDivisor]) -> EssentialSkeleton:
    if not forms:
        raise EmptyFormList("at least one form is required")
    loci = [minimality_locus(weight_function(Sk, D)) for D in forms]
    cells = sorted({x for L in loci if L.status == "ok" for x in L.complex.faces})
    return EssentialSkeleton(cells, Sk.subcomplex(cells), loci)


# ----------------------------------------------------------------------------
# products and group actions


def pullback_divisor(DX: LogDivisor, DY: LogDivisor, prod: ProductSkeleton) -> LogDivisor:
    """Multiplicities of pr_X^* div(omega_X) + pr_Y^* div(omega_Y) on the height-one points of the product."""
    if DX.m != DY.m:
        raise ValueError("forms must share the index m")
    Z = prod.complex.fan
    FX, FY = Z.product_of
    mults = {}
    for z in Z.height_one():
        x, y, Ix, Iy = Z.inclusions[z]
        g = [Fraction(0)]
        if x != "*":
            g = [a + b for a, b in zip(g, la.vecmat(local_equation(FX, x, DX), Ix))]
        if y != "*":
            g = [a + b for a, b in zip(g, la.vecmat(local_equation(FY, y, DY), Iy))]
        if g[0]:
            mults[z] = g[0]
    return LogDivisor(DX.m, mults)


def product_weight_check(wX: PLWeight, wY: PLWeight, wZ: PLWeight, prod: ProductSkeleton) -> CheckReport:
    """wt_Z = wt_X o pr_X + wt_Y o pr_Y - m on vertices and recession slopes, and
    the minimality locus of wt_Z corresponds cell by cell to the product of the loci."""
    bad = []
    m = wZ.m
    if not (wX.m == wY.m == m):
        return CheckReport(False, ["indices differ"])
    Sk = prod.complex
    for z, f in Sk.faces.items():
        x, y, _, _ = prod.maps[z]
        for v in f.vertices:
            a, b = prod.project(z, v)
            if wZ.value(z, v) != wX.value(x, a) + wY.value(y, b) - m:
                bad.append(f"identity fails at a vertex of {z}")
        for r in f.rays:
            a, b = prod.project(z, r)
            sx = wX.slope(x, a) if any(a) else 0
            sy = wY.slope(y, b) if any(b) else 0
            if wZ.slope(z, r) != sx + sy:
                bad.append(f"slope identity fails on a ray of {z}")
    LX, LY, LZ = minimality_locus(wX), minimality_locus(wY), minimality_locus(wZ)
    if {LX.status, LY.status} == {"ok"}:
        if LZ.status != "ok":
            bad.append("product weight unbounded below")
        else:
            pairs = sorted((prod.maps[z][0], prod.maps[z][1]) for z in LZ.cells)
            want = sorted((x, y) for x in LX.cells for y in LY.cells)
            if pairs != want:
                bad.append("minimality locus of the product is not the product of the loci")
            if LZ.minimum != LX.minimum + LY.minimum - m:
                bad.append("minimum weight does not add")
    return CheckReport(not bad, bad)


def weight_invariant(w: PLWeight, g: FanAutomorphism) -> bool:
    """wt o g = wt for the cell maps induced by a fan automorphism."""
    for x in w.complex.faces:
        A = g.mats[x]
        if tuple(la.vecmat(w.gamma[x], A)) != tuple(w.gamma[g(x)]):
            return False
    return True


# ----------------------------------------------------------------------------
# serialization


def divisor_from_json(data: Mapping) -> LogDivisor:
    return LogDivisor(int(data["m"]), {k: parse_frac(v) for k, v in data.get("mults", {}).items()})


def divisor_to_json(D: LogDivisor) -> dict:
    return {"m": D.m, "mults": {k: frac_str(v) for k, v in D.mults.items()}}


def weight_report(w: PLWeight) -> dict:
    loc = minimality_locus(w)
    faces = {}
    for x in w.complex.faces:
        faces[x] = {
            **w.functional(x),
            "vertex_values": [frac_str(v) for v in w.vertex_values(x)],
            "ray_slopes": [frac_str(s) for s in w.ray_slopes(x)],
        }
    return {
        "schema": "weight_report/v1",
        "divisor": divisor_to_json(w.divisor),
        "faces": faces,
        "status": loc.status,
        "minimum": frac_str(loc.minimum) if loc.minimum is not None else None,
        "argmin": loc.cells,
        "argmin_f_vector": loc.f_vector(),
    }
