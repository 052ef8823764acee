"""Simplicial complexes, finite group quotients, symmetric products, the Kummer kernel,
integral homology and closed-surface classification."""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from itertools import permutations, product as iproduct
from math import factorial
from typing import Callable, Hashable, Iterable, Mapping, Sequence

from . import lattice as la
from .skeleton import PolyhedralComplex

DEFAULT_CAP = 500_000
DEFAULT_SUBDIVISIONS = 3


class UnboundedFace(ValueError):
    pass


class SizeCapExceeded(RuntimeError):
    pass


class RegularizationCapExceeded(SizeCapExceeded):
    pass


class InvalidAction(ValueError):
    pass


def _lkey(label) -> str:
    return repr(label)


class SimplicialComplex:
    """Finite abstract simplicial complex, closed under faces.

    Vertices carry arbitrary hashable labels; simplices are sorted tuples of
    vertex indices.
    """

    def __init__(self, facets: Iterable[Iterable[Hashable]], cap: int = DEFAULT_CAP):
        fl = [tuple(f) for f in facets]
        labels = sorted({v for f in fl for v in f}, key=_lkey)
        self.labels = labels
        self.index = {v: i for i, v in enumerate(labels)}
        seen: set = set()
        for f in fl:
            s = tuple(sorted(self.index[v] for v in f))
            if len(set(s)) != len(s):
                raise ValueError(f"simplex {f} repeats a vertex")
            seen.add(s)
        # closure by dimension, top down
        top = max((len(s) for s in seen), default=0)
        layers: list = [set() for _ in range(top)]
        for s in seen:
            layers[len(s) - 1].add(s)
        total = 0
        for k in range(top - 1, 0, -1):
            for s in layers[k]:
                for i in range(len(s)):
                    layers[k - 1].add(s[:i] + s[i + 1:])
            total += len(layers[k])
            if total > cap:
                raise SizeCapExceeded(f"complex has more than {cap} simplices")
        self.simplices = [sorted(L) for L in layers]
        self._pos = [{s: i for i, s in enumerate(L)} for L in self.simplices]

    # basic data ------------------------------------------------------------

    @property
    def dim(self) -> int:
        return len(self.simplices) - 1

    @property
    def n_vertices(self) -> int:
        return len(self.labels)

    def f_vector(self) -> list:
        return [len(L) for L in self.simplices]

    def size(self) -> int:
        return sum(self.f_vector())

    def all_simplices(self):
        for L in self.simplices:
            yield from L

    def facets(self) -> list:
        out = []
        for k, L in enumerate(self.simplices):
            if k + 1 < len(self.simplices):
                covered = set()
                for t in self.simplices[k + 1]:
                    for i in range(len(t)):
                        covered.add(t[:i] + t[i + 1:])
                out.extend(s for s in L if s not in covered)
            else:
                out.extend(L)
        return out

    def labelled(self, s: Sequence[int]) -> tuple:
        return tuple(self.labels[i] for i in s)

    def contains(self, s: Sequence[int]) -> bool:
        s = tuple(sorted(s))
        return 0 < len(s) <= len(self.simplices) and s in self._pos[len(s) - 1]

    def is_pure(self) -> bool:
        return all(len(f) == self.dim + 1 for f in self.facets())

    def boundary(self, k: int) -> dict:
        """Sparse boundary d_k: column j (k-simplex) -> {row (k-1)-simplex index: sign}."""
        cols = {}
        if k <= 0 or k > self.dim:
            return cols
        pos = self._pos[k - 1]
        for j, s in enumerate(self.simplices[k]):
            cols[j] = {pos[s[:i] + s[i + 1:]]: (-1) ** i for i in range(len(s))}
        return cols

    def euler_characteristic(self) -> int:
        return sum((-1) ** k * n for k, n in enumerate(self.f_vector()))

    def relabel(self, f: Callable) -> "SimplicialComplex":
        return SimplicialComplex([[f(v) for v in self.labelled(s)] for s in self.facets()])

    def __eq__(self, other) -> bool:
        if not isinstance(other, SimplicialComplex):
            return NotImplemented
        a = sorted(tuple(sorted(map(_lkey, self.labelled(s)))) for s in self.facets())
        b = sorted(tuple(sorted(map(_lkey, other.labelled(s)))) for s in other.facets())
        return a == b

    def __repr__(self) -> str:
        return f"SimplicialComplex(f={self.f_vector()})"


def boundary_of_simplex(n: int) -> SimplicialComplex:
    """Boundary of the n-simplex on vertices 0..n."""
    return SimplicialComplex([tuple(j for j in range(n + 1) if j != i) for i in range(n + 1)])


def simplex(n: int) -> SimplicialComplex:
    return SimplicialComplex([tuple(range(n + 1))])


def euler_characteristic(K) -> int:
    if isinstance(K, PolyhedralComplex):
        return sum((-1) ** k * n for k, n in enumerate(K.f_vector()))
    return K.euler_characteristic()


# ----------------------------------------------------------------------------
# group actions


class GroupAction:
    """Finite group acting on the vertices of a complex by simplicial automorphisms.

    Elements are tuples p with p[i] the image of vertex i; the group is the
    closure of the given generators.
    """

    def __init__(self, K: SimplicialComplex, generators: Iterable, name: str = ""):
        self.K = K
        self.name = name
        gens = [self._as_perm(g) for g in generators]
        for g in gens:
            self._check(g)
        e = tuple(range(K.n_vertices))
        elems = {e}
        frontier = [e]
        while frontier:
            nxt = []
            for a in frontier:
                for g in gens:
                    c = tuple(g[a[i]] for i in range(len(a)))
                    if c not in elems:
                        elems.add(c)
                        nxt.append(c)
            frontier = nxt
        self.elements = sorted(elems)
        self.generators = gens

    def _as_perm(self, g) -> tuple:
        K = self.K
        if isinstance(g, Mapping):
            return tuple(K.index[g.get(v, v)] for v in K.labels)
        if callable(g):
            return tuple(K.index[g(v)] for v in K.labels)
        return tuple(g)

    def _check(self, g: tuple) -> None:
        K = self.K
        if sorted(g) != list(range(K.n_vertices)):
            raise InvalidAction("generator is not a vertex permutation")
        for s in K.facets():
            img = tuple(sorted(g[i] for i in s))
            if not K.contains(img):
                raise InvalidAction(f"generator does not map {K.labelled(s)} to a simplex")

    @property
    def order(self) -> int:
        return len(self.elements)

    def table(self) -> list:
        """Composition table: table[i][j] is the index of elements[i] o elements[j]."""
        idx = {g: i for i, g in enumerate(self.elements)}
        return [[idx[tuple(a[b[v]] for v in range(len(b)))] for b in self.elements] for a in self.elements]

    def vertex_orbits(self) -> list:
        orb = [-1] * self.K.n_vertices
        k = 0
        for v in range(self.K.n_vertices):
            if orb[v] < 0:
                for g in self.elements:
                    orb[g[v]] = k
                k += 1
        return orb

    def image(self, g: tuple, s: Sequence[int]) -> tuple:
        return tuple(sorted(g[i] for i in s))


def trivial_action(K: SimplicialComplex) -> GroupAction:
    return GroupAction(K, [])


def regularity_defects(A: GroupAction) -> list:
    """Empty iff the action is regular: no simplex meets an orbit twice, and simplices with
    the same vertex orbits are translates of each other."""
    K = A.K
    orb = A.vertex_orbits()
    bad = []
    for s in K.facets():
        if len({orb[i] for i in s}) != len(s):
            bad.append(f"simplex {K.labelled(s)} meets an orbit twice")
            return bad
    rep: dict = {}
    for s in K.all_simplices():
        key = tuple(sorted(orb[i] for i in s))
        canon = min(A.image(g, s) for g in A.elements)
        if rep.setdefault(key, canon) != canon:
            bad.append(f"simplices over orbits {key} are not translates")
            return bad
    return bad


def barycentric(K: SimplicialComplex, A: GroupAction | None = None, cap: int = DEFAULT_CAP):
    """Barycentric subdivision; vertices are the simplices of K (as label tuples)."""
    facets = []
    count = 0
    for f in K.facets():
        for perm in permutations(f):
            facets.append(tuple(tuple(sorted(perm[:i + 1])) for i in range(len(perm))))
            count += 1
            if count > cap:
                raise SizeCapExceeded(f"subdivision has more than {cap} facets")
    L = SimplicialComplex([[K.labelled(s) for s in fl] for fl in facets], cap=cap)
    if A is None:
        return L
    gens = []
    for g in A.generators:
        gens.append({lab: tuple(sorted((K.labels[g[K.index[v]]] for v in lab), key=_lkey))
                     for lab in L.labels})
    # label tuples are kept sorted by index order in K; normalize the images the same way
    fixed = []
    for gm in gens:
        fixed.append({k: tuple(sorted(v, key=lambda x: K.index[x])) for k, v in gm.items()})
    return L, GroupAction(L, fixed, A.name)


def group_quotient(K: SimplicialComplex, A: GroupAction, max_subdivisions: int = DEFAULT_SUBDIVISIONS,
                   cap: int = DEFAULT_CAP) -> SimplicialComplex:
    """|K|/G as a simplicial complex, after equivariant barycentric subdivision to a regular action."""
    steps = 0
    while regularity_defects(A):
        if steps == max_subdivisions:
            raise RegularizationCapExceeded(f"action not regular after {steps} subdivisions")
        K, A = barycentric(K, A, cap=cap)
        steps += 1
    orb = A.vertex_orbits()
    rep = {}
    for v in range(K.n_vertices):
        rep.setdefault(orb[v], K.labels[v])
    Q = SimplicialComplex([[rep[orb[i]] for i in s] for s in K.facets()], cap=cap)
    Q.subdivisions = steps
    return Q


# ----------------------------------------------------------------------------
# triangulation of polyhedral complexes


def triangulate(P: PolyhedralComplex, cap: int = DEFAULT_CAP) -> SimplicialComplex:
    """Order complex of the face poset of a bounded polyhedral complex; vertices are cell ids."""
    for x, f in P.faces.items():
        if not f.bounded:
            raise UnboundedFace(f"cell {x} is unbounded; take the bounded subcomplex first")
    facets = []

    def down(chain):
        top = chain[-1]
        lower = [y for y in P.below(top) if y != top]
        maximal = [y for y in lower if not any(y != z and y in P.below(z) for z in lower)]
        if not maximal:
            facets.append(tuple(chain))
            if len(facets) > cap:
                raise SizeCapExceeded(f"triangulation has more than {cap} facets")
            return
        for y in maximal:
            down(chain + [y])

    maximal_cells = [x for x in P.faces if not any(z != x for z in P.above(x))]
    for x in maximal_cells:
        down([x])
    return SimplicialComplex(facets, cap=cap)


def as_simplicial(P: PolyhedralComplex, cap: int = DEFAULT_CAP) -> SimplicialComplex:
    """The complex itself when every cell is a simplex determined by its vertex cells, else its triangulation."""
    for f in P.faces.values():
        if not f.bounded or len(f.vertices) != f.dim + 1:
            return triangulate(P, cap)
    verts = {}
    for x, f in P.faces.items():
        if f.dim == 0:
            verts[x] = x
    cells = {}
    for x, f in P.faces.items():
        vs = tuple(sorted(y for y in P.below(x) if P.faces[y].dim == 0))
        if len(vs) != f.dim + 1 or vs in cells:
            return triangulate(P, cap)
        cells[vs] = x
    return SimplicialComplex(list(cells), cap=cap)


def induced_action(K: SimplicialComplex, cell_perms: Iterable[Mapping], name: str = "") -> GroupAction:
    """Action on a triangulation (or on a simplicial skeleton) induced by cell permutations."""
    gens = []
    for p in cell_perms:
        gens.append({v: p.get(v, v) for v in K.labels})
    return GroupAction(K, gens, name)


# ----------------------------------------------------------------------------
# cell products and symmetric products


def _faces_of(s: tuple) -> list:
    """Codimension-one faces of a simplex (nonempty)."""
    return [s[:i] + s[i + 1:] for i in range(len(s))] if len(s) > 1 else []


def product_order_complex(Ks: Sequence[SimplicialComplex], cap: int = DEFAULT_CAP) -> SimplicialComplex:
    """Order complex of the product of the face posets; vertices are tuples of simplices
    (each a tuple of vertex labels), so coordinate permutations act naturally."""
    maximal = [[K.labelled(s) for s in K.facets()] for K in Ks]
    facets = []

    def down(chain):
        top = chain[-1]
        nxt = []
        for i, s in enumerate(top):
            for t in _faces_of(s):
                nxt.append(top[:i] + (t,) + top[i + 1:])
        if not nxt:
            facets.append(tuple(chain))
            if len(facets) > cap:
                raise SizeCapExceeded(f"product complex has more than {cap} facets")
            return
        for c in nxt:
            chain.append(c)
            down(chain)
            chain.pop()

    for top in iproduct(*maximal):
        down([top])
    return SimplicialComplex(facets, cap=cap)


def coordinate_permutation_action(P: SimplicialComplex, n: int) -> GroupAction:
    gens = []
    if n >= 2:
        for i in range(n - 1):
            def swap(v, i=i):
                v = list(v)
                v[i], v[i + 1] = v[i + 1], v[i]
                return tuple(v)
            gens.append(swap)
    return GroupAction(P, gens, f"S{n}")


class OrbitComplex:
    """Quotient |K|/G as a regular cell complex whose cells are simplices.

    Requires a G-invariant grading of the vertices that is injective on every
    simplex; then a stabilizer fixes its simplex pointwise and the orbits of
    simplices are the cells of |K|/G, oriented by increasing grade.
    """

    def __init__(self, K: SimplicialComplex, A: GroupAction, grade: Callable):
        self.K, self.A = K, A
        gr = [grade(v) for v in K.labels]
        for g in A.generators:
            if any(gr[g[i]] != gr[i] for i in range(K.n_vertices)):
                raise InvalidAction("grading is not invariant")
        self._grade = gr
        order = lambda s: tuple(sorted(s, key=lambda i: (gr[i], i)))
        self.cells = []
        for L in K.simplices:
            reps = set()
            for s in L:
                if len({gr[i] for i in s}) != len(s):
                    raise InvalidAction("grading repeats on a simplex")
                reps.add(min(A.image(g, s) for g in A.elements))
            self.cells.append(sorted(reps))
        self._order = order
        self._index = [{c: j for j, c in enumerate(L)} for L in self.cells]
        self._canon = {}

    def _rep(self, s: tuple) -> tuple:
        r = self._canon.get(s)
        if r is None:
            r = min(self.A.image(g, s) for g in self.A.elements)
            self._canon[s] = r
        return r

    @property
    def dim(self) -> int:
        return len(self.cells) - 1

    def f_vector(self) -> list:
        return [len(L) for L in self.cells]

    def euler_characteristic(self) -> int:
        return sum((-1) ** k * n for k, n in enumerate(self.f_vector()))

    def boundary(self, k: int) -> dict:
        cols = {}
        if k <= 0 or k > self.dim:
            return cols
        pos = self._index[k - 1]
        for j, c in enumerate(self.cells[k]):
            oc = self._order(c)
            col: dict = {}
            for i in range(len(oc)):
                face = tuple(sorted(oc[:i] + oc[i + 1:]))
                r = pos[self._rep(face)]
                col[r] = col.get(r, 0) + (-1) ** i
            cols[j] = {r: v for r, v in col.items() if v}
        return cols

    def subdivide(self, cap: int = DEFAULT_CAP) -> SimplicialComplex:
        """Order complex of the cell poset: a simplicial complex homeomorphic to the quotient."""
        def label(c):
            return tuple(self.K.labels[i] for i in self._order(c))

        def faces(c):
            return [self._rep(c[:i] + c[i + 1:]) for i in range(len(c))] if len(c) > 1 else []

        covered = {f for L in self.cells[1:] for c in L for f in faces(c)}
        facets = []

        def down(chain):
            fs = faces(chain[-1])
            if not fs:
                facets.append(tuple(label(c) for c in chain))
                if len(facets) > cap:
                    raise SizeCapExceeded(f"subdivision has more than {cap} facets")
                return
            for f in fs:
                chain.append(f)
                down(chain)
                chain.pop()

        for L in self.cells:
            for c in L:
                if c not in covered:
                    down([c])
        return SimplicialComplex(facets, cap=cap)

    def __repr__(self) -> str:
        return f"OrbitComplex(f={self.f_vector()})"


def product_grade(v: tuple) -> int:
    """Dimension of a product cell given as a tuple of simplices."""
    return sum(len(s) - 1 for s in v)


def symmetric_product(K: SimplicialComplex, n: int, cap: int = DEFAULT_CAP,
                      simplicial: bool = False, max_subdivisions: int = DEFAULT_SUBDIVISIONS):
    """Sym^n |K| = |K|^n / S_n, from the order complex of the n-fold cell product.

    By default the quotient is returned as an OrbitComplex (cells are orbits of chains);
    with `simplicial=True` the action is regularized by subdivision and the simplicial
    quotient is returned.  Sym^1 is K itself.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    if n == 1:
        return K
    P = product_order_complex([K] * n, cap=cap)
    A = coordinate_permutation_action(P, n)
    if simplicial:
        return group_quotient(P, A, max_subdivisions, cap)
    return OrbitComplex(P, A, product_grade)


def symmetric_product_euler(K: SimplicialComplex, n: int) -> int:
    """Euler characteristic of Sym^n |K| by counting S_n-orbits of chains in the product face poset.

    A chain fixed by a permutation g is fixed elementwise, so its entries are constant on
    the cycles of g; Burnside then reduces to chain counts in products of fewer factors.
    """
    faces = [K.labelled(s) for s in K.all_simplices()]
    idx = {s: i for i, s in enumerate(faces)}
    below = [[idx[t] for t in _all_faces(s)] for s in faces]

    memo: dict = {}

    def chi_power(c: int) -> int:
        if c in memo:
            return memo[c]
        # f(q) = sum over chains topped at q of (-1)^(len-1) = 1 - sum_{p<q} f(p)
        elems = sorted(iproduct(range(len(faces)), repeat=c),
                       key=lambda q: sum(len(faces[i]) for i in q))
        f = {}
        for q in elems:
            acc = 0
            for p in iproduct(*[below[i] for i in q]):
                if p != q:
                    acc += f[p]
            f[q] = 1 - acc
        memo[c] = sum(f.values())
        return memo[c]

    total = 0
    for g in permutations(range(n)):
        seen, cycles = set(), 0
        for i in range(n):
            if i not in seen:
                cycles += 1
                j = i
                while j not in seen:
                    seen.add(j)
                    j = g[j]
        total += chi_power(cycles)
    assert total % factorial(n) == 0
    return total // factorial(n)


def _all_faces(s: tuple) -> list:
    out = []
    for mask in range(1, 1 << len(s)):
        out.append(tuple(s[i] for i in range(len(s)) if mask >> i & 1))
    return out


# ----------------------------------------------------------------------------
# Kummer kernel


def _reduce(w: Sequence[int], H: Sequence[Sequence[int]]) -> tuple:
    w = list(w)
    for i, row in enumerate(H):
        q = w[i] // row[i]
        if q:
            w = [a - q * b for a, b in zip(w, row)]
    return tuple(w)


def _kummer_circle(n: int, drop: int, m: int, cap: int):
    """Kernel of the sum map on (R/Z)^{n+1} and its S_{n+1} action.

    Coordinates u_i = x_i - x_drop (i != drop) identify the kernel with R^n / L, where L is
    the image of the root lattice.  The Freudenthal triangulation at mesh 1/m is invariant
    under L and under the coordinate permutations of x.
    """
    keep = [i for i in range(n + 1) if i != drop]
    # root lattice e_i - e_drop for i in keep, plus e_a - e_b, in u-coordinates, scaled by m
    gens = []
    for a in range(n + 1):
        for b in range(n + 1):
            if a != b:
                x = [0] * (n + 1)
                x[a], x[b] = 1, -1
                gens.append([m * (x[i] - x[drop]) for i in keep])
    H = la.hnf(gens)
    if len(H) != n:
        raise AssertionError("kernel lattice is not full rank")
    box = [range(H[i][i]) for i in range(n)]
    count = 0
    facets = set()
    for base in iproduct(*box):
        for perm in permutations(range(n)):
            v = list(base)
            verts = [_reduce(v, H)]
            for j in perm:
                v[j] += 1
                verts.append(_reduce(v, H))
            if len(set(verts)) != n + 1:
                raise ValueError(f"mesh 1/{m} too coarse for a simplicial torus")
            facets.add(tuple(sorted(verts)))
            count += 1
            if count > cap:
                raise SizeCapExceeded(f"Kummer kernel has more than {cap} facets")
    if len(facets) != count:
        raise ValueError(f"mesh 1/{m} too coarse: facets collide")
    K = SimplicialComplex(sorted(facets), cap=cap)

    def perm_map(p):
        # (p x)_{p(i)} = x_i ;  u'_i = x'_i - x'_drop with u_drop = 0
        inv = {p[i]: i for i in range(n + 1)}

        def act(w):
            full = [0] * (n + 1)
            for k, i in enumerate(keep):
                full[i] = w[k]
            return _reduce([full[inv[i]] - full[inv[drop]] for i in keep], H)
        return act

    transpositions = []
    for i in range(n):
        p = list(range(n + 1))
        p[i], p[i + 1] = p[i + 1], p[i]
        transpositions.append(perm_map(p))
    return K, transpositions, H


def kummer_kernel(n: int, variant: str = "torus", drop: int | None = None, m: int = 2,
                  cap: int = DEFAULT_CAP) -> tuple:
    """Kernel of skeleton multiplication with its S_{n+1} action.

    variant "circle": the skeleton is S^1, the kernel an n-torus.
    variant "torus": the skeleton is R^2/Z^2, the kernel the product of two circle kernels
    with the diagonal action.  `drop` selects the eliminated coordinate (default: the last).
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    if drop is None:
        drop = n
    C, gens, _ = _kummer_circle(n, drop, m, cap)
    if variant == "circle":
        return C, GroupAction(C, gens, f"S{n + 1}")
    if variant != "torus":
        raise ValueError(f"unknown variant {variant!r}")
    P = product_order_complex([C, C], cap=cap)

    def diag(g):
        def act(v):
            return tuple(tuple(sorted((g(a) for a in s), key=C.index.get)) for s in v)
        return act

    return P, GroupAction(P, [diag(g) for g in gens], f"S{n + 1}")


# ----------------------------------------------------------------------------
# homology


@dataclass
class HomologyResult:
    betti: list
    torsion: list

    def as_dict(self) -> dict:
        return {str(k): {"betti": b, "torsion": t} for k, (b, t) in enumerate(zip(self.betti, self.torsion))}

    def euler_characteristic(self) -> int:
        return sum((-1) ** k * b for k, b in enumerate(self.betti))

    def groups(self) -> list:
        """Readable groups, e.g. ['Z', 'Z/2', '0']."""
        out = []
        for b, t in zip(self.betti, self.torsion):
            parts = (["Z^%d" % b if b > 1 else "Z"] if b else []) + [f"Z/{q}" for q in t]
            out.append(" + ".join(parts) if parts else "0")
        return out


def _rank_and_torsion(cols: dict, nrows: int) -> tuple:
    """Rank and invariant factors > 1 of a sparse integer matrix, eliminating unit pivots first."""
    rows: dict = {}
    for j, col in cols.items():
        for i, v in col.items():
            if v:
                rows.setdefault(i, {})[j] = v
    colrows = {j: set(c) for j, c in cols.items() if c}
    rank = 0
    progress = True
    while progress:
        progress = False
        for j in sorted(colrows):
            if j not in colrows:
                continue
            units = [i for i in colrows[j] if abs(rows[i][j]) == 1]
            if not units:
                continue
            r = min(units, key=lambda i: (len(rows[i]), i))
            prow = rows[r]
            s = prow[j]
            for i in list(colrows[j]):
                if i == r:
                    continue
                f = rows[i][j] * s
                ri = rows[i]
                for c, v in prow.items():
                    nv = ri.get(c, 0) - f * v
                    if nv:
                        if c not in ri:
                            colrows[c].add(i)
                        ri[c] = nv
                    elif c in ri:
                        del ri[c]
                        colrows[c].discard(i)
                if not ri:
                    del rows[i]
            for c in prow:
                colrows[c].discard(r)
            del rows[r]
            del colrows[j]
            for c in [c for c in colrows if not colrows[c]]:
                del colrows[c]
            rank += 1
            progress = True
    if not rows:
        return rank, []
    cidx = {c: k for k, c in enumerate(sorted(colrows))}
    dense = []
    for i in sorted(rows):
        row = [0] * len(cidx)
        for c, v in rows[i].items():
            row[cidx[c]] = v
        dense.append(row)
    inv = la.smith_invariants(dense)
    return rank + len(inv), [q for q in inv if q > 1]


def homology(K, threads: int = 1) -> HomologyResult:
    """Integral homology of a SimplicialComplex or OrbitComplex; boundary maps may be reduced concurrently."""
    f = K.f_vector()
    ranks = [0] * (len(f) + 1)
    tors = [[] for _ in range(len(f) + 1)]
    dims = list(range(1, len(f)))
    job = lambda k: _rank_and_torsion(K.boundary(k), f[k - 1])
    if threads > 1 and len(dims) > 1:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            results = list(ex.map(job, dims))
    else:
        results = [job(k) for k in dims]
    for k, (r, t) in zip(dims, results):
        ranks[k], tors[k - 1] = r, t
    betti = [f[k] - ranks[k] - ranks[k + 1] for k in range(len(f))]
    return HomologyResult(betti, tors[:len(f)])


def boundary_squares_vanish(K: SimplicialComplex) -> bool:
    for k in range(2, K.dim + 1):
        d1, d2 = K.boundary(k - 1), K.boundary(k)
        for col in d2.values():
            acc: dict = {}
            for i, v in col.items():
                for r, w in d1[i].items():
                    acc[r] = acc.get(r, 0) + v * w
            if any(acc.values()):
                return False
    return True


# ----------------------------------------------------------------------------
# surfaces


@dataclass
class SurfaceType:
    name: str  # sphere, torus, genus-g, projective, klein, nonorientable-k, NotASurface
    orientable: bool | None = None
    euler: int | None = None
    genus: int | None = None
    witness: str = ""

    def __str__(self) -> str:
        return self.name


def _not_surface(w: str) -> SurfaceType:
    return SurfaceType("NotASurface", witness=w)


def classify_closed_surface(K: SimplicialComplex) -> SurfaceType:
    if K.dim != 2 or not K.is_pure():
        return _not_surface("complex is not pure of dimension 2")
    tris = K.simplices[2]
    edge_tris: dict = {}
    for t, s in enumerate(tris):
        for e in _faces_of(s):
            edge_tris.setdefault(e, []).append(t)
    for e in K.simplices[1]:
        n = len(edge_tris.get(e, []))
        if n != 2:
            return _not_surface(f"edge {K.labelled(e)} lies in {n} triangles")
    # vertex links: a single cycle
    link: dict = {}
    for s in tris:
        for i, v in enumerate(s):
            a, b = [w for w in s if w != v]
            link.setdefault(v, []).append((a, b))
    for v in range(K.n_vertices):
        edges = link.get(v, [])
        adj: dict = {}
        for a, b in edges:
            adj.setdefault(a, []).append(b)
            adj.setdefault(b, []).append(a)
        if not edges or any(len(x) != 2 for x in adj.values()):
            return _not_surface(f"link of {K.labels[v]} is not a cycle")
        start = next(iter(adj))
        seen = {start}
        stack = [start]
        while stack:
            for y in adj[stack.pop()]:
                if y not in seen:
                    seen.add(y)
                    stack.append(y)
        if len(seen) != len(adj):
            return _not_surface(f"link of {K.labels[v]} is not a single cycle")
    # coherent orientation by propagation across edges
    orient = [0] * len(tris)
    comps = 0
    orientable = True

    def induced(t, sign, e):
        s = tris[t]
        i = next(k for k in range(3) if s[k] not in e)
        return sign * (-1) ** i  # sign of e as a face of (t, sign)

    for t0 in range(len(tris)):
        if orient[t0]:
            continue
        comps += 1
        orient[t0] = 1
        stack = [t0]
        while stack:
            t = stack.pop()
            for e in _faces_of(tris[t]):
                for u in edge_tris[e]:
                    if u == t:
                        continue
                    want = -induced(t, orient[t], e) * (-1) ** next(k for k in range(3) if tris[u][k] not in e)
                    if orient[u] == 0:
                        orient[u] = want
                        stack.append(u)
                    elif orient[u] != want:
                        orientable = False
    if comps != 1:
        return _not_surface(f"complex has {comps} components")
    chi = K.euler_characteristic()
    if orientable:
        g = (2 - chi) // 2
        name = {0: "sphere", 1: "torus"}.get(g, f"genus-{g}")
        return SurfaceType(name, True, chi, g)
    k = 2 - chi
    name = {1: "projective", 2: "klein"}.get(k, f"nonorientable-{k}")
    return SurfaceType(name, False, chi, k)


# ----------------------------------------------------------------------------
# standard complexes


def octahedron() -> tuple:
    """Octahedral sphere on +-e_i with the antipodal action."""
    facets = [((a, 0, 0), (0, b, 0), (0, 0, c)) for a, b, c in iproduct((1, -1), repeat=3)]
    K = SimplicialComplex(facets)
    return K, GroupAction(K, [lambda v: tuple(-a for a in v)], "antipodal")


def rp2_six_vertex() -> SimplicialComplex:
    return SimplicialComplex([
        (1, 2, 3), (1, 3, 4), (1, 4, 5), (1, 5, 6), (1, 6, 2),
        (2, 3, 5), (3, 4, 6), (4, 5, 2), (5, 6, 3), (6, 2, 4),
    ])


def torus_seven_vertex() -> SimplicialComplex:
    return SimplicialComplex([(i % 7, (i + 1) % 7, (i + 3) % 7) for i in range(7)]
                             + [(i % 7, (i + 2) % 7, (i + 3) % 7) for i in range(7)])


# ----------------------------------------------------------------------------
# serialization


def complex_to_json(K: SimplicialComplex) -> dict:
    return {
        "schema": "simplicial_complex/v1",
        "vertices": [_label_str(v) for v in K.labels],
        "facets": [list(s) for s in sorted(K.facets())],
        "f_vector": K.f_vector(),
    }


def complex_from_json(data: Mapping) -> SimplicialComplex:
    labels = data["vertices"]
    return SimplicialComplex([[labels[i] for i in f] for f in data["facets"]])


def _label_str(v) -> str:
    if isinstance(v, str):
        return v
    if isinstance(v, Fraction):
        return f"{v.numerator}/{v.denominator}"
    if isinstance(v, tuple):
        return "(" + ",".join(_label_str(a) for a in v) + ")"
    return str(v)


def to_facet_list(K: SimplicialComplex) -> str:
    """One facet per line, vertices as 0-based indices separated by spaces."""
    return "".join(" ".join(map(str, s)) + "\n" for s in sorted(K.facets()))


def from_facet_list(text: str) -> SimplicialComplex:
    return SimplicialComplex([tuple(int(a) for a in line.split()) for line in text.splitlines() if line.strip()])


def homology_to_json(H: HomologyResult) -> dict:
    return H.as_dict()
