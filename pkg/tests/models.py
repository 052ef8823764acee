"""Small stratified models used across the tests."""

from __future__ import annotations

import itertools

from katoskel.fan import Component, Stratum, StratifiedModel, fan_from_stratification


def model(name, comps, strata):
    """comps: list of (name, multiplicity) for vertical or (name, None) for horizontal;
    strata: list of component-name lists, or (names, branches, contained_in)."""
    cs = [Component(n, "vertical", m) if m is not None else Component(n, "horizontal") for n, m in comps]
    st = []
    for s in strata:
        if isinstance(s, tuple):
            names, branches, inside = s
            st.append(Stratum(frozenset(names), tuple(branches), inside))
        else:
            st.append(Stratum(frozenset(s)))
    return StratifiedModel(cs, st, name=name)


def fan(name, comps, strata):
    return fan_from_stratification(model(name, comps, strata))


# curve-like and surface-like shapes with at most three vertical components

def point(a=1):
    return fan("point", [("E", a)], [["E"]])


def segment(a=1, b=1):
    return fan("segment", [("E1", a), ("E2", b)], [["E1"], ["E2"], ["E1", "E2"]])


def circle2(a=1, b=1):
    return fan("circle2", [("E1", a), ("E2", b)],
               [["E1"], ["E2"], (["E1", "E2"], ["p_A", "p_B"], {})])


def chain3(a=1, b=1, c=1):
    return fan("chain3", [("E1", a), ("E2", b), ("E3", c)],
               [["E1"], ["E2"], ["E3"], ["E1", "E2"], ["E2", "E3"]])


def triangle3(a=1, b=1, c=1):
    return fan("triangle3", [("E1", a), ("E2", b), ("E3", c)],
               [["E1"], ["E2"], ["E3"], ["E1", "E2"], ["E2", "E3"], ["E1", "E3"]])


def triple3(a=1, b=1, c=1):
    return fan("triple3", [("E1", a), ("E2", b), ("E3", c)],
               [["E1"], ["E2"], ["E3"], ["E1", "E2"], ["E2", "E3"], ["E1", "E3"], ["E1", "E2", "E3"]])


def line(a=1):
    """One vertical component crossed by two horizontal ones (the real line as skeleton)."""
    return fan("line", [("E", a), ("H0", None), ("Hinf", None)],
               [["E"], ["H0"], ["Hinf"], ["E", "H0"], ["E", "Hinf"]])


def tripod(a=1):
    """One vertical component crossed by three horizontal ones."""
    return fan("tripod", [("P", a), ("a", None), ("b", None), ("c", None)],
               [["P"], ["a"], ["b"], ["c"], ["P", "a"], ["P", "b"], ["P", "c"]])


SHAPES = {
    "point": (point, 1),
    "segment": (segment, 2),
    "circle2": (circle2, 2),
    "chain3": (chain3, 3),
    "triangle3": (triangle3, 3),
    "triple3": (triple3, 3),
    "line": (line, 1),
}


def family(mults=(1, 2, 3)):
    """(label, builder, multiplicities) for every shape and multiplicity vector."""
    out = []
    for name, (build, k) in SHAPES.items():
        for ms in itertools.product(mults, repeat=k):
            out.append((f"{name}{ms}", build, ms))
    return out
