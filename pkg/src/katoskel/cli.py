"""Command-line front end, input loading and validation, and text reports."""

from __future__ import annotations

import json
import os
import sys
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Any, Mapping

import click
import jsonschema
from referencing import Registry, Resource

from . import __version__
from . import fan as fn
from . import skeleton as sk
from . import topology as tp
from . import weight as wt
from .monoid import NotASubdivision

EXIT_OK, EXIT_INVALID, EXIT_CAP = 0, 2, 3
COMMANDS = ("fan", "skeleton", "product", "weight", "ks", "essential", "quotient", "sym",
            "kummer", "homology", "classify", "resolve")


class InputError(ValueError):
    pass


# ----------------------------------------------------------------------------
# schemas and corpus


def _schema(name: str) -> dict:
    return json.loads(resources.files("katoskel").joinpath(f"schemas/v1/{name}.schema.json").read_text())


def _validator(name: str) -> jsonschema.Draft202012Validator:
    registry = Registry()
    for n in ("divisor", "input", "result", "error"):
        s = _schema(n)
        registry = registry.with_resource(s["$id"], Resource.from_contents(s))
    return jsonschema.Draft202012Validator(_schema(name), registry=registry)


def corpus_names() -> list:
    return sorted(p.name[:-5] for p in resources.files("katoskel").joinpath("corpus").iterdir()
                  if p.name.endswith(".json"))


def load_json(ref: str) -> tuple:
    """(data, label) from a file path or corpus name."""
    p = Path(ref)
    if p.suffix == ".json" or p.exists():
        if not p.exists():
            raise InputError(f"no such file: {ref}")
        try:
            return json.loads(p.read_text()), str(p)
        except json.JSONDecodeError as e:
            raise InputError(f"{ref}: invalid JSON ({e})") from e
    if ref in corpus_names():
        return json.loads(resources.files("katoskel").joinpath(f"corpus/{ref}.json").read_text()), ref
    raise InputError(f"{ref!r} is neither a file nor a corpus entry ({', '.join(corpus_names())})")


def schema_errors(data: Any, name: str = "input") -> list:
    v = _validator(name)
    return [f"{'/'.join(map(str, e.absolute_path)) or '<root>'}: {e.message}"
            for e in sorted(v.iter_errors(data), key=lambda e: list(map(str, e.absolute_path)))]


# ----------------------------------------------------------------------------
# loaded inputs


@dataclass
class Entry:
    data: dict
    label: str
    fan: fn.KatoFan | None = None
    complex: tp.SimplicialComplex | None = None
    factors: tuple = ()
    _cache: dict = field(default_factory=dict)

    @property
    def kind(self) -> str:
        return self.data["kind"]

    def skeleton(self) -> sk.PolyhedralComplex:
        if "skeleton" not in self._cache:
            if self.fan is None:
                raise InputError(f"{self.label} has no fan")
            if self.kind == "product":
                (FX, _), (FY, _) = self.factors
                res = sk.product_skeleton(sk.skeleton_of_fan(FX), sk.skeleton_of_fan(FY), self.fan)
                self._cache["product"] = res
                self._cache["skeleton"] = res.complex
            else:
                self._cache["skeleton"] = sk.skeleton_of_fan(self.fan)
        return self._cache["skeleton"]

    def product(self) -> sk.ProductSkeleton:
        self.skeleton()
        return self._cache["product"]

    def space(self, cap: int) -> tp.SimplicialComplex:
        """Simplicial model of the bounded skeleton (or the given complex)."""
        if self.complex is not None:
            return self.complex
        key = ("space", cap)
        if key not in self._cache:
            self._cache[key] = tp.as_simplicial(self.skeleton().bounded_subcomplex(), cap)
        return self._cache[key]

    def divisor(self, ref: str) -> wt.LogDivisor:
        divs = self.data.get("divisors", {})
        if ref in divs:
            d = divs[ref]
        else:
            d, _ = load_json(ref)
            errs = schema_errors(d, "divisor")
            if errs:
                raise InputError("divisor: " + "; ".join(errs))
        D = wt.divisor_from_json(d)
        if self.fan is not None:
            known = set(self.fan.height_one())
            for k in D.mults:
                if k not in known:
                    raise wt.UnsupportedDivisorComponent(f"divisor refers to unknown component {k!r}")
        return D

    def coefficients(self, ref: str):
        d = self.data.get("divisors", {}).get(ref, {})
        c = d.get("coefficients")
        return {k: sk.parse_frac(v) for k, v in c.items()} if c else None

    def action_generator(self, name: str):
        acts = self.data.get("actions", {})
        if name not in acts:
            raise InputError(f"unknown action {name!r}; available: {sorted(acts)}")
        entry = acts[name]
        if self.kind == "model":
            return fn.stratified_automorphism(self.fan, entry.get("component_map"), entry.get("branch_map"))
        if self.kind == "product":
            gs = []
            for F, e in self.factors:
                fa = e.data.get("actions", {}).get(name)
                if fa is None:
                    raise InputError(f"factor {e.label} has no action {name!r}")
                gs.append(fn.stratified_automorphism(F, fa.get("component_map"), fa.get("branch_map")))
            return fn.product_automorphism(self.fan, *gs)
        if self.kind == "complex":
            return dict(entry.get("vertex_map", {}))
        raise InputError(f"actions are not supported for {self.kind} inputs")

    def action(self, name: str, K: tp.SimplicialComplex) -> tp.GroupAction:
        g = self.action_generator(name)
        if isinstance(g, fn.FanAutomorphism):
            return tp.induced_action(K, [sk.complex_action(self.skeleton(), g)], name)
        return tp.GroupAction(K, [g], name)


def load_entry(data: Mapping, label: str, depth: int = 0) -> Entry:
    errs = schema_errors(data, "input")
    if errs:
        raise InputError(f"{label}: " + "; ".join(errs))
    kind = data["kind"]
    if kind == "model":
        return Entry(dict(data), label, fan=fn.fan_from_stratification(fn.model_from_json(data)))
    if kind == "cone":
        return Entry(dict(data), label, fan=fn.fan_from_cone(data["rays"], data["pi"], data["name"]))
    if kind == "complex":
        labels = data["vertices"]
        facets = data["facets"]
        if any(i >= len(labels) for f in facets for i in f):
            raise InputError(f"{label}: facet refers to a missing vertex")
        return Entry(dict(data), label, complex=tp.SimplicialComplex([[labels[i] for i in f] for f in facets]))
    if depth > 0:
        raise InputError("product factors must not be products")
    factors = []
    cache: dict = {}
    for ref in data["factors"]:
        key = ref if isinstance(ref, str) else json.dumps(ref, sort_keys=True)
        if key not in cache:
            d, lab = load_json(ref) if isinstance(ref, str) else (ref, "<inline>")
            e = load_entry(d, lab, depth + 1)
            if e.fan is None:
                raise InputError("product factors must be models or cones")
            cache[key] = (e.fan, e)
        factors.append(cache[key])
    rule = None
    if data.get("branch_rule"):
        rule = {(r["x"], r["y"]): r["n"] for r in data["branch_rule"]}
    Z = fn.fan_product(factors[0][0], factors[1][0], rule, data.get("enforce_semistable", True))
    return Entry(dict(data), label, fan=Z, factors=tuple(factors))


# ----------------------------------------------------------------------------
# jobs


@dataclass
class JobSpec:
    command: str
    input: str | None = None
    options: dict = field(default_factory=dict)
    out: str | None = None
    format: str = "json"

    def __post_init__(self):
        if self.command not in COMMANDS + ("validate",):
            raise InputError(f"unknown command {self.command!r}")
        cap = self.options.get("cap_simplices", tp.DEFAULT_CAP)
        if int(cap) < 1 or int(self.options.get("max_subdivisions", 1)) < 0:
            raise InputError("caps must be positive")


def _opt(job: JobSpec, key: str, default=None):
    v = job.options.get(key)
    return default if v is None else v


def _homology_json(H: tp.HomologyResult) -> dict:
    return {"betti": H.betti, "torsion": H.torsion, "groups": H.groups(), "euler": H.euler_characteristic()}


def _space_summary(K, job: JobSpec, threads: int, classify_default: bool = False) -> dict:
    out = {"f_vector": K.f_vector(), "dim": K.dim, "euler": K.euler_characteristic()}
    if _opt(job, "homology", False):
        out["homology"] = _homology_json(tp.homology(K, threads))
    if (_opt(job, "classify", False) or classify_default) and isinstance(K, tp.SimplicialComplex):
        out["classify"] = _surface_json(tp.classify_closed_surface(K))
    return out


def _surface_json(S: tp.SurfaceType) -> dict:
    d = {"type": S.name}
    if S.name == "NotASurface":
        d["witness"] = S.witness
    else:
        d.update(orientable=S.orientable, euler=S.euler, genus=S.genus)
    return d


def _locus_json(L: wt.Locus) -> dict:
    return {
        "status": L.status,
        "minimum": sk.frac_str(L.minimum) if L.minimum is not None else None,
        "cells": sorted(L.complex.faces) if L.complex is not None else [],
        "f_vector": L.f_vector(),
    }


def threads_from_env() -> int:
    raw = os.environ.get("KATOSKEL_THREADS", "1")
    try:
        n = int(raw)
    except ValueError:
        raise InputError(f"KATOSKEL_THREADS must be a positive integer, got {raw!r}") from None
    if n < 1:
        raise InputError(f"KATOSKEL_THREADS must be a positive integer, got {raw!r}")
    return n


def execute(job: JobSpec) -> dict:
    """Run a job and return the result payload; raises on invalid input or exceeded caps."""
    threads = threads_from_env()
    cap = int(_opt(job, "cap_simplices", tp.DEFAULT_CAP))
    subdiv = int(_opt(job, "max_subdivisions", tp.DEFAULT_SUBDIVISIONS))
    cmd = job.command
    if cmd == "validate":
        return {"diagnostics": validate(job.input)}
    if cmd == "kummer":
        n = int(_opt(job, "n", 1))
        variant = _opt(job, "variant", "torus")
        res: dict = {"n": n, "variant": variant}
        if job.input is not None:
            e = load_entry(*load_json(job.input))
            kind = tp.classify_closed_surface(e.space(cap)).name
            want = "torus" if variant == "torus" else None
            if variant == "circle":
                H = tp.homology(e.space(cap))
                kind = "circle" if H.betti == [1, 1] and not any(H.torsion) else kind
                want = "circle"
            if kind != want:
                raise InputError(f"{job.input} skeleton is a {kind}, not a {want}")
            res["skeleton"] = kind
        K, A = tp.kummer_kernel(n, variant, cap=cap)
        res["kernel"] = {"f_vector": K.f_vector(), "group_order": A.order}
        if _opt(job, "homology", False):
            res["kernel"]["homology"] = _homology_json(tp.homology(K, threads))
        Q = tp.group_quotient(K, A, subdiv, cap)
        res["quotient"] = _space_summary(Q, job, threads, classify_default=Q.dim == 2)
        res["quotient"]["subdivisions"] = Q.subdivisions
        return res
    if job.input is None:
        raise InputError(f"{cmd} needs --input")
    e = load_entry(*load_json(job.input))
    if cmd == "fan":
        if e.fan is None:
            raise InputError("input has no fan")
        return {"fan": fn.fan_to_json(e.fan), "verify": e.fan.verify(), "regular": fn.is_regular(e.fan),
                "semistable": e.fan.semistable}
    if cmd == "resolve":
        if e.fan is None:
            raise InputError("input has no fan")
        G = fn.resolve(e.fan, cap=int(_opt(job, "max_star", 200)))
        return {"fan": fn.fan_to_json(G), "regular": fn.is_regular(G), "points": len(G.points),
                "already_regular": G is e.fan}
    if cmd == "skeleton":
        Sk = e.skeleton()
        return {"complex": sk.complex_to_json(Sk), "bounded": Sk.bounded, "gluing": Sk.check_gluing()}
    if cmd == "product":
        if e.kind != "product":
            raise InputError("product needs a product input")
        res_p = e.product()
        chk = sk.check_product_homeomorphism(res_p)
        mono = fn.n_monotonicity_check(e.fan)
        return {"complex": sk.complex_to_json(res_p.complex), "fan_points": len(e.fan.points),
                "homeomorphism": {"ok": chk.ok, "witnesses": chk.witnesses},
                "monotonicity": {"ok": mono.ok, "violations": [list(map(list, v)) for v in mono.violations]},
                "semistable_factor": res_p.semistable}
    if cmd in ("weight", "ks", "essential"):
        refs = list(_opt(job, "divisor", ()) or ())
        if not refs:
            refs = sorted(e.data.get("divisors", {}))
        if not refs and cmd != "essential":
            raise InputError(f"{cmd} needs --divisor")
        Sk = e.skeleton()
        if cmd == "essential":
            forms = [e.divisor(r) for r in refs]
            E = wt.essential_skeleton(Sk, forms)
            return {"forms": refs, "cells": E.cells, "f_vector": E.complex.f_vector(),
                    "loci": [_locus_json(L) for L in E.loci]}
        if len(refs) != 1:
            raise InputError(f"{cmd} takes exactly one --divisor")
        D = e.divisor(refs[0])
        w = wt.weight_function(Sk, D, e.coefficients(refs[0]))
        if cmd == "weight":
            return {"divisor": refs[0], "weight": wt.weight_report(w)}
        L = wt.minimality_locus(w)
        out = {"divisor": refs[0], **_locus_json(L)}
        if L.complex is not None:
            out["complex"] = sk.complex_to_json(L.complex)
        return out
    if cmd == "quotient":
        name = _opt(job, "action")
        if not name:
            raise InputError("quotient needs --action")
        K = e.space(cap)
        A = e.action(name, K)
        Q = tp.group_quotient(K, A, subdiv, cap)
        out = {"action": name, "group_order": A.order, "subdivisions": Q.subdivisions,
               **_space_summary(Q, job, threads, classify_default=Q.dim == 2)}
        out["complex"] = tp.complex_to_json(Q)
        return out
    if cmd == "sym":
        n = int(_opt(job, "n", 2))
        K = e.space(cap)
        S = tp.symmetric_product(K, n, cap=cap)
        out = {"n": n, **_space_summary(S, job, threads)}
        out["model"] = "simplicial" if isinstance(S, tp.SimplicialComplex) else "orbit cells"
        return out
    if cmd == "homology":
        K = e.space(cap)
        H = tp.homology(K, threads)
        return {"f_vector": K.f_vector(), **_homology_json(H), "boundary_squared_zero": tp.boundary_squares_vanish(K)}
    if cmd == "classify":
        return _surface_json(tp.classify_closed_surface(e.space(cap)))
    raise InputError(f"unhandled command {cmd}")


def validate(ref: str | None, fan_ref: str | None = None) -> list:
    """Diagnostics for an input or divisor file: schema, stratification closure, actions, references."""
    if ref is None:
        return ["no file given"]
    try:
        data, label = load_json(ref)
    except InputError as exc:
        return [str(exc)]
    if isinstance(data, Mapping) and "m" in data and "kind" not in data:
        errs = schema_errors(data, "divisor")
        if errs or fan_ref is None:
            return errs
        try:
            e = load_entry(*load_json(fan_ref))
            e.divisor(ref)
        except (InputError, ValueError) as exc:
            return [f"reference error: {exc}"]
        return []
    errs = schema_errors(data, "input")
    if errs:
        return errs
    diags = []
    try:
        e = load_entry(data, label)
    except fn.InconsistentStratification as exc:
        return [f"closure violation: {exc}"]
    except (InputError, ValueError) as exc:
        return [str(exc)]
    if e.fan is not None:
        diags += [f"fan: {msg}" for msg in e.fan.verify()]
    for name in sorted(data.get("actions", {})):
        try:
            g = e.action_generator(name)
            if e.complex is not None:
                tp.GroupAction(e.complex, [g], name)
        except (InputError, ValueError) as exc:
            diags.append(f"action {name}: {exc}")
    for name in sorted(data.get("divisors", {})):
        try:
            e.divisor(name)
        except (InputError, ValueError) as exc:
            diags.append(f"reference error in divisor {name}: {exc}")
    return diags


def _error(exc: BaseException, code: int) -> dict:
    return {"schema": "katoskel_error/v1", "error": type(exc).__name__, "message": str(exc), "exit_code": code}


INVALID = (InputError, jsonschema.ValidationError, fn.InconsistentStratification, fn.MissingBranchRule,
           fn.BranchRuleConflict, fn.RayOutsideCone, wt.UnsupportedDivisorComponent, wt.NotQCartier,
           wt.EmptyFormList, tp.UnboundedFace, tp.InvalidAction, NotASubdivision, ValueError)
CAPPED = (tp.SizeCapExceeded, fn.ResolutionCapExceeded)


def run(job: JobSpec) -> tuple:
    """(exit code, result envelope or error document)."""
    try:
        result = execute(job)
    except CAPPED as exc:
        return EXIT_CAP, _error(exc, EXIT_CAP)
    except INVALID as exc:
        return EXIT_INVALID, _error(exc, EXIT_INVALID)
    opts = {k: (list(v) if isinstance(v, tuple) else v) for k, v in sorted(job.options.items()) if v not in (None, (), False)}
    return EXIT_OK, {"schema": "katoskel_result/v1", "command": job.command, "input": job.input,
                     "version": __version__, "options": opts, "result": result}


def dumps(doc: Mapping) -> str:
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


# ----------------------------------------------------------------------------
# reports


def _table(rows: list, header: list) -> str:
    cols = [header] + [[str(c) for c in r] for r in rows]
    w = [max(len(r[i]) for r in cols) for i in range(len(header))]
    lines = ["  ".join(c.ljust(w[i]) for i, c in enumerate(r)).rstrip() for r in cols]
    lines.insert(1, "  ".join("-" * x for x in w))
    return "\n".join(lines)


def report(doc: Mapping) -> str:
    """Human-readable summary of a result envelope."""
    cmd, res = doc["command"], doc["result"]
    out = [f"{cmd}: {doc.get('input') or ''}".rstrip()]
    fv = res.get("f_vector") or res.get("complex", {}).get("f_vector")
    if fv is not None:
        out.append(_table([[k, n] for k, n in enumerate(fv)], ["dim", "cells"]))
    if cmd == "kummer":
        out.append(f"kernel cells {res['kernel']['f_vector']}, group order {res['kernel']['group_order']}")
        out.append(_table([[k, n] for k, n in enumerate(res["quotient"]["f_vector"])], ["dim", "quotient cells"]))
    if cmd == "resolve":
        out.append(f"fan points: {res['points']}; regular: {res['regular']}; already regular: {res['already_regular']}")
    if cmd == "product":
        out.append(f"fan points: {res['fan_points']}; product map homeomorphism: {res['homeomorphism']['ok']}")
    if cmd == "weight":
        w = res["weight"]
        rows = [[x, " ".join(f["vertex_values"]) or "-", " ".join(f["ray_slopes"]) or "-"] for x, f in w["faces"].items()]
        out.append(_table(rows, ["cell", "vertex weights", "ray slopes"]))
        out.append(f"minimum {w['minimum']} on {', '.join(w['argmin']) or 'nothing'} ({w['status']})")
    if cmd == "ks":
        out.append(f"minimum {res['minimum']} ({res['status']}); cells: {', '.join(res['cells'])}")
    hom = res.get("homology") or (res if "betti" in res else None) or res.get("quotient", {}).get("homology")
    if hom:
        rows = [[k, b, ",".join(map(str, t)) or "-"] for k, (b, t) in enumerate(zip(hom["betti"], hom["torsion"]))]
        out.append(_table(rows, ["k", "betti", "torsion"]))
    cl = res.get("classify") or res.get("quotient", {}).get("classify")
    if isinstance(cl, Mapping):
        out.append(f"surface: {cl['type']}")
    elif cmd == "classify":
        out.append(f"surface: {res['type']}")
    if cmd == "validate":
        out.append("valid" if not res["diagnostics"] else "\n".join(res["diagnostics"]))
    return "\n".join(out) + "\n"


def plot_complex(doc: Mapping, path: str) -> None:
    """Static picture of a 1- or 2-dimensional complex from a result (vertices on a circle)."""
    import math

    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    cx = doc["result"].get("complex")
    if cx is None:
        raise InputError("result has no complex to plot")
    if "facets" in cx:
        names = cx["vertices"]
        cells = [[names[i] for i in f] for f in cx["facets"]]
    else:
        by_id = {f["id"]: f for f in cx["faces"]}
        names = sorted(x for x, f in by_id.items() if f["dim"] == 0)
        cells = [[y for y in f["faces"] + [x] if by_id[y]["dim"] == 0] for x, f in by_id.items() if f["dim"] > 0]
    pos = {v: (math.cos(2 * math.pi * i / max(len(names), 1)), math.sin(2 * math.pi * i / max(len(names), 1)))
           for i, v in enumerate(names)}
    fig, ax = plt.subplots(figsize=(5, 5))
    for c in cells:
        pts = [pos[v] for v in c if v in pos]
        if len(pts) >= 3:
            ax.fill(*zip(*pts), alpha=0.15, color="tab:blue")
        for a in range(len(pts)):
            for b in range(a + 1, len(pts)):
                ax.plot(*zip(pts[a], pts[b]), color="k", lw=0.6)
    for v, (x, y) in pos.items():
        ax.plot(x, y, "o", color="tab:red", ms=3)
        if len(pos) <= 30:
            ax.annotate(str(v), (x, y), fontsize=7)
    ax.set_axis_off()
    ax.set_aspect("equal")
    fig.savefig(path, dpi=120)
    plt.close(fig)


# ----------------------------------------------------------------------------
# click front end


def _emit(job: JobSpec, plot: str | None = None) -> None:
    code, doc = run(job)
    if code != EXIT_OK:
        click.echo(json.dumps(doc, sort_keys=True), err=True)
        sys.exit(code)
    text = report(doc) if job.format == "text" else dumps(doc)
    if job.out:
        Path(job.out).write_text(text)
    else:
        click.echo(text, nl=False)
    if plot:
        try:
            plot_complex(doc, plot)
        except InputError as exc:
            click.echo(json.dumps(_error(exc, EXIT_INVALID), sort_keys=True), err=True)
            sys.exit(EXIT_INVALID)


def _common(f):
    f = click.option("--out", type=click.Path(dir_okay=False), help="Write output here instead of stdout.")(f)
    f = click.option("--format", "fmt", type=click.Choice(["json", "text"]), default="json", show_default=True)(f)
    f = click.option("--cap-simplices", type=click.IntRange(min=1), default=tp.DEFAULT_CAP, show_default=True)(f)
    f = click.option("--max-subdivisions", type=click.IntRange(min=0), default=tp.DEFAULT_SUBDIVISIONS,
                     show_default=True, help="Regularization subdivisions before a quotient.")(f)
    return f


def _make(name: str, *, needs_input: bool = True, extra=(), help: str = ""):
    def cmd(input, fmt, out, cap_simplices, max_subdivisions, plot=None, **kw):
        opts = {"cap_simplices": cap_simplices, "max_subdivisions": max_subdivisions, **kw}
        _emit(JobSpec(name, input, opts, out, fmt), plot)

    cmd.__name__ = name
    cmd.__doc__ = help
    c = _common(cmd)
    for opt in reversed(extra):
        c = opt(c)
    c = click.option("--input", "input", required=needs_input, help="Input JSON file or corpus name.")(c)
    return main.command(name)(c)


@click.group()
@click.version_option(__version__, prog_name="katoskel")
def main():
    """Exact Kato fans, skeletons, weight functions and their topology."""


_homology = click.option("--homology", is_flag=True, help="Compute integral homology.")
_classify = click.option("--classify", is_flag=True, help="Classify as a closed surface.")
_divisor = click.option("--divisor", multiple=True, help="Divisor JSON file or a divisor name from the input.")
_plot = click.option("--plot", type=click.Path(dir_okay=False), help="Also draw the complex (PNG).")

_make("fan", help="Kato fan of a model, cone or product.")
_make("skeleton", extra=[_plot], help="Skeleton cells and gluing.")
_make("product", extra=[_plot], help="Product skeleton and the product-map checks.")
_make("weight", extra=[_divisor], help="Weight function of a form.")
_make("ks", extra=[_divisor], help="Kontsevich-Soibelman skeleton (minimality locus) of a form.")
_make("essential", extra=[_divisor], help="Union of the minimality loci of the given forms.")
_make("quotient", extra=[click.option("--action", required=True), _homology, _classify, _plot],
      help="Quotient of the bounded skeleton by a finite group action.")
_make("sym", extra=[click.option("--n", type=click.IntRange(min=1), default=2, show_default=True),
                    _homology, _classify], help="Symmetric product of the bounded skeleton.")
_make("kummer", needs_input=False,
      extra=[click.option("--n", type=click.IntRange(min=1), default=1, show_default=True),
             click.option("--variant", type=click.Choice(["torus", "circle"]), default="torus", show_default=True),
             _homology, _classify],
      help="Kummer kernel quotient; --input optionally checks the skeleton type.")
_make("homology", help="Integral homology of the bounded skeleton or complex.")
_make("classify", help="Closed-surface type of the bounded skeleton or complex.")
_make("resolve", extra=[click.option("--max-star", type=click.IntRange(min=1), default=200, show_default=True)],
      help="Regular subdivision by star subdivisions.")


@main.command("validate")
@click.argument("path")
@click.option("--input", "fan_ref", help="Model to check divisor references against.")
@click.option("--format", "fmt", type=click.Choice(["json", "text"]), default="json", show_default=True)
def validate_cmd(path, fan_ref, fmt):
    """Schema and invariant diagnostics for an input or divisor file."""
    try:
        diags = validate(path, fan_ref)
        threads_from_env()
    except InputError as exc:
        click.echo(json.dumps(_error(exc, EXIT_INVALID), sort_keys=True), err=True)
        sys.exit(EXIT_INVALID)
    doc = {"schema": "katoskel_result/v1", "command": "validate", "input": path, "version": __version__,
           "options": {}, "result": {"diagnostics": diags}}
    click.echo(report(doc) if fmt == "text" else dumps(doc), nl=False)


if __name__ == "__main__":
    main()
