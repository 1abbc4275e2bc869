"""JSON serialization with bit-exact round-trips.

Rationals are "p/q" strings; tower elements are nested coefficient arrays
over the tower's structure (algebraic coefficients as nested lists down to
rational strings, polynomial parts as sorted [exponents, coefficient]
pairs).  Deserializing over a structurally equal tower reproduces elements
byte-for-byte.
"""

from __future__ import annotations

import json
from fractions import Fraction

from . import multipoly as mp
from .atlas import Slit, SlitAtlas
from .errors import ParseError
from .origami import Origami
from .surface import PolygonComplex
from .tower import FieldElem, FieldTower


def frac_to_str(q) -> str:
    q = Fraction(q)
    return f"{q.numerator}/{q.denominator}"


def frac_from_str(s) -> Fraction:
    try:
        return Fraction(str(s))
    except (ValueError, ZeroDivisionError) as exc:
        raise ParseError(f"bad rational literal {s!r}") from exc


# -- towers -----------------------------------------------------------------

def tower_to_json(tower: FieldTower):
    return {
        "transcendentals": [
            {"name": t.name, "decimal_hint": t.spec}
            for t in tower.transcendentals
        ],
        "extensions": [
            {
                "name": e.name,
                "minpoly_coeffs": [_alg_to_json(c) for c in e.minpoly],
                "isolating_interval": [frac_to_str(e.interval[0]),
                                       frac_to_str(e.interval[1])],
            }
            for e in tower.extensions
        ],
    }


def tower_from_json(data) -> FieldTower:
    try:
        trans = [(t["name"], t["decimal_hint"])
                 for t in data.get("transcendentals", [])]
        exts = []
        for e in data.get("extensions", []):
            coeffs = [_alg_from_json(c) for c in e["minpoly_coeffs"]]
            lo, hi = e["isolating_interval"]
            exts.append((e.get("name", f"a{len(exts) + 1}"), coeffs,
                         (frac_from_str(lo), frac_from_str(hi))))
    except (KeyError, TypeError) as exc:
        raise ParseError(f"malformed tower description: {exc}") from exc
    return FieldTower(transcendentals=trans, extensions=exts)


def _alg_to_json(a):
    if isinstance(a, Fraction):
        return frac_to_str(a)
    return [_alg_to_json(c) for c in a]


def _alg_from_json(data):
    if isinstance(data, str):
        return frac_from_str(data)
    if isinstance(data, (int, float)):
        return Fraction(data)
    return tuple(_alg_from_json(c) for c in data)


# -- elements ----------------------------------------------------------------

def elem_to_json(e: FieldElem):
    def poly(p):
        return [[list(exps), _alg_to_json(coeff)]
                for exps, coeff in sorted(p.items())]
    return {"num": poly(e.num), "den": poly(e.den)}


def elem_from_json(tower: FieldTower, data) -> FieldElem:
    level = len(tower.extensions)

    def poly(items):
        out = {}
        for exps, coeff in items:
            out[tuple(int(x) for x in exps)] = tower._alift(
                level, _alg_from_json(coeff))
        return out
    try:
        num = poly(data["num"])
        den = poly(data["den"])
    except (KeyError, TypeError) as exc:
        raise ParseError(f"malformed element: {exc}") from exc
    return FieldElem(tower, num, den)


def vec_to_json(v):
    return [elem_to_json(v[0]), elem_to_json(v[1])]


def vec_from_json(tower, data):
    return (elem_from_json(tower, data[0]), elem_from_json(tower, data[1]))


# -- origami ------------------------------------------------------------------

def origami_to_json(o: Origami):
    return {
        "n": o.n,
        "sigma_h": [i + 1 for i in o.sigma_h],
        "sigma_v": [i + 1 for i in o.sigma_v],
    }


def origami_from_json(data) -> Origami:
    try:
        n = int(data["n"])
        h = [int(x) - 1 for x in data["sigma_h"]]
        v = [int(x) - 1 for x in data["sigma_v"]]
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"malformed origami: {exc}") from exc
    if len(h) != n or len(v) != n:
        raise ParseError("permutation length does not match n")
    return Origami(h, v)


# -- polygon complexes ---------------------------------------------------------

def complex_to_json(c: PolygonComplex):
    return {
        "tower": tower_to_json(c.tower),
        "polygons": [[vec_to_json(v) for v in poly] for poly in c.polygons],
        "gluings": [[list(a), list(b)] for a, b in c.gluings],
        "marked": sorted(list(m) for m in c.marked),
    }


def complex_from_json(data) -> PolygonComplex:
    try:
        tower = tower_from_json(data["tower"])
        polys = [[vec_from_json(tower, v) for v in poly]
                 for poly in data["polygons"]]
        gluings = [(tuple(a), tuple(b)) for a, b in data["gluings"]]
        marked = [tuple(m) for m in data.get("marked", [])]
    except (KeyError, TypeError) as exc:
        raise ParseError(f"malformed surface: {exc}") from exc
    return PolygonComplex(tower, polys, gluings, marked=marked)


# -- slit atlases ---------------------------------------------------------------

def atlas_to_json(a: SlitAtlas):
    def slit(s: Slit):
        if s.kind == "segment":
            return {"kind": "segment", "p0": vec_to_json(s.p0),
                    "p1": vec_to_json(s.p1)}
        return {"kind": "ray", "p0": vec_to_json(s.p0),
                "dir": vec_to_json(s.dir)}
    pairs = []
    seen = set()
    for k, v in sorted(a.gluing.items()):
        if k in seen or v in seen:
            continue
        seen.add(k)
        seen.add(v)
        pairs.append([list(k), list(v)])
    out = {
        "tower": tower_to_json(a.tower),
        "planes": [[slit(s) for s in plane] for plane in a.planes],
        "gluings": pairs,
    }
    if a.window is not None:
        out["window"] = [vec_to_json(a.window[0]), vec_to_json(a.window[1])]
    return out


def atlas_from_json(data) -> SlitAtlas:
    try:
        tower = tower_from_json(data["tower"])

        def slit(s):
            if s["kind"] == "segment":
                return Slit("segment", vec_from_json(tower, s["p0"]),
                            vec_from_json(tower, s["p1"]))
            if s["kind"] == "ray":
                return Slit("ray", vec_from_json(tower, s["p0"]),
                            direction=vec_from_json(tower, s["dir"]))
            raise ParseError(f"unknown slit kind {s['kind']!r}")

        planes = [[slit(s) for s in plane] for plane in data["planes"]]
        gluings = [(tuple(a), tuple(b)) for a, b in data["gluings"]]
        window = None
        if "window" in data:
            window = (vec_from_json(tower, data["window"][0]),
                      vec_from_json(tower, data["window"][1]))
    except (KeyError, TypeError) as exc:
        raise ParseError(f"malformed atlas: {exc}") from exc
    return SlitAtlas(tower, planes, gluings, window=window)


# -- reports -------------------------------------------------------------------

def subfield_to_json(f):
    if f is None:
        return None
    return {
        "degree_over_q": f.degree_over_q,
        "primitive_element": (None if f.primitive is None
                              else elem_to_json(f.primitive)),
        "primitive_minpoly": (None if f.prim_minpoly is None
                              else [frac_to_str(c) for c in f.prim_minpoly]),
        "transcendence_generators": list(f.transcendence_generators),
        "generators": [elem_to_json(g) for g in f.generators],
        "pretty": repr(f),
    }


def module_to_json(m):
    return {
        "generators": [vec_to_json(g) for g in m.generators],
        "rank_over_z": m.rank_over_z,
        "real_span_dim": m.real_span_dim,
        "lattice_basis": (None if m.lattice_basis is None
                          else [vec_to_json(b) for b in m.lattice_basis]),
    }


def sc_set_to_json(sc):
    return {
        "length_bound": elem_to_json(sc.length_bound),
        "truncated": sc.truncated,
        "vectors": [{"vector": vec_to_json(v), "multiplicity": m,
                     "pretty": [str(v[0]), str(v[1])]}
                    for v, m in sc.vectors],
    }


def veech_to_json(desc):
    return {
        "orbit_size": desc.orbit_size,
        "generators": [{"word": w, "matrix": [list(r) for r in m]}
                       for w, m in desc.generators],
        "coset_representatives": desc.coset_representatives,
        "contains_minus_identity": desc.contains_minus_identity,
    }


def stratum_to_json(st):
    return {
        "vertex_cycles": st.cycles,
        "cone_points": [{"turns": l, "angle": f"{2 * l}*pi"}
                        for l in st.cycles if l >= 2],
        "marked_regular_points": st.marked_regular_points,
        "genus": st.genus,
    }


def dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"
