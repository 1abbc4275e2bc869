"""Finite translation surfaces as polygon complexes with exact coordinates.

A complex is a list of simple, positively oriented polygons with vertices in
FieldElem^2 and a perfect matching of directed edges glued by translations
(matched edges carry exactly opposite vectors).  Optionally some vertices
are marked as non-singular members of the singularity set.

The module computes vertex classes and cone angles by exact corner walks,
the holonomy modules of absolute and relative homology from a fan
triangulation, complete saddle-connection sets up to a length bound by a
wedge-propagation search over the developed triangulation, and the
square-tiled detection verdict from the lattice structure of the relative
module.
"""

from __future__ import annotations

from fractions import Fraction

from .errors import ConstraintViolation, InvalidGluing, InvalidPolygon, NotConnected
from .plane import cross, dot, norm2, same_direction, v_add, v_neg, v_sub
from .zmodule import ModuleDesc


# ---------------------------------------------------------------------------
# exact predicates
# ---------------------------------------------------------------------------

def _sign(x) -> int:
    return x.sign()


def _on_segment(p, a, b) -> bool:
    """Is p on the closed segment [a, b]?  Assumes p collinear with a, b."""
    return (min(a[0], b[0]) <= p[0] <= max(a[0], b[0])
            and min(a[1], b[1]) <= p[1] <= max(a[1], b[1]))


def segments_touch(p1, p2, q1, q2) -> bool:
    """Do closed segments [p1,p2] and [q1,q2] share any point?  Exact."""
    d1 = _sign(cross(v_sub(p2, p1), v_sub(q1, p1)))
    d2 = _sign(cross(v_sub(p2, p1), v_sub(q2, p1)))
    d3 = _sign(cross(v_sub(q2, q1), v_sub(p1, q1)))
    d4 = _sign(cross(v_sub(q2, q1), v_sub(p2, q1)))
    if d1 != d2 and d3 != d4 and 0 not in (d1, d2, d3, d4):
        return True
    if d1 == 0 and _on_segment(q1, p1, p2):
        return True
    if d2 == 0 and _on_segment(q2, p1, p2):
        return True
    if d3 == 0 and _on_segment(p1, q1, q2):
        return True
    if d4 == 0 and _on_segment(p2, q1, q2):
        return True
    return False


def _check_simple_polygon(verts):
    m = len(verts)
    if m < 3:
        raise InvalidPolygon("polygon needs at least 3 vertices")
    area2 = None
    total = None
    for i in range(m):
        a = verts[i]
        b = verts[(i + 1) % m]
        e = v_sub(b, a)
        if e[0].is_zero() and e[1].is_zero():
            raise InvalidPolygon("zero-length edge")
        term = cross(a, b)
        total = term if total is None else total + term
    if total.sign() <= 0:
        raise InvalidPolygon("polygon is not positively oriented")
    for i in range(m):
        d_out = v_sub(verts[(i + 1) % m], verts[i])
        d_in = v_sub(verts[(i - 1) % m], verts[i])
        if cross(d_out, d_in).is_zero() and dot(d_out, d_in).sign() > 0:
            raise InvalidPolygon("zero-angle spike at a vertex")
    for i in range(m):
        for j in range(i + 1, m):
            if j == i or (j == i + 1) or (i == 0 and j == m - 1):
                continue
            if segments_touch(verts[i], verts[(i + 1) % m],
                              verts[j], verts[(j + 1) % m]):
                raise InvalidPolygon(
                    f"edges {i} and {j} of a polygon intersect")


# ---------------------------------------------------------------------------
# the complex
# ---------------------------------------------------------------------------

class ConePointDesc:
    """One vertex class: its corner incidences, turn count and marking."""

    def __init__(self, corners, turns, marked):
        self.corners = tuple(corners)      # (polygon, vertex) pairs
        self.turns = turns                 # cone angle is 2*pi*turns
        self.marked = marked

    @property
    def is_singular(self) -> bool:
        return self.turns >= 2

    @property
    def in_sigma(self) -> bool:
        return self.is_singular or self.marked

    def __repr__(self):
        tag = "marked " if self.marked and not self.is_singular else ""
        return f"ConePointDesc({tag}angle={2 * self.turns}pi, corners={len(self.corners)})"


class PolygonComplex:
    """Validated translation surface built from glued polygons."""

    def __init__(self, tower, polygons, gluings, marked=(), marked_all=False,
                 check=True):
        self.tower = tower
        self.polygons = [ [tuple(v) for v in poly] for poly in polygons ]
        self.gluings = [tuple(map(tuple, pair)) for pair in gluings]
        self.marked = set(map(tuple, marked))
        self._partner = {}
        for (p, e), (q, f) in self.gluings:
            self._partner[(p, e)] = (q, f)
            self._partner[(q, f)] = (p, e)
        if check:
            self._validate()
        self._classes = self._vertex_classes()
        if marked_all:
            for cls in self._classes:
                self.marked.update(cls.corners)
            self._classes = self._vertex_classes()

    # -- validation ----------------------------------------------------

    def _edge_vector(self, p, e):
        verts = self.polygons[p]
        return v_sub(verts[(e + 1) % len(verts)], verts[e])

    def _validate(self):
        for poly in self.polygons:
            _check_simple_polygon(poly)
        all_edges = {(p, e) for p, poly in enumerate(self.polygons)
                     for e in range(len(poly))}
        seen = set()
        for (p, e), (q, f) in self.gluings:
            for side in ((p, e), (q, f)):
                if side not in all_edges:
                    raise InvalidGluing(f"gluing references missing edge {side}")
                if side in seen:
                    raise InvalidGluing(f"edge {side} glued more than once")
                seen.add(side)
            if (p, e) == (q, f):
                raise InvalidGluing("edge glued to itself")
            v = self._edge_vector(p, e)
            w = self._edge_vector(q, f)
            if not (v_add(v, w)[0].is_zero() and v_add(v, w)[1].is_zero()):
                raise InvalidGluing(
                    f"edges {(p, e)} and {(q, f)} are not glued by a "
                    f"translation (vectors are not opposite)")
        if seen != all_edges:
            missing = sorted(all_edges - seen)[:4]
            raise InvalidGluing(f"unmatched edges, e.g. {missing}")
        # connectivity of the polygon adjacency graph
        if self.polygons:
            seen_p = {0}
            stack = [0]
            while stack:
                p = stack.pop()
                for e in range(len(self.polygons[p])):
                    q, _ = self._partner[(p, e)]
                    if q not in seen_p:
                        seen_p.add(q)
                        stack.append(q)
            if len(seen_p) != len(self.polygons):
                raise NotConnected("polygon complex is not connected")

    # -- vertex classes and angles --------------------------------------

    def _next_corner(self, p, i):
        """Next corner counterclockwise around the same surface point."""
        m = len(self.polygons[p])
        q, j = self._partner[(p, (i - 1) % m)]
        return (q, j)

    def _vertex_classes(self):
        corners = {(p, i) for p, poly in enumerate(self.polygons)
                   for i in range(len(poly))}
        classes = []
        while corners:
            start = min(corners)
            cycle = [start]
            corners.remove(start)
            cur = self._next_corner(*start)
            while cur != start:
                cycle.append(cur)
                corners.remove(cur)
                cur = self._next_corner(*cur)
            turns = self._count_turns(cycle)
            marked = any(c in self.marked for c in cycle)
            classes.append(ConePointDesc(cycle, turns, marked))
        return classes

    def _corner_rays(self, p, i):
        verts = self.polygons[p]
        m = len(verts)
        d_out = v_sub(verts[(i + 1) % m], verts[i])
        d_in = v_sub(verts[(i - 1) % m], verts[i])
        return d_out, d_in

    def _count_turns(self, cycle) -> int:
        """Number of full 2*pi turns around a vertex class (exact)."""
        rays = [self._corner_rays(p, i)[0] for (p, i) in cycle]
        rays.append(rays[0])
        u = rays[0]
        count = 0
        for a, b in zip(rays, rays[1:]):
            if _dir_eq(u, b):
                count += 1
            elif not _dir_eq(u, a) and _strictly_ccw_between(a, b, u):
                count += 1
        return count

    # -- public operations ------------------------------------------------

    @property
    def vertex_classes(self):
        return self._classes

    def cone_points(self):
        """All vertex classes with exact integer turn counts."""
        return list(self._classes)

    def sigma_classes(self):
        return [c for c in self._classes if c.in_sigma]

    def class_index_of(self, p, i):
        for idx, c in enumerate(self._classes):
            if (p, i) in c.corners:
                return idx
        raise KeyError((p, i))

    def euler_characteristic(self):
        v = len(self._classes)
        e = len(self.gluings)
        f = len(self.polygons)
        return v - e + f

    def genus(self):
        chi = self.euler_characteristic()
        assert chi % 2 == 0
        return (2 - chi) // 2

    # triangulation, modules, saddle connections and detection are provided
    # by the functions below; methods delegate for convenience.

    def holonomy_modules(self):
        return holonomy_modules(self)

    def saddle_connections(self, bound):
        return saddle_connections(self, bound)

    def detect_origami(self):
        return detect_origami(self)

    def __repr__(self):
        return (f"PolygonComplex({len(self.polygons)} polygons, "
                f"genus {self.genus()})")


def _dir_eq(a, b) -> bool:
    return cross(a, b).is_zero() and dot(a, b).sign() > 0


def _strictly_ccw_between(a, b, u) -> bool:
    """Is direction u strictly inside the CCW sector from a to b?

    The sector angle is assumed to lie in (0, 2*pi); u is assumed not
    parallel-equal to a or b.
    """
    c_ab = cross(a, b).sign()
    if c_ab > 0:
        return cross(a, u).sign() > 0 and cross(u, b).sign() > 0
    if c_ab == 0:
        # a, b antiparallel: sector is exactly pi
        return cross(a, u).sign() > 0
    # sector > pi: complement of the closed CCW sector from b to a
    return not (cross(b, u).sign() > 0 and cross(u, a).sign() > 0)


def validate(c: PolygonComplex) -> PolygonComplex:
    """Re-run all structural checks; returns the checked complex."""
    return PolygonComplex(c.tower, c.polygons, c.gluings, marked=c.marked)


# ---------------------------------------------------------------------------
# fan triangulation
# ---------------------------------------------------------------------------

class _Triangulation:
    """Fan triangulation of a complex; every vertex must lie in Sigma."""

    def __init__(self, complex_: PolygonComplex):
        self.complex = complex_
        for cls in complex_.vertex_classes:
            if not cls.in_sigma:
                raise ConstraintViolation(
                    "fan triangulation requires every polygon vertex to be a "
                    "cone point or marked; found a regular unmarked vertex "
                    f"class {cls.corners[0]}")
        self.tri_pos = []        # per triangle: 3 chart positions
        self.tri_class = []      # per triangle: 3 vertex-class indices
        self.tri_adj = []        # per triangle: 3 entries (tri, edge, tau)
        self._build()

    def _build(self):
        cx = self.complex
        zero = cx.tower.zero()
        tau0 = (zero, zero)
        tri_of_polyedge = {}
        poly_tris = []
        for p, verts in enumerate(cx.polygons):
            m = len(verts)
            ids = []
            for j in range(1, m - 1):
                idx = len(self.tri_pos)
                pos = (verts[0], verts[j], verts[j + 1])
                if cross(v_sub(pos[1], pos[0]), v_sub(pos[2], pos[0])).sign() <= 0:
                    raise ConstraintViolation(
                        f"polygon {p} is not fan-triangulable from its first "
                        f"vertex (non-convex); subdivide it in the builder")
                self.tri_pos.append(pos)
                self.tri_class.append((cx.class_index_of(p, 0),
                                       cx.class_index_of(p, j),
                                       cx.class_index_of(p, j + 1)))
                self.tri_adj.append([None, None, None])
                ids.append(idx)
            poly_tris.append(ids)
            # interior fan diagonals: triangle j edge 0 (v0->vj) pairs with
            # triangle j-1 edge 2 (vj->v0)
            for k in range(1, len(ids)):
                a, b = ids[k - 1], ids[k]
                self.tri_adj[b][0] = (a, 2, tau0)
                self.tri_adj[a][2] = (b, 0, tau0)
            # polygon boundary edges live on specific triangle edges
            for e in range(m):
                if e == 0:
                    tri_of_polyedge[(p, 0)] = (ids[0], 0)
                elif e <= m - 2:
                    tri_of_polyedge[(p, e)] = (ids[e - 1], 1)
                else:
                    tri_of_polyedge[(p, m - 1)] = (ids[-1], 2)
        for (p, e), (q, f) in cx.gluings:
            t1, e1 = tri_of_polyedge[(p, e)]
            t2, e2 = tri_of_polyedge[(q, f)]
            vp = cx.polygons[p][e]
            vq_head = cx.polygons[q][(f + 1) % len(cx.polygons[q])]
            tau12 = v_sub(vq_head, vp)
            self.tri_adj[t1][e1] = (t2, e2, tau12)
            self.tri_adj[t2][e2] = (t1, e1, v_neg(tau12))

    def edges(self):
        """One record per undirected triangulation edge:
        (class_from, class_to, vector)."""
        out = []
        seen = set()
        for t in range(len(self.tri_pos)):
            for e in range(3):
                t2, e2, _ = self.tri_adj[t][e]
                if (t2, e2) in seen or (t, e) in seen:
                    continue
                seen.add((t, e))
                seen.add((t2, e2))
                a = self.tri_class[t][e]
                b = self.tri_class[t][(e + 1) % 3]
                vec = v_sub(self.tri_pos[t][(e + 1) % 3], self.tri_pos[t][e])
                out.append((a, b, vec))
        return out


def holonomy_modules(cx: PolygonComplex):
    """(Lambda, Lambda0): holonomy of absolute and relative homology.

    Lambda0 is generated by the edge vectors of a fan triangulation with
    vertices at the singularity set; Lambda by the holonomies of the cycle
    basis coming from a spanning tree of the triangulation 1-skeleton (face
    boundaries develop to zero, so this is the full absolute image).
    """
    tri = _Triangulation(cx)
    edges = tri.edges()
    lam0 = ModuleDesc([vec for _, _, vec in edges])

    nclasses = len(cx.vertex_classes)
    zero = cx.tower.zero()
    pos = {0: (zero, zero)}
    in_tree = [False] * len(edges)
    changed = True
    while changed:
        changed = False
        for i, (a, b, vec) in enumerate(edges):
            if in_tree[i]:
                continue
            if a in pos and b not in pos:
                pos[b] = v_add(pos[a], vec)
                in_tree[i] = True
                changed = True
            elif b in pos and a not in pos:
                pos[a] = v_sub(pos[b], vec)
                in_tree[i] = True
                changed = True
    if len(pos) != nclasses:
        raise NotConnected("triangulation 1-skeleton is not connected")
    cycles = []
    for i, (a, b, vec) in enumerate(edges):
        if in_tree[i]:
            continue
        hol = v_sub(v_add(pos[a], vec), pos[b])
        cycles.append(hol)
    lam = ModuleDesc(cycles)
    return lam, lam0


# ---------------------------------------------------------------------------
# saddle connections
# ---------------------------------------------------------------------------

class SaddleConnectionSet:
    """Directed saddle connections up to a length bound.

    ``records`` maps (vector key, start class, end class) to
    (vector, multiplicity); ``vectors`` aggregates per holonomy vector.
    Every geodesic contributes two directed records (one per orientation).
    """

    def __init__(self, bound, records, truncated=False):
        self.length_bound = bound
        self.records = records
        self.truncated = truncated

    @property
    def vectors(self):
        agg = {}
        for (vkey, _, _), (vec, mult) in sorted(self.records.items()):
            if vkey in agg:
                agg[vkey] = (agg[vkey][0], agg[vkey][1] + mult)
            else:
                agg[vkey] = (vec, mult)
        return [agg[k] for k in sorted(agg)]

    def vector_set(self):
        return [vec for vec, _ in self.vectors]

    def __len__(self):
        return sum(m for _, m in self.records.values())

    def __repr__(self):
        return (f"SaddleConnectionSet({len(self.vectors)} vectors, "
                f"{len(self)} directed connections)")


def saddle_connections(cx: PolygonComplex, bound) -> SaddleConnectionSet:
    """All saddle connections of length <= bound (complete, exact).

    Wedge propagation over the developed fan triangulation: from every
    corner of every singular/marked vertex, the angular sector of the corner
    is pushed across triangle edges; each third vertex strictly inside the
    current wedge is a saddle connection endpoint and splits the wedge
    (cone points block what lies behind them).
    """
    if bound.sign() <= 0:
        raise ConstraintViolation("length bound must be positive")
    tri = _Triangulation(cx)
    bound2 = bound * bound
    records = {}

    def emit(start_cls, end_cls, vec):
        key = ((vec[0].key(), vec[1].key()), start_cls, end_cls)
        if key in records:
            v, m = records[key]
            records[key] = (v, m + 1)
        else:
            records[key] = (vec, 1)

    def seg_min_dist2_le(a, b, limit2):
        """Does the segment [a, b] come within sqrt(limit2) of the origin?"""
        ab = v_sub(b, a)
        denom = norm2(ab)
        t_num = -dot(a, ab)
        if t_num.sign() <= 0:
            d2 = norm2(a)
        elif (t_num - denom).sign() >= 0:
            d2 = norm2(b)
        else:
            # distance^2 = |a|^2 - t_num^2 / denom
            d2 = norm2(a) - t_num * t_num / denom
        return (d2 - limit2).sign() <= 0

    def explore(t, entry_edge, offset, u1, u2, e1_pos, e2_pos):
        """Recurse into triangle t across entry_edge.

        ``offset`` develops the current chart: a point with chart coordinate
        x sits at x + offset relative to the start vertex at the origin.
        ``e1_pos``/``e2_pos`` are the developed portal endpoints on the u1/u2
        side of the wedge.
        """
        a_idx, b_idx = entry_edge, (entry_edge + 1) % 3
        w_idx = (entry_edge + 2) % 3
        a_dev = v_add(tri.tri_pos[t][a_idx], offset)
        w_dev = v_add(tri.tri_pos[t][w_idx], offset)
        if a_dev == e1_pos:
            # sub-portal on the u1 side is edge (w -> a), on u2 side (b -> w)
            sub_u1_edge, sub_u2_edge = w_idx, b_idx
            u1_vert, u2_vert = a_dev, e2_pos
        else:
            sub_u1_edge, sub_u2_edge = b_idx, w_idx
            u1_vert, u2_vert = e1_pos, a_dev
        dir_w = w_dev
        s1 = cross(u1, dir_w).sign()
        s2 = cross(dir_w, u2).sign()
        if s1 > 0 and s2 > 0:
            # w strictly inside the wedge: emit and split there
            if (norm2(dir_w) - bound2).sign() <= 0:
                emit(start_class, tri.tri_class[t][w_idx], dir_w)
            branches = (
                (sub_u1_edge, u1, dir_w, u1_vert, w_dev),
                (sub_u2_edge, dir_w, u2, w_dev, u2_vert),
            )
        elif s1 <= 0:
            # w at or clockwise of u1: the wedge passes on the u2 side of w
            branches = ((sub_u2_edge, u1, u2, w_dev, u2_vert),)
        else:
            branches = ((sub_u1_edge, u1, u2, u1_vert, w_dev),)
        for edge, w1, w2, p1, p2 in branches:
            nxt, nxt_edge, tau = tri.tri_adj[t][edge]
            if not seg_min_dist2_le(p1, p2, bound2):
                continue
            explore(nxt, nxt_edge, v_sub(offset, tau), w1, w2, p1, p2)

    for t in range(len(tri.tri_pos)):
        for c in range(3):
            start_class = tri.tri_class[t][c]
            apex_neg = v_neg(tri.tri_pos[t][c])
            nxt_pos = v_add(tri.tri_pos[t][(c + 1) % 3], apex_neg)
            prv_pos = v_add(tri.tri_pos[t][(c + 2) % 3], apex_neg)
            # the outgoing triangulation edge, emitted once per direction
            if (norm2(nxt_pos) - bound2).sign() <= 0:
                emit(start_class, tri.tri_class[t][(c + 1) % 3], nxt_pos)
            portal_edge = (c + 1) % 3
            nxt, nxt_edge, tau = tri.tri_adj[t][portal_edge]
            if seg_min_dist2_le(nxt_pos, prv_pos, bound2):
                explore(nxt, nxt_edge, v_sub(apex_neg, tau), nxt_pos, prv_pos,
                        nxt_pos, prv_pos)
    return SaddleConnectionSet(bound, records)


# ---------------------------------------------------------------------------
# origami detection
# ---------------------------------------------------------------------------

class OrigamiVerdict:
    def __init__(self, is_origami, affine_map, lattice, relative_module):
        self.is_origami = is_origami
        self.affine_map = affine_map      # 2x2 rows of FieldElem, or None
        self.lattice = lattice            # lattice basis vectors, or None
        self.relative_module = relative_module

    def __repr__(self):
        return f"OrigamiVerdict(is_origami={self.is_origami})"


def detect_origami(cx: PolygonComplex) -> OrigamiVerdict:
    """Square-tiled detection: the developed cone points are x + Lambda0, so
    the surface is affinely square-tiled iff the relative module is a
    lattice; the affine map carries the lattice basis to the standard one.
    """
    if not any(c.in_sigma for c in cx.vertex_classes):
        raise ConstraintViolation(
            "origami detection needs at least one cone or marked point")
    _, lam0 = holonomy_modules(cx)
    if lam0.lattice_basis is None or len(lam0.lattice_basis) != 2:
        return OrigamiVerdict(False, None, None, lam0)
    b1, b2 = lam0.lattice_basis
    det = cross(b1, b2)
    if det.sign() < 0:
        b1, b2 = b2, b1
        det = cross(b1, b2)
    # inverse of the column matrix [b1 b2]
    inv = ((b2[1] / det, -b2[0] / det),
           (-b1[1] / det, b1[0] / det))
    return OrigamiVerdict(True, inv, [b1, b2], lam0)


def apply_linear_map(cx: PolygonComplex, matrix) -> PolygonComplex:
    """New complex with every vertex transformed by an invertible matrix
    with positive determinant (gluings are preserved)."""
    (a, b), (c, d) = matrix
    det = a * d - b * c
    if det.sign() <= 0:
        raise ConstraintViolation("linear map must have positive determinant")
    polys = [[(a * v[0] + b * v[1], c * v[0] + d * v[1]) for v in poly]
             for poly in cx.polygons]
    return PolygonComplex(cx.tower, polys, cx.gluings, marked=cx.marked)
