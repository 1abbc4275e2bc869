"""Planes slit along segments or rays and glued by translations.

An atlas is a finite list of planes (copies of R^2 over a common tower),
each carrying disjoint slits; every slit has an upper/left lip and a
lower/right lip (left and right of its direction vector), and a gluing
involution matches lips of congruent parallel slits, upper to lower.  The
gluing may be partial: unglued lips are truncation boundaries of a larger
(typically infinite) surface, and windowed outputs carry a truncation flag.

Singularities sit at slit endpoints.  Exact ray tracing implements the
developing map: a trace follows the straight developed line, switching
charts at each slit crossing, and stops at a singularity, at the crossing
budget, or on leaving the window.  Saddle connections up to a length bound
are found by validating candidate directions (differences of developed
singularity images reachable within the crossing budget) with the tracer.
"""

from __future__ import annotations

from fractions import Fraction

from .errors import (ConstraintViolation, InvalidGluing, NotConnected,
                     OverlappingSlits)
from .plane import cross, dot, norm2, v_add, v_neg, v_sub, vec_key
from .surface import SaddleConnectionSet
from .zmodule import ModuleDesc

UPPER = "upper"
LOWER = "lower"


def _opp(side):
    return LOWER if side == UPPER else UPPER


class Slit:
    """A segment (p0 to p1) or ray (p0, direction) removed from a plane."""

    def __init__(self, kind, p0, p1=None, direction=None):
        if kind not in ("segment", "ray"):
            raise ConstraintViolation(f"unknown slit kind {kind!r}")
        self.kind = kind
        self.p0 = tuple(p0)
        if kind == "segment":
            self.p1 = tuple(p1)
            self.vec = v_sub(self.p1, self.p0)
            if self.vec[0].is_zero() and self.vec[1].is_zero():
                raise ConstraintViolation("zero-length slit")
        else:
            self.dir = tuple(direction)
            if self.dir[0].is_zero() and self.dir[1].is_zero():
                raise ConstraintViolation("zero direction ray")
            self.p1 = None
            self.vec = self.dir

    def endpoints(self):
        if self.kind == "segment":
            return [(0, self.p0), (1, self.p1)]
        return [(0, self.p0)]

    def __repr__(self):
        if self.kind == "segment":
            return f"Slit({self.p0} -> {self.p1})"
        return f"Slit(ray {self.p0} dir {self.dir})"


class TraceResult:
    def __init__(self, crossings, developed_endpoint, terminated,
                 end_plane=None, end_point=None, end_class=None):
        self.crossings = crossings          # list of (plane, slit, side)
        self.developed_endpoint = developed_endpoint
        self.terminated = terminated        # hit-singularity | max-crossings | escaped-window
        self.end_plane = end_plane
        self.end_point = end_point
        self.end_class = end_class

    def __repr__(self):
        return (f"TraceResult({self.terminated}, {len(self.crossings)} "
                f"crossings)")


class SlitAtlas:
    """Validated slit-and-glue description of a translation surface."""

    def __init__(self, tower, planes, gluings, window=None, check=True):
        self.tower = tower
        self.planes = [list(slits) for slits in planes]
        self.gluing = {}
        for a, b in gluings:
            a, b = tuple(a), tuple(b)
            if a in self.gluing or b in self.gluing:
                raise InvalidGluing(f"slit side glued twice: {a} or {b}")
            if a == b:
                raise InvalidGluing("slit side glued to itself")
            self.gluing[a] = b
            self.gluing[b] = a
        self.window = window
        if check:
            self._validate()
        self._classes = None
        self._class_by_pos = None

    def slit(self, plane, idx) -> Slit:
        return self.planes[plane][idx]

    # -- validation -------------------------------------------------------

    def _validate(self):
        for p, slits in enumerate(self.planes):
            for i in range(len(slits)):
                for j in range(i + 1, len(slits)):
                    if _slits_conflict(slits[i], slits[j]):
                        raise OverlappingSlits(
                            f"slits {i} and {j} of plane {p} overlap beyond "
                            f"a shared endpoint")
        for key, partner in self.gluing.items():
            p, i, side = key
            q, j, oside = partner
            if not (0 <= p < len(self.planes) and 0 <= i < len(self.planes[p])):
                raise InvalidGluing(f"gluing references missing slit {key}")
            if side not in (UPPER, LOWER) or oside != _opp(side):
                raise InvalidGluing(
                    f"gluing must match an upper lip with a lower lip: "
                    f"{key} ~ {partner}")
            s1, s2 = self.slit(p, i), self.slit(q, j)
            if s1.kind != s2.kind:
                raise InvalidGluing(f"glued slits {key} ~ {partner} differ in kind")
            if s1.kind == "segment":
                if not (s1.vec[0] == s2.vec[0] and s1.vec[1] == s2.vec[1]):
                    raise InvalidGluing(
                        f"glued segments {key} ~ {partner} are not congruent "
                        f"parallel (vectors must be equal)")
            else:
                if not (cross(s1.dir, s2.dir).is_zero()
                        and dot(s1.dir, s2.dir).sign() > 0):
                    raise InvalidGluing(
                        f"glued rays {key} ~ {partner} must have equal direction")
        # connectivity of the plane graph through gluings
        if len(self.planes) > 1:
            seen = {0}
            stack = [0]
            while stack:
                p = stack.pop()
                for i in range(len(self.planes[p])):
                    for side in (UPPER, LOWER):
                        partner = self.gluing.get((p, i, side))
                        if partner and partner[0] not in seen:
                            seen.add(partner[0])
                            stack.append(partner[0])
            if len(seen) != len(self.planes):
                raise NotConnected("slit atlas gluing graph is not connected")

    def is_fully_glued(self) -> bool:
        total = sum(2 * len(slits) for slits in self.planes)
        return len(self.gluing) == total

    def translation(self, key):
        """Chart translation for crossing the given slit side: a point x in
        this plane continues at x + tau in the partner's plane."""
        partner = self.gluing.get(tuple(key))
        if partner is None:
            return None, None
        p, i, _ = key
        q, j, _ = partner
        tau = v_sub(self.slit(q, j).p0, self.slit(p, i).p0)
        return partner, tau

    # -- singularity classes -----------------------------------------------

    def endpoint_positions(self):
        """Deduplicated (plane, position) germ points of all slit endpoints."""
        out = {}
        for p, slits in enumerate(self.planes):
            for i, s in enumerate(slits):
                for k, pos in s.endpoints():
                    out.setdefault((p, vec_key(pos)), (p, pos))
        return list(out.values())

    def singularity_classes(self):
        """Union-find classes of endpoint germs under position coincidence
        and the gluing correspondence of endpoints."""
        if self._classes is not None:
            return self._classes
        germs = []
        index = {}
        for p, slits in enumerate(self.planes):
            for i, s in enumerate(slits):
                for k, _ in s.endpoints():
                    index[(p, i, k)] = len(germs)
                    germs.append((p, i, k))
        parent = list(range(len(germs)))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        def union(a, b):
            ra, rb = find(a), find(b)
            if ra != rb:
                parent[ra] = rb

        by_pos = {}
        for p, slits in enumerate(self.planes):
            for i, s in enumerate(slits):
                for k, pos in s.endpoints():
                    by_pos.setdefault((p, vec_key(pos)), []).append((p, i, k))
        for group in by_pos.values():
            for g in group[1:]:
                union(index[group[0]], index[g])
        for key, partner in self.gluing.items():
            p, i, _ = key
            q, j, _ = partner
            for k, _ in self.slit(p, i).endpoints():
                if k < len(self.slit(q, j).endpoints()):
                    union(index[(p, i, k)], index[(q, j, k)])
        classes = {}
        for g, (p, i, k) in enumerate(germs):
            classes.setdefault(find(g), []).append((p, i, k))
        self._classes = sorted(classes.values())
        return self._classes

    def class_of_position(self, plane, pos):
        if self._class_by_pos is None:
            table = {}
            for idx, cls in enumerate(self.singularity_classes()):
                for (p, i, k) in cls:
                    _, epos = self.slit(p, i).endpoints()[k]
                    table[(p, vec_key(epos))] = idx
            self._class_by_pos = table
        return self._class_by_pos.get((plane, vec_key(pos)))

    def cone_angles(self):
        """Turn count per singularity class (None = walk leaves the glued
        part: infinite angle or truncation boundary).

        The corner walk sweeps counterclockwise around the point, hopping
        from the left lip of each slit germ to the next germ and across its
        gluing; the turn count is exact.
        """
        classes = self.singularity_classes()
        angles = []
        for cls in classes:
            start = cls[0]
            angles.append(self._walk_angle(start))
        return angles

    def _germ_direction(self, p, i, k):
        s = self.slit(p, i)
        if s.kind == "ray":
            return s.dir
        return s.vec if k == 0 else v_neg(s.vec)

    def _germs_at(self, p, pos):
        out = []
        for i, s in enumerate(self.planes[p]):
            for k, epos in s.endpoints():
                if epos[0] == pos[0] and epos[1] == pos[1]:
                    out.append((i, k))
        return out

    def _walk_angle(self, start_germ):
        p, i, k = start_germ
        _, pos0 = self.slit(p, i).endpoints()[k]
        u = self._germ_direction(p, i, k)
        state = (p, i, k)
        turns = 0
        visited = 0
        limit = 4 * sum(len(s) for s in self.planes) * 2 + 4
        while True:
            p, i, k = state
            _, pos = self.slit(p, i).endpoints()[k]
            g = self._germ_direction(p, i, k)
            candidates = [(ii, kk) for (ii, kk) in self._germs_at(p, pos)]
            nxt = _next_germ_ccw(
                g, [(c, self._germ_direction(p, c[0], c[1])) for c in candidates],
                (i, k))
            (ni, nk), ndir = nxt
            if _dir_eq(ndir, g) and (ni, nk) == (i, k):
                turns += 1                      # full revolution, single germ
            else:
                if _dir_eq(u, ndir):
                    turns += 1
                elif not _dir_eq(u, g) and _strictly_ccw_between_dirs(g, ndir, u):
                    turns += 1
            out_side = LOWER if nk == 0 else UPPER
            partner, _ = self.translation((p, ni, out_side))
            if partner is None:
                return None                     # truncation boundary reached
            q, j, _ = partner
            state = (q, j, nk)
            if state == start_germ:
                return turns
            visited += 1
            if visited > limit:
                return None                     # does not close: infinite angle

    def __repr__(self):
        return (f"SlitAtlas({len(self.planes)} planes, "
                f"{sum(len(s) for s in self.planes)} slits)")


def _dir_eq(a, b):
    return cross(a, b).is_zero() and dot(a, b).sign() > 0


def _strictly_ccw_between_dirs(a, b, u):
    c_ab = cross(a, b).sign()
    if c_ab == 0 and dot(a, b).sign() > 0:
        return False
    if c_ab > 0:
        return cross(a, u).sign() > 0 and cross(u, b).sign() > 0
    if c_ab == 0:
        return cross(a, u).sign() > 0
    return not (cross(b, u).sign() > 0 and cross(u, a).sign() > 0)


def _next_germ_ccw(g, germ_dirs, self_key):
    """The germ reached first sweeping CCW from direction g (exclusive);
    wraps to the same germ after a full turn when alone."""
    best = None
    for key, d in germ_dirs:
        if key == self_key and _dir_eq(d, g):
            continue
        if _dir_eq(d, g):
            # another germ pointing exactly the same way would overlap
            continue
        if best is None:
            best = (key, d)
            continue
        if _ccw_angle_less(g, d, best[1]):
            best = (key, d)
    if best is None:
        return (self_key, g)
    return best


def _ccw_angle_less(g, d1, d2):
    """Is the CCW angle from g to d1 strictly less than from g to d2?"""
    h1 = _half_index(g, d1)
    h2 = _half_index(g, d2)
    if h1 != h2:
        return h1 < h2
    return cross(d1, d2).sign() > 0


def _half_index(g, d):
    c = cross(g, d).sign()
    if c > 0:
        return 0              # in (0, pi)
    if c == 0:
        return 1 if dot(g, d).sign() < 0 else 3   # exactly pi (or 2pi: excluded)
    return 2                  # in (pi, 2pi)


def validate(a: SlitAtlas) -> SlitAtlas:
    return SlitAtlas(a.tower, a.planes, _gluing_pairs(a), window=a.window)


def _gluing_pairs(a: SlitAtlas):
    pairs = []
    seen = set()
    for k, v in a.gluing.items():
        if k in seen or v in seen:
            continue
        seen.add(k)
        seen.add(v)
        pairs.append((k, v))
    return pairs


# ---------------------------------------------------------------------------
# slit disjointness
# ---------------------------------------------------------------------------

def _param_range(slit):
    """Parameter range of slit points p0 + u*vec."""
    if slit.kind == "segment":
        return (Fraction(0), Fraction(1))
    return (Fraction(0), None)     # ray: u >= 0


def _slits_conflict(s1: Slit, s2: Slit) -> bool:
    """Do two slits of one plane intersect beyond a shared endpoint?"""
    d1, d2 = s1.vec, s2.vec
    base = v_sub(s2.p0, s1.p0)
    den = cross(d1, d2)
    s1_ends = {vec_key(pos) for _, pos in s1.endpoints()}
    s2_ends = {vec_key(pos) for _, pos in s2.endpoints()}
    if not den.is_zero():
        u1 = cross(base, d2) / den
        u2 = cross(base, d1) / den
        if not _in_range(u1, s1) or not _in_range(u2, s2):
            return False
        pt = v_add(s1.p0, (d1[0] * u1, d1[1] * u1))
        return not (vec_key(pt) in s1_ends and vec_key(pt) in s2_ends)
    if not cross(base, d1).is_zero():
        return False               # parallel, different lines
    # collinear: overlap of parameter intervals along d1
    rat = s1.p0[0].tower.rational
    t0 = dot(base, d1) / norm2(d1)
    scale = dot(d2, d1) / norm2(d1)
    lo2, hi2 = _param_range(s2)
    if scale.sign() > 0:
        a = t0 + lo2 * scale
        b = None if hi2 is None else t0 + hi2 * scale    # None = +infinity
    else:
        b = t0 + lo2 * scale
        a = None if hi2 is None else t0 + hi2 * scale    # None = -infinity
    lo1_f, hi1_f = _param_range(s1)
    lo1 = rat(lo1_f)
    hi1 = None if hi1_f is None else rat(hi1_f)
    lo = lo1 if a is None else (a if (a - lo1).sign() > 0 else lo1)
    if hi1 is None:
        hi = b
    elif b is None:
        hi = hi1
    else:
        hi = b if (b - hi1).sign() < 0 else hi1
    if hi is None:
        return True                # overlap is an unbounded ray
    cmp = (hi - lo).sign()
    if cmp < 0:
        return False
    if cmp > 0:
        return True                # positive-length overlap
    pt = v_add(s1.p0, (d1[0] * lo, d1[1] * lo))
    return not (vec_key(pt) in s1_ends and vec_key(pt) in s2_ends)


def _in_range(u, slit) -> bool:
    lo, hi = _param_range(slit)
    if (u - lo).sign() < 0:
        return False
    if hi is not None and (u - hi).sign() > 0:
        return False
    return True


# ---------------------------------------------------------------------------
# exact ray tracing
# ---------------------------------------------------------------------------

def _ray_slit_first_touch(x, d, slit: Slit):
    """Earliest parameter s > 0 where x + s*d meets the closed slit.

    Returns (s, endpoint_index_or_None); endpoint index is set when the
    touch point is a slit endpoint.  None if the open ray misses the slit.
    """
    e = slit.vec
    base = v_sub(slit.p0, x)
    den = cross(d, e)
    if not den.is_zero():
        s = cross(base, e) / den
        if s.sign() <= 0:
            return None
        u = cross(base, d) / den
        if not _in_range(u, slit):
            return None
        if u.is_zero():
            return (s, 0)
        if slit.kind == "segment" and (u - 1).is_zero():
            return (s, 1)
        return (s, None)
    if not cross(base, d).is_zero():
        return None
    # collinear: the first endpoint strictly ahead is the touch point
    dd = norm2(d)
    best = None
    for k, pos in slit.endpoints():
        s = dot(v_sub(pos, x), d) / dd
        if s.sign() > 0 and (best is None or (s - best[0]).sign() < 0):
            best = (s, k)
    return best


def _window_exit(start_dev, d, window):
    """Parameter where the developed line leaves the axis box, or None."""
    (lo_x, lo_y), (hi_x, hi_y) = window
    s_exit = None
    for coord, lo, hi in ((0, lo_x, hi_x), (1, lo_y, hi_y)):
        di = d[coord]
        if di.is_zero():
            continue
        target = hi if di.sign() > 0 else lo
        s = (target - start_dev[coord]) / di
        if s.sign() >= 0 and (s_exit is None or (s - s_exit).sign() < 0):
            s_exit = s
    return s_exit


def trace_ray(atlas: SlitAtlas, plane: int, start, direction,
              max_crossings: int, window=None) -> TraceResult:
    """Follow the developed straight line from a chart point.

    The start must not lie in the interior of a slit (endpoints are fine).
    Crossing an unglued lip counts as leaving the represented window, since
    a partially glued atlas is a truncation of a larger surface.
    """
    if direction[0].is_zero() and direction[1].is_zero():
        raise ConstraintViolation("direction must be nonzero")
    window = window if window is not None else atlas.window
    if window is None:
        raise ConstraintViolation("a window is required (atlas has no default)")
    for i, s in enumerate(atlas.planes[plane]):
        touch = _point_on_slit(start, s)
        if touch == "interior":
            raise ConstraintViolation("trace starts in the interior of a slit")
    d = tuple(direction)
    p = plane
    x = tuple(start)
    offset = (start[0] - start[0], start[1] - start[1])   # zero vector
    start_dev = x
    crossings = []
    just_crossed = None
    for _ in range(max_crossings + 1):
        best = None
        for i, s in enumerate(atlas.planes[p]):
            touch = _ray_slit_first_touch(x, d, s)
            if touch is None:
                continue
            s_par, endpoint = touch
            if just_crossed == i and endpoint is None:
                # standing exactly on this slit after the jump
                if s_par.is_zero():
                    continue
            if best is None or (s_par - best[0]).sign() < 0:
                best = (s_par, i, endpoint)
            elif (s_par - best[0]).is_zero() and endpoint is not None:
                best = (s_par, i, endpoint)
        dev_here = v_add(x, offset)
        s_exit = _window_exit(dev_here, d, window)
        if best is None or (s_exit is not None
                            and (s_exit - best[0]).sign() < 0):
            if s_exit is None:
                s_exit = dev_here[0] - dev_here[0]   # zero: already outside
            end_dev = v_add(dev_here, (d[0] * s_exit, d[1] * s_exit))
            return TraceResult(crossings, end_dev, "escaped-window",
                               end_plane=p,
                               end_point=v_add(x, (d[0] * s_exit, d[1] * s_exit)))
        s_par, i, endpoint = best
        hit = v_add(x, (d[0] * s_par, d[1] * s_par))
        if endpoint is not None:
            end_dev = v_add(hit, offset)
            return TraceResult(crossings, end_dev, "hit-singularity",
                               end_plane=p, end_point=hit,
                               end_class=atlas.class_of_position(p, hit))
        slit = atlas.slit(p, i)
        side = UPPER if cross(slit.vec, d).sign() < 0 else LOWER
        partner, tau = atlas.translation((p, i, side))
        if partner is None:
            end_dev = v_add(hit, offset)
            return TraceResult(crossings, end_dev, "escaped-window",
                               end_plane=p, end_point=hit)
        crossings.append((p, i, side))
        q, j, _ = partner
        x = v_add(hit, tau)
        offset = v_sub(offset, tau)
        p = q
        just_crossed = j
    end_dev = v_add(x, offset)
    return TraceResult(crossings, end_dev, "max-crossings",
                       end_plane=p, end_point=x)


def _point_on_slit(pt, slit: Slit):
    """'interior', 'endpoint' or None (division-free)."""
    rel = v_sub(pt, slit.p0)
    if not cross(rel, slit.vec).is_zero():
        return None
    t = dot(rel, slit.vec)            # u scaled by |vec|^2
    st = t.sign()
    if st < 0:
        return None
    if st == 0:
        return "endpoint"
    if slit.kind == "segment":
        over = (t - norm2(slit.vec)).sign()
        if over > 0:
            return None
        if over == 0:
            return "endpoint"
    return "interior"


# ---------------------------------------------------------------------------
# windowed saddle connections and holonomy modules
# ---------------------------------------------------------------------------

def _reachable_chart_offsets(atlas: SlitAtlas, start_plane: int,
                             max_crossings: int):
    """(plane, developed offset) nodes reachable within the crossing budget.

    Over-approximates geometric reachability (good enough for candidate
    generation; every candidate is validated by an exact trace).
    """
    zero = atlas.tower.zero()
    root = (start_plane, (zero, zero))
    nodes = {(start_plane, vec_key(root[1])): root}
    frontier = [root]
    for _ in range(max_crossings):
        new_frontier = []
        for p, off in frontier:
            for i in range(len(atlas.planes[p])):
                for side in (UPPER, LOWER):
                    partner, tau = atlas.translation((p, i, side))
                    if partner is None:
                        continue
                    q = partner[0]
                    off2 = v_sub(off, tau)
                    key = (q, vec_key(off2))
                    if key not in nodes:
                        nodes[key] = (q, off2)
                        new_frontier.append((q, off2))
        frontier = new_frontier
        if not frontier:
            break
    return list(nodes.values())


def _search_details(atlas: SlitAtlas, bound, max_crossings):
    """Validated directed connections: (start_class, end_class, holonomy,
    crossing count, start germ key) tuples."""
    if bound.sign() <= 0:
        raise ConstraintViolation("length bound must be positive")
    bound2 = bound * bound
    details = []
    starts = atlas.endpoint_positions()
    by_plane = {}
    for tp, tpos in starts:
        by_plane.setdefault(tp, []).append(tpos)
    for sp, spos in starts:
        start_class = atlas.class_of_position(sp, spos)
        window = ((spos[0] - bound, spos[1] - bound),
                  (spos[0] + bound, spos[1] + bound))
        # candidate directions, deduplicated: the trace finds the first
        # singularity along a direction, so one trace per direction suffices
        directions = {}
        for q, off in _reachable_chart_offsets(atlas, sp, max_crossings):
            for tpos in by_plane.get(q, ()):
                dev = v_add(tpos, off)
                h = v_sub(dev, spos)
                if h[0].is_zero() and h[1].is_zero():
                    continue
                if (norm2(h) - bound2).sign() > 0:
                    continue
                directions.setdefault(_direction_key(h), h)
        for h in directions.values():
            res = trace_ray(atlas, sp, spos, h, max_crossings, window)
            if res.terminated != "hit-singularity":
                continue
            hol = v_sub(res.developed_endpoint, spos)
            if (norm2(hol) - bound2).sign() > 0:
                continue
            details.append((start_class, res.end_class, hol,
                            len(res.crossings), (sp, vec_key(spos))))
    return details


def _aggregate(bound, details) -> SaddleConnectionSet:
    seen = set()
    out = {}
    for a, b, hol, nc, sk in details:
        dedup = (sk, vec_key(hol))
        if dedup in seen:
            continue
        seen.add(dedup)
        k = (vec_key(hol), a, b)
        if k in out:
            v, m = out[k]
            out[k] = (v, m + 1)
        else:
            out[k] = (hol, 1)
    # windowed outputs always carry the truncation flag
    return SaddleConnectionSet(bound, out, truncated=True)


def saddle_connections_window(atlas: SlitAtlas, bound,
                              max_crossings: int) -> SaddleConnectionSet:
    """Saddle connections of length <= bound found within the crossing
    budget; complete for the budget and monotone in it (truncated output).

    Candidate holonomies are differences of developed singularity images
    over reachable chart offsets; each candidate is validated by an exact
    trace from every germ position of the start singularity.
    """
    return _aggregate(bound, _search_details(atlas, bound, max_crossings))


def holonomy_modules_window(atlas: SlitAtlas, bound, max_crossings: int):
    """(Lambda, Lambda0, stabilized): windowed holonomy modules.

    Lambda0 comes from the found saddle connections; Lambda from the cycle
    space of the singularity graph they form.  ``stabilized`` reports
    whether doubling both budget parameters changes either module's Q-span
    or Z-rank.  The doubled search runs once; the base set is its exact
    restriction to the base budget.
    """
    bound2 = bound * bound
    details_d = _search_details(atlas, bound * 2, max_crossings * 2)
    details = [d for d in details_d
               if d[3] <= max_crossings and (norm2(d[2]) - bound2).sign() <= 0]
    lam, lam0 = modules_from_connections(atlas, _aggregate(bound, details))
    lam_d, lam0_d = modules_from_connections(
        atlas, _aggregate(bound * 2, details_d))
    stabilized = (_same_span_and_rank(lam, lam_d)
                  and _same_span_and_rank(lam0, lam0_d))
    return lam, lam0, stabilized


def modules_from_connections(atlas: SlitAtlas, sc: SaddleConnectionSet):
    """(Lambda, Lambda0) from an already-computed connection set."""
    return _modules_from(atlas, sc)


def _direction_key(h):
    sx, sy = h[0].sign(), h[1].sign()
    if sx == 0:
        return (0, sy)
    return (sx, (h[1] / h[0]).key())


def _modules_from(atlas, sc: SaddleConnectionSet):
    lam0 = ModuleDesc([vec for vec, _ in sc.vectors])
    zero = atlas.tower.zero()
    edges = [(a, b, hol) for (hkey, a, b), (hol, _) in sorted(sc.records.items())
             if a is not None and b is not None]
    # developed positions from a spanning forest of the singularity graph;
    # every edge then contributes the cycle holonomy hol - (pos_b - pos_a)
    # (zero for forest edges, which ModuleDesc ignores)
    pos = {}
    for a, b, _ in edges:
        pos.setdefault(a, None)
        pos.setdefault(b, None)
    for cls in list(pos):
        if pos[cls] is not None:
            continue
        pos[cls] = (zero, zero)
        grown = True
        while grown:
            grown = False
            for a, b, hol in edges:
                if pos[a] is not None and pos[b] is None:
                    pos[b] = v_add(pos[a], hol)
                    grown = True
                elif pos[b] is not None and pos[a] is None:
                    pos[a] = v_sub(pos[b], hol)
                    grown = True
    cycles = [v_sub(hol, v_sub(pos[b], pos[a])) for a, b, hol in edges]
    lam = ModuleDesc(cycles)
    return lam, lam0


def _same_span_and_rank(m1: ModuleDesc, m2: ModuleDesc) -> bool:
    if m1.rank_over_z != m2.rank_over_z:
        return False
    return all(_in_q_span(m1, g) for g in m2.generators)


def _in_q_span(m: ModuleDesc, v) -> bool:
    from .zmodule import q_coordinate_rows
    from . import linalg
    gens = [g for g in m.generators]
    if not gens:
        return v[0].is_zero() and v[1].is_zero()
    flat = []
    for g in gens:
        flat.extend(g)
    flat.extend(v)
    rows = q_coordinate_rows(flat)
    gen_rows = [rows[2 * i] + rows[2 * i + 1] for i in range(len(gens))]
    v_row = rows[-2] + rows[-1]
    cols = [[gen_rows[i][j] for i in range(len(gen_rows))]
            for j in range(len(v_row))]
    return linalg.solve(cols, v_row) is not None
