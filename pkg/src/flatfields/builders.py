"""Parameterized constructors for the benchmark surfaces.

Each builder returns a validated object (Origami, PolygonComplex or
SlitAtlas) together with an ``expected`` record of independently checkable
invariants (cone angles, module ranks, field verdicts) consumed by the test
harness and emitted by the CLI.
"""

from __future__ import annotations

from fractions import Fraction

from .atlas import LOWER, UPPER, Slit, SlitAtlas
from .errors import ConstraintViolation, SlopeRational
from .origami import Origami
from .surface import PolygonComplex
from .tower import FieldTower
from .zmodule import ModuleDesc


class BuilderRecipe:
    """A built object plus its expected-invariants record."""

    def __init__(self, name, parameters, obj, expected):
        self.name = name
        self.parameters = parameters
        self.obj = obj
        self.expected = expected

    def __repr__(self):
        return f"BuilderRecipe({self.name}, {self.parameters})"


def build_three_plane_sqrtp(p: int) -> BuilderRecipe:
    """Three planes glued along slits so the cross-ratio field stays Q while
    the saddle-connection field picks up sqrt(p).

    Plane 0 carries unit slits at heights 0 and 1; planes 1 and 2 carry a
    unit slit at the origin and a slit of length sqrt(p) starting at (2,0).
    Gluing is crosswise: v_i ~ w_i and z_0 ~ z_1.
    """
    if p < 2 or any(p % k == 0 for k in range(2, p)):
        raise ConstraintViolation("p must be prime")
    tower = FieldTower.with_sqrt(p)
    rt = tower.algebraic_gen(0)
    r = tower.rational

    def pt(x, y):
        return (r(x) if not hasattr(x, "tower") else x,
                r(y) if not hasattr(y, "tower") else y)

    v0 = Slit("segment", pt(0, 0), pt(1, 0))
    v1 = Slit("segment", pt(0, 1), pt(1, 1))
    w0 = Slit("segment", pt(0, 0), pt(1, 0))
    w1 = Slit("segment", pt(0, 0), pt(1, 0))
    z0 = Slit("segment", pt(2, 0), (r(2) + rt, r(0)))
    z1 = Slit("segment", pt(2, 0), (r(2) + rt, r(0)))
    planes = [[v0, v1], [w0, z0], [w1, z1]]

    def crosswise(a, b):
        return [((a[0], a[1], UPPER), (b[0], b[1], LOWER)),
                ((a[0], a[1], LOWER), (b[0], b[1], UPPER))]

    gluings = crosswise((0, 0), (1, 0)) + crosswise((0, 1), (2, 0)) \
        + crosswise((1, 1), (2, 1))
    atlas = SlitAtlas(tower, planes, gluings)
    expected = {
        "cone_point_turns": [2] * 6,
        "kcr": "Q",
        "ksc_contains_sqrt": p,
    }
    return BuilderRecipe("three-plane-sqrtp", {"p": p}, atlas, expected)


def build_glued_L_pair(eps, direction) -> BuilderRecipe:
    """Two 3-square L-shaped origami copies glued along a short mark.

    The mark runs from the corner singularity of each copy into the interior
    of its lower-left square, with displacement eps * direction; the slope
    of the direction must be irrational, which forces the saddle-connection
    and cross-ratio fields beyond Q while the absolute holonomy stays Z^2.
    """
    tower = direction[0].tower
    dx, dy = direction
    if dx.is_zero() or dy.is_zero():
        raise SlopeRational("mark direction must be off-axis")
    slope = dy / dx
    if slope.is_rational():
        raise SlopeRational(
            f"mark slope {slope} is rational; the construction needs an "
            f"irrational direction")
    r = tower.rational
    eps = eps if hasattr(eps, "tower") else r(eps)
    disp = (eps * dx, eps * dy)
    one = tower.one()
    if not (disp[0].sign() > 0 and (one - disp[0]).sign() > 0
            and disp[1].sign() > 0 and (one - disp[1]).sign() > 0):
        raise ConstraintViolation(
            "eps * direction must land strictly inside a unit square")
    z = tower.zero()
    a0, a1, a2, a3 = (z, z), (one, z), (one, one), (z, one)
    pm = (one - disp[0], one - disp[1])
    # per copy: square A fanned from the mark endpoint into four triangles,
    # then squares B (right) and C (top)
    tris = [
        [pm, a0, a1],      # T1
        [pm, a1, a2],      # T2
        [pm, a2, a3],      # T3
        [pm, a3, a0],      # T4
    ]
    square = [a0, a1, a2, a3]
    polygons = []
    for _ in range(2):
        polygons.extend([list(t) for t in tris])
        polygons.append(list(square))     # B
        polygons.append(list(square))     # C
    O = 6  # polygons per copy

    def idx(copy, j):
        return copy * O + j

    gluings = []
    for copy in range(2):
        T1, T2, T3, T4, B, C = (idx(copy, j) for j in range(6))
        # interior fan edges of A (the mark edge T2/T3 is cross-glued below)
        gluings.append(((T1, 0), (T4, 2)))   # p->a0 with a0->p
        gluings.append(((T1, 2), (T2, 0)))   # a1->p with p->a1
        gluings.append(((T3, 2), (T4, 0)))   # a3->p with p->a3
        # L-shape gluings: sigma_h = (A B), sigma_v = (A C)
        gluings.append(((T2, 1), (B, 3)))    # A right  ~ B left
        gluings.append(((B, 1), (T4, 1)))    # B right  ~ A left
        gluings.append(((T3, 1), (C, 0)))    # A top    ~ C bottom
        gluings.append(((C, 2), (T1, 1)))    # C top    ~ A bottom
        gluings.append(((B, 2), (B, 0)))     # B top    ~ B bottom
        gluings.append(((C, 1), (C, 3)))     # C right  ~ C left
    # cross-glue the mark lips between the two copies
    gluings.append(((idx(0, 1), 2), (idx(1, 2), 0)))   # L1.T2 a2->p ~ L2.T3 p->a2
    gluings.append(((idx(1, 1), 2), (idx(0, 2), 0)))
    complex_ = PolygonComplex(tower, polygons, gluings)
    expected = {
        "genus": 4,
        "lambda_is_z2": True,
        "khol": "Q",
        "ksc_not_q": True,
        "kcr_not_q": True,
    }
    return BuilderRecipe("glued-l-pair",
                         {"eps": str(eps), "dir": (str(dx), str(dy))},
                         complex_, expected)


def build_two_plane_mu(mu1, mu2, mu3) -> BuilderRecipe:
    """Two planes glued along four unit marks whose spacing involves three
    irrationals; the absolute holonomy module has rank 3, so the holonomy
    field exceeds Q while all slopes stay rational.

    Plane 0 carries marks at heights 0..3; plane 1 carries the same marks
    spread on the horizontal axis with gaps mu_1, mu_2, mu_3.
    """
    tower = mu1.tower
    one = tower.one()
    mus = [mu1, mu2, mu3]
    for m in mus:
        if (m - one).sign() <= 0:
            raise ConstraintViolation("each mu must exceed 1")
        if m.is_rational():
            raise ConstraintViolation("each mu must be irrational")
    c1 = (one + mu2, -one)
    c2 = (-(one + mu1), one)
    c3 = (-(one + mu3), one)
    if ModuleDesc([c1, c2, c3]).rank_over_z != 3:
        raise ConstraintViolation(
            "the three cycle holonomies must be Z-independent")
    z = tower.zero()
    r = tower.rational
    planes0 = []
    for n in range(4):
        planes0.append(Slit("segment", (z, r(n)), (one, r(n))))
    lam = [z, mu1, mu1 + mu2, mu1 + mu2 + mu3]
    planes1 = []
    for n in range(4):
        start = r(n) + lam[n]
        planes1.append(Slit("segment", (start, z), (start + 1, z)))
    gluings = []
    for n in range(4):
        gluings.append(((0, n, UPPER), (1, n, LOWER)))
        gluings.append(((0, n, LOWER), (1, n, UPPER)))
    atlas = SlitAtlas(tower, [planes0, planes1], gluings)
    expected = {
        "cone_point_turns": [2] * 8,
        "cycle_holonomies": [c1, c2, c3],
        "lambda_rank": 3,
        "kcr": "Q",
        "khol_not_q": True,
    }
    return BuilderRecipe("two-plane-mu",
                         {"mu": tuple(str(m) for m in mus)}, atlas, expected)


def build_staircase(lam, n: int, k_range) -> BuilderRecipe:
    """Stack of planes slit along rays scaled by the diagonal matrix
    diag(lam, n*lam); the truncation covers the given range of levels.

    Level k is slit along a vertical ray up from (0, (n*lam)^k) and a
    horizontal ray right from (lam^k, 0); consecutive levels are glued
    lower lip to upper lip along both rays.  All holonomy slopes are
    rational while the trace (n+1)*lam of the defining matrix is not.
    """
    tower = lam.tower
    one = tower.one()
    if not (lam.sign() > 0 and (one - lam).sign() > 0):
        raise ConstraintViolation("need 0 < lam < 1")
    if lam.is_rational():
        raise ConstraintViolation("lam must be irrational")
    nlam = n * lam
    if (nlam - one).sign() <= 0:
        raise ConstraintViolation("need n * lam > 1")
    kmin, kmax = k_range
    if kmin > kmax:
        raise ConstraintViolation("empty level range")
    z = tower.zero()
    planes = []
    levels = list(range(kmin, kmax + 1))
    for k in levels:
        v_base = (z, nlam ** k)
        h_base = (lam ** k, z)
        planes.append([
            Slit("ray", v_base, direction=(z, one)),
            Slit("ray", h_base, direction=(one, z)),
        ])
    gluings = []
    for i, k in enumerate(levels[:-1]):
        # right lip of level k's vertical ray to left lip of level k+1's;
        # bottom lip of the horizontal ray to the next top lip
        gluings.append(((i, 0, LOWER), (i + 1, 0, UPPER)))
        gluings.append(((i, 1, LOWER), (i + 1, 1, UPPER)))
    atlas = SlitAtlas(tower, planes, gluings)
    expected = {
        "holonomy_vectors": [(-(lam ** k), nlam ** k) for k in levels],
        "kcr": "Q",
        "trace": (n + 1) * lam,
    }
    return BuilderRecipe("staircase",
                         {"lam": str(lam), "n": n, "k_range": (kmin, kmax)},
                         atlas, expected)


def build_L_origami() -> BuilderRecipe:
    """The L-shaped origami tiled by 3 unit squares (two in the bottom row,
    one stacked on the left)."""
    o = Origami([1, 0, 2], [2, 1, 0])
    expected = {
        "cone_angle_turns": [3],
        "genus": 2,
        "detects_as_origami": True,
    }
    return BuilderRecipe("l-origami", {}, o, expected)


def build_cross_ratio_quadruple(alpha, N: int) -> BuilderRecipe:
    """Four pairwise non-parallel vectors whose cross ratio is
    alpha / (alpha + N)."""
    tower = alpha.tower
    one, z = tower.one(), tower.zero()
    vecs = [(-one, one), (z, one), (one, z), (alpha, tower.rational(N))]
    expected = {"cross_ratio": alpha / (alpha + N)}
    return BuilderRecipe("cross-ratio-quadruple",
                         {"alpha": str(alpha), "N": N}, vecs, expected)


def make_crosswise_pair(tower, p0, p1) -> SlitAtlas:
    """Two planes with one congruent slit each, glued crosswise: the basic
    two-sheet construction with 4*pi cone points at both slit endpoints."""
    s0 = Slit("segment", p0, p1)
    s1 = Slit("segment", p0, p1)
    return SlitAtlas(tower, [[s0], [s1]], [
        ((0, 0, UPPER), (1, 0, LOWER)),
        ((0, 0, LOWER), (1, 0, UPPER)),
    ])
