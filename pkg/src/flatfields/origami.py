"""Square-tiled surfaces as permutation pairs.

An origami on n unit squares is a pair of permutations (sigma_h, sigma_v) of
{1..n}: sigma_h sends each square to its right neighbor, sigma_v to its top
neighbor, and the pair must act transitively (connected surface).  Squares
are 0-indexed internally; the text/JSON interfaces are 1-based.

Two origamis describe the same surface iff the pairs are simultaneously
conjugate (a relabeling of squares); :func:`canonical_form` computes the
lexicographically minimal relabeling over BFS orders from every base square,
so equality of canonical forms decides equivalence.

The SL(2,Z) action is implemented through fixed lifts to Aut(F2):

    T: x -> x,     y -> yx        (matrix [[1,1],[0,1]])
    S: x -> y^-1,  y -> x         (matrix [[0,1],[-1,0]])

Any lift with the right abelianization induces the same action on
equivalence classes, since inner automorphisms act trivially.  The Veech
group of an origami is the stabilizer of its class; it is computed by a BFS
orbit enumeration with Schreier generators.
"""

from __future__ import annotations

import random
from fractions import Fraction

from .errors import (MalformedPermutation, NotConnected, OrbitCapExceeded,
                     ParseError)

GEN_MATRICES = {
    "S": ((0, 1), (-1, 0)),
    "T": ((1, 1), (0, 1)),
    "s": ((0, -1), (1, 0)),
    "t": ((1, -1), (0, 1)),
}


def mat_mul(a, b):
    return (
        (a[0][0] * b[0][0] + a[0][1] * b[1][0],
         a[0][0] * b[0][1] + a[0][1] * b[1][1]),
        (a[1][0] * b[0][0] + a[1][1] * b[1][0],
         a[1][0] * b[0][1] + a[1][1] * b[1][1]),
    )


def word_matrix(word):
    """Matrix of a generator word, factors applied left to right."""
    m = ((1, 0), (0, 1))
    for g in word:
        m = mat_mul(m, GEN_MATRICES[g])
    return m


def invert_word(word):
    return "".join(g.swapcase() for g in reversed(word))


def reduce_word(word):
    out = []
    for g in word:
        if out and out[-1] == g.swapcase():
            out.pop()
        else:
            out.append(g)
    return "".join(out)


def _perm_inverse(p):
    inv = [0] * len(p)
    for i, j in enumerate(p):
        inv[j] = i
    return tuple(inv)


def _check_perm(p, n):
    if len(p) != n or sorted(p) != list(range(n)):
        raise MalformedPermutation(f"not a permutation of 0..{n - 1}: {p}")


class Origami:
    """A connected square-tiled surface given by its permutation pair."""

    __slots__ = ("n", "sigma_h", "sigma_v")

    def __init__(self, sigma_h, sigma_v, check=True):
        self.sigma_h = tuple(sigma_h)
        self.sigma_v = tuple(sigma_v)
        self.n = len(self.sigma_h)
        if check:
            if self.n < 1:
                raise MalformedPermutation("need at least one square")
            _check_perm(self.sigma_h, self.n)
            _check_perm(self.sigma_v, self.n)
            if not self._is_transitive():
                raise NotConnected(
                    "permutation pair does not act transitively; "
                    "the glued surface is disconnected")

    def _is_transitive(self):
        seen = {0}
        stack = [0]
        hi = _perm_inverse(self.sigma_h)
        vi = _perm_inverse(self.sigma_v)
        while stack:
            i = stack.pop()
            for p in (self.sigma_h, self.sigma_v, hi, vi):
                j = p[i]
                if j not in seen:
                    seen.add(j)
                    stack.append(j)
        return len(seen) == self.n

    def key(self):
        return (self.n, self.sigma_h, self.sigma_v)

    def __eq__(self, other):
        return isinstance(other, Origami) and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def __repr__(self):
        return f"Origami(h={_cycles_str(self.sigma_h)}, v={_cycles_str(self.sigma_v)})"


def validate(o: Origami) -> Origami:
    """Re-run all structural checks; returns the checked origami."""
    return Origami(o.sigma_h, o.sigma_v, check=True)


def canonical_form(o: Origami) -> Origami:
    """Lexicographically minimal relabeling over BFS from every base square.

    Relabelings are exactly the simultaneous conjugations of the pair, so
    canonical forms coincide iff the origamis are equivalent.
    """
    n = o.n
    hi = _perm_inverse(o.sigma_h)
    vi = _perm_inverse(o.sigma_v)
    perms = (o.sigma_h, o.sigma_v, hi, vi)
    best = None
    for start in range(n):
        label = [-1] * n
        label[start] = 0
        order = [start]
        head = 0
        while head < len(order):
            i = order[head]
            head += 1
            for p in perms:
                j = p[i]
                if label[j] < 0:
                    label[j] = len(order)
                    order.append(j)
        new_h = tuple(label[o.sigma_h[i]] for i in order)
        new_v = tuple(label[o.sigma_v[i]] for i in order)
        cand = (new_h, new_v)
        if best is None or cand < best:
            best = cand
    return Origami(best[0], best[1], check=False)


class StratumDesc:
    """Vertex data of a square-tiled surface.

    ``cycles`` are the cycle lengths of the commutator
    c = sigma_h sigma_v sigma_h^-1 sigma_v^-1 acting on squares (right
    action); a length-l cycle is a point of cone angle 2*pi*l.
    """

    def __init__(self, cycles, genus):
        self.cycles = sorted(cycles, reverse=True)
        self.genus = genus

    @property
    def cone_points(self):
        return [(l, 2 * l) for l in self.cycles if l >= 2]  # angle in units of pi

    @property
    def marked_regular_points(self):
        return sum(1 for l in self.cycles if l == 1)

    def angle_multiset(self):
        return tuple(self.cycles)

    def __repr__(self):
        return f"StratumDesc(cycles={self.cycles}, genus={self.genus})"


def stratum(o: Origami) -> StratumDesc:
    """Cone-point cycles and genus from the commutator of the pair."""
    n = o.n
    hi = _perm_inverse(o.sigma_h)
    vi = _perm_inverse(o.sigma_v)
    comm = tuple(vi[hi[o.sigma_v[o.sigma_h[i]]]] for i in range(n))
    seen = [False] * n
    cycles = []
    for i in range(n):
        if seen[i]:
            continue
        length = 0
        j = i
        while not seen[j]:
            seen[j] = True
            j = comm[j]
            length += 1
        cycles.append(length)
    v = len(cycles)
    genus = (2 - v + n) // 2
    assert (2 - v + n) % 2 == 0
    assert sum(l - 1 for l in cycles) == 2 * genus - 2
    return StratumDesc(cycles, genus)


def sl2z_act(gen: str, o: Origami) -> Origami:
    """Apply one generator of SL(2,Z) (S, T, or lowercase inverses).

    The permutation pair is a representation rho of F2 with rho(x)=sigma_h,
    rho(y)=sigma_v; acting by a matrix precomposes rho with the fixed lift,
    then re-canonicalizes.
    """
    h, v = o.sigma_h, o.sigma_v
    if gen == "T":          # x -> x, y -> yx
        new = (h, tuple(h[v[i]] for i in range(o.n)))
    elif gen == "t":        # x -> x, y -> y x^-1
        hi = _perm_inverse(h)
        new = (h, tuple(hi[v[i]] for i in range(o.n)))
    elif gen == "S":        # x -> y^-1, y -> x
        new = (_perm_inverse(v), h)
    elif gen == "s":        # x -> y, y -> x^-1
        new = (v, _perm_inverse(h))
    else:
        raise ParseError(f"unknown generator {gen!r}")
    return canonical_form(Origami(new[0], new[1], check=False))


def apply_word(word: str, o: Origami) -> Origami:
    """Apply a word over S,T,s,t, leftmost generator first."""
    cur = canonical_form(o)
    for g in word:
        cur = sl2z_act(g, cur)
    return cur


class VeechGroupDesc:
    """Stabilizer description from the orbit enumeration."""

    def __init__(self, orbit_size, generators, coset_representatives,
                 contains_minus_identity):
        self.orbit_size = orbit_size
        self.generators = generators    # list of (word, matrix)
        self.coset_representatives = coset_representatives
        self.contains_minus_identity = contains_minus_identity

    def __repr__(self):
        return (f"VeechGroupDesc(index={self.orbit_size}, "
                f"{len(self.generators)} generators)")


GENERATOR_ORDER = ("S", "T", "s", "t")


def veech_group(o: Origami, orbit_cap: int = 100000) -> VeechGroupDesc:
    """Veech group of a square-tiled surface as an orbit stabilizer.

    BFS over canonical forms under S, T and inverses; Schreier words for the
    orbit double as coset representatives, and the Schreier generators of
    the stabilizer are returned with their integer matrices.  Raises
    OrbitCapExceeded if the orbit grows past ``orbit_cap``.
    """
    root = canonical_form(o)
    words = {root.key(): ""}
    nodes = {root.key(): root}
    queue = [root.key()]
    edges = []
    while queue:
        key = queue.pop(0)
        cur = nodes[key]
        for g in GENERATOR_ORDER:
            img = sl2z_act(g, cur)
            ik = img.key()
            if ik not in words:
                if len(words) >= orbit_cap:
                    raise OrbitCapExceeded(
                        f"orbit exceeded cap of {orbit_cap}")
                words[ik] = words[key] + g
                nodes[ik] = img
                queue.append(ik)
            edges.append((key, g, ik))

    gens = []
    seen_words = set()
    for key, g, ik in edges:
        word = reduce_word(words[key] + g + invert_word(words[ik]))
        if word and word not in seen_words:
            seen_words.add(word)
            gens.append((word, word_matrix(word)))

    minus_identity = apply_word("SS", root) == root
    return VeechGroupDesc(
        orbit_size=len(words),
        generators=gens,
        coset_representatives=[words[k] for k in sorted(words, key=lambda k: (len(words[k]), words[k]))],
        contains_minus_identity=minus_identity,
    )


def stabilizes(word: str, o: Origami) -> bool:
    root = canonical_form(o)
    return apply_word(word, root) == root


def to_surface(o: Origami):
    """The square-tiled polygon complex of the origami.

    Each square is a unit square in its own chart; right and top edges are
    glued by sigma_h and sigma_v.  All vertex classes belong to the
    singularity set: regular classes are marked (the covering is branched
    over a single point, which every square corner hits).
    """
    from .surface import PolygonComplex
    from .tower import FieldTower
    tower = FieldTower.rationals()
    z, one = tower.zero(), tower.one()
    square = [(z, z), (one, z), (one, one), (z, one)]
    polygons = [list(square) for _ in range(o.n)]
    gluings = []
    for i in range(o.n):
        gluings.append(((i, 1), (o.sigma_h[i], 3)))   # right edge -> left edge
        gluings.append(((i, 2), (o.sigma_v[i], 0)))   # top edge -> bottom edge
    complex_ = PolygonComplex(tower, polygons, gluings, marked_all=True)
    return complex_


def random_origami(rng: random.Random, n: int) -> Origami:
    """Uniform-ish random connected origami with n squares (rejection)."""
    while True:
        h = list(range(n))
        v = list(range(n))
        rng.shuffle(h)
        rng.shuffle(v)
        try:
            return Origami(h, v)
        except NotConnected:
            continue


# -- text notation -----------------------------------------------------------

def _cycles_str(p):
    n = len(p)
    seen = [False] * n
    parts = []
    for i in range(n):
        if seen[i]:
            continue
        cyc = [i]
        seen[i] = True
        j = p[i]
        while j != i:
            seen[j] = True
            cyc.append(j)
            j = p[j]
        if len(cyc) > 1:
            parts.append("(" + " ".join(str(x + 1) for x in cyc) + ")")
    return "".join(parts) if parts else "()"


def parse_permutation(text: str, n: int):
    """Parse 1-based cycle notation like "(1 2)(3 4)" or a one-line list."""
    text = text.strip()
    if text.startswith("("):
        p = list(range(n))
        depth_content = []
        for chunk in text.replace("(", " ( ").replace(")", " ) ").split():
            if chunk == "(":
                depth_content = []
            elif chunk == ")":
                cyc = [int(x) - 1 for x in depth_content]
                if any(not 0 <= x < n for x in cyc):
                    raise ParseError(f"cycle entry out of range in {text!r}")
                for a, b in zip(cyc, cyc[1:] + cyc[:1]):
                    p[a] = b
            else:
                depth_content.extend(chunk.replace(",", " ").split())
        return tuple(p)
    items = [int(x) - 1 for x in text.replace(",", " ").split()]
    if len(items) != n:
        raise ParseError(f"expected {n} images, got {len(items)}")
    return tuple(items)
