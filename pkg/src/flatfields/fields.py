"""The four arithmetic invariants of a translation surface.

Given exact holonomy data this module computes the holonomy field (from the
absolute module), the saddle-connection field (same recipe on the relative
module), the cross-ratio field (from the slopes of saddle connections) and
the trace field (from Veech group generators), together with the containment
relations among them.

All four are :class:`flatfields.subfield.SubfieldDesc` values over the
ambient tower and are compared by mutual membership of generators.
"""

from __future__ import annotations

from fractions import Fraction

from .errors import ConstraintViolation
from .plane import cross
from .subfield import SubfieldDesc, contains, is_member, same_field, subfield_generated
from .tower import FieldElem

INFINITY = "inf"


class SlopeSet:
    """Deduplicated slopes of a vector family; verticals give INFINITY."""

    def __init__(self, slopes):
        seen = set()
        self.slopes = []
        for s in slopes:
            key = INFINITY if s is INFINITY else s.key()
            if key not in seen:
                seen.add(key)
                self.slopes.append(s)

    @classmethod
    def from_vectors(cls, vectors):
        slopes = []
        for v in vectors:
            if v[0].is_zero():
                if v[1].is_zero():
                    continue
                slopes.append(INFINITY)
            else:
                slopes.append(v[1] / v[0])
        return cls(slopes)

    def __len__(self):
        return len(self.slopes)

    def sorted_slopes(self):
        """Infinity first, then increasing; the deterministic frame order."""
        finite = sorted((s for s in self.slopes if s is not INFINITY))
        inf = [s for s in self.slopes if s is INFINITY]
        return inf + finite

    def __repr__(self):
        names = ["inf" if s is INFINITY else str(s) for s in self.slopes]
        return f"SlopeSet({', '.join(names)})"


def cross_ratio(v1, v2, v3, v4) -> FieldElem:
    """Cross ratio of four pairwise non-parallel plane vectors.

    Computed as (r1-r3)(r2-r4) / ((r2-r3)(r1-r4)) on the slopes r_i = y/x;
    factors containing an infinite slope are eliminated.
    """
    vecs = [v1, v2, v3, v4]
    for i in range(4):
        for j in range(i + 1, 4):
            if cross(vecs[i], vecs[j]).is_zero():
                raise ConstraintViolation(
                    f"vectors {i + 1} and {j + 1} are parallel; "
                    f"cross ratio is degenerate")
    slopes = []
    for v in vecs:
        slopes.append(INFINITY if v[0].is_zero() else v[1] / v[0])
    r1, r2, r3, r4 = slopes

    def factor(a, b):
        if a is INFINITY or b is INFINITY:
            return None
        return a - b

    num = [factor(r1, r3), factor(r2, r4)]
    den = [factor(r2, r3), factor(r1, r4)]
    tower = next(v[0].tower for v in vecs)
    out = tower.one()
    for f in num:
        if f is not None:
            out = out * f
    for f in den:
        if f is not None:
            out = out / f
    return out


def mobius_normalize(slope_set: SlopeSet):
    """Images of the remaining slopes under the Mobius map sending the three
    lexicographically smallest slopes (infinity first) to (inf, 0, 1)."""
    ordered = slope_set.sorted_slopes()
    if len(ordered) < 4:
        raise ConstraintViolation("need at least 4 pairwise non-parallel slopes")
    s1, s2, s3 = ordered[:3]
    rest = ordered[3:]

    def mu(x):
        # (x - s2)(s3 - s1) / ((x - s1)(s3 - s2)), with infinite entries
        # eliminating their factors
        if x is INFINITY:
            num = [None, _sub(s3, s1)]
            den = [None, _sub(s3, s2)]
        else:
            num = [_sub(x, s2), _sub(s3, s1)]
            den = [_sub(x, s1), _sub(s3, s2)]
        tower = _tower_of(ordered)
        out = tower.one()
        for f in num:
            if f is not None:
                out = out * f
        for f in den:
            if f is not None:
                out = out / f
        return out

    return [mu(x) for x in rest]


def _sub(a, b):
    if a is INFINITY or b is INFINITY:
        return None
    return a - b


def _tower_of(slopes):
    for s in slopes:
        if s is not INFINITY:
            return s.tower
    raise ConstraintViolation("all slopes infinite")


class CrossRatioField:
    """Result of the cross-ratio field computation: a subfield or the
    explicit 'undefined' status when fewer than four slopes exist."""

    def __init__(self, field, undefined, slope_count):
        self.field = field
        self.undefined = undefined
        self.slope_count = slope_count

    def __repr__(self):
        if self.undefined:
            return f"CrossRatioField(undefined, {self.slope_count} slopes)"
        return f"CrossRatioField({self.field!r})"


def field_cr(slope_set: SlopeSet, tower=None) -> CrossRatioField:
    """Field of cross ratios: generated by the Mobius-normalized slopes.

    Needs at least four pairwise non-parallel directions; with fewer the
    result is the explicit 'undefined' status rather than an error.
    """
    if len(slope_set) < 4:
        return CrossRatioField(None, True, len(slope_set))
    images = mobius_normalize(slope_set)
    tower = images[0].tower
    gens = [g for g in images] or [tower.one()]
    return CrossRatioField(subfield_generated(gens), False, len(slope_set))


def field_cr_bruteforce(slope_set: SlopeSet) -> CrossRatioField:
    """Field generated by the cross ratios of all ordered 4-tuples; the
    independent oracle for :func:`field_cr` on small sets."""
    from itertools import permutations
    if len(slope_set) < 4:
        return CrossRatioField(None, True, len(slope_set))
    slopes = slope_set.slopes
    tower = _tower_of(slopes)
    values = []
    for quad in permutations(range(len(slopes)), 4):
        r = [slopes[i] for i in quad]
        val = _cross_ratio_of_slopes(tower, *r)
        values.append(val)
    return CrossRatioField(subfield_generated(values), False, len(slope_set))


def _cross_ratio_of_slopes(tower, r1, r2, r3, r4):
    num = [_sub(r1, r3), _sub(r2, r4)]
    den = [_sub(r2, r3), _sub(r1, r4)]
    out = tower.one()
    for f in num:
        if f is not None:
            out = out * f
    for f in den:
        if f is not None:
            out = out / f
    return out


def field_from_module(module) -> SubfieldDesc:
    """Coefficient field of a plane module in a basis of itself.

    With a two-dimensional real span, the first two non-parallel generators
    form the basis and the field is generated by all exact coordinates; with
    span one, by the ratios along one fixed generator; rank zero gives Q.
    """
    gens = [g for g in module.generators
            if not (g[0].is_zero() and g[1].is_zero())]
    if not gens:
        raise ConstraintViolation("empty module")
    tower = gens[0][0].tower
    if module.real_span_dim == 0:
        return subfield_generated([tower.one()])
    if module.real_span_dim == 1:
        e1 = gens[0]
        base = e1[0] if not e1[0].is_zero() else e1[1]
        coeffs = []
        for v in gens:
            comp = v[0] if not e1[0].is_zero() else v[1]
            coeffs.append(comp / base)
        return subfield_generated(coeffs)
    e1 = gens[0]
    e2 = next(v for v in gens[1:] if not cross(e1, v).is_zero())
    det = cross(e1, e2)
    coeffs = []
    for v in gens:
        coeffs.append(cross(v, e2) / det)
        coeffs.append(cross(e1, v) / det)
    return subfield_generated(coeffs)


def field_hol(module) -> SubfieldDesc:
    """Holonomy field: coefficient field of the absolute module."""
    return field_from_module(module)


def field_sc(module) -> SubfieldDesc:
    """Saddle-connection field: same recipe on the relative module."""
    return field_from_module(module)


class MatrixGroupGens:
    """Generators of a subgroup of GL+(2, R) with tower entries."""

    def __init__(self, generators):
        self.generators = [tuple(map(tuple, m)) for m in generators]
        for m in self.generators:
            det = m[0][0] * m[1][1] - m[0][1] * m[1][0]
            if det.sign() <= 0:
                raise ConstraintViolation("generator has non-positive determinant")

    def __len__(self):
        return len(self.generators)


def _mat_mul(a, b):
    return ((a[0][0] * b[0][0] + a[0][1] * b[1][0],
             a[0][0] * b[0][1] + a[0][1] * b[1][1]),
            (a[1][0] * b[0][0] + a[1][1] * b[1][0],
             a[1][0] * b[0][1] + a[1][1] * b[1][1]))


def trace_values(gens: MatrixGroupGens, word_len: int):
    """Traces of all products of generators of length <= word_len."""
    tower = gens.generators[0][0][0].tower
    one = ((tower.one(), tower.zero()), (tower.zero(), tower.one()))
    traces = []
    layer = [one]
    for _ in range(word_len):
        new_layer = []
        for m in layer:
            for g in gens.generators:
                prod = _mat_mul(m, g)
                new_layer.append(prod)
                traces.append(prod[0][0] + prod[1][1])
        layer = new_layer
    return traces


def field_tr(gens: MatrixGroupGens, word_len: int = 3) -> SubfieldDesc:
    """Trace field from products of generators up to the given length.

    Length three is the classical closure length for 2x2 trace algebras;
    randomized longer words are covered by the property suite.
    """
    if not gens.generators:
        raise ConstraintViolation("need at least one generator")
    return subfield_generated(trace_values(gens, word_len))


class ContainmentReport:
    def __init__(self, khol_in_ksc, kcr_in_ksc, ktr_in_khol, kcr_eq_ksc):
        self.khol_in_ksc = khol_in_ksc
        self.kcr_in_ksc = kcr_in_ksc
        self.ktr_in_khol = ktr_in_khol
        self.kcr_eq_ksc = kcr_eq_ksc

    def as_dict(self):
        return {
            "khol_in_ksc": self.khol_in_ksc,
            "kcr_in_ksc": self.kcr_in_ksc,
            "ktr_in_khol": self.ktr_in_khol,
            "kcr_eq_ksc": self.kcr_eq_ksc,
        }

    def __repr__(self):
        return f"ContainmentReport({self.as_dict()})"


def containments(ktr, khol, ksc, kcr, independent_hol_pair) -> ContainmentReport:
    """Containment booleans among the four fields.

    ``kcr`` may be a CrossRatioField with undefined status (entries become
    None); the trace containment is only asserted when two independent
    holonomy vectors exist.
    """
    kcr_field = kcr.field if isinstance(kcr, CrossRatioField) else kcr
    khol_in_ksc = contains(ksc, khol)
    kcr_in_ksc = None if kcr_field is None else contains(ksc, kcr_field)
    ktr_in_khol = None
    if independent_hol_pair and ktr is not None:
        ktr_in_khol = contains(khol, ktr)
    kcr_eq_ksc = None if kcr_field is None else same_field(kcr_field, ksc)
    return ContainmentReport(khol_in_ksc, kcr_in_ksc, ktr_in_khol, kcr_eq_ksc)
