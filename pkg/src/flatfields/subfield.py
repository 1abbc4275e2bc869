"""Subfields of a tower: minimal polynomials, primitive elements, membership.

A :class:`SubfieldDesc` records the smallest subfield of the ambient tower
containing Q and a given generator set.  The algebraic content is carried by
a primitive element (absent when it is just Q); transcendental generators of
the tower occurring in the input are reported as transcendence generators
and make the degree infinite.  The represented field is
Q(primitive)(transcendence generators); every input generator is a member.

Membership and containment are decided exactly by linear algebra over Q on
flattened coordinate vectors; subfields are compared by mutual membership of
generators, never by comparing primitive elements.
"""

from __future__ import annotations

from fractions import Fraction

from . import linalg
from . import multipoly as mp
from .errors import ConstraintViolation, TowerMismatch
from .tower import FieldElem, FieldTower

INFINITE = "infinite"


def _alg_value(elem: FieldElem):
    """Top-level algebraic value of an element with no transcendentals."""
    if not elem.is_algebraic():
        raise ConstraintViolation(
            "element involves a transcendental generator")
    ops = elem.tower.top_ops()
    num = mp.mp_const_value(ops, elem.num)
    den = mp.mp_const_value(ops, elem.den)
    return ops.div(num, den)


def minimal_polynomial(elem: FieldElem):
    """Monic minimal polynomial over Q of an algebraic element.

    Returned as a list of Fractions, constant term first.  Computed by exact
    linear algebra on the powers of the element; the least linear dependence
    is automatically irreducible.
    """
    tower = elem.tower
    level = len(tower.extensions)
    a = _alg_value(elem)
    return [Fraction(c) for c in tower._minpoly_q(level, a)]


def evaluate_qpoly(coeffs, elem: FieldElem) -> FieldElem:
    """Evaluate a Q[x] polynomial (constant first) at a field element."""
    acc = elem.tower.zero()
    for c in reversed(list(coeffs)):
        acc = acc * elem + Fraction(c)
    return acc


class SubfieldDesc:
    """Computed subfield Q(primitive)(transcendence generators)."""

    def __init__(self, tower: FieldTower, generators, primitive,
                 prim_minpoly, transcendence_generators):
        self.tower = tower
        self.generators = list(generators)
        self.primitive = primitive            # FieldElem or None (= Q)
        self.prim_minpoly = ([Fraction(c) for c in prim_minpoly]
                             if prim_minpoly is not None else None)
        self.transcendence_generators = tuple(transcendence_generators)
        self._power_matrix = None

    @property
    def algebraic_degree(self) -> int:
        """Degree over Q of the algebraic part."""
        if self.primitive is None:
            return 1
        return len(self.prim_minpoly) - 1

    @property
    def degree_over_q(self):
        if self.transcendence_generators:
            return INFINITE
        return self.algebraic_degree

    def is_rational_field(self) -> bool:
        return self.primitive is None and not self.transcendence_generators

    def _powers(self):
        """Flattened Q-coordinates of 1, prim, .., prim^(d-1) as columns."""
        if self._power_matrix is None:
            tower = self.tower
            level = len(tower.extensions)
            d = self.algebraic_degree
            if self.primitive is None:
                cols = [tower._aflatten(level, tower._aone(level))]
            else:
                p = _alg_value(self.primitive)
                power = tower._aone(level)
                cols = []
                for _ in range(d):
                    cols.append(tower._aflatten(level, power))
                    power = tower._amul(level, power, p)
            dim = tower.alg_dim(level)
            self._power_matrix = [[cols[j][i] for j in range(d)]
                                  for i in range(dim)]
        return self._power_matrix

    def _alg_member(self, a) -> bool:
        """Is a top-level algebraic value in Q(primitive)?"""
        tower = self.tower
        level = len(tower.extensions)
        return linalg.solve(self._powers(), tower._aflatten(level, a)) is not None

    def alg_coordinates(self, elem: FieldElem):
        """Coordinates of an algebraic member in the primitive power basis."""
        tower = self.tower
        level = len(tower.extensions)
        a = _alg_value(elem)
        return linalg.solve(self._powers(), tower._aflatten(level, a))

    def __contains__(self, elem: FieldElem) -> bool:
        return is_member(elem, self)

    def __repr__(self):
        alg = "Q" if self.primitive is None else f"Q({self.primitive})"
        if self.transcendence_generators:
            return f"SubfieldDesc({alg}({','.join(self.transcendence_generators)}))"
        return f"SubfieldDesc({alg}, degree {self.algebraic_degree})"


def is_member(elem: FieldElem, field: SubfieldDesc) -> bool:
    """Exact membership of an element in a described subfield.

    True iff the transcendentals occurring in the element are among the
    field's transcendence generators and every algebraic coefficient of the
    canonical fraction lies in the Q-span of the primitive element's powers.
    """
    if elem.tower.signature != field.tower.signature:
        raise TowerMismatch("element and subfield live over different towers")
    allowed = set(field.transcendence_generators)
    if any(name not in allowed for name in elem.transcendentals_used()):
        return False
    for poly in (elem.num, elem.den):
        for coeff in poly.values():
            if not field._alg_member(coeff):
                return False
    return True


def _coefficient_values(elem: FieldElem):
    """All algebraic-part coefficients of the canonical fraction."""
    return list(elem.num.values()) + list(elem.den.values())


def subfield_generated(gens) -> SubfieldDesc:
    """Smallest subfield of the tower containing Q and all generators.

    For algebraic input a primitive element is found by trying integer
    combinations g1 + c*g2 + c^2*g3 + ... with c = 1, 2, 3, ... until the
    Q-span of its powers contains every generator.  Transcendental tower
    generators occurring in the input become transcendence generators and
    the degree is reported as infinite.
    """
    gens = list(gens)
    if not gens:
        raise ConstraintViolation("need at least one generator")
    tower = gens[0].tower
    for g in gens[1:]:
        if g.tower.signature != tower.signature:
            raise TowerMismatch("generators from different towers")
    level = len(tower.extensions)

    transgens = []
    for g in gens:
        for name in g.transcendentals_used():
            if name not in transgens:
                transgens.append(name)

    alg_values = []
    seen = set()
    for g in gens:
        for a in _coefficient_values(g):
            vec = tuple(tower._aflatten(level, a))
            if all(v == 0 for v in vec[1:]):
                continue            # rational coefficient: adds nothing
            if vec not in seen:
                seen.add(vec)
                alg_values.append(a)

    if not alg_values:
        return SubfieldDesc(tower, gens, None, None, transgens)

    ops = tower.top_ops()

    def as_elem(a):
        num = mp.mp_pad(mp.mp_const(ops, a), tower.nvars)
        one = mp.mp_pad(mp.mp_const(ops, ops.one), tower.nvars)
        return FieldElem(tower, num, one, _canonical=True)

    c = 1
    while True:
        gamma = tower._azero(level)
        for i, a in enumerate(alg_values):
            scale = tower._afrom_fraction(level, Fraction(c) ** i)
            gamma = tower._aadd(level, gamma, tower._amul(level, scale, a))
        prim = as_elem(gamma)
        desc = SubfieldDesc(tower, gens, prim,
                            tower._minpoly_q(level, gamma), transgens)
        if all(desc._alg_member(a) for a in alg_values):
            return desc
        c += 1


def contains(big: SubfieldDesc, small: SubfieldDesc) -> bool:
    """Is every generator of ``small`` a member of ``big``?"""
    return all(is_member(g, big) for g in small.generators)


def same_field(a: SubfieldDesc, b: SubfieldDesc) -> bool:
    return contains(a, b) and contains(b, a)
