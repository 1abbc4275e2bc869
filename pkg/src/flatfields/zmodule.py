"""Finitely generated subgroups of the plane with exact coordinates.

A :class:`ModuleDesc` records the Z-module generated by finitely many plane
vectors whose coordinates live in a field tower: its rank over Z, the
dimension of its real span, and, exactly when the module is discrete
(rank over Z equals the real span dimension), a lattice basis.

Rank computations reduce to exact linear algebra over Q by flattening all
coordinates over a common denominator into rational coordinate vectors.
"""

from __future__ import annotations

from fractions import Fraction

from . import linalg
from . import multipoly as mp
from .errors import TowerMismatch
from .plane import cross, is_zero_vec, v_add, v_scale
from .tower import FieldElem


def q_coordinate_rows(elems):
    """Rational coordinate rows spanning the Q-structure of the elements.

    All elements are placed over a common polynomial denominator; the scaled
    numerators are flattened coefficient-by-coefficient into Q-vectors of a
    shared finite-dimensional space.  Q-linear relations among the elements
    equal Q-linear relations among the returned rows.
    """
    elems = list(elems)
    if not elems:
        return []
    tower = elems[0].tower
    ops = tower.top_ops()
    level = len(tower.extensions)
    den = mp.mp_pad(mp.mp_const(ops, ops.one), tower.nvars)
    for e in elems:
        if e.tower.signature != tower.signature:
            raise TowerMismatch("elements from different towers")
        den = mp.mp_lcm(ops, den, e.den)
    scaled = []
    monomials = set()
    for e in elems:
        factor = mp.mp_divexact(ops, den, e.den)
        num = mp.mp_mul(ops, e.num, factor)
        scaled.append(num)
        monomials.update(num.keys())
    monomials = sorted(monomials)
    algdim = tower.alg_dim(level)
    rows = []
    for num in scaled:
        row = []
        for m in monomials:
            c = num.get(m)
            if c is None:
                row.extend([Fraction(0)] * algdim)
            else:
                row.extend(Fraction(x) for x in tower._aflatten(level, c))
        rows.append(row)
    return rows


class ModuleDesc:
    """Z-module generated by plane vectors, with lattice detection."""

    def __init__(self, generators):
        self.generators = [tuple(v) for v in generators]
        self._analyze()

    def _analyze(self):
        gens = [v for v in self.generators if not is_zero_vec(v)]
        if not gens:
            self.rank_over_z = 0
            self.real_span_dim = 0
            self.lattice_basis = []
            return
        flat = []
        for v in gens:
            flat.extend(v)
        coord_rows = q_coordinate_rows(flat)
        width = len(coord_rows[0])
        rows = [coord_rows[2 * i] + coord_rows[2 * i + 1]
                for i in range(len(gens))]
        self.rank_over_z = linalg.rank(rows)

        e1 = gens[0]
        e2 = next((v for v in gens[1:] if not cross(e1, v).is_zero()), None)
        self.real_span_dim = 2 if e2 is not None else 1

        if self.rank_over_z != self.real_span_dim:
            self.lattice_basis = None
            return

        if self.real_span_dim == 1:
            coeffs = []
            ok = True
            for v in gens:
                c = _ratio_along(v, e1)
                if c is None:
                    ok = False
                    break
                coeffs.append(c)
            if not ok:
                self.lattice_basis = None
                return
            g = linalg.gcd_fractions(coeffs)
            self.lattice_basis = [v_scale(e1, g)]
        else:
            pairs = []
            for v in gens:
                ab = _solve_pair(v, e1, e2)
                if ab is None or not (ab[0].is_rational() and ab[1].is_rational()):
                    self.lattice_basis = None
                    return
                pairs.append((ab[0].as_fraction(), ab[1].as_fraction()))
            denom = 1
            for a, b in pairs:
                for q in (a, b):
                    denom = denom * q.denominator // _gcd(denom, q.denominator)
            int_rows = [[int(a * denom), int(b * denom)] for a, b in pairs]
            hnf = linalg.hnf_2cols(int_rows)
            basis = []
            for h in hnf:
                a = Fraction(h[0], denom)
                b = Fraction(h[1], denom)
                basis.append(v_add(v_scale(e1, a), v_scale(e2, b)))
            self.lattice_basis = basis
        # every generator must be an integer combination of the basis
        for v in gens:
            coeffs = self.basis_coordinates(v)
            assert coeffs is not None and all(c.denominator == 1 for c in coeffs)

    def basis_coordinates(self, v):
        """Rational coordinates of v in the lattice basis, or None."""
        if self.lattice_basis is None:
            return None
        if not self.lattice_basis:
            return [] if is_zero_vec(v) else None
        if len(self.lattice_basis) == 1:
            c = _ratio_along(v, self.lattice_basis[0])
            return None if c is None else [c]
        ab = _solve_pair(v, self.lattice_basis[0], self.lattice_basis[1])
        if ab is None or not (ab[0].is_rational() and ab[1].is_rational()):
            return None
        return [ab[0].as_fraction(), ab[1].as_fraction()]

    def contains_vector(self, v) -> bool:
        """Exact membership: integer combination when a lattice basis
        exists, Q-span membership otherwise."""
        if is_zero_vec(v):
            return True
        if self.lattice_basis is not None:
            coeffs = self.basis_coordinates(v)
            return coeffs is not None and all(c.denominator == 1 for c in coeffs)
        gens = [g for g in self.generators if not is_zero_vec(g)]
        flat = []
        for g in gens:
            flat.extend(g)
        flat.extend(v)
        rows_all = q_coordinate_rows(flat)
        gen_rows = [rows_all[2 * i] + rows_all[2 * i + 1] for i in range(len(gens))]
        v_row = rows_all[-2] + rows_all[-1]
        cols = [[gen_rows[i][j] for i in range(len(gen_rows))]
                for j in range(len(v_row))]
        return linalg.solve(cols, v_row) is not None

    def __repr__(self):
        return (f"ModuleDesc(rank_z={self.rank_over_z}, "
                f"span={self.real_span_dim}, "
                f"lattice={'yes' if self.lattice_basis is not None else 'no'})")


def _gcd(a, b):
    while b:
        a, b = b, a % b
    return a


def _ratio_along(v, e):
    """Rational c with v = c*e, or None."""
    if not cross(v, e).is_zero():
        return None
    base = e[0] if not e[0].is_zero() else e[1]
    comp = v[0] if not e[0].is_zero() else v[1]
    c = comp / base
    if not c.is_rational():
        return None
    return c.as_fraction()


def _solve_pair(v, e1, e2):
    """Field coefficients (a, b) with v = a*e1 + b*e2 (e1, e2 independent)."""
    det = cross(e1, e2)
    if det.is_zero():
        return None
    a = cross(v, e2) / det
    b = cross(e1, v) / det
    return (a, b)


def integer_membership(generators, v) -> bool:
    """Is v an exact integer combination of the generators?  Works for any
    rank via Hermite reduction of the integer coordinate matrix."""
    gens = [g for g in generators if not is_zero_vec(g)]
    if is_zero_vec(v):
        return True
    if not gens:
        return False
    flat = []
    for g in gens:
        flat.extend(g)
    flat.extend(v)
    rows_all = q_coordinate_rows(flat)
    gen_rows = [rows_all[2 * i] + rows_all[2 * i + 1] for i in range(len(gens))]
    v_row = rows_all[-2] + rows_all[-1]
    denom = 1
    for row in gen_rows + [v_row]:
        for x in row:
            denom = denom * x.denominator // _gcd(denom, x.denominator)
    int_rows = [[int(x * denom) for x in row] for row in gen_rows]
    target = [int(x * denom) for x in v_row]
    hnf = _hnf_general(int_rows)
    # back-substitute over the echelon rows
    vec = list(target)
    for row in hnf:
        piv = next((j for j, x in enumerate(row) if x != 0), None)
        if piv is None:
            continue
        if vec[piv] % row[piv] != 0:
            return False
        c = vec[piv] // row[piv]
        vec = [a - c * b for a, b in zip(vec, row)]
    return all(x == 0 for x in vec)


def _hnf_general(rows):
    """Row echelon form over Z (Hermite-style) of an integer matrix."""
    rows = [list(r) for r in rows if any(r)]
    out = []
    col = 0
    ncols = len(rows[0]) if rows else 0
    while rows and col < ncols:
        with_piv = [r for r in rows if r[col] != 0]
        if not with_piv:
            col += 1
            continue
        while True:
            with_piv.sort(key=lambda r: abs(r[col]))
            piv = with_piv[0]
            done = True
            for r in with_piv[1:]:
                q = r[col] // piv[col]
                if q:
                    for j in range(ncols):
                        r[j] -= q * piv[j]
                    done = False
            with_piv = [r for r in with_piv if r[col] != 0]
            if done and len(with_piv) <= 1:
                break
            if len(with_piv) == 1:
                break
        piv = with_piv[0] if with_piv else None
        if piv is not None:
            if piv[col] < 0:
                for j in range(ncols):
                    piv[j] = -piv[j]
            out.append(piv)
            rows = [r for r in rows if r is not piv and any(r)]
        col += 1
    return out
