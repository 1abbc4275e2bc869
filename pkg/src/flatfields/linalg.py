"""Small exact linear algebra toolkit over Fraction, plus integer HNF.

Matrices are lists of lists of :class:`fractions.Fraction` (rows).  Sizes in
this package are tiny (tens of rows), so plain Gaussian elimination is the
right tool; no pivoting heuristics beyond "first nonzero".
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd


def frac_rows(rows):
    return [[Fraction(x) for x in row] for row in rows]


def rank(rows) -> int:
    """Rank of a matrix over Q."""
    m = [row[:] for row in rows]
    nrows = len(m)
    ncols = len(m[0]) if nrows else 0
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, nrows) if m[i][c] != 0), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        inv = Fraction(1, 1) / m[r][c]
        m[r] = [x * inv for x in m[r]]
        for i in range(nrows):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        r += 1
        if r == nrows:
            break
    return r


def solve(rows, rhs):
    """Solve A x = b over Q; return a solution vector or None if inconsistent.

    ``rows`` is m x n, ``rhs`` has length m.  When the system is
    underdetermined an arbitrary (pivot-based) solution is returned.
    """
    m = [row[:] + [b] for row, b in zip(rows, rhs)]
    nrows = len(m)
    ncols = len(rows[0]) if nrows else 0
    pivots = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, nrows) if m[i][c] != 0), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        inv = Fraction(1, 1) / m[r][c]
        m[r] = [x * inv for x in m[r]]
        for i in range(nrows):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == nrows:
            break
    for i in range(r, nrows):
        if m[i][ncols] != 0:
            return None
    x = [Fraction(0)] * ncols
    for i, c in enumerate(pivots):
        x[c] = m[i][ncols]
    return x


def kernel_basis(rows):
    """Basis of the right kernel {x : A x = 0} over Q."""
    nrows = len(rows)
    ncols = len(rows[0]) if nrows else 0
    m = [row[:] for row in rows]
    pivots = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, nrows) if m[i][c] != 0), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        inv = Fraction(1, 1) / m[r][c]
        m[r] = [x * inv for x in m[r]]
        for i in range(nrows):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == nrows:
            break
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for fc in free:
        v = [Fraction(0)] * ncols
        v[fc] = Fraction(1)
        for i, pc in enumerate(pivots):
            v[pc] = -m[i][fc]
        basis.append(v)
    return basis


def hnf_2cols(int_rows):
    """Row-style Hermite normal form of an integer matrix with 2 columns.

    Returns the list of nonzero HNF rows (at most 2), i.e. a Z-basis of the
    row span with b[0] = (a, b), b[1] = (0, c), a > 0, c > 0, 0 <= b < c.
    """
    rows = [list(r) for r in int_rows if any(r)]
    if not rows:
        return []
    # clear first column down to a single gcd entry
    while True:
        nz = [r for r in rows if r[0] != 0]
        if len(nz) <= 1:
            break
        nz.sort(key=lambda r: abs(r[0]))
        r0 = nz[0]
        for r in nz[1:]:
            q = r[0] // r0[0]
            r[0] -= q * r0[0]
            r[1] -= q * r0[1]
        rows = [r for r in rows if any(r)]
    first = next((r for r in rows if r[0] != 0), None)
    rest = [r for r in rows if r is not first]
    g = 0
    for r in rest:
        g = gcd(g, r[1])
    basis = []
    if first is not None:
        if first[0] < 0:
            first = [-first[0], -first[1]]
        basis.append(first)
    if g:
        basis.append([0, abs(g)])
    if len(basis) == 2:
        # reduce the off-diagonal entry into [0, c)
        a, b = basis[0]
        c = basis[1][1]
        basis[0] = [a, b % c]
    elif len(basis) == 1 and basis[0][0] == 0:
        basis[0][1] = abs(basis[0][1])
    return basis


def gcd_fractions(values):
    """Generator of the Z-module of Q spanned by ``values`` (0 if all zero)."""
    vals = [Fraction(v) for v in values if v != 0]
    if not vals:
        return Fraction(0)
    lcm = 1
    for v in vals:
        lcm = lcm * v.denominator // gcd(lcm, v.denominator)
    g = 0
    for v in vals:
        g = gcd(g, abs(v.numerator * (lcm // v.denominator)))
    return Fraction(g, lcm)
