"""Exact arithmetic in real field towers Q(t1,..,tk)(a1)..(am).

A tower declares, up front, finitely many transcendental generators (symbols
pinned to refinable real embeddings such as pi or e) followed by finitely
many real algebraic extensions (monic minimal polynomial over the tower so
far plus an isolating interval selecting one real root).

Elements are reduced fractions of multivariate polynomials in the
transcendentals whose coefficients live in the nested algebraic part.  The
reduced fraction with monic denominator is a canonical form: two elements
are equal iff their representations are identical.  Strict order is decided
by refining exact rational interval enclosures of the real embedding, which
terminates whenever the elements differ (equality is decided symbolically
first).

Towers and elements are immutable; all operations are pure.
"""

from __future__ import annotations

import os
from fractions import Fraction

import mpmath

from .errors import (PrecisionExhausted, TowerConstructionError,
                     TowerMismatch)
from . import multipoly as mp

_PREC_CAP = 1 << 16


def _start_prec() -> int:
    try:
        return max(8, int(os.environ.get("FLATFIELDS_PREC", "64")))
    except ValueError:
        return 64


# ---------------------------------------------------------------------------
# exact interval arithmetic on Fraction endpoints
# ---------------------------------------------------------------------------

def iv_point(q):
    q = Fraction(q)
    return (q, q)


def iv_add(a, b):
    return (a[0] + b[0], a[1] + b[1])


def iv_sub(a, b):
    return (a[0] - b[1], a[1] - b[0])


def iv_neg(a):
    return (-a[1], -a[0])


def iv_mul(a, b):
    products = (a[0] * b[0], a[0] * b[1], a[1] * b[0], a[1] * b[1])
    return (min(products), max(products))


def iv_div(a, b):
    if b[0] <= 0 <= b[1]:
        raise ZeroDivisionError("interval denominator straddles zero")
    inv = (Fraction(1) / b[1], Fraction(1) / b[0])
    return iv_mul(a, inv)


def iv_pow(a, n):
    out = iv_point(1)
    base = a
    while n:
        if n & 1:
            out = iv_mul(out, base)
        base = iv_mul(base, base)
        n >>= 1
    return out


def iv_sign(a):
    """Sign if the interval excludes zero, else None."""
    if a[0] > 0:
        return 1
    if a[1] < 0:
        return -1
    if a[0] == a[1] == 0:
        return 0
    return None


def _mpf_to_fraction(x) -> Fraction:
    sign, man, exp, _ = x._mpf_
    v = Fraction(man) * Fraction(2) ** exp
    return -v if sign else v


# ---------------------------------------------------------------------------
# transcendental generators
# ---------------------------------------------------------------------------

class Transcendental:
    """Named transcendental with a refinable real embedding.

    ``spec`` is "pi", "e", or a decimal/rational literal.  Literal embeddings
    are exact rational points: they are *declared* transcendental (trusted
    input) and refine to themselves.
    """

    __slots__ = ("name", "spec", "_rational")

    def __init__(self, name: str, spec: str):
        if not name or not name[0].isalpha():
            raise TowerConstructionError(f"bad transcendental name {name!r}")
        self.name = name
        self.spec = str(spec)
        self._rational = None
        if self.spec not in ("pi", "e"):
            try:
                self._rational = _parse_rational(self.spec)
            except (ValueError, ZeroDivisionError):
                raise TowerConstructionError(
                    f"embedding spec {spec!r} is not pi, e, or a numeric literal")

    def enclosure(self, prec: int):
        if self._rational is not None:
            return iv_point(self._rational)
        with mpmath.workprec(prec + 32):
            val = mpmath.pi if self.spec == "pi" else mpmath.e
            v = _mpf_to_fraction(+val)
        eps = Fraction(1, 2 ** (prec + 8))
        return (v - eps, v + eps)

    def key(self):
        return (self.name, self.spec)


def _parse_rational(text: str) -> Fraction:
    return Fraction(text)


# ---------------------------------------------------------------------------
# univariate polynomials with coefficients in an algebraic level
# ---------------------------------------------------------------------------
# represented as trimmed lists, constant term first

def _up_trim(ops, p):
    while p and ops.is_zero(p[-1]):
        p.pop()
    return p


def _up_add(ops, p, q):
    n = max(len(p), len(q))
    out = []
    for i in range(n):
        a = p[i] if i < len(p) else ops.zero
        b = q[i] if i < len(q) else ops.zero
        out.append(ops.add(a, b))
    return _up_trim(ops, out)


def _up_neg(ops, p):
    return [ops.neg(c) for c in p]


def _up_scale(ops, p, a):
    if ops.is_zero(a):
        return []
    return _up_trim(ops, [ops.mul(c, a) for c in p])


def _up_mul(ops, p, q):
    if not p or not q:
        return []
    out = [ops.zero] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        if ops.is_zero(a):
            continue
        for j, b in enumerate(q):
            out[i + j] = ops.add(out[i + j], ops.mul(a, b))
    return _up_trim(ops, out)


def _up_divmod(ops, p, q):
    if not q:
        raise ZeroDivisionError("polynomial division by zero")
    rem = list(p)
    quo = [ops.zero] * max(0, len(p) - len(q) + 1)
    inv_lead = ops.inv(q[-1])
    while len(rem) >= len(q):
        c = ops.mul(rem[-1], inv_lead)
        k = len(rem) - len(q)
        quo[k] = c
        for i, b in enumerate(q):
            rem[k + i] = ops.sub(rem[k + i], ops.mul(c, b))
        rem.pop()
        _up_trim(ops, rem)
        if len(rem) < len(q):
            break
    return _up_trim(ops, quo), _up_trim(ops, rem)


def _up_gcd(ops, p, q):
    a, b = list(p), list(q)
    while b:
        _, r = _up_divmod(ops, a, b)
        a, b = b, r
    if a:
        a = _up_scale(ops, a, ops.inv(a[-1]))
    return a


def _up_eval(ops, p, x):
    acc = ops.zero
    for c in reversed(p):
        acc = ops.add(ops.mul(acc, x), c)
    return acc


def _up_deriv(ops, p):
    return _up_trim(ops, [ops.mul(c, ops.from_fraction(Fraction(i)))
                          for i, c in enumerate(p)][1:])


def _up_xgcd_inverse(ops, u, m):
    """Inverse of u modulo m (m irreducible, u nonzero mod m)."""
    r0, r1 = list(m), list(u)
    s0, s1 = [], [ops.one]
    while r1:
        q, r = _up_divmod(ops, r0, r1)
        r0, r1 = r1, r
        s0, s1 = s1, _up_add(ops, s0, _up_neg(ops, _up_mul(ops, q, s1)))
    if len(r0) != 1:
        raise TowerConstructionError(
            "zero divisor encountered: declared minimal polynomial is reducible")
    return _up_scale(ops, s0, ops.inv(r0[0]))


# ---------------------------------------------------------------------------
# the algebraic part: nested tuples, level 0 = Fraction
# ---------------------------------------------------------------------------

class _LevelOps:
    """Field operations for algebraic elements at a fixed tower level."""

    __slots__ = ("tower", "level", "zero", "one")

    def __init__(self, tower, level):
        self.tower = tower
        self.level = level
        self.zero = tower._azero(level)
        self.one = tower._aone(level)

    def is_zero(self, a):
        return self.tower._ais_zero(self.level, a)

    def add(self, a, b):
        return self.tower._aadd(self.level, a, b)

    def sub(self, a, b):
        return self.tower._aadd(self.level, a, self.tower._aneg(self.level, b))

    def neg(self, a):
        return self.tower._aneg(self.level, a)

    def mul(self, a, b):
        return self.tower._amul(self.level, a, b)

    def inv(self, a):
        return self.tower._ainv(self.level, a)

    def div(self, a, b):
        return self.tower._amul(self.level, a, self.tower._ainv(self.level, b))

    def eq(self, a, b):
        return a == b

    def from_fraction(self, q):
        return self.tower._afrom_fraction(self.level, q)


class Extension:
    """One algebraic extension step: monic minimal polynomial over the tower
    below plus a rational isolating interval for the chosen real root."""

    __slots__ = ("name", "minpoly", "interval")

    def __init__(self, name, minpoly, interval):
        self.name = name
        self.minpoly = tuple(minpoly)
        self.interval = (Fraction(interval[0]), Fraction(interval[1]))

    def degree(self):
        return len(self.minpoly) - 1


class FieldTower:
    """Immutable declaration of a real field tower.

    Parameters
    ----------
    transcendentals:
        iterable of (name, embedding_spec) pairs; spec is "pi", "e" or a
        numeric literal.  Declared algebraically independent (trusted).
    extensions:
        iterable of (minpoly_coeffs, isolating_interval) or
        (name, minpoly_coeffs, isolating_interval).  Coefficients are
        Fractions/ints or nested tuples over the tower built so far
        (transcendental coefficients are not supported), constant term
        first, leading coefficient 1.  Each polynomial must be irreducible
        over the tower below; this is verified at construction.
    """

    def __init__(self, transcendentals=(), extensions=()):
        self.transcendentals = []
        seen = set()
        for name, spec in transcendentals:
            if name in seen:
                raise TowerConstructionError(f"duplicate transcendental {name!r}")
            seen.add(name)
            self.transcendentals.append(Transcendental(name, spec))
        self.transcendentals = tuple(self.transcendentals)
        self.extensions = ()
        self._root_cache = {}       # level -> (lo, hi, sign_at_lo)
        self._primitive_cache = None
        self._inv_cache = {}        # (level, element) -> inverse
        self._mul_cache = {}        # (level, a, b) -> product
        self._basis_iv_cache = {}   # (level, prec) -> basis monomial intervals
        self._ops_cache = {}        # level -> shared _LevelOps
        exts = []
        for item in extensions:
            if len(item) == 2:
                coeffs, interval = item
                name = f"a{len(exts) + 1}"
            else:
                name, coeffs, interval = item
            if name in seen:
                raise TowerConstructionError(f"duplicate generator name {name!r}")
            seen.add(name)
            ext = self._checked_extension(name, coeffs, interval, len(exts))
            exts.append(ext)
            self.extensions = tuple(exts)
        self._signature = (
            tuple(t.key() for t in self.transcendentals),
            tuple((e.name, e.minpoly, e.interval) for e in self.extensions),
        )

    # -- construction-time verification ---------------------------------

    def _checked_extension(self, name, coeffs, interval, level):
        ops = self.level_ops(level)
        poly = [self._alift(level, c) for c in coeffs]
        poly = _up_trim(ops, list(poly))
        if len(poly) < 3:
            raise TowerConstructionError(
                f"extension {name!r}: degree must be at least 2")
        if poly[-1] != ops.one:
            raise TowerConstructionError(
                f"extension {name!r}: minimal polynomial must be monic")
        if not self._is_irreducible(level, poly):
            raise TowerConstructionError(
                f"extension {name!r}: polynomial is reducible over the tower below")
        lo, hi = Fraction(interval[0]), Fraction(interval[1])
        if not lo < hi:
            raise TowerConstructionError(
                f"extension {name!r}: empty isolating interval")
        ext = Extension(name, poly, (lo, hi))
        if self._sturm_root_count(level, poly, lo, hi) != 1:
            raise TowerConstructionError(
                f"extension {name!r}: isolating interval does not contain "
                f"exactly one real root")
        return ext

    def _sturm_root_count(self, level, poly, lo, hi):
        ops = self.level_ops(level)
        chain = [list(poly), _up_deriv(ops, list(poly))]
        while chain[-1]:
            _, r = _up_divmod(ops, chain[-2], chain[-1])
            if not r:
                break
            chain.append(_up_neg(ops, r))

        def changes(x):
            signs = []
            for p in chain:
                v = _up_eval(ops, p, ops.from_fraction(Fraction(x)))
                s = self._asign(level, v)
                if s != 0:
                    signs.append(s)
            return sum(1 for a, b in zip(signs, signs[1:]) if a != b)

        for x in (lo, hi):
            v = _up_eval(ops, list(poly), ops.from_fraction(Fraction(x)))
            if ops.is_zero(v):
                raise TowerConstructionError(
                    "isolating interval endpoint is a root")
        return changes(lo) - changes(hi)

    # -- nested algebraic element primitives -----------------------------

    def _azero(self, level):
        if level == 0:
            return Fraction(0)
        deg = self.extensions[level - 1].degree()
        below = self._azero(level - 1)
        return (below,) * deg

    def _aone(self, level):
        return self._afrom_fraction(level, Fraction(1))

    def _afrom_fraction(self, level, q):
        if level == 0:
            return Fraction(q)
        deg = self.extensions[level - 1].degree()
        zero = self._azero(level - 1)
        return (self._afrom_fraction(level - 1, q),) + (zero,) * (deg - 1)

    def _alift(self, level, c):
        """Lift ints/Fractions/lower-level tuples to a level-``level`` element."""
        if isinstance(c, FieldElem):
            raise TowerConstructionError(
                "extension coefficients must be plain data, not FieldElems")
        if isinstance(c, (int, Fraction)):
            return self._afrom_fraction(level, Fraction(c))
        if level == 0:
            raise TowerConstructionError(f"cannot lift {c!r} into Q")
        deg = self.extensions[level - 1].degree()
        c = tuple(c)
        if len(c) > deg:
            raise TowerConstructionError("coefficient tuple longer than degree")
        lifted = tuple(self._alift(level - 1, x) for x in c)
        zero = self._azero(level - 1)
        return lifted + (zero,) * (deg - len(lifted))

    def _ais_zero(self, level, a):
        if level == 0:
            return a == 0
        return all(self._ais_zero(level - 1, c) for c in a)

    def _aadd(self, level, a, b):
        if level == 0:
            return a + b
        return tuple(self._aadd(level - 1, x, y) for x, y in zip(a, b))

    def _aneg(self, level, a):
        if level == 0:
            return -a
        return tuple(self._aneg(level - 1, x) for x in a)

    def _amul(self, level, a, b):
        if level == 0:
            return a * b
        key = (level, a, b) if a <= b else (level, b, a)
        cached = self._mul_cache.get(key)
        if cached is not None:
            return cached
        ops = self.level_ops(level - 1)
        prod = _up_mul(ops, list(a), list(b))
        m = list(self.extensions[level - 1].minpoly)
        _, rem = _up_divmod(ops, prod, m)
        deg = self.extensions[level - 1].degree()
        rem = rem + [ops.zero] * (deg - len(rem))
        out = tuple(rem)
        if len(self._mul_cache) < 1 << 18:
            self._mul_cache[key] = out
        return out

    def _ainv(self, level, a):
        if self._ais_zero(level, a):
            raise ZeroDivisionError("division by zero field element")
        if level == 0:
            return Fraction(1) / a
        cached = self._inv_cache.get((level, a))
        if cached is not None:
            return cached
        ops = self.level_ops(level - 1)
        m = list(self.extensions[level - 1].minpoly)
        u = _up_trim(ops, list(a))
        inv = _up_xgcd_inverse(ops, u, m)
        deg = self.extensions[level - 1].degree()
        inv = inv + [ops.zero] * (deg - len(inv))
        out = tuple(inv[:deg])
        if len(self._inv_cache) < 1 << 16:
            self._inv_cache[(level, a)] = out
        return out

    def _agen(self, level):
        """The generator a_level as a level-``level`` element."""
        deg = self.extensions[level - 1].degree()
        zero = self._azero(level - 1)
        one = self._aone(level - 1)
        if deg == 1:
            raise AssertionError("degree-1 extension")
        return (zero, one) + (zero,) * (deg - 2)

    def _araise(self, level_from, level_to, a):
        """Embed a level_from element into level_to >= level_from."""
        for lvl in range(level_from + 1, level_to + 1):
            deg = self.extensions[lvl - 1].degree()
            zero = self._azero(lvl - 1)
            a = (a,) + (zero,) * (deg - 1)
        return a

    # -- numeric enclosures ----------------------------------------------

    def _root_enclosure(self, level, prec):
        """Enclosure of generator a_level with width <= 2**-prec."""
        ext = self.extensions[level - 1]
        lops = self.level_ops(level - 1)
        state = self._root_cache.get(level)
        if state is None:
            lo, hi = ext.interval
            v = _up_eval(lops, list(ext.minpoly), lops.from_fraction(lo))
            sign_lo = self._asign(level - 1, v)
            state = [lo, hi, sign_lo]
            self._root_cache[level] = state
        lo, hi, sign_lo = state
        width_target = Fraction(1, 2 ** prec)
        while hi - lo > width_target:
            mid = (lo + hi) / 2
            v = _up_eval(lops, list(ext.minpoly), lops.from_fraction(mid))
            s = self._asign(level - 1, v)
            if s == 0:
                raise TowerConstructionError(
                    "isolating interval midpoint is an exact root; "
                    "declared polynomial is reducible")
            if s == sign_lo:
                lo = mid
            else:
                hi = mid
        state[0], state[1], state[2] = lo, hi, sign_lo
        return (lo, hi)

    def _basis_ivs(self, level, prec):
        """Intervals of the power-product basis monomials at this level, in
        the order produced by _aflatten; cached per (level, prec)."""
        key = (level, prec)
        cached = self._basis_iv_cache.get(key)
        if cached is not None:
            return cached
        if level == 0:
            out = [iv_point(1)]
        else:
            lower = self._basis_ivs(level - 1, prec)
            root = self._root_enclosure(level, prec)
            out = []
            power = iv_point(1)
            for p in range(self.extensions[level - 1].degree()):
                if p:
                    power = iv_mul(power, root)
                out.extend(iv_mul(power, b) for b in lower)
        self._basis_iv_cache[key] = out
        return out

    def _ainterval(self, level, a, prec):
        if level == 0:
            return iv_point(a)
        basis = self._basis_ivs(level, prec)
        flat = self._aflatten(level, a)
        lo = Fraction(0)
        hi = Fraction(0)
        for c, (blo, bhi) in zip(flat, basis):
            if not c:
                continue
            if c > 0:
                lo += c * blo
                hi += c * bhi
            else:
                lo += c * bhi
                hi += c * blo
        return (lo, hi)

    def _asign(self, level, a):
        """Exact sign of a nested algebraic element."""
        if level == 0:
            return (a > 0) - (a < 0)
        if self._ais_zero(level, a):
            return 0
        prec = _start_prec()
        while prec <= _PREC_CAP:
            s = iv_sign(self._ainterval(level, a, prec))
            if s is not None:
                return s
            prec *= 2
        raise PrecisionExhausted("sign determination exceeded precision cap")

    # -- Q-vector flattening ----------------------------------------------

    def alg_dim(self, level=None):
        """Q-dimension of the algebraic part up to ``level`` (default: all)."""
        if level is None:
            level = len(self.extensions)
        d = 1
        for ext in self.extensions[:level]:
            d *= ext.degree()
        return d

    def _aflatten(self, level, a):
        if level == 0:
            return [a]
        out = []
        for c in a:
            out.extend(self._aflatten(level - 1, c))
        return out

    def _aunflatten(self, level, vec):
        if level == 0:
            return vec[0]
        deg = self.extensions[level - 1].degree()
        chunk = len(vec) // deg
        return tuple(self._aunflatten(level - 1, vec[i * chunk:(i + 1) * chunk])
                     for i in range(deg))

    # -- irreducibility over the algebraic part ---------------------------

    def _is_irreducible(self, level, poly):
        """Is ``poly`` (over level ``level``) irreducible there?"""
        if level == 0:
            from sympy import Poly, QQ, Symbol
            x = Symbol("x")
            sp = Poly(list(reversed([Fraction(c) for c in poly])), x, domain="QQ")
            return sp.is_irreducible
        ops = self.level_ops(level)
        # squarefree test over the tower level itself
        g = _up_gcd(ops, list(poly), _up_deriv(ops, list(poly)))
        if len(g) > 1:
            return False
        return self._trager_irreducible(level, poly)

    def _primitive_element_full(self, level):
        """Primitive element of the whole algebraic part up to ``level``.

        Returns (gamma, minpoly over Q, power-basis matrix columns) where the
        matrix expresses 1, gamma, .., gamma^(D-1) in the product basis.
        """
        from . import linalg
        cache = self._primitive_cache
        if cache is not None and cache[0] == level:
            return cache[1]
        D = self.alg_dim(level)
        gens = [self._araise(i, level, self._agen(i)) for i in range(1, level + 1)]
        c = 1
        while True:
            gamma = self._azero(level)
            for i, g in enumerate(gens):
                gamma = self._aadd(level, gamma,
                                   self._amul(level, self._afrom_fraction(level, Fraction(c) ** i), g))
            powers = [self._aone(level)]
            for _ in range(D):
                powers.append(self._amul(level, powers[-1], gamma))
            rows = [self._aflatten(level, p) for p in powers[:D]]
            if linalg.rank(rows) == D:
                result = (gamma, self._minpoly_q(level, gamma), rows)
                self._primitive_cache = (level, result)
                return result
            c += 1

    def _minpoly_q(self, level, a):
        """Monic minimal polynomial over Q of a nested algebraic element."""
        from . import linalg
        D = self.alg_dim(level)
        powers = [self._aone(level)]
        rows = [self._aflatten(level, powers[0])]
        for _ in range(D):
            powers.append(self._amul(level, powers[-1], a))
            rows.append(self._aflatten(level, powers[-1]))
            ker = linalg.kernel_basis(
                [[rows[i][j] for i in range(len(rows))] for j in range(D)])
            if ker:
                coeffs = ker[0]
                lead = coeffs[-1]
                return [c / lead for c in coeffs]
        raise AssertionError("no linear dependence among powers")

    def _trager_irreducible(self, level, poly):
        """Decide irreducibility of a squarefree monic poly over the level."""
        from sympy import Poly, Symbol
        gamma, g_min, power_rows = self._primitive_element_full(level)
        from . import linalg
        D = self.alg_dim(level)
        cols = [[power_rows[i][j] for i in range(D)] for j in range(D)]
        coeff_polys = []
        for c in poly:
            sol = linalg.solve(cols, self._aflatten(level, c))
            if sol is None:
                raise AssertionError("primitive element failed to span")
            coeff_polys.append(list(sol))
        g = [Fraction(q) for q in g_min]
        s = 0
        while True:
            # N(x) = Res_y(g(y), sum_i coeff_i(y) (x - s y)^i)
            m_xy = _qp2_zero()
            for i, cp in enumerate(coeff_polys):
                term = _qp2_from_y(cp)
                shift = _qp2_pow(_qp2_sub(_qp2_x(), _qp2_scale_y(s)), i)
                m_xy = _qp2_add(m_xy, _qp2_mul(term, shift))
            res = _qp2_resultant_y(g, m_xy)
            der = _qp_deriv(res)
            if len(_qp_gcd(res, der)) == 1:
                x = Symbol("x")
                sp = Poly(list(reversed(res)), x, domain="QQ")
                return sp.is_irreducible
            s += 1
            if s > 40:
                raise AssertionError("no squarefree Trager norm found")

    # -- public element constructors --------------------------------------

    @property
    def signature(self):
        return self._signature

    def __eq__(self, other):
        return isinstance(other, FieldTower) and self._signature == other._signature

    def __hash__(self):
        return hash(self._signature)

    def __repr__(self):
        ts = ",".join(t.name for t in self.transcendentals)
        es = ",".join(e.name for e in self.extensions)
        inner = ",".join(x for x in (ts, es) if x)
        return f"FieldTower(Q({inner}))" if inner else "FieldTower(Q)"

    @property
    def nvars(self):
        return len(self.transcendentals)

    def level_ops(self, level):
        ops = self._ops_cache.get(level)
        if ops is None:
            ops = _LevelOps(self, level)
            self._ops_cache[level] = ops
        return ops

    def top_ops(self):
        return self.level_ops(len(self.extensions))

    def zero(self):
        return self.rational(0)

    def one(self):
        return self.rational(1)

    def rational(self, q) -> "FieldElem":
        ops = self.top_ops()
        num = mp.mp_const(ops, ops.from_fraction(Fraction(q)))
        num = mp.mp_pad(num, self.nvars)
        return FieldElem(self, num, mp.mp_pad(mp.mp_const(ops, ops.one), self.nvars))

    def transcendental(self, name) -> "FieldElem":
        idx = next((i for i, t in enumerate(self.transcendentals) if t.name == name), None)
        if idx is None:
            raise TowerMismatch(f"no transcendental named {name!r}")
        ops = self.top_ops()
        e = [0] * self.nvars
        e[idx] = 1
        num = {tuple(e): ops.one}
        return FieldElem(self, num, mp.mp_pad(mp.mp_const(ops, ops.one), self.nvars))

    def algebraic_gen(self, name_or_index) -> "FieldElem":
        if isinstance(name_or_index, str):
            idx = next((i for i, e in enumerate(self.extensions)
                        if e.name == name_or_index), None)
            if idx is None:
                raise TowerMismatch(f"no extension named {name_or_index!r}")
        else:
            idx = name_or_index
        level = len(self.extensions)
        a = self._araise(idx + 1, level, self._agen(idx + 1))
        ops = self.top_ops()
        num = mp.mp_pad(mp.mp_const(ops, a), self.nvars)
        return FieldElem(self, num, mp.mp_pad(mp.mp_const(ops, ops.one), self.nvars))

    def gens(self):
        """All generators: transcendentals first, then extension roots."""
        out = [self.transcendental(t.name) for t in self.transcendentals]
        out.extend(self.algebraic_gen(i) for i in range(len(self.extensions)))
        return out

    @staticmethod
    def rationals() -> "FieldTower":
        return FieldTower()

    @staticmethod
    def with_sqrt(*ds) -> "FieldTower":
        """Tower Q(sqrt(d1), .., sqrt(dn)) for positive square-free ints."""
        exts = []
        for d in ds:
            if d <= 1:
                raise TowerConstructionError("need d > 1 for a sqrt extension")
            hi = 1
            while hi * hi < d:
                hi += 1
            exts.append((f"sqrt{d}", [-Fraction(d), 0, 1], (Fraction(hi - 1), Fraction(hi))))
        return FieldTower(extensions=exts)


# ---------------------------------------------------------------------------
# Q[x] and Q[x][y] helpers for the Trager norm (small, local)
# ---------------------------------------------------------------------------
# Q[x]: list of Fractions, constant first.

def _qp_trim(p):
    while p and p[-1] == 0:
        p.pop()
    return p


def _qp_add(p, q):
    n = max(len(p), len(q))
    return _qp_trim([(p[i] if i < len(p) else 0) + (q[i] if i < len(q) else 0)
                     for i in range(n)])


def _qp_neg(p):
    return [-c for c in p]


def _qp_mul(p, q):
    if not p or not q:
        return []
    out = [Fraction(0)] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        for j, b in enumerate(q):
            out[i + j] += a * b
    return _qp_trim(out)


def _qp_divmod(p, q):
    rem = [Fraction(c) for c in p]
    quo = [Fraction(0)] * max(0, len(p) - len(q) + 1)
    while len(rem) >= len(q) and rem:
        c = rem[-1] / q[-1]
        k = len(rem) - len(q)
        quo[k] = c
        for i, b in enumerate(q):
            rem[k + i] -= c * b
        rem.pop()
        _qp_trim(rem)
    return _qp_trim(quo), _qp_trim(rem)


def _qp_gcd(p, q):
    a, b = [Fraction(c) for c in p], [Fraction(c) for c in q]
    while b:
        _, r = _qp_divmod(a, b)
        a, b = b, r
    if a:
        a = [c / a[-1] for c in a]
    return a


def _qp_deriv(p):
    return _qp_trim([Fraction(i) * c for i, c in enumerate(p)][1:])


# Q[x][y]: dict y-degree -> Q[x] list

def _qp2_zero():
    return {}


def _qp2_x():
    return {0: [Fraction(0), Fraction(1)]}


def _qp2_scale_y(s):
    return {1: [Fraction(s)]} if s else {}


def _qp2_from_y(cp):
    return {i: [Fraction(c)] for i, c in enumerate(cp) if c != 0}


def _qp2_add(a, b):
    out = dict(a)
    for d, p in b.items():
        out[d] = _qp_add(out.get(d, []), p)
        if not out[d]:
            del out[d]
    return out


def _qp2_sub(a, b):
    return _qp2_add(a, {d: _qp_neg(p) for d, p in b.items()})


def _qp2_mul(a, b):
    out = {}
    for d1, p1 in a.items():
        for d2, p2 in b.items():
            prod = _qp_mul(p1, p2)
            if prod:
                out[d1 + d2] = _qp_add(out.get(d1 + d2, []), prod)
                if not out[d1 + d2]:
                    del out[d1 + d2]
    return out


def _qp2_pow(a, n):
    out = {0: [Fraction(1)]}
    base = a
    while n:
        if n & 1:
            out = _qp2_mul(out, base)
        base = _qp2_mul(base, base)
        n >>= 1
    return out


def _qp2_resultant_y(g, m_xy):
    """Res_y(g(y), m(x, y)) via Sylvester determinant over Q[x].

    ``g`` is a Q[y] list (constant first), ``m_xy`` a Q[x][y] dict.
    Uses Bareiss-style fraction-free elimination with exact Q[x] division.
    """
    n = len(g) - 1
    m_deg = max(m_xy) if m_xy else 0
    if m_deg == 0:
        base = m_xy.get(0, [])
        out = [Fraction(1)]
        for _ in range(n):
            out = _qp_mul(out, base) if base else []
        return out if out else []
    size = n + m_deg
    rows = []
    g_desc = list(reversed(g))
    for i in range(m_deg):
        row = [[] for _ in range(size)]
        for j, c in enumerate(g_desc):
            row[i + j] = [Fraction(c)] if c else []
        rows.append(row)
    m_desc = [m_xy.get(d, []) for d in range(m_deg, -1, -1)]
    for i in range(n):
        row = [[] for _ in range(size)]
        for j, p in enumerate(m_desc):
            row[i + j] = list(p)
        rows.append(row)
    # Bareiss elimination over Q[x]
    prev = [Fraction(1)]
    sign = 1
    for k in range(size - 1):
        if not rows[k][k]:
            piv = next((i for i in range(k + 1, size) if rows[i][k]), None)
            if piv is None:
                return []
            rows[k], rows[piv] = rows[piv], rows[k]
            sign = -sign
        for i in range(k + 1, size):
            for j in range(k + 1, size):
                num = _qp_add(_qp_mul(rows[i][j], rows[k][k]),
                              _qp_neg(_qp_mul(rows[i][k], rows[k][j])))
                if prev != [Fraction(1)]:
                    q, r = _qp_divmod(num, prev) if num else ([], [])
                    if r:
                        raise AssertionError("Bareiss division not exact")
                    num = q
                rows[i][j] = num
            rows[i][k] = []
        prev = rows[k][k]
    det = rows[size - 1][size - 1]
    return _qp_neg(det) if sign < 0 else det


# ---------------------------------------------------------------------------
# field elements
# ---------------------------------------------------------------------------

class FieldElem:
    """An element of a :class:`FieldTower` in canonical reduced form.

    The representation is a fraction num/den of polynomials in the tower's
    transcendentals with algebraic-part coefficients, gcd-reduced, with the
    graded-lex leading coefficient of the denominator normalized to one.
    Canonical forms are unique: two elements are equal iff their forms match.

    Instances are immutable and hashable; arithmetic is exact.
    """

    __slots__ = ("tower", "num", "den", "_key")

    def __init__(self, tower, num, den, _canonical=False):
        self.tower = tower
        if _canonical:
            self.num = num
            self.den = den
        else:
            self.num, self.den = _canonicalize(tower, num, den)
        self._key = None

    # -- construction helpers ------------------------------------------

    def _coerce(self, other):
        if isinstance(other, FieldElem):
            if other.tower is not self.tower and other.tower.signature != self.tower.signature:
                raise TowerMismatch("elements belong to different towers")
            return other
        if isinstance(other, (int, Fraction)):
            return self.tower.rational(other)
        return NotImplemented

    # -- predicates ------------------------------------------------------

    def is_zero(self) -> bool:
        return mp.mp_is_zero(self.num)

    def __bool__(self):
        return not self.is_zero()

    def is_rational(self) -> bool:
        if not mp.mp_is_const(self.num) or not mp.mp_is_const(self.den):
            return False
        ops = self.tower.top_ops()
        level = len(self.tower.extensions)
        a = mp.mp_const_value(ops, self.num)
        vec = self.tower._aflatten(level, a)
        return all(v == 0 for v in vec[1:])

    def as_fraction(self) -> Fraction:
        if not self.is_rational():
            raise ValueError("element is not rational")
        ops = self.tower.top_ops()
        level = len(self.tower.extensions)
        a = mp.mp_const_value(ops, self.num)
        b = mp.mp_const_value(ops, self.den)
        return Fraction(self.tower._aflatten(level, a)[0]) / \
            Fraction(self.tower._aflatten(level, b)[0])

    def is_algebraic(self) -> bool:
        """True when no transcendental generator occurs in the element."""
        return not (mp.mp_vars_used(self.num) | mp.mp_vars_used(self.den))

    def transcendentals_used(self):
        idxs = mp.mp_vars_used(self.num) | mp.mp_vars_used(self.den)
        return tuple(self.tower.transcendentals[i].name for i in sorted(idxs))

    # -- arithmetic --------------------------------------------------------

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        ops = self.tower.top_ops()
        num = mp.mp_add(ops, mp.mp_mul(ops, self.num, other.den),
                        mp.mp_mul(ops, other.num, self.den))
        den = mp.mp_mul(ops, self.den, other.den)
        return FieldElem(self.tower, num, den)

    __radd__ = __add__

    def __neg__(self):
        ops = self.tower.top_ops()
        return FieldElem(self.tower, mp.mp_neg(ops, self.num), self.den,
                         _canonical=True)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        ops = self.tower.top_ops()
        num = mp.mp_mul(ops, self.num, other.num)
        den = mp.mp_mul(ops, self.den, other.den)
        return FieldElem(self.tower, num, den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if other.is_zero():
            raise ZeroDivisionError("division by zero field element")
        ops = self.tower.top_ops()
        num = mp.mp_mul(ops, self.num, other.den)
        den = mp.mp_mul(ops, self.den, other.num)
        return FieldElem(self.tower, num, den)

    def __rtruediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other / self

    def __pow__(self, n: int):
        if n < 0:
            return self.tower.one() / self ** (-n)
        out = self.tower.one()
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    # -- equality, order ---------------------------------------------------

    def key(self):
        if self._key is None:
            self._key = (_mp_key(self.num), _mp_key(self.den))
        return self._key

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = self.tower.rational(other)
        if not isinstance(other, FieldElem):
            return NotImplemented
        return (self.tower.signature == other.tower.signature
                and self.key() == other.key())

    def __hash__(self):
        return hash(self.key())

    def sign(self) -> int:
        """Exact sign: symbolic zero test, then interval refinement."""
        if self.is_zero():
            return 0
        if mp.mp_is_const(self.num) and mp.mp_is_const(self.den):
            tower = self.tower
            level = len(tower.extensions)
            ops = tower.top_ops()
            flat_n = tower._aflatten(level, mp.mp_const_value(ops, self.num))
            if all(v == 0 for v in flat_n[1:]):
                flat_d = tower._aflatten(level, mp.mp_const_value(ops, self.den))
                if all(v == 0 for v in flat_d[1:]):
                    sn = (flat_n[0] > 0) - (flat_n[0] < 0)
                    sd = (flat_d[0] > 0) - (flat_d[0] < 0)
                    return sn * sd
        prec = _start_prec()
        while prec <= _PREC_CAP:
            try:
                iv = self.interval(prec)
            except ZeroDivisionError:
                prec *= 2
                continue
            s = iv_sign(iv)
            if s is not None:
                return s
            prec *= 2
        raise PrecisionExhausted(
            "comparison exceeded precision cap; a declared transcendental "
            "embedding may coincide with an algebraic value")

    def compare(self, other) -> int:
        """-1, 0, or 1 as self <, ==, > other (exact)."""
        other = self._coerce(other)
        diff = self - other
        return diff.sign()

    def __lt__(self, other):
        return self.compare(other) < 0

    def __le__(self, other):
        return self.compare(other) <= 0

    def __gt__(self, other):
        return self.compare(other) > 0

    def __ge__(self, other):
        return self.compare(other) >= 0

    # -- numerics ---------------------------------------------------------

    def interval(self, prec: int):
        """Exact rational enclosure of the real embedding."""
        tower = self.tower
        level = len(tower.extensions)
        t_ivs = [t.enclosure(prec) for t in tower.transcendentals]

        def poly_iv(p):
            acc = iv_point(0)
            for exps, coeff in p.items():
                term = tower._ainterval(level, coeff, prec)
                for i, e in enumerate(exps):
                    if e:
                        term = iv_mul(term, iv_pow(t_ivs[i], e))
                acc = iv_add(acc, term)
            return acc

        return iv_div(poly_iv(self.num), poly_iv(self.den))

    def approx(self, digits: int = 15) -> float:
        lo, hi = self.interval(64)
        return float((lo + hi) / 2)

    def __repr__(self):
        return f"FieldElem({self._pretty()})"

    def __str__(self):
        return self._pretty()

    def _pretty(self):
        tower = self.tower
        level = len(tower.extensions)

        def alg_str(lvl, a):
            if lvl == 0:
                return str(a)
            name = tower.extensions[lvl - 1].name
            parts = []
            for i, c in enumerate(a):
                if tower._ais_zero(lvl - 1, c):
                    continue
                cs = alg_str(lvl - 1, c)
                if i == 0:
                    parts.append(cs)
                else:
                    power = name if i == 1 else f"{name}^{i}"
                    parts.append(power if cs == "1" else f"{cs}*{power}")
            return "(" + " + ".join(parts) + ")" if len(parts) > 1 else (parts[0] if parts else "0")

        def poly_str(p):
            if not p:
                return "0"
            terms = []
            for exps in sorted(p, key=lambda e: (sum(e), e)):
                c = alg_str(level, p[exps])
                mono = "*".join(
                    (tower.transcendentals[i].name if e == 1
                     else f"{tower.transcendentals[i].name}^{e}")
                    for i, e in enumerate(exps) if e)
                if mono:
                    terms.append(mono if c == "1" else f"{c}*{mono}")
                else:
                    terms.append(c)
            return " + ".join(terms)

        ns = poly_str(self.num)
        if mp.mp_is_const(self.den):
            ops = self.tower.top_ops()
            d = mp.mp_const_value(ops, self.den)
            if d == ops.one:
                return ns
        return f"({ns})/({poly_str(self.den)})"


def _mp_key(p):
    return tuple(sorted(p.items()))


def _canonicalize(tower, num, den):
    ops = tower.top_ops()
    nv = tower.nvars
    num = mp.mp_pad(num, nv)
    den = mp.mp_pad(den, nv)
    if mp.mp_is_zero(den):
        raise ZeroDivisionError("zero denominator")
    if mp.mp_is_zero(num):
        return {}, mp.mp_pad(mp.mp_const(ops, ops.one), nv)
    if mp.mp_is_const(num) and mp.mp_is_const(den):
        a = mp.mp_const_value(ops, num)
        b = mp.mp_const_value(ops, den)
        v = ops.div(a, b)
        return (mp.mp_pad(mp.mp_const(ops, v), nv),
                mp.mp_pad(mp.mp_const(ops, ops.one), nv))
    g = mp.mp_gcd(ops, num, den)
    if not mp.mp_is_const(g):
        num = mp.mp_divexact(ops, num, g)
        den = mp.mp_divexact(ops, den, g)
    _, lead = mp.mp_leading(den)
    inv = ops.inv(lead)
    num = mp.mp_scale(ops, num, inv)
    den = mp.mp_scale(ops, den, inv)
    return num, den


def compare(a: FieldElem, b) -> str:
    """Three-way comparison returning "less", "equal" or "greater"."""
    c = a.compare(b)
    return {-1: "less", 0: "equal", 1: "greater"}[c]


def arith(a: FieldElem, b: FieldElem, op: str) -> FieldElem:
    """Named arithmetic entry point: op in {add, sub, mul, div}."""
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "div":
        return a / b
    raise ValueError(f"unknown operation {op!r}")
