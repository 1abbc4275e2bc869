"""Multivariate polynomials over an abstract coefficient field.

These carry the transcendental part of a field tower: an element of
Q(t1,..,tk)(a1)..(am) is a reduced fraction of two polynomials in t1..tk
whose coefficients live in the algebraic part A = Q(a1)..(am).

A polynomial is a dict mapping exponent tuples (one slot per transcendental)
to nonzero A-elements.  The zero polynomial is the empty dict.  Coefficient
arithmetic is delegated to an ``ops`` adapter (see tower._AlgOps) so this
module stays independent of the tower internals.

Monomial order everywhere is graded lexicographic; "monic" below means the
graded-lex leading coefficient equals one.
"""

from __future__ import annotations


def mp_zero():
    return {}


def mp_const(ops, a):
    """Constant polynomial (arity encoded by callers' exponent tuples)."""
    if ops.is_zero(a):
        return {}
    return {(): a}


def mp_is_zero(p) -> bool:
    return not p


def mp_is_const(p) -> bool:
    return not p or (len(p) == 1 and not any(next(iter(p))))


def mp_const_value(ops, p):
    if not p:
        return ops.zero
    return next(iter(p.values()))


def mp_nvars(p) -> int:
    return len(next(iter(p))) if p else 0


def mp_vars_used(p):
    used = set()
    for exps in p:
        for i, e in enumerate(exps):
            if e:
                used.add(i)
    return used


def _key(exps):
    return (sum(exps), exps)


def mp_leading(p):
    """(exponent, coefficient) of the graded-lex leading term."""
    exps = max(p, key=_key)
    return exps, p[exps]


def mp_add(ops, p, q):
    r = dict(p)
    for exps, c in q.items():
        if exps in r:
            s = ops.add(r[exps], c)
            if ops.is_zero(s):
                del r[exps]
            else:
                r[exps] = s
        else:
            r[exps] = c
    return r


def mp_neg(ops, p):
    return {e: ops.neg(c) for e, c in p.items()}


def mp_sub(ops, p, q):
    return mp_add(ops, p, mp_neg(ops, q))


def mp_mul(ops, p, q):
    if not p or not q:
        return {}
    r = {}
    for e1, c1 in p.items():
        for e2, c2 in q.items():
            e = tuple(a + b for a, b in zip(e1, e2)) if e1 else e2
            if not e1 and not e2:
                e = ()
            c = ops.mul(c1, c2)
            if e in r:
                c = ops.add(r[e], c)
            if ops.is_zero(c):
                r.pop(e, None)
            else:
                r[e] = c
    return r


def mp_scale(ops, p, a):
    if ops.is_zero(a):
        return {}
    return {e: ops.mul(c, a) for e, c in p.items()}


def mp_pad(p, nvars):
    """Extend exponent tuples to the given arity."""
    if not p:
        return {}
    cur = mp_nvars(p)
    if cur == nvars:
        return p
    pad = (0,) * (nvars - cur)
    return {e + pad: c for e, c in p.items()}


def mp_divmod(ops, p, q):
    """Multivariate division with remainder by the graded-lex leading term.

    Exact when q divides p; otherwise the remainder is nonzero (sufficient
    for the exactness checks used here).
    """
    if not q:
        raise ZeroDivisionError("polynomial division by zero")
    nv = max(mp_nvars(p), mp_nvars(q))
    p = mp_pad(p, nv)
    q = mp_pad(q, nv)
    qe, qc = mp_leading(q)
    qc_inv = ops.inv(qc)
    quo = {}
    rem = dict(p)
    while rem:
        re, rc = mp_leading(rem)
        diff = tuple(a - b for a, b in zip(re, qe)) if re else tuple(-b for b in qe)
        if any(d < 0 for d in diff):
            break
        c = ops.mul(rc, qc_inv)
        quo[diff] = ops.add(quo.get(diff, ops.zero), c)
        if ops.is_zero(quo[diff]):
            del quo[diff]
        rem = mp_sub(ops, rem, mp_mul(ops, {diff: c}, q))
    return quo, rem


def mp_divexact(ops, p, q):
    quo, rem = mp_divmod(ops, p, q)
    if rem:
        raise ArithmeticError("inexact polynomial division")
    return quo


# -- gcd ---------------------------------------------------------------
#
# Recursive primitive PRS: view polynomials as univariate in their last used
# variable with coefficients in the polynomial ring over the remaining ones.

def _to_univar(p, var, nv):
    """Split off ``var``: dict degree -> polynomial in the other variables."""
    out = {}
    for e, c in p.items():
        d = e[var]
        rest = e[:var] + (0,) + e[var + 1:]
        layer = out.setdefault(d, {})
        layer[rest] = c
    return out


def _from_univar(ops, u, var):
    out = {}
    for d, layer in u.items():
        for e, c in layer.items():
            full = e[:var] + (d,) + e[var + 1:]
            out[full] = c
    return out


def _udeg(u):
    return max(u) if u else -1


def _ushift_mul(ops, u, shift, coef_poly):
    """Multiply a univariate-layered poly by coef_poly * x^shift."""
    out = {}
    for d, layer in u.items():
        prod = mp_mul(ops, layer, coef_poly)
        if prod:
            out[d + shift] = prod
    return out


def _uadd(ops, a, b):
    out = dict(a)
    for d, layer in b.items():
        if d in out:
            s = mp_add(ops, out[d], layer)
            if s:
                out[d] = s
            else:
                del out[d]
        else:
            out[d] = layer
    return out


def _uneg(ops, a):
    return {d: mp_neg(ops, layer) for d, layer in a.items()}


def _pseudo_rem(ops, a, b):
    """Pseudo-remainder of univariate-layered polynomials."""
    da, db = _udeg(a), _udeg(b)
    lb = b[db]
    r = a
    while _udeg(r) >= db and r:
        dr = _udeg(r)
        lr = r[dr]
        r = _uadd(ops, _ushift_mul(ops, r, 0, lb),
                  _uneg(ops, _ushift_mul(ops, b, dr - db, lr)))
    return r


def mp_content(ops, p, skip_var):
    """gcd of the coefficients of p viewed as univariate in skip_var."""
    u = _to_univar(p, skip_var, mp_nvars(p))
    g = {}
    for d in sorted(u):
        g = mp_gcd(ops, g, u[d])
        if mp_is_const(g) and g:
            break
    return g


def mp_gcd(ops, p, q):
    """Monic gcd over the coefficient field (graded-lex leading coeff one)."""
    if not p:
        return _monic(ops, q)
    if not q:
        return _monic(ops, p)
    if mp_is_const(p) or mp_is_const(q):
        return _const_one(ops, p, q)
    nv = max(mp_nvars(p), mp_nvars(q))
    p = mp_pad(p, nv)
    q = mp_pad(q, nv)
    used = mp_vars_used(p) | mp_vars_used(q)
    var = max(used)
    cp = mp_content(ops, p, var)
    cq = mp_content(ops, q, var)
    cg = mp_gcd(ops, cp, cq)
    pp = mp_divexact(ops, p, cp)
    qq = mp_divexact(ops, q, cq)
    a = _to_univar(pp, var, nv)
    b = _to_univar(qq, var, nv)
    if _udeg(a) < _udeg(b):
        a, b = b, a
    while b:
        r = _pseudo_rem(ops, a, b)
        a, b = b, r
        if b:
            poly_b = _from_univar(ops, b, var)
            cont = mp_content(ops, poly_b, var)
            b = _to_univar(mp_divexact(ops, poly_b, cont), var, nv)
    g = _from_univar(ops, a, var)
    cont = mp_content(ops, g, var)
    g = mp_divexact(ops, g, cont)
    return _monic(ops, mp_mul(ops, g, cg))


def _const_one(ops, p, q):
    # gcd with a nonzero constant is 1
    nv = max(mp_nvars(p), mp_nvars(q))
    return {(0,) * nv if nv else (): ops.one}


def _monic(ops, p):
    if not p:
        return {}
    _, lc = mp_leading(p)
    if ops.is_zero(ops.sub(lc, ops.one)):
        return p
    return mp_scale(ops, p, ops.inv(lc))


def mp_lcm(ops, p, q):
    if not p or not q:
        return {}
    g = mp_gcd(ops, p, q)
    return _monic(ops, mp_mul(ops, mp_divexact(ops, p, g), q))
