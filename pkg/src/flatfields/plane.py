"""Tiny exact 2D vector helpers over FieldElem coordinates.

Vectors are plain (x, y) tuples of :class:`flatfields.tower.FieldElem`.
"""

from __future__ import annotations


def v_add(a, b):
    return (a[0] + b[0], a[1] + b[1])


def v_sub(a, b):
    return (a[0] - b[0], a[1] - b[1])


def v_neg(a):
    return (-a[0], -a[1])


def v_scale(a, s):
    return (a[0] * s, a[1] * s)


def cross(a, b):
    return a[0] * b[1] - a[1] * b[0]


def dot(a, b):
    return a[0] * b[0] + a[1] * b[1]


def norm2(a):
    return a[0] * a[0] + a[1] * a[1]


def is_zero_vec(a) -> bool:
    return a[0].is_zero() and a[1].is_zero()


def vec_key(a):
    return (a[0].key(), a[1].key())


def same_direction(a, b) -> bool:
    """Parallel and pointing the same way (both nonzero assumed)."""
    return cross(a, b).is_zero() and dot(a, b).sign() > 0
