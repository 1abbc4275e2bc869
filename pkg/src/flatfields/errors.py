"""Exception hierarchy shared by all flatfields modules.

Every error raised on bad input derives from :class:`FlatFieldsError` so the
CLI can map failures to stable exit codes.
"""


class FlatFieldsError(Exception):
    """Base class for all library errors."""

    code = "error"


class ParseError(FlatFieldsError):
    """Input could not be parsed into the requested object."""

    code = "parse-error"


class ConstraintViolation(FlatFieldsError):
    """A documented precondition of an operation was violated."""

    code = "constraint-violation"


class TowerMismatch(ConstraintViolation):
    """Two elements from different field towers were combined."""

    code = "tower-mismatch"


class TowerConstructionError(ConstraintViolation):
    """A field tower declaration failed its construction-time checks."""

    code = "tower-construction"


class PrecisionExhausted(FlatFieldsError):
    """Interval refinement hit the hard precision cap without separating.

    Only reachable when a declared transcendental embedding is numerically
    indistinguishable from an algebraic value, i.e. the trusted independence
    declaration was wrong.
    """

    code = "precision-exhausted"


class NotConnected(ConstraintViolation):
    """A surface, origami or atlas is not connected."""

    code = "not-connected"


class MalformedPermutation(ConstraintViolation):
    code = "malformed-permutation"


class InvalidGluing(ConstraintViolation):
    """Edge/slit gluing is not a translation pairing (non-parallel,
    incongruent, or not a perfect matching)."""

    code = "invalid-gluing"


class InvalidPolygon(ConstraintViolation):
    """Polygon is not simple or not positively oriented."""

    code = "invalid-polygon"


class OverlappingSlits(ConstraintViolation):
    code = "overlapping-slits"


class OrbitCapExceeded(FlatFieldsError):
    """Orbit enumeration exceeded the configured cap."""

    code = "orbit-cap-exceeded"


class SlopeRational(ConstraintViolation):
    """A construction required an irrational slope."""

    code = "slope-rational"
