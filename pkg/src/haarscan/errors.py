"""Exception hierarchy.

Plain I/O failures (missing files, unreadable paths) are left to the
builtin ``OSError`` family; everything domain-specific derives from
:class:`HaarscanError` so callers can catch one base class.
"""


class HaarscanError(Exception):
    """Base class for all haarscan errors."""


class FormatError(HaarscanError):
    """Image file exists but cannot be decoded (bad magic, depth, payload)."""


class InvalidScale(HaarscanError):
    """Scale factor < 1, zero output dimension, or non-positive warp scale."""


class OutOfBounds(HaarscanError):
    """Rectangle extends outside the image it is evaluated against."""


class SingularMatrix(HaarscanError):
    """Affine matrix is not invertible."""


class ParseError(HaarscanError):
    """Cascade document is malformed."""


class UnsupportedFeature(ParseError):
    """Cascade uses a construct outside the supported subset
    (tilted features, tree-structured weak classifiers)."""


class ValidationError(ParseError):
    """Cascade parsed but violates a structural invariant
    (rect outside base window, empty stage, unbalanced weights)."""


class ImageTooSmall(HaarscanError):
    """Image smaller than the minimum scan window."""


class FaceTooSmall(HaarscanError):
    """Face rect too small to derive eye regions from."""


class SchemaError(HaarscanError):
    """Ground-truth record violates the JSON-lines schema."""


class DuplicateFrame(SchemaError):
    """Two ground-truth records share a frame_id."""


class MissingGroundTruth(HaarscanError):
    """A result frame has no matching ground-truth record."""


class MalformedCurve(HaarscanError):
    """ROC curve input violates the curve invariants."""
