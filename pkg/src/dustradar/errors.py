"""Exception types raised across the package.

Everything derives from :class:`DustRadarError` so callers can catch the
package's failures with one handler. Validation-style errors additionally
derive from :class:`ValueError` to stay friendly to generic callers.
"""

from __future__ import annotations


class DustRadarError(Exception):
    """Base class for all errors raised by dustradar."""


class PointValidationError(DustRadarError, ValueError):
    """A radar point violates one of its structural invariants."""


class NonFiniteFieldError(PointValidationError):
    """A point field is NaN or infinite."""

    def __init__(self, field: str, value: float):
        self.field = field
        self.value = value
        super().__init__(f"field {field!r} is not finite: {value!r}")


class AngleRangeError(PointValidationError):
    """An angle lies outside its legal range."""

    def __init__(self, field: str, value: float, lo: float, hi: float):
        self.field = field
        self.value = value
        self.lo = lo
        self.hi = hi
        super().__init__(
            f"{field} = {value!r} outside [{lo:.9g}, {hi:.9g}] rad"
        )


class AngularMismatchError(PointValidationError):
    """A stored angle disagrees with the angle implied by the Cartesian fields."""

    def __init__(self, field: str, expected: float, actual: float, tol: float):
        self.field = field
        self.expected = expected
        self.actual = actual
        self.delta = abs(expected - actual)
        self.tol = tol
        super().__init__(
            f"{field} = {actual:.12g} but Cartesian fields imply "
            f"{expected:.12g} (|delta| = {self.delta:.3g} > tol {tol:.3g})"
        )


class NegativeRangeError(PointValidationError):
    """A spherical construction was given a negative range."""


class ConfigError(DustRadarError, ValueError):
    """A configuration value or file violates its schema or invariants."""


class InvalidSpecError(ConfigError):
    """A scene specification is not realizable."""


class NegativeRadiusError(DustRadarError, ValueError):
    """A spatial query or clustering call was given a negative radius."""


class MinClusterSizeError(DustRadarError, ValueError):
    """min_cluster_size below 1."""


class EmptyClusterError(DustRadarError, ValueError):
    """A cluster descriptor was requested for an empty member list."""


class MemberIndexError(DustRadarError, IndexError):
    """A cluster member index does not exist in the frame."""


class MismatchedClusteringError(DustRadarError, ValueError):
    """A clustering does not belong to the frame it is applied to."""


class ParseError(DustRadarError):
    """A serialized record could not be parsed."""

    def __init__(self, line: int, detail: str):
        self.line = line
        self.detail = detail
        super().__init__(f"line {line}: {detail}")


class NonMonotonicSeqError(ParseError):
    """Frame sequence numbers in a stream went backwards or repeated."""


class FrameMismatchError(DustRadarError, ValueError):
    """Evaluation inputs do not describe the same frame sequence."""
