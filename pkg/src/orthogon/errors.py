"""Exception types shared across the package."""


class OrthogonError(Exception):
    """Base class for all domain errors."""


class DuplicateLabelError(OrthogonError):
    pass


class UnknownLabelInArrowError(OrthogonError):
    pass


class ForeignPointError(OrthogonError):
    pass


class NonMonotoneError(OrthogonError):
    """Raised with the violating point pair attached."""

    def __init__(self, message, pair=None):
        super().__init__(message)
        self.pair = pair


class CodomainMismatchError(OrthogonError):
    pass


class DomainMismatchError(OrthogonError):
    pass


class NotCommutingError(OrthogonError):
    pass


class BoundTooSmallError(OrthogonError):
    pass


class BoundMismatchError(OrthogonError):
    pass


class NotationSyntaxError(OrthogonError):
    """Parse failure; carries the 0-based offset of the offending character."""

    def __init__(self, message, position):
        super().__init__(f"{message} (at position {position})")
        self.position = position


class SplitPointError(OrthogonError):
    """Labels merged in the domain land in distinct codomain points."""


class MissingLabelError(OrthogonError):
    """A domain label does not occur in any codomain point."""


class NonMonotoneNotationError(OrthogonError):
    """The map described by a notation string is not monotone."""
