"""Exception hierarchy.

``DomainError`` subclasses map to CLI exit code 2; file problems
(``ParseError``, ``VersionError``, ``OSError``) map to exit code 1.
"""


class ObstructionLabError(Exception):
    """Base class for every error raised by this package."""


class DomainError(ObstructionLabError):
    """A request that is outside an operation's contract."""


# geometry / arcs
class EmptySet(DomainError):
    """An exclusion removed every obstacle from a set query."""


class DegenerateObstacle(DomainError):
    """Occlusion arc requested for an obstacle coinciding with the viewpoint."""


# constructions
class BadIndex(DomainError):
    """Spiral index outside the domain where the angle formula is real."""


class BadParam(DomainError):
    """Parameter outside its documented range."""


class BadDirection(BadParam):
    """A direction vector that is (numerically) zero."""


class SearchOverflow(DomainError):
    """An integer search exceeded its configured ceiling."""


class MissingMetadata(DomainError):
    """A verification was requested without the matching declared value."""


# visibility
class HorizonExceedsWindow(DomainError):
    """Finite-horizon query whose reach extends past the known window."""


class NoAdmissibleRegion(DomainError):
    """The window is too small to host any candidate for (T, eps)."""


class EpsilonTooLarge(DomainError):
    """eps is not below the minimum obstacle distance, as the bound requires."""


# dark forest
class NotMultiple(DomainError):
    """R is not an integer multiple of eps."""


class SubdivisionNotFound(DomainError):
    """No valid subdivision found; almost always a violated precondition.

    Carries the ladder of scales that were tried, for diagnosis.
    """

    def __init__(self, message, ladder=()):
        super().__init__(message)
        self.ladder = tuple(ladder)


# trees
class MissingSeparation(DomainError):
    """min_scale > 1 requires a declared separation on the window."""


class RealizationFailed(DomainError):
    """No partner found for some tree edge inside the window."""

    def __init__(self, message, vertex=None):
        super().__init__(message)
        self.vertex = vertex


# scenes / harness
class ParseError(ObstructionLabError):
    """Malformed scene or input file."""

    def __init__(self, message, line=None, column=None):
        super().__init__(message)
        self.line = line
        self.column = column


class VersionError(ObstructionLabError):
    """Unsupported scene format version."""


class MissingTable(DomainError):
    """An export was requested for a table the result does not contain."""
