"""Exception hierarchy shared by every module.

Each exception carries a short machine-readable ``code`` (the class name) and an
``exit_code`` used by the command line front end.
"""


class BottError(Exception):
    exit_code = 65

    @property
    def code(self):
        return type(self).__name__


# matrix construction
class NonTriangular(BottError):
    pass


class BadDimension(BottError):
    pass


class IndexOutOfRange(BottError):
    pass


class AmbientMismatch(BottError):
    pass


# moves
class SwapObstructed(BottError):
    pass


class BadSupport(BottError):
    pass


class ObstructionNonzero(BottError):
    pass


# isomorphisms
class DimensionMismatch(BottError):
    pass


class Unverified(BottError):
    pass


class NotQTrivial(BottError):
    pass


class NotWellOrdered(BottError):
    pass


class WrongStage(BottError):
    pass


class WrongShape(BottError):
    pass


# reports
class CorruptReport(BottError):
    pass


class InternalInvariantViolation(BottError):
    """Raised when a proven mathematical fact fails; always a bug here."""

    exit_code = 70


class UnmatchedForm(InternalInvariantViolation):
    pass
