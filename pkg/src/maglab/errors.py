"""Exception hierarchy shared across the package."""


class MaglabError(Exception):
    """Base class for all errors raised by this package."""


class NotReal(MaglabError):
    """A cyclotomic element was required to be fixed by complex conjugation but is not."""


class BadLength(MaglabError):
    """A coefficient vector does not have the expected length phi(m)."""


class ConductorCapExceeded(MaglabError):
    """A cyclotomic conductor exceeded the configured cap."""


class DivisionByZero(MaglabError):
    """Exact division by a zero scalar or polynomial."""


class IncompatibleBackends(MaglabError):
    """An operation mixed cyclotomic and formal scalars, which have no common promotion."""


class NoWitness(MaglabError):
    """An order query on a formal scalar needed a positive witness assignment."""


class OutOfRange(MaglabError):
    """An index argument fell outside its documented range."""


class TooLarge(MaglabError):
    """An input exceeded a size cap meant to keep exact search/solve costs bounded."""


class TypeInvalid(MaglabError):
    """A circular type failed its validity conditions."""


class MetricViolation(MaglabError):
    """A constructed distance matrix failed metric validation."""


class UnknownName(MaglabError):
    """An unknown fixture or suite name was requested."""


class BadN(MaglabError):
    """No construction of the requested kind exists for this n."""


class ZeroConstantTerm(MaglabError):
    """A denominator with zero constant term cannot be normalized or expanded."""


class PossiblySingular(MaglabError):
    """A numeric linear system could not be certified invertible at working precision."""


class NotASquare(MaglabError):
    """An exact square root was requested of a value with no representable square root."""
