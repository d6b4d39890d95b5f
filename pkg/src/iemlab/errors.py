"""Exception taxonomy shared by every iemlab module.

All exceptions derive from IemlabError so callers (and the CLI) can catch the
library's failures in one place.  Each class corresponds to one failure mode of
the pipeline; constructors accept a human-readable message plus optional
keyword context that is preserved on the instance for report embedding.
"""

from __future__ import annotations


class IemlabError(Exception):
    """Base class for all iemlab errors."""

    def __init__(self, message: str, **context):
        super().__init__(message)
        self.context = dict(context)


class PrecisionExhausted(IemlabError):
    """A tracked-real comparison could not be decided at the stored radius."""


class KeaneViolation(IemlabError):
    """An orbit of a discontinuity hit another discontinuity (exact tie)."""


class NotAdmissible(IemlabError):
    """A permutation pair fails the admissibility (irreducibility) test."""


class HorizonExceeded(IemlabError):
    """A computation needed more induction steps than the configured cap."""


class RangeError(IemlabError):
    """Indices out of the computed range of a trace, or an invalid window."""


class NotPrimitive(IemlabError):
    """A loop's cocycle matrix is not primitive (some power is not positive)."""


class UnsupportedKind(IemlabError):
    """An operation was applied to a piecewise-function kind it cannot handle."""


class DegenerateFit(IemlabError):
    """A log-log regression had too few points or no spread to fit a slope."""


class NoGap(IemlabError):
    """Stable-space estimation found no certified singular-value gap."""


class SingularQuotient(IemlabError):
    """A quotient cocycle matrix was numerically singular; witness attached."""


class SeriesDiverging(IemlabError):
    """The correction series shows non-decreasing terms; no tail bound exists."""


class NotSummable(IemlabError):
    """A boundedness majorant's terms do not decay; no finite sum certified."""


class NotInGammaStar(IemlabError):
    """A vector expected to lie in the zero-mean subspace does not."""


class ParseError(IemlabError):
    """Malformed JSON input for an interval exchange map or function."""
