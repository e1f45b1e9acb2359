"""Exception and warning types shared across the package."""


class EnknotsError(Exception):
    """Base class for all errors raised by this package."""


class DimensionMismatch(EnknotsError):
    pass


class ZeroVarianceColumn(EnknotsError):
    def __init__(self, j):
        self.j = j
        super().__init__(f"column {j} has zero variance after centering")


class AlphaOutOfRange(EnknotsError):
    pass


class TiedEntry(EnknotsError):
    pass


class RankDeficientActiveSet(EnknotsError):
    pass


class KnotIndexOutOfRange(EnknotsError):
    pass


class NegativeEta(EnknotsError):
    pass


class NotConverged(EnknotsError):
    """Iterative solver hit its iteration cap; carries the last iterate."""

    def __init__(self, max_iter, beta=None, kkt=None):
        self.max_iter = max_iter
        self.beta = beta
        self.kkt = kkt
        super().__init__(f"not converged after {max_iter} iterations (kkt={kkt})")


class NotOrthonormal(EnknotsError):
    pass


class NonpositiveSigma2(EnknotsError):
    pass


class AlphaNotInGrid(EnknotsError):
    pass


class Underdetermined(EnknotsError):
    pass


class RankDeficient(EnknotsError):
    pass


class InvalidReference(EnknotsError):
    pass


class NotPositiveDefinite(EnknotsError):
    pass


class CholeskyFailure(EnknotsError):
    pass


class EmptySamples(EnknotsError):
    pass


class ParseError(EnknotsError):
    pass


class DataFileMissing(EnknotsError):
    pass


class ChecksumMismatch(EnknotsError):
    pass


class GridTooCoarse(UserWarning):
    """A one-step warm-started knot disagrees with its fixed point by more than 1%."""
