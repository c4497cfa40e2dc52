"""Exception types raised across the toolkit."""


class PasError(Exception):
    """Base class for all toolkit errors."""


class InfeasibleTargetError(PasError, ValueError):
    """A requested power, energy or rate cannot be met by the input family."""


class UnsupportedRateError(PasError, ValueError):
    """Code rate, constellation size and frame length do not fit together."""


class InvalidMatcherError(PasError, ValueError):
    """Matcher input length exceeds what the composition can index."""


class CompositionMismatchError(PasError, ValueError):
    """Amplitude sequence does not have the matcher's composition."""


class NotInCodebookError(PasError, ValueError):
    """Sequence has the right composition but no matcher input maps to it."""


class AlistFormatError(PasError, ValueError):
    """Malformed or internally inconsistent alist file."""


class RankError(PasError, ValueError):
    """Parity-check matrix is rank deficient."""

    def __init__(self, message: str, deficiency: int):
        super().__init__(message)
        self.deficiency = deficiency


class SearchFailure(PasError, RuntimeError):
    """Operating-point search ran out of budget."""

    def __init__(self, message: str, trace=None):
        super().__init__(message)
        self.trace = list(trace or [])
