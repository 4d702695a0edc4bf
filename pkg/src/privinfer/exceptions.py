"""Exception hierarchy shared across the package."""


class ParameterError(ValueError):
    """Invalid scheme or analysis parameters (e.g. ``t`` not dividing ``n``)."""


class LengthMismatchError(ValueError):
    """Vectors or matrices of incompatible lengths were combined."""


class HadamardError(ValueError):
    """A matrix failed Hadamard validation."""


class CosetMismatchError(ValueError):
    """``w`` and the shift vector do not lie in the same coset of V."""


class GammaMembershipError(ValueError):
    """A perturbation vector outside the perturbation family was supplied."""


class OracleSizeError(ValueError):
    """A brute-force oracle was asked for a problem beyond its size cap."""


class WireFormatError(ValueError):
    """Base class for malformed wire messages."""


class TruncatedMessageError(WireFormatError):
    pass


class UnknownKindError(WireFormatError):
    pass


class UnsupportedVersionError(WireFormatError):
    pass


class PayloadLengthError(WireFormatError):
    pass
