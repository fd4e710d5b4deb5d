"""Exception hierarchy shared by the library and the CLI."""


class PrivCacheError(Exception):
    """Base class for every error raised by this package."""


class ValidationError(PrivCacheError, ValueError):
    """Malformed input: a distribution that does not sum to one, a bad index, a bad config."""


class UnsupportedMemoryPoint(ValidationError):
    """``M*K/N`` is not an integer; memory sharing is not implemented."""


class IndivisibleFile(ValidationError):
    """The file size is not a multiple of the number of subfiles."""


class DecodeFailure(PrivCacheError):
    """A receiver could not reconstruct its message from the inputs it was given."""


class EncodingError(PrivCacheError):
    """The encoder was asked to encode a pair outside the support of the model."""


class KeyMismatch(PrivCacheError, ValueError):
    """Key alphabet size does not match the one-time-pad modulus."""


class NotApplicable(PrivCacheError):
    """A bound's hypotheses do not hold for the given distribution."""


class SizeLimit(PrivCacheError):
    """An exhaustive computation would exceed its configured guard."""
