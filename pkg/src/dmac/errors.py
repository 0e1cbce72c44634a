"""Exception types shared across the package."""


class ParameterError(ValueError):
    """A parameter violates a structural precondition (bad modulus, index
    out of range, invalid profile, guardrail exceeded)."""


class InputError(ValueError):
    """User-supplied data is malformed (symbol out of alphabet, tag of the
    wrong length, unparsable record)."""


class EntropyError(OSError):
    """The configured entropy source failed to deliver random bytes."""
