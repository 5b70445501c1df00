"""Exception and warning types shared across the package."""


class ValidationError(ValueError):
    """Raised when inputs violate a documented precondition or file contract.

    The CLI maps this to exit code 2; I/O failures (OSError) map to exit
    code 3.
    """


class SampleSizeAdvisory(UserWarning):
    """Non-fatal advisory: the PSA sample is smaller than recommended."""


class ArchiveIntegrityWarning(UserWarning):
    """Archive content hash or stored statistics do not match recomputation."""
