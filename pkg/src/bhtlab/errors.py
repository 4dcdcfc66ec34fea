"""Exception hierarchy shared across the package.

Structural problems (malformed or mismatched distributions) and parameter
domain violations raise ``ValueError`` subclasses; instances that are too
large for the exact algorithms raise :class:`CapacityError`.
"""


class BhtlabError(Exception):
    """Base class for all package-specific errors."""


class DistributionError(BhtlabError, ValueError):
    """A probability vector is malformed (negative mass, bad total, ...)."""


class SupportMismatchError(DistributionError):
    """Two distributions do not live on the same ordered support."""


class DomainError(BhtlabError, ValueError):
    """A parameter lies outside the domain required by an operation."""


class CapacityError(BhtlabError, RuntimeError):
    """The instance exceeds the size limits of every exact strategy."""
