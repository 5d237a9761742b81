"""Exception types shared across the package."""


class ConfigError(ValueError):
    """Bad, missing, or out-of-range configuration input."""


class GridError(ValueError):
    """A discretization grid cannot be used as given."""


class OrderingError(ValueError):
    """Correlation ordering bookkeeping was violated."""


class NumericalError(RuntimeError):
    """A numerical routine failed to reach its accuracy or stability target."""


class VerificationError(RuntimeError):
    """A built-in cross-check between two independent routes disagreed."""
