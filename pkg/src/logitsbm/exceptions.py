class DataError(ValueError):
    """Malformed or inconsistent input data (graphs, labels, traces)."""


class NumericalError(RuntimeError):
    """A numerical routine failed (non-SPD matrix, divergent IRLS, ...)."""
