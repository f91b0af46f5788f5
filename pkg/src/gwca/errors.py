"""Exception types shared across the package."""


class InvalidGraphError(ValueError):
    """Adjacency or feature matrix violates the graph contract."""


class SizeMismatchError(ValueError):
    """Operands disagree on node count or channel dimension."""


class SolverError(RuntimeError):
    """The correlation solver could not produce a usable decomposition."""
