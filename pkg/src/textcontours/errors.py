"""Shared exception types."""


class NumericError(RuntimeError):
    """A non-finite value appeared where the pipeline guarantees finiteness."""
