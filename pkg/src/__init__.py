"""Dynamic mechanisms with interdependent valuations."""

__version__ = "1.0.0"
