"""Extended nu-gap metric for delay-rational and user-factored plants."""

__version__ = "0.1.0"
