"""iabench: synthetic instruction-answer benchmark generation and evaluation."""

__version__ = "0.1.0"
