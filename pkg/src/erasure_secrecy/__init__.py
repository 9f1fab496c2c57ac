"""Physical-layer secrecy from punctured LDPC codes and ARQ over correlated erasure channels."""

__version__ = "0.1.0"
