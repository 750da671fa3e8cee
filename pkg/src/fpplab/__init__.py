"""First-passage percolation laboratory on exponential-growth graphs."""

__version__ = "0.1.0"
