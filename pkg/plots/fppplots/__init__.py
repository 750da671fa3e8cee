"""Figure rendering for experiment output directories.

Consumes only the file interfaces of the experiment runner: samples.csv
and summary.json.  No statistics are recomputed; summary.json is
authoritative and the CSV supplies raw values for histograms only.
"""

from .io import (HashMismatchError, PlotsError, ResultBundle, SchemaError,
                 load_results)
from .figures import plot_tightness, plot_variance_scaling

__version__ = "0.1.0"

__all__ = [
    "HashMismatchError", "PlotsError", "ResultBundle", "SchemaError",
    "load_results", "plot_tightness", "plot_variance_scaling",
]
