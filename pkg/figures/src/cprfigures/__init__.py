"""Figure rendering for cprlab CSV sweep output."""

__version__ = "0.1.0"

from .render import RenderError, data_checksum, parse_csv, plot_data, render

__all__ = ["RenderError", "data_checksum", "parse_csv", "plot_data", "render",
           "__version__"]
