"""Figure rendering for hyperjerk benchmark outputs.

Pure file-to-file transformation: the inputs are the benchmark CSV files
(trials and likelihood curves), the outputs are PNG and SVG images.  No
computation is re-run here.
"""

__version__ = "0.1.0"

from .figures import plot_histograms, plot_likelihood, render_all

__all__ = ["__version__", "plot_histograms", "plot_likelihood", "render_all"]
