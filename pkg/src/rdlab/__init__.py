"""rdlab: numerical laboratory for spectra of weighted random regular digraphs."""

from . import connectivity, experiments, harness, sampler, spectral, weights

__all__ = ["connectivity", "experiments", "harness", "sampler", "spectral", "weights"]
__version__ = "0.1.0"
