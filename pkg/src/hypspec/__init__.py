"""Length-angle spectra of closed hyperbolic surfaces."""
__version__ = "0.1.0"
