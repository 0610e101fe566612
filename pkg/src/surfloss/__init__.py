"""Surface-loss extraction for superconducting CPW resonators."""

__version__ = "0.1.0"
