"""divlat: nested inequalities among symmetric divergence measures."""

__version__ = "1.0"
