"""Three electrons in a 2D parabolic dot with logarithmic pair interaction,
solved in a hyperspherical-harmonic basis."""

__version__ = "0.1.0"
