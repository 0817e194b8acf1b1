"""Two-sided cost-functional bounds for time-periodic parabolic optimal
control, discretized with a truncated Fourier series in time and P1 finite
elements in space."""

__version__ = "0.1.0"
