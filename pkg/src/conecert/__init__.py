"""conecert - certified equivalent super-martingale measures on finite spaces."""

__version__ = "0.1.0"
