"""Multi-center Taub-NUT geometry: fields, Kahler data, moment images and checks."""

__version__ = "0.1.0"
