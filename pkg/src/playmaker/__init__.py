"""Robot soccer team AI engine, match simulator, and operator gateway."""

__version__ = "0.1.0"
