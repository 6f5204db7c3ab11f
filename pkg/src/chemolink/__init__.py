"""Channel model of a chemically driven Janus transceiver and its particle-based validation."""

__version__ = "0.1.0"
