"""Dense simulation and verification toolkit for quantum codes, transversal
gates, and an information-theoretically secure homomorphic encryption scheme."""

__version__ = "0.1.0"
