"""k3kit: desk-scale computations for the gluing construction of K3 surfaces."""

__version__ = "0.1.0"
