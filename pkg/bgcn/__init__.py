"""Pacote BGCN: recomendação de bundles com convolução em grafo."""

__version__ = "1.0.0"
__author__ = "BGCN Team"
__license__ = "MIT"
