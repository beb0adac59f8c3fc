"""Solubility of homogeneous forms over p-adic fields, with checkable certificates."""

__version__ = "0.1.0"
