"""Proof search, refutation, and machine-model reductions for the
(forall, ->) fragment of first-order intuitionistic logic."""

__version__ = "0.1.0"
