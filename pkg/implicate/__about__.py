"""Signed-network implication game: motif census, observers and implication avoiding dynamics."""

__version__ = "0.1.0"
