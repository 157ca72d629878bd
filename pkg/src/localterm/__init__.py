"""Local termination of term rewriting: partial models, labeling and proofs."""
__version__ = "0.1.0"
