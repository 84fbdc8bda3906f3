"""Propositional encoding of order compatibility and the solving pipeline."""
