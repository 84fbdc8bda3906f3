"""Polynomial path order certificates for constructor rewrite systems."""
