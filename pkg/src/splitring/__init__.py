"""Exact computation in a Euclidean domain without multiplicative norms."""
