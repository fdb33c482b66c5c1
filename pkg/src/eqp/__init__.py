"""Exact quasi-periodic solutions of 2D Euler on the torus and their numerical verification."""
