"""Quantum invariants: Jones polynomials, Verlinde dimensions, 2d TQFTs and prequantization."""
