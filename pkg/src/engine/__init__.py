"""Exact engines for link invariants, fusion rules, 2d TQFTs and prequantization."""
