"""Command-line interface for the invariant engine."""
