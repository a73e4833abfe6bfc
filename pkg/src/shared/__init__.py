"""Shared modules for configuration, errors, logging and models."""
