"""Services behind the command-line interface."""
