"""Command-line interface."""
from .main import EXIT_INFEASIBLE, EXIT_OK, EXIT_USAGE, build_parser, configure_logging, main

__all__ = ["EXIT_INFEASIBLE", "EXIT_OK", "EXIT_USAGE", "build_parser", "configure_logging", "main"]
