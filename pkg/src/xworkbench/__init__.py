"""Workbench for the X sequent calculus: nets, reduction, typing and the lambda bridge."""

__version__ = "0.1.0"
