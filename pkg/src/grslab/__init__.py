"""Cryptanalysis workbench for the BBCRS McEliece variant over GRS codes."""

__version__ = "0.1.0"
