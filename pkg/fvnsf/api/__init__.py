"""
Command-line surface of fvnsf
"""

from .router import build_parser

__all__ = ["build_parser"]
