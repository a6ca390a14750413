"""Versatile miscellaneous utilities used throughout the library."""
