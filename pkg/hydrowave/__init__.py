"""Hydrowave - exact solutions of variable-speed wave equations and hydrodynamic flows"""

__version__ = "1.0.0"
