"""Exponential complexes, polylogarithms and their period and regulator maps."""
from __future__ import annotations

__version__ = "0.1.0"

__all__ = ["wedge", "multival", "periods", "bloch", "grassmann", "chern2", "realdeligne", "acceptance", "cli"]
