"""Coherent parity check codes: construction, search and compilation."""

from __future__ import annotations

__version__ = "0.1.0"
