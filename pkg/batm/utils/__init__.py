"""Utility modules shared by the batm pipeline stages.

This package provides:

- Logging configuration and setup
- JSON / JSON-lines serialization for records holding numpy values and paths
- Thread-count resolution and an order-preserving parallel map
"""
