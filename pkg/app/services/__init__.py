"""Services module for Shor preprocessing."""

from app.services.shorprep import ShorReport, shor_demo

__all__ = ["ShorReport", "shor_demo"]
