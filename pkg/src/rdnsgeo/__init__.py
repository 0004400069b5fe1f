"""Geolocation hints from reverse DNS hostnames."""

__version__ = "0.1.0"
