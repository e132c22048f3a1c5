"""Test suite for Map Dater system."""
