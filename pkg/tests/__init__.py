"""Test suite for conecert."""
