"""Tests package for qfrag."""
