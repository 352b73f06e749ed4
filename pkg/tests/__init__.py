"""Tests for the qgraph library."""
