"""Tests for the poincare_relations package."""
