"""Tests for poincare_relations."""
