"""
Functional Tests for properad-htt v0.1

Tests that exercise the algebra end to end on small exact instances.
"""
