"""
Test suite for enzgrid.
"""
