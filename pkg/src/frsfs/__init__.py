"""Fuzzy rough set feature selection."""
