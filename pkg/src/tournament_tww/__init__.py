"""Tournaments, BST orders, chain quasi-orders and twin-width at desk scale."""

__version__ = "0.1.0"
