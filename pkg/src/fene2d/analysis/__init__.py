"""Diagnostics, inequality checkers and Littlewood-Paley tools."""
