"""Errors, settings, scalars, logging and file formats."""
