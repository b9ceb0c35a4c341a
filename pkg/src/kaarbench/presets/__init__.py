"""Checked-in experiment presets, loadable by name via the CLI."""
