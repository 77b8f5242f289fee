"""Configuration, presets, I/O, run driver and CLI."""
