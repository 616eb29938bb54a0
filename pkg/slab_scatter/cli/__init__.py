"""Command-line tools for the slab scattering library."""
