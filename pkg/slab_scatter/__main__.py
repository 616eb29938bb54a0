"""Command-line entry point: ``python -m slab_scatter``."""

import sys

from .cli.slab_tool import main

if __name__ == "__main__":
    sys.exit(main())
