"""Permite `python -m bgcn ...`."""

import sys

from .main import main

if __name__ == "__main__":
    sys.exit(main())
