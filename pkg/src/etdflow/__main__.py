"""Entry point for ``python -m etdflow``."""

import sys

from .cli import main

sys.exit(main())
