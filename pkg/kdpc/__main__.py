"""Allow `python -m kdpc`."""

import sys

from kdpc.cli import main

sys.exit(main())
