"""Allow `python -m dfock`."""
import sys

from dfock.main import main

sys.exit(main())
