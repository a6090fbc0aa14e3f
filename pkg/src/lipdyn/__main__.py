import sys

from lipdyn.cli import main

sys.exit(main())
