"""
Exponent and period across the logistic family
==============================================

Writes a CSV with one row per parameter value, ready for any plotting tool.
Equivalent to

    lipdyn sweep --family logistic --param a --from 2.5 --to 4 --steps 151
"""

import sys

from lipdyn.cli import main

sys.exit(main(["sweep", "--family", "logistic", "--param", "a", "--from", "2.5",
               "--to", "4", "--steps", "151", "--x0", "0.3", "--iters", "5000",
               "--burn-in", "500"] + sys.argv[1:]))
