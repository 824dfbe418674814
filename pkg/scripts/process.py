"""Run the divlat command line without installing the console script.

Usage:
    python scripts/process.py verify --pairs 1000 --dims 2,3,5
    python scripts/process.py constants --grid-points 10000 --out constants.json
"""

import sys

from divlat.cli import main

if __name__ == "__main__":
    sys.exit(main())
