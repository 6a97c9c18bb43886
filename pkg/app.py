"""
Tetrad
Planar four-body central configurations from weighted directed areas.

Usage:
    python app.py solve --areas 5,6,4,-8
    python app.py sweep --vary a2 --fixed 1,1,-1 --start 1 --stop 0.05 --step -0.05
    python app.py limit maxwell
    python app.py orbit --areas 15,-6,3,-4 --ecc 0.72 --out fig2.csv
"""
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent))

from cli.commands import main

if __name__ == "__main__":
    sys.exit(main())
