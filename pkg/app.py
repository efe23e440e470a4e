"""
Viral Campaign Simulator
SIR word-of-mouth model of a marketing campaign: simulate, sweep, figures, check

Usage:
    python app.py simulate --beta 0.25 --gamma 0.1 --s0 900 --i0 100 --r0 0 --out-csv run.csv
    python app.py sweep --config sweep.cfg
    python app.py figures out/
    python app.py check -v
"""

import os
import sys

sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

from console.cli import main

if __name__ == '__main__':
    sys.exit(main())
