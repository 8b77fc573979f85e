#!/usr/bin/env python3
"""Standalone entry: python3 figures/plot_mott.py <csv-dir-or-file> <out.png>"""

import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent))

from mottfigures.mott import main

if __name__ == "__main__":
    sys.exit(main())
