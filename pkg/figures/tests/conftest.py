import sys
from pathlib import Path

FIGURES_DIR = Path(__file__).resolve().parents[1]
sys.path.insert(0, str(FIGURES_DIR))

GOLDEN = Path(__file__).resolve().parent / "golden"
