"""Regenerate every figure as CSV + SVG into ./figures_out."""
# %%
import sys
from pathlib import Path

from mibound.cli import reproduce_all

out = Path(sys.argv[1] if len(sys.argv) > 1 else "figures_out")
for path in reproduce_all(out):
    print(path)
