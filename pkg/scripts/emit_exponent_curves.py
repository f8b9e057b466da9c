"""Write every exponent-curve preset (exponent_fig5, 6, 7, 10) as CSV files into one directory."""

import argparse
import sys

from uepq.cli import main as cli_main
from uepq.harness import PRESETS


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="curves")
    ap.add_argument("--grid", type=int, default=200)
    args = ap.parse_args()
    for name in PRESETS:
        if name.startswith("exponent_"):
            code = cli_main(["exponents", "--preset", name, "--grid", str(args.grid), "--out", args.out])
            if code:
                sys.exit(code)


if __name__ == "__main__":
    main()
