#!/usr/bin/env python3
"""
rts.py: run the laboratory CLI from a source checkout.

Equivalent to the installed ``rts`` console script, without installing the
package first.

Usage:
    uv run python rts.py <command> [options]

Example:
    uv run python rts.py table --errors 1e-4,1e-8,1e-12
    uv run python rts.py simulate bccks --n 3 --t 2 --mode sampled --seed 42
"""

import os
import sys

# Ensure the src/ directory is on the path so rts_lab imports resolve correctly
# when running this script directly from the repo root.
_SRC = os.path.join(os.path.dirname(os.path.abspath(__file__)), "src")
if _SRC not in sys.path:
    sys.path.insert(0, _SRC)


def main() -> int:
    # Deferred so the sys.path manipulation above takes effect first.
    from rts_lab.cli import dispatch

    return dispatch(sys.argv[1:])


if __name__ == "__main__":
    sys.exit(main())
