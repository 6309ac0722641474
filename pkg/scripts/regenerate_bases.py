"""Rebuilds the (3 x c, v) base fixtures with the enumerator.

Usage: python3 scripts/regenerate_bases.py [OUT]
The default target is the packaged data directory (or RCDESIGN_DATA).
"""

import sys

from rcdesign.construct import regenerate_bases

if __name__ == "__main__":
    print(regenerate_bases(sys.argv[1] if len(sys.argv) > 1 else None))
