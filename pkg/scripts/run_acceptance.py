"""Run the acceptance suite and print one PASS/FAIL line per criterion.

    python3 scripts/run_acceptance.py [-k criterion1]
"""
import os
import sys

import pytest

if __name__ == "__main__":
    root = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
    sys.exit(pytest.main([os.path.join(root, "tests", "test_acceptance.py"), "-q", *sys.argv[1:]]))
