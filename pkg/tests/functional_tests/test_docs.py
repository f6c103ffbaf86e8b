#!/usr/bin/env python3
"""
Functional tests for the repository documents.

Checks that the grounding ledger cites concrete file paths and that the
command table in the README names flags the command line accepts.

Usage:
    python tests/functional_tests/test_docs.py
"""

import re
import sys
from pathlib import Path

import pytest

# Add repo root to path for imports
repo_root = Path(__file__).resolve().parent.parent.parent
sys.path.insert(0, str(repo_root))

from utilities import Print
from properad_htt import main


def _cited_paths(text):
    return re.findall(r"`((?:other_examples|morphic)/[^`]*)`", text)


def test_ledger_cites_concrete_paths():
    paths = _cited_paths((repo_root / "DESIGN.md").read_text())
    assert paths
    for path in paths:
        assert not re.search(r"[<>*]", path), path


def test_readme_flags_show_in_help(capsys):
    readme = (repo_root / "README.md").read_text()
    for group, flags in (("trees", ["--mode", "--graph"]), ("transfer", ["--context", "--out"])):
        with pytest.raises(SystemExit):
            main([group, "--help"])
        usage = capsys.readouterr().out
        for flag in flags:
            assert flag in usage
            assert flag in readme


def main_tests():
    Print("STARTING", "document functional tests")
    sys.exit(pytest.main([__file__, "-q"]))


if __name__ == "__main__":
    main_tests()
