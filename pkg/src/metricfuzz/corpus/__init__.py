"""Example programs shipped with the package.

Top-level ``*.fuzz`` files are accepted by the checker; ``rejected/`` holds
programs the checker must refuse.
"""

from __future__ import annotations

from pathlib import Path
from typing import List

from ..parser import Program, parse_program

CORPUS_DIR = Path(__file__).resolve().parent


def accepted() -> List[Path]:
    return sorted(CORPUS_DIR.glob("*.fuzz"))


def rejected() -> List[Path]:
    return sorted((CORPUS_DIR / "rejected").glob("*.fuzz"))


def path(name: str) -> Path:
    for p in accepted() + rejected():
        if p.stem == name:
            return p
    raise KeyError(f"no corpus program named {name!r}")


def load(name: str) -> Program:
    return parse_program(path(name).read_text(encoding="utf-8"))
