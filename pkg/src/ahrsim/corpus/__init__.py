"""Bundled example programs.

Each file may carry ``; expect: <printed value>`` or
``; expect-error: <ErrorKind>`` header comments.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Optional

DIR = Path(__file__).parent


@dataclass(frozen=True)
class CorpusProgram:
    name: str
    path: Path
    source: str
    expect: Optional[str]
    expect_error: Optional[str]


def _header(source: str, key: str) -> Optional[str]:
    prefix = f"; {key}:"
    for line in source.splitlines():
        if line.startswith(prefix):
            return line[len(prefix):].strip()
    return None


def programs() -> list[CorpusProgram]:
    out = []
    for path in sorted(DIR.glob("*.lisp")):
        src = path.read_text()
        out.append(CorpusProgram(path.stem, path, src, _header(src, "expect"),
                                 _header(src, "expect-error")))
    return out


def get(name: str) -> CorpusProgram:
    for prog in programs():
        if prog.name == name:
            return prog
    raise KeyError(name)
