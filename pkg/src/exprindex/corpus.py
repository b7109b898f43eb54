"""Corpus files: one expression per line, ``#`` comments, blank lines ignored."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Tuple

from .expr_core import Arena, ExprRef, ParseError, parse


class CorpusError(ValueError):
    def __init__(self, source: str, line: int, error: ParseError):
        self.source = source
        self.line = line
        self.error = error
        super().__init__(f"{source}:{line}: {error}")


@dataclass
class Corpus:
    source: str
    arena: Arena = field(default_factory=Arena)
    # (line number, expression)
    entries: List[Tuple[int, ExprRef]] = field(default_factory=list)

    @property
    def expressions(self) -> List[ExprRef]:
        return [e for _, e in self.entries]

    def __len__(self):
        return len(self.entries)


def parse_corpus(text: str, source: str = "<string>") -> Corpus:
    corpus = Corpus(source)
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0]
        if not line.strip():
            continue
        try:
            corpus.entries.append((lineno, parse(line, corpus.arena)))
        except ParseError as exc:
            raise CorpusError(source, lineno, exc) from None
    return corpus


def load_corpus(path: str) -> Corpus:
    with open(path, encoding="utf-8") as f:
        return parse_corpus(f.read(), path)
