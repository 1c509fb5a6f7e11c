from __future__ import annotations

import os
from pathlib import Path
from typing import Iterable, Optional

from . import ast as A
from .parser import parse_source

STDLIB_DIR = Path(__file__).resolve().parent.parent / "stdlib"


class IncludeError(Exception):
    def __init__(self, message: str, span: Optional[A.SourceSpan] = None):
        self.span = span
        self.message = message
        where = f"{span}: " if span else ""
        super().__init__(f"{where}error[include]: {message}")


class FileLoader:
    """Finds include targets: the including file's directory, then the search
    path, then the bundled standard library (``qelib1.inc``)."""

    def __init__(self, search_path: Iterable[os.PathLike | str] = (), use_stdlib: bool = True):
        self.search_path = [Path(p) for p in search_path]
        if use_stdlib:
            self.search_path.append(STDLIB_DIR)

    def resolve(self, name: str, relative_to: Optional[Path]) -> Path:
        candidates = []
        if Path(name).is_absolute():
            candidates.append(Path(name))
        else:
            if relative_to is not None:
                candidates.append(relative_to / name)
            candidates.extend(d / name for d in self.search_path)
        for path in candidates:
            if path.is_file():
                return path.resolve()
        raise FileNotFoundError(name)

    def read(self, path: Path) -> str:
        return path.read_text(encoding="utf-8")


def resolve_includes(
    ast: A.Command,
    loader: Optional[FileLoader] = None,
    base_dir: Optional[Path] = None,
    _stack: tuple[Path, ...] = (),
) -> A.Command:
    """Replace every ``include`` by the declarations of the included file,
    scoped over the remainder of the program."""
    loader = loader or FileLoader()

    def go(c: A.Command) -> A.Command:
        if isinstance(c, A.Include):
            try:
                path = loader.resolve(c.path, base_dir)
            except FileNotFoundError:
                raise IncludeError(f"cannot find include file {c.path!r}", c.span) from None
            if path in _stack:
                cycle = " -> ".join(str(p) for p in (*_stack[_stack.index(path):], path))
                raise IncludeError(f"include cycle: {cycle}", c.span)
            included = parse_source(loader.read(path), _display(path))
            included = resolve_includes(included, loader, path.parent, (*_stack, path))
            return A.splice(_strip_header(included), go(c.scope))
        if isinstance(c, A.DECLARATIONS):
            return A.with_scope(c, go(c.scope))
        if isinstance(c, A.Seq):
            return A.Seq(go(c.first), go(c.second), c.span)
        return c

    return go(ast)


def _strip_header(c: A.Command) -> A.Command:
    return c.scope if isinstance(c, A.Header) else c


def _display(path: Path) -> str:
    try:
        return os.path.relpath(path)
    except ValueError:
        return str(path)


def load_program(path: os.PathLike | str, loader: Optional[FileLoader] = None) -> A.Command:
    """Parse a file and resolve its includes.  Spans name the file as given."""
    shown = str(path)
    path = Path(path).resolve()
    loader = loader or FileLoader()
    ast = parse_source(loader.read(path), shown)
    return resolve_includes(ast, loader, path.parent, (path,))
