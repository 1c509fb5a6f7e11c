"""Tokenizer, parser, include resolution and pretty printer."""
from . import ast
from .includes import FileLoader, IncludeError, load_program, resolve_includes
from .lexer import LexError, QasmSyntaxError, Token, tokenize
from .parser import parse_program, parse_source
from .printer import format_expr, format_index, format_type, pretty_print

__all__ = [
    "ast",
    "FileLoader",
    "IncludeError",
    "LexError",
    "QasmSyntaxError",
    "Token",
    "format_expr",
    "format_index",
    "format_type",
    "load_program",
    "parse_program",
    "parse_source",
    "pretty_print",
    "resolve_includes",
    "tokenize",
]
