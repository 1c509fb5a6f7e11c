from __future__ import annotations

from dataclasses import dataclass

from .ast import SourceSpan

KEYWORDS = frozenset(
    "qreg creg gate family instance reverse for do in if measure reset include OPENQASM".split()
)

# longest punctuation first
PUNCTUATION = ("==", "->", "..", ";", ",", "(", ")", "[", "]", "{", "}", "+", "-", "*", "=", ":", "/", "^")


class QasmSyntaxError(Exception):
    """Lexical or grammatical error, located by a span."""

    def __init__(self, span: SourceSpan, message: str, expected=()):
        self.span = span
        self.message = message
        self.expected = tuple(sorted(set(expected)))
        super().__init__(self.render())

    def render(self) -> str:
        text = f"{self.span}: error[syntax]: {self.message}"
        if self.expected:
            text += "\nnote: expected one of " + ", ".join(self.expected)
        return text


class LexError(QasmSyntaxError):
    pass


@dataclass(frozen=True)
class Token:
    kind: str  # "ident", "nat", "real", "string", "inf", "eof", a keyword, or a punctuation mark
    text: str
    span: SourceSpan

    @property
    def value(self):
        if self.kind == "nat":
            return int(self.text)
        if self.kind == "string":
            return self.text[1:-1]
        return self.text

    def __repr__(self) -> str:
        if self.kind in ("ident", "nat", "real", "string"):
            return f"{self.kind}({self.value})"
        return self.kind


def tokenize(source: str, file: str = "<input>") -> list[Token]:
    tokens: list[Token] = []
    i = 0
    line, col = 1, 1
    n = len(source)

    def span(length: int) -> SourceSpan:
        return SourceSpan(file, line, col, length)

    while i < n:
        ch = source[i]
        if ch == "\n":
            i += 1
            line, col = line + 1, 1
            continue
        if ch in " \t\r\f\v":
            i += 1
            col += 1
            continue
        if source.startswith("//", i):
            while i < n and source[i] != "\n":
                i += 1
            continue
        if ch.isascii() and ch.isalpha():
            j = i + 1
            while j < n and source[j].isascii() and (source[j].isalnum() or source[j] == "_"):
                j += 1
            text = source[i:j]
            kind = text if text in KEYWORDS else "ident"
            tokens.append(Token(kind, text, span(j - i)))
        elif ch.isascii() and ch.isdigit():
            j = i
            while j < n and source[j].isascii() and source[j].isdigit():
                j += 1
            kind = "nat"
            # "2.0" is a real; "1..n" is a natural followed by ".."
            if j + 1 < n and source[j] == "." and source[j + 1].isascii() and source[j + 1].isdigit():
                j += 1
                while j < n and source[j].isascii() and source[j].isdigit():
                    j += 1
                kind = "real"
            tokens.append(Token(kind, source[i:j], span(j - i)))
        elif ch == '"':
            j = i + 1
            while j < n and source[j] not in '"\n':
                j += 1
            if j >= n or source[j] != '"':
                raise LexError(span(j - i), "unterminated string literal")
            j += 1
            tokens.append(Token("string", source[i:j], span(j - i)))
        elif ch == "∞":
            j = i + 1
            tokens.append(Token("inf", ch, span(1)))
        else:
            for p in PUNCTUATION:
                if source.startswith(p, i):
                    j = i + len(p)
                    tokens.append(Token(p, p, span(len(p))))
                    break
            else:
                raise LexError(span(1), f"illegal character {ch!r}")
        col += j - i
        i = j
    return tokens
