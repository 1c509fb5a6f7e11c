"""metaQASM: parser, sized-type checker, reference interpreter and circuit elaborator."""

__version__ = "0.1.0"
