"""``mqasm`` command-line driver.

Exit codes: 0 success, 1 type errors (or ``fmt --check`` mismatch),
2 parse/IO/usage errors, 3 resource cap exceeded, 4 non-unitary content.
"""
from __future__ import annotations

import argparse
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence, TextIO

from . import __version__
from .elaborate import (
    ElaborationError,
    EntryError,
    NonUnitaryError,
    emit_openqasm2,
    entry_harness,
    simulate_flat,
    to_json,
    unroll,
)
from .semantics import (
    DEFAULT_MAX_BRANCHES,
    DEFAULT_MAX_QUBITS,
    Enumerate,
    InterpreterError,
    QuantumState,
    ResourceLimitError,
    Sample,
    run_program,
)
from .syntax import FileLoader, IncludeError, QasmSyntaxError, load_program, parse_source, pretty_print
from .typecheck import Checker

EXIT_OK = 0
EXIT_TYPE = 1
EXIT_USAGE = 2
EXIT_RESOURCE = 3
EXIT_NON_UNITARY = 4

MAX_QUBITS_LIMIT = 30
INCLUDE_ENV = "MQASM_INCLUDE_PATH"


@dataclass
class CliConfig:
    include_paths: list[Path] = field(default_factory=list)
    seed: int = 0
    measurement_mode: str = "enumerate"
    max_qubits: int = DEFAULT_MAX_QUBITS
    max_branches: int = DEFAULT_MAX_BRANCHES
    output_format: str = "qasm2"
    typed_qasm_strict: bool = False

    def __post_init__(self):
        if not 1 <= self.max_qubits <= MAX_QUBITS_LIMIT:
            raise ValueError(f"max-qubits must be between 1 and {MAX_QUBITS_LIMIT}")
        if self.max_branches < 1:
            raise ValueError("max-branches must be at least 1")

    def loader(self) -> FileLoader:
        return FileLoader(self.include_paths)

    def policy(self):
        if self.measurement_mode == "sample":
            return Sample(self.seed)
        return Enumerate(self.max_branches)


class _Failure(Exception):
    def __init__(self, code: int, text: str):
        self.code = code
        self.text = text


def _load(path: str, cfg: CliConfig):
    try:
        return load_program(path, cfg.loader())
    except QasmSyntaxError as err:
        raise _Failure(EXIT_USAGE, err.render()) from None
    except IncludeError as err:
        raise _Failure(EXIT_USAGE, str(err)) from None
    except OSError as err:
        raise _Failure(EXIT_USAGE, f"{path}: error[io]: {err.strerror or err}") from None
    except UnicodeDecodeError:
        raise _Failure(EXIT_USAGE, f"{path}: error[io]: not valid UTF-8") from None


def _typecheck(ast, cfg: CliConfig, err: TextIO) -> bool:
    checker = Checker(cfg.typed_qasm_strict)
    errors = checker.check_program(ast)
    for w in checker.warnings:
        print(w.render(), file=err)
    for e in errors:
        print(e.render(), file=err)
    return not errors


def _check_one(path: str, cfg: CliConfig) -> tuple[int, list[str]]:
    try:
        ast = _load(path, cfg)
    except _Failure as f:
        return f.code, [f.text]
    checker = Checker(cfg.typed_qasm_strict)
    errors = checker.check_program(ast)
    lines = [w.render() for w in checker.warnings] + [e.render() for e in errors]
    return (EXIT_TYPE if errors else EXIT_OK), lines


def cmd_check(paths: Sequence[str], cfg: CliConfig, out: TextIO, err: TextIO) -> int:
    files: list[str] = []
    for p in paths:
        if os.path.isdir(p):
            files.extend(sorted(str(f) for f in Path(p).rglob("*.qasm")))
        else:
            files.append(p)
    with ThreadPoolExecutor() as pool:
        results = list(pool.map(lambda f: _check_one(f, cfg), files))
    code = EXIT_OK
    for code_i, lines in results:
        for line in lines:
            print(line, file=err)
        code = max(code, code_i)
    return code


def _format_bits(bits: list[int]) -> str:
    text = "".join(str(b) for b in reversed(bits))
    if len(bits) > 1:
        value = sum(b << i for i, b in enumerate(bits))
        text += f" ({value})"
    return text


def cmd_run(path: str, cfg: CliConfig, dump_state: bool, out: TextIO, err: TextIO) -> int:
    ast = _load(path, cfg)
    if not _typecheck(ast, cfg, err):
        return EXIT_TYPE
    try:
        branches = run_program(ast, cfg.policy(), cfg.max_qubits)
    except ResourceLimitError as e:
        print(f"{path}: error[resource]: {e}", file=err)
        return EXIT_RESOURCE
    for n, b in enumerate(branches):
        regs = " ".join(f"{name}={_format_bits(bits)}" for name, bits in b.classical_registers())
        header = f"branch {n} p={b.weight:.12g}"
        print(f"{header} {regs}".rstrip(), file=out)
        if dump_state:
            out.write(b.state.dump())
    return EXIT_OK


def _parse_indices(raw: Optional[list[str]]) -> list[int]:
    values = []
    for item in raw or ():
        for part in item.split(","):
            part = part.strip()
            if not part:
                continue
            try:
                v = int(part)
            except ValueError:
                raise _Failure(EXIT_USAGE, f"error[usage]: index {part!r} is not an integer") from None
            if v < 0:
                raise _Failure(EXIT_USAGE, f"error[usage]: index {v} is negative")
            values.append(v)
    return values


def cmd_unroll(path: str, entry: Optional[str], indices: list[int], cfg: CliConfig,
               output: Optional[str], out: TextIO, err: TextIO) -> int:
    ast = _load(path, cfg)
    if not _typecheck(ast, cfg, err):
        return EXIT_TYPE
    if entry is not None:
        try:
            ast = entry_harness(ast, entry, indices)
        except EntryError as e:
            print(f"error[usage]: {e}", file=err)
            return EXIT_USAGE
        if not _typecheck(ast, cfg, err):
            return EXIT_TYPE
    elif indices:
        print("error[usage]: --index requires --entry", file=err)
        return EXIT_USAGE
    try:
        circuit = unroll(ast)
    except NonUnitaryError as e:
        print(f"error[non-unitary]: {e}", file=err)
        return EXIT_NON_UNITARY
    except ElaborationError as e:
        print(f"error[elaborate]: {e}", file=err)
        return EXIT_TYPE
    if cfg.output_format == "json":
        text = to_json(circuit)
    elif cfg.output_format == "statedump":
        if circuit.num_qubits > cfg.max_qubits:
            print(f"error[resource]: {circuit.num_qubits} qubits exceed the cap of {cfg.max_qubits}", file=err)
            return EXIT_RESOURCE
        text = simulate_flat(circuit, QuantumState.zero(circuit.num_qubits)).dump()
    else:
        text = emit_openqasm2(circuit)
    if output:
        try:
            Path(output).write_text(text, encoding="utf-8")
        except OSError as e:
            print(f"{output}: error[io]: {e.strerror or e}", file=err)
            return EXIT_USAGE
    else:
        out.write(text)
    return EXIT_OK


def cmd_fmt(path: str, check: bool, out: TextIO, err: TextIO) -> int:
    try:
        source = Path(path).read_text(encoding="utf-8")
        canonical = pretty_print(parse_source(source, path))
    except QasmSyntaxError as e:
        print(e.render(), file=err)
        return EXIT_USAGE
    except (OSError, UnicodeDecodeError) as e:
        print(f"{path}: error[io]: {getattr(e, 'strerror', None) or e}", file=err)
        return EXIT_USAGE
    if check:
        if source != canonical:
            print(f"{path}: not in canonical form", file=err)
            return EXIT_TYPE
        return EXIT_OK
    out.write(canonical)
    return EXIT_OK


def _max_qubits(text: str) -> int:
    v = int(text)
    if not 1 <= v <= MAX_QUBITS_LIMIT:
        raise argparse.ArgumentTypeError(f"must be between 1 and {MAX_QUBITS_LIMIT}")
    return v


def _positive(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be at least 1")
    return v


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mqasm", description="metaQASM checker, interpreter and unroller")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("-I", "--include-path", action="append", default=[], metavar="DIR",
                        help=f"extra include directory (also ${INCLUDE_ENV})")
    common.add_argument("--strict-typed", action="store_true", help="accept only the typedQASM subset")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", parents=[common], help="typecheck files or directories")
    p.add_argument("paths", nargs="+")

    p = sub.add_parser("run", parents=[common], help="interpret a program")
    p.add_argument("file")
    p.add_argument("--mode", choices=("sample", "enumerate"), default="enumerate")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--max-qubits", type=_max_qubits, default=DEFAULT_MAX_QUBITS)
    p.add_argument("--max-branches", type=_positive, default=DEFAULT_MAX_BRANCHES)
    p.add_argument("--dump-state", action="store_true", help="print each branch's amplitudes")

    p = sub.add_parser("unroll", parents=[common], help="emit a flat circuit")
    p.add_argument("file")
    p.add_argument("--entry", help="gate or family to instantiate")
    p.add_argument("--index", action="append", metavar="N[,N...]", help="family index argument(s)")
    p.add_argument("--format", choices=("qasm2", "json", "statedump"), default="qasm2")
    p.add_argument("--max-qubits", type=_max_qubits, default=DEFAULT_MAX_QUBITS)
    p.add_argument("-o", "--output", metavar="PATH")

    p = sub.add_parser("fmt", help="print in canonical form")
    p.add_argument("file")
    p.add_argument("--check", action="store_true", help="exit 1 if the file is not canonical")
    return parser


def _config(args: argparse.Namespace) -> CliConfig:
    paths = [Path(p) for p in getattr(args, "include_path", [])]
    env = os.environ.get(INCLUDE_ENV)
    if env:
        paths += [Path(p) for p in env.split(os.pathsep) if p]
    return CliConfig(
        include_paths=paths,
        seed=getattr(args, "seed", 0),
        measurement_mode=getattr(args, "mode", "enumerate"),
        max_qubits=getattr(args, "max_qubits", DEFAULT_MAX_QUBITS),
        max_branches=getattr(args, "max_branches", DEFAULT_MAX_BRANCHES),
        output_format=getattr(args, "format", "qasm2"),
        typed_qasm_strict=getattr(args, "strict_typed", False),
    )


def main(argv: Optional[Sequence[str]] = None, out: Optional[TextIO] = None, err: Optional[TextIO] = None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    sys.setrecursionlimit(max(sys.getrecursionlimit(), 20000))
    args = build_parser().parse_args(argv)
    cfg = _config(args)
    try:
        if args.command == "check":
            return cmd_check(args.paths, cfg, out, err)
        if args.command == "run":
            return cmd_run(args.file, cfg, args.dump_state, out, err)
        if args.command == "unroll":
            return cmd_unroll(args.file, args.entry, _parse_indices(args.index), cfg, args.output, out, err)
        return cmd_fmt(args.file, args.check, out, err)
    except _Failure as f:
        print(f.text, file=err)
        return f.code
    except InterpreterError as e:
        print(f"error[runtime]: {e}", file=err)
        return EXIT_TYPE


if __name__ == "__main__":
    sys.exit(main())
