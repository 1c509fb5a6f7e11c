from __future__ import annotations

import io
import json
import os
import subprocess
import sys

import pytest

from conftest import CORPUS
from metaqasm.cli import EXIT_NON_UNITARY, EXIT_OK, EXIT_RESOURCE, EXIT_TYPE, EXIT_USAGE, build_parser, main

GOLDEN = CORPUS / "golden"


def cli(*argv: str) -> tuple[int, str, str]:
    out, err = io.StringIO(), io.StringIO()
    code = main(list(argv), out, err)
    return code, out.getvalue(), err.getvalue()


@pytest.fixture(autouse=True)
def in_corpus(monkeypatch):
    monkeypatch.chdir(CORPUS)


# -- goldens --------------------------------------------------------------------------


@pytest.mark.parametrize("name", ["ctrladd_n", "teleport_verbatim"])
def test_check_goldens(name):
    code, out, err = cli("check", f"{name}.qasm")
    assert code == EXIT_TYPE
    assert err == (GOLDEN / f"{name}.check.txt").read_text()


@pytest.mark.parametrize("name", ["teleport", "adder_harness", "mult_harness"])
def test_run_goldens(name):
    code, out, _ = cli("run", f"{name}.qasm")
    assert code == EXIT_OK
    assert out == (GOLDEN / f"{name}.run.txt").read_text()


def test_run_dump_golden():
    code, out, _ = cli("run", "qft_run.qasm", "--dump-state")
    assert code == EXIT_OK
    assert out == (GOLDEN / "qft_run.run.txt").read_text()


def test_unroll_golden():
    code, out, _ = cli("unroll", "toffoli.qasm", "--entry", "toffoli")
    assert code == EXIT_OK
    assert out == (GOLDEN / "toffoli.unroll.qasm").read_text()


# -- check ----------------------------------------------------------------------------


@pytest.mark.parametrize("name", ["toffoli", "adder", "mult", "qft", "ctrladd_m", "teleport", "cxor"])
def test_check_accepts(name):
    assert cli("check", f"{name}.qasm") == (EXIT_OK, "", "")


def test_check_directory(tmp_path):
    (tmp_path / "good.qasm").write_text("qreg q[1];\nh(q[0]);\n")
    sub = tmp_path / "sub"
    sub.mkdir()
    (sub / "bad.qasm").write_text("h(q[0]);\n")
    code, _, err = cli("check", str(tmp_path))
    assert code == EXIT_TYPE
    assert "bad.qasm" in err and "good.qasm" not in err


def test_check_syntax_error_is_usage(tmp_path):
    f = tmp_path / "s.qasm"
    f.write_text("qreg q[1]\nh(q[0]")
    code, _, err = cli("check", str(f))
    assert code == EXIT_USAGE and "error[syntax]" in err


def test_check_missing_file():
    code, _, err = cli("check", "does_not_exist.qasm")
    assert code == EXIT_USAGE and "does_not_exist.qasm" in err


def test_strict_typed_rejects_builtins_from_library(tmp_path):
    f = tmp_path / "c.qasm"
    f.write_text("qreg q[1];\ncphase(2)(q[0], q[0]);\n")
    assert cli("check", str(f))[0] == EXIT_OK
    assert cli("check", "--strict-typed", str(f))[0] == EXIT_TYPE


def test_include_path_option_and_env(tmp_path, monkeypatch):
    lib = tmp_path / "lib"
    lib.mkdir()
    (lib / "g.qasm").write_text("gate g(a:Qbit) { h(a) }\n")
    main_file = tmp_path / "m.qasm"
    main_file.write_text('include "g.qasm";\nqreg q[1];\ng(q[0]);\n')
    assert cli("check", str(main_file))[0] == EXIT_USAGE
    assert cli("check", "-I", str(lib), str(main_file))[0] == EXIT_OK
    monkeypatch.setenv("MQASM_INCLUDE_PATH", str(lib))
    assert cli("check", str(main_file))[0] == EXIT_OK


# -- run ------------------------------------------------------------------------------


def test_sample_mode_is_reproducible():
    first = cli("run", "teleport.qasm", "--mode", "sample", "--seed", "17")
    second = cli("run", "teleport.qasm", "--mode", "sample", "--seed", "17")
    assert first == second
    assert first[1].count("branch") == 1
    seen = {cli("run", "teleport.qasm", "--mode", "sample", "--seed", str(s))[1] for s in range(20)}
    assert len(seen) > 1


def test_branch_limit_exit_code():
    code, _, err = cli("run", "teleport.qasm", "--max-branches", "2")
    assert code == EXIT_RESOURCE and err


def test_qubit_limit_exit_code():
    assert cli("run", "adder_harness.qasm", "--max-qubits", "4")[0] == EXIT_RESOURCE


@pytest.mark.parametrize("bad", ["0", "31", "x"])
def test_max_qubits_validation(bad):
    with pytest.raises(SystemExit) as info:
        cli("run", "teleport.qasm", "--max-qubits", bad)
    assert info.value.code == EXIT_USAGE


def test_run_rejects_ill_typed():
    assert cli("run", "ctrladd_n.qasm")[0] == EXIT_TYPE


# -- unroll ---------------------------------------------------------------------------


def test_unroll_requires_index_for_family():
    assert cli("unroll", "adder.qasm", "--entry", "add")[0] == EXIT_USAGE


def test_unroll_index_forms_agree():
    a = cli("unroll", "ctrladd_m.qasm", "--entry", "ctrlAdd", "--index", "2", "--format", "json")
    b = cli("unroll", "ctrladd_m.qasm", "--entry", "ctrlAdd", "--index=2", "--format", "json")
    assert a == b and a[0] == EXIT_OK


def test_unroll_comma_separated_index(tmp_path):
    f = tmp_path / "two.qasm"
    f.write_text("family(n, m) f(a:Qbit[n], b:Qbit[m]) { cx(a[0], b[0]) }\n")
    one = cli("unroll", str(f), "--entry", "f", "--index", "2,3", "--format", "json")
    two = cli("unroll", str(f), "--entry", "f", "--index", "2", "--index", "3", "--format", "json")
    assert one == two and one[0] == EXIT_OK
    assert json.loads(one[1])["qubits"] == 5


def test_unroll_json_counts():
    code, out, _ = cli("unroll", "adder.qasm", "--entry", "add", "--index", "3", "--format", "json")
    data = json.loads(out)
    assert code == EXIT_OK and data["qubits"] == 12 and len(data["events"]) == 92


def test_unroll_statedump():
    code, out, _ = cli("unroll", "toffoli.qasm", "--entry", "toffoli", "--format", "statedump")
    assert code == EXIT_OK
    lines = out.strip().splitlines()
    assert lines[0].startswith("|000⟩ 1")


def test_unroll_non_unitary():
    assert cli("unroll", "teleport.qasm")[0] == EXIT_NON_UNITARY


def test_unroll_output_file(tmp_path):
    target = tmp_path / "out.qasm"
    code, out, _ = cli("unroll", "toffoli.qasm", "--entry", "toffoli", "-o", str(target))
    assert code == EXIT_OK and out == ""
    assert target.read_text() == (GOLDEN / "toffoli.unroll.qasm").read_text()


def test_unroll_bad_index():
    assert cli("unroll", "adder.qasm", "--entry", "add", "--index", "-1")[0] == EXIT_USAGE
    assert cli("unroll", "adder.qasm", "--entry", "add", "--index", "two")[0] == EXIT_USAGE


# -- fmt ------------------------------------------------------------------------------


def test_fmt_check(tmp_path):
    f = tmp_path / "f.qasm"
    f.write_text("h( q [ 0 ] ) ;")
    assert cli("fmt", "--check", str(f))[0] == EXIT_TYPE
    code, out, _ = cli("fmt", str(f))
    assert code == EXIT_OK and out == "h(q[0]);\n"
    f.write_text(out)
    assert cli("fmt", "--check", str(f))[0] == EXIT_OK


# -- entry points ---------------------------------------------------------------------


def test_parser_lists_subcommands():
    help_text = build_parser().format_help()
    for name in ("check", "run", "unroll", "fmt"):
        assert name in help_text


def test_console_script_module():
    proc = subprocess.run(
        [sys.executable, "-m", "metaqasm.cli", "check", "toffoli.qasm"],
        cwd=CORPUS, capture_output=True, text=True, env={**os.environ}, timeout=60,
    )
    assert proc.returncode == 0, proc.stderr
