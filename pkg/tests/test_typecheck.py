from __future__ import annotations

import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import expectations, load
from metaqasm.syntax import ast as A, parse_source
from metaqasm.typecheck import (
    BUILTINS,
    EMPTY_INDEX_CONTEXT,
    Checker,
    ErrorKind,
    TypeCheckError,
    TypeContext,
    check_command,
    check_expr,
    check_program,
    check_unitary,
    kind_check,
)

NAT = EMPTY_INDEX_CONTEXT.extend("n", A.NatLit(0), A.Infinity())
n = A.IndexVar("n")
Q = A.Qbit()


def qreg(size) -> A.Reg:
    return A.Reg(A.Qbit(), size)


def ix(text: str) -> A.IndexExpr:
    return parse_source(f"h(q[{text}]);").stmt.arg.index


def expr(text: str) -> A.Expr:
    return parse_source(f"h({text});").stmt.arg


def unitary(text: str) -> A.UnitaryStmt:
    return parse_source(text).stmt


def codes(errors) -> list[str]:
    return [e.kind.code for e in errors]


def check_src(text: str, **kw):
    return check_program(parse_source(text, "t.qasm"), **kw)


# -- kinds -------------------------------------------------------------------------


def test_kind_ok():
    assert kind_check(NAT, qreg(n)) == []


def test_kind_unbound():
    (err,) = kind_check(EMPTY_INDEX_CONTEXT, qreg(n))
    assert err.kind is ErrorKind.UNBOUND_INDEX and "n" in err.message


def test_kind_possibly_negative():
    (err,) = kind_check(NAT, qreg(ix("n-2")))
    assert err.kind is ErrorKind.NEGATIVE_LENGTH
    assert str(err.constraint) == "n-2 >= 0"


def test_kind_family_binds_its_variables():
    fam = A.Family(("m",), (qreg(A.IndexVar("m")), qreg(ix("m-1"))))
    assert kind_check(EMPTY_INDEX_CONTEXT, fam) == []
    bad = A.Family(("m",), (qreg(ix("m-2")),))
    assert codes(kind_check(EMPTY_INDEX_CONTEXT, bad)) == ["E006"]


# -- expressions -------------------------------------------------------------------


def test_deref_with_cancellation():
    gamma = TypeContext().extend("x", qreg(ix("n+2")))
    assert check_expr(NAT, gamma, expr("x[n+1]")) == Q


def test_deref_out_of_bounds():
    gamma = TypeContext().extend("x", qreg(n))
    with pytest.raises(TypeCheckError) as info:
        check_expr(NAT, gamma, expr("x[n]"))
    assert str(info.value.constraint) == "n < n"


def test_instance_substitutes():
    add = A.Family(("n",), (qreg(n),) * 4)
    gamma = TypeContext().extend("add", add)
    t = check_expr(EMPTY_INDEX_CONTEXT, gamma, expr("instance(3) add"))
    assert t == A.Circuit((qreg(A.NatLit(3)),) * 4)


def test_instance_arity():
    gamma = TypeContext().extend("add", A.Family(("n",), (qreg(n),)))
    with pytest.raises(TypeCheckError) as info:
        check_expr(EMPTY_INDEX_CONTEXT, gamma, expr("instance(1, 2) add"))
    assert info.value.kind is ErrorKind.ARITY


def test_unbound_identifier():
    with pytest.raises(TypeCheckError) as info:
        check_expr(EMPTY_INDEX_CONTEXT, TypeContext(), expr("y"))
    assert info.value.kind is ErrorKind.UNBOUND


def test_subtyping_accepts_longer_register():
    gamma = TypeContext().extend("x", qreg(ix("n+3")))
    assert check_expr(NAT, gamma, expr("x"), qreg(n)) == qreg(ix("n+3"))
    with pytest.raises(TypeCheckError):
        check_expr(NAT, gamma, expr("x"), qreg(ix("n+4")))


@given(st.integers(0, 6), st.integers(0, 6), st.integers(0, 6))
def test_subtyping_is_transitive(a, b, c):
    """Accepting x against Qbit[I'] and proving I <= I' means x is accepted against Qbit[I]."""
    gamma = TypeContext().extend("x", qreg(A.Add(n, A.NatLit(a))))
    wide, narrow = A.Add(n, A.NatLit(b)), A.Add(n, A.NatLit(c))
    def ok(size):
        try:
            check_expr(NAT, gamma, expr("x"), qreg(size))
            return True
        except TypeCheckError:
            return False
    if ok(wide) and c <= b:
        assert ok(narrow)
    assert ok(n)


def test_slice_type():
    delta = EMPTY_INDEX_CONTEXT.extend("n", A.NatLit(1), A.Infinity()).extend("i", A.NatLit(0), ix("n-1"))
    gamma = TypeContext().extend("z", qreg(ix("2*n")))
    t = check_expr(delta, gamma, expr("z[i..i+n-1]"), qreg(n))
    assert isinstance(t, A.Reg)


def test_slice_must_be_ordered():
    gamma = TypeContext().extend("z", qreg(A.NatLit(4)))
    with pytest.raises(TypeCheckError):
        check_expr(EMPTY_INDEX_CONTEXT, gamma, expr("z[3..1]"))


# -- unitary statements ------------------------------------------------------------


def test_toffoli_body():
    body = load("toffoli").body
    gamma = TypeContext((("x", Q), ("y", Q), ("z", Q)))
    assert check_unitary(EMPTY_INDEX_CONTEXT, gamma, body) == []


def test_adder_loop_body():
    prog = load("adder")
    fam = prog.scope.scope
    loop = A.flatten_useq(fam.body)[-1]
    delta = EMPTY_INDEX_CONTEXT.extend("n", A.NatLit(0), A.Infinity()).extend("i", A.NatLit(1), ix("n-1"))
    gamma = TypeContext(
        [("toffoli", A.Circuit((Q, Q, Q))), ("maj", A.Circuit((Q,) * 4))] + [(x, qreg(n)) for x in ("a", "b", "c", "anc")]
    )
    assert check_unitary(delta, gamma, loop.body) == []


def test_cx_on_bit():
    gamma = TypeContext((("c", A.Reg(A.Qbit(), A.NatLit(1))), ("b", A.Bit())))
    (err,) = check_unitary(EMPTY_INDEX_CONTEXT, gamma, unitary("cx(c[0], b);"))
    assert err.kind is ErrorKind.MISMATCH
    assert "expected Qbit, found Bit" in err.message


def test_errors_are_collected():
    gamma = TypeContext((("q", qreg(A.NatLit(2))),))
    errs = check_unitary(EMPTY_INDEX_CONTEXT, gamma, unitary("{ h(q[2]); cx(q[0], q[5]); t(r) }"))
    assert codes(errs) == ["E003", "E003", "E001"]


def test_family_needs_instance():
    errs = check_src("family(n) f(a:Qbit[n]) { h(a[0]) }\nqreg q[2];\nf(q);")
    assert codes(errs) == ["E007"]


def test_loop_variable_may_not_shadow_register():
    errs = check_src("qreg i[2];\nfor i=0..1 do { h(i[0]) }")
    assert codes(errs) == ["E009"]


def test_empty_loop_range_typechecks():
    assert check_src("qreg q[2];\nfor i=1..0 do { h(q[i]) }") == []


def test_reverse_checks_body():
    assert codes(check_src("qreg q[1];\nreverse { h(q[1]) }")) == ["E003"]


def test_cphase_builtin():
    assert check_src("qreg q[2];\ncphase(3)(q[0], q[1]);") == []
    assert check_src("qreg q[2];\ninstance(3) cphase(q[0], q[1]);") == []


# -- commands and programs ------------------------------------------------------------


def test_ctrladd_n_rejected_at_x_n_minus_2():
    errs = check_program(load("ctrladd_n"))
    assert len(errs) == 1
    (err,) = errs
    assert "x[n-2]" in err.message
    assert str(err.constraint) == "n-2 >= 0"
    assert err.span.line == 13


def test_ctrladd_m_accepted():
    assert check_program(load("ctrladd_m")) == []


@pytest.mark.parametrize("name", ["adder", "mult", "teleport", "toffoli", "qft"])
def test_listings_accepted(name):
    assert check_program(load(name)) == []


def test_unbound_size_variable():
    assert codes(check_src("qreg q[y];")) == ["E002"]


def test_measure_direction():
    errs = check_src("qreg q[1];\ncreg c[1];\nmeasure c[0] -> q[0];")
    assert codes(errs) == ["E004", "E004"]


def test_if_condition_must_be_bit():
    assert codes(check_src("qreg q[1];\nif(q[0]==1) h(q[0]);")) == ["E004"]


def test_if_literal_warning():
    checker = Checker()
    prog = parse_source("qreg q[1];\ncreg c[1];\nif(c[0]==2) h(q[0]);")
    assert checker.check_program(prog) == []
    assert [w.kind for w in checker.warnings] == [ErrorKind.NON_BIT_LITERAL]


def test_gate_scope():
    errs = check_src("qreg q[1] in { gate g(a:Qbit) { h(a) } in { g(q[0]) } };\ng(q[0]);")
    # neither g nor q is visible after the block; the call stops at g
    assert codes(errs) == ["E001"]
    assert "g" in errs[0].message


def test_shadowing_across_blocks():
    assert check_src("qreg q[1];\nqreg q[3];\nh(q[2]);") == []


def test_gate_body_checked_at_declaration():
    errs = check_src("gate g(a:Qbit, b:Qbit) { cx(a, c) }")
    assert codes(errs) == ["E001"]


def test_family_argument_types_compared_up_to_renaming():
    src = """
    family(k) sub(a:Qbit, b:Qbit[k], c:Qbit[k], d:Qbit) { h(a) }
    family(n) use(x:Qbit[n], f:Family(m)(Qbit, Qbit[m], Qbit[m], Qbit)) { h(x[0]) }
    qreg r[2];
    instance(2) use(r, sub);
    """
    assert check_src(src) == []


def test_family_argument_shape_mismatch():
    src = """
    family(k) sub(a:Qbit, b:Qbit[k+1]) { h(a) }
    family(n) use(x:Qbit[n], f:Family(m)(Qbit, Qbit[m])) { h(x[0]) }
    qreg r[2];
    instance(2) use(r, sub);
    """
    assert codes(check_src(src)) == ["E004"]


def test_instance_index_must_be_positive():
    src = "family(n) f(a:Qbit[n]) { h(a[0]) }\nqreg q[1];\ninstance(0) f(q);"
    assert codes(check_src(src)) == ["E003"]


def test_unresolved_include():
    assert codes(check_src('include "x.qasm";')) == ["E011"]


def test_rendering():
    (err,) = check_src("qreg q[2];\nh(q[2]);")
    assert err.render() == (
        "t.qasm:2:3: error[E003]: index may exceed register length in q[2]\n"
        "note: could not prove 2 < 2 under {}"
    )


def test_check_command_uses_given_contexts():
    gamma = BUILTINS.extend("q", qreg(A.NatLit(1)))
    assert check_command(EMPTY_INDEX_CONTEXT, gamma, parse_source("h(q[0]);")) == []


def test_checking_is_deterministic():
    prog = load("teleport_verbatim")
    first = [e.render() for e in check_program(prog)]
    assert first and all([e.render() for e in check_program(prog)] == first for _ in range(5))


# -- typedQASM mode --------------------------------------------------------------------


@pytest.mark.parametrize("name", ["toffoli", "teleport"])
def test_strict_accepts_typed_listings(name):
    assert check_program(load(name), strict_typed=True) == []


@pytest.mark.parametrize(
    "source",
    [
        "family(n) f(a:Qbit[n]) { h(a[0]) }",
        "qreg q[2];\nfor i=0..1 do { h(q[i]) }",
        "qreg q[1];\nreverse { h(q[0]) }",
        "qreg q[2];\ncphase(2)(q[0], q[1]);",
        "qreg q[2];\nh(q[1+0]);",
    ],
)
def test_strict_rejects_meta_features(source):
    assert "E008" in codes(check_src(source, strict_typed=True))


# -- corpus ------------------------------------------------------------------------------


@pytest.mark.parametrize("name, expect", sorted(expectations().items()))
def test_corpus_verdicts(name, expect):
    errs = check_program(load(name))
    assert (not errs) == (expect["check"] == "accept")
    if "unproven" in expect:
        assert [str(e.constraint) for e in errs] == expect["unproven"]
