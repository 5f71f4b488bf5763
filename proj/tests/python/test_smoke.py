"""Smoke tests for the python bindings."""

import pytest

clo = pytest.importorskip("clo")


def test_builtin_tables():
    gap = clo.builtin("gap")
    assert gap.size == 6
    assert gap.mul(gap.omega("lr"), gap.omegastar("lr")) == "g"
    assert clo.validate_axioms(gap)["passed"]


def test_chain_nesting_lengths():
    for k in range(5):
        assert clo.builtin(f"delta:{k}").gnl() == k
    assert clo.builtin("gap").gnl() == 1


def test_eval_and_membership():
    gap = clo.builtin("gap")
    assert clo.eval_term(gap, {"a": "lr"}, "a^w . a^w*") == "g"
    assert clo.member(gap, {"a": "lr"}, ["g"], "a^w . a^w*")
    assert not clo.member(gap, {"a": "lr"}, ["g"], "aaa")


def test_term_round_trip():
    assert clo.parse_term("(a b)^w") == "(a b)^w"
    assert clo.finite_witness("sh{a,b}", 1) == "ab"
    assert clo.rank_of("(a^w)^w", "a") == "finite:2"
    assert clo.directed_rank("(a^w)^w*", "a", "w") == "finite:1"


def test_identities_and_green():
    u1 = clo.builtin("u1")
    assert clo.check_identity(u1, "shuffle_trivial")["passed"]
    gap = clo.builtin("gap")
    assert not clo.check_identity(gap, "shuffle_trivial")["passed"]
    green = clo.green(gap)
    assert sorted(len(c) for c in green["j"]) == [1, 1, 4]


def test_constructions():
    u1 = clo.builtin("u1")
    product = clo.direct_product(u1, u1)
    assert product.size == 4
    assert clo.divides(u1, clo.builtin("delta:1"))["decision"] == "yes"
    bp = clo.block_product(u1, u1)
    assert bp.algebra.size == 32
    sn = clo.build_sn("ab", 2)
    assert clo.check_identity(sn.algebra, "shuffle_power_trivial")["passed"]


def test_compile_and_model_check():
    compiled = clo.compile("EI[2] x. a(x)", "fo1_inf", "ab")
    assert compiled.member("(a^w)^w")
    assert not compiled.member("a^w")
    assert clo.mc_term("(a^w)^w", "EI[2] x. a(x)")
    assert clo.mc_finite("ab", "E x. E y. (a(x) & b(y) & x<y)")
    assert not clo.mc_finite("ba", "E x. E y. (a(x) & b(y) & x<y)")


def test_block_product_via_transducer():
    compiled = clo.compile("EI[1] x. a(x)", "foinf", "ab")
    for word in ["", "a", "ab", "ba", "bb", "aab"]:
        term = " ".join(word) if word else "eps"
        assert compiled.member(term) == compiled.member_via_bpp(term)


def test_syntactic_quotient():
    d2 = clo.builtin("delta:2")
    q = clo.syntactic_quotient(d2, {"a": "0"}, ["2"])
    assert q["quotient"].size == 4
    q2 = clo.syntactic_quotient(d2, {"a": "0"}, ["0", "1", "2"])
    assert clo.is_isomorphic(q2["quotient"], clo.builtin("u1"))


def test_errors_surface_as_exceptions():
    with pytest.raises(clo.CloError):
        clo.builtin("nonsense")
    with pytest.raises(Exception):
        clo.parse_term("sh{")
