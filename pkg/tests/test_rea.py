import random
from fractions import Fraction

import pytest

from braidorbit.errors import ShiftUnavailable
from braidorbit.hecke import build_dj_gl, build_flip, build_q_super, build_superflip
from braidorbit.rea import (
    NCPoly,
    PBWRules,
    centrality_check,
    ch_polynomial_entries,
    ch_verify,
    complementarity_check,
    generating_matrix,
    is_zero_mod,
    nc_matmul,
    power_sum_element,
    relation_space,
    shift_generators,
    super_pbw_reduce,
)
from braidorbit.scalar import EMPTY_TABLE, Scalar, SymbolTable, parse_scalar

HT = SymbolTable(["h"])


def qc(v):
    return Scalar.from_fraction(EMPTY_TABLE, Fraction(v))


def test_relation_dims_flip2():
    hs = build_flip(2)
    assert relation_space(hs, "minus").dim == 6   # commutators of gl(2)
    assert relation_space(hs, "plus").dim == 10   # symmetric square
    assert complementarity_check(hs)


def test_relation_dims_dj2():
    hs = build_dj_gl(2, qc("7/5"))
    assert relation_space(hs, "minus").dim == 6
    assert relation_space(hs, "plus").dim == 10
    assert complementarity_check(hs)


def test_relation_dims_superflip11():
    # Sym^2 of gl(1|1) is 8-dimensional (3 even-even + 4 mixed + 1 odd-odd),
    # so the defining relations span a 16 - 8 = 8 dimensional subspace
    hs = build_superflip(1, 1)
    assert relation_space(hs, "minus").dim == 8
    assert relation_space(hs, "plus").dim == 8
    assert complementarity_check(hs)


def test_is_zero_mod_basics():
    hs = build_dj_gl(2, qc("7/5"))
    rs = relation_space(hs, "minus")
    # every defining relation entry is in the ideal
    for e in rs.relations:
        if not e.is_zero():
            ok, res = is_zero_mod(e, rs)
            assert ok and res.is_zero()
    # a bare squared generator is not
    g = NCPoly.generator(2, EMPTY_TABLE, 0, 0)
    ok, res = is_zero_mod(g * g, rs)
    assert not ok and not res.is_zero()
    # ideal closure in degree 3
    rel = next(e for e in rs.relations if not e.is_zero())
    ok, _ = is_zero_mod(rel * g, rs)
    assert ok
    ok, _ = is_zero_mod(g * rel, rs)
    assert ok


def test_is_zero_mod_order_independence():
    hs = build_dj_gl(2, qc("7/5"))
    rng = random.Random(4)
    residuals = []
    g = NCPoly.generator(2, EMPTY_TABLE, 0, 1)
    probe = g * g * NCPoly.generator(2, EMPTY_TABLE, 1, 0)
    for _ in range(3):
        rs = relation_space(hs, "minus")
        shuffled = rs.basis[:]
        rng.shuffle(shuffled)
        rs.basis = shuffled
        ok, res = is_zero_mod(probe, rs)
        residuals.append((ok, sorted((w, str(c)) for w, c in res.terms.items())))
    assert len(set(map(str, residuals))) == 1


def test_power_sum_element_k1_and_flip():
    hs = build_dj_gl(2, qc("7/5"))
    p1 = power_sum_element(1, hs)
    # sum over generators weighted by the trace operator
    expect = NCPoly.zero(2, EMPTY_TABLE)
    for i in range(2):
        for j in range(2):
            cv = hs.c_op.data[j][i]
            if cv:
                expect = expect + NCPoly.generator(2, EMPTY_TABLE, i, j) * cv
    assert p1 == expect

    flip = build_flip(2)
    p2 = power_sum_element(2, flip)
    # classical Tr L^2 = sum_{a,b} l[a][b] l[b][a]
    expect = NCPoly.zero(2, EMPTY_TABLE)
    L = generating_matrix(2, EMPTY_TABLE)
    for a in range(2):
        for b in range(2):
            expect = expect + L[a][b] * L[b][a]
    assert p2 == expect
    # word count stays within the crude bound before collection
    p3 = power_sum_element(3, build_dj_gl(2, qc("7/5")))
    assert len(p3.terms) <= 16


def test_centrality():
    dj = build_dj_gl(2, qc("7/5"))
    rs = relation_space(dj, "minus")
    assert centrality_check(1, dj, rs)
    assert centrality_check(2, dj, rs)
    sf = build_superflip(1, 1)
    rs2 = relation_space(sf, "minus")
    assert centrality_check(1, sf, rs2)
    assert centrality_check(2, sf, rs2)


def test_ch_verify_flip2_classical():
    ok, report = ch_verify(build_flip(2), 2, 0)
    assert ok
    assert report["degree"] == 2


def test_ch_verify_dj2():
    ok, report = ch_verify(build_dj_gl(2, qc("7/5")), 2, 0)
    assert ok and not report["failures"]


def test_ch_verify_qsuper11():
    ok, report = ch_verify(build_q_super(1, 1, qc("9/7")), 1, 1)
    assert ok
    assert report["degree"] == 3


def test_shift_substitution():
    x = NCPoly.generator(2, EMPTY_TABLE, 0, 0) * NCPoly.generator(2, EMPTY_TABLE, 1, 1)
    c = qc(3)
    shifted = shift_generators(x, c)
    # (l00 + 3)(l11 + 3) = l00 l11 + 3 l00 + 3 l11 + 9
    assert shifted.terms[(0, 3)] == Scalar.one(EMPTY_TABLE)
    assert shifted.terms[(0,)] == qc(3)
    assert shifted.terms[(3,)] == qc(3)
    assert shifted.terms[()] == qc(9)


def test_mrea_zero_test_via_shift():
    t = HT
    h = Scalar.from_symbol(t, "h")
    hs = build_q_super(1, 1, Scalar.from_fraction(t, Fraction(9, 7)))
    rs = relation_space(hs, "mrea", h=h)
    # the modified relations themselves vanish in the modified algebra
    checked = 0
    for e in rs.relations:
        if not e.is_zero():
            ok, res = is_zero_mod(e, rs)
            assert ok, res
            checked += 1
    assert checked > 0
    # Tr_R Lhat is central in the modified algebra too
    p1 = power_sum_element(1, hs)
    g = NCPoly.generator(2, t, 0, 1)
    ok, _ = is_zero_mod(p1 * g - g * p1, rs)
    assert ok


def test_mrea_shift_unavailable_at_q1():
    t = HT
    h = Scalar.from_symbol(t, "h")
    hs = build_superflip(1, 1, t)
    rs = relation_space(hs, "mrea", h=h)
    x = NCPoly.generator(2, t, 0, 0)
    with pytest.raises(ShiftUnavailable):
        is_zero_mod(x * x, rs)


def test_pbw_reduce_basics():
    t = HT
    h = Scalar.from_symbol(t, "h")
    # ordered words stay put
    x = NCPoly(2, t, {(0, 1): Scalar.one(t)})
    assert super_pbw_reduce(x, 1, 1, h) == x
    # h = 0 collapses to plain (super)symmetrization with signs
    zero_h = Scalar.zero(t)
    y = NCPoly(2, t, {(1, 0): Scalar.one(t)})   # l[1,2] * l[1,1] out of order
    red = super_pbw_reduce(y, 1, 1, zero_h)
    assert red.terms == {(0, 1): Scalar.one(t)}
    # odd-odd pair anticommutes at h = 0: l[2,1] l[1,2] -> -l[1,2] l[2,1]
    z = NCPoly(2, t, {(2, 1): Scalar.one(t)})
    redz = super_pbw_reduce(z, 1, 1, zero_h)
    assert redz.terms == {(1, 2): -Scalar.one(t)}


def test_pbw_relations_reduce_to_zero():
    t = HT
    h = Scalar.from_symbol(t, "h")
    rules = PBWRules(1, 1, h)
    hs = build_superflip(1, 1, t)
    from braidorbit.rea import reflection_matrix

    entries = reflection_matrix(hs, "mrea", h)
    for row in entries:
        for e in row:
            if e is not None and not e.is_zero():
                assert rules.reduce(e).is_zero()
    # products of relations with generators also straighten to zero
    g = NCPoly.generator(2, t, 1, 0)
    some = next(e for row in entries for e in row if e is not None and not e.is_zero())
    assert rules.reduce(some * g).is_zero()
    assert rules.reduce(g * some).is_zero()


def test_pbw_normal_form_rank_degree2():
    # normal forms of all words of degree <= 2 span one dimension per ordered
    # monomial: 8 in degree 2 (pairs a <= b minus the two odd squares),
    # 4 in degree 1, 1 constant = 13; the kernel is the 8-dim relation slice
    t = HT
    h = Scalar.from_symbol(t, "h")
    rules = PBWRules(1, 1, h)
    from braidorbit.linalg import RowSpace

    words = [()] + [(g,) for g in range(4)] + [(a, b) for a in range(4) for b in range(4)]
    index = {}
    rs = RowSpace()
    for w in words:
        x = NCPoly(2, t, {w: Scalar.one(t)})
        red = rules.reduce(x)
        row = {}
        for nw, c in red.terms.items():
            row[index.setdefault(nw, len(index))] = c
        rs.add(row)
    assert rs.rank == 13
    # and the normal forms only use ordered, non-odd-square words
    for w in index:
        for i in range(len(w) - 1):
            assert not rules.is_violation(w[i], w[i + 1])


def test_complementarity_larger_builtins():
    assert complementarity_check(build_superflip(2, 2))
    assert complementarity_check(build_q_super(2, 1, qc("9/7")))


def test_gl11_shifted_ch_reduces_via_straightening():
    # the degree-3 Cayley-Hamilton identity of the shifted algebra, taken to
    # q = 1 wordwise (every coefficient has a finite limit), straightens to 0
    # in the h-scaled enveloping algebra of gl(1|1)
    t = SymbolTable(["q", "h"])
    q = Scalar.from_symbol(t, "q")
    h = Scalar.from_symbol(t, "h")
    hs = build_q_super(1, 1, q)
    from braidorbit.rea import ch_polynomial_entries

    entries = ch_polynomial_entries(hs, 1, 1)
    xi = q - q.inv()
    shift = -(h * xi.inv())
    reduced_any = False
    for e in entries:
        shifted = shift_generators(e, shift)
        at_q1 = shifted.map_coeffs(lambda c: c.substitute({"q": 1}))
        nf = super_pbw_reduce(at_q1, 1, 1, h)
        assert nf.is_zero(), nf
        reduced_any = reduced_any or not e.is_zero()
    assert reduced_any


def test_mrea_shift_and_pbw_agree_on_centrality():
    # the same low-degree statement holds through both zero-test routes:
    # shift route at generic q, straightening route at q = 1
    t = SymbolTable(["h"])
    h = Scalar.from_symbol(t, "h")
    hs_q = build_q_super(1, 1, parse_scalar("9/7", t))
    rs = relation_space(hs_q, "mrea", h=h)
    p1 = power_sum_element(1, hs_q)
    g = NCPoly.generator(2, t, 0, 1)
    ok_shift, _ = is_zero_mod(p1 * g - g * p1, rs)
    hs_1 = build_superflip(1, 1, t)
    p1c = power_sum_element(1, hs_1)
    nf = super_pbw_reduce(p1c * g - g * p1c, 1, 1, h)
    assert ok_shift and nf.is_zero()


def test_ch_verify_reports_slow_path_flag():
    ok, report = ch_verify(build_dj_gl(2, qc("7/5")), 2, 0)
    assert ok and report["slow_path"] is False


def test_centrality_trivial_on_commutative_quotient():
    flip = build_flip(2)
    rs = relation_space(flip, "minus")
    assert centrality_check(1, flip, rs)
    assert centrality_check(2, flip, rs)


def test_degree_cap_guard():
    from braidorbit.errors import ResourceLimit

    hs = build_dj_gl(2, qc("7/5"))
    rs = relation_space(hs, "minus")
    g = NCPoly.generator(2, EMPTY_TABLE, 0, 0)
    tall = g ** 10  # 4^10 word space exceeds the cap
    with pytest.raises(ResourceLimit):
        is_zero_mod(tall, rs)
