import itertools

import pytest
from hypothesis import given
from hypothesis import strategies as st

from suffcause import (
    Literal,
    LiteralSet,
    LiteralTree,
    OutcomeTable,
    degree,
    edge_bijection,
    enumerate_trees,
    m_irred,
    m_sing,
    prufer_decode,
    prufer_encode,
)
from suffcause.errors import ContractViolation, UnsupportedSize
from suffcause.interaction import (
    condition_value_irred,
    condition_value_monotone,
    condition_value_singular,
)
from suffcause.trees import mobius, mobius_coefficients, zeta

import oracles

L = LiteralSet.parse
X1, X2, X3 = Literal(0), Literal(1), Literal(2)


def edge_set(tree):
    return {frozenset(str(v) for v in e) for e in tree.literal_edges()}


def path(*lits):
    return LiteralTree.from_literal_edges(sorted(lits), list(zip(lits, lits[1:])))


@pytest.mark.parametrize("n,count", [(0, 1), (1, 1), (2, 1), (3, 3), (4, 16), (5, 125), (6, 1296)])
def test_tree_counts(n, count):
    bplus = LiteralSet(Literal(j) for j in range(n))
    trees = list(enumerate_trees(bplus))
    assert len(trees) == count
    assert len({t.edges for t in trees}) == count


def test_three_trees_on_three_literals():
    got = [edge_set(t) for t in enumerate_trees(L("X1,X2,X3"))]
    want = [
        {frozenset({"X1", "X2"}), frozenset({"X1", "X3"})},  # X2-X1-X3
        {frozenset({"X1", "X2"}), frozenset({"X2", "X3"})},  # X1-X2-X3
        {frozenset({"X1", "X3"}), frozenset({"X2", "X3"})},  # X1-X3-X2
    ]
    assert got == want


def test_prufer_decode_star():
    t = prufer_decode([0])
    assert t.edges == frozenset({(0, 1), (0, 2)})


def test_prufer_round_trip_n4():
    seqs = list(itertools.product(range(4), repeat=2))
    trees = [prufer_decode(s) for s in seqs]
    assert len({t.edges for t in trees}) == 16
    assert all(prufer_encode(t) == s for t, s in zip(trees, seqs))


def test_prufer_rejects_bad_entries():
    with pytest.raises(ContractViolation):
        prufer_decode([3])
    with pytest.raises(ContractViolation):
        prufer_decode([0], vertices=[X1, X2])


def test_tree_validation():
    with pytest.raises(ContractViolation):
        LiteralTree((X1, X2, X3), frozenset({(0, 1)}))
    with pytest.raises(ContractViolation):
        LiteralTree((X1, X2, X3, Literal(3)), frozenset({(0, 1), (1, 0), (2, 3)}))
    with pytest.raises(ContractViolation):
        LiteralTree((X1, X2), frozenset({(0, 0)}))


def test_size_guard():
    big = LiteralSet(Literal(j) for j in range(9))
    with pytest.raises(UnsupportedSize):
        next(enumerate_trees(big))
    assert next(enumerate_trees(big, allow_large=True)).n == 9


def test_degree():
    t = path(X1, X2, X3)
    assert degree(t, X2) == 2 and degree(t, X1) == 1
    star = prufer_decode([0, 0])
    assert degree(star, Literal(0)) == 3
    with pytest.raises(ContractViolation):
        degree(t, Literal(5))


@given(st.integers(2, 6), st.data())
def test_degree_sum(n, data):
    seq = data.draw(st.lists(st.integers(0, n - 1), min_size=n - 2, max_size=n - 2))
    t = prufer_decode(seq)
    assert sum(degree(t, v) for v in t.vertices) == 2 * (n - 1)


def test_edge_bijection_path():
    t = path(X1, X2, X3)
    phi = edge_bijection(t, X1)
    assert phi == {X2: frozenset({X1, X2}), X3: frozenset({X2, X3})}


def test_edge_bijection_single_edge():
    t = path(X1, X2)
    assert edge_bijection(t, X2) == {X1: frozenset({X1, X2})}


@pytest.mark.parametrize("n", [1, 2, 3, 4, 5])
def test_edge_bijection_is_bijective(n):
    bplus = LiteralSet(Literal(j) for j in range(n))
    for t in enumerate_trees(bplus):
        edges = set(t.literal_edges())
        for root in t.vertices:
            phi = edge_bijection(t, root)
            assert set(phi) == set(t.vertices) - {root}
            assert set(phi.values()) == edges
            assert all(v in e for v, e in phi.items())


def lone(bplus):
    return next(enumerate_trees(bplus))


def test_m_irred_two_way():
    b = L("X1,X2")
    both = m_irred(b, b, lone(b))
    assert both.to_dict() == {"b0": 0, "b1": 0, "b2": 0, "b12": 1}
    assert both.render() == "b12 > 0"
    none = m_irred(b, (), lone(LiteralSet()))
    assert none.to_dict() == {"b0": -1, "b1": 0, "b2": 0, "b12": 1}
    assert none.render() == "b12 > b0"
    one = m_irred(b, L("X1"), lone(L("X1")))
    assert one.render() == "b12 > b0"


def test_m_sing_two_way():
    b = L("X1,X2")
    assert m_sing(b, (), lone(LiteralSet())).render() == "b12 > 2*b0"


def test_three_way_inequalities():
    b = L("X1,X2,X3")
    assert m_irred(b, (), lone(LiteralSet())).render() == "b123 > 2*b0 + b1 + b2 + b3"
    assert m_sing(b, (), lone(LiteralSet())).render() == "b123 > 6*b0 + 2*b1 + 2*b2 + 2*b3"
    assert m_irred(b, L("X1,X2"), lone(L("X1,X2"))).render() == "b123 > b0 + b1 + b2"
    centred = {
        t.describe(): m_irred(b, b, t).render() for t in enumerate_trees(b)
    }
    assert centred == {
        "X1-X2 X1-X3": "b123 > b1",
        "X1-X2 X2-X3": "b123 > b2",
        "X1-X3 X2-X3": "b123 > b3",
    }


def test_m_sing_equals_m_irred_without_unmonotone_literals():
    b = L("X1,X2,X3")
    for t in enumerate_trees(b):
        assert m_sing(b, b, t).entries == m_irred(b, b, t).entries


def test_m_irred_rejects_mismatched_tree():
    b = L("X1,X2,X3")
    with pytest.raises(ContractViolation):
        m_irred(b, L("X1,X2"), lone(L("X2,X3")))
    with pytest.raises(ContractViolation):
        m_irred(L("X1,X2"), L("X1,X3"), lone(L("X1,X3")))


def test_mobius_matches_least_squares():
    t = OutcomeTable.from_bits("01100111")
    coef = mobius_coefficients(t, L("X1,X2,X3"))
    ref = oracles.saturated_coefficients({c: t[c] for c in oracles.assignments(3)}, 3)
    assert all(abs(coef[m] - ref[m]) < 1e-12 for m in range(8))


@given(st.dictionaries(st.integers(0, 15), st.integers(-5, 5), min_size=16, max_size=16))
def test_mobius_zeta_inverse(values):
    assert zeta(mobius(values, 4), 4) == values


def _tables(k):
    for mask in range(1 << (1 << k)):
        yield OutcomeTable.from_mask(k, mask)


def _full_sets(k):
    for neg in itertools.product((False, True), repeat=k):
        yield LiteralSet(Literal(j, n) for j, n in enumerate(neg))


@pytest.mark.parametrize("k", [1, 2, 3])
def test_coefficients_reproduce_condition_values(k):
    for t in _tables(k):
        for b in _full_sets(k):
            beta = mobius_coefficients(t, b)
            for r in range(k + 1):
                for bplus in itertools.combinations(sorted(b), r):
                    bplus = LiteralSet(bplus)
                    for tree in enumerate_trees(bplus):
                        mi = m_irred(b, bplus, tree)
                        ms = m_sing(b, bplus, tree)
                        lin_i = sum(mi[s] * beta[s] for s in range(1 << k))
                        lin_s = sum(ms[s] * beta[s] for s in range(1 << k))
                        irr = condition_value_irred(t, b) + sum(
                            t[_zeroed(b, e)] for e in tree.literal_edges()
                        )
                        sing = _singular_value(t, b, bplus, tree)
                        assert lin_i == irr
                        assert lin_s == sing
                        if all(_positive_monotone(t, lit) for lit in bplus):
                            assert condition_value_monotone(t, b, bplus, tree) == irr
                            assert condition_value_singular(t, b, bplus, tree) == sing


def _zeroed(b, off):
    c = [0] * len(b)
    for lit in b:
        c[lit.var] = lit.setting(0 if lit in off else 1)
    return tuple(c)


def _singular_value(t, b, bplus, tree):
    v = t[_zeroed(b, ())]
    v -= sum(t[_zeroed(b, {lit})] for lit in bplus)
    rest = sorted(b - bplus)
    for r in range(1, len(rest) + 1):
        for sub in itertools.combinations(rest, r):
            v -= t[_zeroed(b, set(sub))]
    return v + sum(t[_zeroed(b, e)] for e in tree.literal_edges())


def _positive_monotone(t, lit):
    k = t.k
    for c in oracles.assignments(k):
        if lit.value(c) == 0:
            d = list(c)
            d[lit.var] = 1 - d[lit.var]
            if t[c] > t[tuple(d)]:
                return False
    return True


def test_min_form_equivalence():
    b = L("X1,X2,X3")
    trees = list(enumerate_trees(b))
    for t in _tables(3):
        if not all(_positive_monotone(t, lit) for lit in b):
            continue
        beta = mobius_coefficients(t, b)
        any_tree = any(condition_value_monotone(t, b, b, tr) > 0 for tr in trees)
        assert any_tree == (beta[0b111] > min(beta[0b100], beta[0b010], beta[0b001]))
