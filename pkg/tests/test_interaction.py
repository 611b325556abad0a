import itertools

import numpy as np
import pytest
from hypothesis import given

from suffcause import (
    PROBABILITY,
    Literal,
    LiteralSet,
    OutcomeTable,
    Population,
    canonical_representation,
    avoidance_representation,
    enumerate_trees,
    extend_cause_set,
    is_irreducible,
    is_singular,
    msc_under_monotonicity,
    pns,
    pns_lower_bound,
    read_truth_table,
)
from suffcause.errors import ContractViolation, ModeError, MonotonicityViolation
from suffcause.interaction import (
    SINGULAR,
    CausePartition,
    cell_means_from_population,
    condition_value_irred,
    condition_value_monotone,
    condition_value_singular,
    irreducibility_finding,
    singularity_finding,
)

from conftest import populations
import oracles

L = LiteralSet.parse


def as_literals(req):
    return LiteralSet(Literal(j, v == 0) for j, v in req.items())


@pytest.fixture
def two_person(two_person_path):
    return read_truth_table(two_person_path)


def test_partition_assignment():
    p = CausePartition(L("X1,!X3"), 3)
    assert p.c2_vars == (1,)
    assert p.assignment((), (1,)) == (1, 1, 0)
    assert p.assignment({Literal(2, True)}, (0,)) == (1, 0, 1)
    with pytest.raises(ContractViolation):
        p.assignment((), ())


def test_two_person_irreducible_pairs(two_person):
    for text in ("X2,!X3", "!X2,X3"):
        w = is_irreducible(two_person, L(text))
        assert w is not None
        assert w.individual_id == "1" and w.context == (0,)


def test_two_person_individual_two(two_person):
    two = two_person.subset(["2"])
    assert is_irreducible(two, L("X1,X2")) is None
    w = is_irreducible(two, L("X1"))
    assert w is not None and w.context == (1, 1)


def test_condition_value_irred_example(two_person):
    t = two_person.tables[1]
    assert condition_value_irred(t, L("X1"), (1, 1)) == 1
    assert condition_value_irred(t, L("X1,X2"), (1,)) == 0


def test_singular_when_table_is_the_conjunction():
    t = OutcomeTable.of_conjunction(L("X1,X2"), 2)
    pop = Population.of([t], weights=[1.0], mode=PROBABILITY)
    assert is_singular(pop, L("X1,X2")) is not None
    assert is_singular(pop, L("X1")) is None
    assert pns(pop, L("X1,X2")) == 1.0


def test_monotone_condition_checks_premise():
    t = OutcomeTable.from_bits("0110")  # exclusive or
    b = L("X1,X2")
    with pytest.raises(MonotonicityViolation):
        condition_value_monotone(t, b, b, next(enumerate_trees(b)))


def test_monotone_condition_value():
    t = OutcomeTable.of_conjunction(L("X1,X2"), 2)
    b = L("X1,X2")
    assert condition_value_monotone(t, b, b, next(enumerate_trees(b))) == 1


def test_singular_condition_requires_full_b():
    t = OutcomeTable.of_conjunction(L("X1"), 2)
    with pytest.raises(ContractViolation):
        condition_value_singular(t, L("X1"), (), next(enumerate_trees(LiteralSet())))


def test_msc_under_monotonicity():
    t = OutcomeTable.from_function(3, lambda a, b, c: (a and b) or c)
    pop = Population.of([t])
    w = msc_under_monotonicity(pop, L("X1,X2"))
    assert w is not None and w.context == (0,)
    bad = Population.of([OutcomeTable.from_function(3, lambda a, b, c: a and b and not c)])
    with pytest.raises(MonotonicityViolation):
        msc_under_monotonicity(bad, L("X1,X2"))


def test_pns_lower_bound_examples():
    assert pns_lower_bound({(1, 1): 1, (1, 0): 0, (0, 1): 0, (0, 0): 0}) == 1.0
    assert pns_lower_bound({c: 0.5 for c in itertools.product((0, 1), repeat=2)}) == -1.0
    with pytest.raises(ContractViolation):
        pns_lower_bound({(1, 1): 1, (1, 0): 0, (0, 1): 0})


def test_pns_bound_on_mixture():
    conj = OutcomeTable.of_conjunction(L("X1,X2"), 2)
    disj = OutcomeTable.from_function(2, lambda a, b: a or b)
    pop = Population.of([conj, disj], weights=[0.3, 0.7], mode=PROBABILITY)
    means = cell_means_from_population(pop, L("X1,X2"))
    assert means[(1, 1)] == pytest.approx(1.0)
    assert means[(1, 0)] == pytest.approx(0.7)
    assert means[(0, 0)] == pytest.approx(0.0)
    assert pns_lower_bound(means) == pytest.approx(-0.4)
    assert pns(pop, L("X1,X2")) == pytest.approx(0.3)


def test_pns_needs_probability_mode():
    pop = Population.of([OutcomeTable.constant(2, 0)])
    with pytest.raises(ModeError):
        pns(pop, L("X1,X2"))


def test_findings_export(two_person):
    f = irreducibility_finding(two_person, L("X2,!X3"))
    d = f.to_dict()
    assert set(d) >= {"claim", "witness", "assumptions", "theorem_ref"}
    assert d["witness"] == {"individual": "1", "context": {"X1": 0}, "condition_value": 1}
    assert not any(ch.isdigit() for ch in d["theorem_ref"])


def test_extend_cause_set():
    t = OutcomeTable.from_function(3, lambda a, b, c: a and not b)
    f = irreducibility_finding(Population.of([t]), L("X1"))
    assert extend_cause_set(f, ["X4"], not_influenced=False) is f
    ext = extend_cause_set(f, ["X4"], not_influenced=True)
    assert ext.relative_to == ("X1", "X2", "X3", "X4")
    assert any("X4" in a for a in ext.assumptions)
    s = singularity_finding(Population.of([OutcomeTable.of_conjunction(L("X1,X2"), 2)]), L("X1,X2"))
    ext_s = extend_cause_set(s, ["X3"], not_influenced=True)
    assert ext_s.claim == SINGULAR and ext_s.warnings


def test_extend_does_not_carry_absence():
    f = irreducibility_finding(Population.of([OutcomeTable.constant(2, 0)]), L("X1"))
    ext = extend_cause_set(f, ["X3"], not_influenced=True)
    assert ext.relative_to == f.relative_to and ext.warnings


@given(populations(max_k=3, max_size=3))
def test_irreducible_matches_oracle(pop):
    for req in oracles.literal_sets(pop.k):
        if req:
            got = is_irreducible(pop, as_literals(req)) is not None
            assert got == oracles.irreducible(req, pop.tables, pop.k)


@given(populations(max_k=3, max_size=3))
def test_singular_implies_irreducible(pop):
    for req in oracles.literal_sets(pop.k):
        if req and is_singular(pop, as_literals(req)) is not None:
            assert is_irreducible(pop, as_literals(req)) is not None
            assert oracles.singular(req, pop.tables, pop.k)


def _monotone_literal(t, lit):
    for c in oracles.assignments(t.k):
        if lit.value(c) == 0:
            d = list(c)
            d[lit.var] = 1 - d[lit.var]
            if t[c] > t[tuple(d)]:
                return False
    return True


def test_singular_iff_irreducible_with_at_most_one_unmonotone_literal():
    rng = np.random.default_rng(3)
    mono = [OutcomeTable(3, t) for t in oracles.monotone_tables(3)]
    tables_all = [OutcomeTable.from_mask(3, m) for m in range(256)]
    checked = 0
    for b in (L("X1,X2,X3"), L("X1,X2,!X3")):
        for _ in range(400):
            size = int(rng.integers(1, 4))
            pool = tables_all if rng.random() < 0.5 else mono
            pop = Population.of([pool[int(i)] for i in rng.integers(0, len(pool), size)])
            monotone = {lit for lit in b if all(_monotone_literal(t, lit) for t in pop.tables)}
            if len(b - monotone) > 1:
                continue
            checked += 1
            assert (is_singular(pop, b) is not None) == (is_irreducible(pop, b) is not None)
    assert checked > 100


def test_pns_positive_iff_singular_small():
    for k in (1, 2):
        full = LiteralSet(Literal(j) for j in range(k))
        for m1, m2 in itertools.product(range(1 << (1 << k)), repeat=2):
            pop = Population.of(
                [OutcomeTable.from_mask(k, m1), OutcomeTable.from_mask(k, m2)],
                weights=[0.5, 0.5], mode=PROBABILITY,
            )
            assert (pns(pop, full) > 0) == (is_singular(pop, full) is not None)


def test_singularity_via_representations_k2():
    # singular iff every representation pairs b with the individual whose
    # table is the conjunction; checked here on the two constructions
    b = L("X1,X2")
    for masks in itertools.product(range(16), repeat=2):
        pop = Population.of([OutcomeTable.from_mask(2, m) for m in masks])
        sing = is_singular(pop, b)
        rep = canonical_representation(pop)
        if sing is not None:
            w = pop.ids.index(sing.individual_id)
            on = [bj for mem, bj in rep.pairs if mem[w]]
            assert on == [b]
            assert avoidance_representation(pop, b) is None
