"""Counterfactual-level decisions: irreducibility, singularity, PNS.

These operate on fully known potential-outcome tables, so monotonicity
premises are checked against the tables rather than assumed.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field, replace
from typing import Iterable, Mapping

from .core import (
    PROBABILITY,
    Literal,
    LiteralSet,
    OutcomeTable,
    Population,
    all_assignments,
    literal_monotone_positive,
    monotone_positive,
)
from .errors import ContractViolation, ModeError, MonotonicityViolation
from .trees import LiteralTree


@dataclass(frozen=True)
class CausePartition:
    """``b`` fixes one literal per variable of C1; the rest of C is C2."""

    b: LiteralSet
    k: int

    def __post_init__(self):
        b = LiteralSet(self.b)
        if not b:
            raise ContractViolation("b must be nonempty")
        if b.max_var() >= self.k:
            raise ContractViolation(f"{b} mentions variables beyond k={self.k}")
        object.__setattr__(self, "b", b)

    @property
    def c2_vars(self) -> tuple:
        return tuple(j for j in range(self.k) if j not in self.b.variables)

    def contexts(self):
        return all_assignments(len(self.c2_vars))

    def assignment(self, zeroed: Iterable[Literal] = (), c2=()) -> tuple:
        """Full assignment with ``b`` true except the ``zeroed`` literals."""
        c2 = tuple(c2)
        if len(c2) != len(self.c2_vars):
            raise ContractViolation(
                f"context has {len(c2)} values, C2 has {len(self.c2_vars)} variables"
            )
        zeroed = set(zeroed)
        c = [0] * self.k
        for lit in self.b:
            c[lit.var] = lit.setting(0 if lit in zeroed else 1)
        for j, x in zip(self.c2_vars, c2):
            c[j] = x
        return tuple(c)


@dataclass(frozen=True)
class Witness:
    individual_id: str
    context: tuple = ()
    value: int | None = None

    def to_dict(self, partition: CausePartition | None = None, names=None) -> dict:
        out = {"individual": self.individual_id}
        if partition is not None:
            out["context"] = {
                (names[j] if names else f"X{j + 1}"): x
                for j, x in zip(partition.c2_vars, self.context)
            }
        else:
            out["context"] = list(self.context)
        if self.value is not None:
            out["condition_value"] = self.value
        return out


def _partition(p, k) -> CausePartition:
    if isinstance(p, CausePartition):
        if p.k != k:
            raise ContractViolation(f"partition is for k={p.k}, tables have k={k}")
        return p
    return CausePartition(LiteralSet(p), k)


def condition_value_irred(t: OutcomeTable, p, c2=()) -> int:
    """``D[B=1] - sum_L D[B-{L}=1, L=0]`` in context ``c2``."""
    p = _partition(p, t.k)
    value = t[p.assignment((), c2)]
    for lit in p.b:
        value -= t[p.assignment((lit,), c2)]
    return value


def is_irreducible(pop: Population, p) -> Witness | None:
    """First ``(individual, context)`` satisfying the irreducibility conditions.

    Individuals are scanned in load order and contexts in index order.
    """
    p = _partition(p, pop.k)
    for m in pop.members:
        for c2 in p.contexts():
            v = condition_value_irred(m.table, p, c2)
            if v > 0:
                return Witness(m.id, tuple(c2), v)
    return None


def is_singular(pop: Population, p) -> Witness | None:
    """First individual whose outcome table is exactly the conjunction ``b``."""
    p = _partition(p, pop.k)
    target = OutcomeTable.of_conjunction(p.b, pop.k)
    for m in pop.members:
        if m.table == target:
            return Witness(m.id, ())
    return None


def _require_monotone(t: OutcomeTable, lits: Iterable[Literal]):
    for lit in lits:
        if not literal_monotone_positive(t, lit):
            raise MonotonicityViolation(
                f"{lit} does not have a positive monotonic effect on table {t.bits()}"
            )


def _check_tree(bplus: LiteralSet, tree: LiteralTree):
    if frozenset(tree.vertices) != frozenset(bplus):
        raise ContractViolation("tree does not span bplus")


def _tree_sum(t, p, tree, c2):
    return sum(t[p.assignment(edge, c2)] for edge in tree.literal_edges())


def condition_value_monotone(t: OutcomeTable, p, bplus, tree: LiteralTree, c2=()) -> int:
    """Irreducibility condition strengthened by a tree on the monotone literals."""
    p = _partition(p, t.k)
    bplus = LiteralSet(bplus)
    if not bplus <= p.b:
        raise ContractViolation("bplus must be a subset of b")
    _check_tree(bplus, tree)
    _require_monotone(t, bplus)
    return condition_value_irred(t, p, c2) + _tree_sum(t, p, tree, c2)


def _nonempty_subsets(lits):
    lits = sorted(lits)
    for r in range(1, len(lits) + 1):
        yield from itertools.combinations(lits, r)


def condition_value_singular(t: OutcomeTable, b, bplus, tree: LiteralTree) -> int:
    b = LiteralSet(b)
    if len(b) != t.k or b.variables != frozenset(range(t.k)):
        raise ContractViolation("singularity conditions need one literal per variable")
    p = CausePartition(b, t.k)
    bplus = LiteralSet(bplus)
    if not bplus <= b:
        raise ContractViolation("bplus must be a subset of b")
    _check_tree(bplus, tree)
    _require_monotone(t, bplus)
    value = t[p.assignment()]
    value -= sum(t[p.assignment((lit,))] for lit in bplus)
    value -= sum(t[p.assignment(sub)] for sub in _nonempty_subsets(b - bplus))
    return value + _tree_sum(t, p, tree, ())


def msc_under_monotonicity(pop: Population, p) -> Witness | None:
    """Individual for whom ``b`` is a minimal sufficient cause, found at ``c2 = 0``.

    Requires every C2 variable to be positively monotone on every table.
    """
    p = _partition(p, pop.k)
    for m in pop.members:
        for j in p.c2_vars:
            if not monotone_positive(m.table, j):
                raise MonotonicityViolation(
                    f"X{j + 1} is not positively monotone for individual {m.id}"
                )
    zero = (0,) * len(p.c2_vars)
    for m in pop.members:
        v = condition_value_irred(m.table, p, zero)
        if v > 0:
            return Witness(m.id, zero, v)
    return None


def _full_b(b, k) -> LiteralSet:
    b = LiteralSet(b)
    if len(b) != k or b.variables != frozenset(range(k)):
        raise ContractViolation("b must contain one literal per variable")
    return b


def pns(pop: Population, b) -> float:
    """Probability that the outcome occurs exactly when every literal of b holds."""
    if pop.mode != PROBABILITY:
        raise ModeError("PNS needs a probability-mode population")
    b = _full_b(b, pop.k)
    target = OutcomeTable.of_conjunction(b, pop.k)
    return sum(m.weight for m in pop.members if m.table == target)


_MEAN_EPS = 1e-9


def cell_means_from_population(pop: Population, b) -> dict:
    """``E[D | B = v]`` for every literal assignment ``v`` (1 = literal true)."""
    if pop.mode != PROBABILITY:
        raise ModeError("cell means need a probability-mode population")
    b = _full_b(b, pop.k)
    lits = b.ordered()
    out = {}
    for v in all_assignments(len(lits)):
        c = [0] * pop.k
        for lit, x in zip(lits, v):
            c[lit.var] = lit.setting(x)
        out[tuple(v)] = min(1.0, sum(m.weight * m.table[tuple(c)] for m in pop.members))
    return out


def pns_lower_bound(cell_means: Mapping) -> float:
    """``E[D|B=1] - sum_{v != 1} E[D|B=v]``; negative values are returned as is."""
    keys = [tuple(k) for k in cell_means]
    if not keys:
        raise ContractViolation("no cell means supplied")
    m = len(keys[0])
    means = {tuple(k): v for k, v in cell_means.items()}
    for v in all_assignments(m):
        if v not in means:
            raise ContractViolation(f"missing cell mean for B={''.join(map(str, v))}")
    if len(means) != 1 << m:
        raise ContractViolation("cell means have inconsistent dimensions")
    for val in means.values():
        if not -_MEAN_EPS <= val <= 1.0 + _MEAN_EPS:
            raise ContractViolation("cell means must lie in [0, 1]")
    ones = (1,) * m
    return means[ones] - sum(val for key, val in means.items() if key != ones)


# --------------------------------------------------------------------------
# findings
# --------------------------------------------------------------------------

IRREDUCIBLE = "irreducible"
SINGULAR = "singular"
MINIMAL_SUFFICIENT = "minimal-sufficient-cause"


@dataclass(frozen=True)
class Finding:
    claim: str
    b: LiteralSet
    holds: bool
    witness: Witness | None
    relative_to: tuple  # variable names
    theorem_ref: str
    assumptions: tuple = ()
    warnings: tuple = ()
    partition: CausePartition | None = field(default=None, compare=False)

    def to_dict(self, names=None) -> dict:
        return {
            "claim": f"{self.claim} {str(self.b) if names is None else '{' + ','.join(self.b.names(names)) + '}'}"
            f" relative to {{{','.join(self.relative_to)}}}",
            "holds": self.holds,
            "witness": None if self.witness is None else self.witness.to_dict(self.partition, names),
            "assumptions": list(self.assumptions),
            "warnings": list(self.warnings),
            "theorem_ref": self.theorem_ref,
        }


def _names(k, names):
    return tuple(names) if names is not None else tuple(f"X{j + 1}" for j in range(k))


def irreducibility_finding(pop: Population, b, names=None) -> Finding:
    p = _partition(b, pop.k)
    w = is_irreducible(pop, p)
    return Finding(
        IRREDUCIBLE, p.b, w is not None, w, _names(pop.k, names),
        "irreducibility characterization (witness individual and context)",
        partition=p,
    )


def singularity_finding(pop: Population, b, names=None) -> Finding:
    p = _partition(b, pop.k)
    w = is_singular(pop, p)
    return Finding(
        SINGULAR, p.b, w is not None, w, _names(pop.k, names),
        "singularity characterization (outcome table equals the conjunction)",
        partition=p,
    )


def extend_cause_set(finding: Finding, extra: Iterable[str], not_influenced: bool,
                     monotone_declared: bool = False) -> Finding:
    """Carry a positive finding over to a larger cause set.

    Needs the caller's assertion that the extra variables are not causally
    influenced by the modeled ones; that cannot be checked from the tables.
    Without the assertion, or for a negative finding, nothing changes.
    """
    extra = tuple(extra)
    if not not_influenced or not extra:
        return finding
    if not finding.holds:
        return replace(
            finding,
            warnings=finding.warnings
            + ("absence of a witness does not extend to a larger cause set",),
        )
    base = ",".join(finding.relative_to)
    assumptions = finding.assumptions + (
        f"{','.join(extra)} not causally influenced by {{{base}}} (declared, unverifiable)",
        "relativized consistency for the added variables",
    )
    warnings = finding.warnings
    if finding.claim == SINGULAR and not monotone_declared:
        warnings = warnings + (
            "extension of singularity also needs all or all but one of b and the added "
            "variables to be positively monotone; not checked",
        )
    return replace(
        finding,
        relative_to=finding.relative_to + tuple(x for x in extra if x not in finding.relative_to),
        assumptions=assumptions,
        warnings=warnings,
    )
