"""Sufficient-cause representations and prime-implicant machinery."""
from __future__ import annotations

import json
from collections import defaultdict
from dataclasses import dataclass
from typing import Iterable

from .core import (
    LiteralSet,
    Literal,
    OutcomeTable,
    Population,
    all_assignments,
    conjunction_eval,
    literals_of_assignment,
)
from .errors import ContractViolation


def canonical_order(sets: Iterable[LiteralSet]) -> list:
    return sorted(sets, key=lambda s: s.sort_key())


def full_conjuncts(k: int) -> list:
    """All ``2**k`` full-length literal sets, lexicographic (``X`` before ``!X``).

    For ``k=3`` this runs ``{X1,X2,X3}, {X1,X2,!X3}, ..., {!X1,!X2,!X3}``.
    """
    return sorted(
        (literals_of_assignment(c) for c in all_assignments(k)),
        key=lambda s: s.ordered(),
    )


@dataclass(frozen=True)
class Representation:
    """Ordered ``(membership, conjunct)`` pairs over a fixed population.

    ``membership[i][w]`` is ``A_i`` for the ``w``-th individual (load order).
    Membership is stored as explicit bits, so it cannot depend on
    interventions on the causes.
    """

    k: int
    ids: tuple
    pairs: tuple  # of (membership tuple, LiteralSet)

    def __post_init__(self):
        pairs = tuple((tuple(int(a) for a in mem), LiteralSet(b)) for mem, b in self.pairs)
        object.__setattr__(self, "pairs", pairs)
        object.__setattr__(self, "ids", tuple(str(i) for i in self.ids))
        for mem, b in pairs:
            if len(mem) != len(self.ids):
                raise ContractViolation("membership length differs from population size")
            if any(a not in (0, 1) for a in mem):
                raise ContractViolation("membership must be 0/1")
            if b.max_var() >= self.k:
                raise ContractViolation(f"conjunct {b} mentions variables beyond k={self.k}")

    @property
    def conjuncts(self) -> tuple:
        return tuple(b for _, b in self.pairs)

    def membership_of(self, individual: int | str) -> tuple:
        w = individual if isinstance(individual, int) else self.ids.index(str(individual))
        return tuple(mem[w] for mem, _ in self.pairs)

    def __len__(self):
        return len(self.pairs)

    def to_dict(self, names=None) -> dict:
        return {
            "k": self.k,
            "conjuncts": [b.names(names) for _, b in self.pairs],
            "membership": [
                [i for i, a in zip(self.ids, mem) if a] for mem, _ in self.pairs
            ],
        }

    def to_json(self, names=None) -> str:
        return json.dumps(self.to_dict(names), indent=2)

    @classmethod
    def from_dict(cls, data: dict, ids: Iterable[str], names=None) -> "Representation":
        ids = tuple(str(i) for i in ids)
        pairs = []
        for lits, members in zip(data["conjuncts"], data["membership"]):
            unknown = set(map(str, members)) - set(ids)
            if unknown:
                raise ContractViolation(f"membership names unknown ids {sorted(unknown)}")
            mem = tuple(int(i in set(map(str, members))) for i in ids)
            pairs.append((mem, LiteralSet.parse(lits, names)))
        if len(data["conjuncts"]) != len(data["membership"]):
            raise ContractViolation("conjuncts and membership differ in length")
        k = data.get("k")
        if k is None:
            k = 1 + max((b.max_var() for _, b in pairs), default=-1)
        return cls(int(k), ids, tuple(pairs))


def canonical_representation(pop: Population) -> Representation:
    """Every full-length conjunct, switched on where the individual has ``D=1``."""
    k = pop.k
    pairs = []
    for b in full_conjuncts(k):
        c = tuple(lit.setting(1) for lit in b.ordered())
        pairs.append((tuple(t[c] for t in pop.tables), b))
    return Representation(k, pop.ids, tuple(pairs))


def verify_representation(rep: Representation, pop: Population) -> bool:
    if rep.k != pop.k or len(rep.ids) != len(pop):
        raise ContractViolation(
            f"representation is for k={rep.k}, |pop|={len(rep.ids)}; "
            f"population has k={pop.k}, |pop|={len(pop)}"
        )
    for c in all_assignments(pop.k):
        fires = [conjunction_eval(b, c) for _, b in rep.pairs]
        for w, t in enumerate(pop.tables):
            got = any(f and mem[w] for f, (mem, _) in zip(fires, rep.pairs))
            if int(got) != t[c]:
                return False
    return True


def _set_literals(c: list, lits: Iterable[Literal], value: int):
    for lit in lits:
        c[lit.var] = lit.setting(value)


def avoidance_representation(pop: Population, b: LiteralSet) -> Representation | None:
    """Try to represent ``pop`` without any conjunct containing ``b``.

    Returns ``None`` when the construction fails to verify, which happens
    exactly when ``b`` is irreducible for the population.
    """
    b = LiteralSet(b)
    k = pop.k
    if not b:
        raise ContractViolation("b must be nonempty")
    if b.max_var() >= k:
        raise ContractViolation(f"{b} mentions variables beyond k={k}")
    pairs = []
    # full-length conjuncts that do not contain b
    for full in full_conjuncts(k):
        if b <= full:
            continue
        c = tuple(lit.setting(1) for lit in full.ordered())
        pairs.append((tuple(t[c] for t in pop.tables), full))
    # conjuncts of size k-1 missing exactly one literal of b
    lits = b.ordered()
    dagger = []
    for full in full_conjuncts(k):
        if not b <= full:
            continue
        for drop in lits:
            sub = LiteralSet(x for x in full if x != drop)
            c1 = [0] * k
            _set_literals(c1, full, 1)
            c0 = list(c1)
            c0[drop.var] = drop.setting(0)
            mem = tuple(t[tuple(c0)] * t[tuple(c1)] for t in pop.tables)
            dagger.append((drop, mem, sub))
    for _, mem, sub in sorted(dagger, key=lambda x: (x[0], x[2].ordered())):
        pairs.append((mem, sub))
    rep = Representation(k, pop.ids, tuple(pairs))
    return rep if verify_representation(rep, pop) else None


# --------------------------------------------------------------------------
# Quine-McCluskey
# --------------------------------------------------------------------------

# A cube is (care, value): bit j of care set means variable at that bit
# position is fixed to the corresponding bit of value.  Bit positions follow
# the table index, so variable X{j+1} lives at bit k-1-j.

def _cube_to_literals(care: int, value: int, k: int) -> LiteralSet:
    lits = []
    for j in range(k):
        bit = 1 << (k - 1 - j)
        if care & bit:
            lits.append(Literal(j, not value & bit))
    return LiteralSet(lits)


def _literals_to_cube(b: LiteralSet, k: int):
    care = value = 0
    for lit in b:
        bit = 1 << (k - 1 - lit.var)
        care |= bit
        if not lit.negated:
            value |= bit
    return care, value


def _cube_covers(cube, minterm: int) -> bool:
    care, value = cube
    return minterm & care == value


def _qm_prime_cubes(minterms: list, k: int) -> set:
    full = (1 << k) - 1
    layer = {(full, m) for m in minterms}
    primes = set()
    while layer:
        groups = defaultdict(list)
        for care, value in layer:
            groups[(care, bin(value).count("1"))].append(value)
        merged = set()
        nxt = set()
        for (care, ones), values in groups.items():
            upper = groups.get((care, ones + 1), ())
            for v in values:
                for u in upper:
                    diff = v ^ u
                    if diff & (diff - 1) == 0:
                        nxt.add((care & ~diff, v & ~diff))
                        merged.add((care, v))
                        merged.add((care, u))
        primes |= layer - merged
        layer = nxt
    return primes


@dataclass(frozen=True)
class PrimeImplicants:
    """Prime implicants of a table, canonically ordered.

    ``tautology`` is set for the constant-one table, whose only prime
    implicant would be the empty conjunction; ``implicants`` is then empty.
    """

    implicants: tuple
    tautology: bool = False

    def __iter__(self):
        return iter(self.implicants)

    def __len__(self):
        return len(self.implicants)

    def __contains__(self, item):
        return LiteralSet(item) in self.implicants

    def as_set(self) -> frozenset:
        return frozenset(self.implicants)


def prime_implicants(t: OutcomeTable) -> PrimeImplicants:
    cubes = _qm_prime_cubes(t.minterms(), t.k)
    sets = [_cube_to_literals(care, value, t.k) for care, value in cubes]
    tautology = any(not s for s in sets)
    sets = [s for s in sets if s]
    return PrimeImplicants(tuple(canonical_order(sets)), tautology)


def essential_prime_implicants(t: OutcomeTable) -> PrimeImplicants:
    pis = prime_implicants(t)
    if pis.tautology:
        return pis
    cubes = [_literals_to_cube(b, t.k) for b in pis]
    essential = []
    for b, cube in zip(pis, cubes):
        for m in t.minterms():
            if _cube_covers(cube, m) and sum(_cube_covers(o, m) for o in cubes) == 1:
                essential.append(b)
                break
    return PrimeImplicants(tuple(essential), False)


def to_pla(t: OutcomeTable) -> str:
    """Espresso-style PLA dump of the on-set."""
    lines = [f".i {t.k}", ".o 1", f".p {len(t.minterms())}"]
    for m in t.minterms():
        lines.append(format(m, f"0{t.k}b") + " 1" if t.k else "- 1")
    lines.append(".e")
    return "\n".join(lines) + "\n"
