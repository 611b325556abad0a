"""Literals, conjunctions, potential-outcome truth tables and populations.

Assignments are tuples of 0/1 of length ``k``; position ``j`` holds the value
of variable ``X{j+1}``.  Tables are stored in index order with ``X1`` as the
most significant bit, so ``D011`` sits at index 3.
"""
from __future__ import annotations

import csv
import enum
import io
import itertools
import math
import re
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

from .errors import ContractViolation, ModeError, ParseError, UnsupportedSize

Assignment = tuple  # tuple[int, ...]

MAX_DEDEKIND_K = 4


def assignment_index(c: Sequence[int]) -> int:
    idx = 0
    for bit in c:
        idx = (idx << 1) | (1 if bit else 0)
    return idx


def index_assignment(idx: int, k: int) -> Assignment:
    return tuple((idx >> (k - 1 - j)) & 1 for j in range(k))


def all_assignments(k: int) -> Iterator[Assignment]:
    return itertools.product((0, 1), repeat=k)


# --------------------------------------------------------------------------
# literals and conjunctions
# --------------------------------------------------------------------------

_LIT_RE = re.compile(r"^\s*([!~])?\s*X(\d+)\s*$")


@dataclass(frozen=True, order=True)
class Literal:
    """``X{var+1}`` or its complement.  Sorts positives before negations."""

    var: int
    negated: bool = False

    def __post_init__(self):
        if self.var < 0:
            raise ContractViolation(f"negative variable index {self.var}")

    def value(self, c: Sequence[int]) -> int:
        if self.var >= len(c):
            raise ContractViolation(
                f"literal {self} out of range for assignment of length {len(c)}"
            )
        bit = 1 if c[self.var] else 0
        return 1 - bit if self.negated else bit

    def setting(self, value: int) -> int:
        """Variable value that makes this literal equal ``value``."""
        return 1 - value if self.negated else value

    def complement(self) -> "Literal":
        return Literal(self.var, not self.negated)

    def name(self, names: Sequence[str] | None = None) -> str:
        base = names[self.var] if names is not None else f"X{self.var + 1}"
        return ("!" if self.negated else "") + base

    def __str__(self):
        return self.name()

    @classmethod
    def parse(cls, text: str, names: Sequence[str] | None = None) -> "Literal":
        text = text.strip()
        neg = text[:1] in ("!", "~")
        body = text[1:].strip() if neg else text
        if names is not None and body in names:
            return cls(list(names).index(body), neg)
        m = _LIT_RE.match(text)
        if not m:
            raise ContractViolation(f"cannot parse literal {text!r}")
        var = int(m.group(2)) - 1
        if var < 0:
            raise ContractViolation(f"variables are numbered from X1, got {text!r}")
        return cls(var, neg)


class LiteralSet(frozenset):
    """A set of literals with no variable in both polarities.

    The empty set is a valid value (it shows up inside representations when
    ``|C| = 1``); the sufficiency predicates reject it.
    """

    def __new__(cls, literals: Iterable[Literal] = ()):
        lits = frozenset(literals)
        seen = {}
        for lit in lits:
            if not isinstance(lit, Literal):
                raise ContractViolation(f"not a literal: {lit!r}")
            if seen.get(lit.var, lit.negated) != lit.negated:
                raise ContractViolation(
                    f"X{lit.var + 1} appears with both polarities"
                )
            seen[lit.var] = lit.negated
        return super().__new__(cls, lits)

    @classmethod
    def parse(cls, text: str | Iterable[str], names=None) -> "LiteralSet":
        if isinstance(text, str):
            parts = [p for p in re.split(r"[,\s{}]+", text) if p]
        else:
            parts = list(text)
        return cls(Literal.parse(p, names) for p in parts)

    @property
    def variables(self) -> frozenset:
        return frozenset(lit.var for lit in self)

    def ordered(self) -> tuple:
        return tuple(sorted(self))

    def sort_key(self):
        return (len(self), self.ordered())

    def max_var(self) -> int:
        return max((lit.var for lit in self), default=-1)

    def names(self, names=None) -> list:
        return [lit.name(names) for lit in self.ordered()]

    def __str__(self):
        return "{" + ",".join(self.names()) + "}"

    def __repr__(self):
        return f"LiteralSet({str(self)})"


def conjunction_eval(b: Iterable[Literal], c: Sequence[int]) -> int:
    """1 iff every literal of ``b`` is true under ``c``.

    The empty conjunction evaluates to 1.
    """
    for lit in b:
        if lit.value(c) == 0:
            return 0
    return 1


def literals_of_assignment(c: Sequence[int]) -> LiteralSet:
    return LiteralSet(Literal(j, not bit) for j, bit in enumerate(c))


# --------------------------------------------------------------------------
# outcome tables
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class OutcomeTable:
    """All ``2**k`` potential outcomes of one individual."""

    k: int
    outcomes: tuple

    def __post_init__(self):
        outs = tuple(int(v) for v in self.outcomes)
        if self.k < 0:
            raise ContractViolation("k must be nonnegative")
        if len(outs) != 1 << self.k:
            raise ContractViolation(
                f"table for k={self.k} needs {1 << self.k} entries, got {len(outs)}"
            )
        if any(v not in (0, 1) for v in outs):
            raise ContractViolation("outcomes must be 0/1")
        object.__setattr__(self, "outcomes", outs)

    @classmethod
    def from_bits(cls, bits: str) -> "OutcomeTable":
        bits = bits.replace(" ", "")
        k = int(math.log2(len(bits))) if bits else -1
        if k < 0 or 1 << k != len(bits):
            raise ContractViolation(f"length {len(bits)} is not a power of two")
        return cls(k, tuple(int(ch) for ch in bits))

    @classmethod
    def from_function(cls, k: int, fn) -> "OutcomeTable":
        return cls(k, tuple(int(bool(fn(*c))) for c in all_assignments(k)))

    @classmethod
    def from_mask(cls, k: int, mask: int) -> "OutcomeTable":
        """Bit ``i`` of ``mask`` is the outcome at index ``i``."""
        return cls(k, tuple((mask >> i) & 1 for i in range(1 << k)))

    @classmethod
    def of_conjunction(cls, b: Iterable[Literal], k: int) -> "OutcomeTable":
        b = LiteralSet(b)
        if b.max_var() >= k:
            raise ContractViolation(f"{b} mentions variables beyond k={k}")
        return cls(k, tuple(conjunction_eval(b, c) for c in all_assignments(k)))

    @classmethod
    def constant(cls, k: int, value: int) -> "OutcomeTable":
        return cls(k, (value,) * (1 << k))

    def __getitem__(self, c) -> int:
        if isinstance(c, int):
            return self.outcomes[c]
        if len(c) != self.k:
            raise ContractViolation(
                f"assignment of length {len(c)} for table with k={self.k}"
            )
        return self.outcomes[assignment_index(c)]

    def __len__(self):
        return len(self.outcomes)

    @property
    def mask(self) -> int:
        return sum(v << i for i, v in enumerate(self.outcomes))

    def bits(self) -> str:
        return "".join(map(str, self.outcomes))

    def minterms(self) -> list:
        return [i for i, v in enumerate(self.outcomes) if v]

    def is_constant(self, value: int | None = None) -> bool:
        vals = set(self.outcomes)
        if len(vals) != 1:
            return False
        return value is None or value in vals

    def flip_variable(self, v: int) -> "OutcomeTable":
        """Table with ``X{v+1}`` recoded as its complement."""
        bit = 1 << (self.k - 1 - v)
        return OutcomeTable(self.k, tuple(self.outcomes[i ^ bit] for i in range(len(self))))

    def restrict(self, keep: Sequence[int], fixed: dict | None = None) -> "OutcomeTable":
        """Table over the variables ``keep`` (in the given order).

        Dropped variables are set to the values in ``fixed`` when given;
        otherwise they are quantified universally (the restricted outcome is
        1 only if it is 1 for every value of the dropped variables).
        """
        keep = list(keep)
        drop = [j for j in range(self.k) if j not in keep]
        fixed = fixed or {}
        outs = []
        for ck in all_assignments(len(keep)):
            vals = []
            free = [j for j in drop if j not in fixed]
            for cd in all_assignments(len(free)):
                full = [0] * self.k
                for j, x in zip(keep, ck):
                    full[j] = x
                for j in drop:
                    full[j] = fixed.get(j, 0)
                for j, x in zip(free, cd):
                    full[j] = x
                vals.append(self[tuple(full)])
            outs.append(min(vals))
        return OutcomeTable(len(keep), tuple(outs))

    def __str__(self):
        return self.bits()


def _check_nonempty(b: LiteralSet, k: int):
    b = LiteralSet(b)
    if not b:
        raise ContractViolation("the empty conjunction cannot be a sufficient cause")
    if b.max_var() >= k:
        raise ContractViolation(f"{b} mentions variables beyond k={k}")
    return b


def _tables(t) -> list:
    if isinstance(t, OutcomeTable):
        return [t]
    if isinstance(t, Population):
        return [m.table for m in t.members]
    tables = list(t)
    if not tables:
        raise ContractViolation("empty sub-population")
    return tables


def is_sufficient_cause(b: LiteralSet, t) -> bool:
    """Whether ``b`` forces ``D=1`` for every table in ``t``.

    ``t`` may be one ``OutcomeTable`` or any nonempty collection of them
    (a sub-population).
    """
    tables = _tables(t)
    k = tables[0].k
    b = _check_nonempty(b, k)
    for c in all_assignments(k):
        if conjunction_eval(b, c):
            if any(tab[c] == 0 for tab in tables):
                return False
    return True


def is_minimal_sufficient_cause(b: LiteralSet, t) -> bool:
    tables = _tables(t)
    b = _check_nonempty(b, tables[0].k)
    if not is_sufficient_cause(b, tables):
        return False
    lits = b.ordered()
    # sufficiency is upward closed, so checking the maximal proper subsets suffices
    for drop in lits:
        sub = LiteralSet(x for x in lits if x != drop)
        if sub and is_sufficient_cause(sub, tables):
            return False
    return True


def is_determinative(bs: Iterable[LiteralSet], t) -> bool:
    tables = _tables(t)
    k = tables[0].k
    bs = [_check_nonempty(b, k) for b in bs]
    for c in all_assignments(k):
        fired = max((conjunction_eval(b, c) for b in bs), default=0)
        if any(tab[c] != fired for tab in tables):
            return False
    return True


# --------------------------------------------------------------------------
# monotonicity
# --------------------------------------------------------------------------

class Monotonicity(str, enum.Enum):
    POSITIVE = "positive"
    NEGATIVE = "negative"
    FLAT = "flat"
    NON_MONOTONE = "non-monotone"


def monotone_positive(t: OutcomeTable, v: int) -> bool:
    """Raising ``X{v+1}`` never lowers the outcome (flat counts as monotone)."""
    if not 0 <= v < t.k:
        raise ContractViolation(f"variable index {v} out of range for k={t.k}")
    bit = 1 << (t.k - 1 - v)
    outs = t.outcomes
    return all(outs[i | bit] >= outs[i] for i in range(len(outs)) if not i & bit)


def literal_monotone_positive(t: OutcomeTable, lit: Literal) -> bool:
    if lit.negated:
        return monotone_positive(t.flip_variable(lit.var), lit.var)
    return monotone_positive(t, lit.var)


def monotone_profile(t: OutcomeTable) -> tuple:
    out = []
    for v in range(t.k):
        pos = monotone_positive(t, v)
        neg = monotone_positive(t.flip_variable(v), v)
        if pos and neg:
            out.append(Monotonicity.FLAT)
        elif pos:
            out.append(Monotonicity.POSITIVE)
        elif neg:
            out.append(Monotonicity.NEGATIVE)
        else:
            out.append(Monotonicity.NON_MONOTONE)
    return tuple(out)


def _monotone_mask(mask: int, k: int) -> bool:
    n = 1 << k
    for v in range(k):
        bit = 1 << (k - 1 - v)
        for i in range(n):
            if not i & bit and (mask >> i) & 1 and not (mask >> (i | bit)) & 1:
                return False
    return True


def count_monotone_tables(k: int) -> int:
    """Number of tables on ``k`` variables positive-monotone in every variable.

    Plain enumeration of all ``2**(2**k)`` tables, so capped at ``k <= 4``.
    """
    if k < 0:
        raise ContractViolation("k must be nonnegative")
    if k > MAX_DEDEKIND_K:
        raise UnsupportedSize(
            f"exhaustive monotone enumeration is limited to k <= {MAX_DEDEKIND_K}"
        )
    return sum(1 for mask in range(1 << (1 << k)) if _monotone_mask(mask, k))


# --------------------------------------------------------------------------
# populations
# --------------------------------------------------------------------------

COUNT = "count"
PROBABILITY = "probability"


@dataclass(frozen=True)
class Member:
    id: str
    weight: float
    table: OutcomeTable


@dataclass(frozen=True)
class Population:
    members: tuple
    mode: str = COUNT

    def __post_init__(self):
        members = tuple(
            m if isinstance(m, Member) else Member(*m) for m in self.members
        )
        object.__setattr__(self, "members", members)
        if not members:
            raise ContractViolation("population must be nonempty")
        if self.mode not in (COUNT, PROBABILITY):
            raise ContractViolation(f"unknown weight mode {self.mode!r}")
        ks = {m.table.k for m in members}
        if len(ks) != 1:
            raise ContractViolation(f"tables disagree on k: {sorted(ks)}")
        ids = [m.id for m in members]
        if len(set(ids)) != len(ids):
            raise ContractViolation("duplicate individual ids")
        weights = [m.weight for m in members]
        if any(w < 0 for w in weights):
            raise ContractViolation("weights must be nonnegative")
        total = sum(weights)
        if total <= 0:
            raise ContractViolation("weights must sum to a positive value")
        if self.mode == PROBABILITY and abs(total - 1.0) > 1e-9:
            raise ModeError(f"probabilities sum to {total}, not 1")

    @classmethod
    def of(cls, tables, weights=None, ids=None, mode=COUNT) -> "Population":
        tables = list(tables)
        if weights is None:
            weights = [1] * len(tables)
        if ids is None:
            ids = [str(i + 1) for i in range(len(tables))]
        return cls(tuple(Member(str(i), w, t) for i, w, t in zip(ids, weights, tables)), mode)

    @property
    def k(self) -> int:
        return self.members[0].table.k

    @property
    def ids(self) -> tuple:
        return tuple(m.id for m in self.members)

    @property
    def tables(self) -> tuple:
        return tuple(m.table for m in self.members)

    def __len__(self):
        return len(self.members)

    def __iter__(self):
        return iter(self.members)

    def subset(self, ids: Iterable[str]) -> "Population":
        wanted = [str(i) for i in ids]
        chosen = [m for m in self.members if m.id in wanted]
        missing = set(wanted) - {m.id for m in chosen}
        if missing:
            raise ContractViolation(f"unknown individuals: {sorted(missing)}")
        return Population(tuple(chosen), COUNT)

    def total_weight(self) -> float:
        return sum(m.weight for m in self.members)


# --------------------------------------------------------------------------
# truth-table CSV
# --------------------------------------------------------------------------

def _outcome_columns(k: int) -> list:
    return ["D" + "".join(map(str, c)) for c in all_assignments(k)]


def read_truth_table(path, mode: str = COUNT) -> Population:
    with open(path, newline="") as fh:
        return parse_truth_table(fh.read(), mode)


def parse_truth_table(text: str, mode: str = COUNT) -> Population:
    """Parse the wide truth-table CSV (``id,weight,D00..0,...,D11..1``)."""
    rows = list(csv.reader(io.StringIO(text)))
    rows = [r for r in rows if any(cell.strip() for cell in r)]
    if not rows:
        raise ParseError("empty truth-table file")
    header = [h.strip() for h in rows[0]]
    if header[:2] != ["id", "weight"]:
        raise ParseError("header must start with id,weight", row=1)
    dcols = header[2:]
    n = len(dcols)
    k = n.bit_length() - 1
    if n == 0 or 1 << k != n:
        raise ParseError(f"{n} outcome columns is not a power of two", row=1)
    expected = _outcome_columns(k)
    for got, want in zip(dcols, expected):
        if got != want:
            raise ParseError(f"expected outcome column {want}", row=1, column=got)
    members = []
    for r, row in enumerate(rows[1:], start=2):
        if len(row) != len(header):
            raise ParseError(
                f"expected {len(header)} fields, found {len(row)} (k mismatch?)", row=r
            )
        ident = row[0].strip()
        try:
            weight = float(row[1])
        except ValueError:
            raise ParseError("weight is not a number", row=r, column="weight") from None
        if mode == COUNT and weight.is_integer():
            weight = int(weight)
        outs = []
        for col, cell in zip(dcols, row[2:]):
            cell = cell.strip()
            if cell not in ("0", "1"):
                raise ParseError(f"outcome must be 0 or 1, got {cell!r}", row=r, column=col)
            outs.append(int(cell))
        members.append(Member(ident, weight, OutcomeTable(k, tuple(outs))))
    if not members:
        raise ParseError("no individuals in truth-table file")
    try:
        return Population(tuple(members), mode)
    except ContractViolation as exc:
        raise ParseError(str(exc)) from None


def write_truth_table(pop: Population) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["id", "weight"] + _outcome_columns(pop.k))
    for m in pop.members:
        w.writerow([m.id, m.weight] + list(m.table.outcomes))
    return buf.getvalue()
