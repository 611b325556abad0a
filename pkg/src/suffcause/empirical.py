"""Test statistics on stratified count data.

Every condition is a linear combination of cell quantities.  In cohort data
the cells are risks ``a/n``; in case-control data they are odds ratios
against the all-unexposed cell of the same stratum, which under a rare
outcome are proportional to the risks, so signs carry over.

Strata are never pooled: each stratum gets its own result.
"""
from __future__ import annotations

import csv
import enum
import io
import math
from dataclasses import dataclass, field
from pathlib import Path
from statistics import NormalDist
from typing import Iterable

import numpy as np

from .core import Literal, LiteralSet, all_assignments, assignment_index
from .errors import (
    ContractViolation,
    DesignError,
    MissingCell,
    ParseError,
    Unsupported,
    ZeroCell,
)
from .interaction import CausePartition, _nonempty_subsets
from .trees import CoefficientVector, LiteralTree, mobius

Z95 = NormalDist().inv_cdf(0.975)


class Design(str, enum.Enum):
    COHORT = "cohort"
    CASE_CONTROL = "case-control"


COUNT_COLUMNS = {
    Design.COHORT: ("events", "total"),
    Design.CASE_CONTROL: ("cases", "controls"),
}


@dataclass(frozen=True)
class StratifiedCounts:
    """Cell counts keyed by ``(stratum, assignment)``.

    ``cells[(w, c)] = (a, n)`` where ``a`` counts events (cases) and ``n``
    counts totals (controls).  A cell missing from the map is absent.
    """

    exposure_names: tuple
    design: Design
    cells: dict
    stratum_names: tuple = ()
    strata: tuple = ((),)

    def __post_init__(self):
        object.__setattr__(self, "design", Design(self.design))
        k = len(self.exposure_names)
        for (w, c), (a, n) in self.cells.items():
            if len(c) != k or any(x not in (0, 1) for x in c):
                raise ContractViolation(f"bad assignment {c} for k={k}")
            if len(w) != len(self.stratum_names):
                raise ContractViolation(f"bad stratum label {w}")
            if a < 0 or n < 0:
                raise ContractViolation("counts must be nonnegative")
            if self.design is Design.COHORT and a > n:
                raise ContractViolation(f"events exceed total in cell {c}")
        seen = list(dict.fromkeys(self.strata))
        for w, _ in self.cells:
            if w not in seen:
                seen.append(w)
        object.__setattr__(self, "strata", tuple(seen))

    @property
    def k(self) -> int:
        return len(self.exposure_names)

    def cell(self, w, c) -> tuple | None:
        return self.cells.get((tuple(w), tuple(c)))

    def stratum(self, w) -> dict:
        w = tuple(w)
        if w not in self.strata:
            raise ContractViolation(f"unknown stratum {w}")
        return {c: v for (s, c), v in self.cells.items() if s == w}

    def with_continuity(self, w, add: float = 0.5) -> "StratifiedCounts":
        """Add ``add`` to both counts of every cell in stratum ``w``."""
        w = tuple(w)
        cells = {
            key: ((a + add, n + add) if key[0] == w else (a, n))
            for key, (a, n) in self.cells.items()
        }
        return StratifiedCounts(self.exposure_names, self.design, cells, self.stratum_names, self.strata)


def _parse_count(raw, row, col):
    try:
        value = int(raw)
    except (TypeError, ValueError):
        raise ParseError(f"count {raw!r} is not an integer", row, col) from None
    if value < 0:
        raise ParseError(f"negative count {value}", row, col)
    return value


def parse_counts(text: str, design, exposures=None, strata=()) -> StratifiedCounts:
    """Read a counts CSV.

    Exposure columns default to every column that is neither a stratum nor
    a count column, in file order.
    """
    design = Design(design)
    reader = csv.DictReader(io.StringIO(text))
    header = [h.strip() for h in (reader.fieldnames or [])]
    if not header:
        raise ParseError("empty counts file", row=1)
    reader.fieldnames = header
    event_col, total_col = COUNT_COLUMNS[design]
    for col in (event_col, total_col):
        if col not in header:
            raise ParseError(f"{design.value} data needs a {col!r} column", row=1, column=col)
    strata = tuple(strata or ())
    for col in strata:
        if col not in header:
            raise ParseError("unknown stratum column", row=1, column=col)
    if exposures is None:
        exposures = tuple(h for h in header if h not in strata and h not in (event_col, total_col))
    exposures = tuple(exposures)
    for col in exposures:
        if col not in header:
            raise ParseError("unknown exposure column", row=1, column=col)
    if not exposures:
        raise ParseError("no exposure columns", row=1)
    cells = {}
    order = []
    for row, rec in enumerate(reader, start=2):
        c = []
        for col in exposures:
            raw = (rec.get(col) or "").strip()
            if raw not in ("0", "1"):
                raise ParseError(f"exposure value {raw!r} is not 0/1", row, col)
            c.append(int(raw))
        w = tuple((rec.get(col) or "").strip() for col in strata)
        a = _parse_count((rec.get(event_col) or "").strip(), row, event_col)
        n = _parse_count((rec.get(total_col) or "").strip(), row, total_col)
        if design is Design.COHORT and a > n:
            raise ParseError(f"events {a} exceed total {n}", row, event_col)
        key = (w, tuple(c))
        if key in cells:
            raise ParseError("duplicate cell", row)
        cells[key] = (a, n)
        if w not in order:
            order.append(w)
    if not cells:
        raise ParseError("counts file has no data rows", row=2)
    return StratifiedCounts(exposures, design, cells, strata, tuple(order))


def read_counts(path, design, exposures=None, strata=()) -> StratifiedCounts:
    return parse_counts(Path(path).read_text(), design, exposures, strata)


# --------------------------------------------------------------------------
# cell-level quantities
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class CellMean:
    mean: float
    variance: float
    small_sample: bool = False


def cell_means(d: StratifiedCounts, w=(), cells: Iterable | None = None) -> dict:
    """Risk and binomial variance per cell of stratum ``w``."""
    if d.design is not Design.COHORT:
        raise DesignError("cell means need cohort data; use theta_from_case_control")
    w = tuple(w)
    present = d.stratum(w)
    wanted = present if cells is None else [tuple(c) for c in cells]
    out = {}
    for c in wanted:
        if c not in present:
            raise MissingCell(w, c)
        a, n = present[c]
        if n <= 0:
            raise MissingCell(w, c, "zero total")
        p = a / n
        out[c] = CellMean(p, p * (1 - p) / n, small_sample=a == 0 or a == n)
    return out


def _odds_ratio_moments(d: StratifiedCounts, w, cells):
    """Odds ratios vs the all-zero cell and their delta-method covariance."""
    w = tuple(w)
    present = d.stratum(w)
    ref = (0,) * d.k
    for c in [ref, *cells]:
        if c not in present:
            raise MissingCell(w, c)
        a, b = present[c]
        if a <= 0:
            raise ZeroCell(w, c, "case")
        if b <= 0:
            raise ZeroCell(w, c, "control")
    a0, b0 = present[ref]
    v0 = 1 / a0 + 1 / b0
    r = np.array([(present[c][0] / present[c][1]) / (a0 / b0) for c in cells])
    logcov = np.full((len(cells), len(cells)), v0)
    for i, c in enumerate(cells):
        a, b = present[c]
        logcov[i, i] += 1 / a + 1 / b
        if c == ref:
            logcov[i, :] = 0.0
            logcov[:, i] = 0.0
    return r, logcov * np.outer(r, r)


def _risk_ratio_moments(d: StratifiedCounts, w, cells):
    w = tuple(w)
    ref = (0,) * d.k
    means = cell_means(d, w, [ref, *cells])
    p0 = means[ref].mean
    if p0 <= 0:
        raise ZeroCell(w, ref, "event")
    a0, n0 = d.cell(w, ref)
    v0 = 1 / a0 - 1 / n0
    r = np.array([means[c].mean / p0 for c in cells])
    logcov = np.full((len(cells), len(cells)), v0)
    for i, c in enumerate(cells):
        a, n = d.cell(w, c)
        if a <= 0:
            raise ZeroCell(w, c, "event")
        logcov[i, i] += 1 / a - 1 / n
        if c == ref:
            logcov[i, :] = 0.0
            logcov[:, i] = 0.0
    return r, logcov * np.outer(r, r)


# --------------------------------------------------------------------------
# saturated-model coefficients
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class LatticeCoefficients:
    """Coefficients indexed by subsets of ``literals`` (bitmask, first = MSB).

    With ``intercept`` set, the empty subset is not estimated and is held at
    that value (the ratio scale, where the reference cell is 1).
    """

    literals: tuple
    values: dict  # mask -> float
    covariance: np.ndarray
    index: tuple  # masks matching covariance rows
    intercept: float | None = None

    def __getitem__(self, subset) -> float:
        mask = subset if isinstance(subset, int) else _mask(self.literals, subset)
        if mask == 0 and self.intercept is not None:
            return self.intercept
        return self.values[mask]


@dataclass(frozen=True)
class ThetaCoefficients(LatticeCoefficients):
    ratios: dict = field(default_factory=dict)  # assignment -> ratio

    @property
    def theta(self) -> dict:
        return {s: v for s, v in self.values.items() if s}


def _mask(literals, subset) -> int:
    m = len(literals)
    mask = 0
    for lit in subset:
        mask |= 1 << (m - 1 - literals.index(lit))
    return mask


def _mobius_jacobian(m: int, include_empty: bool) -> np.ndarray:
    """Rows: nonempty (or all) subsets; columns: cells with the same masks."""
    masks = list(range(0 if include_empty else 1, 1 << m))
    jac = np.zeros((len(masks), len(masks)))
    for i, s in enumerate(masks):
        for j, t in enumerate(masks):
            if t & s == t:
                jac[i, j] = (-1) ** bin(s ^ t).count("1")
    return jac


def _exposure_literals(k):
    return tuple(Literal(j) for j in range(k))


def _theta(d, w, moments) -> ThetaCoefficients:
    k = d.k
    cells = [c for c in all_assignments(k) if any(c)]
    r, cov_r = moments(d, w, cells)
    vals = {0: 1.0}
    for c, x in zip(cells, r):
        vals[assignment_index(c)] = float(x)
    theta = mobius(vals, k)
    jac = _mobius_jacobian(k, include_empty=False)
    cov = jac @ cov_r @ jac.T
    cov = (cov + cov.T) / 2
    index = tuple(range(1, 1 << k))
    ratios = {(0,) * k: 1.0, **{c: float(x) for c, x in zip(cells, r)}}
    return ThetaCoefficients(
        _exposure_literals(k), {s: float(theta[s]) for s in index}, cov, index,
        intercept=1.0, ratios=ratios,
    )


def theta_from_case_control(d: StratifiedCounts, w=(), continuity: float = 0.0) -> ThetaCoefficients:
    """Saturated excess-odds-ratio coefficients in stratum ``w``.

    ``r_c = 1 + sum_{S <= c, S != 0} theta_S``; the covariance comes from the
    delta method with the shared reference cell.
    """
    if d.design is not Design.CASE_CONTROL:
        raise DesignError("theta_from_case_control needs case-control data")
    if continuity:
        d = d.with_continuity(w, continuity)
    return _theta(d, w, _odds_ratio_moments)


def theta_from_cohort(d: StratifiedCounts, w=()) -> ThetaCoefficients:
    """Excess-risk-ratio coefficients, the cohort analogue of the above."""
    if d.design is not Design.COHORT:
        raise DesignError("theta_from_cohort needs cohort data")
    return _theta(d, w, _risk_ratio_moments)


def beta_from_cohort(d: StratifiedCounts, w=()) -> LatticeCoefficients:
    """Saturated identity-link coefficients: Möbius transform of the risks."""
    k = d.k
    cells = list(all_assignments(k))
    means = cell_means(d, w, cells)
    vals = {assignment_index(c): means[c].mean for c in cells}
    beta = mobius(vals, k)
    jac = _mobius_jacobian(k, include_empty=True)
    cov = jac @ np.diag([means[c].variance for c in cells]) @ jac.T
    index = tuple(range(1 << k))
    return LatticeCoefficients(_exposure_literals(k), {s: float(beta[s]) for s in index}, cov, index)


# --------------------------------------------------------------------------
# contrasts
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class ContrastResult:
    condition_id: str
    estimate: float
    std_error: float
    ci_low: float
    ci_high: float
    positive: bool
    p_value: float  # one-sided, H0: contrast <= 0
    assumptions: tuple = ()
    warnings: tuple = ()
    expression: str = ""

    @classmethod
    def from_moments(cls, condition_id, estimate, variance, **kw) -> "ContrastResult":
        se = math.sqrt(max(variance, 0.0))
        if se > 0:
            p = 1 - NormalDist().cdf(estimate / se)
        else:
            p = 0.0 if estimate > 0 else 1.0
        return cls(
            condition_id, float(estimate), se,
            estimate - Z95 * se, estimate + Z95 * se, bool(estimate > 0), p, **kw,
        )

    def to_dict(self) -> dict:
        return {
            "condition_id": self.condition_id,
            "expression": self.expression,
            "estimate": self.estimate,
            "std_error": self.std_error,
            "ci_low": self.ci_low,
            "ci_high": self.ci_high,
            "positive": self.positive,
            "p_value": self.p_value,
            "assumptions": list(self.assumptions),
            "warnings": list(self.warnings),
        }


def linear_constraint_eval(coeffs: LatticeCoefficients, m: CoefficientVector,
                           condition_id: str = "linear-constraint") -> ContrastResult:
    """``sum_S m_S coef_S`` with variance ``m' Sigma m``."""
    if tuple(m.literals) != tuple(coeffs.literals):
        raise ContractViolation("coefficient vector and estimates use different lattices")
    est = sum(mv * coeffs[s] for s, mv in m.entries.items())
    vec = np.array([m[s] for s in coeffs.index], dtype=float)
    var = float(vec @ coeffs.covariance @ vec)
    return ContrastResult.from_moments(condition_id, est, var, expression=m.render())


@dataclass(frozen=True)
class CellContrast:
    """``sum_c weight_c * cell_c`` over full exposure assignments."""

    weights: dict  # assignment -> int

    def terms(self) -> list:
        return sorted((c, v) for c, v in self.weights.items() if v)

    def render(self, cell_name="E") -> str:
        pos = [(c, v) for c, v in self.terms() if v > 0]
        neg = [(c, -v) for c, v in self.terms() if v < 0]

        def fmt(c, v):
            name = f"{cell_name}[{''.join(map(str, c))}]"
            return name if v == 1 else f"{v}*{name}"

        left = " + ".join(fmt(c, v) for c, v in sorted(pos, reverse=True)) or "0"
        right = " + ".join(fmt(c, v) for c, v in sorted(neg, reverse=True)) or "0"
        return f"{left} > {right}"


def _add(weights, c, v):
    weights[c] = weights.get(c, 0) + v


def irreducibility_weights(p: CausePartition, tree: LiteralTree | None, c2=()) -> CellContrast:
    weights = {}
    _add(weights, p.assignment((), c2), 1)
    for lit in p.b:
        _add(weights, p.assignment((lit,), c2), -1)
    for edge in (tree.literal_edges() if tree is not None else ()):
        _add(weights, p.assignment(edge, c2), 1)
    return CellContrast(weights)


def singularity_weights(p: CausePartition, bplus: LiteralSet, tree: LiteralTree | None) -> CellContrast:
    weights = {}
    _add(weights, p.assignment(), 1)
    for lit in bplus:
        _add(weights, p.assignment((lit,)), -1)
    for sub in _nonempty_subsets(p.b - bplus):
        _add(weights, p.assignment(sub), -1)
    for edge in (tree.literal_edges() if tree is not None else ()):
        _add(weights, p.assignment(edge), 1)
    return CellContrast(weights)


def evaluate_cells(d: StratifiedCounts, contrast: CellContrast, w=(), continuity: float = 0.0):
    """Estimate and variance of a cell contrast on the design's natural scale."""
    w = tuple(w)
    cells = [c for c, _ in contrast.terms()]
    weights = np.array([v for _, v in contrast.terms()], dtype=float)
    warnings = []
    if d.design is Design.COHORT:
        means = cell_means(d, w, cells)
        est = float(sum(v * means[c].mean for c, v in contrast.terms()))
        var = float(sum(v * v * means[c].variance for c, v in contrast.terms()))
        small = [c for c in cells if means[c].small_sample]
        if small:
            warnings.append(
                "degenerate binomial variance in cells "
                + ", ".join("".join(map(str, c)) for c in small)
            )
    else:
        if continuity:
            d = d.with_continuity(w, continuity)
            warnings.append(f"continuity correction +{continuity} applied to stratum")
        r, cov = _odds_ratio_moments(d, w, cells)
        est = float(weights @ r)
        var = float(weights @ cov @ weights)
    return est, var, warnings


def _tree_text(tree, names):
    if tree is None or not tree.edges:
        return "none"
    return tree.describe(names)


def _condition_id(kind, b, bplus, tree, w, c2, names, p: CausePartition):
    parts = [
        kind,
        "b={" + ",".join(b.names(names)) + "}",
        "bplus={" + ",".join(LiteralSet(bplus).names(names)) + "}",
        "tree=" + _tree_text(tree, names),
        "stratum=" + (",".join(w) if w else "all"),
    ]
    if p.c2_vars:
        parts.append(
            "c2=" + ",".join(f"{names[j]}={x}" for j, x in zip(p.c2_vars, c2))
        )
    return " ".join(parts)


def _prepare(d, b, bplus, tree):
    p = CausePartition(LiteralSet(b), d.k)
    bplus = LiteralSet(bplus or ())
    if not bplus <= p.b:
        raise ContractViolation("bplus must be a subset of b")
    if tree is None:
        if len(bplus) > 1:
            raise ContractViolation("a tree on bplus is required when |bplus| > 1")
    elif frozenset(tree.vertices) != frozenset(bplus):
        raise ContractViolation("tree does not span bplus")
    return p, bplus


def _monotone_assumptions(bplus, names):
    if not bplus:
        return ()
    return (
        "positive monotonic effects declared for "
        + ",".join(LiteralSet(bplus).names(names))
        + " (not verifiable from data)",
    )


def _design_assumptions(d):
    if d.design is Design.CASE_CONTROL:
        return ("rare outcome: odds ratios stand in for risk ratios",)
    return ()


def _base_assumptions(d):
    out = ["no unmeasured confounding within each stratum"]
    out.extend(_design_assumptions(d))
    return tuple(out)


def irreducibility_contrast(d: StratifiedCounts, b, bplus=(), tree: LiteralTree | None = None,
                            c2=None, w=(), continuity: float = 0.0) -> ContrastResult:
    """Irreducibility test statistic, optionally strengthened by a tree on ``bplus``."""
    p, bplus = _prepare(d, b, bplus, tree)
    names = d.exposure_names
    if c2 is None:
        if p.c2_vars and d.design is Design.CASE_CONTROL:
            raise Unsupported("case-control contrasts need c2 given explicitly as all zeros")
        c2 = (0,) * len(p.c2_vars) if p.c2_vars else ()
    c2 = tuple(int(x) for x in c2)
    if d.design is Design.CASE_CONTROL and any(c2):
        raise Unsupported("case-control contrasts are only available at c2 = 0")
    contrast = irreducibility_weights(p, tree, c2)
    est, var, warnings = evaluate_cells(d, contrast, w, continuity)
    return ContrastResult.from_moments(
        _condition_id("irreducible", p.b, bplus, tree, tuple(w), c2, names, p),
        est, var,
        assumptions=_base_assumptions(d) + _monotone_assumptions(bplus, names),
        warnings=tuple(warnings),
        expression=contrast.render("R" if d.design is Design.CASE_CONTROL else "E"),
    )


def singularity_contrast(d: StratifiedCounts, b, bplus=(), tree: LiteralTree | None = None,
                         w=(), continuity: float = 0.0) -> ContrastResult:
    p, bplus = _prepare(d, b, bplus, tree)
    if p.c2_vars:
        raise ContractViolation("singularity contrasts need one literal of b per exposure")
    names = d.exposure_names
    contrast = singularity_weights(p, bplus, tree)
    est, var, warnings = evaluate_cells(d, contrast, w, continuity)
    return ContrastResult.from_moments(
        _condition_id("singular", p.b, bplus, tree, tuple(w), (), names, p),
        est, var,
        assumptions=_base_assumptions(d) + _monotone_assumptions(bplus, names),
        warnings=tuple(warnings),
        expression=contrast.render("R" if d.design is Design.CASE_CONTROL else "E"),
    )


MSC_CLAIM = "minimal sufficient cause relative to the exposures for some individual"


def msc_contrast(d: StratifiedCounts, b, w=(), continuity: float = 0.0) -> ContrastResult:
    """Irreducibility contrast at ``c2 = 0`` with the other exposures assumed monotone."""
    p = CausePartition(LiteralSet(b), d.k)
    zero = (0,) * len(p.c2_vars)
    res = irreducibility_contrast(d, b, (), None, zero, w, continuity)
    others = [d.exposure_names[j] for j in p.c2_vars]
    assumptions = res.assumptions
    if others:
        assumptions = assumptions + (
            "positive monotonic effects declared for " + ",".join(others) + " (not verifiable from data)",
        )
    return ContrastResult(
        "msc " + res.condition_id.split(" ", 1)[1],
        res.estimate, res.std_error, res.ci_low, res.ci_high, res.positive, res.p_value,
        assumptions, res.warnings, res.expression,
    )


# --------------------------------------------------------------------------
# bootstrap
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class BootstrapResult:
    std_error: float  # plain standard deviation of the replicates
    robust_std_error: float  # IQR / 1.349
    n_resamples: int
    n_valid: int
    seed: int


def parametric_bootstrap(d: StratifiedCounts, contrast: CellContrast, w=(),
                         n_resamples: int = 10_000, seed: int = 0,
                         continuity: float = 0.0) -> BootstrapResult:
    """Resample the stratum's counts from their fitted distribution.

    Case-control data: cases and controls are independent multinomials with
    the observed margins.  Cohort data: independent binomials per cell.
    Replicates with an undefined ratio (a zero cell) are dropped.
    """
    w = tuple(w)
    if continuity:
        d = d.with_continuity(w, continuity)
    rng = np.random.default_rng(seed)
    terms = contrast.terms()
    weights = np.array([v for _, v in terms], dtype=float)
    if d.design is Design.COHORT:
        cells = [c for c, _ in terms]
        counts = [d.cell(w, c) for c in cells]
        if any(x is None for x in counts):
            raise MissingCell(w, cells[counts.index(None)])
        n = np.array([x[1] for x in counts])
        p = np.array([x[0] for x in counts]) / n
        reps = rng.binomial(n.astype(np.int64), p, size=(n_resamples, len(cells))) / n
        stats = reps @ weights
    else:
        ref = (0,) * d.k
        cells = list(dict.fromkeys([ref] + [c for c, _ in terms]))
        counts = [d.cell(w, c) for c in cells]
        if any(x is None for x in counts):
            raise MissingCell(w, cells[counts.index(None)])
        a = np.array([x[0] for x in counts], dtype=float)
        b = np.array([x[1] for x in counts], dtype=float)
        ra = rng.multinomial(int(round(a.sum())), a / a.sum(), size=n_resamples).astype(float)
        rb = rng.multinomial(int(round(b.sum())), b / b.sum(), size=n_resamples).astype(float)
        with np.errstate(divide="ignore", invalid="ignore"):
            odds = ra / rb
            ratios = odds / odds[:, :1]
            pos = {c: i for i, c in enumerate(cells)}
            stats = ratios[:, [pos[c] for c, _ in terms]] @ weights
    stats = stats[np.isfinite(stats)]
    if stats.size < 2:
        raise ContractViolation("too few valid bootstrap replicates")
    q75, q25 = np.percentile(stats, [75, 25])
    return BootstrapResult(
        float(np.std(stats, ddof=1)), float((q75 - q25) / 1.349), n_resamples, int(stats.size), seed,
    )


def counts_from_population(pop, exposure_names=None, design=Design.COHORT) -> StratifiedCounts:
    """Infinite-sample cohort counts: ``events_c = sum_w weight_w * D_c(w)``."""
    k = pop.k
    names = tuple(exposure_names or (f"X{j + 1}" for j in range(k)))
    total = pop.total_weight()
    cells = {}
    for c in all_assignments(k):
        events = sum(m.weight * m.table[c] for m in pop.members)
        cells[((), c)] = (events, total)
    return StratifiedCounts(names, Design(design), cells)
