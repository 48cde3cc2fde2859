"""Post-hoc statistics over session exports and study datasets.

Per-participant Pareto filtering, two-sample JZS Bayes factors with
evidence categorization, Holm-adjusted Pearson correlations between the
objectives, and per-parameter IQR tables, plus CSV ingestion/export of
study records.
"""

from __future__ import annotations

import csv
import json
import math
import warnings
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np
from scipy import integrate, stats

from .design_space import PARAM_NAMES
from .errors import (
    DegenerateColumn,
    DegenerateSample,
    EmptyGroup,
    ParseError,
    SchemaError,
)
from .objectives import OBJECTIVE_NAMES
from .pareto import non_dominated_mask

DEFAULT_CAUCHY_SCALE = math.sqrt(2.0) / 2.0

# raw-scale bounds used to validate ingested rows (time has no upper cap)
_RAW_BOUNDS = {
    "trust": (1.0, 5.0),
    "predictability": (1.0, 5.0),
    "mental_demand": (1.0, 20.0),
    "perceived_safety": (-3.0, 3.0),
    "acceptance": (1.0, 7.0),
    "aesthetics": (1.0, 7.0),
    "time_to_cross": (0.0, math.inf),
}

# objectives where a smaller raw value is better
_RAW_MINIMIZE = ("mental_demand", "time_to_cross")

CSV_COLUMNS = (
    ["participant", "group", "iteration", "phase"]
    + [f"p{i}" for i in range(1, 10)]
    + [f"raw_{name}" for name in OBJECTIVE_NAMES]
    + [f"norm_{name}" for name in OBJECTIVE_NAMES]
)


@dataclass(frozen=True)
class StudyRecord:
    """One rated design of one participant."""

    participant: str
    group: str
    iteration: int
    phase: str
    params: tuple[float, ...]  # p1..p9
    raw: tuple[float, ...]  # 7 raw objective values
    normalized: tuple[float, ...]  # 7 normalized objective values


@dataclass(frozen=True)
class IngestResult:
    records: list[StudyRecord]
    violations: list[str]  # one message per rejected row


def ingest_dataset(path, mapping: Mapping[str, str] | str | None = None) -> IngestResult:
    """Load study records from a CSV file.

    ``mapping`` optionally renames external column names onto the schema in
    ``CSV_COLUMNS`` (a dict or a path to a JSON file with a ``columns``
    dict and an optional ``delimiter``).  Rows violating bounds are
    excluded from the result but every one is reported in ``violations``.

    Raises:
        ParseError: unreadable file.
        SchemaError: empty file or missing columns.
    """
    delimiter = ","
    columns: dict[str, str] = {}
    if isinstance(mapping, (str, Path)):
        with open(mapping, encoding="utf-8") as fh:
            cfg = json.load(fh)
        delimiter = cfg.get("delimiter", ",")
        columns = cfg.get("columns", {})
    elif mapping:
        columns = dict(mapping)

    try:
        with open(path, encoding="utf-8", newline="") as fh:
            reader = csv.DictReader(fh, delimiter=delimiter)
            header = reader.fieldnames
            if not header:
                raise SchemaError(f"{path}: empty file")
            rename = {ext: internal for internal, ext in columns.items()}
            normalized_header = [rename.get(h, h) for h in header]
            missing = [c for c in CSV_COLUMNS if c not in normalized_header]
            if missing:
                raise SchemaError(f"{path}: missing columns {missing}")
            rows = [dict(zip(normalized_header, row.values())) for row in reader]
    except OSError as exc:
        raise ParseError(f"{path}: {exc}") from exc
    except csv.Error as exc:
        raise ParseError(f"{path}: malformed CSV: {exc}") from exc

    records: list[StudyRecord] = []
    violations: list[str] = []
    seen: set[tuple[str, int]] = set()
    for line_no, row in enumerate(rows, start=2):
        try:
            record = _parse_row(row)
        except (KeyError, ValueError) as exc:
            violations.append(f"row {line_no}: {exc}")
            continue
        problems = _bounds_problems(record)
        key = (record.participant, record.iteration)
        if key in seen:
            problems.append(f"duplicate (participant, iteration) {key}")
        if problems:
            violations.append(f"row {line_no}: " + "; ".join(problems))
            continue
        seen.add(key)
        records.append(record)
    return IngestResult(records=records, violations=violations)


def _parse_row(row: Mapping[str, str]) -> StudyRecord:
    return StudyRecord(
        participant=str(row["participant"]),
        group=str(row["group"]),
        iteration=int(float(row["iteration"])),
        phase=str(row["phase"]),
        params=tuple(float(row[f"p{i}"]) for i in range(1, 10)),
        raw=tuple(float(row[f"raw_{n}"]) for n in OBJECTIVE_NAMES),
        normalized=tuple(float(row[f"norm_{n}"]) for n in OBJECTIVE_NAMES),
    )


def _bounds_problems(record: StudyRecord) -> list[str]:
    problems = []
    for name, value in zip(PARAM_NAMES, record.params):
        if not 0.0 <= value <= 1.0 or not math.isfinite(value):
            problems.append(f"{name}={value} outside [0, 1]")
    for name, value in zip(OBJECTIVE_NAMES, record.raw):
        lo, hi = _RAW_BOUNDS[name]
        if not lo <= value <= hi:
            problems.append(f"raw_{name}={value} outside [{lo}, {hi}]")
    for name, value in zip(OBJECTIVE_NAMES, record.normalized):
        if not -1.0 <= value <= 1.0:
            problems.append(f"norm_{name}={value} outside [-1, 1]")
    return problems


def write_records_csv(path, records: Iterable[StudyRecord]) -> None:
    """Write study records in the schema ``ingest_dataset`` reads back."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_COLUMNS)
        for r in records:
            writer.writerow(
                [r.participant, r.group, r.iteration, r.phase]
                + list(r.params)
                + list(r.raw)
                + list(r.normalized)
            )


def session_to_study_records(session, participant: str, group: str) -> list[StudyRecord]:
    """Study records of one session's completed iterations."""
    records = []
    for i, rec in enumerate(session.history, start=1):
        n_sobol = session.config.acquisition.n_sobol
        records.append(
            StudyRecord(
                participant=participant,
                group=group,
                iteration=i,
                phase="sampling" if i <= n_sobol else "optimization",
                params=rec.design.as_tuple(),
                raw=tuple(rec.raw_scores[n] for n in OBJECTIVE_NAMES),
                normalized=rec.objectives.as_tuple(),
            )
        )
    return records


# --- Pareto filtering over study records ---


def _oriented(values: np.ndarray, mode: str) -> np.ndarray:
    """Column matrix oriented so larger is better in every objective."""
    if mode == "normalized":
        return values
    oriented = values.copy()
    for j, name in enumerate(OBJECTIVE_NAMES):
        if name in _RAW_MINIMIZE:
            oriented[:, j] = -oriented[:, j]
    return oriented


def pareto_flags(records: Sequence[StudyRecord], mode: str = "normalized") -> list[bool]:
    """Per-record flag: is this design on its participant's Pareto front?

    Fronts are computed per participant, over either the normalized or the
    raw (orientation-corrected) objective values.
    """
    if mode not in ("normalized", "raw"):
        raise ValueError(f"mode must be 'normalized' or 'raw', got {mode!r}")
    flags = [False] * len(records)
    by_participant: dict[str, list[int]] = {}
    for i, r in enumerate(records):
        by_participant.setdefault(r.participant, []).append(i)
    for indices in by_participant.values():
        values = np.array(
            [
                records[i].normalized if mode == "normalized" else records[i].raw
                for i in indices
            ]
        )
        mask = non_dominated_mask(_oriented(values, mode))
        for local, i in enumerate(indices):
            flags[i] = bool(mask[local])
    return flags


def pareto_counts(
    records: Sequence[StudyRecord], mode: str = "normalized"
) -> dict[str, int]:
    """Pareto-design counts per group label, pooled over participants."""
    flags = pareto_flags(records, mode)
    counts: dict[str, int] = {}
    for record, flag in zip(records, flags):
        if flag:
            counts[record.group] = counts.get(record.group, 0) + 1
    return counts


def export_front_csv(
    records: Sequence[StudyRecord], path, mode: str = "normalized"
) -> int:
    """Write only the Pareto-true records, in the ingestion schema.

    Returns the number of rows written.
    """
    flags = pareto_flags(records, mode)
    front = [r for r, keep in zip(records, flags) if keep]
    write_records_csv(path, front)
    return len(front)


# --- JZS Bayes factor ---


class EvidenceCategory(Enum):
    EXTREME_EQUALITY = "extreme evidence for equality"
    STRONG_EQUALITY = "strong evidence for equality"
    MODERATE_EQUALITY = "moderate evidence for equality"
    INCONCLUSIVE = "inconclusive evidence"
    MODERATE_DIFFERENCE = "moderate evidence for difference"
    STRONG_DIFFERENCE = "strong evidence for difference"
    EXTREME_DIFFERENCE = "extreme evidence for difference"


@dataclass(frozen=True)
class BayesFactorResult:
    bf10: float
    error_pct: float
    evidence_label: EvidenceCategory


def categorize_bf(bf10: float) -> EvidenceCategory:
    """Evidence category of a BF10 value (monotone step function)."""
    if not bf10 > 0:
        raise ValueError(f"bf10 must be positive, got {bf10}")
    if bf10 < 0.01:
        return EvidenceCategory.EXTREME_EQUALITY
    if bf10 < 0.1:
        return EvidenceCategory.STRONG_EQUALITY
    if bf10 < 0.3:
        return EvidenceCategory.MODERATE_EQUALITY
    if bf10 <= 3.0:
        return EvidenceCategory.INCONCLUSIVE
    if bf10 <= 10.0:
        return EvidenceCategory.MODERATE_DIFFERENCE
    if bf10 <= 100.0:
        return EvidenceCategory.STRONG_DIFFERENCE
    return EvidenceCategory.EXTREME_DIFFERENCE


def table_label(bf10: float) -> str:
    """Report-table wording; splits inconclusive evidence by direction."""
    category = categorize_bf(bf10)
    if category is EvidenceCategory.INCONCLUSIVE:
        return (
            "inconclusive evid. for equality"
            if bf10 < 1.0
            else "inconclusive evid. for difference"
        )
    return category.value.replace("evidence", "evid.")


def bayes_factor_ttest(
    x, y, cauchy_scale: float = DEFAULT_CAUCHY_SCALE
) -> BayesFactorResult:
    """Two-sample JZS Bayes factor (BF10) with a Cauchy effect-size prior.

    The alternative's marginal likelihood integrates the noncentral-t
    density of the observed t statistic against a Cauchy(0, scale) prior on
    the standardized effect size; the null is the central-t density.
    Adaptive quadrature, split at the observed effect size.

    Raises:
        DegenerateSample: zero pooled variance.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.size < 2 or y.size < 2:
        raise ValueError("need at least 2 observations per sample")
    if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
        raise ValueError("samples must be finite")
    n1, n2 = x.size, y.size
    df = n1 + n2 - 2
    pooled_var = (
        (n1 - 1) * np.var(x, ddof=1) + (n2 - 1) * np.var(y, ddof=1)
    ) / df
    if pooled_var <= 0:
        raise DegenerateSample("zero pooled variance")
    t = float((np.mean(x) - np.mean(y)) / math.sqrt(pooled_var * (1 / n1 + 1 / n2)))
    bf10, error_pct = bf10_from_t(t, n1, n2, cauchy_scale)
    return BayesFactorResult(
        bf10=bf10, error_pct=error_pct, evidence_label=categorize_bf(bf10)
    )


def bf10_from_t(
    t: float, n1: int, n2: int, cauchy_scale: float = DEFAULT_CAUCHY_SCALE
) -> tuple[float, float]:
    """BF10 and an integration-error percentage from the t statistic.

    The Cauchy effect-size prior is treated as a scale mixture of normals;
    the effect size integrates out analytically and the mixture variable is
    integrated by adaptive quadrature on the log scale.  The null density
    is folded into the integrand so the ratio stays in float range even for
    extreme t.  (Directly integrating the noncentral-t likelihood over the
    effect size is the same integral, but overflows upstream for large
    samples; the tests check this route against it where both are stable.)
    """
    df = n1 + n2 - 2
    n_eff = n1 * n2 / (n1 + n2)
    r2 = cauchy_scale * cauchy_scale
    t2 = t * t

    def log_ratio(u):
        # log of (marginal likelihood at mixture scale g = e^u) / null,
        # times g (Jacobian of the log substitution)
        if u > 600.0:
            return -math.inf  # the g^{-1/2} tail has long since vanished
        g = math.exp(u)
        if g == 0.0:
            return -math.inf  # e^{-1/(2g)} dominates everything
        a = 1.0 + n_eff * g * r2
        return (
            -0.5 * math.log(a)
            - ((df + 1) / 2) * (math.log1p(t2 / (a * df)) - math.log1p(t2 / df))
            - 0.5 * math.log(2.0 * math.pi)
            - 0.5 * u
            - 1.0 / (2.0 * g)
        )

    grid = np.linspace(-25.0, 25.0, 201)
    log_values = [log_ratio(u) for u in grid]
    peak = float(grid[int(np.argmax(log_values))])
    shift = max(log_values)  # integrate O(1) numbers, re-scale afterwards

    def integrand(u):
        v = log_ratio(u) - shift
        return math.exp(v) if v > -700.0 else 0.0

    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        left, err_left = integrate.quad(
            integrand, -np.inf, peak, epsabs=1e-15, epsrel=1e-10, limit=300
        )
        right, err_right = integrate.quad(
            integrand, peak, np.inf, epsabs=1e-15, epsrel=1e-10, limit=300
        )
    total = left + right
    if total <= 0:
        raise DegenerateSample("vanishing marginal likelihood")
    log_bf10 = shift + math.log(total)
    bf10 = math.exp(log_bf10) if log_bf10 < 709.0 else math.inf
    error_pct = 100.0 * (err_left + err_right) / total
    return bf10, error_pct


# --- correlations ---


@dataclass(frozen=True)
class CorrelationResult:
    names: tuple[str, ...]
    r: np.ndarray  # (7, 7)
    p_adjusted: np.ndarray  # (7, 7), Holm-adjusted, diag 0
    significant: np.ndarray  # boolean (7, 7)
    n: int


def holm_adjust(p_values: np.ndarray) -> np.ndarray:
    """Holm step-down adjustment of a family of p-values."""
    p = np.asarray(p_values, dtype=float)
    m = p.size
    order = np.argsort(p, kind="stable")
    adjusted = np.empty(m)
    running = 0.0
    for rank, idx in enumerate(order):
        running = max(running, min(1.0, (m - rank) * p[idx]))
        adjusted[idx] = running
    return adjusted


def correlation_matrix(
    records: Sequence[StudyRecord],
    pareto_only: bool = False,
    use: str = "raw",
) -> CorrelationResult:
    """Pairwise Pearson correlations of the 7 objectives with Holm-adjusted
    p-values; optionally restricted to records on their participant's front.

    Raises:
        DegenerateColumn: a selected objective column is constant.
    """
    if pareto_only:
        flags = pareto_flags(records, mode="normalized")
        records = [r for r, keep in zip(records, flags) if keep]
    if len(records) < 3:
        raise ValueError("need at least 3 records")
    data = np.array(
        [r.raw if use == "raw" else r.normalized for r in records], dtype=float
    )
    n, k = data.shape
    for j in range(k):
        if np.ptp(data[:, j]) == 0:
            raise DegenerateColumn(f"objective {OBJECTIVE_NAMES[j]} is constant")
    r = np.corrcoef(data, rowvar=False)
    iu = np.triu_indices(k, 1)
    r_flat = np.clip(r[iu], -1.0, 1.0)
    with np.errstate(divide="ignore"):
        t_stat = r_flat * np.sqrt((n - 2) / np.maximum(1.0 - r_flat**2, 1e-300))
    p_flat = 2.0 * stats.t.sf(np.abs(t_stat), n - 2)
    p_adj_flat = holm_adjust(p_flat)
    p_adj = np.zeros((k, k))
    p_adj[iu] = p_adj_flat
    p_adj = p_adj + p_adj.T
    significant = p_adj < 0.05
    np.fill_diagonal(significant, True)
    return CorrelationResult(
        names=OBJECTIVE_NAMES, r=r, p_adjusted=p_adj, significant=significant, n=n
    )


# --- parameter IQR ---


def parameter_iqr(
    records: Sequence[StudyRecord], group: str
) -> dict[str, tuple[float, float]]:
    """Per-parameter (q1, q3), linear-interpolation quantiles, one group.

    Raises:
        EmptyGroup: no records carry the group label.
    """
    rows = [r.params for r in records if r.group == group]
    if not rows:
        raise EmptyGroup(f"no records for group {group!r}")
    data = np.asarray(rows, dtype=float)
    q1, q3 = np.percentile(data, [25, 75], axis=0, method="linear")
    return {
        name: (float(q1[j]), float(q3[j])) for j, name in enumerate(PARAM_NAMES)
    }


# --- grouped Bayes-factor tables ---


def parameter_bf_table(
    records: Sequence[StudyRecord],
    groups: tuple[str, str],
    pareto_only: bool = True,
    mode: str = "normalized",
) -> dict[str, BayesFactorResult]:
    """BF10 per design parameter comparing two group labels.

    Only records whose group is one of ``groups`` enter the comparison;
    with ``pareto_only`` the records are first filtered to each
    participant's Pareto front.
    """
    selected = [r for r in records if r.group in groups]
    if pareto_only:
        flags = pareto_flags(selected, mode=mode)
        selected = [r for r, keep in zip(selected, flags) if keep]
    a = [r for r in selected if r.group == groups[0]]
    b = [r for r in selected if r.group == groups[1]]
    if len(a) < 2 or len(b) < 2:
        raise EmptyGroup(f"need >= 2 records per group, got {len(a)}/{len(b)}")
    table = {}
    for j, name in enumerate(PARAM_NAMES):
        table[name] = bayes_factor_ttest(
            [r.params[j] for r in a], [r.params[j] for r in b]
        )
    return table


def objective_bf_table(
    records: Sequence[StudyRecord],
    groups: tuple[str, str],
    pareto_only: bool = True,
    use: str = "raw",
) -> dict[str, BayesFactorResult]:
    """BF10 per objective comparing two group labels."""
    selected = [r for r in records if r.group in groups]
    if pareto_only:
        flags = pareto_flags(selected, mode="normalized")
        selected = [r for r, keep in zip(selected, flags) if keep]
    a = [r for r in selected if r.group == groups[0]]
    b = [r for r in selected if r.group == groups[1]]
    if len(a) < 2 or len(b) < 2:
        raise EmptyGroup(f"need >= 2 records per group, got {len(a)}/{len(b)}")
    table = {}
    for j, name in enumerate(OBJECTIVE_NAMES):
        values = lambda rs: [r.raw[j] if use == "raw" else r.normalized[j] for r in rs]
        table[name] = bayes_factor_ttest(values(a), values(b))
    return table
