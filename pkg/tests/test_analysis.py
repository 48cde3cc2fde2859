import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats

from conftest import jzs_bf10_effect_size_integral
from ehmi_mobo.analysis import (
    CSV_COLUMNS,
    EvidenceCategory,
    StudyRecord,
    bayes_factor_ttest,
    bf10_from_t,
    categorize_bf,
    correlation_matrix,
    holm_adjust,
    ingest_dataset,
    parameter_bf_table,
    parameter_iqr,
    pareto_counts,
    pareto_flags,
    session_to_study_records,
    table_label,
    write_records_csv,
)
from ehmi_mobo.errors import (
    DegenerateColumn,
    DegenerateSample,
    EmptyGroup,
    SchemaError,
)


def make_record(participant="p1", group="female", iteration=1, **overrides):
    base = dict(
        participant=participant,
        group=group,
        iteration=iteration,
        phase="sampling",
        params=tuple([0.5] * 9),
        raw=(3.0, 3.0, 10.0, 0.0, 4.0, 4.0, 12.0),
        normalized=(0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.6),
    )
    base.update(overrides)
    return StudyRecord(**base)


def synthetic_records(rng, n_participants=6, n_iterations=10):
    """Records with noisy correlated objectives, two groups."""
    records = []
    for p in range(n_participants):
        group = "female" if p % 2 == 0 else "male"
        for i in range(1, n_iterations + 1):
            params = rng.uniform(0, 1, size=9)
            base = rng.uniform(-0.5, 0.5)
            raw_trust = 3 + 2 * base + rng.normal(0, 0.3)
            raw = (
                float(np.clip(raw_trust, 1, 5)),
                float(np.clip(3 + 1.8 * base + rng.normal(0, 0.3), 1, 5)),
                float(np.clip(10 - 6 * base + rng.normal(0, 1.0), 1, 20)),
                float(np.clip(4 * base + rng.normal(0, 0.5), -3, 3)),
                float(np.clip(4 + 2 * base + rng.normal(0, 0.4), 1, 7)),
                float(np.clip(4 + 2 * base + rng.normal(0, 0.4), 1, 7)),
                float(np.clip(12 - 4 * base + rng.normal(0, 1.0), 0, 60)),
            )
            normalized = (
                (raw[0] - 1) / 2 - 1,
                (raw[1] - 1) / 2 - 1,
                -((raw[2] - 1) / 9.5 - 1),
                raw[3] / 3,
                (raw[4] - 1) / 3 - 1,
                (raw[5] - 1) / 3 - 1,
                -(raw[6] / 30 - 1),
            )
            records.append(
                make_record(
                    participant=f"p{p}",
                    group=group,
                    iteration=i,
                    params=tuple(params),
                    raw=raw,
                    normalized=tuple(float(v) for v in normalized),
                )
            )
    return records


# --- Bayes factor ---


def test_bf10_matches_effect_size_quadrature_oracle():
    # moderate sizes: the regime where scipy's noncentral t is trustworthy
    for t, n1, n2 in [(0.0, 10, 12), (1.3, 25, 30), (-2.1, 40, 35),
                      (3.7, 50, 50), (0.4, 5, 5)]:
        got, err_pct = bf10_from_t(t, n1, n2, 0.707)
        oracle = jzs_bf10_effect_size_integral(t, n1, n2, 0.707)
        assert got == pytest.approx(oracle, rel=1e-5)
        assert err_pct >= 0.0


def test_bf_null_samples_favor_equality(rng):
    x = rng.standard_normal(500)
    y = rng.standard_normal(500)
    result = bayes_factor_ttest(x, y)
    assert result.bf10 < 1 / 3
    assert result.evidence_label in (
        EvidenceCategory.MODERATE_EQUALITY,
        EvidenceCategory.STRONG_EQUALITY,
        EvidenceCategory.EXTREME_EQUALITY,
    )


def test_bf_large_effect_favors_difference(rng):
    x = rng.standard_normal(100) + 1.5
    y = rng.standard_normal(100)
    result = bayes_factor_ttest(x, y)
    assert result.bf10 > 100
    assert result.evidence_label is EvidenceCategory.EXTREME_DIFFERENCE


def test_bf_symmetry():
    rng = np.random.default_rng(3)
    x = rng.standard_normal(30) + 0.4
    y = rng.standard_normal(25)
    a = bayes_factor_ttest(x, y).bf10
    b = bayes_factor_ttest(y, x).bf10
    assert abs(a - b) / a < 1e-6


def test_bf_invariant_under_common_affine_rescaling():
    rng = np.random.default_rng(4)
    x = rng.standard_normal(20) + 0.8
    y = rng.standard_normal(22)
    a = bayes_factor_ttest(x, y).bf10
    b = bayes_factor_ttest(5.0 * x - 3.0, 5.0 * y - 3.0).bf10
    assert a == pytest.approx(b, rel=1e-9)


def test_bf_degenerate_sample():
    with pytest.raises(DegenerateSample):
        bayes_factor_ttest([2.0, 2.0, 2.0], [2.0, 2.0])
    with pytest.raises(ValueError):
        bayes_factor_ttest([1.0], [1.0, 2.0])


@pytest.mark.parametrize(
    "bf,expected",
    [
        (0.005, EvidenceCategory.EXTREME_EQUALITY),
        (0.05, EvidenceCategory.STRONG_EQUALITY),
        (0.17, EvidenceCategory.MODERATE_EQUALITY),
        (1.0, EvidenceCategory.INCONCLUSIVE),
        (0.37, EvidenceCategory.INCONCLUSIVE),
        (6.0, EvidenceCategory.MODERATE_DIFFERENCE),
        (50.0, EvidenceCategory.STRONG_DIFFERENCE),
        (500.0, EvidenceCategory.EXTREME_DIFFERENCE),
    ],
)
def test_categorize_bf(bf, expected):
    assert categorize_bf(bf) is expected


@given(st.floats(1e-6, 1e6), st.floats(1e-6, 1e6))
def test_categorize_bf_monotone_step(a, b):
    order = list(EvidenceCategory)
    if a <= b:
        assert order.index(categorize_bf(a)) <= order.index(categorize_bf(b))


def test_categorize_bf_rejects_nonpositive():
    with pytest.raises(ValueError):
        categorize_bf(0.0)


def test_table_label_splits_inconclusive():
    assert table_label(0.39) == "inconclusive evid. for equality"
    assert table_label(1.40) == "inconclusive evid. for difference"
    assert table_label(0.17) == "moderate evid. for equality"


# --- Holm ---


def test_holm_adjust_against_stepdown_definition(rng):
    for _ in range(20):
        p = rng.uniform(0, 1, size=rng.integers(2, 15))
        adjusted = holm_adjust(p)
        # step-down definition: sort ascending, multiply by (m - rank),
        # enforce monotonicity, cap at 1
        order = np.argsort(p)
        m = p.size
        expected = np.empty(m)
        running = 0.0
        for rank, idx in enumerate(order):
            running = max(running, min(1.0, (m - rank) * p[idx]))
            expected[idx] = running
        assert np.allclose(adjusted, expected)
        # adjusted values are non-decreasing in the raw-p order
        assert np.all(np.diff(adjusted[order]) >= -1e-15)
        assert np.all(adjusted >= p - 1e-15)


# --- correlations ---


def test_correlation_duplicated_column_is_perfect(rng):
    records = []
    for i in range(30):
        t = float(rng.uniform(1, 5))
        raw = (t, t, float(rng.uniform(1, 20)), float(rng.uniform(-3, 3)),
               float(rng.uniform(1, 7)), float(rng.uniform(1, 7)),
               float(rng.uniform(5, 20)))
        records.append(make_record(iteration=i + 1, raw=raw))
    result = correlation_matrix(records)
    assert result.r[0, 1] == pytest.approx(1.0)
    assert result.significant[0, 1]


def test_correlation_matches_scipy(rng):
    records = synthetic_records(rng)
    result = correlation_matrix(records)
    data = np.array([r.raw for r in records])
    for i in range(7):
        for j in range(i + 1, 7):
            r_ref, _ = stats.pearsonr(data[:, i], data[:, j])
            assert result.r[i, j] == pytest.approx(r_ref, abs=1e-12)
    # Holm adjustment only increases p-values
    raw_p = np.array([
        stats.pearsonr(data[:, i], data[:, j])[1]
        for i in range(7) for j in range(i + 1, 7)
    ])
    iu = np.triu_indices(7, 1)
    assert np.all(result.p_adjusted[iu] >= raw_p - 1e-12)


def test_correlation_degenerate_column():
    records = [make_record(iteration=i) for i in range(1, 6)]
    with pytest.raises(DegenerateColumn):
        correlation_matrix(records)


def test_correlation_pareto_only_filters(rng):
    records = synthetic_records(rng)
    full = correlation_matrix(records)
    filtered = correlation_matrix(records, pareto_only=True)
    assert filtered.n <= full.n
    assert filtered.n == sum(pareto_flags(records))


# --- IQR ---


def test_parameter_iqr_constant_column():
    records = [make_record(iteration=i) for i in range(1, 5)]
    iqr = parameter_iqr(records, "female")
    assert all(v == (0.5, 0.5) for v in iqr.values())


def test_parameter_iqr_interpolated_quantiles():
    records = [
        make_record(iteration=i + 1, params=tuple([float(i)] * 9))
        for i in range(4)
    ]
    iqr = parameter_iqr(records, "female")
    assert iqr["r"] == pytest.approx((0.75, 2.25))


def test_parameter_iqr_empty_group():
    with pytest.raises(EmptyGroup):
        parameter_iqr([make_record()], "nonexistent")


@given(st.lists(st.floats(0, 1, width=32), min_size=1, max_size=30))
def test_parameter_iqr_ordered(values):
    records = [
        make_record(iteration=i + 1, params=tuple([v] * 9))
        for i, v in enumerate(values)
    ]
    for q1, q3 in parameter_iqr(records, "female").values():
        assert q1 <= q3


# --- Pareto filtering ---


def test_pareto_flags_per_participant():
    # p1's second record dominates its first; p2 has a single record
    records = [
        make_record("p1", iteration=1, normalized=(0.1,) * 7),
        make_record("p1", iteration=2, normalized=(0.2,) * 7),
        make_record("p2", iteration=1, normalized=(-0.5,) * 7),
    ]
    assert pareto_flags(records) == [False, True, True]


def test_pareto_counts_by_group():
    records = [
        make_record("p1", "female", 1, normalized=(0.1,) * 7),
        make_record("p1", "female", 2, normalized=(0.2,) * 7),
        make_record("p2", "male", 1, normalized=(0.3,) * 7),
        make_record("p2", "male", 2, normalized=(0.2, 0.4) + (0.3,) * 5),
    ]
    counts = pareto_counts(records)
    assert counts == {"female": 1, "male": 2}


def test_pareto_modes_differ_only_through_clamping():
    # two crossing times above the 60 s cap tie after clamping but stay
    # distinct in raw mode
    records = [
        make_record("p1", iteration=1,
                    raw=(3.0, 3.0, 10.0, 0.0, 4.0, 4.0, 70.0),
                    normalized=(0.0,) * 6 + (-1.0,)),
        make_record("p1", iteration=2,
                    raw=(3.0, 3.0, 10.0, 0.0, 4.0, 4.0, 80.0),
                    normalized=(0.0,) * 6 + (-1.0,)),
    ]
    assert pareto_flags(records, mode="normalized") == [True, False]
    assert pareto_flags(records, mode="raw") == [True, False]
    # reversing the order flips raw mode (iteration 2 now strictly faster)
    records = records[::-1]
    assert pareto_flags(records, mode="raw") == [False, True]
    assert pareto_flags(records, mode="normalized") == [True, False]


def test_parameter_bf_table_runs(rng):
    records = synthetic_records(rng, n_participants=8, n_iterations=12)
    table = parameter_bf_table(records, ("female", "male"), pareto_only=False)
    assert set(table) == {
        "r", "g", "b", "alpha", "blink", "width", "height",
        "vertical_position", "loudness",
    }
    assert all(res.bf10 > 0 for res in table.values())
    with pytest.raises(EmptyGroup):
        parameter_bf_table(records, ("female", "unknown"))


# --- ingestion ---


def test_ingest_empty_file(tmp_path):
    path = tmp_path / "empty.csv"
    path.write_text("")
    with pytest.raises(SchemaError):
        ingest_dataset(path)


def test_ingest_missing_columns(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("participant,group\np1,female\n")
    with pytest.raises(SchemaError):
        ingest_dataset(path)


def test_ingest_reports_violations_without_dropping_silently(tmp_path, rng):
    records = synthetic_records(rng, n_participants=2, n_iterations=3)
    path = tmp_path / "data.csv"
    write_records_csv(path, records)
    lines = path.read_text().splitlines()
    broken = lines[1].split(",")
    broken[4] = "1.7"  # p1 outside [0, 1]
    lines.append(",".join(broken))  # duplicate key with bad value
    corrupt = list(lines)
    corrupt[2] = corrupt[2].replace(corrupt[2].split(",")[0], "p0", 1)
    path.write_text("\n".join(lines) + "\n")
    result = ingest_dataset(path)
    assert len(result.records) == len(records)
    assert len(result.violations) == 1
    assert "outside [0, 1]" in result.violations[0]


def test_ingest_roundtrip(tmp_path, rng):
    records = synthetic_records(rng, n_participants=3, n_iterations=4)
    path = tmp_path / "roundtrip.csv"
    write_records_csv(path, records)
    result = ingest_dataset(path)
    assert result.violations == []
    assert result.records == records


def test_ingest_with_schema_mapping(tmp_path, rng):
    records = synthetic_records(rng, n_participants=2, n_iterations=2)
    path = tmp_path / "mapped.csv"
    write_records_csv(path, records)
    text = path.read_text().replace("participant", "UserID", 1).replace(
        "group", "Gender", 1
    )
    (tmp_path / "mapped.csv").write_text(text)
    mapping_path = tmp_path / "mapping.json"
    mapping_path.write_text(
        '{"delimiter": ",", "columns": {"participant": "UserID", "group": "Gender"}}'
    )
    result = ingest_dataset(path, mapping=mapping_path)
    assert result.records == records


def test_session_records_roundtrip(tmp_path):
    from ehmi_mobo.acquisition import AcquisitionConfig
    from ehmi_mobo.optimizer import SessionConfig, start_session, submit_rating
    from ehmi_mobo.synthetic_user import make_rater, rate

    config = SessionConfig(
        acquisition=AcquisitionConfig(n_sobol=2, n_candidates=16, n_mc_samples=8),
        n_optimization=1,
    )
    rater = make_rater(2)
    session = start_session(config, session_id="srr-1")
    while not session.finished:
        submit_rating(session, rate(rater, session.pending_design,
                                    session.iteration + 1))
    records = session_to_study_records(session, "P1", "synthetic")
    assert [r.iteration for r in records] == [1, 2, 3]
    assert [r.phase for r in records] == ["sampling", "sampling", "optimization"]
    path = tmp_path / "session.csv"
    write_records_csv(path, records)
    assert ingest_dataset(path).records == records


def test_csv_columns_cover_schema():
    assert len(CSV_COLUMNS) == 4 + 9 + 7 + 7
