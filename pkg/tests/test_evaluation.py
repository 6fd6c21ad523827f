import io
import warnings
from datetime import timedelta

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from storebaseline.evaluation import (
    CURVE_HEADER,
    TIMELINE_HEADER,
    InfeasibleWindowError,
    SkippedSizeWarning,
    best_point,
    error_timeline,
    learning_curve,
    long_term_run,
    mae,
    plan_windows,
    write_curve_csv,
    write_timeline_csv,
)
from storebaseline.models import ANNParams, ModelSpec, RFParams

from conftest import daily_dataset


def test_mae_hand_cases():
    assert mae([1, 2, 3], [1, 2, 3]) == 0.0
    assert mae([2, 4], [1, 2]) == 1.5


@pytest.mark.parametrize("p,o", [([1, 2], [1]), ([], []), ([1.0, np.nan], [1.0, 2.0])])
def test_mae_rejects_bad_input(p, o):
    with pytest.raises(ValueError):
        mae(p, o)


@settings(max_examples=50, deadline=None)
@given(st.lists(st.tuples(st.floats(-1e6, 1e6), st.floats(-1e6, 1e6)), min_size=1, max_size=40), st.randoms())
def test_mae_symmetric_and_permutation_invariant(pairs, rnd):
    p = [a for a, _ in pairs]
    o = [b for _, b in pairs]
    direct = sum(abs(a - b) for a, b in pairs) / len(pairs)
    assert mae(p, o) == pytest.approx(direct, rel=1e-12, abs=1e-9)
    assert mae(p, o) == mae(o, p)
    shuffled = pairs[:]
    rnd.shuffle(shuffled)
    assert mae([a for a, _ in shuffled], [b for _, b in shuffled]) == pytest.approx(mae(p, o), rel=1e-12, abs=1e-9)


@pytest.fixture(scope="module")
def days510():
    return daily_dataset(510)


def test_plan_510_days(days510):
    assert days510.span_days == 510
    plan = plan_windows(days510, 180, 50, 6, 50)
    assert len(plan.windows) == 6
    assert plan.windows[-1].test_end <= days510.last_date
    assert plan.windows[-1].test_end == days510.first_date + timedelta(days=479)
    for w in plan.windows:
        assert w.test_start == w.train_end + timedelta(days=1)
        assert (w.train_end - w.train_start).days == 179
    steps = {(b - a).days for a, b in zip(plan.anchors, plan.anchors[1:])}
    assert steps == {50}


def test_plan_single_window(days510):
    (w,) = plan_windows(days510, 10, 50, 1).windows
    first = days510.first_date
    assert (w.train_start, w.test_end) == (first, first + timedelta(days=59))


def test_plan_infeasible(days510):
    with pytest.raises(InfeasibleWindowError, match="700") as exc:
        plan_windows(days510, 400, 50, 6, 50)
    assert exc.value.required_span == 700 and exc.value.available_span == 510


def test_plan_explicit_anchor_too_early(days510):
    with pytest.raises(InfeasibleWindowError):
        plan_windows(days510, 30, first_anchor=days510.first_date + timedelta(days=10))


def test_learning_curve_grid_and_statistics(days510):
    curves = learning_curve(days510, [ModelSpec("MLR")])
    points = curves["mlr"]
    assert [p.train_size_days for p in points] == list(range(10, 181, 10))
    for p in points:
        assert p.n_iterations == 6 == len(p.windows)
        errs = np.array([w.mae for w in p.windows])
        assert p.mae_mean == pytest.approx(errs.mean(), abs=1e-15)
        assert p.mae_std == pytest.approx(errs.std(), abs=1e-15)
        assert p.mae_mean >= 0
        for w in p.windows:
            assert w.last_train_date < w.first_test_date
            assert w.window.train_end < w.window.test_start
            assert (w.window.train_end - w.window.train_start).days == p.train_size_days - 1
    # every size is tested on the same windows
    tests = {tuple(w.window.test_start for w in p.windows) for p in points}
    assert len(tests) == 1


def test_three_stores_give_eighteen_iterations():
    stores = [daily_dataset(n, seed=s, store_id=f"s{s}") for s, n in enumerate((510, 490, 531))]
    curves = learning_curve(stores, [ModelSpec("MLR")], train_sizes=[30, 180])
    assert [p.n_iterations for p in curves["mlr"]] == [18, 18]


def test_store_too_short_for_size_contributes_fewer_iterations():
    # 180 + 50 + 5 * 50 = 480 days are needed; a 476-day store drops out at 180
    stores = [daily_dataset(n, seed=s, store_id=f"s{s}") for s, n in enumerate((510, 476, 531))]
    with pytest.warns(SkippedSizeWarning, match="s1: skipping 180-day size"):
        curves = learning_curve(stores, [ModelSpec("MLR")], train_sizes=[30, 180])
    assert [p.n_iterations for p in curves["mlr"]] == [18, 12]


def test_short_store_skips_sizes():
    data = daily_dataset(366)
    with pytest.warns(SkippedSizeWarning):
        curves = learning_curve(data, [ModelSpec("MLR")])
    sizes = [p.train_size_days for p in curves["mlr"]]
    # 366 >= size + 50 + 250 holds up to size 60
    assert sizes == [10, 20, 30, 40, 50, 60]


def test_duplicate_labels_rejected(days510):
    with pytest.raises(ValueError):
        learning_curve(days510, [ModelSpec("MLR"), ModelSpec("mlr")])


def test_learning_curve_worker_independent(days510):
    specs = [
        ModelSpec("MLR"),
        ModelSpec("RF", rf=RFParams(n_trees=5), seed=3),
        ModelSpec("ANN", ann=ANNParams(epochs=50), seed=3),
    ]
    serial = learning_curve(days510, specs, train_sizes=[20, 60])
    parallel = learning_curve(days510, specs, train_sizes=[20, 60], workers=3)
    assert serial == parallel


def test_timeline_block_counts():
    data = daily_dataset(80)
    tl = error_timeline(data, ModelSpec("MLR"), data.first_date, 30)
    assert [p.n_predictions for p in tl] == [10] * 5
    assert [p.block_index for p in tl] == list(range(5))
    assert tl[0].block_start_date == data.first_date + timedelta(days=30)

    data = daily_dataset(83)
    tl = error_timeline(data, ModelSpec("MLR"), data.first_date, 30)
    assert len(tl) == 6 and tl[-1].n_predictions == 3


def test_timeline_empty_range():
    data = daily_dataset(40)
    with pytest.raises(ValueError):
        error_timeline(data, ModelSpec("MLR"), data.first_date, 40)


def test_long_term_block_counts(days510):
    assert len(long_term_run(days510, [ModelSpec("MLR")], 180)["mlr"]) == 33
    data = daily_dataset(366)
    (tl,) = long_term_run(data, [ModelSpec("MLR")], 360).values()
    assert len(tl) == 1 and tl[0].n_predictions == 6
    with pytest.raises(ValueError):
        long_term_run(data, [ModelSpec("MLR")], 366)


def test_timeline_skips_missing_days():
    full = daily_dataset(90)
    holes = full.between(full.first_date, full.first_date + timedelta(days=49))
    rest = [r for r in full.rows if r.date > full.first_date + timedelta(days=52)]
    data = type(full)(full.store_id, holes.rows + tuple(rest))
    tl = error_timeline(data, ModelSpec("MLR"), data.first_date, 30)
    assert sum(p.n_predictions for p in tl) == len(data.rows) - 30


def test_csv_writers(days510):
    curves = learning_curve(days510, [ModelSpec("MLR")], train_sizes=[30])
    buf = io.StringIO()
    write_curve_csv(curves, buf)
    lines = buf.getvalue().splitlines()
    assert lines[0] == ",".join(CURVE_HEADER)
    assert lines[1].startswith("mlr,30,") and lines[1].endswith(",6")

    buf = io.StringIO()
    write_timeline_csv({"mlr": error_timeline(days510, ModelSpec("MLR"), days510.first_date, 490)}, buf)
    lines = buf.getvalue().splitlines()
    assert lines[0] == ",".join(TIMELINE_HEADER)
    assert len(lines) == 3

    label, point = best_point(curves)
    assert label == "mlr" and point.train_size_days == 30


def test_no_warning_for_feasible_grid(days510):
    with warnings.catch_warnings():
        warnings.simplefilter("error", SkippedSizeWarning)
        learning_curve(days510, [ModelSpec("MLR")], train_sizes=[10, 180])
