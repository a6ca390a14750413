import numpy as np  # type: ignore
import pytest

from kdpc.controllers import ControllerConfig
from kdpc.experiments import COLUMNS, ControllerSeries, ExperimentResult, PiecewiseConstant, Scenario, \
    compute_metrics, default_scenarios, plot_result, read_series, run_scenario, segments, series_metrics, \
    write_metrics, write_results
from kdpc.plants import Channel, DisturbancePulse, DisturbanceSchedule, VdpParams
from kdpc.utils.checks import ContractViolationError
from kdpc.utils.io import read_yaml

TS = 0.05


def _series(scenario: Scenario, y: np.ndarray, status=None) -> ControllerSeries:
    steps = y.size
    t = [k * TS for k in range(steps)]
    return ControllerSeries(controller="kdpc", t=t, y=list(y), y_ref=list(scenario.reference.sample(t)),
                            u=[0.0] * steps, delta_u=[0.0] * steps, d=[0.0] * steps, cost=[0.0] * steps,
                            status=status if status is not None else ["optimal"] * steps)


def test_reference_preview():
    reference = PiecewiseConstant.step(5.0, 0.0, 1.0)
    np.testing.assert_array_equal(reference.preview(98, 3, TS), [0.0, 1.0, 1.0])
    np.testing.assert_array_equal(reference.preview(99, 3, TS), [1.0, 1.0, 1.0])
    assert reference.value_at(4.999) == 0.0
    assert reference.value_at(100.0) == 1.0


def test_schedule_validation():
    with pytest.raises(ContractViolationError):
        PiecewiseConstant(breakpoints=(1.0,), values=(0.0,))
    with pytest.raises(ContractViolationError):
        PiecewiseConstant(breakpoints=(2.0, 1.0), values=(0.0, 1.0, 2.0))
    with pytest.raises(ContractViolationError):
        Scenario(name="bad", controllers=("pid",))
    with pytest.raises(ContractViolationError):
        Scenario(name="late", duration=3.0)


def test_default_scenarios():
    input_case, output_case = default_scenarios()
    assert (input_case.name, output_case.name) == ("input_disturbance", "output_disturbance")
    assert input_case.disturbance.value_at(15.0, Channel.INPUT) == 0.2
    assert output_case.disturbance.value_at(15.0, Channel.OUTPUT) == 0.2
    assert input_case.steps(TS) == 600
    assert input_case.breakpoints() == (5.0, 10.0, 20.0)
    assert segments(input_case, TS, 600) == [(0, 100), (100, 200), (200, 400), (400, 600)]


def test_perfect_tracking_metrics():
    scenario = Scenario(name="step")
    series = _series(scenario, scenario.reference.sample([k * TS for k in range(600)]))
    metrics = series_metrics(series, scenario, TS)
    assert metrics.rms_error == 0.0
    assert metrics.steady_state_error == 0.0
    assert metrics.max_overshoot == 0.0
    assert metrics.settle_time == 0.0
    assert metrics.feasible_fraction == 1.0


def test_constant_offset_metrics():
    scenario = Scenario(name="step")
    series = _series(scenario, scenario.reference.sample([k * TS for k in range(600)]) + 0.2)
    metrics = series_metrics(series, scenario, TS)
    assert metrics.steady_state_error == pytest.approx(0.2)
    assert metrics.rms_error == pytest.approx(0.2)
    assert metrics.max_overshoot == pytest.approx(0.2)
    assert metrics.segment_errors == pytest.approx((0.2, 0.2))


def test_exponential_settle_time():
    scenario = Scenario(name="step")
    k = np.arange(600)
    y = np.where(k >= 100, 1.0 - np.exp(-(k - 100) * TS), 0.0)
    metrics = series_metrics(_series(scenario, y), scenario, TS)
    # |e| = exp(-t) leaves the 2% band once t > ln 50 = 3.91
    assert metrics.settle_time == pytest.approx(3.95)
    assert metrics.max_overshoot == 0.0
    assert metrics.steady_state_error < 1e-6


def test_feasible_fraction_skips_warmup():
    scenario = Scenario(name="step")
    status = ["warmup"] * 2 + ["optimal"] * 594 + ["max_iter"] * 4
    metrics = series_metrics(_series(scenario, np.zeros(600), status), scenario, TS)
    assert metrics.feasible_fraction == pytest.approx(594 / 598)


def test_empty_result_has_no_metrics():
    with pytest.raises(ContractViolationError):
        compute_metrics(ExperimentResult(scenario=Scenario(name="empty"), ts=TS))


def test_result_files(tmp_path):
    scenario = Scenario(name="step")
    series = _series(scenario, np.linspace(0.0, 1.0, 600) / 3.0)
    result = ExperimentResult(scenario=scenario, ts=TS, series={"kdpc": series})
    (path,) = write_results(result, tmp_path)
    assert path.name == "kdpc.csv"
    assert path.read_text().splitlines()[0] == ",".join(COLUMNS)
    loaded = read_series(path)
    assert loaded.y == series.y
    assert loaded.status == series.status

    write_metrics(compute_metrics(result), result, tmp_path / "metrics.yaml")
    metrics = read_yaml(tmp_path / "metrics.yaml")
    assert metrics["scenario"] == "step"
    assert metrics["steady_state_window"] == 0.2
    assert set(metrics["controllers"]["kdpc"]) >= {"rms_error", "steady_state_error", "settle_time"}

    svg = plot_result(result, tmp_path / "plot.svg")
    assert svg.read_text().lstrip().startswith("<?xml")


def test_short_closed_loop_run():
    scenario = Scenario(name="short", duration=2.0, reference=PiecewiseConstant.step(0.5, 0.0, 0.5),
                        disturbance=DisturbanceSchedule((DisturbancePulse(1.0, 1.5, 0.1, Channel.INPUT),)),
                        controllers=("nmpc",))
    result = run_scenario(scenario, None, ControllerConfig(), VdpParams())
    series = result.series["nmpc"]
    assert len(series) == 40
    assert not result.diverged
    assert set(series.status) == {"optimal"}
    assert series.d[20:30] == [0.1] * 10
    assert series.y[0] == 0.0


def test_kdpc_needs_predictors():
    with pytest.raises(ContractViolationError):
        run_scenario(Scenario(name="s", duration=1.0, reference=PiecewiseConstant()), None, ControllerConfig())


def test_scenario_without_controllers():
    with pytest.raises(ContractViolationError):
        run_scenario(Scenario(name="none", controllers=()), None, ControllerConfig())


def test_nmpc_tracks_a_step_without_disturbance():
    scenario = Scenario(name="nominal", duration=10.0, reference=PiecewiseConstant.step(1.0, 0.0, 1.0),
                        controllers=("nmpc",))
    series = run_scenario(scenario, None, ControllerConfig(), VdpParams()).series["nmpc"]
    assert len(series) == 200
    assert series.diverged_at is None
    # the last two seconds
    assert np.max(np.abs(series.error[-40:])) <= 0.02


def test_diverging_run_keeps_its_partial_series():
    scenario = Scenario(name="blowup", duration=2.0, reference=PiecewiseConstant(), x0=(1e100, 1e100),
                        controllers=("nmpc",))
    result = run_scenario(scenario, None, ControllerConfig(), VdpParams())
    series = result.series["nmpc"]
    assert result.diverged
    assert series.diverged_at == 1
    assert len(series) == 2
    assert series.status == ["diverged", "diverged"]
    assert series.y[0] == 1e100
    assert series.u == [0.0, 0.0]
