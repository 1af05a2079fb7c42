import numpy as np
import pytest

from dpsim.dynamics import VesselState, wrap_angle
from dpsim.errors import NotReady, ParameterError
from dpsim.sensing import (
    Measurement,
    MoCap,
    MoCapModel,
    Observer,
    measure,
    observe,
    read_measurements,
    write_measurements,
)

TRUTH = VesselState([1.234, -5.678, 0.01, 0.02, -0.03, 2.5], [0.1, 0.2, 0, 0, 0, 0.3])


def test_noiseless_is_exact():
    m = measure(TRUTH, MoCapModel(0.0, 0.0, dropout=0.0), 0.5)
    assert m.valid
    assert m.pose.tobytes() == np.array([1.234, -5.678, 2.5]).tobytes()


def test_only_sample_instants():
    model = MoCapModel(rate=50.0)
    assert measure(TRUTH, model, 0.01) is None
    assert measure(TRUTH, model, 0.02) is not None
    sensor = MoCap(model)
    got = [sensor.measure(TRUTH.eta, k * 0.01) for k in range(100)]
    assert sum(g is not None for g in got) == 50
    assert sensor.measure(TRUTH.eta, 0.98) is None  # already emitted


def test_three_sigma_bound():
    sensor = MoCap(MoCapModel(sigma_p=0.0033, seed=5))
    errs = np.array([sensor.measure(np.zeros(6), k / 100.0).pose for k in range(100_000)])
    assert np.mean(np.abs(errs[:, 0]) < 0.01) >= 0.997
    assert np.mean(np.abs(errs[:, 1]) < 0.01) >= 0.997
    assert np.std(errs[:, 2]) == pytest.approx(np.deg2rad(0.17), rel=0.02)
    c = np.corrcoef(errs.T)
    assert np.all(np.abs(c[np.triu_indices(3, 1)]) < 0.05)


def test_reproducible_per_seed():
    a = MoCap(MoCapModel(seed=9))
    b = MoCap(MoCapModel(seed=9))
    for k in range(100):
        ma, mb = a.measure(TRUTH.eta, k / 100), b.measure(TRUTH.eta, k / 100)
        assert ma.pose.tobytes() == mb.pose.tobytes()


def test_dropout_limit():
    sensor = MoCap(MoCapModel(dropout=1 - 1e-3, seed=1))
    got = [sensor.measure(TRUTH.eta, k / 100) for k in range(10_000)]
    assert sum(m.valid for m in got) < 50


@pytest.mark.parametrize("kw", [dict(sigma_p=-1), dict(rate=0), dict(dropout=1.0)])
def test_model_validation(kw):
    with pytest.raises(ParameterError):
        MoCapModel(**kw)


def test_observer_not_ready():
    obs = Observer()
    with pytest.raises(NotReady):
        obs.estimate()
    obs.update(Measurement(0.0, None))
    with pytest.raises(NotReady):
        observe([Measurement(0.0, None)])


def test_constant_pose_velocity_zero():
    stream = [Measurement(k / 100, np.array([1.0, 2.0, 3.0])) for k in range(500)]
    pose, vel = observe(stream)
    np.testing.assert_array_equal(pose, [1.0, 2.0, 3.0])
    np.testing.assert_array_equal(vel, 0.0)


def test_ramp_velocity_after_five_time_constants():
    tau = 0.2
    n = int(5 * tau * 100) + 1
    stream = [Measurement(k / 100, np.array([0.1 * k / 100, 0.0, 0.0])) for k in range(n + 1)]
    _, vel = observe(stream, tau)
    assert vel[0] == pytest.approx(0.1, rel=0.02)


def test_heading_crossing_no_spike():
    rate = 0.5
    obs = Observer(0.2)
    peak = 0.0
    for k in range(600):
        t = k / 100
        obs.update(Measurement(t, np.array([0, 0, wrap_angle(3.0 + rate * t)])))
        if obs.ready:
            peak = max(peak, abs(obs.estimate()[1][2]))
    assert peak <= rate * (1 + 1e-9)


def test_observer_holds_through_dropouts(rng):
    sensor = MoCap(MoCapModel(dropout=0.7, seed=3))
    obs = Observer()
    for k in range(3000):
        eta = np.array([np.sin(k / 300), 0.1 * k / 100, 0, 0, 0, wrap_angle(k / 50)])
        obs.update(sensor.measure(eta, k / 100))
        if obs.ready:
            p, v = obs.estimate()
            assert np.all(np.isfinite(p)) and np.all(np.isfinite(v))


def test_measurement_csv_roundtrip(tmp_path):
    sensor = MoCap(MoCapModel(dropout=0.3, seed=2))
    stream = [sensor.measure(TRUTH.eta, k / 100) for k in range(200)]
    path = tmp_path / "mocap.csv"
    write_measurements(path, stream)
    back = read_measurements(path)
    assert path.read_text().splitlines()[0] == "t,x_m,y_m,psi_m,valid"
    assert len(back) == len(stream)
    for a, b in zip(stream, back):
        assert a.t == b.t and a.valid == b.valid
        if a.valid:
            assert a.pose.tobytes() == b.pose.tobytes()
