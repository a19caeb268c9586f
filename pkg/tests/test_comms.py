import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from passivesar.comms import (CommParams, check_los_assumption, path_capacity, segment_capacity,
                              shannon_rate)
from passivesar.flightpath import FlightPath, make_arc_path, make_line_path, segment_kinematics
from passivesar.geom import HillSpec, synth_terrain

CP = CommParams(bandwidth=1e6, tx_power=0.5, ref_gain=1e-4, noise_power=1e-13,
                station=[18000.0, 10000.0, 720.0])


def test_unit_snr_rate_equals_bandwidth():
    cp = CommParams(1e6, 1.0, 1.0, 1.0, [0, 0, 0])
    assert segment_capacity(1.0, 1.0, cp) == 1e6


def test_capacity_vanishes_with_distance():
    caps = [segment_capacity(1.0, l, CP) for l in np.logspace(2, 12, 30)]
    assert all(a > b for a, b in zip(caps, caps[1:]))
    assert caps[-1] < 1e-3 * CP.bandwidth


def test_doubling_distance_at_high_snr():
    l = 10.0
    s = CP.ref_snr / l**2  # 5e6
    drop = shannon_rate(l, CP) - shannon_rate(2 * l, CP)
    assert drop == pytest.approx(CP.bandwidth * (math.log2(1 + s) - math.log2(1 + s / 4)))
    assert drop == pytest.approx(2 * CP.bandwidth, rel=1e-5)


def test_invalid_inputs():
    with pytest.raises(ValueError):
        segment_capacity(1.0, 0.0, CP)
    with pytest.raises(ValueError):
        segment_capacity(0.0, 10.0, CP)
    with pytest.raises(ValueError):
        CommParams(0.0, 1.0, 1.0, 1.0, [0, 0, 0])


def test_single_segment_window():
    fp = make_line_path([0, 0, 1500], [6000, 0, 1500], 7, 30.0)
    cp = CommParams(1e6, 0.5, 1e-4, 1e-13, [18000.0, 10000.0, 720.0], window=(2, 3))
    rep = path_capacity(fp, cp)
    mid = 0.5 * (fp.points[2] + fp.points[3])
    expected = segment_capacity(1000.0 / 30.0, float(np.linalg.norm(mid - cp.station)), cp)
    assert rep.D_com == pytest.approx(expected, rel=1e-15)
    assert len(rep.rate) == 1


def test_window_outside_path():
    fp = make_line_path([0, 0, 1500], [6000, 0, 1500], 7, 30.0)
    cp = CommParams(1e6, 0.5, 1e-4, 1e-13, [0, 0, 0], window=(2, 9))
    with pytest.raises(ValueError):
        path_capacity(fp, cp)


def test_translating_away_reduces_capacity():
    fp = make_line_path([1000, 1000, 1500], [6000, 3000, 1500], 21, 30.0)
    prev = path_capacity(fp, CP).D_com
    for k in range(1, 6):
        cur = path_capacity(fp.translated([-1000.0 * k, 0, 0]), CP).D_com
        assert cur < prev
        prev = cur


def test_arcs_toward_station_beat_straight(s4):
    line = path_capacity(s4.paths["path4"], s4.comms).D_com
    for name in ("path1", "path2"):
        assert path_capacity(s4.paths[name], s4.comms).D_com > line


def test_duration_times_rate():
    fp = make_arc_path([0, 0, 1000], [5000, 0, 1000], 800.0, "horizontal", 31, 30.0)
    rep = path_capacity(fp, CP)
    kin = segment_kinematics(fp)
    assert np.allclose(rep.duration, kin.duration)
    assert rep.D_com == pytest.approx(math.fsum(rep.duration * rep.rate), rel=1e-15)


def test_report_feasibility():
    fp = make_line_path([0, 0, 1500], [6000, 0, 1500], 7, 30.0)
    rep = path_capacity(fp, CP)
    assert rep.feasible is None
    assert rep.with_echo(rep.D_com).feasible
    low = rep.with_echo(rep.D_com * 2)
    assert not low.feasible and low.margin == pytest.approx(-rep.D_com)


def test_los_flat_terrain():
    flat = synth_terrain(0.0, [], ((0.0, 20000.0), (0.0, 20000.0)), 100.0)
    fp = make_line_path([1000, 1000, 500], [15000, 15000, 500], 21, 30.0)
    cp = CommParams(1e6, 0.5, 1e-4, 1e-13, [18000.0, 10000.0, 50.0])
    assert check_los_assumption(fp, cp, flat) == 1.0


def _cone_los_fraction(path, station):
    # ray-march at 1 m against the analytic cone
    visible = 0
    for i in range(len(path) - 1):
        mid = 0.5 * (path.points[i] + path.points[i + 1])
        n = int(np.linalg.norm(station - mid))
        ray = mid + (np.arange(1, n) / n)[:, None] * (station - mid)
        d = np.hypot(ray[:, 0] - 7000, ray[:, 1] - 7000)
        visible += np.all(ray[:, 2] > 500 + 900 * np.maximum(0, 1 - d / 2000))
    return visible / (len(path) - 1)


def test_los_blocked_behind_hill():
    hill = synth_terrain(500.0, [HillSpec((7000.0, 7000.0), 900.0, 2000.0)],
                         ((0.0, 20000.0), (0.0, 20000.0)), 50.0)
    station = np.array([10000.0, 10000.0, 520.0])
    fp = make_line_path([2000, 6000, 700], [6000, 2000, 700], 21, 30.0)
    cp = CommParams(1e6, 0.5, 1e-4, 1e-13, station)
    frac = check_los_assumption(fp, cp, hill)
    assert frac < 1.0
    assert frac == _cone_los_fraction(fp, station)


def test_los_empty_window_warns():
    flat = synth_terrain(0.0, [], ((0.0, 20000.0), (0.0, 20000.0)), 100.0)
    fp = make_line_path([1000, 1000, 500], [15000, 15000, 500], 21, 30.0)
    cp = CommParams(1e6, 0.5, 1e-4, 1e-13, [18000.0, 10000.0, 50.0], window=(4, 4))
    with pytest.warns(UserWarning, match="empty"):
        assert check_los_assumption(fp, cp, flat) == 1.0


def test_segment_splitting_converges(s4):
    for name, fp in s4.paths.items():
        coarse = path_capacity(fp, s4.comms).D_com
        mids = 0.5 * (fp.points[1:] + fp.points[:-1])
        pts = np.empty((2 * len(fp) - 1, 3))
        pts[0::2], pts[1::2] = fp.points, mids
        fine = path_capacity(FlightPath(pts, fp.speeds[0]), s4.comms).D_com
        assert abs(fine - coarse) / coarse < 5e-3


# ---------------------------------------------------------------- properties

@settings(max_examples=60)
@given(k=st.floats(1.01, 100.0), field=st.sampled_from(["bandwidth", "tx_power", "noise_power"]))
def test_capacity_monotone_in_link_parameters(k, field):
    fp = make_line_path([1000, 1000, 1500], [6000, 3000, 1500], 11, 30.0)
    base = path_capacity(fp, CP).D_com
    scaled = CommParams(**{**CP.__dict__, field: getattr(CP, field) * k})
    new = path_capacity(fp, scaled).D_com
    if field == "noise_power":
        assert new < base
    else:
        assert new > base


@given(l=st.floats(1e-3, 1e12), t=st.floats(1e-3, 1e4))
def test_capacity_nonnegative_finite(l, t):
    c = segment_capacity(t, l, CP)
    assert c >= 0 and math.isfinite(c)
