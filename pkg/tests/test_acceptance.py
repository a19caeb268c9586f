"""Acceptance criteria, one test each; every test records a PASS/FAIL line."""
import subprocess
import sys
import time
from dataclasses import replace

import numpy as np
import pytest

from oracles import central_gradient, doppler_direct, random_geometry, range_direct
from passivesar.comms import CommParams, segment_capacity
from passivesar.echosim import verify_resolution
from passivesar.energy import PlatformParams, drag_power, path_energy
from passivesar.flightpath import FlightPath
from passivesar.mission import evaluate_mission
from passivesar.sargeom import (DegenerateGeometryError, RadarParams, SceneSpec, azimuth_samples,
                                doppler_gradient_ground, range_gradient_ground, range_samples,
                                resolution_cell, scene_resolution_evaluator)

PLATFORM = PlatformParams(mass=10.0, drag_c1=9.26e-4, drag_c2=2250.0, v_a=30.0, v_min=15.0,
                          v_max=45.0, a_max=5.0)


def _random_path(rng):
    n = int(rng.integers(2, 60))
    steps = rng.uniform(20, 800, n - 1)
    heading = np.cumsum(rng.uniform(-0.8, 0.8, n - 1))
    climb = rng.uniform(-0.3, 0.3, n - 1)
    d = np.column_stack([np.cos(heading), np.sin(heading), climb])
    d /= np.linalg.norm(d, axis=1, keepdims=True)
    pts = np.vstack([[0, 0, 1000.0], [0, 0, 1000.0] + np.cumsum(steps[:, None] * d, axis=0)])
    return FlightPath(pts, rng.uniform(16, 44, n))


def test_criterion_1_energy_telescoping(acceptance, rng):
    t0 = time.perf_counter()
    worst = 0.0
    for _ in range(100):
        fp = _random_path(rng)
        e = path_energy(fp, PLATFORM)
        pot = PLATFORM.mass * PLATFORM.gravity * (fp.points[-1, 2] - fp.points[0, 2])
        kin = 0.5 * PLATFORM.mass * (fp.speeds[-1] ** 2 - fp.speeds[0] ** 2)
        for got, want in ((e.potential, pot), (e.kinetic, kin)):
            worst = max(worst, abs(got - want) / max(abs(want), 1e-300) if want else abs(got))
    loops_ok = True
    for _ in range(20):
        n = int(rng.integers(4, 80))
        th = np.linspace(0, 2 * np.pi, n + 1)
        r = rng.uniform(200, 3000)
        pts = np.column_stack([r * np.cos(th), r * np.sin(th),
                               1000 + rng.uniform(-0.2, 0.2) * r * np.sin(2 * th)])
        pts[-1] = pts[0]
        e = path_energy(FlightPath(pts, rng.uniform(16, 44)), PLATFORM)
        loops_ok &= e.total == e.drag
    elapsed = time.perf_counter() - t0
    ok = worst < 1e-12 and loops_ok and elapsed < 1.0
    assert acceptance("1 energy telescoping", ok,
                      f"max rel err {worst:.2e} (<1e-12), closed loops total==drag {loops_ok}, "
                      f"{elapsed:.2f} s (<1 s)")


def test_criterion_2_level_flight_reduction(acceptance, rng):
    speeds = rng.uniform(PLATFORM.v_min, 200.0, 1000)
    worst = 0.0
    dirs = rng.normal(size=(1000, 3))
    for s, d in zip(speeds, dirs):
        vel = s * d / np.linalg.norm(d)
        v = float(np.linalg.norm(vel))
        p = replace(PLATFORM, v_a=v, v_min=1.0, v_max=250.0)
        want = p.drag_c1 * v**3 + p.drag_c2 / v
        got = drag_power(vel, [0, 0, 0], p)
        worst = max(worst, abs(got - want) / want)
    eps = np.finfo(float).eps
    ok = worst <= 4 * eps
    assert acceptance("2 drag reduction", ok,
                      f"max rel err {worst:.2e} over 1000 speeds (<= 4 eps = {4 * eps:.1e})")


def test_criterion_3_gradient_oracle(acceptance, rng):
    radar = RadarParams(0.24, 1e8, 200.0, 2e8, 2.0)
    t0 = time.perf_counter()
    worst_r = worst_f = 0.0
    done = 0
    while done < 1000:
        txs, rxs, x = random_geometry(rng)
        try:
            resolution_cell(txs, rxs, x, radar)
        except DegenerateGeometryError:
            continue
        g_r = range_gradient_ground(txs[0], rxs[0], x)
        fd_r = central_gradient(lambda p: range_direct(txs[0], rxs[0], p), x, step=0.1)
        g_f = doppler_gradient_ground(txs, rxs, x, radar.wavelength)
        fd_f = central_gradient(lambda p: doppler_direct(txs, rxs, p, radar.wavelength), x,
                                step=0.1)
        worst_r = max(worst_r, np.linalg.norm(g_r - fd_r) / np.linalg.norm(g_r))
        worst_f = max(worst_f, np.linalg.norm(g_f - fd_f) / np.linalg.norm(g_f))
        done += 1
    elapsed = time.perf_counter() - t0
    ok = worst_r < 1e-4 and worst_f < 1e-4 and elapsed < 5.0
    assert acceptance("3 gradient oracle", ok,
                      f"1000 geometries, max rel err range {worst_r:.1e} doppler {worst_f:.1e} "
                      f"(<1e-4), {elapsed:.2f} s (<5 s)")


@pytest.fixture(scope="module")
def desk_rows(desk):
    fp = desk.paths["pass1"]
    out = {}
    for t_a in (1.0, 2.0):
        radar = replace(desk.radar, aperture_time=t_a)
        window = replace(desk, radar=radar).window_for(fp)
        t0 = time.perf_counter()
        rows = verify_resolution(desk.scene, desk.illuminator, fp, window, radar)
        out[t_a] = (rows, time.perf_counter() - t0)
    return out


def test_criterion_4_imaging_cross_validation(acceptance, desk, desk_rows):
    assert desk.radar.aperture_time <= 2.0
    rows, elapsed = desk_rows[desk.radar.aperture_time]
    by = {r.label: r for r in rows}
    within = all(0.75 <= r.ratio <= 1.25 for r in rows)
    ordered = by["Min."].measured < by["Max."].measured
    ok = within and ordered and elapsed < 60.0
    ratios = ", ".join(f"{r.label} {r.ratio:.3f}" for r in rows)
    assert acceptance("4 imaging cross-validation", ok,
                      f"measured/predicted {ratios} (need 0.75..1.25); "
                      f"min<max ordering {ordered}; {elapsed:.1f} s (<60 s)")


def test_criterion_5_aperture_scaling(acceptance, desk_rows):
    ref = {t_a: next(r for r in rows if r.label == "Ref.") for t_a, (rows, _) in desk_rows.items()}
    ratio = ref[2.0].measurement.rho_a_meas / ref[1.0].measurement.rho_a_meas
    ok = abs(ratio / 0.5 - 1.0) <= 0.10
    assert acceptance("5 resolution scaling", ok,
                      f"rho_a(2 s)/rho_a(1 s) = {ratio:.4f} (0.5 within 10%)")


def test_criterion_6_s4_orderings(acceptance, s4):
    t0 = time.perf_counter()
    rep = evaluate_mission(s4)
    elapsed = time.perf_counter() - t0
    r = {row.name: row for row in rep.rows}
    checks = {
        "a shortest=straight": min(r, key=lambda n: r[n].length) == "path4",
        "b vertical arc energy > straight": r["path3"].energy.total > r["path4"].energy.total,
        "c detours D_com > straight": all(r[n].D_com > r["path4"].D_com for n in ("path1", "path2")),
        "d detour threat < straight": r["path1"].threat < r["path4"].threat,
        "e all feasible": all(row.feasible for row in rep.rows),
    }
    ok = rep.ok and all(checks.values()) and elapsed < 30.0
    detail = "; ".join(f"{k} {v}" for k, v in checks.items())
    assert acceptance("6 s4 orderings", ok, f"{detail}; {elapsed:.2f} s (<30 s)")


def test_criterion_7_unit_checks(acceptance, s4):
    n_a = azimuth_samples(1000.0, 50.0, 2.0, 200.0)
    n_r = range_samples(3000.0, 2e8)
    d_echo = 128 * n_a * n_r
    unit_snr = segment_capacity(1.0, 1.0, CommParams(1e6, 1.0, 1.0, 1.0, [0, 0, 0]))
    fp = s4.paths["path1"]
    s_bar, samples, _ = scene_resolution_evaluator(
        s4.illuminator, fp, s4.window_for(fp), SceneSpec(s4.scene.center, 1000, 1000, 1),
        s4.radar)
    ok = (n_a == 4400 and n_r == 2002 and d_echo == 1_127_526_400 and unit_snr == 1e6
          and s_bar == samples[0].S_c)
    assert acceptance("7 unit checks", ok,
                      f"N_a={n_a} N_r={n_r} D_echo={d_echo} unit-SNR={unit_snr:.0f} b/s "
                      f"S_bar==S_c {s_bar == samples[0].S_c}")


def test_criterion_8_determinism(acceptance, tmp_path):
    outputs = []
    for k in range(2):
        out = tmp_path / f"run{k}.csv"
        proc = subprocess.run([sys.executable, "-m", "passivesar", "evaluate", "scenario_s4",
                               "--jobs", "8", "--csv", str(out)], capture_output=True, text=True)
        assert proc.returncode == 0, proc.stderr
        outputs.append(out.read_bytes())
    ok = outputs[0] == outputs[1]
    assert acceptance("8 determinism", ok,
                      f"two --jobs 8 runs byte-identical: {ok} ({len(outputs[0])} bytes)")
