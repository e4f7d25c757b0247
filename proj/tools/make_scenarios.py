#!/usr/bin/env python3
"""Generate the shipped cut-in scenarios (data/scenarios/hrs.json, lrs.json).

Between initiation and completion the lateral speed of the cut-in vehicle is a floor with a
linear trend plus a sin^p peak. The peak reaches the target maximum and p is solved so that
the window mean matches the target; the start offset puts completion on the target sample.
Longitudinal motion is a piecewise constant-acceleration plan anchored at the phase
boundaries.
"""

import argparse
import json
import math
from pathlib import Path

import numpy as np

DT = 0.1
FRAMES = 200
LANE_WIDTH = 3.5
HALF_LANE = LANE_WIDTH / 2

# Segmentation thresholds, kept equal to the engine defaults.
V_LAT_INIT = 0.2
SUSTAIN_SAMPLES = 3
TTC_SAFE = 4.0


def half_extents(length, width, heading):
    lat = 0.5 * length * np.abs(np.sin(heading)) + 0.5 * width * np.abs(np.cos(heading))
    lon = 0.5 * length * np.abs(np.cos(heading)) + 0.5 * width * np.abs(np.sin(heading))
    return lat, lon


def window_shape(n, v_floor, trend, v_max, p):
    """Lateral speed over the n+1 samples from initiation to completion."""
    u = np.linspace(0.0, 1.0, n + 1)
    bump = np.sin(np.pi * u) ** p
    bump /= bump.max()
    base = v_floor + trend * u
    return base + (v_max - base[np.argmax(bump)]) * bump


def solve_exponent(n, v_floor, trend, v_max, v_avg):
    lo, hi = 0.5, 400.0
    for _ in range(200):
        mid = math.sqrt(lo * hi)
        if window_shape(n, v_floor, trend, v_max, mid).mean() > v_avg:
            lo = mid
        else:
            hi = mid
    return math.sqrt(lo * hi)


def lateral_profile(target, i_init):
    """Speed towards the ego lane (positive) for every frame."""
    n = round(target["duration"] / DT)
    trend = target["a_lat_avg"] * target["duration"]
    p = solve_exponent(n, target["v_floor"], trend, target["v_lat_max"], target["v_lat_avg"])
    window = window_shape(n, target["v_floor"], trend, target["v_lat_max"], p)
    speed = np.zeros(FRAMES)
    speed[i_init - 3:i_init] = [0.03, 0.08, 0.15]
    speed[i_init:i_init + n + 1] = window
    # settle into the lane
    tail = np.arange(1, 16)
    speed[i_init + n + 1:i_init + n + 16] = window[-1] * 0.5 * (1 + np.cos(np.pi * tail / 16))
    return speed, p


def segment(y, v_lat, heading, length, width):
    toward = -v_lat
    n = len(y)
    i_init = next(k for k in range(n - SUSTAIN_SAMPLES) if np.all(toward[k:k + SUSTAIN_SAMPLES + 1] > V_LAT_INIT))
    lat, _ = half_extents(length, width, heading)
    i_exec = next(k for k in range(i_init + 1, n) if y[k] - lat[k] < HALF_LANE)
    i_comp = next(k for k in range(i_exec + 1, n) if y[k] + lat[k] <= HALF_LANE and y[k] - lat[k] >= -HALF_LANE)
    return i_init, i_exec, i_comp


def stats(v_lat, i_init, i_comp):
    w = np.abs(v_lat[i_init:i_comp + 1])
    return (i_comp - i_init) * DT, w.mean(), w.max()


def speed_plan(t, v0, events):
    """Speed from piecewise constant accelerations; events are (t_start, accel) pairs."""
    v = np.full_like(t, v0)
    for k in range(1, len(t)):
        a = 0.0
        for t_start, accel in events:
            if t[k - 1] >= t_start - 1e-9:
                a = accel
        v[k] = v[k - 1] + a * DT
    return v


def integrate(v, x0):
    return x0 + np.concatenate([[0.0], np.cumsum(0.5 * (v[1:] + v[:-1]) * DT)])


def build(name, target):
    length, width = target["length"], target["width"]
    t = np.arange(FRAMES) * DT
    i_init = round(target["start"] / DT)
    i_comp = i_init + round(target["duration"] / DT)
    speed, p = lateral_profile(target, i_init)
    v_lat = -speed
    travel = np.concatenate([[0.0], np.cumsum(0.5 * (speed[1:] + speed[:-1]) * DT)])

    v_cut = np.full_like(t, target["cut_speed"])
    t_ii = t[i_init]
    for _ in range(4):
        heading = np.arctan2(v_lat, v_cut)
        lat, lon_cut = half_extents(length, width, heading)
        # completion lands exactly on i_comp
        y0 = HALF_LANE - 0.005 - lat[i_comp] + travel[i_comp]
        y = y0 - travel
        _, i_exec, _ = segment(y, v_lat, heading, length, width)
        t_ii = t[i_exec]
        v_ego = speed_plan(t, target["ego_speed"], target["ego_events"](t[i_init], t_ii, t[i_comp]))
        v_cut = speed_plan(t, target["cut_speed"], target["cut_events"](t[i_init], t_ii, t[i_comp]))

    heading = np.arctan2(v_lat, v_cut)
    got = segment(y, v_lat, heading, length, width)
    assert got[0] == i_init and got[2] == i_comp, (got, i_init, i_comp)
    i_exec = got[1]
    x_ego = integrate(v_ego, 0.0)
    x_cut_rel = integrate(v_cut, 0.0)
    _, lon_cut = half_extents(length, width, heading)
    ego_half = 2.3
    # place the cut-in so the bumper gap at initiation equals the target
    offset = x_ego[i_init] + ego_half + target["gap"] + lon_cut[i_init] - x_cut_rel[i_init]
    x_cut = x_cut_rel + offset

    def frames(x, yy, hh, vlon, vlat, extra=None):
        out = []
        for k in range(FRAMES):
            f = {"t": round(t[k], 3), "x": round(float(x[k]), 6), "y": round(float(yy[k]), 6),
                 "heading": round(float(hh[k]), 6), "v_lon": round(float(vlon[k]), 6),
                 "v_lat": round(float(vlat[k]), 6)}
            if extra:
                f.update(extra)
            out.append(f)
        return out

    zeros = np.zeros(FRAMES)
    actors = {
        "cutin": frames(x_cut, y, heading, v_cut, v_lat, {"length": length, "width": width}),
    }
    for actor in target["others"]:
        va = np.full(FRAMES, actor["speed"])
        xa = integrate(va, actor["x0"])
        actors[actor["id"]] = frames(xa, np.full(FRAMES, actor["y"]), zeros, va, zeros)

    doc = {
        "schema": "avor-scenario/1",
        "id": name,
        "dt": DT,
        "road": {
            "lane_count": 3,
            "lane_width": LANE_WIDTH,
            "ego_lane_index": 1,
            "static_objects": target["static_objects"],
        },
        "population": "A+R",
        "risk_label": name.upper(),
        "ego": frames(x_ego, zeros, zeros, v_ego, zeros),
        "actors": actors,
        "cutin_actor": "cutin",
    }
    dur, avg, vmax = stats(v_lat, i_init, i_comp)
    print(f"{name}: p={p:.2f} y0={y[0]:.3f} t_I={t[i_init]:.1f} t_II={t[i_exec]:.1f} "
          f"t_III={t[i_comp]:.1f} duration={dur:.2f} v_avg={avg:.4f} v_max={vmax:.4f}")
    return doc


def furniture(x_from, x_to, step):
    objs = []
    for side in (1, -1):
        for k, x in enumerate(np.arange(x_from, x_to, step)):
            y0 = side * 16.0
            if k % 3 == 2:
                y0 = side * 19.0
                poly = [[x, y0 - 4], [x + 12, y0 - 4], [x + 12, y0 + 4], [x, y0 + 4]]
                cls = "building"
            else:
                poly = [[x, y0 - 1], [x + 2, y0 - 1], [x + 2, y0 + 1], [x, y0 + 1]]
                cls = "tree"
            objs.append({"class": cls, "polygon": [[round(p, 3) for p in pt] for pt in poly]})
    objs.append({"class": "barrier", "polygon": [[0, -13.6], [600, -13.6], [600, -13.2], [0, -13.2]]})
    return objs


TARGETS = {
    "hrs": {
        "duration": 4.3, "v_lat_avg": 0.757, "v_lat_max": 1.275, "gap": 8.0,
        "a_lat_avg": 0.015, "v_floor": 0.25,
        "length": 4.6, "width": 1.9, "start": 6.0,
        "ego_speed": 13.0, "cut_speed": 11.0,
        # ego brakes from initiation until it has matched the cut-in's speed
        "ego_events": lambda ti, tii, tiii: [(ti, -0.3), (ti + 6.6, 0.0)],
        "cut_events": lambda ti, tii, tiii: [(tiii + 3.0, 0.6), (tiii + 8.0, 0.0)],
        "others": [
            {"id": "lead", "x0": 70.0, "y": 0.0, "speed": 12.0},
            {"id": "right_1", "x0": 30.0, "y": -3.5, "speed": 12.5},
            {"id": "left_2", "x0": -25.0, "y": 3.5, "speed": 12.0},
        ],
    },
    "lrs": {
        "duration": 4.9, "v_lat_avg": 0.3049, "v_lat_max": 0.7419, "gap": 12.8,
        "a_lat_avg": 0.0086, "v_floor": 0.22,
        "length": 2.2, "width": 0.9, "start": 6.0,
        "ego_speed": 12.5, "cut_speed": 12.0,
        # the cut-in eases off once it crosses the line; the ego brakes after completion
        "ego_events": lambda ti, tii, tiii: [(tiii, -1.5), (tiii + 1.8, 0.0)],
        "cut_events": lambda ti, tii, tiii: [(tii, -0.8), (tii + 3.0, 0.0), (tiii + 4.0, 0.5), (tiii + 8.0, 0.0)],
        "others": [
            {"id": "lead", "x0": 80.0, "y": 0.0, "speed": 12.5},
            {"id": "left_1", "x0": 20.0, "y": 3.5, "speed": 11.5},
            {"id": "right_2", "x0": -15.0, "y": -3.5, "speed": 13.0},
        ],
    },
}


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", type=Path, default=Path(__file__).resolve().parent.parent / "data" / "scenarios")
    args = parser.parse_args()
    args.out.mkdir(parents=True, exist_ok=True)
    for name, target in TARGETS.items():
        target["static_objects"] = [
            {"class": "car", "polygon": [[150, -6.6], [154.6, -6.6], [154.6, -8.5], [150, -8.5]][::-1]},
        ] + furniture(0.0, 400.0, 20.0)
        doc = build(name, target)
        (args.out / f"{name}.json").write_text(json.dumps(doc, indent=1) + "\n")


if __name__ == "__main__":
    main()
