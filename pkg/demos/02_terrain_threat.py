"""Terrain clearance along each path and the resulting threat value.

The threat of a sample is the squared clearance deficit below the safe
distance, using the worst of the point itself and eight lateral probes.
"""
import numpy as np

from passivesar import load_scenario
from passivesar.geom import height_at, line_of_sight
from passivesar.threat import threat_trace

spec = load_scenario("scenario_s4")
t = spec.terrain
print(f"terrain footprint {t.bounds}, grid {t.shape}, peak {t.heights.max():.0f} m")
print(f"safe clearance {spec.threat.safe_clearance:.0f} m, "
      f"probe ring {spec.threat.lateral_probe:.0f} m\n")

for name, fp in spec.paths.items():
    tr = threat_trace(fp, t, spec.threat)
    worst = int(np.argmin(tr.min_clearance))
    x, y, z = tr.points[worst]
    print(f"{name}: f_threat={tr.value:.4f}  closest approach {tr.min_clearance[worst]:.0f} m "
          f"at ({x / 1e3:.2f}, {y / 1e3:.2f}) km, ground {height_at(t, x, y):.0f} m")

# A low path skimming the hill loses sight of the ground station.
a = np.array([4000.0, 6000.0, 800.0])
print("\nline of sight from a low point west of the hill to the station:",
      line_of_sight(t, a, spec.comms.station))
