"""How much energy do the four candidate paths cost, and where does it go?

Builds the straight, horizontal-arc and vertical-arc paths between the same
two endpoints and splits each path's energy into drag work, potential and
kinetic parts.
"""
from passivesar import load_scenario, path_energy, path_length
from passivesar.flightpath import segment_kinematics

spec = load_scenario("scenario_s4")
p = spec.platform

print(f"platform: {p.mass} kg, c1={p.drag_c1}, c2={p.drag_c2}, "
      f"regeneration clamp {'on' if p.clamp_regeneration else 'off'}\n")
print(f"{'path':<7}{'length km':>10}{'drag kJ':>9}{'pot kJ':>8}{'kin kJ':>8}{'total Wh':>10}"
      f"{'max |a|':>9}")
for name, fp in spec.paths.items():
    e = path_energy(fp, p)
    a_max = max(abs(v) for v in (segment_kinematics(fp).a ** 2).sum(axis=1) ** 0.5)
    print(f"{name:<7}{path_length(fp) / 1e3:>10.3f}{e.drag / 1e3:>9.2f}{e.potential / 1e3:>8.2f}"
          f"{e.kinetic / 1e3:>8.2f}{e.total_wh:>10.2f}{a_max:>9.3f}")

# The straight line is shortest, so it has the least drag work. The vertical
# arc pays for its climb; with the clamp on, the descent gives nothing back.
# Turning paths also pay a small load-factor penalty through the normal
# acceleration term.
