"""Can each path send its echo data to the ground station?

Echo volume comes from the azimuth/range sample counts; link capacity from
the Shannon rate at each segment's distance to the station, integrated over
the segment durations.
"""
from passivesar import evaluate_mission, load_scenario

spec = load_scenario("scenario_s4")
cp = spec.comms
print(f"link: B={cp.bandwidth / 1e6:.1f} MHz, reference SNR at 1 m {cp.ref_snr:.2e}\n")
for row in evaluate_mission(spec).rows:
    link = row.link
    print(f"{row.name}: N_a={row.N_a} N_r={row.N_r}  D_echo={row.D_echo / 1e9:.3f} Gb  "
          f"D_com={row.D_com / 1e9:.2f} Gb  margin={link.margin / 1e9:.2f} Gb  "
          f"closest {link.distance.min() / 1e3:.1f} km  "
          f"LOS {row.los_fraction:.0%}  {'feasible' if row.feasible else 'NOT feasible'}")
