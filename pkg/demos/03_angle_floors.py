"""
How well can any apparatus know its own orientation?
====================================================

Three stacked limits on the tilt angle of a spin analyser of mass M,
radius R, operating for a time tau:

  quantum   sqrt(hbar tau / M) / R   (angular diffusion of a free body)
  special   sqrt(hbar / (c M R))    (momentum cut off at M c)
  general   l_P / R                 (radius cut off at the Schwarzschild
                                     radius -- the absolute floor)

Pushing R to the size of the observable universe still leaves an
orientation uncertainty of order 1e-62 radians.
"""

import numpy as np

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

from spinchamber import MeasuringDevice, angle_resolution_floor

devices = [
    ("torsion balance", MeasuringDevice(mass=1e-3, radius=1e-2, duration=1.0)),
    ("one-tonne rig", MeasuringDevice(mass=1e3, radius=1.0, duration=3.15e7)),
    ("Earth", MeasuringDevice(mass=5.97e24, radius=6.37e6, duration=1.4e17)),
    ("Sun", MeasuringDevice(mass=1.99e30, radius=6.96e8, duration=1.4e17)),
    ("universe", MeasuringDevice(mass=1.5e53, radius=4.4e26, duration=4.4e17)),
]

print(f"{'device':>16} {'quantum':>10} {'special':>10} {'general':>10} {'binding':>10}")
for name, dev in devices:
    r = angle_resolution_floor(dev)
    flags = ("" if r.sr_consistent else " [R>ct]") + (
        "" if r.gr_consistent else " [R<r_s]"
    )
    print(
        f"{name:>16} {r.bound_quantum:>10.1e} {r.bound_sr:>10.1e}"
        f" {r.bound_gr:>10.1e} {r.binding:>10.1e}{flags}"
    )

print()
print("the three floors are ordered whenever the device fits inside its")
print("light cone and outside its Schwarzschild radius:")
print("    quantum >= special >= general")
print()
uni = angle_resolution_floor(devices[-1][1])
print(f"universe-scale general-relativistic floor: {uni.bound_gr:.2e} rad")
print("no orientation, ever, is defined better than that.")

# Sweep the radius at fixed mass/duration to show the crossovers.
radii = np.logspace(-3, 27, 400)
qs, srs, grs = [], [], []
for r in radii:
    rep = angle_resolution_floor(MeasuringDevice(mass=1e3, radius=r, duration=3.15e7))
    qs.append(rep.bound_quantum)
    srs.append(rep.bound_sr)
    grs.append(rep.bound_gr)

fig, ax = plt.subplots(figsize=(5.4, 3.4))
ax.loglog(radii, qs, label="quantum")
ax.loglog(radii, srs, label="special relativity")
ax.loglog(radii, grs, label="general relativity")
ax.set_xlabel("device radius R (m)")
ax.set_ylabel("angle floor (rad)")
ax.legend(frameon=False, fontsize=8)
fig.tight_layout()
fig.savefig("angle_floors.png", dpi=120)
print()
print("wrote angle_floors.png")
