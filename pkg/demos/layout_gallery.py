"""Concentric-ring aperture layouts around the central feed.

Builds the element layouts used throughout (half-wavelength radial and
angular spacing), prints the ring populations, and draws three apertures.

Run:  python demos/layout_gallery.py
"""

import os

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from metabeam import PhysicalConstants, build_layout, surface_density

OUT_DIR = os.path.join(os.path.dirname(__file__), "output")
os.makedirs(OUT_DIR, exist_ok=True)

constants = PhysicalConstants(frequency=10e9, waveguide_height=2e-3)
print(f"f = 10 GHz, lambda/2 = {constants.wavelength / 2 * 1e3:.3f} mm")

for radius in (0.05, 0.2, 0.4):
    layout = build_layout(radius, constants)
    rings = layout.ring_index.max()
    print(
        f"D = {radius:>4} m: N = {len(layout):>5} elements on {rings:>2} rings, "
        f"density = {surface_density(layout):7.0f} /m^2"
    )

fig, axes = plt.subplots(1, 3, figsize=(13, 4.2))
for ax, radius in zip(axes, (0.05, 0.1, 0.2)):
    layout = build_layout(radius, constants)
    ax.scatter(layout.positions[:, 0] * 100, layout.positions[:, 1] * 100,
               s=4, c=layout.ring_index, cmap="viridis")
    ax.plot(0, 0, "r*", markersize=10, label="feed")
    ax.set_title(f"D = {radius} m,  N = {len(layout)}")
    ax.set_xlabel("x (cm)")
    ax.set_aspect("equal")
    ax.legend(loc="upper right")
axes[0].set_ylabel("y (cm)")
fig.tight_layout()
path = os.path.join(OUT_DIR, "layouts.png")
fig.savefig(path, dpi=130)
print(f"wrote {path}")
