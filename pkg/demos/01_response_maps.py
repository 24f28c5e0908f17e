"""Tour of the response-map families.

Each map answers the same question: if a listener hears a pitch value x
and later reproduces it, what comes out? Four families cover the space
between "memory keeps everything" and "memory keeps one bit".
"""

import numpy as np

from mimchain import (
    CompressiveAttractor,
    InverterTransfer,
    Quantizer,
    Transpose,
    apply_scalar,
    default_attractors,
    fixed_points,
)
from mimchain.io import write_svg_lines

attractors = default_attractors()
print("attractor levels:", dict(zip(attractors.labels, attractors.phi)))

maps = {
    "transpose -2 st": Transpose(-2.0),
    "quantizer": Quantizer(attractors),
    "pull 0.3": CompressiveAttractor(attractors, pull=0.3, assignment="pointwise"),
    "pull 0.7": CompressiveAttractor(attractors, pull=0.7, assignment="pointwise"),
}

x = np.linspace(-6.0, 4.0, 9)
print("\ninput:   ", np.round(x, 2))
for name, m in maps.items():
    print(f"{name:14s}", np.round(apply_scalar(m, x), 2))

# Fixed points tell the long-run story: where iterated mimicry can settle.
print("\nfixed points of the pull-0.3 map on [-6, 4]:")
for p in fixed_points(maps["pull 0.3"], (-6.0, 4.0)).points:
    print(f"  x* = {p.x:+.3f}  {'stable' if p.stable else 'unstable'}")

# The identity map is degenerate: every point is fixed.
scan = fixed_points(Transpose(0.0), (-6.0, 4.0))
print("identity map degenerate:", scan.identity)

# The inverter lives in volts and is decreasing, so its attractors appear
# only under two-stage composition: a stable pair plus an unstable middle.
print("\nC-MOS inverter transfer, two-stage composition on [0, 3.3] V:")
for p in fixed_points(InverterTransfer(), (0.0, 3.3)).points:
    kind = "2-cycle" if p.kind == "two-cycle" else "fixed"
    print(f"  x* = {p.x:.4f} V  {'stable' if p.stable else 'unstable'} ({kind})")

dense = np.linspace(-6.0, 4.0, 400)
write_svg_lines(
    "demos/output/response_maps.svg",
    [(dense, apply_scalar(m, dense)) for m in maps.values()] + [(dense, dense)],
    x_label="input (st)",
    y_label="output (st)",
)
print("\nwrote demos/output/response_maps.svg")
