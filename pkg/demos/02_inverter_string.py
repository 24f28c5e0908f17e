"""Digital behavior emerging from a string of analogue inverters.

Each stage is a smooth logistic transfer curve, yet after eight stages
almost every input voltage has been pushed to one of precisely two
values. No component in the string is discrete; the discreteness is a
property of the iteration.
"""

import numpy as np

from mimchain import InverterTransfer, run_inverter_string, sweep_inverter
from mimchain.io import write_svg_lines, write_sweep_csv

transfer = InverterTransfer()  # 0.2 / 3.1 / 1.7 V, gain 4 /V
print("single inverter:  g(0.0 V) =", round(run_inverter_string(0.0, 1)[1], 4), "V")

inputs = np.linspace(0.0, 3.3, 1000)
table = sweep_inverter(inputs, 8, transfer)
finals = table[:, -1]
near = (np.abs(finals - 0.2) <= 0.05) | (np.abs(finals - 3.1) <= 0.05)
print(f"after 8 stages, {near.mean() * 100:.1f}% of 1000 inputs are within "
      "0.05 V of 0.2 V or 3.1 V")

# Watch a few individual trajectories. Voltages near the unstable middle
# point linger for a stage or two, then commit to a rail.
print("\n v_in ->", "  ".join(f"s{j}" for j in range(1, 9)))
for v_in in (0.3, 1.5, 1.68, 1.7, 2.0, 3.2):
    trace = run_inverter_string(v_in, 8)
    print(f" {v_in:4.2f} :", "  ".join(f"{v:4.2f}" for v in trace[1:]))

write_sweep_csv("demos/output/inverter_sweep.csv", sweep_inverter(inputs[::10], 8, transfer))
# stage-by-stage fan-in of voltages: one polyline per inverter stage
stages = [(inputs, table[:, j]) for j in range(0, 9, 2)]
write_svg_lines(
    "demos/output/inverter_stages.svg", stages, x_label="input (V)", y_label="voltage (V)"
)
print("\nwrote demos/output/inverter_sweep.csv and demos/output/inverter_stages.svg")
