"""
Simulation of federated learning rounds over the uplink.

This package:
- describes experiments with `SimConfig` and its key=value document,
- runs the per-iteration loop for each upload policy and averages runs,
- expands the named figure presets,
- writes CSV trajectories and preset indexes.
"""
