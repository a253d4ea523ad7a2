"""
Top-level package for the federated-learning multichannel ALOHA simulator.

Modules:
- model: federated linear regression (data, loss, local update, aggregation).
- channel: availability, multichannel slot resolution, polling schedule.
- access: access probabilities, the error-bound solver, dual-ascent feedback,
  and the single-uploader baselines.
- simulation: config, the iteration loop, presets and CSV output.
- cli: command-line front end.
"""
