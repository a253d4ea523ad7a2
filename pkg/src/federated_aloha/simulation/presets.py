"""
Named experiment presets.

- fig1:  cyclic vs max-norm single uploader, K=100, L=10, mu1=0.01, p_comp=1
- fig2:  polling vs equal vs adaptive ALOHA, K=1000, M=10, L=10, p_comp=0.1
- fig3a: the three policies over M in FIG3A_CHANNELS, 100 iterations
- fig3b: the three policies over p_comp in FIG3B_P_COMP, 100 iterations
- fig4:  as fig2 with p_comp=0.6

Every config of a preset shares the base seed, so the policies are compared
on the same instances and availability sequences.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from pathlib import Path
from typing import List, Tuple

from ..access import Policy
from . import io
from .config import SimConfig
from .runner import RunSummary, run_many

logger = logging.getLogger(__name__)

PRESET_NAMES = ("fig1", "fig2", "fig3a", "fig3b", "fig4")
COMPARED_POLICIES = (Policy.POLLING, Policy.EQUAL_ALOHA, Policy.ADAPTIVE_ALOHA)
FIG3A_CHANNELS = (2, 5, 10, 20, 50)
FIG3B_P_COMP = tuple(round(0.1 * i, 1) for i in range(1, 11))
DEFAULT_RUNS = 20
INDEX_FILE = "index.csv"


@dataclass(frozen=True)
class PresetEntry:
    """One config of a preset and the label its CSV is named after."""
    label: str
    config: SimConfig


@dataclass(frozen=True)
class Preset:
    name: str
    entries: Tuple[PresetEntry, ...]


def _base(runs: int, seed: int, **overrides) -> SimConfig:
    values = dict(K=1000, M=10, L=10, mu1=0.01, mu=0.1, p_comp=0.1, T=1000, runs=runs, seed=seed)
    values.update(overrides)
    return SimConfig(**values)


def expand_preset(name: str, runs: int = DEFAULT_RUNS, seed: int = 0) -> Preset:
    """
    Expand a preset name into its list of configs. Pure.

    Raises:
        ValueError: If the name is not one of PRESET_NAMES.
    """
    entries: List[PresetEntry] = []
    if name == "fig1":
        for policy in (Policy.CCD, Policy.GENIE_MAX_NORM):
            config = _base(runs, seed, K=100, M=1, p_comp=1.0, policy=policy)
            entries.append(PresetEntry(f"fig1_{policy.value}", config))
    elif name in ("fig2", "fig4"):
        p_comp = 0.1 if name == "fig2" else 0.6
        for policy in COMPARED_POLICIES:
            config = _base(runs, seed, p_comp=p_comp, policy=policy)
            entries.append(PresetEntry(f"{name}_{policy.value}", config))
    elif name == "fig3a":
        for M in FIG3A_CHANNELS:
            for policy in COMPARED_POLICIES:
                config = _base(runs, seed, M=M, T=100, policy=policy)
                entries.append(PresetEntry(f"fig3a_M{M}_{policy.value}", config))
    elif name == "fig3b":
        for p_comp in FIG3B_P_COMP:
            for policy in COMPARED_POLICIES:
                config = _base(runs, seed, p_comp=p_comp, T=100, policy=policy)
                entries.append(PresetEntry(f"fig3b_pcomp{p_comp:g}_{policy.value}", config))
    else:
        raise ValueError(f"Unknown preset '{name}'. Valid presets are: {', '.join(PRESET_NAMES)}")
    return Preset(name=name, entries=tuple(entries))


def run_preset(
    name: str,
    out_dir: Path,
    runs: int = DEFAULT_RUNS,
    seed: int = 0,
    workers: int = 1,
) -> List[RunSummary]:
    """
    Run every config of a preset and write one CSV per config plus INDEX_FILE.

    Returns:
        The summaries in preset order.
    """
    preset = expand_preset(name, runs=runs, seed=seed)
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    summaries: List[RunSummary] = []
    index_rows: List[List[str]] = []
    for entry in preset.entries:
        summary = run_many(entry.config, workers=workers)
        file_name = f"{entry.label}.csv"
        io.emit_csv(summary, out_dir / file_name)
        index_rows.append(io.index_row(entry.label, summary, file_name))
        summaries.append(summary)
        logger.info("%s: final error %.6g", entry.label, summary.final_error_mean)

    io.write_index(index_rows, out_dir / INDEX_FILE)
    return summaries
