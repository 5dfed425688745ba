"""Deterministic CSV and run-manifest writers.

Floats are printed with 12 significant digits and files use LF newlines so a
seeded experiment reproduces byte-for-byte.
"""

from __future__ import annotations

import json
from pathlib import Path

from erravg import __version__


def fmt(value) -> str:
    if isinstance(value, float):
        return f"{value:.12g}"
    return str(value)


def write_csv(path, header: list[str], rows) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(fmt(x) for x in row) + "\n")


def write_manifest(path, experiment: str, seed: int, parameters: dict, outputs: list[str]) -> None:
    """Sidecar JSON recording exactly what produced the CSV files.

    Deliberately timestamp-free: reruns with the same seed must be
    byte-identical.
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    manifest = {
        "experiment": experiment,
        "seed": seed,
        "parameters": parameters,
        "outputs": sorted(outputs),
        "version": __version__,
    }
    with open(path, "w", encoding="utf-8", newline="") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
