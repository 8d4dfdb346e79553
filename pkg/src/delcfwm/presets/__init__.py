"""Bundled run presets, one JSON document per canned figure-style run.

Presets are plain data files so every non-physical parameter choice (Rabi
frequencies, relaxation rates, grid ranges) is visible and editable.
"""

from __future__ import annotations

import json
from importlib import resources


def available_presets() -> list:
    """Names of all bundled presets."""
    names = []
    for entry in resources.files(__package__).iterdir():
        if entry.name.endswith(".json"):
            names.append(entry.name[: -len(".json")])
    return sorted(names)


def load_preset(name: str) -> dict:
    """Load one bundled preset by name."""
    ref = resources.files(__package__) / f"{name}.json"
    if not ref.is_file():
        raise KeyError(
            f"unknown preset {name!r}; available: {', '.join(available_presets())}"
        )
    return json.loads(ref.read_text(encoding="utf-8"))
