"""Experiment configuration: a single JSON file.

Example::

    {
      "id": "sphere-sasaki",
      "surface": "sphere:1",
      "generators": "sasaki",
      "sample": {"points": [[1.0, 0.3]], "directions": [[1, 0]], "t": [0, 1, 4]},
      "tolerances": {"identity": 1e-7},
      "outputs": {"format": "csv", "path": "out.csv"}
    }

``surface`` accepts a preset string ("flat", "sphere:r", "hyperbolic"), a
mapping ``{"preset": "sphere", "radius": 2}``, or ``{"custom": {...}}`` with
a component table (see :func:`gnatlab.base_geometry.custom_chart`).
``generators`` is a preset name or six expression objects keyed alpha1..beta3.
``sample.points`` may be replaced by ``sample.grid`` =
``{"x1": [lo, hi, n], "x2": [lo, hi, n]}``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Mapping

import numpy as np

from .base_geometry import MetricChart, chart_preset
from .generators import DEFAULT_SAMPLES, DEFAULT_T_MAX, GeneratorSet, preset

DEFAULT_TOLERANCES = {"identity": 1e-7, "spectrum": 1e-6, "osserman": 1e-5}
FORMATS = ("csv", "json")


class ConfigError(ValueError):
    """The configuration file cannot be parsed or is inconsistent."""


@dataclass(frozen=True)
class ExperimentConfig:
    experiment_id: str
    chart: MetricChart
    generators: GeneratorSet
    points: np.ndarray
    directions: np.ndarray
    t_values: np.ndarray
    tolerances: dict
    output_format: str = "csv"
    output_path: str | None = None
    t_max: float = DEFAULT_T_MAX
    t_samples: int = DEFAULT_SAMPLES
    directions_per_point: int = 60
    raw: dict = field(default_factory=dict, repr=False)


def _float_array(value, what: str, ndim: int) -> np.ndarray:
    try:
        arr = np.array(value, dtype=float)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{what}: expected numbers") from exc
    if arr.ndim != ndim:
        raise ConfigError(f"{what}: expected a {ndim}-d array, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ConfigError(f"{what}: non-finite entries")
    return arr


def _grid(spec: Mapping) -> np.ndarray:
    axes = []
    for key in ("x1", "x2"):
        if key not in spec:
            raise ConfigError(f"sample.grid needs '{key}' = [lo, hi, n]")
        lo, hi, n = spec[key]
        if int(n) < 1:
            raise ConfigError(f"sample.grid.{key}: n must be >= 1")
        axes.append(np.linspace(float(lo), float(hi), int(n)))
    a, b = np.meshgrid(*axes, indexing="ij")
    return np.column_stack([a.ravel(), b.ravel()])


def parse_config(data: Mapping, default_id: str = "experiment") -> ExperimentConfig:
    if not isinstance(data, Mapping):
        raise ConfigError("top level must be a JSON object")
    for key in ("surface", "generators"):
        if key not in data:
            raise ConfigError(f"missing required key '{key}'")
    try:
        chart = chart_preset(data["surface"])
    except (ValueError, KeyError, TypeError) as exc:
        raise ConfigError(f"surface: {exc}") from exc
    try:
        gen = preset(data["generators"])
    except (ValueError, KeyError, TypeError) as exc:
        raise ConfigError(f"generators: {exc}") from exc

    sample = data.get("sample", {})
    if not isinstance(sample, Mapping):
        raise ConfigError("sample must be an object")
    if "grid" in sample:
        try:
            points = _grid(sample["grid"])
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"sample.grid: {exc}") from exc
    else:
        points = _float_array(sample.get("points", []), "sample.points", 2)
    if points.size == 0:
        raise ConfigError("sample has no base points")
    if points.shape[1] != chart.dim:
        raise ConfigError(f"sample.points must have {chart.dim} coordinates")
    directions = _float_array(sample.get("directions", [[1.0, 0.0]]), "sample.directions", 2)
    if directions.shape[0] == 0 or directions.shape[1] != chart.dim:
        raise ConfigError(f"sample.directions must be non-empty with {chart.dim} components")
    if np.any(np.all(directions == 0, axis=1)):
        raise ConfigError("sample.directions contains a zero vector")
    t_values = _float_array(sample.get("t", [0.0, 1.0]), "sample.t", 1)
    if t_values.size == 0 or np.any(t_values < 0):
        raise ConfigError("sample.t must be non-empty and non-negative")

    tolerances = dict(DEFAULT_TOLERANCES)
    tol_in = data.get("tolerances", {})
    if not isinstance(tol_in, Mapping):
        raise ConfigError("tolerances must be an object")
    for name, value in tol_in.items():
        if not isinstance(value, (int, float)) or isinstance(value, bool) or not value > 0:
            raise ConfigError(f"tolerance '{name}' must be a positive number")
        tolerances[name] = float(value)

    outputs = data.get("outputs", {})
    fmt = outputs.get("format", "csv")
    if fmt not in FORMATS:
        raise ConfigError(f"outputs.format must be one of {FORMATS}")

    cls = data.get("classification", {})
    oss = data.get("osserman", {})
    try:
        t_max = float(cls.get("t_max", DEFAULT_T_MAX))
        n_t = int(cls.get("samples", DEFAULT_SAMPLES))
        n_dir = int(oss.get("directions_per_point", 60))
    except (TypeError, ValueError, AttributeError) as exc:
        raise ConfigError(f"classification/osserman: {exc}") from exc
    if t_max <= 0 or n_t < 2 or n_dir < 1:
        raise ConfigError("classification.t_max > 0, samples >= 2 and directions_per_point >= 1 required")

    return ExperimentConfig(
        experiment_id=str(data.get("id", default_id)),
        chart=chart,
        generators=gen,
        points=points,
        directions=directions,
        t_values=np.unique(t_values),
        tolerances=tolerances,
        output_format=fmt,
        output_path=outputs.get("path"),
        t_max=t_max,
        t_samples=n_t,
        directions_per_point=n_dir,
        raw=dict(data),
    )


def load_config(path) -> ExperimentConfig:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from exc
    try:
        data: Any = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON ({exc})") from exc
    return parse_config(data, default_id=path.stem)
