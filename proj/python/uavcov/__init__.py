"""Python access to the uavcov core and its output files."""

import csv
import io
import json

from ._core import (
    CollisionFault,
    ConfigError,
    Error,
    InvalidParameter,
    abs_count_bounds,
    coverage_radii,
    covering_bounds,
    expected_completion,
    generate_checkpoints,
    monte_carlo,
    nakagami_pdf,
    normalize_config,
    sample_power_gains,
    scene_json,
    swarm_case_csv,
    window_policy,
)

METRIC_COLUMNS = (
    "trial", "seed", "coverage_before", "coverage_after", "improvement", "abs_count",
    "config1_units", "config2_units", "per_abs_improvement_m2", "checkpoints", "red_checkpoints",
    "path_length_m", "mean_completion_s", "mean_base_distance_m", "flight_settle_s",
    "min_separation_m", "small_groups", "big_groups",
)

_INT_COLUMNS = {"trial", "seed", "abs_count", "config1_units", "config2_units", "checkpoints", "red_checkpoints"}
_TEXT_COLUMNS = {"small_groups", "big_groups"}


def _convert(row):
    out = {}
    for key, value in row.items():
        if key in _INT_COLUMNS:
            out[key] = int(value)
        elif key in _TEXT_COLUMNS:
            out[key] = value
        else:
            out[key] = float(value)
    return out


def parse_metrics(text):
    """Rows of a metrics.csv as dicts with numeric fields converted."""
    reader = csv.DictReader(io.StringIO(text))
    if tuple(reader.fieldnames or ()) != METRIC_COLUMNS:
        raise ValueError("unexpected metrics.csv columns")
    return [_convert(r) for r in reader]


def read_metrics(path):
    with open(path, newline="") as f:
        return parse_metrics(f.read())


def parse_trajectory(text):
    """(header, columns, rows) of a trajectory CSV with a leading '# {json}' line."""
    first, _, rest = text.partition("\n")
    if not first.startswith("# "):
        raise ValueError("trajectory CSV lacks a JSON header line")
    header = json.loads(first[2:])
    reader = csv.reader(io.StringIO(rest))
    columns = next(reader)
    rows = [[float(v) for v in r] for r in reader if r]
    return header, columns, rows


def read_trajectory(path):
    with open(path) as f:
        return parse_trajectory(f.read())


def parse_heatmap(text):
    """(metadata, grid) of a coverage heatmap CSV; grid rows follow the y index."""
    meta = {}
    grid = []
    for line in text.splitlines():
        if line.startswith("#"):
            for item in line[1:].strip().split(","):
                key, _, value = item.partition("=")
                if value:
                    meta[key] = float(value)
        elif line.strip():
            grid.append([float(v) for v in line.split(",")])
    return meta, grid
