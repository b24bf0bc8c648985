"""File formats: numeric CSV, problem bundles, JSON helpers.

Floats are serialized with repr (shortest round-trip decimal), so every
write/read cycle is bit-exact and identical inputs produce byte-identical
files. A problem bundle is a directory holding manifest.json plus the
matrices and vectors of one DictionaryProblem as CSV.
"""

from __future__ import annotations

import dataclasses
import hashlib
import json
import math
from pathlib import Path

import numpy as np

from .dictionaries import DictionarySpec
from .exceptions import SchemaError
from .simplify import DictionaryProblem, GroundTruth

MANIFEST_NAME = "manifest.json"


def format_float(x):
    """Shortest decimal that round-trips to the same float64."""
    return repr(float(x))


def write_matrix_csv(path, m):
    m = np.atleast_2d(np.asarray(m, dtype=float))
    lines = [",".join(format_float(v) for v in row) for row in m]
    Path(path).write_text("\n".join(lines) + "\n")


def read_matrix_csv(path):
    rows = []
    for line in Path(path).read_text().splitlines():
        if line.strip():
            rows.append([float(v) for v in line.split(",")])
    if not rows:
        raise SchemaError(f"{path}: empty matrix file")
    widths = {len(r) for r in rows}
    if len(widths) != 1:
        raise SchemaError(f"{path}: ragged rows (widths {sorted(widths)})")
    return np.asarray(rows, dtype=float)


def write_vector_csv(path, v):
    v = np.asarray(v, dtype=float).ravel()
    Path(path).write_text("\n".join(format_float(x) for x in v) + "\n")


def read_vector_csv(path):
    values = [
        float(line) for line in Path(path).read_text().splitlines() if line.strip()
    ]
    if not values:
        raise SchemaError(f"{path}: empty vector file")
    return np.asarray(values, dtype=float)


def json_ready(obj):
    """Recursively convert to plain JSON types; non-finite floats become strings."""
    if isinstance(obj, dict):
        return {str(k): json_ready(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [json_ready(v) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return x if math.isfinite(x) else repr(x)
    if isinstance(obj, np.ndarray):
        return [json_ready(v) for v in obj.tolist()]
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return json_ready(dataclasses.asdict(obj))
    return obj


def dump_json(path, obj):
    Path(path).write_text(json.dumps(json_ready(obj), indent=2, sort_keys=True) + "\n")


def config_hash(obj):
    """sha256 of the canonical JSON encoding; stable across key order."""
    blob = json.dumps(json_ready(obj), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()


def save_bundle(directory, problem, dictionary_spec=None, seed=None):
    """Write a DictionaryProblem as a bundle directory; returns the path."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    write_matrix_csv(directory / "phi.csv", problem.phi)
    write_vector_csv(directory / "c.csv", problem.c)
    write_matrix_csv(directory / "d.csv", problem.d)
    gt = problem.ground_truth
    manifest = {
        "n": problem.n,
        "p": problem.p,
        "m": problem.m,
        "lam": problem.lam,
        "seed": seed,
        "dictionary_spec": dictionary_spec.to_dict()
        if isinstance(dictionary_spec, DictionarySpec)
        else dictionary_spec,
        "noise_sigma": gt.noise_sigma if gt is not None else None,
        "has_ground_truth": gt is not None,
    }
    if gt is not None:
        write_vector_csv(directory / "theta_star.csv", gt.theta_star)
        write_vector_csv(directory / "epsilon.csv", gt.epsilon)
    dump_json(directory / MANIFEST_NAME, manifest)
    return directory


def load_bundle(directory):
    """Read a bundle directory back into a DictionaryProblem.

    Shapes are checked against the manifest and, when the planted signal is
    present, the construction identity c = phi theta_star + epsilon is
    re-verified. Returns (problem, manifest).
    """
    directory = Path(directory)
    manifest_path = directory / MANIFEST_NAME
    if not manifest_path.is_file():
        raise SchemaError(f"{directory}: missing {MANIFEST_NAME}")
    manifest = json.loads(manifest_path.read_text())
    for key in ("n", "p", "m", "lam"):
        if key not in manifest:
            raise SchemaError(f"{manifest_path}: missing key {key!r}")
    phi = read_matrix_csv(directory / "phi.csv")
    c = read_vector_csv(directory / "c.csv")
    d = read_matrix_csv(directory / "d.csv")
    n, p, m = int(manifest["n"]), int(manifest["p"]), int(manifest["m"])
    if phi.shape != (n, p):
        raise SchemaError(f"phi.csv has shape {phi.shape}, manifest says {(n, p)}")
    if c.shape != (n,):
        raise SchemaError(f"c.csv has length {c.shape[0]}, manifest says {n}")
    if d.shape != (m, p):
        raise SchemaError(f"d.csv has shape {d.shape}, manifest says {(m, p)}")
    ground_truth = None
    if manifest.get("has_ground_truth"):
        theta_star = read_vector_csv(directory / "theta_star.csv")
        epsilon = read_vector_csv(directory / "epsilon.csv")
        noise_sigma = manifest.get("noise_sigma") or 0.0
        identity_gap = np.abs(phi @ theta_star + epsilon - c).max()
        if identity_gap > 1e-12 * (1.0 + np.abs(c).max()):
            raise SchemaError(
                f"bundle violates c = phi theta_star + epsilon (gap {identity_gap:.3e})"
            )
        ground_truth = GroundTruth(theta_star, epsilon, float(noise_sigma))
    problem = DictionaryProblem(
        phi=phi, c=c, d=d, lam=float(manifest["lam"]), ground_truth=ground_truth
    )
    return problem, manifest
