"""Structured model files (YAML or JSON) for user-supplied reductive models.

Indices in files are 1-based.  Values are numbers or exact rationals written "p/q".

    name: su2_example
    dim: 3                      # dimension of g
    labels: [e1, e2, e3]
    structure_constants:        # [X_i, X_j] = sum_k value X_k; the (j, i) entry is implied
      - {i: 1, j: 2, k: 3, value: 2}
    isotropy: []                # indices of the isotropy basis elements
    metric: [[1/4, 0, 0], ...]  # rows over the complement, in index order
    tensors:
      xi: [[...], [...], [...]] # three vectors on the complement
      phi: [[[...]], ...]       # three endomorphisms, phi[i][row][col]
    params: {alpha: 1, delta: 2}
"""

from __future__ import annotations

import json
from fractions import Fraction
from pathlib import Path

import numpy as np
import yaml

from .catalog import CatalogEntry
from .homogeneous import LieModel
from .sasaki import AlmostContactTriple
from .tensors import as_float, is_exact, zeros

TOP_LEVEL = {"name", "dim", "labels", "structure_constants", "isotropy", "metric", "tensors", "params"}
RECORD = {"i", "j", "k", "value"}
TENSORS = {"xi", "eta", "phi", "J", "V"}
PARAMS = {"alpha", "delta", "k"}


class ModelFileError(ValueError):
    pass


def parse_value(v, exact_mode: bool):
    if isinstance(v, bool):
        raise ModelFileError(f"boolean is not a number: {v!r}")
    if isinstance(v, str):
        try:
            f = Fraction(v.strip())
        except ValueError:
            raise ModelFileError(f"cannot parse number {v!r}") from None
        return f if exact_mode else float(f)
    if isinstance(v, (int, float)):
        if exact_mode:
            return Fraction(v) if isinstance(v, int) else Fraction(str(v))
        return float(v)
    raise ModelFileError(f"cannot parse number {v!r}")


def _array(data, exact_mode: bool, shape_name: str) -> np.ndarray:
    arr = np.asarray(data, dtype=object)
    out = np.empty(arr.shape, dtype=object)
    for idx, v in np.ndenumerate(arr):
        out[idx] = parse_value(v, exact_mode)
    if not exact_mode:
        out = out.astype(float)
    if out.ndim == 0:
        raise ModelFileError(f"{shape_name} must be an array")
    return out


def _reject_unknown(d: dict, allowed: set, where: str):
    for key in d:
        if key not in allowed:
            raise ModelFileError(f"unknown field '{key}' in {where}")


def read_text(path: str | Path) -> dict:
    path = Path(path)
    text = path.read_text()
    data = json.loads(text) if path.suffix == ".json" else yaml.safe_load(text)
    if not isinstance(data, dict):
        raise ModelFileError("model file must contain a mapping at the top level")
    return data


def parse_model(data: dict, exact_mode: bool = False) -> CatalogEntry:
    _reject_unknown(data, TOP_LEVEL, "model file")
    for key in ("name", "dim", "structure_constants", "metric"):
        if key not in data:
            raise ModelFileError(f"missing required field '{key}'")
    n = int(data["dim"])
    c = zeros((n, n, n), exact_mode)
    seen = {}
    for rec in data["structure_constants"]:
        if not isinstance(rec, dict):
            raise ModelFileError("structure_constants entries must be mappings {i, j, k, value}")
        _reject_unknown(rec, RECORD, "structure_constants record")
        i, j, k = (int(rec[x]) - 1 for x in "ijk")
        if not all(0 <= x < n for x in (i, j, k)):
            raise ModelFileError(f"structure constant index out of range: {rec}")
        val = parse_value(rec["value"], exact_mode)
        for key, v in (((i, j, k), val), ((j, i, k), -val)):
            if key in seen and seen[key] != v:
                raise ModelFileError(f"inconsistent structure constants at {tuple(x + 1 for x in key)}")
            seen[key] = v
            c[key] = v
    iso = tuple(int(x) - 1 for x in data.get("isotropy", []))
    comp = tuple(x for x in range(n) if x not in iso)
    labels = tuple(data.get("labels") or [f"X{x + 1}" for x in range(n)])
    if len(labels) != n:
        raise ModelFileError(f"expected {n} labels, got {len(labels)}")
    metric = _array(data["metric"], exact_mode, "metric")
    if metric.shape != (len(comp), len(comp)):
        raise ModelFileError(f"metric must be {len(comp)}x{len(comp)}, got {metric.shape}")
    try:
        model = LieModel(c, iso, comp, metric, labels, str(data["name"]))
    except ValueError as err:
        raise ModelFileError(str(err)) from err
    tensors = data.get("tensors") or {}
    _reject_unknown(tensors, TENSORS, "tensors")
    params = data.get("params") or {}
    _reject_unknown(params, PARAMS, "params")
    parsed = {k: parse_value(v, exact_mode) for k, v in params.items()}
    triple = J = V = None
    if "xi" in tensors or "phi" in tensors:
        if not ("xi" in tensors and "phi" in tensors):
            raise ModelFileError("xi and phi must be given together")
        xi = _array(tensors["xi"], exact_mode, "xi")
        phi = _array(tensors["phi"], exact_mode, "phi")
        if xi.shape != (3, model.dm) or phi.shape != (3, model.dm, model.dm):
            raise ModelFileError("xi must be 3 x dim(m) and phi 3 x dim(m) x dim(m)")
        triple = AlmostContactTriple(model, xi, phi, parsed.get("alpha", 1), parsed.get("delta", 1))
        if "eta" in tensors:
            eta = _array(tensors["eta"], exact_mode, "eta")
            if float(np.max(np.abs(as_float(eta - triple.eta)))) > 1e-12:
                raise ModelFileError("eta is inconsistent with xi and the metric")
    if "J" in tensors:
        J = _array(tensors["J"], exact_mode, "J")
    if "V" in tensors:
        V = _array(tensors["V"], exact_mode, "V")
    return CatalogEntry(str(data["name"]), model, triple, J, V, params=parsed, notes="loaded from file")


def load_model_file(path: str | Path, exact_mode: bool = False) -> CatalogEntry:
    return parse_model(read_text(path), exact_mode)


def _out(v):
    if isinstance(v, Fraction):
        return v.numerator if v.denominator == 1 else f"{v.numerator}/{v.denominator}"
    f = float(v)
    return int(f) if f.is_integer() else f


def _nested(arr: np.ndarray):
    return [_nested(a) for a in arr] if getattr(arr, "ndim", 0) > 0 else _out(arr)


def to_data(entry: CatalogEntry) -> dict:
    m = entry.model
    records = []
    for i in range(m.n):
        for j in range(i + 1, m.n):
            for k in range(m.n):
                if m.structure[i, j, k] != 0:
                    records.append({"i": i + 1, "j": j + 1, "k": k + 1, "value": _out(m.structure[i, j, k])})
    data = {
        "name": entry.name,
        "dim": m.n,
        "labels": list(m.labels),
        "structure_constants": records,
        "isotropy": [x + 1 for x in m.isotropy],
        "metric": _nested(m.metric),
    }
    if m.complement != tuple(x for x in range(m.n) if x not in m.isotropy):
        raise ModelFileError("files store the complement in index order; reorder the basis first")
    tensors = {}
    if entry.triple is not None:
        tensors["xi"] = _nested(entry.triple.xi)
        tensors["phi"] = _nested(entry.triple.phi)
    if entry.J is not None:
        tensors["J"] = _nested(entry.J)
    if entry.V is not None:
        tensors["V"] = _nested(entry.V)
    if tensors:
        data["tensors"] = tensors
    if entry.params:
        data["params"] = {k: _out(v) for k, v in entry.params.items()}
    return data


def dump_model(entry: CatalogEntry, path: str | Path | None = None) -> str:
    data = to_data(entry)
    text = json.dumps(data, indent=1) if path is not None and str(path).endswith(".json") \
        else yaml.safe_dump(data, sort_keys=False)
    if path is not None:
        Path(path).write_text(text)
    return text


__all__ = ["ModelFileError", "load_model_file", "parse_model", "dump_model", "to_data", "is_exact"]
