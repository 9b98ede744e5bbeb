"""JSON and CSV adapters for the window and descriptor types.

Formats:
  window map        {"n": N, "map": [[i, j], ...]}
  orbit spectrum    {"cycles": <descriptor>, "nLike": k, "revNLike": k,
                     "zLike": k | "omega", "finitePaths": [...]}
  descriptor        {"prefix": [...], "tail": {"kind": ..., ...}}
  digraph           {"vertices": k, "edges": [[i, j], ...]}
  window lengths    [n0, n1, ...] or {"lengths": [...]}
Counts use the string "omega" for the infinite value.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Sequence, Union

import numpy as np

from .aperm import OrbitSpectrum, WindowMap
from .core import count_from_json, count_to_json
from .descriptors import SequenceDescriptor
from .digraph import Digraph


def window_map_to_json(f: WindowMap) -> dict:
    return {"n": f.n, "map": [[i, j] for i, j in f.pairs]}


def window_map_from_json(obj: dict) -> WindowMap:
    return WindowMap(int(obj["n"]), tuple((int(i), int(j)) for i, j in obj["map"]))


def spectrum_to_json(s: OrbitSpectrum) -> dict:
    return {
        "cycles": s.cycles.to_json(),
        "nLike": s.n_like,
        "revNLike": s.rev_n_like,
        "zLike": count_to_json(s.z_like),
        "finitePaths": list(s.finite_paths),
    }


def spectrum_from_json(obj: dict) -> OrbitSpectrum:
    return OrbitSpectrum(
        cycles=SequenceDescriptor.from_json(obj.get("cycles", {"prefix": [], "tail": {"kind": "empty"}})),
        n_like=int(obj.get("nLike", 0)),
        rev_n_like=int(obj.get("revNLike", 0)),
        z_like=count_from_json(obj.get("zLike", 0)),
        finite_paths=tuple(obj.get("finitePaths", ())),
    )


def lengths_from_json(obj: Union[list, dict]) -> list:
    if isinstance(obj, dict):
        if "lengths" not in obj:
            raise ValueError('window object must carry a "lengths" list')
        obj = obj["lengths"]
    lengths = [int(v) for v in obj]
    if any(v < 1 for v in lengths):
        raise ValueError("window lengths must be >= 1")
    return lengths


def load_json(path: Union[str, Path]) -> Union[dict, list]:
    with open(path, "r", encoding="utf-8") as fh:
        return json.load(fh)


def save_json(path: Union[str, Path], obj) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_descriptor(path: Union[str, Path]) -> SequenceDescriptor:
    return SequenceDescriptor.from_json(load_json(path))


def load_window_map(path: Union[str, Path]) -> WindowMap:
    return window_map_from_json(load_json(path))


def load_spectrum(path: Union[str, Path]) -> OrbitSpectrum:
    return spectrum_from_json(load_json(path))


def load_digraph(path: Union[str, Path]) -> Digraph:
    return Digraph.from_json(load_json(path))


def load_lengths(path: Union[str, Path]) -> list:
    return lengths_from_json(load_json(path))


def load_matrix(path: Union[str, Path]) -> np.ndarray:
    """Square matrix from CSV (or whitespace-separated) text.

    Integer-valued data comes back as int64 so band arithmetic stays exact.
    """
    text = Path(path).read_text(encoding="utf-8")
    delimiter = "," if "," in text else None
    arr = np.loadtxt(path, delimiter=delimiter, ndmin=2)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise ValueError(f"matrix in {path} is not square: shape {arr.shape}")
    if np.all(arr == np.round(arr)):
        return arr.astype(np.int64)
    return arr


def save_matrix(path: Union[str, Path], arr: np.ndarray) -> None:
    fmt = "%d" if np.issubdtype(np.asarray(arr).dtype, np.integer) else "%.17g"
    np.savetxt(path, np.asarray(arr), fmt=fmt, delimiter=",")
