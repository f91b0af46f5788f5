"""On-disk formats: graph JSON, model JSON, pair manifests (JSON lines),
embedding matrices (JSON or headerless CSV), and retrieval results.

Writes go through a temp file plus atomic rename, so a failed run never
leaves a truncated file behind.
"""
from __future__ import annotations

import csv
import json
import os
import tempfile
from pathlib import Path

import numpy as np

from .errors import InvalidGraphError
from .graph import Graph
from .retrieval import RetrievalResult
from .solver import CorrelationModel


def atomic_write_text(path: str | Path, text: str) -> None:
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as handle:
            handle.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


# -- graph JSON: {"n": int, "edges": [[i, j, w], ...], "features": [[...], ...]}
# edges listed once per undirected pair, 0-based indices i < j, weight > 0.


def graph_to_dict(g: Graph) -> dict:
    edges = []
    for i in range(g.n):
        for j in range(i + 1, g.n):
            w = g.adjacency[i, j]
            if w > 0:
                edges.append([int(i), int(j), float(w)])
    return {"n": int(g.n), "edges": edges, "features": g.features.tolist()}


def graph_from_dict(d: dict) -> Graph:
    n = d.get("n")
    if not isinstance(n, int) or n < 1:
        raise InvalidGraphError(f"node count must be a positive integer, got {n!r}")
    adjacency = np.zeros((n, n))
    for entry in d.get("edges", []):
        if len(entry) != 3:
            raise InvalidGraphError(f"edge entry must be [i, j, w], got {entry!r}")
        i, j, w = int(entry[0]), int(entry[1]), float(entry[2])
        if not (0 <= i < j < n):
            raise InvalidGraphError(f"edge indices must satisfy 0 <= i < j < n, got ({i}, {j})")
        if w <= 0:
            raise InvalidGraphError(f"edge weight must be positive, got {w}")
        adjacency[i, j] = adjacency[j, i] = w
    features = np.asarray(d.get("features"), dtype=float)
    if features.ndim != 2 or features.shape[0] != n:
        raise InvalidGraphError(
            f"features must be a list of {n} rows, got shape {features.shape}"
        )
    return Graph(adjacency, features)


def save_graph(g: Graph, path: str | Path) -> None:
    atomic_write_text(path, _dumps(graph_to_dict(g)) + "\n")


def load_graph(path: str | Path) -> Graph:
    with open(path) as handle:
        return graph_from_dict(json.load(handle))


# -- model JSON


def save_model(model: CorrelationModel, path: str | Path) -> None:
    atomic_write_text(path, _dumps(model.to_dict()) + "\n")


def load_model(path: str | Path) -> CorrelationModel:
    with open(path) as handle:
        return CorrelationModel.from_dict(json.load(handle))


# -- pair manifest: JSON lines {"id": str, "view1": path, "view2": path},
# paths relative to the manifest's directory.


def write_manifest(rows: list[dict], path: str | Path) -> None:
    atomic_write_text(path, "".join(_dumps(row) + "\n" for row in rows))


def read_manifest(path: str | Path) -> list[dict]:
    rows = []
    with open(path) as handle:
        for line in handle:
            line = line.strip()
            if line:
                rows.append(json.loads(line))
    for row in rows:
        for key in ("id", "view1", "view2"):
            if key not in row:
                raise ValueError(f"manifest row missing {key!r}: {row!r}")
    return rows


def load_manifest_graphs(path: str | Path) -> tuple[list[str], list[Graph], list[Graph]]:
    """Read a manifest and load both views of every pair, in file order."""
    base = Path(path).parent
    ids, view1, view2 = [], [], []
    for row in read_manifest(path):
        ids.append(str(row["id"]))
        view1.append(load_graph(base / row["view1"]))
        view2.append(load_graph(base / row["view2"]))
    return ids, view1, view2


def write_pair_dataset(
    pairs: list[tuple[Graph, Graph]], out_dir: str | Path, prefix: str = "pair"
) -> Path:
    """Write each pair's two graph files plus the manifest; returns the
    manifest path."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    rows = []
    for i, (g1, g2) in enumerate(pairs):
        pair_id = f"{prefix}-{i:04d}"
        name1 = f"{pair_id}.view1.json"
        name2 = f"{pair_id}.view2.json"
        save_graph(g1, out_dir / name1)
        save_graph(g2, out_dir / name2)
        rows.append({"id": pair_id, "view1": name1, "view2": name2})
    manifest = out_dir / "pairs.jsonl"
    write_manifest(rows, manifest)
    return manifest


# -- embeddings: JSON {"embeddings": [[...], ...]} or headerless CSV,
# one node per row.


def load_embeddings(path: str | Path) -> np.ndarray:
    path = Path(path)
    if path.suffix.lower() == ".csv":
        with open(path, newline="") as handle:
            rows = [[float(cell) for cell in row] for row in csv.reader(handle) if row]
        if not rows:
            raise ValueError(f"no rows in {path}")
        return np.asarray(rows, dtype=float)
    with open(path) as handle:
        data = json.load(handle)
    if not isinstance(data, dict) or "embeddings" not in data:
        raise ValueError(f'{path} must be JSON with an "embeddings" key or a CSV file')
    return np.asarray(data["embeddings"], dtype=float)


# -- retrieval results: JSON lines {"query": id, "ranked": [[corpus_id, dist], ...], "truth": id}


def write_results(results: list[RetrievalResult], path: str | Path) -> None:
    lines = []
    for res in results:
        lines.append(
            _dumps(
                {
                    "query": res.query_id,
                    "ranked": [[cid, float(dist)] for cid, dist in res.ranked],
                    "truth": res.truth_id,
                }
            )
            + "\n"
        )
    atomic_write_text(path, "".join(lines))
