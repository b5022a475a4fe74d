"""Network file formats, plot-data tables, and hashed report bundles."""

from __future__ import annotations

import csv
import hashlib
import io
import json
import os
import shutil
import tempfile
import xml.etree.ElementTree as ET
from contextlib import contextmanager
from pathlib import Path

from . import __version__
from .cooccurrence import TopicNetwork

MANIFEST = "manifest.json"
GRAPHML_NS = "http://graphml.graphdrawing.org/xmlns"


def fmt(x: float) -> str:
    """Lossless float text for machine-readable files."""
    return format(float(x), ".17g")


def fmt2(x: float) -> str:
    return f"{x:.2f}"


def csv_text(header, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def network_paths(prefix: str | Path) -> tuple[Path, Path]:
    prefix = str(prefix)
    for suffix in (".edges.csv", ".nodes.csv", ".graphml"):
        if prefix.endswith(suffix):
            prefix = prefix[: -len(suffix)]
    return Path(prefix + ".edges.csv"), Path(prefix + ".nodes.csv")


def _kept_edges(net: TopicNetwork, threshold: float | None):
    for (a, b), w in net.sorted_edges():
        if threshold is None or w >= threshold:
            yield a, b, w


def edge_csv(net: TopicNetwork, threshold: float | None = None) -> str:
    return csv_text(["source", "target", "weight"], ((a, b, fmt(w)) for a, b, w in _kept_edges(net, threshold)))


def node_csv(net: TopicNetwork) -> str:
    return csv_text(
        ["code", "label", "c_ii"],
        ((n, net.label_of(n), net.diag.get(n, "")) for n in net.nodes),
    )


def graphml(net: TopicNetwork, threshold: float | None = None) -> str:
    root = ET.Element("graphml", xmlns=GRAPHML_NS)
    for key_id, target, name, typ in (
        ("d0", "node", "label", "string"),
        ("d1", "node", "c_ii", "long"),
        ("d2", "edge", "weight", "double"),
    ):
        ET.SubElement(root, "key", {"id": key_id, "for": target, "attr.name": name, "attr.type": typ})
    graph = ET.SubElement(root, "graph", id=net.label, edgedefault="undirected")
    for n in net.nodes:
        node = ET.SubElement(graph, "node", id=n)
        ET.SubElement(node, "data", key="d0").text = net.label_of(n)
        if n in net.diag:
            ET.SubElement(node, "data", key="d1").text = str(net.diag[n])
    for a, b, w in _kept_edges(net, threshold):
        edge = ET.SubElement(graph, "edge", source=a, target=b)
        ET.SubElement(edge, "data", key="d2").text = fmt(w)
    ET.indent(root)
    return '<?xml version="1.0" encoding="UTF-8"?>\n' + ET.tostring(root, encoding="unicode") + "\n"


def export_network(
    net: TopicNetwork,
    path: str | Path,
    format: str = "edge-csv",
    threshold: float | None = None,
) -> list[Path]:
    """Write a network; edges with w < threshold are omitted, nodes never are.

    ``edge-csv`` writes ``<prefix>.edges.csv`` and ``<prefix>.nodes.csv``;
    ``graphml`` writes a single file at ``path``.
    """
    if format == "edge-csv":
        edges_path, nodes_path = network_paths(path)
        edges_path.write_text(edge_csv(net, threshold), encoding="utf-8")
        nodes_path.write_text(node_csv(net), encoding="utf-8")
        return [edges_path, nodes_path]
    if format == "graphml":
        path = Path(path)
        path.write_text(graphml(net, threshold), encoding="utf-8")
        return [path]
    raise ValueError(f"unknown network format {format!r}")


def read_network(path: str | Path, **provenance) -> TopicNetwork:
    """Load a network from GraphML or from an edge/node CSV pair."""
    path = Path(path)
    if path.suffix == ".graphml":
        return _read_graphml(path, provenance)
    edges_path, nodes_path = network_paths(path)
    nodes, diag, labels = [], {}, {}
    with open(nodes_path, encoding="utf-8", newline="") as fh:
        for row in csv.DictReader(fh):
            nodes.append(row["code"])
            if row.get("label") and row["label"] != row["code"]:
                labels[row["code"]] = row["label"]
            if row.get("c_ii"):
                diag[row["code"]] = int(row["c_ii"])
    edges = {}
    with open(edges_path, encoding="utf-8", newline="") as fh:
        for row in csv.DictReader(fh):
            a, b = sorted((row["source"], row["target"]))
            edges[(a, b)] = float(row["weight"])
    provenance.setdefault("label", edges_path.name[: -len(".edges.csv")])
    return TopicNetwork(tuple(nodes), edges, diag, provenance, labels)


def _read_graphml(path: Path, provenance: dict) -> TopicNetwork:
    ns = {"g": GRAPHML_NS}
    root = ET.parse(path).getroot()
    keys = {k.get("id"): k.get("attr.name") for k in root.findall("g:key", ns)}
    graph = root.find("g:graph", ns)
    nodes, diag, edges, labels = [], {}, {}, {}
    for node in graph.findall("g:node", ns):
        nid = node.get("id")
        nodes.append(nid)
        for data in node.findall("g:data", ns):
            attr = keys.get(data.get("key"))
            if attr == "c_ii":
                diag[nid] = int(data.text)
            elif attr == "label" and data.text and data.text != nid:
                labels[nid] = data.text
    for edge in graph.findall("g:edge", ns):
        a, b = sorted((edge.get("source"), edge.get("target")))
        for data in edge.findall("g:data", ns):
            if keys.get(data.get("key")) == "weight":
                edges[(a, b)] = float(data.text)
    provenance.setdefault("label", graph.get("id"))
    return TopicNetwork(tuple(nodes), edges, diag, provenance, labels)


def dumps_json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, ensure_ascii=False, allow_nan=False) + "\n"


def sha256_file(path: str | Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()


class BundleWriter:
    """Collects artifacts in a staging directory, then publishes them into
    ``out_dir`` together with a refreshed manifest.

    Manifest entries for files written earlier into the same directory are kept,
    so running pipeline stages one after another builds up the same bundle a
    single full run produces.
    """

    def __init__(self, out_dir: str | Path):
        self.out_dir = Path(out_dir)
        self.staging: Path | None = None
        self.kinds: dict[str, str] = {}

    def path(self, name: str, kind: str) -> Path:
        self.kinds[name] = kind
        return self.staging / name

    def write_text(self, name: str, text: str, kind: str) -> Path:
        p = self.path(name, kind)
        p.write_text(text, encoding="utf-8")
        return p

    def write_json(self, name: str, obj, kind: str) -> Path:
        return self.write_text(name, dumps_json(obj), kind)


def read_manifest(out_dir: str | Path) -> dict | None:
    path = Path(out_dir) / MANIFEST
    if not path.exists():
        return None
    return json.loads(path.read_text(encoding="utf-8"))


@contextmanager
def report_bundle(out_dir: str | Path, inputs: dict, seed: int | None):
    """Context manager yielding a BundleWriter.

    On success the staged files are moved into ``out_dir`` and the manifest
    (artifact hashes, merged input provenance, seed, tool version) is
    rewritten. On failure the staging directory is removed and nothing in
    ``out_dir`` changes.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    writer = BundleWriter(out_dir)
    writer.staging = Path(tempfile.mkdtemp(prefix=".staging-", dir=out_dir))
    try:
        yield writer
        previous = read_manifest(out_dir) or {}
        artifacts = {a["path"]: a for a in previous.get("artifacts", [])}
        for name, kind in writer.kinds.items():
            staged = writer.staging / name
            target = out_dir / name
            target.parent.mkdir(parents=True, exist_ok=True)
            os.replace(staged, target)
            artifacts[name] = {"path": name, "sha256": sha256_file(target), "kind": kind}
        merged_inputs = dict(previous.get("inputs", {}))
        merged_inputs.update({k: v for k, v in inputs.items() if v is not None})
        manifest = {
            "artifacts": [artifacts[k] for k in sorted(artifacts)],
            "inputs": merged_inputs,
            "seed": seed if seed is not None else previous.get("seed"),
            "version": __version__,
        }
        tmp = out_dir / (MANIFEST + ".tmp")
        tmp.write_text(dumps_json(manifest), encoding="utf-8")
        os.replace(tmp, out_dir / MANIFEST)
    finally:
        shutil.rmtree(writer.staging, ignore_errors=True)


def verify_bundle(out_dir: str | Path) -> list[str]:
    """Return a list of problems (missing or modified artifacts); empty if intact."""
    manifest = read_manifest(out_dir)
    if manifest is None:
        return [f"no {MANIFEST} in {out_dir}"]
    problems = []
    for art in manifest["artifacts"]:
        path = Path(out_dir) / art["path"]
        if not path.exists():
            problems.append(f"missing: {art['path']}")
        elif sha256_file(path) != art["sha256"]:
            problems.append(f"hash mismatch: {art['path']}")
    return problems
