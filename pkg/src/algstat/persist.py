"""JSON serialization and a file-backed queryable collection.

Every object is stored in an envelope::

    {"_ns": {"algstat": "0.1.0"}, "_type": "Graph", "data": {...},
     "refs": {"ring-abc...": {...}}}

Refs hold shared subobjects (rings).  Output is canonical: sorted keys,
two-space indent, LF line endings, rationals as "num//den" strings and
polynomials as canonical text, so saving is byte-stable and
load(save(x)) == x structurally.

A Collection is a directory with one document per object and a manifest
listing document ids; find() matches dotted paths against raw envelope
fields and yields the decoded objects in id order.
"""

from __future__ import annotations

import json
import logging
import os
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Iterator, Optional

from filelock import FileLock
from gmpy2 import mpq

from .ci import GaussianRing
from .errors import ParseError, SchemaMismatch, UnknownType
from .exactnum import IntMatrix, rat_from_str, rat_to_str, smith_normal_form
from .gaussmodels import GaussianModel
from .graphcore import Graph, Labeling, PhyloNetwork, phylo_validate
from .groebner import Ideal
from .implicit import GradedKernelResult, GradingGroup
from .phylomodels import GroupStructure, PhyloModel
from .polyring import MultiPoly, PolyRing, RingMap, parse_poly, ring_new

log = logging.getLogger(__name__)

NAMESPACE = "algstat"
VERSION = "0.1.0"


def _envelope(type_name: str, data: dict, refs: Optional[dict] = None) -> dict:
    env = {"_ns": {NAMESPACE: VERSION}, "_type": type_name, "data": data}
    if refs:
        env["refs"] = refs
    return env


def _ring_ref(ring: PolyRing, refs: dict) -> str:
    rid = ring.id
    if rid not in refs:
        refs[rid] = _envelope("PolyRing", {"variables": list(ring.variables)})
    return rid


# -- encoders


def _encode(obj, refs: dict) -> dict:
    if isinstance(obj, Graph):
        return _envelope(
            "Graph",
            {
                "kind": obj.kind,
                "n_vertices": obj.n,
                "edges": [list(e) for e in obj.edges],
            },
        )
    if isinstance(obj, PhyloNetwork):
        return _envelope("PhyloNetwork", {"graph": _encode(obj.graph, refs)})
    if isinstance(obj, PolyRing):
        return _envelope("PolyRing", {"variables": list(obj.variables)})
    if isinstance(obj, MultiPoly):
        return _envelope(
            "MultiPoly", {"ring": _ring_ref(obj.ring, refs), "text": str(obj)}
        )
    if isinstance(obj, Ideal):
        data = {
            "ring": _ring_ref(obj.ring, refs),
            "gens": [str(g) for g in obj.gens],
        }
        if obj.degree_bound is not None:
            data["degree_bound"] = obj.degree_bound
        return _envelope("Ideal", data)
    if isinstance(obj, RingMap):
        data = {
            "source": _ring_ref(obj.source, refs),
            "target": _ring_ref(obj.target, refs),
            "images": [str(f) for f in obj.images],
            "denominator": str(obj.denominator) if obj.denominator is not None else None,
        }
        return _envelope("RingMap", data)
    if isinstance(obj, GaussianModel):
        data = {
            "graph": _encode(obj.graph, refs),
            "labeling": _encode_labeling(obj.labeling),
        }
        return _envelope("GaussianModel", data)
    if isinstance(obj, PhyloModel):
        data = {
            "model_type": obj.model_type,
            "graph": _encode(obj.network.graph, refs),
            "template": [list(row) for row in obj.template],
            "fourier_template": list(obj.group.fourier_template) if obj.group else None,
            "root_distribution": (
                [rat_to_str(x) for x in obj.root_distribution]
                if obj.root_distribution is not None
                else None
            ),
            "n_leaves": len(obj.network.leaves),
        }
        return _envelope("PhyloModel", data)
    if isinstance(obj, GradedKernelResult):
        ring = None
        comps = []
        for b in sorted(obj.components):
            gens = obj.components[b]
            if gens and ring is None:
                ring = gens[0].ring
            comps.append(
                {"degree": list(b), "gens": [str(g) for g in gens]}
            )
        data = {
            "ambient_rank": obj.grading.ambient_rank,
            "relation_lattice": [list(r) for r in obj.grading.relation_lattice.entries],
            "degrees": {k: list(v) for k, v in sorted(obj.degrees.items())},
            "components": comps,
            "max_total_degree": obj.max_total_degree,
            "new_by_degree": {str(k): v for k, v in sorted(obj.new_by_degree.items())},
            "zero_image_vars": list(obj.zero_image_vars),
            "ring": _ring_ref(ring, refs) if ring is not None else None,
        }
        return _envelope("GradedKernelResult", data)
    raise UnknownType(f"cannot serialize {type(obj).__name__}")


def _encode_labeling(lab: Optional[Labeling]):
    if lab is None:
        return None
    return {
        "name": lab.name,
        "vertex_labels": [[v, s] for v, s in lab.vertex_labels],
        "edge_labels": [[list(e), s] for e, s in lab.edge_labels],
    }


# -- decoders


def _need(data: dict, key: str):
    try:
        return data[key]
    except (KeyError, TypeError):
        raise SchemaMismatch(f"missing field {key!r}")


def _decode_ring(rid: str, refs: dict) -> PolyRing:
    env = _need(refs, rid)
    if env.get("_type") != "PolyRing":
        raise SchemaMismatch(f"ref {rid!r} is not a PolyRing")
    return ring_new(_need(_need(env, "data"), "variables"))


def _decode(env: dict, refs: Optional[dict] = None):
    if not isinstance(env, dict) or "_type" not in env:
        raise SchemaMismatch("not an envelope")
    refs = {**(refs or {}), **env.get("refs", {})}
    t = env["_type"]
    data = _need(env, "data")
    if t == "Graph":
        return Graph(
            _need(data, "kind"),
            _need(data, "n_vertices"),
            tuple(tuple(e) for e in _need(data, "edges")),
        )
    if t == "PhyloNetwork":
        return phylo_validate(_decode(_need(data, "graph"), refs))
    if t == "PolyRing":
        return ring_new(_need(data, "variables"))
    if t == "MultiPoly":
        ring = _decode_ring(_need(data, "ring"), refs)
        return parse_poly(ring, _need(data, "text"))
    if t == "Ideal":
        ring = _decode_ring(_need(data, "ring"), refs)
        gens = [parse_poly(ring, s) for s in _need(data, "gens")]
        return Ideal(ring, gens, degree_bound=data.get("degree_bound"))
    if t == "RingMap":
        source = _decode_ring(_need(data, "source"), refs)
        target = _decode_ring(_need(data, "target"), refs)
        images = tuple(parse_poly(target, s) for s in _need(data, "images"))
        den = data.get("denominator")
        return RingMap(
            source,
            target,
            images,
            parse_poly(target, den) if den is not None else None,
        )
    if t == "GaussianModel":
        graph = _decode(_need(data, "graph"), refs)
        lab = data.get("labeling")
        labeling = None
        if lab is not None:
            labeling = Labeling(
                _need(lab, "name"),
                tuple((v, s) for v, s in _need(lab, "vertex_labels")),
                tuple((tuple(e), s) for e, s in _need(lab, "edge_labels")),
            )
        return GaussianModel(graph, labeling)
    if t == "PhyloModel":
        graph = _decode(_need(data, "graph"), refs)
        network = phylo_validate(graph)
        four = data.get("fourier_template")
        root = data.get("root_distribution")
        return PhyloModel(
            network,
            _need(data, "template"),
            group=GroupStructure(tuple(four)) if four is not None else None,
            root_distribution=(
                tuple(rat_from_str(x) for x in root) if root is not None else None
            ),
            model_type=_need(data, "model_type"),
        )
    if t == "GradedKernelResult":
        m = _need(data, "ambient_rank")
        rows = _need(data, "relation_lattice")
        if rows:
            R = IntMatrix.from_rows(rows)
            snf = smith_normal_form(R)
            diag = snf.diagonal()
            torsion_idx = tuple(i for i in range(snf.rank) if diag[i] > 1)
            grading = GradingGroup(
                m,
                R,
                snf,
                tuple(diag[i] for i in torsion_idx),
                tuple(range(snf.rank, m)),
                torsion_idx,
            )
        else:
            grading = GradingGroup(m, IntMatrix(0, m, ()), None, (), tuple(range(m)), ())
        rid = data.get("ring")
        ring = _decode_ring(rid, refs) if rid is not None else None
        components = {}
        for entry in _need(data, "components"):
            b = tuple(_need(entry, "degree"))
            components[b] = [parse_poly(ring, s) for s in _need(entry, "gens")]
        return GradedKernelResult(
            grading=grading,
            degrees={k: tuple(v) for k, v in _need(data, "degrees").items()},
            components=components,
            max_total_degree=_need(data, "max_total_degree"),
            new_by_degree={int(k): v for k, v in _need(data, "new_by_degree").items()},
            zero_image_vars=tuple(data.get("zero_image_vars", ())),
        )
    raise UnknownType(f"unknown _type {t!r}")


# -- public API


def save_string(obj) -> str:
    refs: dict = {}
    env = _encode(obj, refs)
    if refs:
        env["refs"] = refs
    return json.dumps(env, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def load_string(text: str):
    try:
        env = json.loads(text)
    except json.JSONDecodeError as e:
        raise ParseError(f"invalid JSON: {e}") from None
    return _decode(env)


def save(path, obj) -> None:
    Path(path).write_text(save_string(obj), encoding="utf-8", newline="\n")


def load(path):
    return load_string(Path(path).read_text(encoding="utf-8"))


@dataclass
class Collection:
    """Directory of envelope documents plus a manifest of ids."""

    path: Path

    def __init__(self, path):
        self.path = Path(path)

    @property
    def _manifest_path(self) -> Path:
        return self.path / "manifest.json"

    @property
    def _lock(self) -> FileLock:
        return FileLock(str(self.path / ".lock"))

    def ids(self) -> list:
        if not self._manifest_path.exists():
            return []
        manifest = json.loads(self._manifest_path.read_text(encoding="utf-8"))
        return sorted(manifest.get("documents", []))

    def insert(self, doc_id: str, obj) -> None:
        self.path.mkdir(parents=True, exist_ok=True)
        with self._lock:
            save(self.path / f"{doc_id}.json", obj)
            ids = set(self.ids())
            ids.add(doc_id)
            self._manifest_path.write_text(
                json.dumps({"documents": sorted(ids)}, indent=2) + "\n",
                encoding="utf-8",
                newline="\n",
            )

    def raw_document(self, doc_id: str) -> dict:
        return json.loads((self.path / f"{doc_id}.json").read_text(encoding="utf-8"))

    def get(self, doc_id: str):
        return load(self.path / f"{doc_id}.json")


def _dotted(env: dict, path: str):
    node = env
    for part in path.split("."):
        if not isinstance(node, dict) or part not in node:
            return None
        node = node[part]
    return node


def find(collection: Collection, query: dict) -> Iterator:
    """Documents whose envelope fields equal the query values, by id.

    Corrupt documents are skipped with a warning.
    """
    for doc_id in collection.ids():
        try:
            env = collection.raw_document(doc_id)
        except (OSError, json.JSONDecodeError) as e:
            log.warning("skipping corrupt document %s: %s", doc_id, e)
            continue
        if all(_dotted(env, k) == v for k, v in query.items()):
            try:
                yield _decode(env)
            except (UnknownType, SchemaMismatch, ParseError) as e:
                log.warning("skipping undecodable document %s: %s", doc_id, e)
