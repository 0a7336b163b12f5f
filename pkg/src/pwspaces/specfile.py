"""Space-specification documents (JSON) and vector files.

Spec files are plain JSON with exact rationals written as "num/den"
strings and INFINITE sizes/counts written as "inf".  Unknown fields are
rejected with the offending location.  Serialization is canonical
(normalized spec, sorted keys), so parse -> normalize -> serialize ->
parse is the identity on normalized specs.

Vector files list one "block offset value" triple per line; '#' starts a
comment.  Addresses are relative to the spec's reference pair (the first
non-trivial pair).
"""

from __future__ import annotations

import hashlib
import json
from fractions import Fraction
from pathlib import Path

from .errors import SpecValidationError
from .partitions import BLOCKS, DISCRETE, INDISCRETE, SUBDIVISION, PartitionScheme
from .rationals import INFINITE, format_rational, is_infinite, parse_rational
from .spaces import BlockWeights, PartitionWeightPair, SparseVector, SpaceSpec
from .weights import CONSTANT, EXPLICIT, GEOMETRIC, INTERLEAVED, POWER, WeightFamily


def _require_keys(d: dict, allowed: set[str], required: set[str], loc: str) -> None:
    if not isinstance(d, dict):
        raise SpecValidationError("expected an object", loc)
    for key in d:
        if key not in allowed:
            raise SpecValidationError(f"unknown field {key!r}", f"{loc}.{key}" if loc else key)
    for key in required:
        if key not in d:
            raise SpecValidationError(f"missing field {key!r}", loc)


def _parse_extent(value, loc: str):
    if value == "inf" or (isinstance(value, float) and is_infinite(value)):
        return INFINITE
    if isinstance(value, bool) or not isinstance(value, int):
        raise SpecValidationError(
            f"expected a positive integer or \"inf\", got {value!r}", loc
        )
    return value


def _extent_json(value):
    return "inf" if is_infinite(value) else int(value)


# ---------------------------------------------------------------------------
# Weight families
# ---------------------------------------------------------------------------

def parse_family(d, loc: str) -> WeightFamily:
    if not isinstance(d, dict) or "kind" not in d:
        raise SpecValidationError("expected a weight family object with a 'kind'", loc)
    kind = d["kind"]
    if kind == CONSTANT:
        _require_keys(d, {"kind", "c"}, {"c"}, loc)
        return WeightFamily.constant(parse_rational(d["c"], f"{loc}.c"))
    if kind == GEOMETRIC:
        _require_keys(d, {"kind", "c", "r"}, {"c", "r"}, loc)
        return WeightFamily.geometric(
            parse_rational(d["c"], f"{loc}.c"), parse_rational(d["r"], f"{loc}.r")
        )
    if kind == POWER:
        _require_keys(d, {"kind", "c", "alpha"}, {"c", "alpha"}, loc)
        return WeightFamily.power(
            parse_rational(d["c"], f"{loc}.c"),
            parse_rational(d["alpha"], f"{loc}.alpha"),
        )
    if kind == EXPLICIT:
        _require_keys(d, {"kind", "values", "tail"}, {"values", "tail"}, loc)
        if not isinstance(d["values"], list):
            raise SpecValidationError("expected a list", f"{loc}.values")
        values = [
            parse_rational(v, f"{loc}.values[{i}]") for i, v in enumerate(d["values"])
        ]
        return WeightFamily.explicit_then_tail(
            values, parse_family(d["tail"], f"{loc}.tail")
        )
    if kind == INTERLEAVED:
        _require_keys(d, {"kind", "odd", "even"}, {"odd", "even"}, loc)
        return WeightFamily.interleaved(
            parse_family(d["odd"], f"{loc}.odd"),
            parse_family(d["even"], f"{loc}.even"),
        )
    raise SpecValidationError(f"unknown weight kind {kind!r}", f"{loc}.kind")


def family_to_dict(f: WeightFamily) -> dict:
    if f.kind == CONSTANT:
        return {"kind": CONSTANT, "c": format_rational(f.c)}
    if f.kind == GEOMETRIC:
        return {"kind": GEOMETRIC, "c": format_rational(f.c), "r": format_rational(f.r)}
    if f.kind == POWER:
        return {
            "kind": POWER,
            "c": format_rational(f.c),
            "alpha": format_rational(f.alpha),
        }
    if f.kind == EXPLICIT:
        return {
            "kind": EXPLICIT,
            "values": [format_rational(v) for v in f.values],
            "tail": family_to_dict(f.tail),
        }
    if f.kind == INTERLEAVED:
        return {
            "kind": INTERLEAVED,
            "odd": family_to_dict(f.odd),
            "even": family_to_dict(f.even),
        }
    raise SpecValidationError(f"unserializable weight kind {f.kind!r}")


# ---------------------------------------------------------------------------
# Partitions
# ---------------------------------------------------------------------------

def parse_partition(d, loc: str) -> PartitionScheme:
    if not isinstance(d, dict) or "kind" not in d:
        raise SpecValidationError("expected a partition object with a 'kind'", loc)
    kind = d["kind"]
    if kind == DISCRETE:
        _require_keys(d, {"kind"}, set(), loc)
        return PartitionScheme.discrete()
    if kind == INDISCRETE:
        _require_keys(d, {"kind"}, set(), loc)
        return PartitionScheme.indiscrete()
    if kind == BLOCKS:
        _require_keys(d, {"kind", "blocks"}, {"blocks"}, loc)
        if not isinstance(d["blocks"], list) or not d["blocks"]:
            raise SpecValidationError("expected a nonempty list", f"{loc}.blocks")
        groups = []
        for i, g in enumerate(d["blocks"]):
            gloc = f"{loc}.blocks[{i}]"
            _require_keys(g, {"size", "count"}, {"size", "count"}, gloc)
            groups.append(
                (
                    _parse_extent(g["size"], f"{gloc}.size"),
                    _parse_extent(g["count"], f"{gloc}.count"),
                )
            )
        return PartitionScheme.blocks(groups)
    if kind == SUBDIVISION:
        _require_keys(d, {"kind", "parent", "chunk"}, {"parent", "chunk"}, loc)
        chunk = d["chunk"]
        if isinstance(chunk, bool) or not isinstance(chunk, int):
            raise SpecValidationError("chunk must be an integer", f"{loc}.chunk")
        return PartitionScheme.subdivide(
            parse_partition(d["parent"], f"{loc}.parent"), chunk
        )
    raise SpecValidationError(f"unknown partition kind {kind!r}", f"{loc}.kind")


def partition_to_dict(s: PartitionScheme) -> dict:
    if s.kind == DISCRETE:
        return {"kind": DISCRETE}
    if s.kind == INDISCRETE:
        return {"kind": INDISCRETE}
    if s.kind == BLOCKS:
        return {
            "kind": BLOCKS,
            "blocks": [
                {"size": _extent_json(g.size), "count": _extent_json(g.count)}
                for g in s.groups
            ],
        }
    if s.kind == SUBDIVISION:
        return {
            "kind": SUBDIVISION,
            "parent": partition_to_dict(s.parent),
            "chunk": s.chunk,
        }
    raise SpecValidationError(f"unserializable partition kind {s.kind!r}")


# ---------------------------------------------------------------------------
# Pairs and whole documents
# ---------------------------------------------------------------------------

def parse_pair(d, loc: str) -> PartitionWeightPair:
    _require_keys(d, {"partition", "weights"}, {"partition", "weights"}, loc)
    scheme = parse_partition(d["partition"], f"{loc}.partition")
    w = d["weights"]
    wloc = f"{loc}.weights"
    if isinstance(w, dict) and "kind" in w:
        weights = BlockWeights(template=parse_family(w, wloc))
    else:
        _require_keys(w, {"template", "head", "scale"}, {"template"}, wloc)
        head = tuple(
            parse_family(h, f"{wloc}.head[{i}]") for i, h in enumerate(w.get("head", []))
        )
        scale = (
            parse_family(w["scale"], f"{wloc}.scale") if "scale" in w and w["scale"] is not None else None
        )
        weights = BlockWeights(
            template=parse_family(w["template"], f"{wloc}.template"),
            head=head,
            scale=scale,
        )
    return PartitionWeightPair(scheme, weights)


def pair_to_dict(pair: PartitionWeightPair) -> dict:
    w = pair.weights
    if w.is_uniform:
        weights = family_to_dict(w.template)
    else:
        weights = {"template": family_to_dict(w.template)}
        if w.head:
            weights["head"] = [family_to_dict(h) for h in w.head]
        if w.scale is not None:
            weights["scale"] = family_to_dict(w.scale)
    return {"partition": partition_to_dict(pair.scheme), "weights": weights}


def parse_spec_dict(d: dict) -> tuple[SpaceSpec, str | None]:
    """(spec, expected_class) from a document dict."""
    _require_keys(d, {"name", "expected_class", "p", "pairs"}, {"p", "pairs"}, "")
    p = parse_rational(d["p"], "p")
    if not isinstance(d["pairs"], list):
        raise SpecValidationError("expected a list", "pairs")
    pairs = [parse_pair(pd, f"pairs[{i}]") for i, pd in enumerate(d["pairs"])]
    name = d.get("name")
    spec = SpaceSpec.create(p, pairs, name=name)
    return spec, d.get("expected_class")


def spec_to_dict(spec: SpaceSpec, expected_class: str | None = None) -> dict:
    spec = spec.normalized()
    out: dict = {}
    if spec.name is not None:
        out["name"] = spec.name
    if expected_class is not None:
        out["expected_class"] = expected_class
    out["p"] = format_rational(spec.p)
    out["pairs"] = [pair_to_dict(pair) for pair in spec.pairs]
    return out


def canonical_json(spec: SpaceSpec, expected_class: str | None = None) -> str:
    return json.dumps(spec_to_dict(spec, expected_class), sort_keys=True)


def spec_digest(spec: SpaceSpec) -> str:
    payload = json.dumps(spec_to_dict(spec), sort_keys=True).encode()
    return hashlib.sha256(payload).hexdigest()[:12]


def load_spec_file(path) -> tuple[SpaceSpec, str | None]:
    text = Path(path).read_text(encoding="utf-8")
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SpecValidationError(f"not valid JSON: {exc}", str(path)) from exc
    return parse_spec_dict(data)


def save_spec_file(path, spec: SpaceSpec, expected_class: str | None = None) -> None:
    Path(path).write_text(
        json.dumps(spec_to_dict(spec, expected_class), indent=2, sort_keys=True) + "\n",
        encoding="utf-8",
    )


# ---------------------------------------------------------------------------
# Vector files
# ---------------------------------------------------------------------------

def parse_vector_text(text: str, spec: SpaceSpec, exact: bool = False) -> SparseVector:
    scheme = spec.reference_pair.scheme
    entries = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 3:
            raise SpecValidationError(
                f"expected 'block offset value', got {raw!r}", f"line {lineno}"
            )
        try:
            block, offset = int(parts[0]), int(parts[1])
        except ValueError as exc:
            raise SpecValidationError(
                f"block and offset must be integers in {raw!r}", f"line {lineno}"
            ) from exc
        if exact or "/" in parts[2]:
            value = Fraction(parts[2])
        else:
            value = float(parts[2])
        if (block, offset) in entries:
            raise SpecValidationError(
                f"duplicate address ({block}, {offset})", f"line {lineno}"
            )
        entries[(block, offset)] = value
    return SparseVector.from_entries(scheme, entries)


def load_vector_file(path, spec: SpaceSpec, exact: bool = False) -> SparseVector:
    return parse_vector_text(Path(path).read_text(encoding="utf-8"), spec, exact)


# ---------------------------------------------------------------------------
# Bundled fixture corpus
# ---------------------------------------------------------------------------

def _fixture_root():
    from importlib.resources import files

    return files("pwspaces.fixtures")


def fixture_names() -> list[str]:
    return sorted(
        res.name[: -len(".json")]
        for res in _fixture_root().iterdir()
        if res.name.endswith(".json")
    )


def load_fixture(name: str) -> tuple[SpaceSpec, str | None]:
    res = _fixture_root() / f"{name}.json"
    try:
        text = res.read_text(encoding="utf-8")
    except FileNotFoundError as exc:
        raise SpecValidationError(f"no bundled fixture named {name!r}") from exc
    return parse_spec_dict(json.loads(text))


def fixture_vector_names() -> list[str]:
    return sorted(
        res.name[: -len(".vec")]
        for res in _fixture_root().iterdir()
        if res.name.endswith(".vec")
    )


def load_fixture_vector(name: str, spec: SpaceSpec, exact: bool = False) -> SparseVector:
    res = _fixture_root() / f"{name}.vec"
    return parse_vector_text(res.read_text(encoding="utf-8"), spec, exact)
