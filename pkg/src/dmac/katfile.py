"""Known-answer test records: parsing and execution.

A KAT file is a JSON array.  Each record is either a full MAC vector:

    {"name": ..., "type": "mac", "params": {...}, "key": {"iv": [...], "s": [...]},
     "message_hex" | "message_symbols" | "directions": ...,
     "intermediates": ["L:...", ...]   (optional, states after steps 0,1,..),
     "tag_hex" | "tag_bits": ...}

or a bare neighbor-operator vector:

    {"name": ..., "type": "neighbor", "n": ..., "q": ...,
     "vertex": "P:...", "direction": t, "coord_index": i, "expected": "L:..."}

``directions`` bypasses block splitting and encoding; it exists because
some historical vectors fix the numeric walk directions rather than a
well-formed symbol stream.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from .errors import InputError
from .field import PrimeModulus
from .files import key_from_dict, params_from_dict
from .graph import Vertex, neighbor
from .mac import Tag, bytes_to_symbols, extract_tag, walk_trace, _directions


@dataclass
class KatResult:
    name: str
    passed: bool
    details: list[str] = field(default_factory=list)


def load_kat_file(path: str | Path) -> list[dict]:
    try:
        records = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read KAT file {path}: {exc}") from exc
    if not isinstance(records, list):
        raise InputError("KAT file must contain a JSON array of records")
    return records


def _run_neighbor(record: dict) -> KatResult:
    name = record.get("name", "<unnamed>")
    modulus = PrimeModulus(int(record["q"]))
    w = Vertex.parse(record["vertex"], modulus)
    got = neighbor(w, int(record["direction"]), int(record["coord_index"]))
    want = Vertex.parse(record["expected"], modulus)
    if got == want:
        return KatResult(name, True)
    return KatResult(name, False, [f"neighbor mismatch: got {got.serialize()}, want {want.serialize()}"])


def _run_mac(record: dict) -> KatResult:
    name = record.get("name", "<unnamed>")
    params = params_from_dict(record["params"])
    if "allow_small_modulus" in record:
        params = params.with_overrides(allow_small_modulus=bool(record["allow_small_modulus"]))
    key = key_from_dict(record["key"], params)

    if "directions" in record:
        directions = [int(d) for d in record["directions"]]
    elif "message_symbols" in record:
        directions = _directions([int(s) for s in record["message_symbols"]], params)
    elif "message_hex" in record:
        data = bytes.fromhex(record["message_hex"])
        directions = _directions(bytes_to_symbols(data, params), params)
    else:
        raise InputError("mac record needs message_hex, message_symbols or directions")

    trace = walk_trace(directions, key, params)
    details: list[str] = []

    for i, serialized in enumerate(record.get("intermediates", [])):
        want = Vertex.parse(serialized, params.modulus)
        got = trace[i + 1].vertex
        if got != want:
            details.append(
                f"step i={i}: got {got.serialize()}, want {want.serialize()}"
            )

    tag = extract_tag(trace[-1], params)
    if "tag_hex" in record:
        want_tag = Tag.from_hex(record["tag_hex"], params.tag_bits)
    elif "tag_bits" in record:
        want_tag = Tag.from_bits(record["tag_bits"], params.tag_bits)
    else:
        raise InputError("mac record needs tag_hex or tag_bits")
    if tag != want_tag:
        details.append(f"tag mismatch: got {tag.to_bits()}, want {want_tag.to_bits()}")

    return KatResult(name, not details, details)


def run_record(record: dict) -> KatResult:
    kind = record.get("type", "mac")
    if kind == "neighbor":
        return _run_neighbor(record)
    if kind == "mac":
        return _run_mac(record)
    raise InputError(f"unknown KAT record type {kind!r}")


def run_kat_file(path: str | Path) -> list[KatResult]:
    results = []
    for index, record in enumerate(load_kat_file(path)):
        try:
            results.append(run_record(record))
        except (InputError, KeyError, TypeError, ValueError) as exc:
            raise InputError(f"malformed KAT record #{index}: {exc}") from exc
    return results
