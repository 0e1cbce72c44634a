"""On-disk formats: parameter files and key files (JSON).

Parameter files carry {q, lq, N, n, Q, h, variant, encoding, padding,
tagmode}; the redundant ``lq`` is checked against q on load.  Key files
carry {iv: [n ints], s: [s ints]} and are written with mode 0600; treat
them like any other secret material (no encryption at rest is provided).
"""

from __future__ import annotations

import json
import os
from pathlib import Path

from .errors import InputError
from .field import PrimeModulus
from .graph import Vertex, VertexKind
from .mac import Encoding, MacKey, MacParams, Padding, TagMode, Variant, symbol_bits_for

_PARAM_KEYS = {"q", "lq", "N", "n", "Q", "h", "variant", "encoding", "padding", "tagmode"}


def params_to_dict(params: MacParams) -> dict:
    return {
        "q": params.q,
        "lq": params.symbol_bits,
        "N": params.block_bits,
        "n": params.n,
        "Q": params.modulus.value,
        "h": params.tag_bits,
        "variant": params.variant.value,
        "encoding": params.encoding.value,
        "padding": params.padding.value,
        "tagmode": params.tag_mode.value,
    }


def params_from_dict(data: dict) -> MacParams:
    missing = _PARAM_KEYS - set(data)
    if missing:
        raise InputError(f"parameter file missing fields: {sorted(missing)}")
    try:
        variant = Variant(data["variant"])
        encoding = Encoding(data["encoding"])
        padding = Padding(data["padding"])
        tag_mode = TagMode(data["tagmode"])
    except ValueError as exc:
        raise InputError(f"bad enum value in parameter file: {exc}") from exc
    q = int(data["q"])
    if int(data["lq"]) != symbol_bits_for(q):
        raise InputError(
            f"lq={data['lq']} inconsistent with q={q} (expected {symbol_bits_for(q)})"
        )
    return MacParams(
        q=q,
        block_bits=int(data["N"]),
        n=int(data["n"]),
        modulus=PrimeModulus(int(data["Q"])),
        tag_bits=int(data["h"]),
        variant=variant,
        encoding=encoding,
        padding=padding,
        tag_mode=tag_mode,
    )


def load_params(path: str | Path) -> MacParams:
    try:
        data = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read parameter file {path}: {exc}") from exc
    return params_from_dict(data)


def save_params(params: MacParams, path: str | Path) -> None:
    Path(path).write_text(json.dumps(params_to_dict(params), indent=2) + "\n")


def key_to_dict(key: MacKey) -> dict:
    return {"iv": list(key.iv.coords), "s": list(key.password)}


def key_from_dict(data: dict, params: MacParams) -> MacKey:
    if "iv" not in data or "s" not in data:
        raise InputError("key file must carry fields 'iv' and 's'")
    coords = tuple(int(c) for c in data["iv"])
    # coordinates >= Q are rejected here, never silently reduced
    iv = Vertex(VertexKind.POINT, coords, params.modulus)
    return MacKey(iv, tuple(int(s) for s in data["s"]))


def load_key(path: str | Path, params: MacParams) -> MacKey:
    try:
        data = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read key file {path}: {exc}") from exc
    return key_from_dict(data, params)


def save_key(key: MacKey, path: str | Path) -> None:
    path = Path(path)
    path.write_text(json.dumps(key_to_dict(key)) + "\n")
    os.chmod(path, 0o600)
