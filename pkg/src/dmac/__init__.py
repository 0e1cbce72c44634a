"""Keyed hashing from walks on the bipartite graphs D(n, Q)."""

from .errors import EntropyError, InputError, ParameterError
from .field import (
    FieldElement,
    OpCounter,
    PrimeModulus,
    counting,
    is_prime,
    next_prime_at_least,
    sample_uniform,
)
from .graph import (
    GraphParams,
    Vertex,
    VertexKind,
    all_neighbors,
    complete_line,
    complete_point,
    equation_shape,
    incident,
    neighbor,
)
from .mac import (
    Encoding,
    MacKey,
    MacParams,
    Padding,
    Tag,
    TagMode,
    Variant,
    WalkState,
    bytes_to_symbols,
    default_profile,
    dmac,
    dmac_bytes,
    dmac_directions,
    encode_block,
    extract_tag,
    girth_formula,
    keygen,
    split_pad,
    suggest_params,
    verify,
    verify_bytes,
    walk_step,
    walk_trace,
)

__version__ = "0.1.0"

__all__ = [
    "EntropyError",
    "InputError",
    "ParameterError",
    "FieldElement",
    "OpCounter",
    "PrimeModulus",
    "counting",
    "is_prime",
    "next_prime_at_least",
    "sample_uniform",
    "GraphParams",
    "Vertex",
    "VertexKind",
    "all_neighbors",
    "complete_line",
    "complete_point",
    "equation_shape",
    "incident",
    "neighbor",
    "Encoding",
    "MacKey",
    "MacParams",
    "Padding",
    "Tag",
    "TagMode",
    "Variant",
    "WalkState",
    "bytes_to_symbols",
    "default_profile",
    "dmac",
    "dmac_bytes",
    "dmac_directions",
    "encode_block",
    "extract_tag",
    "girth_formula",
    "keygen",
    "split_pad",
    "suggest_params",
    "verify",
    "verify_bytes",
    "walk_step",
    "walk_trace",
    "__version__",
]
