"""The DMAC-1 and DMAC-2 keyed hash functions.

A message is split into blocks, each block is encoded into an integer, and
the sequence of integers steers a walk on the bipartite graph D(n, Q): step
i moves to the neighbor selected by squaring ``(v[i mod n + 1] + M_i)``.
After the message, the secret password symbols steer further steps.  DMAC-2
additionally adds the previous vertex to the new one (coordinatewise mod Q)
after every step, which lets the walk leave a connected component.  The tag
is read off the final vector: each coordinate reduced (mod q or mod
2^l(q)), serialized as l(q) bits, concatenated, truncated to h bits.

The security story leans on the graph's girth: walks shorter than half the
shortest cycle cannot rejoin, so short distinct messages collide only
through the squaring step's mirror pairs (t and -2v-t), which stay hidden
behind the secret initial vertex.
"""

from __future__ import annotations

import hmac
import secrets
from dataclasses import dataclass, replace
from enum import Enum
from functools import lru_cache
from typing import Callable, Sequence, Union

from .errors import InputError, ParameterError
from .field import (
    PrimeModulus,
    active_counter,
    next_prime_at_least,
    sample_uniform,
)
from .graph import Vertex, VertexKind, neighbor


class Variant(Enum):
    DMAC1 = "dmac1"
    DMAC2 = "dmac2"


class Encoding(Enum):
    # Positional is injective and always produces directions < 2^N <= Q.
    # DecimalConcat glues base-10 digit strings; it is not injective
    # ((1,28) and (12,8) both read "128") and can exceed Q, but it is the
    # classic formulation and the toy test vectors depend on it.
    POSITIONAL = "positional"
    DECIMAL_CONCAT = "decimal-concat"


class Padding(Enum):
    # ZERO_FILL alone lets "m" and "m || 0-pad" collide; ZERO_FILL_LENGTH
    # appends one extra block carrying the original symbol count mod Q.
    ZERO_FILL = "zero"
    ZERO_FILL_LENGTH = "zero-length"


class TagMode(Enum):
    MOD_Q = "modq"
    MOD_POW2 = "modpow2"


def girth_formula(n: int) -> int:
    """Shortest-cycle floor of D(n, q): n+5 for odd n, n+4 for even n."""
    if n < 2:
        raise ParameterError(f"graph dimension must be >= 2, got {n}")
    return n + 5 if n % 2 else n + 4


def symbol_bits_for(q: int) -> int:
    """Bits needed per alphabet symbol: ceil(log2 q)."""
    if q < 2:
        raise ParameterError(f"alphabet size must be >= 2, got {q}")
    return (q - 1).bit_length()


@dataclass(frozen=True)
class MacParams:
    """Full parameter profile of a DMAC instance.

    ``allow_small_modulus`` drops the ``Q >= 2^N`` requirement.  That bound
    is what makes distinct blocks select distinct edges, so relaxing it is
    only sensible for the exhaustive analysis oracles that deliberately
    walk tiny graphs with the full direction range.
    """

    q: int
    block_bits: int  # N
    n: int
    modulus: PrimeModulus
    tag_bits: int  # h
    variant: Variant = Variant.DMAC2
    encoding: Encoding = Encoding.POSITIONAL
    padding: Padding = Padding.ZERO_FILL
    tag_mode: TagMode = TagMode.MOD_Q
    allow_small_modulus: bool = False

    def __post_init__(self) -> None:
        if self.q < 2:
            raise ParameterError(f"alphabet size must be >= 2, got {self.q}")
        if self.n < 2:
            raise ParameterError(f"walk dimension must be >= 2, got {self.n}")
        lq = self.symbol_bits
        if self.block_bits < lq or self.block_bits % lq != 0:
            raise ParameterError(
                f"block size {self.block_bits} must be a positive multiple of "
                f"the symbol size {lq}"
            )
        if self.tag_bits < 1 or self.tag_bits > self.n * lq:
            raise ParameterError(
                f"tag size {self.tag_bits} must satisfy 1 <= h <= n*l(q) = {self.n * lq}"
            )
        if self.modulus.value < 2**self.block_bits and not self.allow_small_modulus:
            raise ParameterError(
                f"modulus {self.modulus.value} < 2^{self.block_bits}; blocks would "
                "not map to distinct directions"
            )

    @property
    def symbol_bits(self) -> int:
        return symbol_bits_for(self.q)

    @property
    def symbols_per_block(self) -> int:
        return self.block_bits // self.symbol_bits

    @property
    def max_password_length(self) -> int:
        return girth_formula(self.n) // 2

    def with_overrides(self, **kwargs) -> "MacParams":
        return replace(self, **kwargs)


@lru_cache(maxsize=1)
def default_profile() -> MacParams:
    """The shipped default: 256-bit tags from byte messages, 32-bit blocks."""
    return MacParams(
        q=256,
        block_bits=32,
        n=32,
        modulus=PrimeModulus(next_prime_at_least(2**32)),
        tag_bits=256,
    )


def suggest_params(tag_bits: int, symbol_bits: int, block_bits: int) -> tuple[int, int]:
    """Pick (n, Q) for a requested tag size, symbol size and block size.

    n is the smallest dimension whose final vector can carry h bits
    (clamped to the minimum dimension 2); Q is the smallest prime >= 2^N.
    """
    if tag_bits < 1:
        raise ParameterError(f"tag size must be >= 1, got {tag_bits}")
    if symbol_bits < 1 or block_bits % symbol_bits != 0:
        raise ParameterError(
            f"symbol size {symbol_bits} must divide block size {block_bits}"
        )
    n = max(2, -(-tag_bits // symbol_bits))
    return n, next_prime_at_least(2**block_bits)


@dataclass(frozen=True)
class MacKey:
    """Secret pair (IV, S): initial point and password symbols.

    The password bound s <= g/2 keeps the secret suffix of the walk shorter
    than half the girth.  Construction allows s = 0 (useful for analysis);
    :func:`keygen` always produces s >= 1.
    """

    iv: Vertex
    password: tuple[int, ...]

    def __post_init__(self) -> None:
        if not self.iv.is_point:
            raise ParameterError("the initial vertex must be a point")
        bound = girth_formula(self.iv.n) // 2
        if len(self.password) > bound:
            raise ParameterError(
                f"password length {len(self.password)} violates s <= (1/2) g(D(n,Q)) = {bound}"
            )
        for s in self.password:
            if s < 0:
                raise ParameterError(f"password symbol {s} is negative")


def validate_key(key: MacKey, params: MacParams) -> None:
    if key.iv.modulus != params.modulus:
        raise ParameterError(
            f"key modulus {key.iv.modulus.value} does not match parameters "
            f"({params.modulus.value})"
        )
    if key.iv.n != params.n:
        raise ParameterError(
            f"key has {key.iv.n} coordinates, parameters expect {params.n}"
        )
    for s in key.password:
        if s >= params.q:
            raise ParameterError(f"password symbol {s} outside alphabet of size {params.q}")


def keygen(
    params: MacParams,
    password_length: int,
    entropy: Callable[[int], bytes] = secrets.token_bytes,
) -> MacKey:
    """Fresh key: IV uniform over F_Q^n, password uniform over [0, q)^s."""
    bound = params.max_password_length
    if not 1 <= password_length <= bound:
        raise ParameterError(
            f"password length {password_length} violates s <= (1/2) g(D(n,Q)) = {bound}"
        )
    coords = tuple(
        sample_uniform(params.modulus, entropy).residue for _ in range(params.n)
    )
    iv = Vertex(VertexKind.POINT, coords, params.modulus)
    password = tuple(
        _uniform_below(params.q, entropy) for _ in range(password_length)
    )
    return MacKey(iv, password)


def _uniform_below(bound: int, entropy: Callable[[int], bytes]) -> int:
    # rejection sampling, same scheme as sample_uniform but for the symbol
    # alphabet, which need not have prime size
    nbits = (bound - 1).bit_length() or 1
    nbytes = (nbits + 7) // 8
    shift = 8 * nbytes - nbits
    while True:
        raw = entropy(nbytes)
        value = int.from_bytes(raw, "big") >> shift
        if value < bound:
            return value


Block = Union[tuple[int, ...], int]


def split_pad(message: Sequence[int], params: MacParams) -> list[Block]:
    """Partition a symbol sequence into blocks of c = N/l(q) symbols.

    The final partial block is filled with zero symbols.  In
    ZERO_FILL_LENGTH mode one extra block follows whose direction is the
    original symbol count mod Q; it is returned as a bare integer because
    that value is generally not expressible as c alphabet symbols.
    """
    c = params.symbols_per_block
    symbols = list(message)
    for s in symbols:
        if not 0 <= s < params.q:
            raise InputError(f"symbol {s} outside alphabet of size {params.q}")
    blocks: list[Block] = [
        tuple(symbols[i : i + c]) for i in range(0, len(symbols), c)
    ]
    if blocks and len(blocks[-1]) < c:
        blocks[-1] = blocks[-1] + (0,) * (c - len(blocks[-1]))
    if params.padding is Padding.ZERO_FILL_LENGTH:
        blocks.append(len(symbols) % params.modulus.value)
    return blocks


def encode_block(block: Sequence[int], params: MacParams) -> int:
    """Turn one block of c symbols into the walk direction M_i."""
    if params.encoding is Encoding.DECIMAL_CONCAT:
        return int("".join(str(s) for s in block))
    radix = 1 << params.symbol_bits
    value = 0
    for s in block:
        value = value * radix + s
    return value


def _directions(message: Sequence[int], params: MacParams) -> list[int]:
    out: list[int] = []
    for block in split_pad(message, params):
        out.append(block if isinstance(block, int) else encode_block(block, params))
    return out


@dataclass(frozen=True)
class WalkState:
    """Current vertex plus the 0-based step counter.

    The kind alternates: the vertex is a point exactly when the counter is
    even (walks start at the point IV).
    """

    vertex: Vertex
    step_index: int = 0


def walk_step(state: WalkState, direction: int, variant: Variant) -> WalkState:
    """Advance one step.  Step i reads coordinate (i mod n) + 1.

    DMAC-1 moves to the neighbor; DMAC-2 moves to neighbor + current vertex
    (coordinatewise mod Q, keeping the neighbor's kind).
    """
    v = state.vertex
    n = v.n
    coord_index = (state.step_index % n) + 1
    nxt = neighbor(v, direction, coord_index)
    ctr = active_counter()
    if ctr is not None:
        ctr.mod_units += 1
    if variant is Variant.DMAC2:
        q = v.modulus.value
        if ctr is not None:
            ctr.adds += n
        coords = tuple((a + b) % q for a, b in zip(nxt.coords, v.coords))
        nxt = Vertex(nxt.kind, coords, v.modulus)
    return WalkState(nxt, state.step_index + 1)


def walk_trace(
    directions: Sequence[int], key: MacKey, params: MacParams
) -> list[WalkState]:
    """All states v_0 .. v_(l(M)+s) of the walk (reference engine)."""
    validate_key(key, params)
    state = WalkState(key.iv, 0)
    trace = [state]
    for d in list(directions) + list(key.password):
        state = walk_step(state, int(d), params.variant)
        trace.append(state)
    return trace


@dataclass(frozen=True)
class Tag:
    """An h-bit authentication tag, stored as an integer in [0, 2^h)."""

    value: int
    bit_length: int

    def __post_init__(self) -> None:
        if self.bit_length < 1:
            raise ParameterError("tags need at least one bit")
        if not 0 <= self.value < 1 << self.bit_length:
            raise ParameterError(f"tag value does not fit in {self.bit_length} bits")

    def to_bits(self) -> str:
        return format(self.value, f"0{self.bit_length}b")

    def to_hex(self) -> str:
        if self.bit_length % 4:
            raise ParameterError(
                f"hex output needs a tag size divisible by 4, got {self.bit_length}"
            )
        return format(self.value, f"0{self.bit_length // 4}x")

    def to_bytes(self) -> bytes:
        nbytes = (self.bit_length + 7) // 8
        return (self.value << (8 * nbytes - self.bit_length)).to_bytes(nbytes, "big")

    def hamming(self, other: "Tag") -> int:
        if self.bit_length != other.bit_length:
            raise InputError("cannot compare tags of different sizes")
        return (self.value ^ other.value).bit_count()

    @classmethod
    def from_hex(cls, text: str, bit_length: int) -> "Tag":
        if bit_length % 4:
            raise InputError(f"tag size {bit_length} is not hex-representable")
        text = text.strip().lower()
        if len(text) != bit_length // 4:
            raise InputError(
                f"expected {bit_length // 4} hex digits, got {len(text)}"
            )
        try:
            value = int(text, 16)
        except ValueError as exc:
            raise InputError(f"malformed hex tag {text!r}") from exc
        return cls(value, bit_length)

    @classmethod
    def from_bits(cls, text: str, bit_length: int) -> "Tag":
        text = text.strip()
        if len(text) != bit_length or set(text) - {"0", "1"}:
            raise InputError(f"expected {bit_length} binary digits")
        return cls(int(text, 2), bit_length)


def extract_tag(state: WalkState, params: MacParams) -> Tag:
    """Read the tag off the final walk vector.

    MOD_Q reduces each coordinate mod q; MOD_POW2 reduces mod 2^l(q) (the
    unbiased choice when q is not a power of two).  Reduced coordinates are
    serialized big-endian, l(q) bits each, in order 1..n, and the
    concatenation is truncated to the leading h bits.
    """
    lq = params.symbol_bits
    if params.tag_mode is TagMode.MOD_Q:
        reducer = params.q
    else:
        reducer = 1 << lq
    value = 0
    for c in state.vertex.coords:
        value = (value << lq) | (c % reducer)
    total = params.n * lq
    return Tag(value >> (total - params.tag_bits), params.tag_bits)


def _kernel_eligible(params: MacParams) -> bool:
    return 2**31 <= params.modulus.value < 2**42


def _final_state_fast(
    directions: Sequence[int], key: MacKey, params: MacParams
) -> WalkState:
    from . import _kernel

    import numpy as np

    q = params.modulus.value
    dirs = np.array([int(d) % q for d in directions] + list(key.password), dtype=np.uint64)
    coords = _kernel.run_walk(
        dirs,
        np.array(key.iv.coords, dtype=np.uint64),
        q,
        params.variant is Variant.DMAC2,
    )
    steps = len(dirs)
    kind = VertexKind.POINT if steps % 2 == 0 else VertexKind.LINE
    vertex = Vertex(kind, tuple(int(c) for c in coords), params.modulus)
    return WalkState(vertex, steps)


def _final_state(
    directions: Sequence[int], key: MacKey, params: MacParams, engine: str
) -> WalkState:
    validate_key(key, params)
    if engine not in ("auto", "reference", "fast"):
        raise ParameterError(f"unknown engine {engine!r}")
    use_fast = False
    if engine == "fast":
        if not _kernel_eligible(params):
            raise ParameterError(
                "fast engine requires 2^31 <= Q < 2^42; use engine='reference'"
            )
        use_fast = True
    elif engine == "auto":
        use_fast = _kernel_eligible(params) and active_counter() is None
    if use_fast:
        return _final_state_fast(directions, key, params)
    state = WalkState(key.iv, 0)
    for d in list(directions) + list(key.password):
        state = walk_step(state, int(d), params.variant)
    return state


def dmac_directions(
    directions: Sequence[int],
    key: MacKey,
    params: MacParams,
    engine: str = "auto",
) -> Tag:
    """Tag a sequence of pre-encoded walk directions (no block encoding)."""
    for d in directions:
        if int(d) < 0:
            raise InputError(f"directions must be nonnegative, got {d}")
    return extract_tag(_final_state(directions, key, params, engine), params)


def dmac(
    message: Sequence[int],
    key: MacKey,
    params: MacParams,
    engine: str = "auto",
) -> Tag:
    """Tag a message given as a sequence of alphabet symbols.

    The empty message is legal: the walk then consists of the password
    steps alone.
    """
    return dmac_directions(_directions(message, params), key, params, engine)


def bytes_to_symbols(data: bytes, params: MacParams) -> list[int]:
    """Split a byte stream into l(q)-bit big-endian symbol groups.

    A trailing partial group is zero-extended on the right.  Symbols >= q
    are rejected; that can only happen when q is not a power of two.
    """
    lq = params.symbol_bits
    if lq == 8:
        symbols = list(data)
    else:
        symbols = []
        acc = 0
        nbits = 0
        mask = (1 << lq) - 1
        for byte in data:
            acc = (acc << 8) | byte
            nbits += 8
            while nbits >= lq:
                nbits -= lq
                symbols.append((acc >> nbits) & mask)
                acc &= (1 << nbits) - 1
        if nbits:
            symbols.append((acc << (lq - nbits)) & mask)
    if params.q < (1 << lq):
        for s in symbols:
            if s >= params.q:
                raise InputError(
                    f"byte stream contains symbol {s} outside alphabet of size {params.q}"
                )
    return symbols


def _vector_directions(data: bytes, params: MacParams):
    """Vectorized byte-stream path: returns a uint64 direction array, or
    None when this parameter shape needs the generic symbol path."""
    if (
        params.symbol_bits != 8
        or params.q != 256
        or params.encoding is not Encoding.POSITIONAL
    ):
        return None
    import numpy as np

    c = params.symbols_per_block
    original = len(data)
    pad = (-original) % c
    if pad:
        data = data + b"\x00" * pad
    if not data:
        dirs = np.zeros(0, dtype=np.uint64)
    elif c in (1, 2, 4, 8):
        dirs = np.frombuffer(data, dtype=f">u{c}").astype(np.uint64)
    else:
        arr = np.frombuffer(data, dtype=np.uint8).reshape(-1, c).astype(np.uint64)
        dirs = arr[:, 0].copy()
        for k in range(1, c):
            dirs <<= np.uint64(8)
            dirs |= arr[:, k]
    if params.padding is Padding.ZERO_FILL_LENGTH:
        extra = np.uint64(original % params.modulus.value)
        dirs = np.append(dirs, extra)
    if (1 << params.block_bits) > params.modulus.value:
        # only possible under allow_small_modulus; the walk kernel expects
        # directions already reduced
        dirs = dirs % np.uint64(params.modulus.value)
    return dirs


def dmac_bytes(
    data: bytes,
    key: MacKey,
    params: MacParams,
    engine: str = "auto",
) -> Tag:
    """Tag a byte stream (the CLI's message form)."""
    if engine != "reference" and _kernel_eligible(params) and active_counter() is None:
        dirs = _vector_directions(data, params)
        if dirs is not None:
            validate_key(key, params)
            import numpy as np

            from . import _kernel

            full = np.append(dirs, np.array(key.password, dtype=np.uint64))
            coords = _kernel.run_walk(
                full,
                np.array(key.iv.coords, dtype=np.uint64),
                params.modulus.value,
                params.variant is Variant.DMAC2,
            )
            kind = VertexKind.POINT if len(full) % 2 == 0 else VertexKind.LINE
            vertex = Vertex(kind, tuple(int(c) for c in coords), params.modulus)
            return extract_tag(WalkState(vertex, len(full)), params)
    return dmac(bytes_to_symbols(data, params), key, params, engine)


def verify(
    message: Sequence[int],
    key: MacKey,
    params: MacParams,
    candidate: Tag,
    engine: str = "auto",
) -> bool:
    """Recompute the tag and compare.

    The comparison runs over all h bits regardless of where a mismatch
    occurs.  A candidate of the wrong size is an input error, distinct
    from verification failure.
    """
    if candidate.bit_length != params.tag_bits:
        raise InputError(
            f"candidate tag has {candidate.bit_length} bits, expected {params.tag_bits}"
        )
    expected = dmac(message, key, params, engine)
    return hmac.compare_digest(expected.to_bytes(), candidate.to_bytes())


def verify_bytes(
    data: bytes,
    key: MacKey,
    params: MacParams,
    candidate: Tag,
    engine: str = "auto",
) -> bool:
    if candidate.bit_length != params.tag_bits:
        raise InputError(
            f"candidate tag has {candidate.bit_length} bits, expected {params.tag_bits}"
        )
    expected = dmac_bytes(data, key, params, engine)
    return hmac.compare_digest(expected.to_bytes(), candidate.to_bytes())
