"""Ground-truth verification tools.

Everything here goes the long way around on purpose: explicit adjacency on
small graphs, every-root BFS for the girth, dense eigensolves, exhaustive
hashing for collisions, and an instrumented walk for operation counts.
These oracles are what the fast code paths are tested against.
"""

from __future__ import annotations

import math
import random
from collections import deque
from dataclasses import dataclass, field as dataclass_field
from fractions import Fraction
from itertools import product
from typing import Sequence

import numpy as np

from .errors import ParameterError
from .field import OpCounter, PrimeModulus, counting
from .graph import GraphParams, Vertex, VertexKind, all_neighbors
from .mac import (
    MacKey,
    MacParams,
    Tag,
    TagMode,
    Variant,
    dmac_bytes,
    extract_tag,
    walk_trace,
    _directions,
)

# Upper tail quantiles used by the statistical checks (significance 0.01).
NORMAL_Q995 = 2.576  # two-sided 1% for the monobit z statistic
CHI2_3_Q99 = 11.3449  # chi-square, 3 degrees of freedom
CHI2_10_Q999 = 29.588  # chi-square, 10 degrees of freedom (sampler test)

BFS_VERTEX_GUARDRAIL = 2_000_000
SPECTRUM_VERTEX_GUARDRAIL = 5_000
COLLISION_SEARCH_GUARDRAIL = 1_000_000


# ---------------------------------------------------------------------------
# explicit graph oracle


@dataclass
class GraphOracle:
    """Explicit vertex list and adjacency of a small D(n, q)."""

    params: GraphParams
    vertices: list[Vertex]
    adjacency: list[list[int]]

    @property
    def vertex_count(self) -> int:
        return len(self.vertices)

    @property
    def edge_count(self) -> int:
        return sum(len(a) for a in self.adjacency) // 2


def build_oracle(n: int, q: int, guardrail: int = BFS_VERTEX_GUARDRAIL) -> GraphOracle:
    """Enumerate all 2*q^n vertices of D(n, q) with their neighbor lists."""
    modulus = PrimeModulus(q)
    params = GraphParams(n, modulus)
    total = 2 * q**n
    if total > guardrail:
        raise ParameterError(
            f"D({n},{q}) has {total} vertices, above the guardrail {guardrail}"
        )
    points = [
        Vertex(VertexKind.POINT, coords, modulus)
        for coords in product(range(q), repeat=n)
    ]
    lines = [
        Vertex(VertexKind.LINE, coords, modulus)
        for coords in product(range(q), repeat=n)
    ]
    vertices = points + lines
    index = {v: i for i, v in enumerate(vertices)}
    adjacency: list[list[int]] = [[] for _ in vertices]
    for i, p in enumerate(points):
        for l in all_neighbors(p):
            j = index[l]
            adjacency[i].append(j)
            adjacency[j].append(i)
    return GraphOracle(params, vertices, adjacency)


def _girth_of_adjacency(adjacency: Sequence[Sequence[int]]) -> float:
    """Exact girth by BFS from every vertex; inf when the graph is a forest."""
    best = math.inf
    count = len(adjacency)
    for root in range(count):
        dist = [-1] * count
        parent = [-1] * count
        dist[root] = 0
        queue = deque([root])
        while queue:
            u = queue.popleft()
            if 2 * dist[u] >= best:
                continue  # deeper levels cannot beat the current cycle
            for w in adjacency[u]:
                if dist[w] == -1:
                    dist[w] = dist[u] + 1
                    parent[w] = u
                    queue.append(w)
                elif w != parent[u]:
                    cycle = dist[u] + dist[w] + 1
                    if cycle < best:
                        best = cycle
    return best


def measure_girth(oracle: GraphOracle) -> float:
    return _girth_of_adjacency(oracle.adjacency)


@dataclass
class StructureReport:
    vertex_count: int
    edge_count: int
    regular: bool
    degree: int
    bipartite: bool
    components: int

    @property
    def ok(self) -> bool:
        return self.regular and self.bipartite


def structure_checks(oracle: GraphOracle) -> StructureReport:
    """Verify q-regularity and the point/line bipartition; count components."""
    q = oracle.params.modulus.value
    degrees = {len(a) for a in oracle.adjacency}
    regular = degrees == {q}
    half = len(oracle.vertices) // 2
    bipartite = all(
        (i < half) != (j < half)
        for i, nbrs in enumerate(oracle.adjacency)
        for j in nbrs
    )
    seen = [False] * len(oracle.vertices)
    components = 0
    for start in range(len(oracle.vertices)):
        if seen[start]:
            continue
        components += 1
        queue = deque([start])
        seen[start] = True
        while queue:
            u = queue.popleft()
            for w in oracle.adjacency[u]:
                if not seen[w]:
                    seen[w] = True
                    queue.append(w)
    return StructureReport(
        vertex_count=oracle.vertex_count,
        edge_count=oracle.edge_count,
        regular=regular,
        degree=max(degrees) if len(degrees) == 1 else -1,
        bipartite=bipartite,
        components=components,
    )


@dataclass
class SpectrumReport:
    eigenvalues: np.ndarray  # sorted descending
    top: float
    second: float
    bound: float

    @property
    def within_bound(self) -> bool:
        return abs(self.second) <= self.bound + 1e-6

    @property
    def symmetric(self) -> bool:
        ev = self.eigenvalues
        return bool(np.max(np.abs(ev + ev[::-1])) <= 1e-6)


def spectrum(oracle: GraphOracle, guardrail: int = SPECTRUM_VERTEX_GUARDRAIL) -> SpectrumReport:
    """Adjacency eigenvalues (dense symmetric solve).

    ``second`` is the largest eigenvalue strictly below the degree q, with
    a 1e-6 tolerance absorbing multiple copies of q on disconnected graphs.
    """
    count = oracle.vertex_count
    if count > guardrail:
        raise ParameterError(
            f"{count} vertices exceed the dense eigensolve guardrail {guardrail}"
        )
    q = oracle.params.modulus.value
    matrix = np.zeros((count, count))
    for i, nbrs in enumerate(oracle.adjacency):
        for j in nbrs:
            matrix[i, j] = 1.0
    eigenvalues = np.linalg.eigvalsh(matrix)[::-1]
    below = eigenvalues[eigenvalues < q - 1e-6]
    second = float(below[0]) if len(below) else float("nan")
    return SpectrumReport(
        eigenvalues=eigenvalues,
        top=float(eigenvalues[0]),
        second=second,
        bound=2.0 * math.sqrt(q),
    )


# ---------------------------------------------------------------------------
# collision census


@dataclass
class CollisionPair:
    message_a: tuple[int, ...]
    message_b: tuple[int, ...]
    kind: str  # "mirror" or "structural"


@dataclass
class CollisionReport:
    messages_hashed: int
    pairs: list[CollisionPair]

    @property
    def mirror_count(self) -> int:
        return sum(1 for p in self.pairs if p.kind == "mirror")

    @property
    def structural_count(self) -> int:
        return sum(1 for p in self.pairs if p.kind == "structural")

    def structural_pairs(self) -> list[CollisionPair]:
        return [p for p in self.pairs if p.kind == "structural"]


def _classify_pair(
    trace_a: Sequence, trace_b: Sequence, dirs_a: Sequence[int], dirs_b: Sequence[int], q: int
) -> str:
    """Mirror pairs walk the exact same vertex sequence; wherever their
    directions differ, the two must be reflections around the read
    coordinate (t' = -2v - t).  Anything else is structural."""
    if len(trace_a) != len(trace_b):
        return "structural"
    n = trace_a[0].vertex.n
    for i, (da, db) in enumerate(zip(dirs_a, dirs_b)):
        sa, sb = trace_a[i], trace_b[i]
        if sa.vertex != sb.vertex:
            return "structural"
        if trace_a[i + 1].vertex != trace_b[i + 1].vertex:
            return "structural"
        if da % q != db % q:
            v = sa.vertex.coords[i % n]
            if (da + db + 2 * v) % q != 0:
                return "structural"
    return "mirror"


def brute_force_collisions(
    params: MacParams,
    key: MacKey,
    max_blocks: int,
    guardrail: int = COLLISION_SEARCH_GUARDRAIL,
) -> CollisionReport:
    """Hash every message of 1..max_blocks full blocks and return all
    distinct pairs with equal tags, classified mirror vs structural."""
    c = params.symbols_per_block
    space = sum(params.q ** (c * k) for k in range(1, max_blocks + 1))
    if space > guardrail:
        raise ParameterError(
            f"search space {space} exceeds the guardrail {guardrail}"
        )
    by_tag: dict[Tag, list[tuple[tuple[int, ...], list, list[int]]]] = {}
    hashed = 0
    for k in range(1, max_blocks + 1):
        for symbols in product(range(params.q), repeat=c * k):
            dirs = _directions(symbols, params)
            trace = walk_trace(dirs, key, params)
            tag = extract_tag(trace[-1], params)
            by_tag.setdefault(tag, []).append((symbols, trace, dirs))
            hashed += 1
    q = params.modulus.value
    pairs: list[CollisionPair] = []
    for bucket in by_tag.values():
        for i in range(len(bucket)):
            for j in range(i + 1, len(bucket)):
                (ma, ta, da), (mb, tb, db) = bucket[i], bucket[j]
                kind = _classify_pair(ta, tb, da, db, q)
                pairs.append(CollisionPair(ma, mb, kind))
    return CollisionReport(hashed, pairs)


def mirror_message(
    message: Sequence[int], key: MacKey, params: MacParams, block_index: int
) -> list[int] | None:
    """Constructively build a colliding message by reflecting one block.

    Replaces block ``block_index``'s direction t with (-2v - t) mod Q,
    where v is the read coordinate before that step.  Returns None when the
    reflected direction cannot be re-encoded as a block (it falls into
    [2^N, Q), possible only for the few values above 2^N).
    """
    from .mac import Encoding

    if params.encoding is not Encoding.POSITIONAL:
        raise ParameterError("constructive mirrors need the injective positional encoding")
    dirs = _directions(message, params)
    if not 0 <= block_index < len(dirs):
        raise ParameterError(f"block index {block_index} out of range")
    trace = walk_trace(dirs, key, params)
    state = trace[block_index]
    v = state.vertex.coords[state.step_index % params.n]
    q = params.modulus.value
    mirrored = (-2 * v - dirs[block_index]) % q
    if mirrored >= 1 << params.block_bits:
        return None
    radix = 1 << params.symbol_bits
    c = params.symbols_per_block
    block = []
    value = mirrored
    for _ in range(c):
        block.append(value % radix)
        value //= radix
    block.reverse()
    if any(s >= params.q for s in block):
        return None
    out = list(message)
    # message may carry a ragged final block; rebuild from padded symbols
    padded = [s for b in _split_symbols(message, params) for s in b]
    padded[block_index * c : (block_index + 1) * c] = block
    return padded


def _split_symbols(message: Sequence[int], params: MacParams) -> list[tuple[int, ...]]:
    from .mac import split_pad

    return [b for b in split_pad(message, params) if isinstance(b, tuple)]


# ---------------------------------------------------------------------------
# avalanche and bit statistics


@dataclass
class AvalancheReport:
    trials: int
    mean_hamming: float
    std_hamming: float
    tag_bits: int

    def within_binomial_band(self, sigmas: float = 4.0) -> bool:
        center = self.tag_bits / 2.0
        sigma = math.sqrt(self.tag_bits) / 2.0
        return abs(self.mean_hamming - center) <= sigmas * sigma


def avalanche(
    params: MacParams,
    key: MacKey,
    trials: int,
    message_bits: int = 512,
    rng: random.Random | None = None,
) -> AvalancheReport:
    """Mean tag Hamming distance under single random message-bit flips."""
    if trials < 1:
        raise ParameterError("avalanche needs at least one trial")
    if message_bits % 8:
        raise ParameterError("message size must be a whole number of bytes")
    rng = rng or random.Random()
    distances = []
    nbytes = message_bits // 8
    for _ in range(trials):
        data = bytearray(rng.randbytes(nbytes))
        tag_a = dmac_bytes(bytes(data), key, params)
        bit = rng.randrange(message_bits)
        data[bit // 8] ^= 0x80 >> (bit % 8)
        tag_b = dmac_bytes(bytes(data), key, params)
        distances.append(tag_a.hamming(tag_b))
    arr = np.asarray(distances, dtype=float)
    return AvalancheReport(
        trials=trials,
        mean_hamming=float(arr.mean()),
        std_hamming=float(arr.std()),
        tag_bits=params.tag_bits,
    )


def generate_tags(
    params: MacParams,
    key: MacKey,
    count: int,
    message_bytes: int = 16,
    rng: random.Random | None = None,
) -> list[Tag]:
    rng = rng or random.Random()
    return [
        dmac_bytes(rng.randbytes(message_bytes), key, params) for _ in range(count)
    ]


@dataclass
class BitStatsReport:
    total_bits: int
    ones: int
    monobit_z: float
    serial_chi2: float
    warnings: list[str] = dataclass_field(default_factory=list)

    @property
    def monobit_pass(self) -> bool:
        return self.monobit_z <= NORMAL_Q995

    @property
    def serial_pass(self) -> bool:
        return self.serial_chi2 <= CHI2_3_Q99

    @property
    def ok(self) -> bool:
        return self.monobit_pass and self.serial_pass


def bit_statistics(params: MacParams, tags: Sequence[Tag]) -> BitStatsReport:
    """Monobit and 2-bit serial chi-square over the concatenated tag stream.

    The serial statistic uses non-overlapping bit pairs against the uniform
    multinomial, chi-square with 3 degrees of freedom.  Both tests run at
    significance 0.01.
    """
    if len(tags) < 100:
        raise ParameterError(f"need at least 100 tags, got {len(tags)}")
    warnings = []
    if params.tag_mode is TagMode.MOD_Q and params.q & (params.q - 1):
        warnings.append(
            f"tag mode modq with q={params.q} (not a power of two) biases bits; "
            "use modpow2 for statistical testing"
        )
    stream = "".join(t.to_bits() for t in tags)
    total = len(stream)
    ones = stream.count("1")
    monobit_z = abs(2 * ones - total) / math.sqrt(total)
    pair_counts = [0, 0, 0, 0]
    npairs = total // 2
    for i in range(0, 2 * npairs, 2):
        pair_counts[int(stream[i]) * 2 + int(stream[i + 1])] += 1
    expected = npairs / 4.0
    serial_chi2 = sum((c - expected) ** 2 / expected for c in pair_counts)
    return BitStatsReport(total, ones, monobit_z, serial_chi2, warnings)


def tag_bit_stream(tags: Sequence[Tag]) -> bytes:
    """Concatenated tag bits packed big-endian, for external test suites."""
    stream = "".join(t.to_bits() for t in tags)
    stream += "0" * (-len(stream) % 8)
    return bytes(int(stream[i : i + 8], 2) for i in range(0, len(stream), 8))


# ---------------------------------------------------------------------------
# operation counting


@dataclass
class OpCountReport:
    measured_ops: int
    block_count: int
    password_length: int
    per_bit_measured: Fraction
    per_bit_formula: Fraction
    per_bit_other_variant: Fraction

    @property
    def matches_formula(self) -> bool:
        return self.per_bit_measured == self.per_bit_formula


def step_cost(n: int, variant: Variant) -> int:
    """Accounting charge per walk step: 4 units for the squared head
    (addition, multiplication, reduction, mod bookkeeping) plus 2(n-1) for
    the substitution pass, plus n accumulation additions for DMAC-2."""
    base = 4 + 2 * (n - 1)
    return base + n if variant is Variant.DMAC2 else base


def per_bit_formula(
    n: int, block_bits: int, blocks: int, password_length: int, variant: Variant
) -> Fraction:
    """Predicted operations per message bit: (2n+2)/N * (1 + s/l(M)) for
    DMAC-1 and (3n+2)/N * (1 + s/l(M)) for DMAC-2."""
    if blocks < 1:
        raise ParameterError("per-bit cost needs at least one block")
    numerator = 2 * n + 2 if variant is Variant.DMAC1 else 3 * n + 2
    return Fraction(numerator, block_bits) * (1 + Fraction(password_length, blocks))


def final_reduction_per_bit(n: int, message_bits: int) -> Fraction:
    """Amortized cost of reducing the n output coordinates mod q."""
    return Fraction(n, message_bits)


def count_ops(message: Sequence[int], key: MacKey, params: MacParams) -> OpCountReport:
    """Run the instrumented reference walk and compare against the formula."""
    counter = OpCounter()
    with counting(counter):
        dirs = _directions(message, params)
        walk_trace(dirs, key, params)
    blocks = len(dirs)
    s = len(key.password)
    if blocks < 1:
        raise ParameterError("operation counting needs at least one block")
    per_bit_measured = Fraction(counter.total, params.block_bits * blocks)
    other = Variant.DMAC1 if params.variant is Variant.DMAC2 else Variant.DMAC2
    return OpCountReport(
        measured_ops=counter.total,
        block_count=blocks,
        password_length=s,
        per_bit_measured=per_bit_measured,
        per_bit_formula=per_bit_formula(params.n, params.block_bits, blocks, s, params.variant),
        per_bit_other_variant=per_bit_formula(params.n, params.block_bits, blocks, s, other),
    )
