"""Exact modular arithmetic over the prime field F_Q.

Every walk computation in this package reduces modulo a prime Q.  Residues
are kept canonical (in ``[0, Q)``) after every operation, which makes
equality and serialization trivial.  Moduli are restricted to ``Q < 2**63``
so a double-width product always fits comfortably in native integers.

None of this is constant-time.  The only side-channel countermeasure in the
package is the balanced tag comparison in :mod:`dmac.mac`.
"""

from __future__ import annotations

import contextlib
import contextvars
import random
from dataclasses import dataclass
from typing import Callable, Iterator

from .errors import EntropyError, ParameterError

MAX_MODULUS = 2**63

# Smallest composite that the witness set below fails to expose; every
# candidate under this bound gets a fully deterministic verdict.
_DETERMINISTIC_BOUND = 3_317_044_064_679_887_385_961_981
_WITNESSES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)

_SMALL_PRIMES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47)


def _miller_rabin_round(n: int, base: int, d: int, r: int) -> bool:
    x = pow(base, d, n)
    if x in (1, n - 1):
        return True
    for _ in range(r - 1):
        x = x * x % n
        if x == n - 1:
            return True
    return False


def is_prime(candidate: int, *, rounds: int = 64, rng: random.Random | None = None) -> bool:
    """Primality test, deterministic below ~3.3e24, Miller-Rabin above.

    Above the deterministic bound, ``rounds`` random bases are tried
    (error probability at most 4**-rounds).
    """
    if candidate < 2:
        raise ParameterError(f"primality is defined for integers >= 2, got {candidate}")
    for p in _SMALL_PRIMES:
        if candidate == p:
            return True
        if candidate % p == 0:
            return False
    d, r = candidate - 1, 0
    while d % 2 == 0:
        d //= 2
        r += 1
    if candidate < _DETERMINISTIC_BOUND:
        bases: tuple[int, ...] | list[int] = _WITNESSES
    else:
        rng = rng or random.Random()
        bases = [rng.randrange(2, candidate - 1) for _ in range(max(rounds, 64))]
    return all(_miller_rabin_round(candidate, b, d, r) for b in bases)


def next_prime_at_least(lower: int) -> int:
    """Smallest prime >= lower."""
    if lower < 2:
        raise ParameterError(f"lower bound must be >= 2, got {lower}")
    if lower == 2:
        return 2
    candidate = lower | 1  # first odd >= lower
    while not is_prime(candidate):
        candidate += 2
    return candidate


@dataclass(frozen=True)
class PrimeModulus:
    """The field order Q.  Construction verifies primality."""

    value: int

    def __post_init__(self) -> None:
        if self.value < 2:
            raise ParameterError(f"modulus must be >= 2, got {self.value}")
        if self.value >= MAX_MODULUS:
            raise ParameterError(f"modulus {self.value} >= 2**63 is unsupported")
        if not is_prime(self.value):
            raise ParameterError(f"modulus {self.value} is not prime")

    def __repr__(self) -> str:
        return f"PrimeModulus({self.value})"


class OpCounter:
    """Tally of field operations, used by the cost instrumentation.

    ``mod_units`` holds the per-step bookkeeping charge the walk layer adds
    on top of the arithmetic it actually performs; see
    :func:`dmac.analysis.count_ops` for the full accounting.
    """

    __slots__ = ("adds", "subs", "muls", "reductions", "mod_units")

    def __init__(self) -> None:
        self.adds = 0
        self.subs = 0
        self.muls = 0
        self.reductions = 0
        self.mod_units = 0

    @property
    def total(self) -> int:
        return self.adds + self.subs + self.muls + self.reductions + self.mod_units

    def __repr__(self) -> str:
        return (
            f"OpCounter(adds={self.adds}, subs={self.subs}, muls={self.muls}, "
            f"reductions={self.reductions}, mod_units={self.mod_units})"
        )


_ACTIVE_COUNTER: contextvars.ContextVar[OpCounter | None] = contextvars.ContextVar(
    "dmac_op_counter", default=None
)


def active_counter() -> OpCounter | None:
    return _ACTIVE_COUNTER.get()


@contextlib.contextmanager
def counting(counter: OpCounter) -> Iterator[OpCounter]:
    """Route operation counts into ``counter`` for the enclosed block."""
    token = _ACTIVE_COUNTER.set(counter)
    try:
        yield counter
    finally:
        _ACTIVE_COUNTER.reset(token)


@dataclass(frozen=True)
class FieldElement:
    """A canonical residue in [0, Q)."""

    residue: int
    modulus: PrimeModulus

    def __post_init__(self) -> None:
        if not 0 <= self.residue < self.modulus.value:
            raise ParameterError(
                f"residue {self.residue} out of range for modulus {self.modulus.value}"
            )

    def _check(self, other: "FieldElement") -> None:
        if self.modulus != other.modulus:
            raise ParameterError(
                f"modulus mismatch: {self.modulus.value} vs {other.modulus.value}"
            )

    def __add__(self, other: "FieldElement") -> "FieldElement":
        self._check(other)
        ctr = _ACTIVE_COUNTER.get()
        if ctr is not None:
            ctr.adds += 1
        return FieldElement((self.residue + other.residue) % self.modulus.value, self.modulus)

    def __sub__(self, other: "FieldElement") -> "FieldElement":
        self._check(other)
        ctr = _ACTIVE_COUNTER.get()
        if ctr is not None:
            ctr.subs += 1
        return FieldElement((self.residue - other.residue) % self.modulus.value, self.modulus)

    def __mul__(self, other: "FieldElement") -> "FieldElement":
        self._check(other)
        ctr = _ACTIVE_COUNTER.get()
        if ctr is not None:
            ctr.muls += 1
        return FieldElement((self.residue * other.residue) % self.modulus.value, self.modulus)

    def __neg__(self) -> "FieldElement":
        return FieldElement((-self.residue) % self.modulus.value, self.modulus)

    def __int__(self) -> int:
        return self.residue


def sample_uniform(modulus: PrimeModulus, entropy: Callable[[int], bytes]) -> FieldElement:
    """Uniform residue in [0, Q) by rejection sampling (no modulo bias).

    ``entropy`` must return exactly the number of bytes requested, like
    ``secrets.token_bytes``.
    """
    q = modulus.value
    nbits = q.bit_length()
    nbytes = (nbits + 7) // 8
    shift = 8 * nbytes - nbits
    while True:
        raw = entropy(nbytes)
        if not isinstance(raw, (bytes, bytearray)) or len(raw) != nbytes:
            raise EntropyError(f"entropy source returned {raw!r} instead of {nbytes} bytes")
        value = int.from_bytes(raw, "big") >> shift
        if value < q:
            return FieldElement(value, modulus)
