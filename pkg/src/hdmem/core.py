"""Bit-packed binary hypervectors and their elementary algebra.

A state is a fixed-length binary vector packed 8 bits per byte
(little-endian bit order, zero padding in the last byte). Two
operations act on states:

* ``bind``: component-wise XNOR, i.e. coincidence detection.
  Deterministic, commutative, associative, and self-inverse
  (``bind(x, x)`` is the one-vector, which is also the identity).
* ``bundle``: stochastic superposition controlled by a threshold
  ``theta``. Components on which the inputs agree pass through
  unchanged; components on which they disagree resolve to 1 with
  probability ``theta``. Idempotent and commutative, but
  non-associative for 0 < theta < 1. The endpoints are deterministic:
  theta=0 is component-wise AND, theta=1 is component-wise OR.

Activity (fraction of set bits) and normed Hamming distance are tied
together through binding: d(x, y) = 1 - activity(bind(x, y)). Both
sides are computed here from the same popcount, so the identity holds
bit-exactly, not just to rounding.

All randomness flows through explicit :class:`RngStream` handles, so
every stochastic operation is a pure function of its inputs and the
stream position, and replays bit-for-bit from (seed, stream index).
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np

__all__ = [
    "AlgebraParams",
    "FileFormatError",
    "RngStream",
    "State",
    "asymptotic_activity",
    "bind",
    "bundle",
    "distance",
    "expected_bundle_activity",
    "load_state",
    "mean_activity",
    "one_vector",
    "perturb",
    "random_qstate",
    "save_state",
]

_POPCOUNT = np.array([bin(i).count("1") for i in range(256)], dtype=np.uint8)


def _popcount(packed: np.ndarray) -> int:
    return int(_POPCOUNT[packed].sum(dtype=np.int64))


def _mask_padding(packed: np.ndarray, dimension: int) -> None:
    rem = dimension & 7
    if rem:
        packed[-1] &= (1 << rem) - 1


def _require_same_dimension(x: "State", y: "State") -> None:
    if x.dimension != y.dimension:
        raise ValueError(f"dimension mismatch: {x.dimension} vs {y.dimension}")


class FileFormatError(ValueError):
    """A binary input file does not match its declared format."""


class State:
    """An immutable binary vector of ``dimension`` bits.

    Bits are packed little-endian into uint8 words; bits past
    ``dimension`` in the final byte are always zero (canonical
    padding), so equality, popcounts and whole-array bit operations
    need no masking. Value equality is bitwise equality over the first
    ``dimension`` bits.
    """

    __slots__ = ("data", "dimension")

    def __init__(self, data: np.ndarray, dimension: int):
        if dimension <= 0:
            raise ValueError(f"dimension must be positive, got {dimension}")
        n_bytes = (dimension + 7) // 8
        if data.dtype != np.uint8 or data.shape != (n_bytes,):
            raise ValueError(
                f"packed data must be uint8 of shape ({n_bytes},), "
                f"got {data.dtype} {data.shape}"
            )
        rem = dimension & 7
        if rem and (data[-1] >> rem):
            raise ValueError("padding bits beyond the dimension must be zero")
        data.flags.writeable = False
        self.data = data
        self.dimension = dimension

    @classmethod
    def from_bits(cls, bits) -> "State":
        """Build a state from an iterable of 0/1 values."""
        arr = np.asarray(bits, dtype=np.uint8)
        if arr.ndim != 1 or arr.size == 0:
            raise ValueError("bits must be a non-empty 1-d sequence")
        if np.any(arr > 1):
            raise ValueError("bits must contain only 0 and 1")
        return cls(np.packbits(arr, bitorder="little"), arr.size)

    @classmethod
    def zeros(cls, dimension: int) -> "State":
        if dimension <= 0:
            raise ValueError(f"dimension must be positive, got {dimension}")
        return cls(np.zeros((dimension + 7) // 8, dtype=np.uint8), dimension)

    def to_bits(self) -> np.ndarray:
        """Unpacked copy of the bits, shape (dimension,), dtype uint8."""
        return np.unpackbits(self.data, count=self.dimension, bitorder="little")

    def __eq__(self, other) -> bool:
        if not isinstance(other, State):
            return NotImplemented
        return self.dimension == other.dimension and bool(
            np.array_equal(self.data, other.data)
        )

    def __repr__(self) -> str:
        return f"State(dimension={self.dimension}, activity={mean_activity(self):.4f})"


@dataclass(frozen=True)
class AlgebraParams:
    """Parameters shared by the stochastic operations.

    ``q`` is the mean activity of freshly drawn states, ``theta`` the
    bundling threshold. The full ranges q in [0, 1] and theta in [0, 1]
    are accepted here so that degenerate states and the deterministic
    bundling endpoints stay constructible; experiment configs impose
    the narrower default ranges.
    """

    dimension: int
    q: float
    theta: float
    seed: int

    def __post_init__(self):
        if self.dimension <= 0:
            raise ValueError(f"dimension must be positive, got {self.dimension}")
        if not 0.0 <= self.q <= 1.0:
            raise ValueError(f"q must be in [0, 1], got {self.q}")
        if not 0.0 <= self.theta <= 1.0:
            raise ValueError(f"theta must be in [0, 1], got {self.theta}")
        if not 0 <= self.seed < 2**64:
            raise ValueError(f"seed must fit in 64 bits, got {self.seed}")


class RngStream:
    """Deterministic random bit source addressed by (seed, stream index).

    Identical (seed, stream) pairs replay identical draws in identical
    order on every platform. ``derive`` appends indices to the stream
    address, yielding child streams that are independent of the parent
    and of each other; concurrent tasks should each own one.
    """

    __slots__ = ("seed", "stream", "_gen")

    def __init__(self, seed: int, stream: int | tuple[int, ...] = 0):
        self.seed = int(seed)
        self.stream = (stream,) if isinstance(stream, int) else tuple(stream)
        ss = np.random.SeedSequence((self.seed, *self.stream))
        self._gen = np.random.Generator(np.random.PCG64(ss))

    def derive(self, *indices: int) -> "RngStream":
        """Child stream at this address extended by ``indices``."""
        return RngStream(self.seed, self.stream + indices)

    def bernoulli_bits(self, n: int, p: float) -> np.ndarray:
        """n independent Bernoulli(p) bits, packed little-endian.

        Always consumes exactly n draws, so the stream position after
        the call does not depend on p.
        """
        return np.packbits(self._gen.random(n) < p, bitorder="little")

    def __repr__(self) -> str:
        return f"RngStream(seed={self.seed}, stream={self.stream})"


def random_qstate(params: AlgebraParams, rng: RngStream) -> State:
    """Draw a state whose bits are independently 1 with probability q."""
    return State(rng.bernoulli_bits(params.dimension, params.q), params.dimension)


def one_vector(dimension: int) -> State:
    """The all-ones state, the identity of ``bind``."""
    if dimension <= 0:
        raise ValueError(f"dimension must be positive, got {dimension}")
    data = np.full((dimension + 7) // 8, 0xFF, dtype=np.uint8)
    _mask_padding(data, dimension)
    return State(data, dimension)


def mean_activity(x: State) -> float:
    """Fraction of set bits, popcount(x) / dimension exactly."""
    return _popcount(x.data) / x.dimension


def bind(x: State, y: State) -> State:
    """Component-wise XNOR of two states of equal dimension."""
    _require_same_dimension(x, y)
    out = np.bitwise_xor(x.data, y.data)
    np.bitwise_not(out, out=out)
    _mask_padding(out, x.dimension)
    return State(out, x.dimension)


def distance(x: State, y: State) -> float:
    """Normed Hamming distance, the fraction of differing bits.

    Computed as 1 - activity(bind(x, y)) from the shared popcount, so
    ``distance(x, y) == 1 - mean_activity(bind(x, y))`` holds
    bit-exactly.
    """
    _require_same_dimension(x, y)
    pc_xnor = x.dimension - _popcount(np.bitwise_xor(x.data, y.data))
    return 1.0 - pc_xnor / x.dimension


def bundle(x: State, y: State, theta: float, rng: RngStream) -> State:
    """Stochastic superposition of two states.

    Per component: both 0 gives 0, both 1 gives 1, and a disagreeing
    pair resolves to 1 with probability ``theta`` (independent draw per
    component, fresh on every call). Idempotent for every theta;
    deterministic AND at theta=0 and OR at theta=1.
    """
    _require_same_dimension(x, y)
    if not 0.0 <= theta <= 1.0:
        raise ValueError(f"theta must be in [0, 1], got {theta}")
    noise = rng.bernoulli_bits(x.dimension, theta)
    out = (x.data & y.data) | ((x.data ^ y.data) & noise)
    return State(out, x.dimension)


def perturb(x: State, epsilon: float, rng: RngStream) -> State:
    """Flip each bit independently with probability ``epsilon``."""
    if not 0.0 <= epsilon <= 1.0:
        raise ValueError(f"epsilon must be in [0, 1], got {epsilon}")
    flips = rng.bernoulli_bits(x.dimension, epsilon)
    return State(x.data ^ flips, x.dimension)


def expected_bundle_activity(k: int, theta: float) -> float:
    """Closed-form mean activity of an iterated bundle of k dense items.

    Folding k independent dense (activity 1/2) states one at a time
    satisfies Q(k+1) = Q(k)/2 + theta/2 with Q(1) = 1/2, whose solution
    is theta - (theta - 1/2) * 2**(1-k).
    """
    if k < 1:
        raise ValueError(f"k must be at least 1, got {k}")
    return theta - (theta - 0.5) * 2.0 ** (1 - k)


def asymptotic_activity(q: float, theta: float) -> float:
    """Limit activity of an ever-growing bundle of fresh q-states.

    Fixed point of s -> s*q + theta*(s + q - 2*s*q), i.e.
    theta*q / (1 - theta*(1-q) - q*(1-theta)). Undefined at the corner
    parameter pairs that zero the denominator.
    """
    if not 0.0 <= q <= 1.0:
        raise ValueError(f"q must be in [0, 1], got {q}")
    if not 0.0 <= theta <= 1.0:
        raise ValueError(f"theta must be in [0, 1], got {theta}")
    den = 1.0 - theta * (1.0 - q) - q * (1.0 - theta)
    if den == 0.0:
        raise ValueError(f"degenerate parameters q={q}, theta={theta}: zero denominator")
    return theta * q / den


def save_state(x: State, path) -> None:
    """Write a state: uint32 little-endian dimension header, then the
    bits packed into 64-bit little-endian words (zero padded)."""
    n_words = (x.dimension + 63) // 64
    payload = np.zeros(n_words * 8, dtype=np.uint8)
    payload[: x.data.size] = x.data
    with open(path, "wb") as fh:
        fh.write(struct.pack("<I", x.dimension))
        fh.write(payload.tobytes())


def load_state(path) -> State:
    """Read a state written by :func:`save_state`."""
    with open(path, "rb") as fh:
        raw = fh.read()
    if len(raw) < 4:
        raise FileFormatError(f"{path}: truncated header ({len(raw)} bytes)")
    (dimension,) = struct.unpack("<I", raw[:4])
    if dimension == 0:
        raise FileFormatError(f"{path}: dimension 0 in header")
    n_words = (dimension + 63) // 64
    if len(raw) != 4 + n_words * 8:
        raise FileFormatError(
            f"{path}: expected {4 + n_words * 8} bytes for dimension "
            f"{dimension}, found {len(raw)}"
        )
    n_bytes = (dimension + 7) // 8
    data = np.frombuffer(raw, dtype=np.uint8, count=n_bytes, offset=4).copy()
    rem = dimension & 7
    if rem and (data[-1] >> rem):
        raise FileFormatError(f"{path}: non-zero padding bits beyond dimension")
    if any(raw[4 + n_bytes :]):
        raise FileFormatError(f"{path}: non-zero padding bytes beyond dimension")
    return State(data, dimension)
