"""Sequence memory built from folds of the bundling operation.

A sequence of item states is absorbed into a single state by repeated
bundling, starting from a medium state eta. Bundling is
non-associative for 0 < theta < 1, so the two canonical fold orders
give genuinely different memories:

* the left fold ((((eta + a) + b) + c) ...) can be grown one item at a
  time and retains recent items best (recency gradient);
* the right fold eta + (a + (b + (c + ...))) needs the whole sequence
  up front and retains early items best (primacy gradient).

At theta = 0 and theta = 1 bundling degenerates to AND / OR, both
associative, and the two folds coincide bit for bit.

Structured encodings bundle bound pairs instead of raw items:
position markers (item XNOR marker_i) or chaining (item XNOR
predecessor). Binding the encoded state with a probe (``cue``) then
exposes whatever was bound to that probe, rankable by mutual
information.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .core import AlgebraParams, RngStream, State, bind, bundle

__all__ = [
    "EncodedSequence",
    "LeftFoldAccumulator",
    "MemoryState",
    "cue",
    "encode_chaining",
    "encode_plain",
    "encode_position_markers",
    "l_state",
    "memory_state",
    "r_state",
]

_FOLDS = ("left", "right")


def _check_items(items: list[State], eta: State) -> None:
    if not items:
        raise ValueError("item sequence must be non-empty")
    for item in items:
        if item.dimension != eta.dimension:
            raise ValueError(
                f"dimension mismatch: {item.dimension} vs {eta.dimension}"
            )


def _fold_left(eta: State, terms: list[State], theta: float, rng: RngStream) -> State:
    acc = eta
    for term in terms:
        acc = bundle(acc, term, theta, rng)
    return acc


def _fold_right(eta: State, terms: list[State], theta: float, rng: RngStream) -> State:
    # built innermost-first, so the whole sequence must be known
    acc = terms[-1]
    for term in reversed(terms[:-1]):
        acc = bundle(term, acc, theta, rng)
    return bundle(eta, acc, theta, rng)


def l_state(items: list[State], eta: State, theta: float, rng: RngStream) -> State:
    """Left fold of the items into eta: ((((eta + i1) + i2) + ...) + in."""
    _check_items(items, eta)
    return _fold_left(eta, list(items), theta, rng)


def r_state(items: list[State], eta: State, theta: float, rng: RngStream) -> State:
    """Right fold of the items into eta: eta + (i1 + (i2 + (... + in)))."""
    _check_items(items, eta)
    return _fold_right(eta, list(items), theta, rng)


class LeftFoldAccumulator:
    """Streaming left fold: feed items as they arrive.

    After appending i1..ik, ``state`` equals ``l_state(items[:k], ...)``
    computed with the same stream, bit for bit.
    """

    __slots__ = ("_state", "_theta", "_rng", "count")

    def __init__(self, eta: State, theta: float, rng: RngStream):
        self._state = eta
        self._theta = theta
        self._rng = rng
        self.count = 0

    def append(self, item: State) -> None:
        self._state = bundle(self._state, item, self._theta, self._rng)
        self.count += 1

    @property
    def state(self) -> State:
        return self._state


@dataclass(frozen=True)
class MemoryState:
    """Both fold orders of one item sequence, over disjoint noise streams."""

    left: State
    right: State
    params: AlgebraParams


def memory_state(
    items: list[State], eta: State, params: AlgebraParams, rng: RngStream
) -> MemoryState:
    """Fold the sequence both ways.

    The left fold draws from rng.derive(0) and the right fold from
    rng.derive(1), so the two states are conditionally independent
    given the items.
    """
    left = l_state(items, eta, params.theta, rng.derive(0))
    right = r_state(items, eta, params.theta, rng.derive(1))
    return MemoryState(left=left, right=right, params=params)


@dataclass(frozen=True)
class EncodedSequence:
    """A folded encoding plus the bookkeeping needed to cue it later.

    ``marker_states`` is present exactly for the position-marker
    scheme, where retrieval needs the same markers again.
    """

    scheme: str
    fold: str
    state: State
    item_labels: list[str] = field(default_factory=list)
    marker_states: list[State] | None = None

    def __post_init__(self):
        if not self.item_labels:
            raise ValueError("item_labels must be non-empty")
        if self.scheme == "position-marker":
            if self.marker_states is None or len(self.marker_states) < len(
                self.item_labels
            ):
                raise ValueError(
                    "position-marker encoding needs one marker per item"
                )
        elif self.marker_states is not None:
            raise ValueError(f"{self.scheme} encoding carries no markers")


def _default_labels(n: int) -> list[str]:
    if n <= 26:
        return [chr(ord("a") + i) for i in range(n)]
    return [f"i{i + 1}" for i in range(n)]


def _encode(
    scheme: str,
    terms: list[State],
    eta: State,
    theta: float,
    rng: RngStream,
    fold: str,
    labels: list[str],
    markers: list[State] | None = None,
) -> EncodedSequence:
    if fold not in _FOLDS:
        raise ValueError(f"fold must be 'left' or 'right', got {fold!r}")
    if fold == "left":
        state = _fold_left(eta, terms, theta, rng)
    else:
        state = _fold_right(eta, terms, theta, rng)
    return EncodedSequence(scheme, fold, state, labels, markers)


def encode_plain(
    items: list[State],
    eta: State,
    theta: float,
    rng: RngStream,
    fold: str = "left",
    labels: list[str] | None = None,
) -> EncodedSequence:
    """Fold the raw items, unbound. Equivalent to l_state / r_state."""
    _check_items(items, eta)
    labels = list(labels) if labels is not None else _default_labels(len(items))
    return _encode("plain", list(items), eta, theta, rng, fold, labels)


def encode_position_markers(
    items: list[State],
    markers: list[State],
    eta: State,
    theta: float,
    rng: RngStream,
    fold: str = "left",
    labels: list[str] | None = None,
) -> EncodedSequence:
    """Fold item XNOR marker_i terms: position i is addressed by marker i.

    Markers should be mutually quasi-orthogonal random states; there
    must be at least as many markers as items. Cueing the result with
    item i raises the MI of marker i above the other markers, and
    cueing with marker i raises item i.
    """
    _check_items(items, eta)
    if len(markers) < len(items):
        raise ValueError(
            f"need at least {len(items)} markers, got {len(markers)}"
        )
    for marker in markers:
        if marker.dimension != eta.dimension:
            raise ValueError(
                f"dimension mismatch: {marker.dimension} vs {eta.dimension}"
            )
    terms = [bind(item, marker) for item, marker in zip(items, markers)]
    labels = list(labels) if labels is not None else _default_labels(len(items))
    return _encode(
        "position-marker", terms, eta, theta, rng, fold, labels, list(markers)
    )


def encode_chaining(
    items: list[State],
    eta: State,
    theta: float,
    rng: RngStream,
    fold: str = "left",
    labels: list[str] | None = None,
) -> EncodedSequence:
    """Fold item XNOR predecessor terms; the first item is bound to eta.

    Cueing the result with an interior item raises the MI of both of
    its neighbours, since the item appears once as successor and once
    as predecessor.
    """
    _check_items(items, eta)
    terms = [bind(items[0], eta)]
    terms += [bind(items[i], items[i - 1]) for i in range(1, len(items))]
    labels = list(labels) if labels is not None else _default_labels(len(items))
    return _encode("chaining", terms, eta, theta, rng, fold, labels)


def cue(container: State, probe: State) -> State:
    """Bind a probe into a container state.

    Binding is self-inverse, so anything that was bound to the probe
    before folding is released toward the foreground of the result.
    """
    return bind(container, probe)
