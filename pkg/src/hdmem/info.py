"""Mutual information between binary states.

The joint distribution of two states is the 2x2 table of
component-pair counts, tallied exactly with integer popcounts. Exact
mutual information is the plug-in estimate on that table, in nats.

A quadratic approximation expresses MI through the normed Hamming
distance alone: 8*q*(1-q)*(d - 1/2)**2. Distance is one bind and one
popcount away, which is what makes this form computable inside the
algebra itself; it is tight near d = 1/2 and undershoots toward the
endpoints.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import State, _popcount, _require_same_dimension, distance

__all__ = [
    "JointTable",
    "MIProfile",
    "approx_mi_from_distance",
    "joint_distribution",
    "mi_memory",
    "mi_profile",
    "mutual_information_approx",
    "mutual_information_exact",
]


@dataclass(frozen=True)
class JointTable:
    """Exact 2x2 joint component distribution of a state pair.

    ``nab`` counts components where x has bit a and y has bit b; the
    four counts sum to ``dimension``. The p* properties are the
    corresponding fractions.
    """

    n00: int
    n01: int
    n10: int
    n11: int
    dimension: int

    def __post_init__(self):
        if min(self.n00, self.n01, self.n10, self.n11) < 0:
            raise ValueError("cell counts must be non-negative")
        if self.n00 + self.n01 + self.n10 + self.n11 != self.dimension:
            raise ValueError("cell counts must sum to the dimension")

    @property
    def p00(self) -> float:
        return self.n00 / self.dimension

    @property
    def p01(self) -> float:
        return self.n01 / self.dimension

    @property
    def p10(self) -> float:
        return self.n10 / self.dimension

    @property
    def p11(self) -> float:
        return self.n11 / self.dimension

    @property
    def activity_x(self) -> float:
        return (self.n10 + self.n11) / self.dimension

    @property
    def activity_y(self) -> float:
        return (self.n01 + self.n11) / self.dimension

    def as_matrix(self) -> np.ndarray:
        """Fractions as a 2x2 array indexed [x_bit, y_bit]."""
        return np.array([[self.p00, self.p01], [self.p10, self.p11]])


def joint_distribution(x: State, y: State) -> JointTable:
    """Count the four component-pair combinations exactly."""
    _require_same_dimension(x, y)
    n = x.dimension
    n11 = _popcount(x.data & y.data)
    n10 = _popcount(x.data) - n11
    n01 = _popcount(y.data) - n11
    return JointTable(n - n11 - n10 - n01, n01, n10, n11, n)


def _plugin_mi(table: JointTable) -> float:
    n = table.dimension
    nx1 = table.n10 + table.n11
    ny1 = table.n01 + table.n11
    nx0 = n - nx1
    ny0 = n - ny1

    def term(nab: int, na: int, nb: int) -> float:
        # integer products stay exact, so the log argument is computed
        # from a single rounding
        if nab == 0:
            return 0.0
        return (nab / n) * math.log(nab * n / (na * nb))

    # grouping pairs the cells swapped by transposition, making the
    # result bit-exactly symmetric in (x, y)
    total = (term(table.n00, nx0, ny0) + term(table.n11, nx1, ny1)) + (
        term(table.n01, nx0, ny1) + term(table.n10, nx1, ny0)
    )
    return max(0.0, total)


def mutual_information_exact(x: State, y: State) -> float:
    """Plug-in mutual information of the empirical joint table, in nats.

    Zero when either state is constant. Floating-point negatives from
    near-independent tables are clamped to 0.
    """
    return _plugin_mi(joint_distribution(x, y))


def approx_mi_from_distance(d: float, q: float) -> float:
    """Quadratic MI approximation 8*q*(1-q)*(d - 1/2)**2, in nats."""
    if not 0.0 < q < 1.0:
        raise ValueError(f"q must be in (0, 1), got {q}")
    if not 0.0 <= d <= 1.0:
        raise ValueError(f"distance must be in [0, 1], got {d}")
    return 8.0 * q * (1.0 - q) * (d - 0.5) ** 2


def mutual_information_approx(x: State, y: State, q: float) -> float:
    """Distance-based MI approximation for states of mean activity q."""
    return approx_mi_from_distance(distance(x, y), q)


@dataclass(frozen=True)
class MIProfile:
    """Candidates ranked by mutual information against one container.

    ``entries`` is a list of (label, mi) pairs sorted by descending mi;
    exact ties order by label.
    """

    entries: list[tuple[str, float]]

    @property
    def labels(self) -> list[str]:
        return [label for label, _ in self.entries]

    @property
    def best(self) -> str:
        return self.entries[0][0]

    def value(self, label: str) -> float:
        for lab, mi in self.entries:
            if lab == label:
                return mi
        raise KeyError(label)


def mi_profile(
    container: State,
    candidates,
    mode: str = "exact",
    q: float | None = None,
) -> MIProfile:
    """Rank labelled candidate states by MI against ``container``.

    ``candidates`` is a sequence of (label, state) pairs. ``mode`` is
    "exact" or "approx"; approx requires ``q``.
    """
    pairs = list(candidates)
    if not pairs:
        raise ValueError("candidates must be non-empty")
    if mode == "exact":
        scored = [(lab, mutual_information_exact(container, st)) for lab, st in pairs]
    elif mode == "approx":
        if q is None:
            raise ValueError("approx mode requires q")
        scored = [(lab, mutual_information_approx(container, st, q)) for lab, st in pairs]
    else:
        raise ValueError(f"mode must be 'exact' or 'approx', got {mode!r}")
    scored.sort(key=lambda pair: (-pair[1], pair[0]))
    return MIProfile(scored)


def mi_memory(memory, x: State, rho_r: float = 1.0, rho_l: float = 1.0,
              mode: str = "exact", q: float | None = None) -> float:
    """Weighted readout rho_r * I(R; x) + rho_l * I(L; x).

    ``memory`` carries the left and right fold states; the weights are
    retrieval gains in [0, 1]. In approx mode ``q`` defaults to the
    memory's own item activity.
    """
    for name, rho in (("rho_r", rho_r), ("rho_l", rho_l)):
        if not 0.0 <= rho <= 1.0:
            raise ValueError(f"{name} must be in [0, 1], got {rho}")
    if mode == "exact":
        return rho_r * mutual_information_exact(memory.right, x) + rho_l * (
            mutual_information_exact(memory.left, x)
        )
    if mode == "approx":
        if q is None:
            q = memory.params.q
        return rho_r * mutual_information_approx(memory.right, x, q) + rho_l * (
            mutual_information_approx(memory.left, x, q)
        )
    raise ValueError(f"mode must be 'exact' or 'approx', got {mode!r}")
