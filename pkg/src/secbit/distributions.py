"""Tripartite and bipartite probability distributions over finite alphabets.

Distributions are dense nonnegative tensors and are allowed to be
unnormalized: every measure built on top of them is invariant under
positive rescaling, so mass other than one is never an error.  All types
are immutable after construction and safe to share between threads.
"""

from __future__ import annotations

from collections.abc import Mapping
from dataclasses import dataclass

import numpy as np

from .errors import (
    BadShapeError,
    DimensionOverflowError,
    IndexOutOfRangeError,
    InvalidParamsError,
    NegativeEntryError,
    OutOfRangeError,
    ZeroMassError,
)

DEFAULT_TENSOR_CELL_CAP = 10_000_000


def _freeze(values, ndim: int, what: str) -> np.ndarray:
    arr = np.array(values, dtype=float)
    if arr.ndim != ndim:
        raise BadShapeError(f"{what} must be {ndim}-dimensional, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise InvalidParamsError(f"{what} contains non-finite entries")
    if np.any(arr < 0.0):
        raise NegativeEntryError(f"{what} contains a negative entry")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class TripartiteDistribution:
    """Joint distribution ``P(a, b, e)`` of Alice, Bob and Eve's symbols."""

    table: np.ndarray

    def __post_init__(self) -> None:
        table = _freeze(self.table, 3, "distribution table")
        if not table.sum() > 0.0:
            raise ZeroMassError("distribution has zero total mass")
        object.__setattr__(self, "table", table)

    @property
    def dims(self) -> tuple[int, int, int]:
        return self.table.shape

    @property
    def mass(self) -> float:
        return float(self.table.sum())

    @property
    def is_binary(self) -> bool:
        """True when both honest parties hold a bit."""
        return self.table.shape[0] == 2 and self.table.shape[1] == 2

    def normalized(self) -> "TripartiteDistribution":
        return TripartiteDistribution(self.table / self.mass)


@dataclass(frozen=True)
class BipartiteDistribution:
    """Joint distribution ``P(a, b)`` of the honest parties, Eve decoupled."""

    table: np.ndarray

    def __post_init__(self) -> None:
        table = _freeze(self.table, 2, "distribution table")
        if not table.sum() > 0.0:
            raise ZeroMassError("distribution has zero total mass")
        object.__setattr__(self, "table", table)

    @property
    def dims(self) -> tuple[int, int]:
        return self.table.shape

    @property
    def mass(self) -> float:
        return float(self.table.sum())

    def normalized(self) -> "BipartiteDistribution":
        return BipartiteDistribution(self.table / self.mass)


@dataclass(frozen=True)
class CanonicalParams:
    """Parameters of the canonical partially secret distribution.

    With probability ``mu`` Eve learns only that the honest bits agree;
    with probability ``1 - mu`` she learns both bits exactly, the four
    joint values weighted by ``eta = (eta00, eta01, eta10, eta11)``.
    """

    mu: float
    eta: tuple[float, float, float, float]

    def __post_init__(self) -> None:
        mu = float(self.mu)
        eta = tuple(float(x) for x in self.eta)
        if len(eta) != 4:
            raise InvalidParamsError("eta must have exactly four components")
        if not (0.5 < mu <= 1.0):
            raise InvalidParamsError(f"mu must lie in (1/2, 1], got {mu}")
        if any(x < 0.0 for x in eta):
            raise InvalidParamsError("eta components must be nonnegative")
        if abs(sum(eta) - 1.0) > 1e-12:
            raise InvalidParamsError(f"eta must sum to 1, got {sum(eta)!r}")
        object.__setattr__(self, "mu", mu)
        object.__setattr__(self, "eta", eta)

    @property
    def epsilon(self) -> float:
        """Probability that the honest parties' bits disagree."""
        return (1.0 - self.mu) * (self.eta[1] + self.eta[2])


def from_entries(
    dims: tuple[int, int, int],
    cells: Mapping[tuple[int, int, int], float],
) -> TripartiteDistribution:
    """Build a dense distribution from a sparse cell mapping.

    Unlisted cells are zero.  Raises on negative probabilities, indices
    outside ``dims``, and an entirely massless table.
    """
    d_a, d_b, d_e = dims
    if min(d_a, d_b, d_e) < 1:
        raise BadShapeError("every alphabet must have at least one symbol")
    table = np.zeros((d_a, d_b, d_e))
    for (a, b, e), p in cells.items():
        if not (0 <= a < d_a and 0 <= b < d_b and 0 <= e < d_e):
            raise IndexOutOfRangeError(f"cell ({a},{b},{e}) outside dims {dims}")
        if p < 0.0:
            raise NegativeEntryError(f"cell ({a},{b},{e}) has negative probability {p}")
        table[a, b, e] = p
    return TripartiteDistribution(table)


def bipartite_from_entries(
    dims: tuple[int, int],
    cells: Mapping[tuple[int, int], float],
) -> BipartiteDistribution:
    """Bipartite counterpart of :func:`from_entries`."""
    d_a, d_b = dims
    if min(d_a, d_b) < 1:
        raise BadShapeError("every alphabet must have at least one symbol")
    table = np.zeros((d_a, d_b))
    for (a, b), p in cells.items():
        if not (0 <= a < d_a and 0 <= b < d_b):
            raise IndexOutOfRangeError(f"cell ({a},{b}) outside dims {dims}")
        if p < 0.0:
            raise NegativeEntryError(f"cell ({a},{b}) has negative probability {p}")
        table[a, b] = p
    return BipartiteDistribution(table)


def marginal_ab(p: TripartiteDistribution) -> BipartiteDistribution:
    """Sum out Eve's symbol: ``P(a, b) = sum_e P(a, b, e)``."""
    return BipartiteDistribution(p.table.sum(axis=2))


def product_with_eve(p_ab: BipartiteDistribution, q_e) -> TripartiteDistribution:
    """Attach an independent Eve: ``P(a, b, e) = P(a, b) * Q(e)``."""
    weights = _freeze(q_e, 1, "Eve marginal")
    if not weights.sum() > 0.0:
        raise ZeroMassError("Eve marginal has zero total mass")
    return TripartiteDistribution(p_ab.table[:, :, None] * weights[None, None, :])


def point_mass_eve(p_ab: BipartiteDistribution) -> TripartiteDistribution:
    """Embed with a single deterministic Eve symbol (``d_E = 1``)."""
    return product_with_eve(p_ab, [1.0])


def tensor_power(
    p_ab: BipartiteDistribution,
    copies: int,
    max_cells: int = DEFAULT_TENSOR_CELL_CAP,
) -> BipartiteDistribution:
    """Joint distribution of ``copies`` independent samples.

    The composite index encodes the sample string positionally in base
    ``d_A`` (respectively ``d_B``) with sample 0 as the most significant
    digit, so the cell for strings ``(a_0 .. a_{N-1})``, ``(b_0 .. b_{N-1})``
    is the product of the per-sample probabilities.
    """
    if copies < 1:
        raise OutOfRangeError(f"copies must be >= 1, got {copies}")
    d_a, d_b = p_ab.dims
    if (d_a**copies) * (d_b**copies) > max_cells:
        raise DimensionOverflowError(
            f"{d_a}^{copies} x {d_b}^{copies} cells exceed the cap of {max_cells}"
        )
    table = p_ab.table
    for _ in range(copies - 1):
        table = np.kron(table, p_ab.table)
    return BipartiteDistribution(table)


def shared_bit() -> BipartiteDistribution:
    """The perfectly correlated uniform bit pair: diagonal 1/2, rest 0."""
    return BipartiteDistribution(np.array([[0.5, 0.0], [0.0, 0.5]]))


def satellite_scenario(err_a: float, err_b: float, err_e: float) -> TripartiteDistribution:
    """Broadcast source seen through three binary symmetric channels.

    A uniform bit ``r`` is sent to all parties; party ``x`` receives it
    flipped with probability ``err_x``.  Error rates must lie in [0, 1/2].
    """
    rates = (err_a, err_b, err_e)
    for rate in rates:
        if not (0.0 <= rate <= 0.5):
            raise OutOfRangeError(f"error rate must lie in [0, 1/2], got {rate}")
    channels = [np.array([[1.0 - r, r], [r, 1.0 - r]]) for r in rates]
    table = 0.5 * np.einsum("ar,br,er->abe", *channels)
    return TripartiteDistribution(table)


def canonical_distribution(params: CanonicalParams) -> TripartiteDistribution:
    """Dense form of the canonical partially secret distribution.

    Eve's alphabet has five symbols: 0 marks the secret component (both
    honest bit values, weight ``mu/2`` each); 1..4 mark the components
    where she knows the bits, one symbol per joint value.
    """
    mu = params.mu
    eta00, eta01, eta10, eta11 = params.eta
    table = np.zeros((2, 2, 5))
    table[0, 0, 0] = mu / 2.0
    table[1, 1, 0] = mu / 2.0
    table[0, 0, 1] = (1.0 - mu) * eta00
    table[1, 1, 2] = (1.0 - mu) * eta11
    table[0, 1, 3] = (1.0 - mu) * eta01
    table[1, 0, 4] = (1.0 - mu) * eta10
    return TripartiteDistribution(table)


def randomization_example() -> TripartiteDistribution:
    """Distribution where joint local randomization beats reversible filtering.

    Its secret-bit fraction is exactly 1/2 and no reversible pair of local
    filters improves that, yet adding a little symmetric noise on both
    honest sides pushes the secret-bit fraction strictly above 1/2.
    """
    return from_entries(
        (2, 2, 2),
        {
            (0, 0, 0): 6 / 24,
            (1, 1, 0): 6 / 24,
            (0, 1, 1): 5 / 24,
            (1, 0, 1): 5 / 24,
            (1, 1, 1): 2 / 24,
        },
    )
