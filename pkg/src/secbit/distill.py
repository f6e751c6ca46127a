"""Advantage distillation: block filtering, analytic entropies, simulation.

The protocol's first step: both honest parties take ``N`` samples, accept
only when their own bit string alternates (0101... or 1010...), and keep
the final bit.  For the canonical partially secret distribution the two
conditional uncertainties after that step have closed forms,

    H(a'|b') = h( eps^N / (eps^N + (1-eps)^N) )
    H(a'|e)  = h( mu^N  / (eps^N + (1-eps)^N) )

with ``eps`` the per-sample disagreement probability and ``h`` the binary
entropy.  The second step (information reconciliation plus privacy
amplification) succeeds exactly when ``H(a'|b') < H(a'|e)``; only that
entropy condition is evaluated here, never the coding itself.

All N-th power ratios are computed in log space: plain ``eps**N``
underflows near ``N ~ 500``.
"""

from __future__ import annotations

import math
from collections.abc import Sequence
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .distributions import CanonicalParams, TripartiteDistribution
from .errors import (
    EmptyBlockError,
    InvalidParamsError,
    NotBinaryError,
    NotNormalizedError,
    OutOfRangeError,
    RatioOutOfRangeError,
)

#: Strictness margin for the entropy condition; the family with
#: ``eta01 + eta10 = 1`` makes the two entropies exactly equal, and
#: floating-point noise must not report spurious success there.
STRICTNESS_MARGIN = 1e-12

_SIM_CHUNK = 1 << 16


def binary_entropy(r: float) -> float:
    """Shannon entropy of the distribution ``(r, 1-r)`` in bits.

    ``0 log 0`` is read as 0, so the endpoints give zero entropy.
    """
    if not (0.0 <= r <= 1.0):
        raise OutOfRangeError(f"binary entropy argument must lie in [0, 1], got {r}")
    if r == 0.0 or r == 1.0:
        return 0.0
    return float(-r * math.log2(r) - (1.0 - r) * math.log2(1.0 - r))


def block_error_rate(params: CanonicalParams, block_length: int) -> float:
    """Probability the kept bits differ, conditioned on both accepting.

    Equals ``eps^N / (eps^N + (1-eps)^N)``, evaluated as
    ``1 / (1 + ((1-eps)/eps)^N)`` in log space.
    """
    _require_block(block_length)
    eps = params.epsilon
    if eps == 0.0:
        return 0.0
    gap = block_length * (math.log1p(-eps) - math.log(eps))
    return float(math.exp(-np.logaddexp(0.0, gap)))


def bob_uncertainty(params: CanonicalParams, block_length: int) -> float:
    """Bob's remaining uncertainty about Alice's kept bit, ``h`` of the block error."""
    return binary_entropy(block_error_rate(params, block_length))


def eve_uncertainty(params: CanonicalParams, block_length: int) -> float:
    """Eve's remaining uncertainty about Alice's kept bit.

    ``h`` of ``mu^N / (eps^N + (1-eps)^N)``, the conditional probability
    that Eve learned nothing from an accepted block.  The ratio cannot
    exceed one for valid parameters (``eps <= 1 - mu`` forces
    ``mu <= 1 - eps``); a defensive check reports corruption otherwise.
    """
    _require_block(block_length)
    eps = params.epsilon
    n = block_length
    if eps == 0.0:
        ratio = params.mu**n
    else:
        log_den = np.logaddexp(n * math.log(eps), n * math.log1p(-eps))
        ratio = math.exp(n * math.log(params.mu) - log_den)
    if ratio > 1.0 + 1e-12:
        raise RatioOutOfRangeError(f"blind-Eve ratio {ratio} exceeds 1; corrupt parameters")
    return binary_entropy(min(ratio, 1.0))


@dataclass(frozen=True)
class ProtocolReport:
    """Analytic quantities of the first protocol step at one block length."""

    params: CanonicalParams
    block_length: int
    epsilon: float
    block_error_rate: float
    bob_uncertainty: float
    eve_uncertainty: float
    satisfied: bool

    def __post_init__(self) -> None:
        if not (0.0 <= self.block_error_rate <= 0.5):
            raise InvalidParamsError("block error rate must lie in [0, 1/2]")
        for h in (self.bob_uncertainty, self.eve_uncertainty):
            if not (0.0 <= h <= 1.0):
                raise InvalidParamsError("entropies must lie in [0, 1]")


def protocol_report(params: CanonicalParams, block_length: int) -> ProtocolReport:
    """Evaluate all analytic quantities at a fixed block length."""
    bob = bob_uncertainty(params, block_length)
    eve = eve_uncertainty(params, block_length)
    return ProtocolReport(
        params=params,
        block_length=block_length,
        epsilon=params.epsilon,
        block_error_rate=block_error_rate(params, block_length),
        bob_uncertainty=bob,
        eve_uncertainty=eve,
        satisfied=eve - bob > STRICTNESS_MARGIN,
    )


def minimal_block_length(params: CanonicalParams, n_max: int) -> Optional[ProtocolReport]:
    """Smallest block length making Bob strictly less uncertain than Eve.

    Returns None when no ``N <= n_max`` satisfies the condition; that
    includes the degenerate perfect-secrecy case ``eps = 0`` (both
    uncertainties vanish) and the family ``eta01 + eta10 = 1``, where the
    two uncertainties coincide for every ``N``.
    """
    _require_block(n_max)
    for n in range(1, n_max + 1):
        report = protocol_report(params, n)
        if report.satisfied:
            return report
    return None


def string_filter(block: Sequence[int] | str) -> Optional[tuple[int, int]]:
    """Accept a block iff its bits alternate; report variant and kept bit.

    Returns ``(first_bit, last_bit)`` on acceptance — the variant label is
    the starting bit, the symbol kept by the party is the final bit — and
    None on rejection.
    """
    bits = [int(ch) for ch in block] if isinstance(block, str) else [int(x) for x in block]
    if not bits:
        raise EmptyBlockError("protocol blocks must contain at least one bit")
    if any(bit not in (0, 1) for bit in bits):
        raise InvalidParamsError("blocks must consist of bits")
    start = bits[0]
    if any(bits[i] != (start + i) % 2 for i in range(len(bits))):
        return None
    return start, bits[-1]


@dataclass(frozen=True)
class SimulationReport:
    """Empirical counts from sampling the block protocol."""

    block_length: int
    samples: int
    seed: int
    accepted: int
    acceptance_rate: float
    disagreements: int
    disagreement_rate: float
    eve_blank_blocks: int
    eve_blank_rate: float


def simulate_advantage_distillation(
    p: TripartiteDistribution,
    block_length: int,
    samples: int,
    seed: int,
) -> SimulationReport:
    """Sample the first protocol step from a normalized binary distribution.

    Draws ``samples`` blocks of ``block_length`` iid triples, filters
    Alice's and Bob's strings independently, and reports the acceptance
    rate, the disagreement rate of the kept bits among accepted blocks,
    and the fraction of accepted blocks in which every Eve symbol was 0
    (for canonical-form inputs: the blocks where Eve knows nothing).
    Deterministic given the seed; samples are drawn in fixed-size chunks
    with one generator per chunk, so aggregates are order-independent.
    """
    if p.dims[0] != 2 or p.dims[1] != 2:
        raise NotBinaryError(f"simulation needs binary honest alphabets, got {p.dims}")
    if abs(p.mass - 1.0) > 1e-9:
        raise NotNormalizedError(f"distribution mass {p.mass} is not 1")
    if samples < 1:
        raise InvalidParamsError(f"samples must be >= 1, got {samples}")
    _require_block(block_length)

    d_a, d_b, d_e = p.dims
    flat = p.table.ravel()
    flat = flat / flat.sum()
    pattern = np.arange(block_length) % 2

    accepted = disagreements = eve_blank = 0
    done = 0
    chunk_index = 0
    while done < samples:
        count = min(_SIM_CHUNK, samples - done)
        rng = np.random.default_rng([seed, chunk_index])
        draws = rng.choice(len(flat), size=(count, block_length), p=flat)
        e_sym = draws % d_e
        ab = draws // d_e
        b_sym = ab % d_b
        a_sym = ab // d_b

        accept_a = ((a_sym == pattern).all(axis=1)) | ((a_sym == 1 - pattern).all(axis=1))
        accept_b = ((b_sym == pattern).all(axis=1)) | ((b_sym == 1 - pattern).all(axis=1))
        ok = accept_a & accept_b
        accepted += int(ok.sum())
        disagreements += int((a_sym[ok, -1] != b_sym[ok, -1]).sum())
        eve_blank += int((e_sym[ok] == 0).all(axis=1).sum())
        done += count
        chunk_index += 1

    return SimulationReport(
        block_length=block_length,
        samples=samples,
        seed=seed,
        accepted=accepted,
        acceptance_rate=accepted / samples,
        disagreements=disagreements,
        disagreement_rate=disagreements / accepted if accepted else math.nan,
        eve_blank_blocks=eve_blank,
        eve_blank_rate=eve_blank / accepted if accepted else math.nan,
    )


def exact_block_statistics(
    p: TripartiteDistribution, block_length: int
) -> dict[str, float]:
    """Exact accept/disagree/blank-Eve probabilities for any binary input.

    Computed by direct products over the two alternating patterns, with no
    symmetry assumptions; serves as the simulator's analytic column.
    """
    if p.dims[0] != 2 or p.dims[1] != 2:
        raise NotBinaryError(f"exact statistics need binary honest alphabets, got {p.dims}")
    _require_block(block_length)
    t = p.table / p.table.sum()
    pab = t.sum(axis=2)
    blank = t[:, :, 0]
    pattern = np.arange(block_length) % 2

    def product(cells: np.ndarray, alice: np.ndarray, bob: np.ndarray) -> float:
        return float(np.prod(cells[alice, bob]))

    same = product(pab, pattern, pattern) + product(pab, 1 - pattern, 1 - pattern)
    diff = product(pab, pattern, 1 - pattern) + product(pab, 1 - pattern, pattern)
    blank_mass = (
        product(blank, pattern, pattern)
        + product(blank, 1 - pattern, 1 - pattern)
        + product(blank, pattern, 1 - pattern)
        + product(blank, 1 - pattern, pattern)
    )
    accept = same + diff
    return {
        "acceptance_rate": accept,
        "disagreement_rate": diff / accept if accept > 0.0 else math.nan,
        "eve_blank_rate": blank_mass / accept if accept > 0.0 else math.nan,
    }


def _require_block(block_length: int) -> None:
    if block_length < 1:
        raise InvalidParamsError(f"block length must be >= 1, got {block_length}")
