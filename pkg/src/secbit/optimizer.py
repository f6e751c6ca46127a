"""Numerical lower bounds on the extractable secret-bit fraction.

No closed form exists for the maximal extractable secret-bit fraction of
a general coupled distribution, so this module searches the space of
bit-output filter pairs directly.  Two searches are provided:

* :func:`estimate_mesbf` — multi-start coordinate-wise multiplicative
  hill climbing.  The objective contains min() kinks, so the search is
  gradient free; non-concavity is addressed by restarts plus a fixed set
  of deterministic baseline starts.  Deterministic given the seed.
* :func:`brute_force_mesbf` — a slow grid oracle for small instances: an
  exhaustive joint scan of coarse filter pairs for both parties (the grid
  family automatically covers row-swapped variants), funneled into
  coordinate-wise sweeps over shrinking per-entry grids.  Intended only
  as a cross-check; a lower bound whose gap shrinks with the grid
  resolution.

Every value reported by either search is recomputed through the measures
pipeline for the reported witness, so results are certified lower bounds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .distributions import TripartiteDistribution, randomization_example
from .errors import InvalidParamsError, TooLargeError, ZeroMassError
from .filtration import Filtration, apply, is_reversible
from .measures import MeasureResult, mesbf_reversible, secret_bit_fraction

DEFAULT_SEED = 1729

_CHUNK = 1 << 17


@dataclass(frozen=True)
class SearchConfig:
    """Knobs shared by both searches; all randomness flows from ``seed``."""

    restarts: int = 64
    iterations: int = 2000
    seed: int = DEFAULT_SEED
    entry_floor: float = 1e-9
    grid_points: int = 12

    def __post_init__(self) -> None:
        if self.restarts < 1 or self.iterations < 1 or self.grid_points < 2:
            raise InvalidParamsError("restarts, iterations and grid_points must be >= 1 (grid >= 2)")
        if not self.entry_floor > 0.0:
            raise InvalidParamsError("entry_floor must be strictly positive")


def _lambda_raw(d_a: np.ndarray, j_b: np.ndarray, table: np.ndarray) -> float:
    """Secret-bit fraction after filtering, ndarray fast path."""
    filtered = np.einsum("ia,jb,abe->ije", d_a, j_b, table)
    total = filtered.sum()
    if not total > 0.0:
        return 0.0
    return float(2.0 * np.minimum(filtered[0, 0, :], filtered[1, 1, :]).sum() / total)


def _certified_lambda(d_a: np.ndarray, j_b: np.ndarray, p: TripartiteDistribution) -> float:
    """Recompute through the real pipeline; the value actually reported."""
    return secret_bit_fraction(apply(Filtration(d_a), Filtration(j_b), p))


def _identity_projection(d: int) -> np.ndarray:
    proj = np.zeros((2, d))
    proj[0, 0] = 1.0
    proj[1, min(1, d - 1)] = 1.0
    return proj


def estimate_mesbf(
    p: TripartiteDistribution,
    cfg: SearchConfig | None = None,
    extra_starts: tuple[tuple[Filtration, Filtration], ...] = (),
) -> MeasureResult:
    """Multi-start search for the best bit-output filter pair.

    Every start — the unbiased coin-toss pair (secret-bit fraction
    exactly 1/2), an identity-like projection, the sparse selecting
    projections, any ``extra_starts``, and ``cfg.restarts`` log-uniform
    random samples — is refined by capped coordinate-wise multiplicative
    hill climbing (``cfg.iterations`` objective evaluations per start);
    the leaders then get uncapped fine refinement.  The reported value
    is the secret-bit fraction of the reported witness recomputed
    through the measures pipeline, hence a certified lower bound, and it
    never falls below the coin-toss baseline.  Identical seeds and
    configs give identical results bit for bit.

    ``extra_starts`` lets callers seed the search with known-good pairs,
    e.g. witnesses for a preprocessed distribution composed with the
    preprocessing step.
    """
    cfg = cfg or SearchConfig()
    d_a, d_b, _ = p.dims
    table = p.table
    floor = cfg.entry_floor
    log_floor = math.log(floor)

    starts: list[tuple[str, np.ndarray, np.ndarray]] = [
        ("coin-toss", np.full((2, d_a), 0.5), np.full((2, d_b), 0.5)),
        ("identity-projection", _identity_projection(d_a), _identity_projection(d_b)),
    ]
    for idx, (_, m_a, m_b) in enumerate(_selecting_seeds(d_a, d_b, floor)):
        starts.append((f"projection-{idx}", m_a, m_b))
    for k, (left, right) in enumerate(extra_starts):
        starts.append((f"seeded-{k}", left.matrix, right.matrix))
    for r in range(cfg.restarts):
        rng = np.random.default_rng([cfg.seed, r])
        sample = np.exp(rng.uniform(log_floor, 0.0, size=2 * (d_a + d_b)))
        starts.append(
            (f"restart-{r}", sample[: 2 * d_a].reshape(2, d_a), sample[2 * d_a :].reshape(2, d_b))
        )

    refined: list[tuple[float, np.ndarray, np.ndarray, str]] = []
    for source, m_a, m_b in starts:
        m_a = np.clip(np.asarray(m_a, dtype=float), floor, 1.0)
        m_b = np.clip(np.asarray(m_b, dtype=float), floor, 1.0)
        value, m_a, m_b = _coordinate_polish(
            table, m_a, m_b, 8, floor, _CHEAP_SPANS, max_evals=cfg.iterations
        )
        refined.append((value, m_a, m_b, source))
    refined.sort(key=lambda item: -item[0])

    best = (-1.0, refined[0][1], refined[0][2], "")
    for _, m_a, m_b, source in refined[:5]:
        value, m_a, m_b = _coordinate_polish(table, m_a, m_b, 24, floor, _FINE_SPANS)
        if value > best[0]:
            best = (value, m_a, m_b, source)
    _, m_a, m_b, source = best
    _, m_a, m_b = _coordinate_polish(table, m_a, m_b, 24, floor, _FINE_SPANS)

    snapped_a, snapped_b = m_a.copy(), m_b.copy()
    snapped_a[snapped_a < 10.0 * floor] = 0.0
    snapped_b[snapped_b < 10.0 * floor] = 0.0
    try:
        keep_snapped = _certified_lambda(snapped_a, snapped_b, p) >= _certified_lambda(m_a, m_b, p) - 1e-12
    except ZeroMassError:
        keep_snapped = False
    if keep_snapped:
        m_a, m_b = snapped_a, snapped_b

    witness = (Filtration(m_a).as_proper(), Filtration(m_b).as_proper())
    value = _certified_lambda(witness[0].matrix, witness[1].matrix, p)
    return MeasureResult(value, witness, "exact", {"source": source})


def _row_family(grids: list[np.ndarray]) -> np.ndarray:
    """All row vectors with entry ``k`` drawn from ``grids[k]``, row-major."""
    shape = tuple(len(g) for g in grids)
    total = int(np.prod(shape))
    multi = np.unravel_index(np.arange(total), shape)
    family = np.empty((total, len(grids)))
    for k, grid in enumerate(grids):
        family[:, k] = grid[multi[k]]
    return family


def _support_signature(d_a_mat: np.ndarray, j_b: np.ndarray, floor: float) -> tuple:
    """Which entries are live (well above the floor), both matrices pooled.

    Swapping both output bits leaves the objective unchanged, so the
    signature is canonicalized over that mirror symmetry.
    """
    direct = tuple(
        np.concatenate([d_a_mat.ravel(), j_b.ravel()]) > 10.0 * floor
    )
    mirrored = tuple(
        np.concatenate([d_a_mat[::-1].ravel(), j_b[::-1].ravel()]) > 10.0 * floor
    )
    return min(direct, mirrored)


def _joint_scan(
    table: np.ndarray, coarse: np.ndarray, floor: float, top_k: int
) -> list[tuple[float, np.ndarray, np.ndarray]]:
    """Exhaustive scan of coarse filter pairs for both parties jointly.

    The secret-bit fraction after filtering depends on the two parties'
    row-0 pair and row-1 pair only, so all row pairs are contracted once
    against the table and every combination of a row-0 pair with a row-1
    pair is evaluated.  Returns the ``top_k`` best candidates with
    pairwise distinct support signatures, so that later refinement
    explores genuinely different bases of attraction.
    """
    d_a, d_b, d_e = table.shape
    rows_a = _row_family([coarse] * d_a)
    rows_b = _row_family([coarse] * d_b)
    n_a, n_b = len(rows_a), len(rows_b)
    pair_vals = np.einsum("ia,abe,jb->ije", rows_a, table, rows_b).reshape(n_a * n_b, d_e)
    mass = rows_a @ table.sum(axis=2) @ rows_b.T

    total = n_a * n_b
    i_of, j_of = np.divmod(np.arange(total), n_b)
    block = max(1, _CHUNK // total)
    per_chunk = 8 * top_k
    found: list[tuple[float, int, int]] = []
    for start in range(0, total, block):
        stop = min(start + block, total)
        i0, j0 = i_of[start:stop], j_of[start:stop]
        num = 2.0 * np.minimum(pair_vals[start:stop, None, :], pair_vals[None, :, :]).sum(axis=2)
        den = (
            mass[i0, j0][:, None]
            + mass[i_of, j_of][None, :]
            + mass[i0[:, None], j_of[None, :]]
            + mass[i_of[None, :], j0[:, None]]
        )
        lam = (num / den).ravel()
        keep = min(per_chunk, lam.size)
        order = np.argpartition(lam, -keep)[-keep:]
        for flat in order:
            i, j = divmod(int(flat), total)
            found.append((float(lam[flat]), start + i, j))

    found.sort(key=lambda item: (-item[0], item[1], item[2]))
    result: list[tuple[float, np.ndarray, np.ndarray]] = []
    seen: set[tuple] = set()
    for value, p, q in found:
        i0, j0 = divmod(p, n_b)
        i1, j1 = divmod(q, n_b)
        d_a_mat = np.vstack([rows_a[i0], rows_a[i1]])
        j_b_mat = np.vstack([rows_b[j0], rows_b[j1]])
        key = _support_signature(d_a_mat, j_b_mat, floor)
        if key in seen:
            continue
        seen.add(key)
        result.append((value, d_a_mat, j_b_mat))
        if len(result) == top_k:
            break
    return result


_MICRO_SPANS = (4.0,)
_CHEAP_SPANS = (10.0, 2.0, 1.3)
# No wide window here: finalists are already in the right basin, and wide
# sweeps tend to re-introduce spurious entries that lock the refinement.
_FINE_SPANS = (2.0, 1.2, 1.05, 1.01, 1.003, 1.001)


def _coordinate_polish(
    table: np.ndarray,
    d_a_mat: np.ndarray,
    j_b: np.ndarray,
    points: int,
    floor: float,
    spans: tuple[float, ...] = _FINE_SPANS,
    max_evals: int | None = None,
) -> tuple[float, np.ndarray, np.ndarray]:
    """Local grid refinement of a filter pair, windows shrinking per pass.

    Two move families: single entries swept over a local log grid (plus
    the floor, so entries can switch off, and 1.0, so dead entries can
    revive), and coordinated entry pairs moved by a factor and its
    inverse.  The pair moves matter: the objective has ridges along which
    the two diagonal products must stay balanced, and no single-entry
    move can follow them.  Each matrix is re-gauged to peak entry one
    every cycle (the objective is scale invariant per matrix), otherwise
    the scale drifts toward the floor and the windows lose resolution.
    Deterministic; relies on the caller to supply candidates in the right
    bases of attraction.
    """
    n_a = d_a_mat.size
    theta = np.concatenate([d_a_mat.ravel(), j_b.ravel()])
    n = theta.size

    def lam_of(vec: np.ndarray) -> float:
        return _lambda_raw(vec[:n_a].reshape(d_a_mat.shape), vec[n_a:].reshape(j_b.shape), table)

    def regauge() -> None:
        for block in (slice(0, n_a), slice(n_a, n)):
            top = theta[block].max()
            if top > 0.0:
                theta[block] = np.maximum(theta[block] / top, floor)

    evals = 0

    def try_update(candidate: np.ndarray, best: float) -> tuple[float, bool]:
        nonlocal evals
        evals += 1
        trial = lam_of(candidate)
        if trial > best:
            theta[:] = candidate
            return trial, True
        return best, False

    def exhausted() -> bool:
        return max_evals is not None and evals >= max_evals

    row_groups = [
        np.arange(0, d_a_mat.shape[1]),
        np.arange(d_a_mat.shape[1], n_a),
        n_a + np.arange(0, j_b.shape[1]),
        n_a + np.arange(j_b.shape[1], n - n_a),
    ]

    regauge()
    best = lam_of(theta)
    for span in spans:
        factors = np.geomspace(1.0 / span, span, points)
        for _ in range(2):
            if exhausted():
                break
            regauge()
            best = lam_of(theta)
            improved = False
            for i in range(n):
                if exhausted():
                    break
                center = max(theta[i], floor)
                grid = np.geomspace(
                    max(center / span, floor), min(center * span, 1.0), points
                )
                for value in (*grid, floor, 1.0):
                    if value == theta[i]:
                        continue
                    cand = theta.copy()
                    cand[i] = value
                    best, moved = try_update(cand, best)
                    improved |= moved
            # Whole-row rescalings of one matrix against the other track the
            # balance ridges exactly when rows are sparse.
            for row_a in row_groups[:2]:
                for row_b in row_groups[2:]:
                    if exhausted():
                        break
                    for f in factors:
                        if f == 1.0:
                            continue
                        for g in (1.0 / f, f):
                            cand = theta.copy()
                            cand[row_a] = np.clip(cand[row_a] * f, floor, 1.0)
                            cand[row_b] = np.clip(cand[row_b] * g, floor, 1.0)
                            best, moved = try_update(cand, best)
                            improved |= moved
            live = [i for i in range(n) if theta[i] > 10.0 * floor]
            for pos, i in enumerate(live):
                if exhausted():
                    break
                for j in live[pos + 1 :]:
                    # Joint switch-off first: small entries can stabilize each
                    # other so that neither can be floored alone.
                    cand = theta.copy()
                    cand[i] = cand[j] = floor
                    best, moved = try_update(cand, best)
                    improved |= moved
                    for f in factors:
                        if f == 1.0:
                            continue
                        for g in (1.0 / f, f):
                            cand = theta.copy()
                            cand[i] = min(max(cand[i] * f, floor), 1.0)
                            cand[j] = min(max(cand[j] * g, floor), 1.0)
                            best, moved = try_update(cand, best)
                            improved |= moved
            if not improved:
                break
    regauge()
    return lam_of(theta), theta[:n_a].reshape(d_a_mat.shape), theta[n_a:].reshape(j_b.shape)


def _selecting_seeds(
    d_a: int, d_b: int, floor: float
) -> list[tuple[float, np.ndarray, np.ndarray]]:
    """Sparse seeds keeping one outcome pair per party.

    The sparse corner of the grid family, enumerated exhaustively: every
    way of routing two of Alice's outcomes and two of Bob's outcomes onto
    the output bits, all other entries at the floor.  For bit-sized
    parties the kept weights are additionally enumerated over a short
    ladder, because the later local refinement converges only from
    starts within roughly a factor two of the optimal weights.
    """
    if d_a == 2 and d_b == 2:
        weights: tuple[tuple[float, float], ...] = tuple(
            (x, y) for x in (0.15, 0.3, 0.6, 1.0) for y in (0.15, 0.3, 0.6, 1.0)
        )
    elif max(d_a, d_b) == 3:
        weights = tuple((x, y) for x in (0.3, 1.0) for y in (0.3, 1.0))
    else:
        weights = ((1.0, 1.0),)
    seeds = []
    for a0 in range(d_a):
        for a1 in range(a0 + 1, d_a):
            for b0 in range(d_b):
                for b1 in range(d_b):
                    if b1 == b0:
                        continue
                    for w_a, w_b in weights:
                        m_a = np.full((2, d_a), floor)
                        m_b = np.full((2, d_b), floor)
                        m_a[0, a0] = 1.0
                        m_a[1, a1] = w_a
                        m_b[0, b0] = 1.0
                        m_b[1, b1] = w_b
                        seeds.append((0.0, m_a, m_b))
    return seeds


def brute_force_mesbf(
    p: TripartiteDistribution, cfg: SearchConfig | None = None
) -> MeasureResult:
    """Grid oracle for small instances (honest alphabets of size <= 4).

    All stages work on multiplicative entry grids inside
    ``[entry_floor, 1]`` (the families contain every row-swapped
    variant): an exhaustive scan of all coarse filter pairs for the two
    parties jointly plus all sparse selecting seeds, then coordinate-wise
    sweeps over per-entry grids of up to ``grid_points`` values with
    shrinking windows, funneled from many candidates down to a few.  The
    documented contract is a lower bound on the true optimum whose gap
    shrinks as ``grid_points`` grows.
    """
    cfg = cfg or SearchConfig()
    d_a, d_b, _ = p.dims
    if d_a > 4 or d_b > 4:
        raise TooLargeError(f"grid oracle is limited to alphabets <= 4, got {d_a} x {d_b}")
    table = p.table
    floor = cfg.entry_floor

    # Near-zero plus an order-one ladder: optimal weights are O(1) ratios,
    # so dead decades would waste the coarse support scan.
    if max(d_a, d_b) == 2:
        coarse = np.array([floor, 0.1, 0.2, 0.45, 1.0])
    elif max(d_a, d_b) == 3:
        coarse = np.array([floor, 0.1, 0.3, 1.0])
    else:
        coarse = np.array([floor, 0.3, 1.0])
    seeds = _joint_scan(table, coarse, floor, top_k=12)
    seeds.extend(_selecting_seeds(d_a, d_b, floor))

    # Funnel: micro polish ranks every seed and a cheap pass re-ranks the
    # leaders (coarse values misorder nearby basins).  Ranking passes can
    # walk a matrix into a worse basin, so only their values are kept;
    # the fine pass always restarts from the original seed.
    micro = [
        (_coordinate_polish(table, m_a, m_b, min(cfg.grid_points, 6), floor, _MICRO_SPANS)[0], m_a, m_b)
        for _, m_a, m_b in seeds
    ]
    micro.sort(key=lambda item: -item[0])
    cheap = [
        (_coordinate_polish(table, m_a, m_b, min(cfg.grid_points, 12), floor, _CHEAP_SPANS)[0], m_a, m_b)
        for _, m_a, m_b in micro[:8]
    ]
    cheap.sort(key=lambda item: -item[0])
    finalists = [item for item in cheap if item[0] >= cheap[0][0] - 3e-2][:4]

    best = (-1.0, None, None)
    for _, m_a, m_b in finalists:
        value, m_a, m_b = _coordinate_polish(table, m_a, m_b, cfg.grid_points, floor)
        if value > best[0]:
            best = (value, m_a, m_b)

    witness = (Filtration(best[1]).as_proper(), Filtration(best[2]).as_proper())
    value = _certified_lambda(witness[0].matrix, witness[1].matrix, p)
    return MeasureResult(
        value,
        witness,
        "exact",
        {"grid_points": cfg.grid_points, "seeds": len(seeds), "finalists": len(finalists)},
    )


@dataclass(frozen=True)
class RandomizationDemo:
    """Before/after record of the joint local-randomization example."""

    distribution: TripartiteDistribution
    lambda_before: float
    lambda_reversible: float
    noise: float
    noise_filter: Filtration
    lambda_after: float
    filter_reversible: bool


def local_randomization_demo(noise: float = 0.01) -> RandomizationDemo:
    """Show irreversible joint noise beating every reversible filter pair.

    On the example distribution the secret-bit fraction and its
    reversible-filter optimum are both exactly 1/2, yet the slightly
    noisy (and irreversible) filter ``[[1, noise], [0, 1]]`` applied by
    both honest parties pushes the fraction strictly above 1/2.
    """
    p = randomization_example()
    noise_filter = Filtration(np.array([[1.0, noise], [0.0, 1.0]]))
    after = secret_bit_fraction(apply(noise_filter, noise_filter, p))
    return RandomizationDemo(
        distribution=p,
        lambda_before=secret_bit_fraction(p),
        lambda_reversible=mesbf_reversible(p).value,
        noise=noise,
        noise_filter=noise_filter,
        lambda_after=after,
        filter_reversible=is_reversible(noise_filter),
    )
