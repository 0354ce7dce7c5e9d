"""Dot-pair layouts, pair-creation noise and the recursive distillation protocol.

Dots are numbered left to right; consecutive dot duples form pairs and
consecutive blocks of ``m`` pairs form regions.  At level ``r`` of a
region with ``m = 2**ell`` pairs the composite objects are blocks of
``2**(ell - r)`` adjacent dots, so level ``ell`` objects are single dots
and the two level-0 objects are the region halves.
"""

from __future__ import annotations

import itertools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Iterator, Sequence

import numpy as np

from .anyons import ONE, TAU, FusionPathBasis, Label, enumerate_basis, fib_dimension
from .braids import (BraidWord, SectorUnitary, StateVector, apply_word_array, is_injection_weave,
                     is_pure, projective_distance, word_unitary)
from .compiler.primitives import NOT, not_sector, weave_sector

EXACT_PAIR_LIMIT = 8
DEFAULT_SAMPLES = 10_000
MAX_SECTOR_DIM = 2_000_000


class ProtocolError(ValueError):
    """Inputs to the protocol failed a structural check."""


class SimulationLimit(ValueError):
    """A member state lives on a sector too large to simulate."""


def sector_dimension(n_dots: int, tau_count: int) -> int:
    """Paths with ``tau_count`` tau leaves among ``n_dots`` and trivial total charge.

    Trivial leaves do not change the running charge, so a path is a choice of
    tau positions times a fusion path of the taus alone.
    """
    if tau_count == 0:
        return 1
    return math.comb(n_dots, tau_count) * fib_dimension(tau_count)


@dataclass(frozen=True)
class RegionLayout:
    k: int
    m: int

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("need at least one region")
        if self.m < 2 or self.m & (self.m - 1):
            raise ValueError("pairs per region must be a power of two, at least 2")

    @property
    def ell(self) -> int:
        return self.m.bit_length() - 1

    @property
    def n_dots(self) -> int:
        return 2 * self.m * self.k

    @property
    def n_pairs(self) -> int:
        return self.m * self.k

    def region_dots(self, alpha: int) -> range:
        """1-based dot positions of region ``alpha`` (0-based)."""
        start = alpha * 2 * self.m + 1
        return range(start, start + 2 * self.m)

    def halves(self, alpha: int) -> tuple[range, range]:
        dots = self.region_dots(alpha)
        return dots[: self.m], dots[self.m:]

    def cable_width(self, r: int) -> int:
        if not 0 <= r <= self.ell:
            raise ValueError(f"level {r} outside [0, {self.ell}]")
        return 2 ** (self.ell - r)

    def objects(self, alpha: int, r: int) -> list[tuple[int, int]]:
        """``(first dot, width)`` of the level-``r`` objects in region ``alpha``."""
        c = self.cable_width(r)
        start = self.region_dots(alpha).start
        return [(start + j * c, c) for j in range(2 ** (r + 1))]


# ---------------------------------------------------------------------------
# states and noise


def occupation_state(layout: RegionLayout, occupied: Sequence[bool],
                     basis: FusionPathBasis | None = None) -> StateVector:
    """Pairs flagged in ``occupied`` hold a tau-tau pair in the trivial channel."""
    occupied = [bool(v) for v in occupied]
    if len(occupied) != layout.n_pairs:
        raise ValueError("one occupation flag per pair expected")
    leaves, charges = [], [ONE]
    for occ in occupied:
        if occ:
            leaves += [TAU, TAU]
            charges += [TAU, ONE]
        else:
            leaves += [ONE, ONE]
            charges += [ONE, ONE]
    if basis is None:
        basis = enumerate_basis(layout.n_dots, ONE, tau_count=2 * sum(occupied))
    idx = basis.lookup(np.array([leaves], dtype=np.int8), np.array([charges], dtype=np.int8))[0]
    if idx < 0:
        raise ValueError("occupation state not contained in the given basis")
    return StateVector.basis_state(basis, int(idx))


def vacuum(layout: RegionLayout) -> StateVector:
    return occupation_state(layout, [False] * layout.n_pairs)


@dataclass
class NoisyEnsemble:
    """Mixture of pair-occupation basis states.

    Exact ensembles list every pattern with its product probability;
    sampled ones carry the empirical frequency of each distinct pattern.
    """

    layout: RegionLayout
    p: float
    occupations: np.ndarray  # (members, pairs) bool
    weights: np.ndarray
    exact: bool
    samples: int = 0

    def __len__(self) -> int:
        return len(self.weights)

    def members(self) -> Iterator[tuple[float, StateVector]]:
        for w, occ in zip(self.weights, self.occupations):
            yield float(w), occupation_state(self.layout, occ)

    def weight_in_support(self, alpha: int | None = None) -> float:
        """Ensemble weight with at least one tau-tau pair in every (or one) region."""
        occ = self.occupations.reshape(len(self), self.layout.k, self.layout.m).any(axis=2)
        hit = occ.all(axis=1) if alpha is None else occ[:, alpha]
        return float(self.weights[hit].sum())

    def standard_error(self, alpha: int | None = None) -> float:
        if self.exact:
            return 0.0
        q = self.weight_in_support(alpha)
        return math.sqrt(q * (1 - q) / self.samples)


def pair_creation_ensemble(layout: RegionLayout, p: float, method: str = "auto",
                           samples: int = DEFAULT_SAMPLES, seed: int = 0) -> NoisyEnsemble:
    """Each pair independently holds a tau-tau pair with probability ``p``."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"creation probability {p} outside [0, 1]")
    if method == "auto":
        method = "exact" if layout.n_pairs <= EXACT_PAIR_LIMIT else "sample"
    if method == "exact":
        occ = np.array(list(itertools.product((False, True), repeat=layout.n_pairs)), dtype=bool)
        n_occ = occ.sum(axis=1)
        weights = p ** n_occ * (1 - p) ** (layout.n_pairs - n_occ)
        keep = weights > 0
        return NoisyEnsemble(layout, p, occ[keep], weights[keep], exact=True)
    if method != "sample":
        raise ValueError(f"unknown ensemble method {method!r}")
    rng = np.random.default_rng(seed)
    draws = rng.random((samples, layout.n_pairs)) < p
    patterns, counts = np.unique(draws, axis=0, return_counts=True)
    return NoisyEnsemble(layout, p, patterns.astype(bool), counts / samples, exact=False,
                         samples=samples)


# ---------------------------------------------------------------------------
# composite braids


def block_swap_word(strands: int, start: int, left: int, right: int, sign: int = 1) -> BraidWord:
    """Move the ``right`` strands after position ``start + left - 1`` in front of the ``left`` ones.

    Every crossing carries ``sign``; the word has ``left * right`` crossings.
    """
    crossings = []
    for t in range(right):
        for i in range(start + left + t - 1, start + t - 1, -1):
            crossings.append((i, sign))
    return BraidWord(strands, tuple(crossings))


def cable_exchange_word(layout: RegionLayout, r: int, j: int, chirality: int = 1,
                        alpha: int = 0) -> BraidWord:
    """Exchange level-``r`` objects ``j`` and ``j + 1`` (0-based) of region ``alpha``."""
    objs = layout.objects(alpha, r)
    if not 0 <= j < len(objs) - 1:
        raise ValueError(f"no composite pair {j} at level {r}")
    if chirality not in (1, -1):
        raise ValueError("chirality must be +1 or -1")
    start, c = objs[j]
    return block_swap_word(layout.n_dots, start, c, c, chirality)


def cabled(word: BraidWord, layout: RegionLayout, r: int, alpha: int, first: int) -> BraidWord:
    """``word`` acting on level-``r`` objects ``first ..`` of region ``alpha``."""
    crossings: list[tuple[int, int]] = []
    for i, s in word.crossings:
        crossings.extend(cable_exchange_word(layout, r, first + i - 1, s, alpha).crossings)
    return BraidWord(layout.n_dots, tuple(crossings))


def level_word(layout: RegionLayout, r: int, b: BraidWord, w: BraidWord) -> BraidWord:
    """``w o b`` on every group of four level-``r`` objects, every region."""
    crossings: list[tuple[int, int]] = []
    for alpha in range(layout.k):
        for g in range(2 ** (r - 1)):
            crossings.extend(cabled(b, layout, r, alpha, 4 * g).crossings)
            crossings.extend(cabled(w, layout, r, alpha, 4 * g + 1).crossings)
    return BraidWord(layout.n_dots, tuple(crossings))


def protocol_words(layout: RegionLayout, b: BraidWord, w: BraidWord) -> dict[int, BraidWord]:
    """Level words keyed by ``r``, to be applied for ``r = ell .. 1``."""
    return {r: level_word(layout, r, b, w) for r in range(layout.ell, 0, -1)}


# ---------------------------------------------------------------------------
# projectors


def _apply_block_projector(basis: FusionPathBasis, psi: np.ndarray, start: int, width: int,
                           charge: Label) -> np.ndarray:
    """Project onto total charge ``charge`` of dots ``start .. start + width - 1``.

    The block is carried to the left end by a rigid cable move, where its charge
    is the diagonal label ``x_width``; the move is then undone.
    """
    if start == 1:
        return psi * (basis.charges[:, width] == charge)[:, None]
    move = block_swap_word(basis.n, 1, start - 1, width)
    moved = apply_word_array(move, basis, psi)
    moved *= (basis.charges[:, width] == charge)[:, None]
    return apply_word_array(move.inverse(), basis, moved)


def apply_level_projector(basis: FusionPathBasis, psi: np.ndarray, layout: RegionLayout,
                          r: int, regions: Sequence[int] | None = None) -> np.ndarray:
    """Apply the level-``r`` support projector of the given regions (default: all).

    Every pair of adjacent level-``r`` objects must carry trivial total charge and
    at least one such pair must be a tau-tau pair.
    """
    psi = np.asarray(psi, dtype=np.complex128)
    flat = psi.ndim == 1
    out = psi[:, None] if flat else psi
    for alpha in (range(layout.k) if regions is None else regions):
        objs = layout.objects(alpha, r)
        pairs = [(objs[2 * q], objs[2 * q + 1]) for q in range(len(objs) // 2)]
        for (s, c), _ in pairs:
            out = _apply_block_projector(basis, out, s, 2 * c, ONE)
        vac = out
        for (s, c), _ in pairs:
            vac = vac - _apply_block_projector(basis, vac, s, c, TAU)
        out = out - vac
    return out[:, 0] if flat else out


def level_projector_apply(state: StateVector, layout: RegionLayout,
                          r: int) -> tuple[StateVector | None, float]:
    """Projected, renormalized state and its leakage ``1 - ||P psi||^2``.

    A state entirely outside the subspace yields ``(None, 1.0)``.
    """
    if state.basis.n != layout.n_dots:
        raise ValueError("state does not match the layout")
    if not 0 <= r <= layout.ell:
        raise ValueError(f"level {r} outside [0, {layout.ell}]")
    proj = apply_level_projector(state.basis, state.amplitudes, layout, r)
    weight = float(np.vdot(proj, proj).real)
    leakage = max(0.0, 1.0 - weight / state.norm ** 2)
    if weight < 1e-24:
        return None, 1.0
    return StateVector(state.basis, proj / math.sqrt(weight)), leakage


# ---------------------------------------------------------------------------
# budgets and protocol


@dataclass(frozen=True)
class ErrorBudget:
    ell: int
    epsilon: float
    k: int
    delta: float            # (2 eps) * sum_{r=1}^{ell} 2^{r-1}
    delta_bound: float      # 2^ell (2 eps)
    overall: float          # k * delta
    braid_count: float | None = None
    braid_count_bound: float | None = None


def error_budget(ell: int, epsilon: float, k: int = 1,
                 braid_length: float | None = None) -> ErrorBudget:
    """Analytic error and braid-count budget of the recursive protocol.

    ``braid_length`` stands in for the per-primitive length ``C (log 1/eps)^alpha``
    (pass ``len(b) + len(w)`` divided by two to use measured lengths).
    """
    if ell < 1 or k < 1 or not epsilon > 0:
        raise ValueError("need ell >= 1, k >= 1 and epsilon > 0")
    groups = 2 ** ell - 1
    delta = 2 * epsilon * groups
    count = bound = None
    if braid_length is not None:
        count = 2 * braid_length * groups
        bound = 2 ** ell * 2 * braid_length
    return ErrorBudget(ell, epsilon, k, delta, 2 ** ell * 2 * epsilon, k * delta, count, bound)


@dataclass
class LevelRecord:
    level: int
    cable_width: int
    composite_exchanges: int
    elementary_crossings: int
    leakage_mean: float
    leakage_max: float


@dataclass
class ProtocolReport:
    k: int
    m: int
    b_length: int
    w_length: int
    epsilon_b: float
    epsilon_w: float
    levels: list[LevelRecord]
    support_weight: float
    final_overlap: float
    final_error: float
    final_error_mean: float
    budget: ErrorBudget
    budget_max: ErrorBudget
    composite_exchanges: int
    elementary_crossings: int
    members: int
    phases: dict = field(default_factory=dict)

    @property
    def epsilon(self) -> float:
        return self.epsilon_b + self.epsilon_w

    @property
    def within_budget(self) -> bool:
        return self.final_error <= self.budget.overall

    def to_dict(self) -> dict:
        return {
            "schemaVersion": 1,
            "layout": {"k": self.k, "m": self.m, "ell": self.budget.ell},
            "words": {"bLength": self.b_length, "wLength": self.w_length,
                      "epsilonB": self.epsilon_b, "epsilonW": self.epsilon_w},
            "levels": [
                {"level": lv.level, "cableWidth": lv.cable_width,
                 "compositeExchanges": lv.composite_exchanges,
                 "elementaryCrossings": lv.elementary_crossings,
                 "leakageMean": lv.leakage_mean, "leakageMax": lv.leakage_max}
                for lv in self.levels
            ],
            "members": self.members,
            "supportWeight": self.support_weight,
            "finalOverlap": self.final_overlap,
            "finalError": self.final_error,
            "finalErrorMean": self.final_error_mean,
            "budget": {
                "epsilon": self.budget.epsilon, "deltaPerRegion": self.budget.delta,
                "deltaBound": self.budget.delta_bound, "overall": self.budget.overall,
                "overallWithMaxEpsilon": self.budget_max.overall,
                "braidCount": self.budget.braid_count,
                "braidCountBound": self.budget.braid_count_bound,
            },
            "compositeExchanges": self.composite_exchanges,
            "elementaryCrossings": self.elementary_crossings,
            "withinBudget": self.within_budget,
            "phases": self.phases,
        }

    def summary(self) -> str:
        rows = [f"layout k={self.k} m={self.m} ell={self.budget.ell}   "
                f"eps_b={self.epsilon_b:.3e} eps_w={self.epsilon_w:.3e}",
                f"{'level':>5} {'width':>5} {'composite':>10} {'crossings':>10} "
                f"{'leak mean':>11} {'leak max':>11}"]
        for lv in self.levels:
            rows.append(f"{lv.level:>5} {lv.cable_width:>5} {lv.composite_exchanges:>10} "
                        f"{lv.elementary_crossings:>10} {lv.leakage_mean:>11.3e} {lv.leakage_max:>11.3e}")
        rows.append(f"support weight {self.support_weight:.6f}   final overlap {self.final_overlap:.12f}")
        rows.append(f"final error {self.final_error:.3e} (mean {self.final_error_mean:.3e})   "
                    f"budget {self.budget.overall:.3e}   {'PASS' if self.within_budget else 'FAIL'}")
        return "\n".join(rows) + "\n"


def measure_primitives(b: BraidWord, w: BraidWord) -> tuple[float, float]:
    """Structural checks, then re-measured projective errors of ``b`` and ``w``."""
    problems = []
    if b.strands != 4:
        problems.append(f"b acts on {b.strands} strands, expected 4")
    elif not is_pure(b):
        problems.append("b is not a pure braid")
    if w.strands != 3:
        problems.append(f"w acts on {w.strands} strands, expected 3")
    elif not is_injection_weave(w):
        problems.append("w is not an injection weave (warp 3 -> 1)")
    if problems:
        raise ProtocolError("; ".join(problems))
    eps_b = projective_distance(word_unitary(b, not_sector()), SectorUnitary(not_sector(), NOT))
    eps_w = projective_distance(word_unitary(w, weave_sector()), SectorUnitary(weave_sector(), np.eye(2)))
    return eps_b, eps_w


def _run_block(basis, psi, layout, words):
    leaks = {}
    for r, word in words.items():
        psi = apply_word_array(word, basis, psi)
        proj = apply_level_projector(basis, psi, layout, r - 1)
        leaks[r] = 1.0 - np.sum(np.abs(proj) ** 2, axis=0)
    final = apply_level_projector(basis, psi, layout, 0)
    overlap = np.sum(np.abs(final) ** 2, axis=0)
    # ||(1 - P) psi|| directly; sqrt(1 - overlap) loses half the digits
    residual = np.linalg.norm(psi - final, axis=0)
    return leaks, overlap, residual


def run_protocol(inputs: StateVector | NoisyEnsemble | Sequence[tuple[float, StateVector]],
                 layout: RegionLayout, b: BraidWord, w: BraidWord,
                 jobs: int = 1) -> ProtocolReport:
    """Apply the recursive ``w o b`` braid and measure leakage and final error.

    Inputs are weighted pure states; states outside the level-``ell`` support are
    propagated faithfully but only in-support members count toward the final
    error, which is compared against ``k * delta`` with ``eps = eps_b + eps_w``.
    """
    eps_b, eps_w = measure_primitives(b, w)
    if isinstance(inputs, StateVector):
        members = [(1.0, inputs)]
    elif isinstance(inputs, NoisyEnsemble):
        if inputs.layout != layout:
            raise ValueError("ensemble built for a different layout")
        biggest = max(sector_dimension(layout.n_dots, 2 * int(q))
                      for q in np.unique(inputs.occupations.sum(axis=1)))
        if biggest > MAX_SECTOR_DIM:
            raise SimulationLimit(f"largest member sector has {biggest} paths "
                                  f"(limit {MAX_SECTOR_DIM}); reduce m, k or p")
        members = list(inputs.members())
    else:
        members = list(inputs)
    for _, st in members:
        if st.basis.n != layout.n_dots:
            raise ValueError(f"state on {st.basis.n} dots, layout has {layout.n_dots}")
    words = protocol_words(layout, b, w)

    # batch members sharing a basis
    groups: dict[int, list[int]] = {}
    for idx, (_, st) in enumerate(members):
        groups.setdefault(id(st.basis), []).append(idx)
    batches = []
    for idxs in groups.values():
        basis = members[idxs[0]][1].basis
        psi = np.stack([members[i][1].amplitudes / members[i][1].norm for i in idxs], axis=1)
        batches.append((idxs, basis, psi))

    def work(batch):
        idxs, basis, psi = batch
        support = np.sum(np.abs(apply_level_projector(basis, psi, layout, layout.ell)) ** 2, axis=0)
        leaks, overlap, residual = _run_block(basis, psi, layout, words)
        return idxs, support, leaks, overlap, residual

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(work, batches))
    else:
        results = [work(bt) for bt in batches]

    n = len(members)
    weights = np.array([wt for wt, _ in members], dtype=np.float64)
    support = np.zeros(n)
    overlap = np.zeros(n)
    err = np.zeros(n)
    leaks = {r: np.zeros(n) for r in words}
    for idxs, sup, lk, ov, res in results:
        support[idxs] = sup
        overlap[idxs] = ov
        err[idxs] = res
        for r in words:
            leaks[r][idxs] = lk[r]
    inside = support > 1 - 1e-9
    w_in = weights[inside]
    total_in = float(w_in.sum())

    def mean(x):
        return float(np.dot(w_in, x[inside]) / total_in) if total_in > 0 else float("nan")

    def worst(x):
        return float(x[inside].max()) if inside.any() else float("nan")

    levels = []
    composite_total = elementary_total = 0
    for r in words:
        c = layout.cable_width(r)
        composite = layout.k * 2 ** (r - 1) * (len(b) + len(w))
        levels.append(LevelRecord(r, c, composite, len(words[r]), mean(leaks[r]), worst(leaks[r])))
        composite_total += composite
        elementary_total += len(words[r])

    half_length = (len(b) + len(w)) / 2
    budget = error_budget(layout.ell, eps_b + eps_w, layout.k, half_length)
    budget_max = error_budget(layout.ell, max(eps_b, eps_w), layout.k, half_length)
    return ProtocolReport(
        k=layout.k, m=layout.m, b_length=len(b), w_length=len(w), epsilon_b=eps_b, epsilon_w=eps_w,
        levels=levels, support_weight=float(weights[inside].sum() / weights.sum()),
        final_overlap=mean(overlap), final_error=worst(err), final_error_mean=mean(err),
        budget=budget, budget_max=budget_max, composite_exchanges=composite_total,
        elementary_crossings=elementary_total, members=n,
    )
