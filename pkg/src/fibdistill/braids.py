"""Braid words and their unitary action on fusion-path bases."""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .anyons import ONE, TAU, FusionPathBasis, Label, enumerate_basis, model_constants
from .kernels import apply_gate_sequence


@dataclass(frozen=True)
class BraidWord:
    """Crossings ``(i, sign)`` on ``strands`` strands, in application order.

    ``(i, +1)`` is the elementary braid sigma_i exchanging positions ``i``
    and ``i + 1`` (1-based); ``(i, -1)`` is its inverse.
    """

    strands: int
    crossings: tuple[tuple[int, int], ...] = ()

    def __post_init__(self):
        if self.strands < 1:
            raise ValueError("a braid needs at least one strand")
        crossings = tuple((int(i), int(s)) for i, s in self.crossings)
        for i, s in crossings:
            if not 1 <= i <= self.strands - 1:
                raise ValueError(f"crossing index {i} out of range for {self.strands} strands")
            if s not in (1, -1):
                raise ValueError(f"crossing sign must be +1 or -1, got {s}")
        object.__setattr__(self, "crossings", crossings)

    def __len__(self) -> int:
        return len(self.crossings)

    def __add__(self, other: "BraidWord") -> "BraidWord":
        if not isinstance(other, BraidWord):
            return NotImplemented
        if other.strands != self.strands:
            raise ValueError("cannot concatenate braids on different strand counts")
        return BraidWord(self.strands, self.crossings + other.crossings)

    def inverse(self) -> "BraidWord":
        return BraidWord(self.strands, tuple((i, -s) for i, s in reversed(self.crossings)))

    def embed(self, strands: int, offset: int = 0) -> "BraidWord":
        """The same braid acting on strands ``offset + 1 ..`` of a wider braid."""
        if offset < 0 or offset + self.strands > strands:
            raise ValueError("embedding does not fit")
        return BraidWord(strands, tuple((i + offset, s) for i, s in self.crossings))

    @classmethod
    def from_string(cls, strands: int, text: str) -> "BraidWord":
        """Compact notation: ``"1 1 -2"`` is sigma_1 sigma_1 sigma_2^-1."""
        crossings = []
        for tok in text.split():
            v = int(tok)
            crossings.append((abs(v), 1 if v > 0 else -1))
        return cls(strands, tuple(crossings))

    def to_text(self) -> str:
        lines = [f"strands {self.strands}"]
        lines += [("s" if s > 0 else "S") + str(i) for i, s in self.crossings]
        return "\n".join(lines) + "\n"

    @classmethod
    def parse(cls, text: str) -> "BraidWord":
        lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
        if not lines or not lines[0].startswith("strands "):
            raise ValueError("braid file must start with 'strands <N>'")
        try:
            strands = int(lines[0].split()[1])
        except (IndexError, ValueError):
            raise ValueError(f"bad header line {lines[0]!r}") from None
        crossings = []
        for lineno, ln in enumerate(lines[1:], start=2):
            if ln[0] not in "sS" or not ln[1:].isdigit():
                raise ValueError(f"line {lineno}: expected s<i> or S<i>, got {ln!r}")
            crossings.append((int(ln[1:]), 1 if ln[0] == "s" else -1))
        return cls(strands, tuple(crossings))

    def save(self, path: str | Path) -> None:
        Path(path).write_text(self.to_text())

    @classmethod
    def load(cls, path: str | Path) -> "BraidWord":
        return cls.parse(Path(path).read_text())


def induced_permutation(word: BraidWord) -> tuple[int, ...]:
    """``perm[p]`` is the (0-based) starting position of the strand ending at ``p``."""
    perm = list(range(word.strands))
    for i, _ in word.crossings:
        perm[i - 1], perm[i] = perm[i], perm[i - 1]
    return tuple(perm)


def is_pure(word: BraidWord) -> bool:
    return induced_permutation(word) == tuple(range(word.strands))


def weave_trajectory(word: BraidWord, warp_start: int) -> tuple[int, ...] | None:
    """Positions of the warp strand, starting position included.

    Returns ``None`` as soon as a crossing does not involve the warp.
    """
    if not 1 <= warp_start <= word.strands:
        raise ValueError("warp start out of range")
    pos = warp_start
    traj = [pos]
    for i, _ in word.crossings:
        if pos == i:
            pos = i + 1
        elif pos == i + 1:
            pos = i
        else:
            return None
        traj.append(pos)
    return tuple(traj)


def first_non_weave_crossing(word: BraidWord, warp_start: int) -> int | None:
    """0-based index of the first crossing not touching the warp, if any."""
    pos = warp_start
    for k, (i, _) in enumerate(word.crossings):
        if pos not in (i, i + 1):
            return k
        pos = i + 1 if pos == i else i
    return None


def is_injection_weave(word: BraidWord) -> bool:
    traj = weave_trajectory(word, word.strands)
    return traj is not None and traj[-1] == 1


@dataclass
class StateVector:
    basis: FusionPathBasis
    amplitudes: np.ndarray

    def __post_init__(self):
        self.amplitudes = np.asarray(self.amplitudes, dtype=np.complex128)
        if self.amplitudes.shape != (len(self.basis),):
            raise ValueError("amplitude vector does not match the basis")

    @classmethod
    def basis_state(cls, basis: FusionPathBasis, index: int) -> "StateVector":
        amps = np.zeros(len(basis), dtype=np.complex128)
        amps[index] = 1.0
        return cls(basis, amps)

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def normalized(self) -> "StateVector":
        return StateVector(self.basis, self.amplitudes / self.norm)

    def overlap(self, other: "StateVector") -> complex:
        if not other.basis.same_as(self.basis):
            raise ValueError("states live on different bases")
        return complex(np.vdot(self.amplitudes, other.amplitudes))


@dataclass(frozen=True)
class SectorUnitary:
    basis: FusionPathBasis
    matrix: np.ndarray = field(repr=False)

    def __post_init__(self):
        d = len(self.basis)
        if self.matrix.shape != (d, d):
            raise ValueError(f"matrix shape {self.matrix.shape} does not match basis dimension {d}")

    def unitarity_defect(self) -> float:
        d = self.matrix.shape[0]
        return float(np.abs(self.matrix.conj().T @ self.matrix - np.eye(d)).max()) if d else 0.0

    def __matmul__(self, other: "SectorUnitary") -> "SectorUnitary":
        if not other.basis.same_as(self.basis):
            raise ValueError("operators live on different bases")
        return SectorUnitary(self.basis, self.matrix @ other.matrix)


@dataclass(frozen=True, eq=False)
class GeneratorTable:
    """Sparse action of every sigma_i^{+-1} on a braid-closed basis.

    Row ``g = 2 * (i - 1) + (sign < 0)`` encodes the map
    ``out[j] = c1[g, j] * v[src1[g, j]] + c2[g, j] * v[src2[g, j]]``.
    ``closed[i - 1]`` is False when sigma_i leads out of the basis.
    """

    basis: FusionPathBasis
    src1: np.ndarray
    c1: np.ndarray
    src2: np.ndarray
    c2: np.ndarray
    closed: np.ndarray

    @staticmethod
    def gate_id(i: int, sign: int) -> int:
        return 2 * (i - 1) + (1 if sign < 0 else 0)

    def gate_ids(self, word: BraidWord) -> np.ndarray:
        ids = np.fromiter((self.gate_id(i, s) for i, s in word.crossings),
                          dtype=np.intp, count=len(word))
        bad = {i for i, _ in word.crossings if not self.closed[i - 1]}
        if bad:
            raise ValueError(f"basis is not closed under sigma_{sorted(bad)[0]}")
        return ids


def _build_table(basis: FusionPathBasis) -> GeneratorTable:
    n, dim = basis.n, len(basis)
    consts = model_constants()
    r = np.array([consts.r_phase_one, consts.r_phase_tau])
    block = consts.f_matrix @ np.diag(r) @ consts.f_matrix
    gens = 2 * max(n - 1, 0)
    src1 = np.tile(np.arange(dim, dtype=np.intp), (gens, 1))
    src2 = src1.copy()
    c1 = np.zeros((gens, dim), dtype=np.complex128)
    c2 = np.zeros((gens, dim), dtype=np.complex128)
    closed = np.ones(max(n - 1, 0), dtype=bool)
    L = basis.leaves.astype(np.intp)
    X = basis.charges.astype(np.intp)
    for i in range(1, n):
        li, lj = L[:, i - 1], L[:, i]
        xa, xm, xb = X[:, i - 1], X[:, i], X[:, i + 1]
        vac = (li == 0) | (lj == 0)
        both = ~vac
        forced = both & ~((xa == 1) & (xb == 1))
        mixed = both & (xa == 1) & (xb == 1)

        # (a) vacuum crossings: swap the leaves, x_i rerouted, amplitude 1
        pl, px = L.copy(), X.copy()
        pl[:, i - 1], pl[:, i] = lj, li
        # x_i copies x_{i-1} when the trivial leaf lands at position i, else x_{i+1}
        px[:, i] = np.where(lj == 0, xa, xb)
        partner = basis.lookup(pl, px)
        if np.any(vac & (partner < 0)):
            closed[i - 1] = False
        # (c) both tau, x_{i-1} = x_{i+1} = tau: 2x2 block on x_i
        fx = X.copy()
        fx[:, i] = 1 - xm
        flip = basis.lookup(L, fx)

        channel = np.where(xa == xb, 0, 1)  # forced pair channel
        for sign, g in ((1, 2 * (i - 1)), (-1, 2 * (i - 1) + 1)):
            rr = r if sign > 0 else r.conj()
            bb = block if sign > 0 else block.conj()
            sel = vac & (partner >= 0)
            src1[g, sel] = partner[sel]
            c1[g, sel] = 1.0
            c1[g, forced] = rr[channel[forced]]
            c1[g, mixed] = bb[xm[mixed], xm[mixed]]
            m2 = mixed & (flip >= 0)
            src2[g, m2] = flip[m2]
            c2[g, m2] = bb[xm[m2], 1 - xm[m2]]
    for a in (src1, src2, c1, c2, closed):
        a.setflags(write=False)
    return GeneratorTable(basis, src1, c1, src2, c2, closed)


_TABLES: dict[int, GeneratorTable] = {}


def generator_table(basis: FusionPathBasis) -> GeneratorTable:
    tab = _TABLES.get(id(basis))
    if tab is None or tab.basis is not basis:
        tab = _build_table(basis)
        _TABLES[id(basis)] = tab
    return tab


def closure_basis(basis: FusionPathBasis) -> FusionPathBasis:
    """Smallest braid-closed basis containing ``basis``."""
    counts = np.unique(basis.tau_counts())
    if len(counts) == 1:
        return enumerate_basis(basis.n, basis.total_charge, tau_count=int(counts[0]))
    return enumerate_basis(basis.n, basis.total_charge)


def generator_matrix(basis: FusionPathBasis, i: int, sign: int = 1) -> SectorUnitary:
    """Dense matrix of sigma_i^sign on ``basis`` (which must be closed under it)."""
    if not 1 <= i <= basis.n - 1:
        raise ValueError(f"generator index {i} out of range for {basis.n} strands")
    return word_unitary(BraidWord(basis.n, ((i, sign),)), basis)


def dense_word_matrix(word: BraidWord, basis: FusionPathBasis) -> np.ndarray:
    """Product of dense generator matrices, built without the compiled kernel.

    Used where results must not depend on the kernel backend (net letters).
    """
    tab = generator_table(basis)
    dim = len(basis)
    rows = np.arange(dim)
    out = np.eye(dim, dtype=np.complex128)
    for g in tab.gate_ids(word):
        m = np.zeros((dim, dim), dtype=np.complex128)
        np.add.at(m, (rows, tab.src1[g]), tab.c1[g])
        np.add.at(m, (rows, tab.src2[g]), tab.c2[g])
        out = m @ out
    return out


def apply_word_array(word: BraidWord, basis: FusionPathBasis, psi: np.ndarray) -> np.ndarray:
    """Apply ``word`` to the columns of ``psi`` (shape ``(dim,)`` or ``(dim, k)``)."""
    if word.strands != basis.n:
        raise ValueError(f"word on {word.strands} strands applied to a {basis.n}-leaf basis")
    tab = generator_table(basis)
    psi = np.asarray(psi, dtype=np.complex128)
    flat = psi.ndim == 1
    mat = psi[:, None] if flat else psi
    out = apply_gate_sequence(tab.src1, tab.c1, tab.src2, tab.c2, tab.gate_ids(word), mat)
    return out[:, 0] if flat else out


def apply_word(word: BraidWord, state: StateVector) -> StateVector:
    return StateVector(state.basis, apply_word_array(word, state.basis, state.amplitudes))


def word_unitary(word: BraidWord, basis: FusionPathBasis, tol: float = 1e-9) -> SectorUnitary:
    """Matrix of ``word`` restricted to ``basis``.

    The word is simulated on the braid-closed hull of ``basis``; it must map
    ``basis`` into itself (up to ``tol``), as pure braids do for fixed-leaf sectors.
    """
    if word.strands != basis.n:
        raise ValueError(f"word on {word.strands} strands, basis on {basis.n} leaves")
    hull = closure_basis(basis)
    tab = generator_table(basis)
    if hull is basis or all(tab.closed):
        return SectorUnitary(basis, apply_word_array(word, basis, np.eye(len(basis))))
    pos = hull.lookup(basis.leaves, basis.charges)
    cols = np.zeros((len(hull), len(basis)), dtype=np.complex128)
    cols[pos, np.arange(len(basis))] = 1.0
    out = apply_word_array(word, hull, cols)
    inside = out[pos]
    leak = 1.0 - np.min(np.sum(np.abs(inside) ** 2, axis=0)) if len(basis) else 0.0
    if leak > tol:
        raise ValueError("word does not map the basis into itself")
    return SectorUnitary(basis, inside)


def projective_distance(u: SectorUnitary | np.ndarray, v: SectorUnitary | np.ndarray) -> float:
    """``min_theta || U - e^{i theta} V ||`` in the spectral norm.

    ``U - e^{i theta} V = U (1 - e^{i theta} U^+ V)`` and ``U^+ V`` is unitary, so the
    norm is ``max_k |1 - e^{i(theta + a_k)}|`` over its eigenphases ``a_k``.  The
    optimum centres the smallest arc holding every eigenphase.
    """
    a = u.matrix if isinstance(u, SectorUnitary) else np.asarray(u)
    b = v.matrix if isinstance(v, SectorUnitary) else np.asarray(v)
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")
    if a.size == 0:
        return 0.0
    phases = np.sort(np.angle(np.linalg.eigvals(a.conj().T @ b)))
    gaps = np.diff(np.concatenate([phases, phases[:1] + 2 * np.pi]))
    arc = 2 * np.pi - gaps.max()
    return float(2 * math.sin(arc / 4))


def artin_defect(n: int, total_charge: Label = ONE, basis: FusionPathBasis | None = None) -> float:
    """Largest violation of the Artin relations among the generator matrices."""
    basis = basis if basis is not None else enumerate_basis(n, total_charge)
    if len(basis) == 0:
        return 0.0
    g = {i: generator_matrix(basis, i).matrix for i in range(1, n)}
    worst = 0.0
    for i in range(1, n):
        for j in range(i + 2, n):
            worst = max(worst, np.abs(g[i] @ g[j] - g[j] @ g[i]).max())
        if i + 1 < n:
            lhs = g[i] @ g[i + 1] @ g[i]
            rhs = g[i + 1] @ g[i] @ g[i + 1]
            worst = max(worst, np.abs(lhs - rhs).max())
    return float(worst)
