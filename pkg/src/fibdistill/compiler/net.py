"""Breadth-first epsilon-nets over constrained braid alphabets."""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import cKDTree

from ..anyons import TAU, FusionPathBasis, enumerate_basis
from ..braids import BraidWord, SectorUnitary, dense_word_matrix, is_pure, weave_trajectory, word_unitary
from . import su2


@dataclass(frozen=True)
class Constraint:
    """Structural constraint on emitted words.

    ``kind`` is ``"unconstrained"``, ``"purebraid"`` or ``"weave"``; a weave
    constraint carries the warp's start and end positions.
    """

    kind: str
    warp_start: int = 0
    warp_end: int = 0

    def __str__(self) -> str:
        if self.kind == "weave":
            return f"weave({self.warp_start},{self.warp_end})"
        return self.kind

    def check(self, word: BraidWord) -> bool:
        if self.kind == "purebraid":
            return is_pure(word)
        if self.kind == "weave":
            traj = weave_trajectory(word, self.warp_start)
            return traj is not None and traj[-1] == self.warp_end
        return True


UNCONSTRAINED = Constraint("unconstrained")
PUREBRAID = Constraint("purebraid")


def weave(start: int, end: int) -> Constraint:
    return Constraint("weave", start, end)


@dataclass(frozen=True)
class Alphabet:
    """Letters (short braid words) with their inverse pairing."""

    strands: int
    words: tuple[BraidWord, ...]
    inverse: tuple[int, ...]

    def __len__(self) -> int:
        return len(self.words)

    def spell(self, letters) -> BraidWord:
        crossings: list[tuple[int, int]] = []
        for a in letters:
            crossings.extend(self.words[a].crossings)
        return BraidWord(self.strands, tuple(crossings))


def band_generator(j: int, k: int, strands: int) -> BraidWord:
    """A_jk = (s_{k-1} .. s_{j+1}) s_j^2 (s_{k-1} .. s_{j+1})^-1; pure for 1 <= j < k."""
    if not 1 <= j < k <= strands:
        raise ValueError("band generator needs 1 <= j < k <= strands")
    left = [(i, 1) for i in range(k - 1, j, -1)]
    return BraidWord(strands, tuple(left + [(j, 1), (j, 1)] + [(i, -1) for i, _ in reversed(left)]))


def purebraid_alphabet(strands: int = 4) -> Alphabet:
    words, inverse = [], []
    for j in range(1, strands):
        for k in range(j + 1, strands + 1):
            a = band_generator(j, k, strands)
            words += [a, a.inverse()]
            inverse += [len(words) - 1, len(words) - 2]
    return Alphabet(strands, tuple(words), tuple(inverse))


def weave_alphabet(strands: int, warp: int) -> Alphabet:
    """Full twists of the warp (sitting at ``warp``) with each neighbour."""
    words, inverse = [], []
    for i in (warp - 1, warp):
        if 1 <= i <= strands - 1:
            for s in (1, -1):
                words.append(BraidWord(strands, ((i, s), (i, s))))
            inverse += [len(words) - 1, len(words) - 2]
    return Alphabet(strands, tuple(words), tuple(inverse))


@dataclass(frozen=True)
class NetConfig:
    max_base_length: int
    resolution: float = 0.02
    max_entries: int = 2_000_000


@dataclass(frozen=True)
class NetEntry:
    word: BraidWord
    image: SectorUnitary
    key: tuple[int, int, int]


@dataclass(eq=False)
class Net:
    """Shortest word per quantization cell of the projective image.

    Entries form a prefix tree: entry ``e`` is ``parent[e]`` followed by
    ``letter[e]``; entry 0 is the empty word.
    """

    basis: FusionPathBasis
    constraint: Constraint
    alphabet: Alphabet
    config: NetConfig
    letter_images: np.ndarray = field(repr=False)  # SU(2), shape (letters, 2, 2)
    parent: np.ndarray = field(repr=False)
    letter: np.ndarray = field(repr=False)
    depth: np.ndarray = field(repr=False)
    quats: np.ndarray = field(repr=False)
    keys: np.ndarray = field(repr=False)

    def __len__(self) -> int:
        return len(self.parent)

    def letters(self, e: int) -> list[int]:
        out = []
        while e != 0:
            out.append(int(self.letter[e]))
            e = int(self.parent[e])
        return out[::-1]

    def matrix(self, e: int) -> np.ndarray:
        return su2.from_quaternions(self.quats[e])

    def entry(self, e: int) -> NetEntry:
        word = self.alphabet.spell(self.letters(e))
        return NetEntry(word, word_unitary(word, self.basis), tuple(int(v) for v in self.keys[e]))

    def entries(self):
        for e in range(len(self)):
            yield self.entry(e)

    @functools.cached_property
    def _tree(self) -> cKDTree:
        return cKDTree(np.vstack([self.quats, -self.quats]))

    def nearest(self, u: np.ndarray) -> tuple[int, float]:
        """Index of the closest entry to ``u`` and its projective distance."""
        q = su2.quaternions(su2.to_su2(u))
        _, idx = self._tree.query(q)
        e = int(idx) % len(self)
        return e, float(su2.quaternion_distance(self.quats[e], q))

    def nearest_many(self, mats: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        q = su2.quaternions(np.array([su2.to_su2(m) for m in mats]))
        _, idx = self._tree.query(q)
        e = np.asarray(idx) % len(self)
        return e, su2.quaternion_distance(self.quats[e], q)

    def covering_radius(self, samples: int = 20000, seed: int = 0) -> float:
        """Largest nearest-entry distance over Haar-random samples."""
        rng = np.random.default_rng(seed)
        _, d = self.nearest_many(su2.haar_random(rng, samples))
        return float(d.max())


def _cell_keys(q: np.ndarray, resolution: float) -> np.ndarray:
    return np.rint(su2.rotation_vectors(q) / resolution).astype(np.int64)


def _pack(keys: np.ndarray) -> np.ndarray:
    k = keys + 512
    return (k[:, 0] << 20) | (k[:, 1] << 10) | k[:, 2]


def alphabet_for(constraint: Constraint, strands: int) -> Alphabet:
    if constraint.kind == "purebraid":
        return purebraid_alphabet(strands)
    if constraint.kind == "weave":
        if constraint.warp_start != constraint.warp_end:
            raise ValueError("net words must return the warp to its start; "
                             "endpoint displacement is added by the caller")
        return weave_alphabet(strands, constraint.warp_start)
    words, inverse = [], []
    for i in range(1, strands):
        words += [BraidWord(strands, ((i, 1),)), BraidWord(strands, ((i, -1),))]
        inverse += [len(words) - 1, len(words) - 2]
    return Alphabet(strands, tuple(words), tuple(inverse))


def build_net(basis: FusionPathBasis, constraint: Constraint, max_base_length: int,
              resolution: float = 0.02, max_entries: int = 2_000_000,
              alphabet: Alphabet | None = None) -> Net:
    """Breadth-first enumeration up to ``max_base_length`` letters.

    Only words that claim a new cell are extended, so every entry is the
    first-found (shortest, then lexicographically smallest in letter order)
    word of its cell.
    """
    if len(basis) != 2:
        raise ValueError(f"nets are built on 2-dimensional sectors, got dimension {len(basis)}")
    alphabet = alphabet or alphabet_for(constraint, basis.n)
    images = np.array([su2.to_su2(dense_word_matrix(w, basis)) for w in alphabet.words])
    inv = np.array(alphabet.inverse)

    quats = [np.array([[1.0, 0.0, 0.0, 0.0]])]
    parent = [np.array([0])]
    letter = [np.array([-1])]
    depth = [np.array([0])]
    keys0 = _cell_keys(quats[0], resolution)
    keys = [keys0]
    seen = set(_pack(keys0).tolist())
    total = 1
    front_idx = np.array([0])
    front_q = quats[0]
    front_last = np.array([-1])

    for length in range(1, max_base_length + 1):
        if len(front_idx) == 0 or total >= max_entries:
            break
        mats = su2.from_quaternions(front_q)
        cand_q, cand_parent, cand_letter = [], [], []
        for a in range(len(alphabet)):
            ok = front_last != inv[a]
            if not ok.any():
                continue
            # the letter is applied after the prefix: matrix = image[a] @ prefix
            prod = np.einsum("ij,njk->nik", images[a], mats[ok])
            cand_q.append(su2.canonical(su2.quaternions(prod)))
            cand_parent.append(front_idx[ok])
            cand_letter.append(np.full(ok.sum(), a))
        cq = np.vstack(cand_q)
        cp = np.concatenate(cand_parent)
        cl = np.concatenate(cand_letter)
        # deterministic order: by parent, then letter
        order = np.lexsort((cl, cp))
        cq, cp, cl = cq[order], cp[order], cl[order]
        ck = _cell_keys(cq, resolution)
        packed = _pack(ck)
        _, first = np.unique(packed, return_index=True)
        first = np.sort(first)
        fresh = np.array([i for i in first if packed[i] not in seen], dtype=np.intp)
        if len(fresh) == 0:
            break
        fresh = fresh[: max_entries - total]
        seen.update(packed[fresh].tolist())
        new_idx = np.arange(total, total + len(fresh))
        quats.append(cq[fresh])
        parent.append(cp[fresh])
        letter.append(cl[fresh])
        depth.append(np.full(len(fresh), length))
        keys.append(ck[fresh])
        total += len(fresh)
        front_idx, front_q, front_last = new_idx, cq[fresh], cl[fresh]

    return Net(basis, constraint, alphabet, NetConfig(max_base_length, resolution, max_entries),
               images, np.concatenate(parent), np.concatenate(letter), np.concatenate(depth),
               np.vstack(quats), np.vstack(keys))


def sector_for(constraint: Constraint) -> FusionPathBasis:
    """The 2-dimensional sector each constrained target lives on."""
    if constraint.kind == "purebraid":
        return enumerate_basis(4, leaves=[TAU] * 4)
    if constraint.kind == "weave":
        return enumerate_basis(3, TAU, [TAU] * 3)
    raise ValueError(f"no default sector for {constraint}")
