"""Solovay-Kitaev recursion on top of a base net."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..anyons import FusionPathBasis
from ..braids import BraidWord, SectorUnitary, projective_distance, word_unitary
from . import su2
from .net import Constraint, Net


class CompileError(RuntimeError):
    """The compiler could not meet its contract."""


class NetTooCoarse(CompileError):
    """Base approximation lies above the SK convergence threshold."""


class ConstraintViolation(CompileError):
    """An emitted word failed its structural check."""


#: SK only contracts when the base error is below this projective distance
CONVERGENCE_THRESHOLD = 1 / math.sqrt(2)


@dataclass(frozen=True)
class CompileTarget:
    basis: FusionPathBasis
    target: SectorUnitary
    constraint: Constraint
    epsilon: float

    def __post_init__(self):
        if not self.epsilon > 0:
            raise ValueError("epsilon must be positive")
        if self.target.unitarity_defect() > 1e-9:
            raise ValueError("compile target is not unitary")


@dataclass(frozen=True)
class CompileResult:
    word: BraidWord
    achieved_epsilon: float
    word_length: int
    sk_depth: int
    depth_errors: tuple[float, ...] = field(default=())
    depth_lengths: tuple[int, ...] = field(default=())


@dataclass(frozen=True)
class Approximation:
    letters: tuple[int, ...]
    matrix: np.ndarray  # SU(2)


def _invert(net: Net, letters: tuple[int, ...]) -> tuple[int, ...]:
    inv = net.alphabet.inverse
    return tuple(inv[a] for a in reversed(letters))


def _reduce(net: Net, letters: list[int]) -> tuple[int, ...]:
    """Cancel adjacent letter/inverse pairs (free reduction)."""
    inv = net.alphabet.inverse
    out: list[int] = []
    for a in letters:
        if out and inv[out[-1]] == a:
            out.pop()
        else:
            out.append(a)
    return tuple(out)


def sk_approximate(net: Net, u: np.ndarray, depth: int) -> Approximation:
    """Letters whose product approximates ``u`` projectively.

    Letters are listed in application order, so the product matrix is
    ``image[last] @ ... @ image[first]``.
    """
    u = su2.to_su2(u)
    if depth == 0:
        e, _ = net.nearest(u)
        return Approximation(tuple(net.letters(e)), net.matrix(e))
    prev = sk_approximate(net, u, depth - 1)
    residual = u @ prev.matrix.conj().T
    v, w = su2.balanced_commutator(residual)
    av = sk_approximate(net, v, depth - 1)
    aw = sk_approximate(net, w, depth - 1)
    # V W V^+ W^+ U_prev, applied right to left
    letters = list(prev.letters) + list(_invert(net, aw.letters)) + list(_invert(net, av.letters))
    letters += list(aw.letters) + list(av.letters)
    mat = av.matrix @ aw.matrix @ av.matrix.conj().T @ aw.matrix.conj().T @ prev.matrix
    return Approximation(_reduce(net, letters), mat)


def solovay_kitaev(target: CompileTarget, net: Net, depth: int,
                   threshold: float = CONVERGENCE_THRESHOLD) -> CompileResult:
    """Approximate ``target`` at a fixed recursion depth.

    The achieved error is re-measured by simulating the emitted word.
    """
    if depth < 0:
        raise ValueError("depth must be non-negative")
    if not net.basis.same_as(target.basis) or net.constraint != target.constraint:
        raise ValueError("net was built for a different sector or constraint")
    u = target.target.matrix
    if depth > 0:
        _, base = net.nearest(u)
        if base > threshold:
            raise NetTooCoarse(f"base distance {base:.3g} exceeds threshold {threshold:.3g}")
    approx = sk_approximate(net, u, depth)
    word = net.alphabet.spell(approx.letters)
    if not target.constraint.check(word):
        raise ConstraintViolation(f"emitted word violates {target.constraint}")
    achieved = projective_distance(word_unitary(word, target.basis), target.target)
    return CompileResult(word, achieved, len(word), depth)


def compile_to_epsilon(target: CompileTarget, net: Net, max_depth: int = 6,
                       threshold: float = CONVERGENCE_THRESHOLD) -> CompileResult:
    """Smallest SK depth whose re-measured error meets ``target.epsilon``."""
    errors, lengths = [], []
    for depth in range(max_depth + 1):
        res = solovay_kitaev(target, net, depth, threshold)
        errors.append(res.achieved_epsilon)
        lengths.append(res.word_length)
        if res.achieved_epsilon <= target.epsilon:
            return CompileResult(res.word, res.achieved_epsilon, res.word_length, depth,
                                 tuple(errors), tuple(lengths))
    raise CompileError(
        f"epsilon {target.epsilon:g} not reached by depth {max_depth}; "
        f"errors per depth: {', '.join(f'{e:.3g}' for e in errors)}"
    )
