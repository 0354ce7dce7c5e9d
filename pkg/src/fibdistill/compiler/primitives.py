"""The two braids the distillation protocol needs.

``b`` is a 4-strand pure braid acting as NOT on the space of four tau
anyons with trivial charge.  ``w`` is a 3-strand injection weave acting
as the identity on three tau anyons of total charge tau while carrying
its warp strand from the right end to the left end.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass

import numpy as np

from ..anyons import ONE, TAU, enumerate_basis
from ..braids import BraidWord, SectorUnitary, is_injection_weave, is_pure, projective_distance, word_unitary
from .net import PUREBRAID, Constraint, Net, build_net, sector_for, weave
from .sk import CompileError, CompileResult, CompileTarget, ConstraintViolation, compile_to_epsilon

NOT = np.array([[0, 1], [1, 0]], dtype=np.complex128)

# base lengths counted in alphabet letters; both nets cover PU(2) to < 0.05
PUREBRAID_BASE_LENGTH = 8
WEAVE_BASE_LENGTH = 14
NET_RESOLUTION = 0.02
MAX_DEPTH = 6

# warp moves 3 -> 2 before the corrections and 2 -> 1 after them
WEAVE_ENTRY = ((2, 1),)
WEAVE_EXIT = ((1, 1),)
PARKED = weave(2, 2)


@dataclass(frozen=True)
class CompilerConfig:
    purebraid_base_length: int = PUREBRAID_BASE_LENGTH
    weave_base_length: int = WEAVE_BASE_LENGTH
    resolution: float = NET_RESOLUTION
    max_depth: int = MAX_DEPTH

    def net_parameters(self, target: str) -> dict:
        length = self.purebraid_base_length if target == "not-purebraid" else self.weave_base_length
        return {"maxBaseLength": length, "resolution": self.resolution, "maxDepth": self.max_depth}


@functools.lru_cache(maxsize=8)
def cached_net(constraint: Constraint, max_base_length: int, resolution: float) -> Net:
    return build_net(sector_for(constraint), constraint, max_base_length, resolution)


def not_sector():
    """Four tau anyons, trivial charge: index 0 has both pairs in channel 1."""
    return enumerate_basis(4, ONE, [TAU] * 4)


def weave_sector():
    return enumerate_basis(3, TAU, [TAU] * 3)


def compile_not_purebraid(epsilon: float, config: CompilerConfig = CompilerConfig()) -> CompileResult:
    if not epsilon > 0:
        raise ValueError("epsilon must be positive")
    basis = not_sector()
    net = cached_net(PUREBRAID, config.purebraid_base_length, config.resolution)
    target = CompileTarget(basis, SectorUnitary(basis, NOT), PUREBRAID, epsilon)
    res = compile_to_epsilon(target, net, config.max_depth)
    if not is_pure(res.word):
        raise ConstraintViolation("compiled NOT braid is not pure")
    for leaves in ("tt11", "11tt"):
        sector = enumerate_basis(4, ONE, [TAU if c == "t" else ONE for c in leaves])
        u = word_unitary(res.word, sector).matrix
        if abs(abs(u[0, 0]) - 1) > 1e-10:
            raise ConstraintViolation(f"pure braid does not act as a phase on sector {leaves}")
    return res


def compile_injection_weave(epsilon: float, config: CompilerConfig = CompilerConfig()) -> CompileResult:
    if not epsilon > 0:
        raise ValueError("epsilon must be positive")
    basis = weave_sector()
    entry = BraidWord(3, WEAVE_ENTRY)
    exit_ = BraidWord(3, WEAVE_EXIT)
    m_entry = word_unitary(entry, basis).matrix
    m_exit = word_unitary(exit_, basis).matrix
    # exit @ C @ entry ~ 1  =>  C ~ exit^-1 entry^-1
    core = m_exit.conj().T @ m_entry.conj().T
    net = cached_net(PARKED, config.weave_base_length, config.resolution)
    target = CompileTarget(basis, SectorUnitary(basis, core), PARKED, epsilon)
    res = compile_to_epsilon(target, net, config.max_depth)
    word = entry + res.word + exit_
    if not is_injection_weave(word):
        raise CompileError("no displacement -2 weave could be formed")
    achieved = projective_distance(word_unitary(word, basis), SectorUnitary(basis, np.eye(2)))
    if achieved > epsilon:
        raise CompileError(f"injection weave error {achieved:.3g} exceeds {epsilon:g}")
    return CompileResult(word, achieved, len(word), res.sk_depth, res.depth_errors, res.depth_lengths)


TARGETS = {
    "not-purebraid": compile_not_purebraid,
    "injection-weave": compile_injection_weave,
}
