"""Fibonacci-anyon braid compilation and composite-anyon distillation."""

__version__ = "0.1.0"

from .anyons import ONE, TAU, FusionPath, FusionPathBasis, Label, enumerate_basis, fib_dimension, model_constants
from .braids import (BraidWord, SectorUnitary, StateVector, apply_word, generator_matrix, induced_permutation,
                     projective_distance, weave_trajectory, word_unitary)
from .kernels import BACKEND

__all__ = [
    "BACKEND", "BraidWord", "FusionPath", "FusionPathBasis", "Label", "ONE", "SectorUnitary", "StateVector",
    "TAU", "apply_word", "enumerate_basis", "fib_dimension", "generator_matrix", "induced_permutation",
    "model_constants", "projective_distance", "weave_trajectory", "word_unitary",
]
