"""Fibonacci anyon data: labels, fusion-path bases and the F/R constants.

Basis states are labelled fusion paths of a left-to-right (caterpillar)
fusion tree.  For ``N`` leaves the path carries ``N + 1`` intermediate
charges ``x_0 .. x_N`` with ``x_0`` fixed to the trivial label and
``x_N`` equal to the total charge of the basis.
"""

from __future__ import annotations

import enum
import functools
import itertools
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np


class Label(enum.IntEnum):
    ONE = 0
    TAU = 1

    @property
    def symbol(self) -> str:
        return "1" if self is Label.ONE else "t"

    @classmethod
    def parse(cls, token: str) -> "Label":
        try:
            return {"1": cls.ONE, "t": cls.TAU, "tau": cls.TAU}[token.strip().lower()]
        except KeyError:
            raise ValueError(f"unknown anyon label {token!r}") from None


ONE, TAU = Label.ONE, Label.TAU


def fuse(a: Label, b: Label) -> tuple[Label, ...]:
    """Fusion outcomes of ``a x b`` in increasing order."""
    if a is ONE:
        return (Label(b),)
    if b is ONE:
        return (Label(a),)
    return (ONE, TAU)


def admissible(a: int, b: int, c: int) -> bool:
    """True when ``c`` appears in ``a x b``."""
    # only the vertex with exactly one tau leg is forbidden
    return (a + b + c) != 1


@dataclass(frozen=True)
class FusionPath:
    leaves: tuple[Label, ...]
    charges: tuple[Label, ...]

    def __post_init__(self):
        if len(self.charges) != len(self.leaves) + 1:
            raise ValueError("a fusion path on N leaves carries N + 1 charges")
        if self.charges[0] is not ONE:
            raise ValueError("root charge x_0 must be trivial")
        for i, leaf in enumerate(self.leaves):
            if not admissible(self.charges[i], leaf, self.charges[i + 1]):
                raise ValueError(f"inadmissible vertex at position {i + 1}: {self}")

    @property
    def total_charge(self) -> Label:
        return self.charges[-1]

    def dump(self) -> str:
        return " ".join(l.symbol for l in self.leaves + self.charges)

    @classmethod
    def parse(cls, line: str) -> "FusionPath":
        tokens = line.split()
        if len(tokens) % 2 == 0:
            raise ValueError(f"malformed path line {line!r}")
        n = len(tokens) // 2
        labels = [Label.parse(t) for t in tokens]
        return cls(tuple(labels[:n]), tuple(labels[n:]))


@dataclass(frozen=True, eq=False)
class FusionPathBasis:
    """Canonically ordered fusion paths on ``n`` leaves with a fixed total charge.

    ``leaves`` and ``charges`` hold the paths as small-integer arrays of
    shape ``(dim, n)`` and ``(dim, n + 1)``; :attr:`paths` gives the
    same data as :class:`FusionPath` objects.
    """

    n: int
    total_charge: Label
    leaves: np.ndarray = field(repr=False)
    charges: np.ndarray = field(repr=False)

    def __len__(self) -> int:
        return self.leaves.shape[0]

    @property
    def dim(self) -> int:
        return len(self)

    @functools.cached_property
    def paths(self) -> tuple[FusionPath, ...]:
        return tuple(
            FusionPath(tuple(Label(v) for v in l), tuple(Label(v) for v in x))
            for l, x in zip(self.leaves.tolist(), self.charges.tolist())
        )

    @functools.cached_property
    def keys(self) -> np.ndarray:
        return path_keys(self.leaves, self.charges)

    @functools.cached_property
    def _sorted_keys(self) -> tuple[np.ndarray, np.ndarray]:
        order = np.argsort(self.keys, kind="stable")
        return self.keys[order], order

    def lookup(self, leaves: np.ndarray, charges: np.ndarray) -> np.ndarray:
        """Positions of the given paths; -1 where a path is not in the basis."""
        k = path_keys(leaves, charges)
        sorted_keys, order = self._sorted_keys
        pos = np.searchsorted(sorted_keys, k)
        pos = np.minimum(pos, len(sorted_keys) - 1) if len(sorted_keys) else pos
        out = np.full(k.shape, -1, dtype=np.intp)
        if len(sorted_keys):
            hit = sorted_keys[pos] == k
            out[hit] = order[pos[hit]]
        return out

    def index(self, path: FusionPath) -> int:
        pos = self.lookup(
            np.array([path.leaves], dtype=np.int8), np.array([path.charges], dtype=np.int8)
        )[0]
        if pos < 0:
            raise KeyError(path)
        return int(pos)

    def __contains__(self, path: FusionPath) -> bool:
        try:
            self.index(path)
        except (KeyError, ValueError):
            return False
        return True

    def dump(self) -> str:
        return "".join(p.dump() + "\n" for p in self.paths)

    def tau_counts(self) -> np.ndarray:
        return self.leaves.sum(axis=1)

    def same_as(self, other: "FusionPathBasis") -> bool:
        """Same paths in the same order (identity is not required)."""
        return self is other or (
            self.n == other.n and self.total_charge == other.total_charge
            and np.array_equal(self.leaves, other.leaves) and np.array_equal(self.charges, other.charges)
        )


# a path packs into 2n + 1 bits of an int64 key
MAX_LEAVES = 31


def path_keys(leaves: np.ndarray, charges: np.ndarray) -> np.ndarray:
    leaves = np.atleast_2d(leaves).astype(np.int64)
    charges = np.atleast_2d(charges).astype(np.int64)
    n = leaves.shape[1]
    weights_l = np.left_shift(1, np.arange(n, dtype=np.int64))
    weights_x = np.left_shift(1, np.arange(n, 2 * n + 1, dtype=np.int64))
    return leaves @ weights_l + charges @ weights_x


@functools.lru_cache(maxsize=128)
def _enumerate(n: int, total: int, leaf_constraint: tuple[int, ...] | None,
               tau_count: int | None) -> FusionPathBasis:
    # grow paths position by position; prune on the tau budget
    leaves = np.zeros((1, 0), dtype=np.int8)
    charges = np.zeros((1, 1), dtype=np.int8)
    for i in range(n):
        choices = (leaf_constraint[i],) if leaf_constraint is not None else (0, 1)
        new_l, new_x = [], []
        for leaf in choices:
            for nxt in (0, 1):
                ok = np.array([admissible(x, leaf, nxt) for x in (0, 1)])[charges[:, -1]]
                if tau_count is not None:
                    ok &= leaves.sum(axis=1) + leaf <= tau_count
                if not ok.any():
                    continue
                new_l.append(np.hstack([leaves[ok], np.full((ok.sum(), 1), leaf, np.int8)]))
                new_x.append(np.hstack([charges[ok], np.full((ok.sum(), 1), nxt, np.int8)]))
        if not new_l:
            leaves = np.zeros((0, i + 1), dtype=np.int8)
            charges = np.zeros((0, i + 2), dtype=np.int8)
            break
        leaves, charges = np.vstack(new_l), np.vstack(new_x)
    keep = charges[:, -1] == total
    if tau_count is not None:
        keep &= leaves.sum(axis=1) == tau_count
    leaves, charges = leaves[keep], charges[keep]
    # lexicographic in (leaves, charges); lexsort takes its primary key last
    sort_keys = [charges[:, j] for j in reversed(range(n + 1))]
    sort_keys += [leaves[:, j] for j in reversed(range(n))]
    order = np.lexsort(sort_keys) if len(leaves) else np.zeros(0, dtype=np.intp)
    leaves = np.ascontiguousarray(leaves[order])
    charges = np.ascontiguousarray(charges[order])
    leaves.setflags(write=False)
    charges.setflags(write=False)
    return FusionPathBasis(n, Label(total), leaves, charges)


def enumerate_basis(n: int, total_charge: Label = ONE,
                    leaves: Sequence[Label] | None = None,
                    tau_count: int | None = None) -> FusionPathBasis:
    """All admissible fusion paths on ``n`` leaves with the given total charge.

    ``leaves`` fixes every leaf label; ``tau_count`` keeps only paths with
    that many tau leaves (the smallest basis closed under braiding for a
    given particle number).  Equal arguments return the same object.
    """
    if not 1 <= n <= MAX_LEAVES:
        raise ValueError(f"leaf count must lie in [1, {MAX_LEAVES}], got {n}")
    constraint = None
    if leaves is not None:
        constraint = tuple(int(Label(l)) for l in leaves)
        if len(constraint) != n:
            raise ValueError(f"leaf constraint has {len(constraint)} labels, expected {n}")
    return _enumerate(n, int(Label(total_charge)), constraint, tau_count)


def sector_basis(leaves: Iterable[Label | str], total_charge: Label = ONE) -> FusionPathBasis:
    labels = [Label.parse(l) if isinstance(l, str) else Label(l) for l in leaves]
    return enumerate_basis(len(labels), total_charge, labels)


PHI = (1 + math.sqrt(5)) / 2


def fib_dimension(n: int) -> int:
    """Dimension of the space of ``n`` tau anyons with trivial total charge."""
    if n < 1:
        raise ValueError("n must be positive")
    # Fibonacci number F_{n-1}, exact in integers for every n
    a, b = 0, 1
    for _ in range(n - 1):
        a, b = b, a + b
    return a


@dataclass(frozen=True)
class ModelConstants:
    phi: float
    f_matrix: np.ndarray = field(repr=False)
    r_phase_one: complex
    r_phase_tau: complex
    bubble: float

    @property
    def r_matrix(self) -> np.ndarray:
        return np.diag([self.r_phase_one, self.r_phase_tau])


@functools.lru_cache(maxsize=1)
def model_constants() -> ModelConstants:
    phi = PHI
    f = np.array([[1 / phi, 1 / math.sqrt(phi)],
                  [1 / math.sqrt(phi), -1 / phi]])
    f.setflags(write=False)
    return ModelConstants(
        phi=phi,
        f_matrix=f,
        r_phase_one=complex(np.exp(-4j * np.pi / 5)),
        r_phase_tau=complex(np.exp(3j * np.pi / 5)),
        bubble=phi,
    )


def f_symbol(a: int, b: int, c: int, d: int, e: int, f: int) -> float:
    """F^{abc}_d[e, f]: ``e`` is the ``a x b`` channel, ``f`` the ``b x c`` channel."""
    if not (admissible(a, b, e) and admissible(e, c, d)
            and admissible(b, c, f) and admissible(a, f, d)):
        return 0.0
    if a == b == c == d == 1:
        return float(model_constants().f_matrix[e, f])
    return 1.0


def r_symbol(a: int, b: int, c: int) -> complex:
    """Phase for exchanging ``a`` and ``b`` in fusion channel ``c``."""
    if not admissible(a, b, c):
        return 0.0
    if a == 1 and b == 1:
        k = model_constants()
        return k.r_phase_one if c == 0 else k.r_phase_tau
    return 1.0


def pentagon_defect() -> float:
    """Largest violation of the pentagon equation over all labels.

    F^{fcd}_e[g,l] F^{abl}_e[f,k] = sum_h F^{abc}_g[f,h] F^{ahd}_e[g,k] F^{bcd}_k[h,l]
    """
    worst = 0.0
    for a, b, c, d, e, f, g, k, l in itertools.product((0, 1), repeat=9):
        lhs = f_symbol(f, c, d, e, g, l) * f_symbol(a, b, l, e, f, k)
        rhs = sum(f_symbol(a, b, c, g, f, h) * f_symbol(a, h, d, e, g, k)
                  * f_symbol(b, c, d, k, h, l) for h in (0, 1))
        worst = max(worst, abs(lhs - rhs))
    return worst


def hexagon_defect(inverse: bool = False) -> float:
    """Largest violation of the hexagon equation (or its mirror with R^-1).

    R^{ca}_e F^{acb}_d[e,g] R^{cb}_g = sum_f F^{cab}_d[e,f] R^{cf}_d F^{abc}_d[f,g]
    """

    def r(x, y, z):
        v = r_symbol(x, y, z)
        return np.conj(v) if inverse else v

    worst = 0.0
    for a, b, c, d, e, g in itertools.product((0, 1), repeat=6):
        lhs = r(c, a, e) * f_symbol(a, c, b, d, e, g) * r(c, b, g)
        rhs = sum(f_symbol(c, a, b, d, e, f) * r(c, f, d) * f_symbol(a, b, c, d, f, g)
                  for f in (0, 1))
        worst = max(worst, abs(lhs - rhs))
    return worst
