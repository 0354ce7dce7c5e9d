import itertools
import math

import numpy as np
import pytest

from fibdistill.anyons import (ONE, PHI, TAU, FusionPath, Label, admissible, enumerate_basis,
                               f_symbol, fib_dimension, fuse, hexagon_defect, model_constants,
                               pentagon_defect, r_symbol)


def brute_force_paths(n, total, leaves=None):
    """Every labelling of leaves and edges, filtered by the fusion table."""
    found = []
    leaf_choices = [leaves] if leaves is not None else itertools.product((0, 1), repeat=n)
    for ls in leaf_choices:
        for xs in itertools.product((0, 1), repeat=n - 1):
            charges = (0,) + xs + (total,)
            if all(((charges[i] + ls[i] + charges[i + 1]) != 1) for i in range(n)):
                found.append((tuple(ls), charges))
    return sorted(found)


def test_fusion_table():
    assert fuse(ONE, ONE) == (ONE,)
    assert fuse(ONE, TAU) == fuse(TAU, ONE) == (TAU,)
    assert fuse(TAU, TAU) == (ONE, TAU)
    for a, b, c in itertools.product((0, 1), repeat=3):
        assert admissible(a, b, c) == (Label(c) in fuse(Label(a), Label(b)))


@pytest.mark.parametrize("n,total,leaves,expected", [
    (2, ONE, (TAU, TAU), 1),
    (4, ONE, (TAU,) * 4, 2),
    (3, TAU, (TAU,) * 3, 2),
    (1, ONE, (TAU,), 0),
])
def test_enumerate_examples(n, total, leaves, expected):
    assert len(enumerate_basis(n, total, leaves)) == expected


def test_two_taus_fuse_to_vacuum_uniquely():
    basis = enumerate_basis(2, ONE, (TAU, TAU))
    assert basis.paths == (FusionPath((TAU, TAU), (ONE, TAU, ONE)),)


def test_free_leaf_count_matches_transfer_matrix():
    # rows/cols: incoming charge; entry counts (leaf, outgoing) choices
    m = np.zeros((2, 2), dtype=int)
    for x, l, y in itertools.product((0, 1), repeat=3):
        m[x, y] += admissible(x, l, y)
    oracle = np.linalg.matrix_power(m, 4)[0, 0]
    assert oracle == 13
    assert len(enumerate_basis(4)) == oracle
    for n in range(1, 11):
        assert len(enumerate_basis(n)) == np.linalg.matrix_power(m, n)[0, 0]
        assert len(enumerate_basis(n, TAU)) == np.linalg.matrix_power(m, n)[0, 1]


@pytest.mark.parametrize("n", range(1, 8))
@pytest.mark.parametrize("total", [ONE, TAU])
def test_enumeration_matches_brute_force(n, total):
    basis = enumerate_basis(n, total)
    got = sorted(zip(map(tuple, basis.leaves.tolist()), map(tuple, basis.charges.tolist())))
    assert got == brute_force_paths(n, int(total))


def test_canonical_order_is_lexicographic_and_stable():
    basis = enumerate_basis(5)
    rows = [tuple(l) + tuple(x) for l, x in zip(basis.leaves.tolist(), basis.charges.tolist())]
    assert rows == sorted(rows)
    again = enumerate_basis(5)
    assert again is basis
    from fibdistill.anyons import _enumerate
    fresh = _enumerate.__wrapped__(5, int(ONE), None, None)
    assert fresh is not basis and fresh.same_as(basis)
    assert not fresh.same_as(enumerate_basis(5, TAU))


def test_tau_count_filter_is_a_subset():
    full = enumerate_basis(6)
    for q in range(7):
        part = enumerate_basis(6, tau_count=q)
        assert len(part) == int((full.tau_counts() == q).sum())
        assert (full.lookup(part.leaves, part.charges) >= 0).all()


def test_path_invariants_enforced():
    with pytest.raises(ValueError):
        FusionPath((TAU,), (TAU, TAU))
    with pytest.raises(ValueError):
        FusionPath((ONE, TAU), (ONE, ONE, ONE))
    with pytest.raises(ValueError):
        enumerate_basis(0)
    with pytest.raises(ValueError):
        enumerate_basis(32, leaves=[ONE] * 32)


def test_basis_index_lookup():
    basis = enumerate_basis(4)
    for pos, path in enumerate(basis.paths):
        assert basis.index(path) == pos
        assert path in basis
    assert FusionPath((TAU, TAU), (ONE, TAU, TAU)) not in basis


def test_dump_format():
    text = enumerate_basis(4, ONE, (TAU,) * 4).dump()
    assert text == "t t t t 1 t 1 t 1\nt t t t 1 t t t 1\n"
    for line in text.splitlines():
        assert FusionPath.parse(line).dump() == line


@pytest.mark.parametrize("n,expected", [(2, 1), (4, 2), (8, 13)])
def test_fib_dimension_examples(n, expected):
    assert fib_dimension(n) == expected


def test_fib_dimension_matches_enumeration():
    for n in range(1, 21):
        assert fib_dimension(n) == len(enumerate_basis(n, ONE, (TAU,) * n))
    for n in range(1, 21):
        closed = (PHI ** (n - 1) - (-1 / PHI) ** (n - 1)) / math.sqrt(5)
        assert fib_dimension(n) == round(closed) and abs(fib_dimension(n) - closed) < 1e-9
    assert fib_dimension(100) == 218922995834555169026


def test_model_constants():
    k = model_constants()
    assert k.phi == pytest.approx((math.sqrt(5) + 1) / 2, abs=1e-15)
    assert k.f_matrix[0, 0] == pytest.approx(0.618034, abs=1e-6)
    assert k.f_matrix[0, 1] == pytest.approx(1 / math.sqrt(PHI), abs=1e-15)
    assert k.r_phase_one == pytest.approx(np.exp(-4j * np.pi / 5), abs=1e-15)
    assert k.r_phase_tau == pytest.approx(np.exp(3j * np.pi / 5), abs=1e-15)
    f = k.f_matrix
    assert np.isrealobj(f)
    assert np.abs(f - f.T).max() == 0
    assert np.abs(f @ f - np.eye(2)).max() <= 1e-12
    assert np.abs(f.T @ f - np.eye(2)).max() <= 1e-12
    assert abs(abs(k.r_phase_one) - 1) < 1e-15 and abs(abs(k.r_phase_tau) - 1) < 1e-15


def test_bubble_value():
    k = model_constants()
    d = k.bubble
    assert d == pytest.approx(PHI)
    # a closed tau loop next to a line splits off 1/d of the vacuum channel
    assert k.f_matrix[0, 0] == pytest.approx(1 / d, abs=1e-15)
    # quantum dimensions respect tau x tau = 1 + tau
    assert d * d == pytest.approx(1 + d, abs=1e-12)
    # and the F column through the vacuum channel is (1/d, 1/sqrt d)
    assert k.f_matrix[1, 0] ** 2 == pytest.approx(1 / d, abs=1e-12)


def test_pentagon_and_hexagon():
    assert pentagon_defect() <= 1e-10
    assert hexagon_defect() <= 1e-10
    assert hexagon_defect(inverse=True) <= 1e-10


def test_hexagon_catches_wrong_chirality(monkeypatch):
    import fibdistill.anyons as anyons

    real = anyons.model_constants()
    fake = anyons.ModelConstants(real.phi, real.f_matrix, real.r_phase_one,
                                 np.conj(real.r_phase_tau), real.bubble)
    monkeypatch.setattr(anyons, "model_constants", lambda: fake)
    assert anyons.hexagon_defect() > 1e-3


def test_symbols_vanish_off_the_fusion_rules():
    assert f_symbol(1, 1, 1, 1, 0, 0) == pytest.approx(1 / PHI)
    assert f_symbol(0, 1, 1, 0, 0, 0) == 0.0
    assert r_symbol(1, 0, 0) == 0.0
    assert r_symbol(0, 1, 1) == 1.0
