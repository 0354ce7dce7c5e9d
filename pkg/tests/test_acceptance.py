"""Acceptance criteria, one test each; every test prints a single PASS/FAIL line."""

import json
import math
import time

import numpy as np
import pytest

from fibdistill.anyons import ONE, PHI, TAU, enumerate_basis, fib_dimension, hexagon_defect, model_constants, pentagon_defect
from fibdistill.braids import (StateVector, artin_defect, is_injection_weave, is_pure, projective_distance,
                               weave_trajectory, word_unitary)
from fibdistill.cli import main
from fibdistill.compiler.primitives import NOT, compile_injection_weave, compile_not_purebraid, not_sector, weave_sector
from fibdistill.distill import (RegionLayout, cabled, error_budget, level_word, occupation_state,
                                pair_creation_ensemble, protocol_words, run_protocol)


def brute_force_all_tau_count(n):
    """Count charge sequences x_1..x_{n-1} in {1, tau} admissible for n tau leaves, x_0 = x_n = 1."""
    if n == 1:
        return 0
    xs = (np.arange(2 ** (n - 1))[:, None] >> np.arange(n - 1)) & 1
    full = np.hstack([np.zeros((len(xs), 1), int), xs, np.zeros((len(xs), 1), int)])
    # a tau leaf joining a to b is admissible unless a = b = 1
    ok = ~((full[:, :-1] == 0) & (full[:, 1:] == 0))
    return int(ok.all(axis=1).sum())


def test_criterion_1_algebra(criterion):
    f = model_constants().f_matrix
    f_unit = float(np.abs(f.conj().T @ f - np.eye(2)).max())
    f_inv = float(np.abs(f @ f - np.eye(2)).max())
    pent, hexa = pentagon_defect(), max(hexagon_defect(), hexagon_defect(inverse=True))
    artin = max(artin_defect(n, c) for n in range(2, 7) for c in (ONE, TAU))
    ok = f_unit <= 1e-12 and f_inv <= 1e-12 and pent <= 1e-10 and hexa <= 1e-10 and artin <= 1e-12
    criterion(1, "algebraic consistency", ok,
              f"F unitary {f_unit:.1e}, F^2=1 {f_inv:.1e}, pentagon {pent:.1e}, hexagon {hexa:.1e}, Artin {artin:.1e}")
    assert ok


def test_criterion_2_dimensions(criterion):
    bad = []
    for n in range(1, 21):
        closed = round((PHI ** (n - 1) - (-1 / PHI) ** (n - 1)) / math.sqrt(5))
        brute = brute_force_all_tau_count(n)
        listed = len(enumerate_basis(n, ONE, [TAU] * n))
        if not fib_dimension(n) == brute == closed == listed:
            bad.append(n)
    ok = not bad
    criterion(2, "fusion-space dimensions n=1..20", ok,
              f"d(20)={fib_dimension(20)}" + (f", mismatches at {bad}" if bad else ""))
    assert ok


def test_criterion_3_compiler_targets(criterion, b_result, w_result):
    b, w = b_result.word, w_result.word
    eps_b = projective_distance(word_unitary(b, not_sector()), NOT)
    eps_w = projective_distance(word_unitary(w, weave_sector()), np.eye(2))
    phases = []
    for leaves in ((TAU, TAU, ONE, ONE), (ONE, ONE, TAU, TAU)):
        u = word_unitary(b, enumerate_basis(4, ONE, leaves)).matrix
        phases.append(abs(abs(u[0, 0]) - 1))
    ok = (eps_b <= 1e-3 and eps_w <= 1e-3 and is_pure(b) and is_injection_weave(w)
          and weave_trajectory(w, 3)[-1] == 1 and max(phases) <= 1e-10)
    criterion(3, "compiled b and w", ok,
              f"eps_b {eps_b:.2e} ({len(b)} crossings), eps_w {eps_w:.2e} ({len(w)} crossings), "
              f"sector phase defect {max(phases):.1e}")
    assert ok


def test_criterion_4_sk_scaling(criterion):
    lines, ok = [], True
    for name, fn in (("b", compile_not_purebraid), ("w", compile_injection_weave)):
        lengths = {eps: fn(eps).word_length for eps in (1e-1, 1e-2, 1e-3)}
        c0 = lengths[1e-1] / math.log2(10) ** 4
        for eps, n in lengths.items():
            ok &= n <= c0 * math.log2(1 / eps) ** 4
        lines.append(f"{name}: " + "/".join(str(lengths[e]) for e in (1e-1, 1e-2, 1e-3))
                     + f" vs bound {c0 * math.log2(1e3) ** 4:.0f} at 1e-3")
    criterion(4, "word length <= C0 log2(1/eps)^4", ok, "; ".join(lines))
    assert ok


def test_criterion_5_noise_model(criterion):
    worst_exact = 0.0
    for m in (2, 4):
        for p in (0.3, 0.5, 0.8):
            ens = pair_creation_ensemble(RegionLayout(1, m), p, method="exact")
            worst_exact = max(worst_exact, abs(ens.weight_in_support() - (1 - (1 - p) ** m)))
    sigmas = []
    for p in (0.1, 0.3, 0.5):
        ens = pair_creation_ensemble(RegionLayout(1, 8), p, method="sample", samples=10_000, seed=2024)
        expected = 1 - (1 - p) ** 8
        se = math.sqrt(expected * (1 - expected) / 10_000)
        sigmas.append(abs(ens.weight_in_support() - expected) / se)
    ok = worst_exact <= 1e-12 and max(sigmas) <= 3
    criterion(5, "pair-creation weight 1-(1-p)^m", ok,
              f"exact deviation {worst_exact:.1e}, sampled m=8 deviations "
              + ", ".join(f"{s:.2f}σ" for s in sigmas))
    assert ok


def test_criterion_6_single_level(criterion, b_word, w_word, rng):
    lay = RegionLayout(1, 2)
    basis = enumerate_basis(4)
    forms = [occupation_state(lay, occ, basis) for occ in ((True, False), (False, True), (True, True))]
    rep = run_protocol(forms[0], lay, b_word, w_word)
    bound = rep.epsilon_b + rep.epsilon_w + 1e-9
    errs = [run_protocol(s, lay, b_word, w_word).final_error for s in forms]
    mix = []
    for _ in range(100):
        c = rng.normal(size=3) + 1j * rng.normal(size=3)
        amps = sum(ci * s.amplitudes for ci, s in zip(c, forms))
        mix.append(StateVector(basis, amps / np.linalg.norm(amps)))
    rep_mix = run_protocol([(1.0, s) for s in mix], lay, b_word, w_word)
    ok = max(errs) <= bound and rep_mix.final_error <= bound and rep_mix.members == 100
    criterion(6, "single-level distillation (m=2, k=1)", ok,
              f"spanning forms {', '.join(f'{e:.2e}' for e in errs)}; "
              f"100 superpositions max {rep_mix.final_error:.2e}; bound {bound:.2e}")
    assert ok


def test_criterion_7_two_levels(criterion, b_word, w_word, rng):
    lay = RegionLayout(1, 4)
    t0 = time.perf_counter()
    rep = run_protocol(pair_creation_ensemble(lay, 0.5), lay, b_word, w_word)
    # superpositions of occupation patterns with at least one pair
    basis = enumerate_basis(lay.n_dots)
    patterns = [[bool(b >> j & 1) for j in range(4)] for b in range(1, 16)]
    states = [occupation_state(lay, pat, basis).amplitudes for pat in patterns]
    mix = []
    for _ in range(20):
        c = rng.normal(size=15) + 1j * rng.normal(size=15)
        amps = sum(ci * s for ci, s in zip(c, states))
        mix.append((1.0, StateVector(basis, amps / np.linalg.norm(amps))))
    rep_mix = run_protocol(mix, lay, b_word, w_word)
    elapsed = time.perf_counter() - t0
    eps = rep.epsilon_b + rep.epsilon_w
    budget = 6 * eps
    words = protocol_words(lay, b_word, w_word)
    accounting = all(len(words[r]) == 2 ** (r - 1) * (len(b_word) + len(w_word)) * lay.cable_width(r) ** 2
                     for r in words)
    accounting &= rep.elementary_crossings == sum(len(wd) for wd in words.values())
    ok = (rep.final_error <= budget and rep_mix.final_error <= budget and accounting
          and rep.budget.delta == pytest.approx(budget) and elapsed <= 300)
    criterion(7, "two-level distillation (m=4, k=1)", ok,
              f"ensemble max {rep.final_error:.2e}, superpositions max {rep_mix.final_error:.2e}, "
              f"budget 6eps {budget:.2e}, crossings {rep.elementary_crossings}, {elapsed:.1f}s")
    assert ok


def test_criterion_8_multi_region(criterion, b_word, w_word):
    lay = RegionLayout(2, 2)
    rep = run_protocol(pair_creation_ensemble(lay, 0.5), lay, b_word, w_word)
    overall = error_budget(lay.ell, rep.epsilon_b + rep.epsilon_w, lay.k).overall
    local = True
    for alpha in range(lay.k):
        dots = set(lay.region_dots(alpha))
        for word, first in ((b_word, 0), (w_word, 1)):
            local &= all({i, i + 1} <= dots for i, _ in cabled(word, lay, 1, alpha, first).crossings)
    whole = level_word(lay, 1, b_word, w_word)
    half = len(whole) // 2
    local &= all(i + 1 <= 4 for i, _ in whole.crossings[:half]) and all(i >= 5 for i, _ in whole.crossings[half:])
    ok = rep.final_error <= overall and local and rep.budget.overall == pytest.approx(overall)
    criterion(8, "multi-region (k=2, m=2)", ok,
              f"final error {rep.final_error:.2e} vs k*delta {overall:.2e}; region locality {'holds' if local else 'broken'}")
    assert ok


def test_criterion_9_reproducibility(criterion, tmp_path, b_word, w_word):
    b_word.save(tmp_path / "b.braid")
    w_word.save(tmp_path / "w.braid")
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"k": 1, "m": 4, "p": 0.5, "epsilon": 1e-3, "bWordPath": "b.braid",
                               "wWordPath": "w.braid", "seed": 5, "sampleCount": 1000}))
    codes = [main(["distill", "--config", str(cfg), "--out", str(tmp_path / d)]) for d in ("r1", "r2")]
    same = all((tmp_path / "r1" / f).read_bytes() == (tmp_path / "r2" / f).read_bytes()
               for f in ("report.jsonl", "summary.txt", "leakage.csv"))
    ok = codes == [0, 0] and same
    criterion(9, "byte-identical reports", ok, f"exit codes {codes}, identical={same}")
    assert ok
