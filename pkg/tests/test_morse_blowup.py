"""Tests for the linear blow-up flow model: spectra, gradings, integration."""

from __future__ import annotations

import numpy as np
import pytest

from hmrkit.complexes import assemble, homology, les_maps, verify_d_squared, verify_les_exact
from hmrkit.errors import DegenerateSpectrum, ShapeMismatch, StepTooLarge
from hmrkit.f2lin import F2Matrix
from hmrkit.morse_blowup import (
    BaseMorseData,
    BasePoint,
    LinearFlowModel,
    adjacent_trajectory_count_mod2,
    blowup_critical_points,
    build_model_complexes,
    closed_form_phi,
    integrate_blowup_flow,
    limiting_eigen_index,
    rp_critical_points,
)


def random_symmetric(n, rng):
    a = rng.normal(size=(n, n))
    return (a + a.T) / 2


def test_rp_critical_points_diag():
    m = LinearFlowModel(np.diag([1.0, 2.0]))
    assert rp_critical_points(m) == [(1, 0), (2, 1)]


def test_rp_critical_points_three():
    m = LinearFlowModel(np.diag([-1.0, 2.0, 5.0]))
    assert [idx for (_, idx) in rp_critical_points(m)] == [0, 1, 2]


def test_rp_critical_points_random_oracle():
    rng = np.random.default_rng(11)
    a = random_symmetric(5, rng)
    m = LinearFlowModel(a)
    assert [idx for (_, idx) in rp_critical_points(m)] == [0, 1, 2, 3, 4]
    # eigenvector oracle: columns orthonormal and satisfy A w = lambda w
    w = m.eigenvectors
    assert np.allclose(w.T @ w, np.eye(5), atol=1e-10)
    for k in range(5):
        assert np.allclose(a @ w[:, k], m.eigenvalues[k] * w[:, k],
                           atol=1e-9)


def test_degenerate_spectrum_rejected():
    with pytest.raises(DegenerateSpectrum):
        LinearFlowModel(np.diag([1.0, 1.0]))
    with pytest.raises(DegenerateSpectrum):
        LinearFlowModel(np.diag([0.0, 1.0]))


def test_blowup_gradings_mixed_signature():
    base = BaseMorseData([BasePoint("q", 0,
                                    LinearFlowModel(np.diag([-2.0, 1.0])))])
    gens = blowup_critical_points(base)
    assert {(g.kind, g.gr) for g in gens} == {("u", 1), ("s", 1)}


def test_blowup_gradings_all_positive():
    base = BaseMorseData([BasePoint("q", 0,
                                    LinearFlowModel(np.diag([1.0, 2.0, 3.0])))])
    gens = blowup_critical_points(base)
    assert [(g.kind, g.gr) for g in gens] == [("s", 0), ("s", 1), ("s", 2)]


def test_blowup_gradings_two_base_points():
    fib = LinearFlowModel(np.diag([-1.0, 1.0]))
    base = BaseMorseData([BasePoint("q0", 0, fib), BasePoint("q1", 1, fib)])
    gens = blowup_critical_points(base)
    assert sorted((g.kind, g.gr) for g in gens) == [
        ("s", 1), ("s", 2), ("u", 1), ("u", 2)]


def test_adjacent_counts_vanish():
    m = LinearFlowModel(np.diag([-1.0, 2.0, 5.0]))
    for i in range(1, 4):
        for j in range(1, 4):
            assert adjacent_trajectory_count_mod2(m, i, j) == 0


def test_single_point_model_ranks():
    # p positive, m negative eigenvalues: bar rank p+m, check p, hat m
    fib = LinearFlowModel(np.diag([-3.0, -1.0, 2.0, 4.0, 5.0]))
    base = BaseMorseData([BasePoint("q", 0, fib)])
    blocks = build_model_complexes(base)
    c = assemble(blocks)
    assert verify_d_squared(c)
    assert sum(homology(c, "bar").values()) == 5
    assert sum(homology(c, "check").values()) == 3
    assert sum(homology(c, "hat").values()) == 2


@pytest.mark.parametrize("n", range(2, 9))
def test_rp_model_homology_and_les(n):
    rng = np.random.default_rng(100 + n)
    vals = np.sort(rng.uniform(0.5, 5.0, size=n))
    vals[: n // 2] *= -1
    vals = np.sort(vals)
    fib = LinearFlowModel(np.diag(vals))
    base = BaseMorseData([BasePoint("q", 0, fib)])
    blocks = build_model_complexes(base)
    c = assemble(blocks)
    assert verify_d_squared(c)
    bar = homology(c, "bar")
    # one class in each bar grading attained: the projective space answer
    assert sum(bar.values()) == n
    assert all(v == 1 for v in bar.values())
    assert sum(homology(c, "check").values()) == fib.num_positive
    assert sum(homology(c, "hat").values()) == fib.num_negative
    assert verify_les_exact(c, les_maps(blocks))


def test_floer_anchor_tower():
    # 10 negative + 10 positive eigenvalues, anchored so that the stable
    # chain starts in grading 0
    vals = np.concatenate([np.arange(-10.0, 0.0), np.arange(1.0, 11.0)])
    fib = LinearFlowModel(np.diag(vals))
    base = BaseMorseData([BasePoint("q", 0, fib)])
    blocks = build_model_complexes(base, grading_shift=-fib.num_negative)
    c = assemble(blocks)
    assert homology(c, "check") == {j: 1 for j in range(0, 10)}
    assert homology(c, "hat") == {j: 1 for j in range(-9, 1)}
    assert homology(c, "bar") == {j: 1 for j in range(-10, 10)}


def test_two_point_base_doubled_tower():
    # base circle with two critical points and zero base differential:
    # the towers simply double
    fib = LinearFlowModel(np.diag([-1.0, -0.5, 1.0, 2.0]))
    base = BaseMorseData(
        [BasePoint("q0", 0, fib), BasePoint("q1", 1, fib)],
        counts=F2Matrix.zero(2, 2),
    )
    blocks = build_model_complexes(base)
    c = assemble(blocks)
    assert sum(homology(c, "bar").values()) == 8


# -- integration ------------------------------------------------------------


def test_integrate_stationary_at_eigenvector():
    m = LinearFlowModel(np.diag([-1.0, 2.0, 3.0]))
    w3 = m.eigenvectors[:, 2]
    traj = integrate_blowup_flow(m, w3, 0.5, t_max=2.0, step=1e-3)
    assert np.allclose(traj.terminal_phi, w3, atol=1e-8)


def test_integrate_generic_converges_to_lowest():
    m = LinearFlowModel(np.diag([-1.0, 2.0]))
    phi0 = np.array([0.6, 0.8])
    traj = integrate_blowup_flow(m, phi0, 1.0, t_max=20.0, step=1e-3)
    assert abs(traj.terminal_lambda - (-1.0)) < 1e-6
    w1 = m.eigenvectors[:, 0]
    err = min(np.linalg.norm(traj.terminal_phi - w1),
              np.linalg.norm(traj.terminal_phi + w1))
    assert err < 1e-6
    # s grows like e^{t} since Lambda -> -1
    t_end = traj.times[-1]
    assert traj.ss[-1] > 1.0


def test_integrate_matches_closed_form():
    rng = np.random.default_rng(3)
    m = LinearFlowModel(random_symmetric(4, rng))
    phi0 = rng.normal(size=4)
    phi0 /= np.linalg.norm(phi0)
    traj = integrate_blowup_flow(m, phi0, 1.0, t_max=5.0, step=1e-3)
    sup = 0.0
    for t, phi in zip(traj.times[:: 200], traj.phis[:: 200]):
        exact = closed_form_phi(m, phi0, t)
        err = min(np.linalg.norm(phi - exact), np.linalg.norm(phi + exact))
        sup = max(sup, err)
    assert sup < 1e-6


def test_boundary_invariance():
    m = LinearFlowModel(np.diag([-1.0, 2.0]))
    traj = integrate_blowup_flow(m, np.array([0.6, 0.8]), 0.0,
                                 t_max=1.0, step=1e-3)
    assert np.all(traj.ss == 0.0)


def test_norm_preserved_after_renormalization():
    m = LinearFlowModel(np.diag([-1.0, 1.0, 4.0]))
    phi0 = np.array([1.0, 1.0, 1.0]) / np.sqrt(3)
    traj = integrate_blowup_flow(m, phi0, 1.0, t_max=3.0, step=1e-3)
    norms = np.linalg.norm(traj.phis, axis=1)
    assert np.max(np.abs(norms - 1.0)) < 1e-9


def test_step_too_large():
    m = LinearFlowModel(np.diag([-40.0, 90.0]))
    with pytest.raises(StepTooLarge):
        integrate_blowup_flow(m, np.array([0.6, 0.8]), 1.0,
                              t_max=10.0, step=0.45)


def test_limiting_eigen_index():
    m = LinearFlowModel(np.diag([-1.0, 2.0, 3.0]))
    assert limiting_eigen_index(m, m.eigenvectors[:, 1]) == 2
    assert limiting_eigen_index(m, np.array([0.1, 0.2, 0.9])) == 1


def test_bad_inputs_rejected():
    m = LinearFlowModel(np.diag([-1.0, 2.0]))
    with pytest.raises(ShapeMismatch):
        integrate_blowup_flow(m, np.array([1.0, 1.0]), 1.0, 1.0, 1e-3)
    with pytest.raises(ShapeMismatch):
        integrate_blowup_flow(m, np.array([1.0, 0.0]), -1.0, 1.0, 1e-3)
