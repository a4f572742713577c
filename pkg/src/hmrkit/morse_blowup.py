"""Finite-dimensional blow-up model of a linear gradient flow.

A symmetric matrix L with simple, zero-free spectrum generates the flow

    phi' = -L phi + Lambda(phi) phi,      s' = -Lambda(phi) s,

on the unit sphere of spinors times [0, infinity), where
Lambda(phi) = <phi, L phi>.  Its critical points on the sphere are the unit
eigenvectors; descending to projective space they form a perfect Morse
function with the eigenvector of the i-th smallest eigenvalue in index
i - 1.  Over a base Morse flow with trivialized normal bundle, each base
critical point q contributes one blow-up generator per eigenvalue: a
boundary-stable one of grading ind(q) + i - 1 when the eigenvalue is
positive, a boundary-unstable one of grading ind(q) + i when it is
negative.  Fiberwise trajectory counts between adjacent eigenvectors always
cancel mod 2 (the two half-circles of the connecting great circle), so the
single-fiber model has vanishing differentials; cross-base terms come from
the supplied base trajectory counts.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .complexes import BlockDifferentials, Generator
from .errors import DegenerateSpectrum, GradingViolation, ShapeMismatch, StepTooLarge
from .f2lin import F2Matrix

#: convergence is declared when ||phi'|| stays below this for 100 steps
CONVERGENCE_SPEED = 1e-8
CONVERGENCE_STEPS = 100
#: allowed per-step departure of ||phi|| from 1 before renormalization
NORM_DRIFT_TOL = 1e-3


@dataclass(frozen=True)
class LinearFlowModel:
    """Symmetric matrix with simple nonzero spectrum, plus its eigendata."""

    L: np.ndarray
    tolerance: float = 1e-10
    eigenvalues: np.ndarray = field(init=False, repr=False)
    eigenvectors: np.ndarray = field(init=False, repr=False)  # columns

    def __post_init__(self):
        a = np.asarray(self.L, dtype=float)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ShapeMismatch("L must be square")
        if not np.allclose(a, a.T, atol=1e-12):
            raise ShapeMismatch("L must be symmetric")
        object.__setattr__(self, "L", a)
        vals, vecs = np.linalg.eigh(a)
        # re-orthogonalize defensively; eigh is already orthogonal but the
        # index classification must not depend on solver internals
        vecs, _ = np.linalg.qr(vecs)
        scale = max(1.0, float(np.max(np.abs(vals))))
        gap_tol = 10.0 * self.tolerance * scale
        if np.any(np.abs(vals) <= gap_tol):
            raise DegenerateSpectrum("spectrum contains (near-)zero")
        if vals.size > 1 and np.min(np.diff(vals)) <= gap_tol:
            raise DegenerateSpectrum("spectrum is not simple")
        # deterministic sign: first coordinate of significant size positive
        for k in range(vecs.shape[1]):
            col = vecs[:, k]
            lead = col[np.argmax(np.abs(col) > 1e-8)]
            if lead < 0:
                vecs[:, k] = -col
        object.__setattr__(self, "eigenvalues", vals)
        object.__setattr__(self, "eigenvectors", vecs)

    @property
    def n(self) -> int:
        return self.L.shape[0]

    @property
    def num_negative(self) -> int:
        return int(np.sum(self.eigenvalues < 0))

    @property
    def num_positive(self) -> int:
        return int(np.sum(self.eigenvalues > 0))


def rp_critical_points(model: LinearFlowModel) -> list[tuple[int, int]]:
    """Critical points of the flow on projective space.

    Returns (eigen index i, Morse index i - 1) pairs, 1-based, ordered by
    increasing eigenvalue: [w_i] is a Morse critical point of index i - 1.
    """
    return [(i + 1, i) for i in range(model.n)]


def adjacent_trajectory_count_mod2(model: LinearFlowModel,
                                   i: int, j: int) -> int:
    """Mod-2 count of unparametrized index-1 trajectories [w_i] -> [w_j].

    For lambda_i > lambda_j adjacent the moduli space is the two half-arcs
    of the great circle through w_i and w_j, hence 0 mod 2; for
    lambda_i < lambda_j it is empty; i = j has no self-trajectories.
    """
    if not (1 <= i <= model.n and 1 <= j <= model.n):
        raise ShapeMismatch("eigen index out of range")
    return 0


@dataclass(frozen=True)
class BasePoint:
    """A base Morse critical point with its normal fiber matrix."""

    label: str
    ind_q: int
    fiber: LinearFlowModel


@dataclass(frozen=True)
class BaseMorseData:
    """Base critical points plus optional mod-2 base trajectory counts.

    ``counts`` is indexed rows-by-target, columns-by-source over the
    ``points`` list; nonzero entries must drop the base index by one.
    """

    points: tuple
    counts: Optional[F2Matrix] = None

    def __post_init__(self):
        object.__setattr__(self, "points", tuple(self.points))
        if self.counts is not None:
            npts = len(self.points)
            if (self.counts.rows, self.counts.cols) != (npts, npts):
                raise ShapeMismatch("counts shape must match point count")
            for (r, c) in self.counts.ones:
                if self.points[c].ind_q - self.points[r].ind_q != 1:
                    raise GradingViolation(
                        "base count entry does not drop the index by 1"
                    )


def blowup_critical_points(base: BaseMorseData,
                           grading_shift: int = 0) -> list[Generator]:
    """All blow-up generators of the model, one per (base point, eigenvalue).

    Eigenvalue lambda_i(q) > 0 yields a boundary-stable generator of
    grading ind(q) + i - 1; lambda_i(q) < 0 a boundary-unstable one of
    grading ind(q) + i.  ``grading_shift`` translates every grading (used
    to re-anchor the Morse gradings to a Floer-style convention).
    """
    out = []
    for q in base.points:
        for i, lam in enumerate(q.fiber.eigenvalues, start=1):
            if lam > 0:
                out.append(Generator(f"{q.label}:w{i}", "s",
                                     q.ind_q + i - 1 + grading_shift))
            else:
                out.append(Generator(f"{q.label}:w{i}", "u",
                                     q.ind_q + i + grading_shift))
    return out


def build_model_complexes(base: BaseMorseData,
                          grading_shift: int = 0) -> BlockDifferentials:
    """Block differentials of the blow-up model over a trivialized bundle.

    The model has no interior generators.  Fiberwise counts vanish mod 2,
    so the only differentials are the base counts tensored with the
    identity on the eigen index, which land in the same-kind bar blocks.
    Cross-kind terms would require a nontrivial normal-bundle connection,
    which this model does not carry.
    """
    if len({p.fiber.n for p in base.points}) > 1 and base.counts is not None \
            and base.counts.ones:
        raise ShapeMismatch(
            "base counts require a common fiber dimension across points"
        )
    gens = blowup_critical_points(base, grading_shift)
    # positions: (point index, eigen index) per kind
    s_keys, u_keys = [], []
    s_gens, u_gens = [], []
    k = 0
    for pi, q in enumerate(base.points):
        for i, lam in enumerate(q.fiber.eigenvalues, start=1):
            g = gens[k]
            k += 1
            if lam > 0:
                s_keys.append((pi, i))
                s_gens.append(g)
            else:
                u_keys.append((pi, i))
                u_gens.append(g)
    s_pos = {key: idx for idx, key in enumerate(s_keys)}
    u_pos = {key: idx for idx, key in enumerate(u_keys)}

    bar_ss_entries = []
    bar_uu_entries = []
    if base.counts is not None:
        for (tr, sc) in base.counts.ones:  # base trajectory q_sc -> q_tr
            n_fiber = base.points[sc].fiber.n
            for i in range(1, n_fiber + 1):
                if (sc, i) in s_pos and (tr, i) in s_pos:
                    bar_ss_entries.append((s_pos[(tr, i)], s_pos[(sc, i)]))
                elif (sc, i) in u_pos and (tr, i) in u_pos:
                    bar_uu_entries.append((u_pos[(tr, i)], u_pos[(sc, i)]))
                else:
                    raise GradingViolation(
                        "eigenvalue sign pattern differs across a base "
                        "trajectory; trivialized-bundle model cannot "
                        "couple stable to unstable"
                    )
    ns, nu = len(s_gens), len(u_gens)
    z = F2Matrix.zero
    return BlockDifferentials(
        gens_o=(), gens_s=tuple(s_gens), gens_u=tuple(u_gens),
        d_oo=z(0, 0), d_os=z(ns, 0), d_uo=z(0, nu), d_us=z(ns, nu),
        bar_ss=F2Matrix.from_entries(ns, ns, bar_ss_entries),
        bar_us=z(ns, nu),
        bar_su=z(nu, ns),
        bar_uu=F2Matrix.from_entries(nu, nu, bar_uu_entries),
    )


# ---------------------------------------------------------------------------
# ODE integration
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FlowTrajectory:
    """A sampled trajectory of the blown-up flow."""

    times: np.ndarray
    phis: np.ndarray      # shape (N, n), unit vectors
    ss: np.ndarray        # shape (N,), nonnegative
    lambdas: np.ndarray   # Lambda(phi(t)) samples
    converged: bool

    @property
    def terminal_phi(self) -> np.ndarray:
        return self.phis[-1]

    @property
    def terminal_lambda(self) -> float:
        return float(self.lambdas[-1])

    def to_json(self, stride: int = 1) -> dict:
        idx = list(range(0, len(self.times), stride))
        if idx[-1] != len(self.times) - 1:
            idx.append(len(self.times) - 1)
        return {
            "converged": self.converged,
            "samples": [
                {
                    "t": float(self.times[i]),
                    "phi": [float(x) for x in self.phis[i]],
                    "s": float(self.ss[i]),
                    "lambda": float(self.lambdas[i]),
                }
                for i in idx
            ],
        }


def _vector_field(L: np.ndarray, phi: np.ndarray, s: float):
    lam = float(phi @ L @ phi)
    return -L @ phi + lam * phi, -lam * s


def integrate_blowup_flow(model: LinearFlowModel, phi0, s0: float,
                          t_max: float, step: float) -> FlowTrajectory:
    """Integrate the blown-up flow with a classical 4th-order scheme.

    phi is projected back to the unit sphere after every step (the exact
    flow preserves it; projection removes the scheme's drift without
    moving the limit sets).  Integration stops early once ||phi'|| stays
    below the convergence threshold for 100 consecutive steps.
    """
    phi = np.asarray(phi0, dtype=float)
    if phi.shape != (model.n,):
        raise ShapeMismatch("phi0 has wrong dimension")
    if abs(np.linalg.norm(phi) - 1.0) > 1e-9:
        raise ShapeMismatch("phi0 must be a unit vector")
    if s0 < 0:
        raise ShapeMismatch("s0 must be nonnegative")
    L = model.L
    nsteps = int(round(t_max / step))
    times = [0.0]
    phis = [phi.copy()]
    ss = [float(s0)]
    lambdas = [float(phi @ L @ phi)]
    s = float(s0)
    quiet = 0
    converged = False
    for k in range(1, nsteps + 1):
        h = step

        def f(p, sv):
            return _vector_field(L, p, sv)

        k1p, k1s = f(phi, s)
        k2p, k2s = f(phi + 0.5 * h * k1p, s + 0.5 * h * k1s)
        k3p, k3s = f(phi + 0.5 * h * k2p, s + 0.5 * h * k2s)
        k4p, k4s = f(phi + h * k3p, s + h * k3s)
        phi = phi + (h / 6.0) * (k1p + 2 * k2p + 2 * k3p + k4p)
        s = s + (h / 6.0) * (k1s + 2 * k2s + 2 * k3s + k4s)
        norm = np.linalg.norm(phi)
        if abs(norm - 1.0) > NORM_DRIFT_TOL:
            raise StepTooLarge(
                f"norm drift {abs(norm - 1.0):.3e} at t={k * h:.4f}; "
                f"reduce the step size"
            )
        phi = phi / norm
        s = max(s, 0.0)
        times.append(k * h)
        phis.append(phi.copy())
        ss.append(s)
        lambdas.append(float(phi @ L @ phi))
        speed = np.linalg.norm(_vector_field(L, phi, s)[0])
        quiet = quiet + 1 if speed < CONVERGENCE_SPEED else 0
        if quiet >= CONVERGENCE_STEPS:
            converged = True
            break
    return FlowTrajectory(np.array(times), np.array(phis), np.array(ss),
                          np.array(lambdas), converged)


def closed_form_phi(model: LinearFlowModel, phi0, t: float) -> np.ndarray:
    """The exact solution: e^{-Lt} phi0 renormalized to the unit sphere."""
    phi0 = np.asarray(phi0, dtype=float)
    coeffs = model.eigenvectors.T @ phi0
    # subtract the dominant (smallest-eigenvalue-with-weight) exponent to
    # avoid overflow; normalization cancels the common factor
    active = np.abs(coeffs) > 1e-14
    lam = model.eigenvalues
    lam0 = np.min(lam[active])
    scaled = coeffs * np.exp(-(lam - lam0) * t)
    x = model.eigenvectors @ scaled
    return x / np.linalg.norm(x)


def limiting_eigen_index(model: LinearFlowModel, phi0) -> int:
    """1-based index of the eigenvalue the flow from phi0 converges to.

    The limit is the eigenvector of the smallest eigenvalue with nonzero
    weight in phi0.
    """
    coeffs = model.eigenvectors.T @ np.asarray(phi0, dtype=float)
    for i, c in enumerate(coeffs):
        if abs(c) > 1e-12:
            return i + 1
    raise ShapeMismatch("phi0 is numerically zero")
