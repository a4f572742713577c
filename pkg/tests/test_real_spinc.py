"""Tests for real-structure existence/enumeration and branched covers."""

from __future__ import annotations

from fractions import Fraction

import pytest

from hmrkit.cw_fixtures import FIXTURE_BUILDERS, build_fixture, lens_space
from hmrkit.errors import (
    MalformedOrbitMap,
    NoRealStructure,
    NotChainMap,
    NotCoprime,
)
from hmrkit.f2lin import IntMatrix, int_kernel_basis
from hmrkit.real_spinc import (
    EquivariantCWData,
    OrbitEntry,
    SeifertMatrix,
    admits_real_structure,
    branched_cover_invariants,
    cohomology_presentation,
    real_spinc_torsor,
    real_structure_classes,
    theta_on_cochains,
    theta_on_cohomology,
    verify_naturality,
    verify_theta_chain_map,
)


def cohomology_invariants(data, degree, space="M"):
    if space == "M":
        return cohomology_presentation(data.delta_M, data.cells_M,
                                       degree).invariants
    return cohomology_presentation(data.delta_Q, data.cells_Q,
                                   degree).invariants


# ---------------------------------------------------------------------------
# theta on cochains: the tiny hand examples
# ---------------------------------------------------------------------------


def test_theta_point_pair():
    data = build_fixture("point_pair")
    t = theta_on_cochains(data, 0)
    assert (t.rows, t.cols) == (1, 2)
    assert sorted(t.data[0]) == [1, 1]


def test_theta_fixed_point_doubles():
    data = EquivariantCWData(
        cells_M=(1,), cells_Q=(1,), delta_M=(), delta_Q=(),
        orbit=(OrbitEntry(0, 0, 0, True, 1),),
    )
    t = theta_on_cochains(data, 0)
    assert t.data == ((2,),)


def test_theta_circle_antipodal_rows_sum_preimages():
    data = build_fixture("circle_antipodal")
    for deg in (0, 1):
        t = theta_on_cochains(data, deg)
        assert t.rows == 1 and t.cols == 2
        assert sorted(abs(x) for x in t.data[0]) == [1, 1]
        assert verify_theta_chain_map(data, deg)


# ---------------------------------------------------------------------------
# structural identities across all fixtures
# ---------------------------------------------------------------------------


@pytest.mark.parametrize("name", sorted(FIXTURE_BUILDERS))
def test_chain_map_and_naturality(name):
    data = build_fixture(name)
    for deg in range(data.dim + 1):
        assert verify_theta_chain_map(data, deg)
        assert verify_naturality(data, deg)


@pytest.mark.parametrize("name", sorted(FIXTURE_BUILDERS))
def test_json_roundtrip(name):
    data = build_fixture(name)
    again = EquivariantCWData.from_json(data.to_json())
    assert again.cells_M == data.cells_M
    assert again.orbit == data.orbit
    assert all(a.data == b.data for a, b in zip(again.delta_M, data.delta_M))


def test_fixture_homology_sanity():
    # the quotients of the lens fixtures are three-spheres
    for name in ("s3_conjugation", "lens_3_1", "lens_5_1", "lens_7_1"):
        data = build_fixture(name)
        assert cohomology_invariants(data, 1, "Q") == ()
        assert cohomology_invariants(data, 2, "Q") == ()
        assert cohomology_invariants(data, 3, "Q") == (0,)
    assert cohomology_invariants(build_fixture("lens_5_2"), 2) == (5,)
    assert cohomology_invariants(build_fixture("torus_hyperelliptic"), 1) \
        == (0, 0)


# ---------------------------------------------------------------------------
# theta on cohomology
# ---------------------------------------------------------------------------


def test_theta_zero_when_target_vanishes():
    data = build_fixture("lens_3_1")
    m = theta_on_cohomology(data, 2)
    # target H^2(S^3) = 0, so the induced map has trivial image
    assert m.target.is_trivial()


def test_theta_torus_degree1_matches_hand_computation():
    # H^1(T^2) = Z^2 maps to H^1(pillowcase S^2) = 0: the zero map
    data = build_fixture("torus_hyperelliptic")
    m = theta_on_cohomology(data, 1)
    assert m.source.invariants == (0, 0)
    assert m.target.is_trivial()


def test_theta_torus_brute_force_small_cochains():
    # oracle: enumerate integer 1-cochains with entries in {-1,0,1} and
    # check the chain-map identity value by value
    data = build_fixture("torus_hyperelliptic")
    t1 = theta_on_cochains(data, 1)
    t2 = theta_on_cochains(data, 2)
    dm, dq = data.delta_M[1], data.delta_Q[1]
    import itertools

    for beta in itertools.islice(
            itertools.product((-1, 0, 1), repeat=data.cells_M[1]), 300):
        lhs = dq.mul_vec(t1.mul_vec(list(beta)))
        rhs = t2.mul_vec(dm.mul_vec(list(beta)))
        assert lhs == rhs


def test_not_chain_map_detected():
    data = build_fixture("circle_antipodal")
    corrupted = EquivariantCWData(
        cells_M=data.cells_M, cells_Q=data.cells_Q,
        delta_M=data.delta_M,
        delta_Q=(IntMatrix.from_rows([[1]]),),
        orbit=data.orbit,
    )
    assert not verify_theta_chain_map(corrupted, 0)
    with pytest.raises(NotChainMap):
        theta_on_cohomology(corrupted, 0)


def test_malformed_orbit_rejected():
    with pytest.raises(MalformedOrbitMap):
        EquivariantCWData(
            cells_M=(2,), cells_Q=(1,), delta_M=(), delta_Q=(),
            orbit=(OrbitEntry(0, 0, 0, True, 1),
                   OrbitEntry(0, 1, 0, False, 1)),
        )


# ---------------------------------------------------------------------------
# existence and censuses
# ---------------------------------------------------------------------------


def test_admits_trivial_c1():
    data = build_fixture("lens_3_1")
    assert admits_real_structure(data, [0] * data.cells_M[2])


def test_lens_torsion_c1_always_admits():
    for name in ("lens_3_1", "lens_5_2", "lens_7_1"):
        data = build_fixture(name)
        for v in int_kernel_basis(data.delta_M[2]):
            assert admits_real_structure(data, v)


def test_s1xs2_rotation_only_trivial_admits():
    data = build_fixture("s1_x_s2_rotation")
    h2 = cohomology_presentation(data.delta_M, data.cells_M, 2)
    assert h2.invariants == (0,)
    admitted = [admits_real_structure(data, h2.generators.column(j))
                for j in range(h2.generators.cols)]
    # some generator cocycles represent the nontrivial class and fail
    assert not all(admitted)
    assert admits_real_structure(data, [0] * data.cells_M[2])


def test_real_structure_classes():
    assert real_structure_classes(build_fixture("s3_conjugation")) == []
    assert real_structure_classes(build_fixture("lens_5_1")) == []
    assert real_structure_classes(build_fixture("s1_x_s2_rotation")) == [2]


@pytest.mark.parametrize("p,name", [(3, "lens_3_1"), (5, "lens_5_1"),
                                    (5, "lens_5_2"), (7, "lens_7_1"),
                                    (7, "lens_7_2")])
def test_lens_census_size(p, name):
    census = real_spinc_torsor(build_fixture(name))
    assert census.size() == p
    assert census.kernel_invariants == (p,)
    assert census.h1_invariants == ()


def test_s3_census_trivial():
    assert real_spinc_torsor(build_fixture("s3_conjugation")).size() == 1


def test_s1xs2_rotation_census():
    census = real_spinc_torsor(build_fixture("s1_x_s2_rotation"))
    assert census.size() == 2
    assert census.h1_invariants == (2,)


def test_unlink_cover_census_infinite():
    census = real_spinc_torsor(build_fixture("s1_x_s2_unlink_cover"))
    assert census.size() == 0  # infinite: one free factor
    assert census.kernel_invariants == (0,)


def test_no_real_structure_raises():
    data = build_fixture("s1_x_s2_rotation")
    h2 = cohomology_presentation(data.delta_M, data.cells_M, 2)
    bad = next(h2.generators.column(j) for j in range(h2.generators.cols)
               if not admits_real_structure(data, h2.generators.column(j)))
    with pytest.raises(NoRealStructure):
        real_spinc_torsor(data, bad)


def test_census_invariant_under_subdivision():
    coarse = build_fixture("torus_hyperelliptic")
    fine = build_fixture("torus_hyperelliptic_fine")
    assert real_structure_classes(coarse) == real_structure_classes(fine)
    m_c = theta_on_cohomology(coarse, 1)
    m_f = theta_on_cohomology(fine, 1)
    assert m_c.source.invariants == m_f.source.invariants
    assert m_c.target.invariants == m_f.target.invariants


def test_lens_space_rejects_bad_parameters():
    with pytest.raises(NotCoprime):
        lens_space(4, 1)
    with pytest.raises(NotCoprime):
        lens_space(9, 3)


# ---------------------------------------------------------------------------
# branched covers from Seifert matrices
# ---------------------------------------------------------------------------


def oracle_alexander_at_minus_one(a: IntMatrix) -> int:
    """|det(A + A^t)| via Fraction Gaussian elimination (independent)."""
    n = a.rows
    if n == 0:
        return 1
    sym = [[Fraction(a[i, j] + a[j, i]) for j in range(n)] for i in range(n)]
    det = Fraction(1)
    for k in range(n):
        piv = next((i for i in range(k, n) if sym[i][k] != 0), None)
        if piv is None:
            return 0
        if piv != k:
            sym[k], sym[piv] = sym[piv], sym[k]
            det = -det
        det *= sym[k][k]
        for i in range(k + 1, n):
            f = sym[i][k] / sym[k][k]
            sym[i] = [x - f * y for x, y in zip(sym[i], sym[k])]
    assert det.denominator == 1
    return abs(int(det))


CASES = {
    "unknot": (IntMatrix.zero(0, 0), 1, 0),
    "trefoil": (IntMatrix.from_rows([[-1, 1], [0, -1]]), 3, 0),
    "figure_eight": (IntMatrix.from_rows([[1, -1], [0, -1]]), 5, 0),
    "split_unlink": (IntMatrix.from_rows([[0]]), 0, 1),
}


@pytest.mark.parametrize("name", sorted(CASES))
def test_branched_cover_invariants(name):
    a, order, b1 = CASES[name]
    assert branched_cover_invariants(SeifertMatrix(a)) == (order, b1)
    assert oracle_alexander_at_minus_one(a) == order


def test_branched_cover_congruence_invariance():
    a = CASES["trefoil"][0]
    p = IntMatrix.from_rows([[1, 2], [0, 1]])
    conj = p.transpose() @ a @ p
    assert branched_cover_invariants(SeifertMatrix(conj)) == (3, 0)
