"""Real structures on line bundles over an involutive space, from CW data.

The input is an equivariant CW structure: integer cochain complexes of a
space M and its quotient Q = M/involution, plus an orbit map recording, for
every cell of M, its image cell in Q, whether it is pointwise fixed, and an
orientation sign (the coefficient in iota(cell) = sign * partner).  From
this the averaging map Theta on cochains,

    Theta(beta)(image of e) = beta(e) + beta(iota e),

is an integer matrix, and everything else is Smith-normal-form bookkeeping:
existence of a real structure on a line bundle is the vanishing of
Theta(c1) in H^2(Q), the equivalence classes on a fixed bundle form
H^1(Q)/Im Theta, and the set of real spin-c structures is a torsor over
ker(Theta on H^2) x H^1(M)^inv / Im(1 + iota*).

Branched double covers of links enter through their Seifert matrices:
|H_1| = |det(A + A^t)| and b_1 = nullity(A + A^t).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

from .errors import (
    MalformedOrbitMap,
    NoRealStructure,
    NotChainMap,
    NotCocycle,
    ShapeMismatch,
)
from .f2lin import (
    IntMatrix,
    cokernel_invariants,
    column_span_basis,
    int_det_sign_unimodular,
    int_kernel_basis,
    int_rank,
    int_solve,
    int_solve_many,
    smith_normal_form,
)


@dataclass(frozen=True)
class OrbitEntry:
    """Where one cell of M goes in the quotient."""

    degree: int
    index: int
    image: int
    fixed: bool
    sign: int


@dataclass(frozen=True)
class EquivariantCWData:
    """Cochain complexes of M and Q plus the cell-orbit pairing.

    ``delta_M[n]`` is the coboundary C^n(M) -> C^{n+1}(M) (rows indexed by
    (n+1)-cells); likewise for Q.  The lists have one entry per degree
    below the top dimension.
    """

    cells_M: tuple
    cells_Q: tuple
    delta_M: tuple
    delta_Q: tuple
    orbit: tuple

    def __post_init__(self):
        object.__setattr__(self, "cells_M", tuple(self.cells_M))
        object.__setattr__(self, "cells_Q", tuple(self.cells_Q))
        object.__setattr__(self, "delta_M", tuple(self.delta_M))
        object.__setattr__(self, "delta_Q", tuple(self.delta_Q))
        object.__setattr__(self, "orbit", tuple(self.orbit))
        self._validate()

    # -- validation ---------------------------------------------------

    def _validate(self):
        dim = len(self.cells_M) - 1
        if len(self.cells_Q) != len(self.cells_M):
            raise MalformedOrbitMap("M and Q have different dimensions")
        for n in range(dim):
            dm, dq = self.delta_M[n], self.delta_Q[n]
            if (dm.rows, dm.cols) != (self.cells_M[n + 1], self.cells_M[n]):
                raise ShapeMismatch(f"delta_M[{n}] has wrong shape")
            if (dq.rows, dq.cols) != (self.cells_Q[n + 1], self.cells_Q[n]):
                raise ShapeMismatch(f"delta_Q[{n}] has wrong shape")
        for n in range(dim - 1):
            if not (self.delta_M[n + 1] @ self.delta_M[n]).is_zero():
                raise MalformedOrbitMap(f"delta_M fails d.d=0 at degree {n}")
            if not (self.delta_Q[n + 1] @ self.delta_Q[n]).is_zero():
                raise MalformedOrbitMap(f"delta_Q fails d.d=0 at degree {n}")
        seen = set()
        preimages: dict = {}
        for e in self.orbit:
            if not (0 <= e.degree <= dim):
                raise MalformedOrbitMap("orbit entry with bad degree")
            if not (0 <= e.index < self.cells_M[e.degree]):
                raise MalformedOrbitMap("orbit entry cell index out of range")
            if not (0 <= e.image < self.cells_Q[e.degree]):
                raise MalformedOrbitMap("orbit image index out of range")
            if e.sign not in (1, -1):
                raise MalformedOrbitMap("orbit sign must be +-1")
            if e.fixed and e.sign != 1:
                raise MalformedOrbitMap("fixed cells must carry sign +1")
            key = (e.degree, e.index)
            if key in seen:
                raise MalformedOrbitMap(f"cell {key} listed twice")
            seen.add(key)
            preimages.setdefault((e.degree, e.image), []).append(e)
        for n in range(dim + 1):
            for i in range(self.cells_M[n]):
                if (n, i) not in seen:
                    raise MalformedOrbitMap(f"cell ({n},{i}) missing")
            for q in range(self.cells_Q[n]):
                pre = preimages.get((n, q), [])
                if len(pre) == 1 and pre[0].fixed:
                    continue
                if len(pre) == 2 and not pre[0].fixed and not pre[1].fixed:
                    if pre[0].sign != pre[1].sign:
                        raise MalformedOrbitMap(
                            f"free orbit over ({n},{q}) has unequal signs"
                        )
                    continue
                raise MalformedOrbitMap(
                    f"quotient cell ({n},{q}) covered by {len(pre)} cells "
                    "with inconsistent fixed flags"
                )

    # -- derived structure -------------------------------------------

    @property
    def dim(self) -> int:
        return len(self.cells_M) - 1

    def _entry(self, degree: int, index: int) -> OrbitEntry:
        for e in self.orbit:
            if (e.degree, e.index) == (degree, index):
                return e
        raise MalformedOrbitMap(f"no orbit entry for ({degree},{index})")

    def orbit_table(self, degree: int) -> list[OrbitEntry]:
        table: list = [None] * self.cells_M[degree]
        for e in self.orbit:
            if e.degree == degree:
                table[e.index] = e
        return table

    def partner(self, degree: int, index: int) -> int:
        """The other cell in the orbit (itself for fixed cells)."""
        e = self._entry(degree, index)
        if e.fixed:
            return index
        for f in self.orbit:
            if f.degree == degree and f.image == e.image and f.index != index:
                return f.index
        raise MalformedOrbitMap("free cell without partner")

    def iota_matrix(self, degree: int) -> IntMatrix:
        """Matrix of the induced involution on C^degree(M) cochains.

        (iota* beta)(e) = beta(iota e) = sign(e) * beta(partner(e)).
        """
        n = self.cells_M[degree]
        table = self.orbit_table(degree)
        # row e picks out sign(e) * beta(partner(e))
        out = [[0] * n for _ in range(n)]
        for i in range(n):
            e = table[i]
            out[i][self.partner(degree, i)] = e.sign
        return IntMatrix.from_rows(out)

    def pullback_matrix(self, degree: int) -> IntMatrix:
        """Matrix of pi*: C^degree(Q) -> C^degree(M).

        (pi* gamma)(e) = sigma(e) * gamma(image e), where sigma is +1 on
        fixed cells and on orbit representatives (the listed sign on the
        non-representative cell of a free orbit).
        """
        grid = [[0] * self.cells_Q[degree]
                for _ in range(self.cells_M[degree])]
        table = self.orbit_table(degree)
        reps: dict = {}
        for i, e in enumerate(table):
            reps.setdefault(e.image, i)
        for i, e in enumerate(table):
            sigma = 1 if (e.fixed or reps[e.image] == i) else e.sign
            grid[i][e.image] = sigma
        return IntMatrix.from_rows(grid)

    def to_json(self) -> dict:
        return {
            "cells_M": list(self.cells_M),
            "cells_Q": list(self.cells_Q),
            "delta_M": [m.to_json() for m in self.delta_M],
            "delta_Q": [m.to_json() for m in self.delta_Q],
            "orbit": [
                {"cell": [e.degree, e.index], "image": e.image,
                 "fixed": e.fixed, "sign": e.sign}
                for e in self.orbit
            ],
        }

    @staticmethod
    def from_json(obj: dict) -> "EquivariantCWData":
        return EquivariantCWData(
            cells_M=tuple(obj["cells_M"]),
            cells_Q=tuple(obj["cells_Q"]),
            delta_M=tuple(IntMatrix.from_json(m) for m in obj["delta_M"]),
            delta_Q=tuple(IntMatrix.from_json(m) for m in obj["delta_Q"]),
            orbit=tuple(
                OrbitEntry(degree=o["cell"][0], index=o["cell"][1],
                           image=o["image"], fixed=o["fixed"],
                           sign=o["sign"])
                for o in obj["orbit"]
            ),
        )


def theta_on_cochains(data: EquivariantCWData, degree: int) -> IntMatrix:
    """Matrix of the averaging map C^degree(M) -> C^degree(Q).

    Column e contributes to the row of its image cell: coefficient 2 for a
    fixed cell, else the orientation factor sigma(e) (+1 on the orbit
    representative, the recorded sign on its partner), so that the value
    on an orbit is beta(e) + beta(iota e) in the chosen orientations.
    """
    grid = [[0] * data.cells_M[degree]
            for _ in range(data.cells_Q[degree])]
    table = data.orbit_table(degree)
    reps: dict = {}
    for i, e in enumerate(table):
        reps.setdefault(e.image, i)
    for i, e in enumerate(table):
        if e.fixed:
            grid[e.image][i] = 2
        else:
            grid[e.image][i] = 1 if reps[e.image] == i else e.sign
    return IntMatrix.from_rows(grid)


def verify_theta_chain_map(data: EquivariantCWData, degree: int) -> bool:
    """delta_Q . Theta = Theta . delta_M in the given degree."""
    if degree >= data.dim:
        return True
    lhs = data.delta_Q[degree] @ theta_on_cochains(data, degree)
    rhs = theta_on_cochains(data, degree + 1) @ data.delta_M[degree]
    return lhs.data == rhs.data


def verify_naturality(data: EquivariantCWData, degree: int) -> bool:
    """pi* . Theta = 1 + iota* on cochains in the given degree."""
    lhs = data.pullback_matrix(degree) @ theta_on_cochains(data, degree)
    rhs = IntMatrix.identity(data.cells_M[degree]) + data.iota_matrix(degree)
    return lhs.data == rhs.data


# ---------------------------------------------------------------------------
# Cohomology presentations
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PresentedGroup:
    """An abelian group Z^g / Im(relations), with cocycle generators.

    ``generators`` has one column per generator, written in the ambient
    cochain basis; ``relations`` is in generator coordinates.
    """

    generators: IntMatrix
    relations: IntMatrix
    invariants: tuple = field(init=False)

    def __post_init__(self):
        inv = tuple(cokernel_invariants(self.relations)) \
            if self.relations.rows else ()
        object.__setattr__(self, "invariants", inv)

    @property
    def rank(self) -> int:
        return sum(1 for x in self.invariants if x == 0)

    def order(self) -> int:
        """Group order; 0 encodes infinite."""
        out = 1
        for x in self.invariants:
            if x == 0:
                return 0
            out *= x
        return out

    def is_trivial(self) -> bool:
        return not self.invariants


def cohomology_presentation(deltas: Sequence[IntMatrix], cells: Sequence[int],
                            degree: int) -> PresentedGroup:
    """Present H^degree = ker(delta^degree) / im(delta^{degree-1})."""
    n = cells[degree]
    if degree < len(deltas):
        kernel = int_kernel_basis(deltas[degree])
    else:
        kernel = [[1 if i == j else 0 for i in range(n)] for j in range(n)]
    if kernel:
        zmat = IntMatrix.from_rows([[kernel[j][i] for j in range(len(kernel))]
                                    for i in range(n)])
    else:
        zmat = IntMatrix.zero(n, 0)
    if degree == 0 or not zmat.cols:
        rels = IntMatrix.zero(zmat.cols, 0)
    else:
        bmat = deltas[degree - 1]
        coords = int_solve_many(zmat, bmat)
        if coords is None:
            raise NotChainMap("coboundaries do not lie in the cocycle lattice")
        rels = coords
    return PresentedGroup(zmat, rels)


@dataclass(frozen=True)
class CohomMap:
    """A map between presented cohomology groups, in generator coordinates."""

    source: PresentedGroup
    target: PresentedGroup
    matrix: IntMatrix


def induced_map(t: IntMatrix, src: PresentedGroup,
                tgt: PresentedGroup) -> CohomMap:
    """The map a cochain-level matrix induces between presentations."""
    images = t @ src.generators
    coords = int_solve_many(tgt.generators, images)
    if coords is None:
        raise NotChainMap("cochain map does not preserve cocycles")
    return CohomMap(src, tgt, coords)


def _hstack(a: IntMatrix, b: IntMatrix) -> IntMatrix:
    if a.rows != b.rows:
        raise ShapeMismatch("hstack row mismatch")
    return IntMatrix.from_rows(
        [list(ra) + list(rb) for ra, rb in zip(a.data, b.data)]
    ) if a.rows else IntMatrix.zero(0, a.cols + b.cols)


def subquotient_invariants(gens: IntMatrix, rels: IntMatrix) -> list[int]:
    """Invariants of (column span of gens) / (column span of rels).

    The relation columns must lie in the generator span.
    """
    basis = column_span_basis(gens)
    if basis.cols == 0:
        return []
    coords = int_solve_many(basis, rels)
    if coords is None:
        raise ShapeMismatch("relations do not lie in the generator span")
    return cokernel_invariants(coords)


def map_kernel_invariants(m: CohomMap) -> list[int]:
    """Invariant factors of the kernel of a map of presented groups.

    [x] lies in the kernel iff T x is a target relation, so the kernel
    lattice is the projection of ker [T | R_target] to the source
    coordinates, and the group is that lattice modulo source relations.
    """
    t = m.matrix
    g = t.cols
    stacked = _hstack(t, m.target.relations) if m.target.relations.cols \
        else t
    kern = int_kernel_basis(stacked)
    proj = [v[:g] for v in kern]
    if proj:
        gens = IntMatrix.from_rows([[v[i] for v in proj] for i in range(g)])
    else:
        gens = IntMatrix.zero(g, 0)
    gens = _hstack(gens, m.source.relations)
    return subquotient_invariants(gens, m.source.relations)


# ---------------------------------------------------------------------------
# Census operations
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RealStructureCensus:
    """Existence plus the torsor structure of real spin-c structures."""

    exists: bool
    kernel_invariants: tuple
    h1_invariants: tuple

    @property
    def torsor_invariants(self) -> tuple:
        if not self.exists:
            return ()
        return tuple(x for x in self.kernel_invariants + self.h1_invariants
                     if x != 1)

    def size(self) -> int:
        """Number of real spin-c structures; 0 encodes infinite."""
        out = 1
        for x in self.torsor_invariants:
            if x == 0:
                return 0
            out *= x
        return out


def _require_chain_map(data: EquivariantCWData, degree: int):
    if not verify_theta_chain_map(data, degree) or (
            degree > 0 and not verify_theta_chain_map(data, degree - 1)):
        raise NotChainMap(
            f"Theta does not commute with coboundaries near degree {degree}"
        )


def theta_on_cohomology(data: EquivariantCWData, degree: int) -> CohomMap:
    """Theta: H^degree(M) -> H^degree(Q) between SNF presentations."""
    _require_chain_map(data, degree)
    src = cohomology_presentation(data.delta_M, data.cells_M, degree)
    tgt = cohomology_presentation(data.delta_Q, data.cells_Q, degree)
    return induced_map(theta_on_cochains(data, degree), src, tgt)


def admits_real_structure(data: EquivariantCWData,
                          c1: Sequence[int]) -> bool:
    """True iff the class of Theta(c1) vanishes in H^2(Q)."""
    if len(c1) != data.cells_M[2]:
        raise ShapeMismatch("c1 has wrong length for the 2-cells of M")
    if 2 < data.dim:
        if any(x != 0 for x in data.delta_M[2].mul_vec(list(c1))):
            raise NotCocycle("c1 is not closed")
    _require_chain_map(data, 2)
    image = theta_on_cochains(data, 2).mul_vec(list(c1))
    if all(x == 0 for x in image):
        return True
    if data.cells_Q[1] == 0:
        return False
    return int_solve(data.delta_Q[1], image) is not None


def real_structure_classes(data: EquivariantCWData) -> list[int]:
    """Invariants of H^1(Q) / Im Theta: classes on a fixed line bundle."""
    _require_chain_map(data, 1)
    m = theta_on_cohomology(data, 1)
    rels = _hstack(m.target.relations, m.matrix) \
        if m.target.relations.cols else m.matrix
    return [x for x in cokernel_invariants(rels) if x != 1]


def real_spinc_torsor(data: EquivariantCWData,
                      c1: Optional[Sequence[int]] = None
                      ) -> RealStructureCensus:
    """Census of real spin-c structures.

    ``c1`` (default zero) must name a bundle admitting a real structure;
    the census is then a torsor over ker(Theta on H^2) x H^1(M)^inv /
    Im(1 + iota*).
    """
    if c1 is None:
        c1 = [0] * data.cells_M[2]
    if not admits_real_structure(data, c1):
        raise NoRealStructure("Theta(c1) does not vanish in H^2(Q)")
    kernel = map_kernel_invariants(theta_on_cohomology(data, 2))

    h1 = cohomology_presentation(data.delta_M, data.cells_M, 1)
    iota = induced_map(data.iota_matrix(1), h1, h1)
    minus_one = IntMatrix.identity(h1.generators.cols).scale(-1)
    fixed_map = CohomMap(h1, h1, iota.matrix + minus_one)
    # invariant lattice: classes with iota* x = x
    t = fixed_map.matrix
    stacked = _hstack(t, h1.relations) if h1.relations.cols else t
    kern = int_kernel_basis(stacked)
    g = t.cols
    proj = [v[:g] for v in kern]
    if proj:
        inv_gens = IntMatrix.from_rows([[v[i] for v in proj]
                                        for i in range(g)])
    else:
        inv_gens = IntMatrix.zero(g, 0)
    inv_gens = _hstack(inv_gens, h1.relations)
    one_plus = iota.matrix + IntMatrix.identity(g)
    rels = _hstack(one_plus, h1.relations)
    h1_part = [x for x in subquotient_invariants(inv_gens, rels) if x != 1]

    return RealStructureCensus(
        exists=True,
        kernel_invariants=tuple(x for x in kernel if x != 1),
        h1_invariants=tuple(h1_part),
    )


# ---------------------------------------------------------------------------
# Branched double covers from Seifert matrices
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SeifertMatrix:
    """A Seifert matrix of a link (possibly 0x0 for the unknot)."""

    A: IntMatrix

    def __post_init__(self):
        if self.A.rows != self.A.cols:
            raise ShapeMismatch("Seifert matrix must be square")


def branched_cover_invariants(a: SeifertMatrix) -> tuple[int, int]:
    """(|H_1| with 0 for infinite, b_1) of the double branched cover.

    Both read off the symmetrized matrix A + A^t: the determinant is the
    Alexander polynomial at -1 up to sign, and the nullity is b_1.
    """
    sym = a.A + a.A.transpose()
    if sym.rows == 0:
        return (1, 0)
    det = int_det_sign_unimodular(sym)
    b1 = sym.rows - int_rank(sym)
    return (abs(det), b1)
