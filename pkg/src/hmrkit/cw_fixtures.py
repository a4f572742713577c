"""Equivariant CW fixtures: small spaces with involution, built honestly.

Each builder assembles cells with explicit integer boundaries and an
explicit cellular involution, then checks d.d = 0, that the involution is
a chain involution, and only then forms the quotient complex and the orbit
data.  The centerpiece is a genus-one splitting of lens spaces: the torus
carries the arrangement of four circles through the involution's fixed
points (two "horizontal" ones and two of slope p/q), and each handlebody
contributes two fixed diameters, four half-disks swapped in pairs, and two
solid slabs swapped by the involution.

Coordinates on the torus R^2/Z^2 (involution v -> -v, fixed points at
{0,1/2}^2): vertices V[m] = (m/2p, 0) and W[m] = (m/2p, 1/2) for
m = 0..2p-1; horizontal edges hb[m], ht[m] along +x; slope edges sa[m]
(lower band) and sb[m] (upper band) along +(q,p); faces fa[m], fb[m]
(parallelograms, counterclockwise).  This requires p odd, which covers all
lens fixtures shipped here.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd

from .errors import MalformedOrbitMap, NotCoprime, ShapeMismatch
from .f2lin import IntMatrix
from .real_spinc import EquivariantCWData, OrbitEntry


class _Builder:
    """Accumulates cells, boundaries and the involution, then validates."""

    def __init__(self):
        self.order: dict[int, list] = {}
        self.boundary: dict = {}
        self.degree: dict = {}
        self.iota: dict = {}

    def add(self, deg: int, cid, boundary: dict):
        if cid in self.degree:
            raise ShapeMismatch(f"duplicate cell {cid}")
        self.order.setdefault(deg, []).append(cid)
        self.degree[cid] = deg
        self.boundary[cid] = dict(boundary)

    def set_iota(self, cid, image, sign: int):
        self.iota[cid] = (image, sign)

    def set_fixed(self, cid):
        self.iota[cid] = (cid, 1)

    # -- checks -------------------------------------------------------

    def _check(self):
        for cid, bdry in self.boundary.items():
            for other, coeff in bdry.items():
                if self.degree[other] != self.degree[cid] - 1:
                    raise ShapeMismatch(f"boundary of {cid} has wrong degree")
            # d.d = 0
            dd: dict = {}
            for mid, c1 in bdry.items():
                for low, c2 in self.boundary[mid].items():
                    dd[low] = dd.get(low, 0) + c1 * c2
            if any(v != 0 for v in dd.values()):
                raise ShapeMismatch(f"d.d != 0 at cell {cid}")
        for cid in self.degree:
            if cid not in self.iota:
                raise MalformedOrbitMap(f"no involution image for {cid}")
            img, sign = self.iota[cid]
            img2, sign2 = self.iota[img]
            if img2 != cid or sign * sign2 != 1:
                raise MalformedOrbitMap(f"involution not an involution at {cid}")
            # chain map: iota(d c) = d(iota c)
            lhs: dict = {}
            for other, coeff in self.boundary[cid].items():
                oimg, osign = self.iota[other]
                lhs[oimg] = lhs.get(oimg, 0) + coeff * osign
            rhs: dict = {}
            for other, coeff in self.boundary[img].items():
                rhs[other] = rhs.get(other, 0) + coeff * sign
            keys = set(lhs) | set(rhs)
            if any(lhs.get(k, 0) != rhs.get(k, 0) for k in keys):
                raise MalformedOrbitMap(f"involution not a chain map at {cid}")

    # -- output -------------------------------------------------------

    def finish(self) -> EquivariantCWData:
        self._check()
        dim = max(self.order)
        cells_m = [len(self.order.get(d, [])) for d in range(dim + 1)]
        index = {cid: i for d in range(dim + 1)
                 for i, cid in enumerate(self.order.get(d, []))}

        # orbits: representative = earlier-listed cell of each pair
        rep_of: dict = {}
        q_order: dict[int, list] = {d: [] for d in range(dim + 1)}
        for d in range(dim + 1):
            for cid in self.order.get(d, []):
                img, _ = self.iota[cid]
                if img == cid or cid not in rep_of:
                    if cid not in rep_of:
                        rep_of[cid] = cid
                        rep_of[img] = cid
                        q_order[d].append(cid)
        q_index = {rep: i for d in range(dim + 1)
                   for i, rep in enumerate(q_order[d])}
        cells_q = [len(q_order[d]) for d in range(dim + 1)]

        def sigma(cid) -> int:
            """Coefficient of the projection: pi(c) = sigma(c) * orbit cell."""
            img, sign = self.iota[cid]
            if img == cid or rep_of[cid] == cid:
                return 1
            return sign

        # boundary matrices of M, then delta = transpose
        bnd_m = []
        for d in range(1, dim + 1):
            rows = cells_m[d - 1]
            cols = cells_m[d]
            grid = [[0] * cols for _ in range(rows)]
            for cid in self.order.get(d, []):
                for other, coeff in self.boundary[cid].items():
                    grid[index[other]][index[cid]] += coeff
            bnd_m.append(IntMatrix.from_rows(grid) if rows and cols
                         else IntMatrix.zero(rows, cols))
        delta_m = [b.transpose() for b in bnd_m]

        bnd_q = []
        for d in range(1, dim + 1):
            rows = cells_q[d - 1]
            cols = cells_q[d]
            grid = [[0] * cols for _ in range(rows)]
            for rep in q_order[d]:
                for other, coeff in self.boundary[rep].items():
                    grid[q_index[rep_of[other]]][q_index[rep]] += \
                        coeff * sigma(other)
            bnd_q.append(IntMatrix.from_rows(grid) if rows and cols
                         else IntMatrix.zero(rows, cols))
        delta_q = [b.transpose() for b in bnd_q]

        orbit = []
        for d in range(dim + 1):
            for cid in self.order.get(d, []):
                img, sign = self.iota[cid]
                orbit.append(OrbitEntry(
                    degree=d, index=index[cid],
                    image=q_index[rep_of[cid]],
                    fixed=(img == cid), sign=sign,
                ))
        return EquivariantCWData(
            cells_M=tuple(cells_m), cells_Q=tuple(cells_q),
            delta_M=tuple(delta_m), delta_Q=tuple(delta_q),
            orbit=tuple(orbit),
        )


# ---------------------------------------------------------------------------
# Torus arrangement and handlebodies
# ---------------------------------------------------------------------------


def _add_torus(b: _Builder, p: int, q: int):
    n = 2 * p

    def V(m):
        return ("V", m % n)

    def W(m):
        return ("W", m % n)

    for m in range(n):
        b.add(0, V(m), {})
        b.add(0, W(m), {})
    for m in range(n):
        b.add(1, ("hb", m), {V(m + 1): 1, V(m): -1})
        b.add(1, ("ht", m), {W(m + 1): 1, W(m): -1})
        b.add(1, ("sa", m), {W(m + q): 1, V(m): -1})
        b.add(1, ("sb", m), {V(m + q): 1, W(m): -1})
    for m in range(n):
        b.add(2, ("fa", m), {
            ("hb", m): 1, ("sa", (m + 1) % n): 1,
            ("ht", (m + q) % n): -1, ("sa", m): -1,
        })
        b.add(2, ("fb", m), {
            ("ht", m): 1, ("sb", (m + 1) % n): 1,
            ("hb", (m + q) % n): -1, ("sb", m): -1,
        })
    # involution v -> -v
    for m in range(n):
        for fam in ("V", "W"):
            if m % n in (0, p):
                b.set_fixed((fam, m))
            elif (fam, m) not in b.iota:
                b.set_iota((fam, m), (fam, (-m) % n), 1)
                b.set_iota((fam, (-m) % n), (fam, m), 1)
    for m in range(n):
        b.set_iota(("hb", m), ("hb", (-m - 1) % n), -1)
        b.set_iota(("ht", m), ("ht", (-m - 1) % n), -1)
        b.set_iota(("sa", m), ("sb", (-m - q) % n), -1)
        b.set_iota(("sb", m), ("sa", (-m - q) % n), -1)
        b.set_iota(("fa", m), ("fb", (-m - q - 1) % n), 1)
        b.set_iota(("fb", m), ("fa", (-m - q - 1) % n), 1)


def _horizontal_circles(p: int):
    n = 2 * p
    bottom = ([("hb", m) for m in range(n)], [("V", m) for m in range(n)])
    top = ([("ht", m) for m in range(n)], [("W", m) for m in range(n)])
    return [bottom, top]


def _slope_circles(p: int, q: int):
    n = 2 * p

    def walk(start):
        edges, verts = [], [start]
        cur = start
        while True:
            fam, m = cur
            if fam == "V":
                edge = ("sa", m)
                cur = ("W", (m + q) % n)
            else:
                edge = ("sb", m)
                cur = ("V", (m + q) % n)
            edges.append(edge)
            if cur == start:
                break
            verts.append(cur)
        return edges, verts

    c1 = walk(("V", 0))
    fixed = {("V", 0), ("V", p), ("W", 0), ("W", p)}
    remaining = sorted(fixed - set(c1[1]), key=str)
    c2 = walk(remaining[0])
    return [c1, c2]


def _add_solid_torus(b: _Builder, label: str, circles, band_faces,
                     band_sign: int, p: int):
    """Attach diameters, half-disks and two slabs over a meridian family.

    ``circles`` are the two meridian circles as (edges, vertices) walks
    starting at a fixed vertex; ``band_faces`` the two face lists between
    them; ``band_sign`` the coefficient of band faces in the slab
    boundaries (depends on the orientation of the meridian family).
    """
    disks = []
    for i, (edges, verts) in enumerate(circles):
        half = len(edges) // 2
        if len(edges) != 2 * half:
            raise ShapeMismatch("meridian circle with odd edge count")
        v0, vh = verts[0], verts[half]
        g = ("g", label, i)
        b.add(1, g, {vh: 1, v0: -1})
        b.set_fixed(g)
        hplus = ("H", label, i, "+")
        hminus = ("H", label, i, "-")
        bd_plus = {e: 1 for e in edges[:half]}
        bd_plus[g] = bd_plus.get(g, 0) - 1
        bd_minus = {e: 1 for e in edges[half:]}
        bd_minus[g] = bd_minus.get(g, 0) + 1
        b.add(2, hplus, bd_plus)
        b.add(2, hminus, bd_minus)
        b.set_iota(hplus, hminus, -1)
        b.set_iota(hminus, hplus, -1)
        disks.append((hplus, hminus))
    (d0p, d0m), (d1p, d1m) = disks
    slab_a = ("T", label, "A")
    slab_b = ("T", label, "B")
    bd_a = {f: band_sign for f in band_faces[0]}
    for f, c in ((d1p, 1), (d1m, 1), (d0p, -1), (d0m, -1)):
        bd_a[f] = bd_a.get(f, 0) + c
    bd_b = {f: band_sign for f in band_faces[1]}
    for f, c in ((d0p, 1), (d0m, 1), (d1p, -1), (d1m, -1)):
        bd_b[f] = bd_b.get(f, 0) + c
    b.add(3, slab_a, bd_a)
    b.add(3, slab_b, bd_b)
    b.set_iota(slab_a, slab_b, 1)
    b.set_iota(slab_b, slab_a, 1)


def _psi_half(p: int, q: int, cell) -> int:
    """0/1 flag: which slope band a torus face lies in (psi = px - qy)."""
    fam, m = cell
    # interior psi of fa[m] lies in (m, m+1)/2; of fb[m] in (m-q, m-q+1)/2
    base = m if fam == "fa" else m - q
    return 0 if base % 2 == 0 else 1


def lens_space(p: int, q: int) -> EquivariantCWData:
    """L(p, q) with the genus-one equivariant structure; p odd, gcd = 1.

    p = 1 gives the three-sphere with its conjugation involution; the
    quotient is always the three-sphere.
    """
    if p < 1 or p % 2 == 0:
        raise NotCoprime("this construction requires odd p >= 1")
    if gcd(p, q) != 1:
        raise NotCoprime(f"gcd({p},{q}) != 1")
    b = _Builder()
    _add_torus(b, p, q)
    n = 2 * p
    # first handlebody: meridians are the horizontal circles
    _add_solid_torus(
        b, "h", _horizontal_circles(p),
        [[("fa", m) for m in range(n)], [("fb", m) for m in range(n)]],
        band_sign=1, p=p,
    )
    # second handlebody: meridians are the slope circles
    all_faces = [("fa", m) for m in range(n)] + [("fb", m) for m in range(n)]
    band0 = [f for f in all_faces if _psi_half(p, q, f) == 0]
    band1 = [f for f in all_faces if _psi_half(p, q, f) == 1]
    slope = _slope_circles(p, q)
    # band0 borders the psi = 0 circle (slope[0], through V[0]); the slab
    # over band0 runs from psi = 0 to psi = 1/2
    _add_solid_torus(b, "s", slope, [band0, band1], band_sign=-1, p=p)
    return b.finish()


def sphere3_conjugation() -> EquivariantCWData:
    """S^3 with complex conjugation (branch locus an unknot)."""
    return lens_space(1, 0)


def s1_x_s2_unlink_cover() -> EquivariantCWData:
    """S^1 x S^2 as the double of a solid torus: the branched double
    cover of the two-component unlink, with two fixed circles."""
    b = _Builder()
    _add_torus(b, 1, 0)
    n = 2
    bands = [[("fa", m) for m in range(n)], [("fb", m) for m in range(n)]]
    _add_solid_torus(b, "h", _horizontal_circles(1), bands, band_sign=1, p=1)
    _add_solid_torus(b, "h2", _horizontal_circles(1), bands, band_sign=1, p=1)
    return b.finish()


def torus_hyperelliptic() -> EquivariantCWData:
    """T^2 with v -> -v; quotient is the pillowcase sphere."""
    b = _Builder()
    _add_torus(b, 1, 0)
    return b.finish()


def torus_hyperelliptic_fine() -> EquivariantCWData:
    """The same involutive torus with a finer cell structure (subdivision
    sanity fixture: all census outputs must agree with the coarse one)."""
    b = _Builder()
    _add_torus(b, 3, 1)
    return b.finish()


def point_pair() -> EquivariantCWData:
    b = _Builder()
    b.add(0, "p0", {})
    b.add(0, "p1", {})
    b.set_iota("p0", "p1", 1)
    b.set_iota("p1", "p0", 1)
    return b.finish()


def circle_antipodal() -> EquivariantCWData:
    """S^1 with the free antipodal involution; quotient a circle."""
    b = _Builder()
    b.add(0, "v0", {})
    b.add(0, "v1", {})
    b.add(1, "e0", {"v1": 1, "v0": -1})
    b.add(1, "e1", {"v0": 1, "v1": -1})
    b.set_iota("v0", "v1", 1)
    b.set_iota("v1", "v0", 1)
    b.set_iota("e0", "e1", 1)
    b.set_iota("e1", "e0", 1)
    return b.finish()


def circle_reflection() -> EquivariantCWData:
    """S^1 with a reflection: two fixed vertices, edges swapped."""
    b = _Builder()
    b.add(0, "a", {})
    b.add(0, "bb", {})
    b.add(1, "up", {"bb": 1, "a": -1})
    b.add(1, "dn", {"a": 1, "bb": -1})
    b.set_fixed("a")
    b.set_fixed("bb")
    b.set_iota("up", "dn", -1)
    b.set_iota("dn", "up", -1)
    return b.finish()


def s1_x_s2_rotation() -> EquivariantCWData:
    """S^1 x S^2 with identity times rotation by pi about the poles.

    Fixed locus S^1 x {poles}; the sphere cells are a pair of meridian
    arcs and a pair of bigons swapped by the rotation.
    """
    b = _Builder()
    # S^1 factor: vertex v, edge c; sphere factor: N, S, e, e', F, F'
    b.add(0, ("v", "N"), {})
    b.add(0, ("v", "S"), {})
    for arc in ("e", "e'"):
        b.add(1, ("v", arc), {("v", "S"): 1, ("v", "N"): -1})
    b.add(1, ("c", "N"), {})
    b.add(1, ("c", "S"), {})
    b.add(2, ("v", "F"), {("v", "e"): 1, ("v", "e'"): -1})
    b.add(2, ("v", "F'"), {("v", "e'"): 1, ("v", "e"): -1})
    # c x arc: d(c x e) = (dc) x e - c x de = -c x S + c x N ... with
    # product orientation d(a x b) = da x b + (-1)^|a| a x db, |c| = 1
    for arc in ("e", "e'"):
        b.add(2, ("c", arc), {("c", "S"): -1, ("c", "N"): 1})
    b.add(3, ("c", "F"), {("c", "e"): -1, ("c", "e'"): 1})
    b.add(3, ("c", "F'"), {("c", "e'"): -1, ("c", "e"): 1})
    for cid in (("v", "N"), ("v", "S"), ("c", "N"), ("c", "S")):
        b.set_fixed(cid)
    for pref in ("v", "c"):
        b.set_iota((pref, "e"), (pref, "e'"), 1)
        b.set_iota((pref, "e'"), (pref, "e"), 1)
        b.set_iota((pref, "F"), (pref, "F'"), 1)
        b.set_iota((pref, "F'"), (pref, "F"), 1)
    return b.finish()


FIXTURE_BUILDERS = {
    "point_pair": point_pair,
    "circle_antipodal": circle_antipodal,
    "circle_reflection": circle_reflection,
    "torus_hyperelliptic": torus_hyperelliptic,
    "torus_hyperelliptic_fine": torus_hyperelliptic_fine,
    "s3_conjugation": sphere3_conjugation,
    "lens_3_1": lambda: lens_space(3, 1),
    "lens_5_1": lambda: lens_space(5, 1),
    "lens_5_2": lambda: lens_space(5, 2),
    "lens_7_1": lambda: lens_space(7, 1),
    "lens_7_2": lambda: lens_space(7, 2),
    "s1_x_s2_rotation": s1_x_s2_rotation,
    "s1_x_s2_unlink_cover": s1_x_s2_unlink_cover,
}


def build_fixture(name: str) -> EquivariantCWData:
    try:
        return FIXTURE_BUILDERS[name]()
    except KeyError:
        raise MalformedOrbitMap(f"unknown fixture {name!r}") from None
