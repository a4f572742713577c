"""Batch command-line frontend: JSON in, JSON report out.

Every subcommand reads explicit flags and/or a JSON input file, runs one
library computation, and writes a deterministic JSON report (sorted keys,
fixed separators) to stdout or ``--output``.  Module errors become
structured ``{"error": {"code", "message"}}`` objects with exit code 1;
malformed input JSON exits with code 2.  ``--pretty`` switches to an
indented rendering of the same report.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
import time

import numpy as np

from . import cw_fixtures
from .complexes import (
    assemble,
    homology,
    les_maps,
    verify_d_squared,
    verify_les_exact,
)
from .errors import HmrkitError
from .f2lin import F2Matrix, IntMatrix
from .index_grading import TopologicalData4, closed4_index, loop_grading_shift
from .morse_blowup import (
    BaseMorseData,
    BasePoint,
    LinearFlowModel,
    build_model_complexes,
    closed_form_phi,
    integrate_blowup_flow,
    limiting_eigen_index,
)
from .real_spinc import (
    EquivariantCWData,
    SeifertMatrix,
    branched_cover_invariants,
    real_spinc_torsor,
    real_structure_classes,
    verify_naturality,
    verify_theta_chain_map,
)
from .seifert_hmr import (
    BrieskornInput,
    brieskorn_hmr,
    brieskorn_irreducibles,
    divisor_count,
    lens_hmr,
    psc_hmr,
)

SELFTEST_BUDGET_SECONDS = 60.0


# ---------------------------------------------------------------------------
# plumbing
# ---------------------------------------------------------------------------


def _dump(obj, pretty: bool) -> str:
    if pretty:
        return json.dumps(obj, sort_keys=True, indent=2) + "\n"
    return json.dumps(obj, sort_keys=True, separators=(",", ":")) + "\n"


def _emit(obj, args) -> int:
    text = _dump(obj, args.pretty)
    if args.output and args.output != "-":
        with open(args.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def _load_input(args) -> dict:
    if args.input == "-":
        raw = sys.stdin.read()
    else:
        with open(args.input) as fh:
            raw = fh.read()
    return json.loads(raw)


def _graded(ranks: dict) -> list:
    return [[g, r] for g, r in sorted(ranks.items()) if r]


def _triple_json(triple) -> dict:
    hat, check, bar = triple
    return {"hat": hat.to_json(), "check": check.to_json(),
            "bar": bar.to_json()}


def _parse_window(text: str):
    lo, _, hi = text.partition(":")
    return int(lo), int(hi)


# ---------------------------------------------------------------------------
# subcommand handlers
# ---------------------------------------------------------------------------


def _cmd_morse(args) -> int:
    raw = _load_input(args)
    points = tuple(
        BasePoint(p["label"], int(p["ind_q"]),
                  LinearFlowModel(np.array(p["fiber"], dtype=float)))
        for p in raw["points"]
    )
    counts = None
    if raw.get("counts") is not None:
        counts = F2Matrix.from_json(raw["counts"])
    base = BaseMorseData(points, counts)
    blocks = build_model_complexes(base, int(raw.get("grading_shift", 0)))
    cx = assemble(blocks)
    maps = les_maps(blocks)
    report = {
        "generators": [
            {"id": g.id, "kind": g.kind, "gr": g.gr}
            for g in blocks.gens_o + blocks.gens_s + blocks.gens_u
        ],
        "d_squared": verify_d_squared(cx),
        "homology": {f: _graded(homology(cx, f))
                     for f in ("check", "hat", "bar")},
        "les_exact": verify_les_exact(cx, maps),
    }
    return _emit(report, args)


def _cmd_flow(args) -> int:
    raw = _load_input(args)
    model = LinearFlowModel(np.array(raw["L"], dtype=float))
    if raw.get("phi0") is not None:
        phi0 = np.array(raw["phi0"], dtype=float)
    else:
        rng = np.random.default_rng(args.seed)
        phi0 = rng.standard_normal(model.n)
        phi0 /= np.linalg.norm(phi0)
    traj = integrate_blowup_flow(model, phi0, float(raw.get("s0", 0.0)),
                                 float(raw["t_max"]), float(raw["step"]))
    exact = closed_form_phi(model, phi0, float(traj.times[-1]))
    sign = 1.0 if float(exact @ traj.terminal_phi) >= 0 else -1.0
    report = {
        "converged": traj.converged,
        "terminal_lambda": round(traj.terminal_lambda, 12),
        "predicted_eigen_index": limiting_eigen_index(model, phi0),
        "predicted_eigenvalue": round(
            float(model.eigenvalues[limiting_eigen_index(model, phi0) - 1]),
            12),
        "closed_form_deviation": round(
            float(np.max(np.abs(sign * exact - traj.terminal_phi))), 12),
        "terminal_phi": [round(float(x), 12) for x in traj.terminal_phi],
    }
    if args.samples:
        report["trajectory"] = traj.to_json(stride=args.stride)
    if args.csv:
        with open(args.csv, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["t"] + [f"phi{i}" for i in range(model.n)]
                            + ["s", "lambda"])
            for i in range(0, len(traj.times), args.stride):
                writer.writerow(
                    [f"{traj.times[i]:.6f}"]
                    + [f"{x:.9f}" for x in traj.phis[i]]
                    + [f"{traj.ss[i]:.9f}", f"{traj.lambdas[i]:.9f}"])
    return _emit(report, args)


def _cmd_spinc(args) -> int:
    if args.fixture:
        data = cw_fixtures.build_fixture(args.fixture)
    else:
        data = EquivariantCWData.from_json(_load_input(args))
    chain_map = all(verify_theta_chain_map(data, d)
                    for d in range(data.dim + 1))
    natural = all(verify_naturality(data, d) for d in range(data.dim + 1))
    census = real_spinc_torsor(data)
    report = {
        "dim": data.dim,
        "cells_M": list(data.cells_M),
        "cells_Q": list(data.cells_Q),
        "theta_chain_map": chain_map,
        "naturality": natural,
        "census": {
            "exists": census.exists,
            "size": census.size(),
            "kernel_invariants": list(census.kernel_invariants),
            "h1_invariants": list(census.h1_invariants),
        },
        "real_structure_classes": real_structure_classes(data),
    }
    return _emit(report, args)


def _cmd_brieskorn(args) -> int:
    window = _parse_window(args.window) if args.window else None
    inp = BrieskornInput(args.family, args.k, window)
    spec = brieskorn_irreducibles(inp)
    res = brieskorn_hmr(inp)
    report = {
        "family": args.family,
        "k": args.k,
        "pqr": list(inp.pqr),
        "spectrum": [[g, c] for g, c in spec.counts],
        "theta_minus1_grading": spec.theta_minus1_grading,
        "divisor_pairs": divisor_count(*inp.pqr),
        "truncation": list(res.truncation),
        "d_squared": verify_d_squared(res.complexes),
        "hat": res.hat.to_json(),
        "check": res.check.to_json(),
        "bar": res.bar.to_json(),
    }
    return _emit(report, args)


def _cmd_lens(args) -> int:
    triples = lens_hmr(args.p, args.q)
    report = {
        "p": args.p,
        "q": args.q,
        "count": len(triples),
        "summand": _triple_json(triples[0]),
    }
    return _emit(report, args)


def _cmd_psc(args) -> int:
    report = {
        "b1": args.b1,
        "torsion": args.torsion,
    }
    report.update(_triple_json(psc_hmr(args.b1, args.torsion)))
    return _emit(report, args)


def _cmd_index(args) -> int:
    d = TopologicalData4(args.c1sq, args.sigma, args.b1, args.bplus, args.b0)
    return _emit({"index": closed4_index(d)}, args)


def _cmd_seifert_matrix(args) -> int:
    raw = _load_input(args)
    order, b1 = branched_cover_invariants(
        SeifertMatrix(IntMatrix.from_rows(raw["data"])))
    return _emit({"h1_order": order, "b1": b1}, args)


# ---------------------------------------------------------------------------
# fixtures selftest
# ---------------------------------------------------------------------------


def _selftest_checks():
    """(name, thunk) pairs re-running the library's pinned example values."""

    def rp_model(n):
        diag = np.diag(np.arange(1, n + 1, dtype=float) - (n + 1) / 2.0
                       + 0.25)
        base = BaseMorseData((BasePoint("q", 0, LinearFlowModel(diag)),))
        cx = assemble(build_model_complexes(base))
        bar_total = sum(homology(cx, "bar").values())
        return bar_total == n

    def s3_tower():
        vals = np.array([float(k) for k in range(-10, 0)]
                        + [float(k) for k in range(1, 11)])
        base = BaseMorseData((BasePoint("q", 0,
                                        LinearFlowModel(np.diag(vals))),))
        cx = assemble(build_model_complexes(base, grading_shift=-10))
        check = homology(cx, "check")
        hat = homology(cx, "hat")
        return (all(check.get(j, 0) == 1 for j in range(0, 10))
                and all(hat.get(j, 0) == 1 for j in range(-9, 1)))

    def lens_census(p, name):
        census = real_spinc_torsor(cw_fixtures.build_fixture(name))
        return census.size() == p

    def rotation_census():
        data = cw_fixtures.build_fixture("s1_x_s2_rotation")
        return (real_spinc_torsor(data).size() == 2
                and real_structure_classes(data) == [2])

    def branched(a, order, b1):
        m = SeifertMatrix(IntMatrix.from_rows(a)) if a else \
            SeifertMatrix(IntMatrix.zero(0, 0))
        return branched_cover_invariants(m) == (order, b1)

    def brieskorn_family(family, k, total, undetermined):
        res = brieskorn_hmr(BrieskornInput(family, k))
        if undetermined != res.hat.undetermined:
            return False
        flavor = res.check
        return sum(c for _, c in flavor.finite) == total

    def brieskorn_29():
        res = brieskorn_hmr(BrieskornInput("2,7,29"))
        return res.check.finite == ((0, 2), (2, 2), (4, 2), (5, 4), (6, 2))

    def psc_single_towers():
        hat, check, bar = psc_hmr(0, True)
        return (hat.rank_at(0), check.rank_at(0), bar.rank_at(-3)) == \
            (1, 1, 1)

    checks = [
        ("s3_tower_ranks", s3_tower),
        ("psc_b1_zero", psc_single_towers),
        ("index_example", lambda: closed4_index(
            TopologicalData4(8, 0, 1, 1, 0)) == 1),
        ("loop_shift", lambda: loop_grading_shift(4) == 2),
        ("rotation_census", rotation_census),
        ("unknot_cover", lambda: branched(None, 1, 0)),
        ("trefoil_cover", lambda: branched([[-1, 1], [0, -1]], 3, 0)),
        ("figure_eight_cover", lambda: branched([[1, -1], [0, -1]], 5, 0)),
        ("split_unlink_cover", lambda: branched([[0]], 0, 1)),
        ("brieskorn_2_3_13", lambda: brieskorn_family("2,3,+1", 2, 2, False)),
        ("brieskorn_2_3_11_hat_open",
         lambda: brieskorn_family("2,3,-1", 2, 2, True)),
        ("brieskorn_2_5_19", lambda: brieskorn_family("2,5,-1", 2, 6, False)),
        ("brieskorn_2_7_29", brieskorn_29),
        ("lens_answer_count", lambda: len(lens_hmr(5, 2)) == 5),
    ]
    for n in range(2, 9):
        checks.append((f"rp_model_n{n}", lambda n=n: rp_model(n)))
    for p, name in ((3, "lens_3_1"), (5, "lens_5_1"), (7, "lens_7_1")):
        checks.append((f"census_{name}", lambda p=p, name=name:
                       lens_census(p, name)))
    return checks


def _cmd_fixtures_selftest(args) -> int:
    started = time.monotonic()
    results = []
    for name, thunk in _selftest_checks():
        try:
            ok = bool(thunk())
        except HmrkitError:
            ok = False
        results.append({"name": name, "ok": ok})
    elapsed = time.monotonic() - started
    if elapsed > SELFTEST_BUDGET_SECONDS:
        print(f"warning: selftest took {elapsed:.1f}s "
              f"(budget {SELFTEST_BUDGET_SECONDS:.0f}s)", file=sys.stderr)
    report = {
        "checks": results,
        "all_ok": all(r["ok"] for r in results),
    }
    _emit(report, args)
    return 0 if report["all_ok"] else 1


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hmrkit",
        description="blow-up Morse models, real-structure censuses and "
                    "Floer tower calculators",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, needs_input=False):
        p.add_argument("--output", default="-",
                       help="report path ('-' for stdout)")
        p.add_argument("--pretty", action="store_true",
                       help="indent the JSON report")
        if needs_input:
            p.add_argument("--input", required=True,
                           help="input JSON path ('-' for stdin)")

    p = sub.add_parser("morse", help="assemble a blow-up model complex")
    common(p, needs_input=True)
    p.set_defaults(func=_cmd_morse)

    p = sub.add_parser("flow", help="integrate the blown-up gradient flow")
    common(p, needs_input=True)
    p.add_argument("--seed", type=int, default=0,
                   help="seed for a random phi0 when the input omits it")
    p.add_argument("--samples", action="store_true",
                   help="include sampled trajectory points in the report")
    p.add_argument("--stride", type=int, default=100,
                   help="sampling stride for --samples/--csv")
    p.add_argument("--csv", default=None,
                   help="optional CSV trajectory dump path")
    p.set_defaults(func=_cmd_flow)

    p = sub.add_parser("spinc", help="real-structure census from CW data")
    common(p)
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--input", help="CW JSON path ('-' for stdin)")
    group.add_argument("--fixture",
                       choices=sorted(cw_fixtures.FIXTURE_BUILDERS),
                       help="built-in equivariant CW fixture")
    p.set_defaults(func=_cmd_spinc)

    p = sub.add_parser("brieskorn", help="Brieskorn-family tower modules")
    common(p)
    p.add_argument("--family", required=True,
                   help="one of 2,3,+1 / 2,3,-1 / 2,5,-1 / 2,5,+1 / 2,7,29")
    p.add_argument("--k", type=int, default=1)
    p.add_argument("--window", default=None,
                   help="truncation window lo:hi (default derived)")
    p.set_defaults(func=_cmd_brieskorn)

    p = sub.add_parser("lens", help="lens-space answer per real spin-c")
    common(p)
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--q", type=int, required=True)
    p.set_defaults(func=_cmd_lens)

    p = sub.add_parser("psc", help="positive-scalar-curvature tower modules")
    common(p)
    p.add_argument("--b1", type=int, required=True)
    torsion = p.add_mutually_exclusive_group(required=True)
    torsion.add_argument("--torsion", dest="torsion", action="store_true")
    torsion.add_argument("--no-torsion", dest="torsion",
                         action="store_false")
    p.set_defaults(func=_cmd_psc)

    p = sub.add_parser("index", help="closed-4-manifold index formula")
    common(p)
    p.add_argument("--c1sq", type=int, required=True)
    p.add_argument("--sigma", type=int, required=True)
    p.add_argument("--b1", type=int, required=True)
    p.add_argument("--bplus", type=int, required=True)
    p.add_argument("--b0", type=int, required=True)
    p.set_defaults(func=_cmd_index)

    p = sub.add_parser("seifert-matrix",
                       help="branched double cover invariants")
    common(p, needs_input=True)
    p.set_defaults(func=_cmd_seifert_matrix)

    p = sub.add_parser("fixtures-selftest",
                       help="re-run the pinned example values")
    common(p)
    p.set_defaults(func=_cmd_fixtures_selftest)

    return parser


def run(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return args.func(args)
    except json.JSONDecodeError as exc:
        sys.stdout.write(_dump(
            {"error": {"code": "malformed_json", "message": str(exc)}},
            args.pretty))
        return 2
    except FileNotFoundError as exc:
        sys.stdout.write(_dump(
            {"error": {"code": "file_not_found",
                       "message": str(exc)}}, args.pretty))
        return 2
    except HmrkitError as exc:
        sys.stdout.write(_dump(
            {"error": {"code": exc.code, "message": str(exc)}},
            args.pretty))
        return 1


def main(argv=None):
    raise SystemExit(run(argv))


if __name__ == "__main__":
    main()
