"""Command line front end.

Exit codes: 0 success, 1 verification failure, 2 malformed input or a
singular point supplied by the user, 3 numerical non-convergence.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Sequence

import numpy as np

from . import formats, geometry, immersion, meron, model
from .errors import ConvergenceError, InputError, SigmaSurfError, SingularityError

EXIT_OK, EXIT_VERIFY, EXIT_INPUT, EXIT_CONVERGENCE = 0, 1, 2, 3


class CliError(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


def _parse_points(text: str) -> np.ndarray:
    """``grid:NX:NY:XMIN:XMAX:YMIN:YMAX`` or comma-separated complex literals."""
    text = text.strip()
    if text.startswith("grid:"):
        parts = text[5:].split(":")
        if len(parts) != 6:
            raise InputError("--points: grid spec needs NX:NY:XMIN:XMAX:YMIN:YMAX")
        try:
            nx, ny = int(parts[0]), int(parts[1])
            x0, x1, y0, y1 = (float(p) for p in parts[2:])
        except ValueError:
            raise InputError(f"--points: cannot parse grid spec {text!r}") from None
        return _grid(nx, ny, x0, x1, y0, y1)
    out = []
    for i, item in enumerate(filter(None, (t.strip() for t in text.split(",")))):
        try:
            out.append(complex(item.replace(" ", "")))
        except ValueError:
            raise InputError(f"--points[{i}]: cannot parse {item!r} as a complex number") from None
    if not out:
        raise InputError("--points: no points given")
    return np.array(out)


def _grid(nx: int, ny: int, x0: float, x1: float, y0: float, y1: float) -> np.ndarray:
    if nx < 1 or ny < 1:
        raise InputError("grid: NX and NY must be positive")
    xs = np.linspace(x0, x1, nx)
    ys = np.linspace(y0, y1, ny)
    return (xs[None, :] + 1j * ys[:, None]).ravel()


def _depth(spec: formats.ModelSpecFile, k: int | None) -> int:
    k = spec.k if k is None else k
    k = 0 if k is None else k
    if not 0 <= k < spec.N:
        raise InputError(f"--k: must lie in [0, {spec.N - 1}], got {k}")
    return k


def _basis_note(N: int) -> str:
    if N == 3:
        return "coordinates X1..X8 in the calibrated CP^2 frame, tabulated integration constants"
    return f"coordinates in the generalized Gell-Mann basis of su({N}) (symmetric, antisymmetric pairs per column, then diagonal)"


def _coords(X: np.ndarray, N: int, k: int) -> np.ndarray:
    if N == 3:
        return immersion.cp2_tabulated_coordinates(X, k)
    return immersion.sun_coordinates(X, check=False)


# ---------------------------------------------------------------------------
# subcommands


def cmd_veronese(args) -> int:
    if args.n < 2:
        raise InputError(f"--n: must be >= 2, got {args.n}")
    obj = formats.veronese_spec_json(args.n)
    if args.out:
        formats.write_json(args.out, obj)
    else:
        sys.stdout.write(formats.dumps(obj))
    return EXIT_OK


def _report_entry(f, k, xi, epsilon) -> dict:
    try:
        r = geometry.geometry_report(f, k, xi, epsilon)
    except (SingularityError, ArithmeticError) as exc:
        return {"xi": formats.cplx(xi), "singular": True, "error": f"{type(exc).__name__}: {exc}"}
    ch = r.christoffel
    ii20, ii11, ii02 = r.second_form_coeffs
    return {
        "xi": formats.cplx(xi),
        "singular": False,
        "metric": {"g11": formats.cplx(r.metric.g11), "g12": formats.cplx(r.metric.g12), "g22": formats.cplx(r.metric.g22)},
        "christoffel": {name: formats.cplx(getattr(ch, name)) for name in ch._fields},
        "gaussian_curvature": r.gaussian,
        "second_fundamental_form": {
            "dxi2": formats.cplx_array(ii20),
            "dxi_dxibar": formats.cplx_array(ii11),
            "dxibar2": formats.cplx_array(ii02),
        },
        "mean_curvature": formats.cplx_array(r.mean_curvature),
        "J": formats.cplx(r.J),
        "el_residual": r.el_residual,
    }


def cmd_analyze(args) -> int:
    spec = formats.read_model(args.model)
    k = _depth(spec, args.k)
    pts = _parse_points(args.points)
    entries = [_report_entry(spec.f, k, complex(z), args.epsilon) for z in pts]
    obj = {
        "format_version": formats.FORMAT_VERSION,
        "N": spec.N,
        "k": k,
        "epsilon": args.epsilon,
        "points": entries,
    }
    formats.write_json(args.out, obj)
    return EXIT_OK


def _immersion_values(f, k: int, pts: np.ndarray, anchor: complex):
    """``(X, valid)`` for every grid point; singular points are marked invalid."""
    n = pts.size
    X = np.zeros((n, f.N, f.N), dtype=complex)
    valid = np.ones(n, dtype=bool)
    if k == 0:
        for i, z in enumerate(pts):
            try:
                X[i] = immersion.immersion_tower_formula(f, 0, z)
            except SigmaSurfError:
                valid[i] = False
        return X, valid
    base = immersion.immersion_tower_formula(f, k, anchor)
    try:
        X[:] = base + immersion.immersion_from_anchor(f, k, pts, anchor=anchor)
        return X, valid
    except (SingularityError, ConvergenceError):
        pass
    for i, z in enumerate(pts):
        try:
            X[i] = base + immersion.immersion_line_integral(f, k, anchor, z)
        except SingularityError:
            valid[i] = False
    return X, valid


def cmd_immerse(args) -> int:
    spec = formats.read_model(args.model)
    k = _depth(spec, args.k)
    nx, ny = args.grid
    x0, x1, y0, y1 = args.range
    pts = _grid(nx, ny, x0, x1, y0, y1)
    dim = spec.N**2 - 1
    if args.project is not None:
        bad = [a for a in args.project if not 1 <= a <= dim]
        if bad:
            raise InputError(f"--project: indices must lie in 1..{dim}, got {bad}")
    X, valid = _immersion_values(spec.f, k, pts, complex(args.anchor))
    coords = np.zeros((pts.size, dim))
    if valid.any():
        coords[valid] = _coords(X[valid], spec.N, k)
    header = ["x", "y"] + [f"X{i + 1}" for i in range(dim)]
    rows = ([z.real, z.imag, *c] for z, c, ok in zip(pts, coords, valid) if ok)
    notes = [_basis_note(spec.N), f"k={k}"]
    formats.write_csv(args.out, header, rows, skipped=int((~valid).sum()), notes=notes)
    if args.obj:
        a, b, c = args.project or (1, 2, 3)
        verts = coords[:, [a - 1, b - 1, c - 1]].reshape(ny, nx, 3)
        formats.write_obj(args.obj, verts, valid.reshape(ny, nx))
    return EXIT_OK


def cmd_charge(args) -> int:
    spec = formats.read_model(args.model)
    k = _depth(spec, args.k)
    if args.quad_order < 8:
        raise InputError(f"--quad-order: must be >= 8, got {args.quad_order}")
    r = model.charge_and_action(spec.f, k, quad_order=args.quad_order)
    obj = {
        "format_version": formats.FORMAT_VERSION,
        "k": k,
        "Q": r.Q,
        "action_energy": r.action_energy,
        "Q_refinement_error": r.Q_refinement_error,
        "action_refinement_error": r.action_refinement_error,
        "quadrature_order": r.quadrature_order,
        "charts_used": r.charts_used,
    }
    sys.stdout.write(formats.dumps(obj))
    return EXIT_OK


def _read_seeds(path) -> tuple[list[complex], float | None, int]:
    obj = formats.read_json(path)
    if not isinstance(obj, dict) or not isinstance(obj.get("seeds"), list):
        raise InputError(f"{path}: expected an object with a 'seeds' list")
    seeds = [formats.parse_cplx(s, f"{path}: seeds[{i}]") for i, s in enumerate(obj["seeds"])]
    step = obj.get("step")
    if step is not None and (not isinstance(step, (int, float)) or step <= 0):
        raise InputError(f"{path}: step must be a positive number")
    max_steps = obj.get("max_steps", 200_000)
    if not isinstance(max_steps, int) or max_steps < 1:
        raise InputError(f"{path}: max_steps must be a positive integer")
    return seeds, step, max_steps


def cmd_meron(args) -> int:
    spec = formats.read_model(args.model)
    if spec.meron is None:
        raise InputError(f"{args.model}: meron block is required for this subcommand")
    ms = spec.meron
    rep = meron.quad_diff_report(ms.F)
    traj_summaries = []
    rows = []
    skipped = 0
    if args.trajectories:
        seeds, step, max_steps = _read_seeds(args.trajectories)
        for tid, seed in enumerate(seeds):
            try:
                tr = meron.trace_trajectory(ms.F, seed, step, max_steps)
            except SingularityError as exc:
                raise InputError(f"seeds[{tid}] = {seed}: {exc}") from None
            windings = {}
            if tr.closed:
                for j, (z, _) in enumerate(rep.finite_poles):
                    windings[f"pole_{j}"] = meron.winding_number(tr.points, z)
            traj_summaries.append({
                "id": tid,
                "seed": formats.cplx(seed),
                "closed": tr.closed,
                "stop_reason": tr.stop_reason,
                "period_error": tr.period_error if tr.closed else None,
                "step": tr.step,
                "n_points": int(tr.points.size),
                "perimeter": tr.perimeter,
                "max_drift": tr.max_drift,
                "branch_cut_crossings": tr.cut_crossings,
                "winding_numbers": windings,
            })
            for idx, z in enumerate(tr.points):
                try:
                    X = meron.meron_radius(ms, z)
                except SingularityError:
                    skipped += 1
                    continue
                rows.append([str(tid), str(idx), z.real, z.imag, *X])
    obj = {
        "format_version": formats.FORMAT_VERSION,
        "finite_poles": [{"location": formats.cplx(z), "residue": formats.cplx(r)} for z, r in rep.finite_poles],
        "residue_at_infinity": formats.cplx(rep.residue_at_infinity),
        "zeros": [formats.cplx(z) for z in rep.zeros],
        "cylinders": [
            {"pole": "infinity" if c.pole is None else formats.cplx(c.pole), "residue": formats.cplx(c.residue), "perimeter": c.perimeter}
            for c in rep.cylinders
        ],
        "trajectories": traj_summaries,
    }
    formats.write_json(args.report, obj)
    if args.out:
        header = ["trajectory", "index", "x", "y"] + [f"X{i + 1}" for i in range(8)]
        formats.write_csv(args.out, header, rows, skipped=skipped,
                          notes=["X3, X4 use the principal logarithm; see branch_cut_crossings in the report"])
    return EXIT_OK


def cmd_verify(args) -> int:
    from .acceptance import format_table, run_all

    results = run_all()
    print(format_table(results))
    return EXIT_OK if all(r.passed for r in results) else EXIT_VERIFY


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="sigmasurf", description="Surfaces of CP^{N-1} sigma-model solutions.")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("veronese", help="write the Veronese model spec")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--out")
    s.set_defaults(func=cmd_veronese)

    s = sub.add_parser("analyze", help="geometry reports at points")
    s.add_argument("--model", required=True)
    s.add_argument("--k", type=int)
    s.add_argument("--points", required=True, help="'grid:NX:NY:XMIN:XMAX:YMIN:YMAX' or '0.5+0.1j,1,...'")
    s.add_argument("--epsilon", type=int, choices=(1, -1), default=1)
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_analyze)

    s = sub.add_parser("immerse", help="sample the immersion on a grid")
    s.add_argument("--model", required=True)
    s.add_argument("--k", type=int)
    s.add_argument("--grid", type=int, nargs=2, metavar=("NX", "NY"), required=True)
    s.add_argument("--range", type=float, nargs=4, metavar=("XMIN", "XMAX", "YMIN", "YMAX"), required=True)
    s.add_argument("--anchor", type=complex, default=1 + 0j, help="base point of the line integrals (k >= 1)")
    s.add_argument("--out", required=True)
    s.add_argument("--obj")
    s.add_argument("--project", type=int, nargs=3, metavar=("A", "B", "C"))
    s.set_defaults(func=cmd_immerse)

    s = sub.add_parser("charge", help="topological charge and action")
    s.add_argument("--model", required=True)
    s.add_argument("--k", type=int)
    s.add_argument("--quad-order", type=int, default=16)
    s.set_defaults(func=cmd_charge)

    s = sub.add_parser("meron", help="quadratic differential report and trajectories")
    s.add_argument("--model", required=True)
    s.add_argument("--report", required=True)
    s.add_argument("--trajectories")
    s.add_argument("--out")
    s.set_defaults(func=cmd_meron)

    s = sub.add_parser("verify", help="run the acceptance suite")
    s.set_defaults(func=cmd_verify)
    return p


def run_cli(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_INPUT
    try:
        return args.func(args)
    except ConvergenceError as exc:
        print(f"error (non-convergence): {exc}", file=sys.stderr)
        return EXIT_CONVERGENCE
    except (InputError, SingularityError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


def main() -> None:
    sys.exit(run_cli())


if __name__ == "__main__":
    main()
