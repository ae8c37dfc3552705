"""Command-line interface.

Subcommands build probe states, audit them against the moment conditions,
reproduce the overlap/bound/information curves as CSV files with a rendered
PNG figure next to each, and run the acceptance suite. JSON payloads are
schema-validated before they are written. With a fixed --seed all outputs
are bit-identical across runs on the same platform.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .acceptance import run_criteria
from .errors import Su2MetroError
from .groups import build_group, trivial_irrep
from .measurement import (classical_fim, kl_moment_observables, kl_scheme,
                          moments_matrix, parity_observables)
from .metrology import check_conditions, qfim, scalar_crb_curve
from .probes import (compass_state, compass_trivial_overlap_scan,
                     fine_tune_invariant, ghz_state, maximally_entangled_probe,
                     s3_prism_state, tetrahedral_state)
from .spinrep import STATE_SCHEMA, build_spin_rep, state_from_dict, state_to_dict
from . import su4 as su4mod
from .wigner import spin_wigner

REPORT_SCHEMA = {
    "type": "object",
    "properties": {
        "first_moments": {"type": "array", "items": {"type": "number"}},
        "cross_moments": {"type": "array"},
        "variances": {"type": "array", "items": {"type": "number"}},
        "target_variance": {"type": "number"},
        "max_residual": {"type": "number"},
        "weak_commutativity": {"type": "number"},
    },
    "required": ["first_moments", "variances", "target_variance", "max_residual"],
}


def _validate(payload: dict, schema: dict) -> dict:
    import jsonschema
    jsonschema.validate(payload, schema)
    return payload


def _write_json(path, payload: dict, schema: dict | None = None):
    if schema is not None:
        _validate(payload, schema)
    text = json.dumps(payload, indent=2, sort_keys=True)
    if path is None:
        print(text)
    else:
        Path(path).write_text(text + "\n")


def _write_csv(path, header, rows):
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(header)
        writer.writerows(rows)


def _figure_path(out_path) -> Path:
    return Path(out_path).with_suffix(".png")


def _plot_curves(out_path, xs, series: dict, xlabel, ylabel, title):
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    for label, ys in series.items():
        ax.plot(xs, ys, label=label, linewidth=1.6)
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    ax.set_title(title)
    if len(series) > 1:
        ax.legend(frameon=False)
    ax.grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig(_figure_path(out_path), dpi=160)
    plt.close(fig)


def _plot_heatmap(out_path, thetas, phis, values, title):
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
    fig, ax = plt.subplots(figsize=(7.2, 3.8))
    mesh = ax.pcolormesh(phis, thetas, values, shading="auto", cmap="RdBu_r")
    fig.colorbar(mesh, ax=ax, label="W")
    ax.set_xlabel("phi [rad]")
    ax.set_ylabel("theta [rad]")
    ax.set_title(title)
    fig.tight_layout()
    fig.savefig(_figure_path(out_path), dpi=160)
    plt.close(fig)


def _load_state(path):
    with open(path) as handle:
        payload = json.load(handle)
    _validate(payload, STATE_SCHEMA)
    return state_from_dict(payload)


def _parse_vector(text, length=3):
    parts = [float(p) for p in text.split(",")]
    if len(parts) != length:
        raise argparse.ArgumentTypeError(f"expected {length} comma-separated values")
    return np.array(parts)


# --- subcommand handlers -----------------------------------------------------

def cmd_probe(args) -> int:
    rep = build_spin_rep(args.two_j)
    if args.kind == "ghz":
        state = ghz_state(rep, args.axis)
    elif args.kind == "compass":
        deltas = _parse_vector(args.deltas) if args.deltas else np.zeros(3)
        state = compass_state(rep, deltas)
    elif args.kind == "tetrahedral":
        state = tetrahedral_state(rep)
    elif args.kind == "s3-prism":
        state = s3_prism_state(rep, args.xi)
    elif args.kind == "s3-finetuned":
        result = fine_tune_invariant(build_group("s3", rep), rng=args.seed)
        state = result.state
        if result.flagged:
            print(f"note: best residual {result.residual:.3e} stays above "
                  "the optimality threshold (multiplicity too small)",
                  file=sys.stderr)
    else:
        state = maximally_entangled_probe(rep)
    payload = _validate(state_to_dict(state), STATE_SCHEMA)
    if args.out:
        _write_json(args.out, payload, STATE_SCHEMA)
    report = check_conditions(state).to_dict()
    _write_json(None, {"state_file": args.out, "conditions": report})
    return 0


def cmd_check(args) -> int:
    state = _load_state(args.state)
    report = check_conditions(state).to_dict()
    _write_json(None, _validate(report, REPORT_SCHEMA))
    return 0


def cmd_group_info(args) -> int:
    rep = build_spin_rep(args.two_j)
    group = build_group(args.group, rep)
    data = trivial_irrep(group)
    payload = {
        "group": args.group,
        "two_j": args.two_j,
        "order": group.order,
        "multiplicity": data.multiplicity,
        "basis": [[[float(a.real), float(a.imag)] for a in vec]
                  for vec in data.basis],
    }
    _write_json(args.out, payload)
    return 0


def cmd_crb_curve(args) -> int:
    state = _load_state(args.state)
    direction = _parse_vector(args.direction)
    ts = np.linspace(0.0, args.tmax, args.points)
    points = scalar_crb_curve(state, direction, ts)
    rows = [(f"{p.t:.12g}", f"{p.trace_inv:.12g}", f"{p.min_eigenvalue:.12g}",
             int(p.singular)) for p in points]
    _write_csv(args.out, ["t", "trace_inv_qfim", "min_eig", "is_singular"], rows)
    if not args.no_plot:
        good = [p for p in points if not p.singular]
        _plot_curves(args.out, [p.t for p in good],
                     {"tr F(t dir)^-1": [p.trace_inv for p in good]},
                     "t", "tr F^-1", "scalar bound curve")
    print(f"wrote {args.out}")
    return 0


def cmd_cfi_curve(args) -> int:
    state = _load_state(args.state)
    direction = _parse_vector(args.direction)
    direction = direction / np.linalg.norm(direction)
    ts = np.linspace(args.tmin, args.tmax, args.points)
    scheme = kl_scheme(state)
    if args.scheme == "kl":
        obs = kl_moment_observables(scheme)
    else:
        obs = parity_observables(state.rep)
    rows, cfi_tr, mom_tr, q_tr = [], [], [], []
    for t in ts:
        theta = t * direction
        if args.scheme == "kl":
            cfi = classical_fim(scheme, state, theta)
        else:
            cfi = classical_fim(obs, state, theta)
        mm = moments_matrix(obs, state, theta)
        f = qfim(state, theta)
        cfi_tr.append(np.trace(cfi))
        mom_tr.append(np.trace(mm.matrix))
        q_tr.append(np.trace(f.matrix))
        rows.append((f"{t:.12g}", f"{cfi_tr[-1]:.12g}", f"{mom_tr[-1]:.12g}",
                     f"{q_tr[-1]:.12g}"))
    _write_csv(args.out, ["t", "cfi_trace", "moments_trace", "qfim_trace"], rows)
    if not args.no_plot:
        _plot_curves(args.out, ts, {"tr CFI": cfi_tr, "tr M": mom_tr,
                                    "tr F": q_tr},
                     "t", "trace", f"information traces ({args.scheme} list)")
    print(f"wrote {args.out}")
    return 0


def cmd_compass_scan(args) -> int:
    ns = range(4, args.nmax + 1, 2)
    rows = compass_trivial_overlap_scan(ns, optimize_deltas=args.optimize_deltas)
    _write_csv(args.out, ["n", "overlap"],
               [(n, f"{overlap:.12g}") for n, overlap in rows])
    if not args.no_plot:
        _plot_curves(args.out, [n for n, _ in rows],
                     {"invariant weight": [o for _, o in rows]},
                     "N", "overlap", "compass weight in the invariant subspace")
    print(f"wrote {args.out}")
    return 0


def cmd_su4_check(args) -> int:
    problem = su4mod.build_su4_problem()
    if args.probe == "entangled":
        vec = su4mod.entangled_probe()
    else:
        vec = su4mod.twirled_probe(problem, seed=args.seed)
    report = su4mod.su4_conditions(problem, vec)
    f = su4mod.su4_qfim(problem, vec)
    payload = {
        "symmetry_defects": su4mod.symmetry_defects(problem),
        "group_order_defining": problem.group.order,
        "group_order_two_copy": su4mod.two_copy_group(problem).order,
        "trivial_multiplicities": su4mod.trivial_multiplicities(problem),
        "probe": args.probe,
        "conditions": report.to_dict(),
        "qfim": f.matrix.tolist(),
        "circulant_defect": su4mod.circulant_pattern_defect(f.matrix),
    }
    _write_json(args.out, payload)
    return 0


def cmd_wigner(args) -> int:
    state = _load_state(args.state)
    grid = spin_wigner(state, n_theta=args.ntheta, n_phi=args.nphi)
    rows = []
    for i, theta in enumerate(grid.thetas):
        for j, phi in enumerate(grid.phis):
            rows.append((f"{theta:.12g}", f"{phi:.12g}", f"{grid.values[i, j]:.12g}"))
    _write_csv(args.out, ["theta", "phi", "w"], rows)
    if not args.no_plot:
        _plot_heatmap(args.out, grid.thetas, grid.phis, grid.values,
                      f"sphere quasiprobability (2J = {grid.two_j})")
    print(f"wrote {args.out}")
    return 0


def cmd_verify_all(args) -> int:
    numbers = None
    if args.only:
        numbers = [int(p) for p in args.only.split(",")]
    results = run_criteria(numbers, stream=print)
    failed = [r for r in results if not r.passed]
    if failed:
        names = ", ".join(str(r.number) for r in failed)
        print(f"FAILED criteria: {names}")
        return 1
    print(f"all {len(results)} criteria passed")
    return 0


# --- parser ------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="su2metro",
        description="Symmetry-built probe states and Fisher-information "
                    "analysis for multiparameter rotation estimation.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("probe", help="construct a named probe state")
    p.add_argument("--kind", required=True,
                   choices=["ghz", "compass", "tetrahedral", "s3-prism",
                            "s3-finetuned", "entangled"])
    p.add_argument("--two-j", dest="two_j", type=int, required=True)
    p.add_argument("--axis", default="z", choices=["x", "y", "z"])
    p.add_argument("--xi", type=float, default=math.acos(1 / math.sqrt(3)))
    p.add_argument("--deltas", default=None, help="comma-separated phases a,b,c")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None, help="write the state JSON here")
    p.set_defaults(func=cmd_probe)

    p = sub.add_parser("check", help="audit a state against the moment conditions")
    p.add_argument("--state", required=True)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("group-info", help="order, multiplicity and invariant basis")
    p.add_argument("--group", required=True, choices=["a4", "s3"])
    p.add_argument("--two-j", dest="two_j", type=int, required=True)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_group_info)

    p = sub.add_parser("crb-curve", help="scalar bound along a parameter ray")
    p.add_argument("--state", required=True)
    p.add_argument("--direction", default="1,1,1")
    p.add_argument("--tmax", type=float, default=3.1)
    p.add_argument("--points", type=int, default=200)
    p.add_argument("--out", required=True)
    p.add_argument("--no-plot", action="store_true")
    p.set_defaults(func=cmd_crb_curve)

    p = sub.add_parser("cfi-curve", help="information traces along a ray")
    p.add_argument("--state", required=True)
    p.add_argument("--scheme", default="kl", choices=["kl", "parity"])
    p.add_argument("--direction", default="1,1,1")
    p.add_argument("--tmin", type=float, default=1e-3)
    p.add_argument("--tmax", type=float, default=0.8)
    p.add_argument("--points", type=int, default=100)
    p.add_argument("--out", required=True)
    p.add_argument("--no-plot", action="store_true")
    p.set_defaults(func=cmd_cfi_curve)

    p = sub.add_parser("compass-scan", help="invariant weight of compass states")
    p.add_argument("--nmax", type=int, default=32)
    p.add_argument("--optimize-deltas", action="store_true")
    p.add_argument("--out", required=True)
    p.add_argument("--no-plot", action="store_true")
    p.set_defaults(func=cmd_compass_scan)

    p = sub.add_parser("su4-check", help="four-parameter problem report")
    p.add_argument("--probe", default="entangled", choices=["entangled", "twirled"])
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_su4_check)

    p = sub.add_parser("wigner", help="sphere quasiprobability grid")
    p.add_argument("--state", required=True)
    p.add_argument("--ntheta", type=int, default=181)
    p.add_argument("--nphi", type=int, default=360)
    p.add_argument("--out", required=True)
    p.add_argument("--no-plot", action="store_true")
    p.set_defaults(func=cmd_wigner)

    p = sub.add_parser("verify-all", help="run the acceptance suite")
    p.add_argument("--only", default=None,
                   help="comma-separated criterion numbers to run")
    p.set_defaults(func=cmd_verify_all)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except Su2MetroError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
