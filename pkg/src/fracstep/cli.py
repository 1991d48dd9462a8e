"""Command-line frontend.

Every library operation is reachable through exactly one subcommand; the
DISPATCH table at the bottom records the mapping and is checked by the
test suite. Output is CSV (RFC-4180 style, header row, LF endings) or
JSON (UTF-8, 17-significant-digit numbers, fixed key order), written to
stdout or to --output. Runs are byte-identical for identical flags and
seed.

Exit codes: 0 success, 2 usage error, 3 numerical-domain error (one-line
``ERROR <code>:`` message on stderr).
"""

from __future__ import annotations

import argparse
import csv
import io
import math
import sys

import numpy as np

from . import harness, operators, plots, solvers, special, symbols, weights
from .errors import FracstepError
from .weights import Scheme


class _UsageError(Exception):
    pass


# ---------------------------------------------------------------------------
# serialization helpers


def _fnum(x) -> str:
    if isinstance(x, (int, np.integer)) and not isinstance(x, bool):
        return str(int(x))
    return format(float(x), ".17g")


def _json_value(obj) -> str:
    if obj is None:
        return "null"
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if isinstance(obj, str):
        return '"' + obj.replace("\\", "\\\\").replace('"', '\\"') + '"'
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _fnum(obj)
    if isinstance(obj, complex):
        return "[" + _fnum(obj.real) + ", " + _fnum(obj.imag) + "]"
    if isinstance(obj, dict):
        items = (f'"{k}": ' + _json_value(v) for k, v in obj.items())
        return "{" + ", ".join(items) + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        return "[" + ", ".join(_json_value(v) for v in obj) + "]"
    raise TypeError(f"cannot serialize {type(obj)}")


def _json_doc(obj) -> str:
    return _json_value(obj) + "\n"


def _csv_doc(header, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([c if isinstance(c, str) else _fnum(c) for c in row])
    return buf.getvalue()


def _emit(args, payload: str) -> None:
    if getattr(args, "output", None):
        with open(args.output, "w", encoding="utf-8", newline="") as fh:
            fh.write(payload)
    else:
        sys.stdout.write(payload)


# ---------------------------------------------------------------------------
# shared flag groups

_SCHEMES = {
    "be": Scheme.BE,
    "bdf2": Scheme.BDF2,
    "l1sub": Scheme.L1_SUB,
    "l1wave": Scheme.L1_WAVE,
    "pcdg": Scheme.PCDG,
    "ee": Scheme.EE,
    "fcn": Scheme.FCN,
}


def _add_common(sub, *, fmt_default: str) -> None:
    sub.add_argument("--format", choices=("csv", "json"), default=fmt_default)
    sub.add_argument("-o", "--output", default=None, help="write to file instead of stdout")


def _add_operator_flags(sub) -> None:
    sub.add_argument(
        "--operator",
        choices=("lap1d", "lap2d", "halflap", "rotlap", "scalar"),
        default="lap1d",
    )
    sub.add_argument("--dim", type=int, default=15, help="interior points per side")
    sub.add_argument("--length", type=float, default=1.0)
    sub.add_argument("--phi", type=float, default=None, help="rotation angle (radians)")
    sub.add_argument("--lambda", dest="lam", default=None, help="scalar eigenvalue")


def _build_operator(args) -> operators.OperatorHandle:
    kind = args.operator
    if kind == "lap1d":
        return operators.dirichlet_laplacian_1d(args.dim, args.length)
    if kind == "lap2d":
        return operators.dirichlet_laplacian_2d(args.dim, args.length)
    if kind == "halflap":
        return operators.fractional_laplacian_half(args.dim, args.length)
    if kind == "rotlap":
        if args.phi is None:
            raise _UsageError("--operator rotlap requires --phi")
        base = operators.dirichlet_laplacian_1d(args.dim, args.length)
        return operators.complex_scaled(base, args.phi)
    if kind == "scalar":
        if args.lam is None:
            raise _UsageError("--operator scalar requires --lambda")
        return operators.scalar_operator(_parse_complex(args.lam))
    raise _UsageError(f"unknown operator {kind}")


def _operator_label(args) -> str:
    kind = args.operator
    if kind == "scalar":
        return f"scalar({args.lam})"
    if kind == "rotlap":
        return f"rotlap(dim={args.dim}, length={_fnum(args.length)}, phi={_fnum(args.phi)})"
    return f"{kind}(dim={args.dim}, length={_fnum(args.length)})"


def _parse_complex(text: str) -> complex:
    try:
        return complex(text.replace(" ", ""))
    except ValueError as exc:
        raise _UsageError(f"--lambda expects a complex literal, got {text!r}") from exc


def _default_direction(op) -> np.ndarray:
    """First sine mode for the grid operators, normalized ones otherwise."""
    if isinstance(op, operators.TridiagonalOperator):
        m = op.dim
        v = np.sin(np.pi * np.arange(1, m + 1) / (m + 1))
        return v / np.linalg.norm(v)
    if isinstance(op, operators.SpectralDiagonalOperator) and isinstance(
        op.basis, operators.SineBasis1D
    ):
        m = op.dim
        v = np.sin(np.pi * np.arange(1, m + 1) / (m + 1))
        return v / np.linalg.norm(v)
    v = np.ones(op.dim)
    return v / np.linalg.norm(v)


def _scheme(args) -> Scheme:
    return _SCHEMES[args.scheme]


def _alpha(args) -> special.FracOrder:
    return special.FracOrder(args.alpha)


def _parse_tau_list(args) -> list[float]:
    if args.tau_list:
        try:
            taus = [float(x) for x in args.tau_list.split(",") if x.strip()]
        except ValueError as exc:
            raise _UsageError(f"--tau-list expects comma-separated floats") from exc
    else:
        taus = [args.tau0 * 0.5**k for k in range(args.tau_levels)]
    if len(taus) < 2:
        raise _UsageError("need at least two step sizes")
    return taus


# ---------------------------------------------------------------------------
# subcommand handlers


def _cmd_weights(args) -> str:
    scheme = _scheme(args)
    alpha = _alpha(args)
    table = {
        Scheme.BE: weights.be_weights,
        Scheme.BDF2: weights.bdf2_weights,
        Scheme.L1_SUB: weights.l1_sub_weights,
        Scheme.L1_WAVE: weights.l1_wave_weights,
        Scheme.PCDG: weights.pcdg_weights,
    }
    if scheme not in table:
        raise _UsageError(f"--scheme {args.scheme} has no weight table")
    tab = table[scheme](alpha, args.n_max)
    if args.format == "json":
        return _json_doc(
            {
                "meta": {"scheme": args.scheme, "alpha": alpha.alpha, "n_max": tab.n_max},
                "rows": [{"j": j, "coeff": c} for j, c in enumerate(tab.coeffs)],
            }
        )
    return _csv_doc(["j", "coeff"], list(enumerate(tab.coeffs)))


def _cmd_symbol(args) -> str:
    scheme = _scheme(args)
    alpha = _alpha(args)
    if scheme is Scheme.PCDG:
        raise _UsageError("--scheme pcdg shares the l1sub symbol; query that instead")
    if args.report == "curve":
        samples = symbols.curve_sample(scheme, alpha, args.tau, args.points)
        if args.figure:
            plots.save_curve_figure(samples, alpha, args.figure)
        rows = [
            (s.theta, s.value.real, s.value.imag, s.modulus, s.argument)
            for s in samples
        ]
        if args.format == "json":
            return _json_doc(
                {
                    "meta": {
                        "scheme": args.scheme,
                        "alpha": alpha.alpha,
                        "tau": args.tau,
                        "xi_sign": samples[0].xi_sign,
                    },
                    "rows": [
                        {
                            "theta": r[0],
                            "re": r[1],
                            "im": r[2],
                            "modulus": r[3],
                            "argument": r[4],
                        }
                        for r in rows
                    ],
                }
            )
        return _csv_doc(["theta", "re", "im", "modulus", "argument"], rows)
    grid = symbols.curve_theta_grid(args.points)
    if args.report == "margin":
        rows = symbols.sector_margin(scheme, alpha, grid)
        if args.format == "json":
            return _json_doc(
                {
                    "meta": {"scheme": args.scheme, "alpha": alpha.alpha},
                    "rows": [{"theta": t, "margin": m} for t, m in rows],
                }
            )
        return _csv_doc(["theta", "margin"], rows)
    # d-factor scan (shares the e^(-i*theta) convention of the piecewise symbols)
    rows = []
    for theta in grid:
        val = symbols.d_factor(alpha, symbols.xi_from_theta(Scheme.L1_SUB, theta))
        rows.append((float(theta), val.real, val.imag))
    if args.format == "json":
        return _json_doc(
            {
                "meta": {"alpha": alpha.alpha},
                "rows": [{"theta": t, "re": re, "im": im} for t, re, im in rows],
            }
        )
    return _csv_doc(["theta", "re", "im"], rows)


def _cmd_stability(args) -> str:
    scheme = _scheme(args)
    alpha = _alpha(args)
    if scheme is Scheme.EE:
        b = symbols.ee_stability_bound(alpha, args.phi)
        doc = {
            "scheme": "ee",
            "alpha": alpha.alpha,
            "phi": args.phi,
            "bound": b.bound,
            "theta_phi": None,
            "rho": None,
            "psi": None,
        }
    elif scheme is Scheme.FCN:
        b = symbols.cn_stability_bound(alpha, args.phi)
        doc = {
            "scheme": "fcn",
            "alpha": alpha.alpha,
            "phi": args.phi,
            "bound": b.bound,
            "theta_phi": b.theta_phi,
            "rho": symbols.cn_rho(alpha, b.theta_phi),
            "psi": symbols.cn_psi(alpha, b.theta_phi),
        }
    else:
        raise _UsageError("--scheme must be ee or fcn for stability bounds")
    if args.format == "csv":
        keys = list(doc)
        return _csv_doc(keys, [tuple("" if doc[k] is None else doc[k] for k in keys)])
    return _json_doc(doc)


def _solve_from_args(args, scheme, alpha, op):
    grid = solvers.TimeGrid(args.tau, args.n_steps)
    f = harness.build_forcing(args.forcing, args.n_steps, op.dim, args.seed)
    v = w = None
    if args.initial_v is not None:
        v = args.initial_v * np.ones(op.dim, dtype=complex)
    if args.initial_w is not None:
        w = args.initial_w * np.ones(op.dim, dtype=complex)
    inp = solvers.SolveInput(scheme, alpha, op, grid, f, initial_v=v, initial_w=w)
    return grid, solvers.solve(inp)


def _cmd_solve(args) -> str:
    scheme = _scheme(args)
    if scheme is Scheme.PCDG:
        raise _UsageError("pcdg stepping coincides with l1sub; run that scheme")
    alpha = _alpha(args)
    op = _build_operator(args)
    grid, res = _solve_from_args(args, scheme, alpha, op)
    n_rows = res.dbar.shape[0]
    if args.full:
        def vecs(arr):
            return [[ [z.real, z.imag] for z in row ] for row in arr]

        return _json_doc(
            {
                "meta": {
                    "scheme": args.scheme,
                    "alpha": alpha.alpha,
                    "operator": _operator_label(args),
                    "tau": args.tau,
                    "n_steps": args.n_steps,
                    "forcing": args.forcing,
                    "seed": args.seed,
                },
                "t": list(grid.times()),
                "u": vecs(res.u),
                "dbar": vecs(res.dbar),
                "au": vecs(res.au),
                "residual_max": res.residual_max,
                "blew_up": res.blew_up,
            }
        )
    rows = []
    for n in range(1, n_rows + 1):
        rows.append(
            (
                n,
                grid.t(n),
                float(np.linalg.norm(res.u[n])),
                float(np.linalg.norm(res.au[n - 1])),
                float(np.linalg.norm(res.dbar[n - 1])),
            )
        )
    if args.format == "json":
        return _json_doc(
            {
                "meta": {
                    "scheme": args.scheme,
                    "alpha": alpha.alpha,
                    "operator": _operator_label(args),
                    "tau": args.tau,
                    "n_steps": args.n_steps,
                    "forcing": args.forcing,
                    "seed": args.seed,
                },
                "rows": [
                    {
                        "n": r[0],
                        "t": r[1],
                        "norm_u": r[2],
                        "norm_au": r[3],
                        "norm_dbar": r[4],
                    }
                    for r in rows
                ],
                "residual_max": res.residual_max,
                "blew_up": res.blew_up,
            }
        )
    return _csv_doc(["n", "t", "norm_u", "norm_au", "norm_dbar"], rows)


def _cmd_converge(args) -> str:
    scheme = _scheme(args)
    alpha = _alpha(args)
    op = _build_operator(args)
    direction = _default_direction(op)
    prob = harness.ManufacturedProblem(
        alpha, args.exponent, direction, op, args.horizon
    )
    taus = _parse_tau_list(args)
    table = harness.convergence_study(scheme, prob, taus, args.p)
    if args.figure:
        plots.save_convergence_figure(table, args.figure)
    if args.format == "csv":
        rows = []
        for i, (tau, err) in enumerate(table.rows):
            order = table.observed_orders[i] if i < len(table.observed_orders) else ""
            rows.append((tau, err, order))
        return _csv_doc(["tau", "error", "order"], rows)
    return _json_doc(
        {
            "meta": {
                "scheme": args.scheme,
                "alpha": alpha.alpha,
                "p": args.p,
                "operator": _operator_label(args),
                "exponent": args.exponent,
                "horizon": args.horizon,
            },
            "rows": [{"tau": t, "error": e} for t, e in table.rows],
            "orders": table.observed_orders,
        }
    )


def _cmd_sweep(args) -> str:
    scheme = _scheme(args)
    alpha = _alpha(args)
    op = _build_operator(args)
    taus = _parse_tau_list(args)
    report = harness.regularity_sweep(
        scheme, alpha, args.p, op, args.forcing, taus, horizon=args.horizon, seed=args.seed
    )
    resolvent_bound = operators.resolvent_norm_scan(
        op, symbols.SectorSpec(alpha.alpha * math.pi / 2.0), n_samples=24
    )
    if args.figure:
        plots.save_sweep_figure(report, args.figure)
    if args.format == "csv":
        return _csv_doc(["tau", "n_steps", "ratio"], report.rows)
    return _json_doc(
        {
            "meta": {
                "scheme": args.scheme,
                "alpha": alpha.alpha,
                "p": args.p,
                "operator": _operator_label(args),
                "seed": args.seed,
                "forcing": args.forcing,
                "resolvent_bound": resolvent_bound,
            },
            "rows": [
                {"tau": t, "n_steps": n, "ratio": r} for t, n, r in report.rows
            ],
            "uniformity": report.uniformity,
        }
    )


def _cmd_decay(args) -> str:
    alpha = _alpha(args)
    op = _build_operator(args)
    v = _default_direction(op)
    grid = solvers.TimeGrid(args.tau, args.n_steps)
    fit = harness.decay_study(alpha, op, v, grid)
    inp = solvers.SolveInput(
        Scheme.BE,
        alpha,
        op,
        grid,
        np.zeros((args.n_steps + 1, op.dim), dtype=complex),
        initial_v=v.astype(complex),
    )
    res = solvers.solve_be_inhomogeneous(inp)
    au_norms = np.linalg.norm(res.au, axis=1)
    t = grid.times()[1:]
    weak_p = 1.0 / alpha.alpha
    weak_norm = solvers.weak_lp_norm(res.au, args.tau, weak_p)
    rows = []
    scalar_lam = op.eigenvalues()[0] if op.dim == 1 else None
    for n in range(1, args.n_steps + 1):
        if scalar_lam is not None:
            ref = abs(scalar_lam) * abs(
                special.ml_e(alpha.alpha, 1.0, float(scalar_lam.real * t[n - 1] ** alpha.alpha))
            )
        else:
            ref = ""
        rows.append((n, t[n - 1], float(np.linalg.norm(res.u[n])), float(au_norms[n - 1]), ref))
    if args.figure:
        plots.save_decay_figure(t, au_norms, fit, args.figure)
    if args.format == "csv":
        return _csv_doc(["n", "t", "norm_u", "norm_au", "reference_au"], rows)
    return _json_doc(
        {
            "meta": {
                "alpha": alpha.alpha,
                "operator": _operator_label(args),
                "tau": args.tau,
                "n_steps": args.n_steps,
            },
            "slope": fit.slope,
            "bound_constant": fit.bound_constant,
            "weak_p": weak_p,
            "weak_norm_au": weak_norm,
        }
    )


def _cmd_probe(args) -> str:
    scheme = _scheme(args)
    if scheme not in (Scheme.EE, Scheme.FCN):
        raise _UsageError("--scheme must be ee or fcn for probes")
    alpha = _alpha(args)
    lam = _parse_complex(args.lam)
    verdict = harness.stability_probe(scheme, alpha, lam, args.tau, args.n_steps)
    doc = {
        "scheme": args.scheme,
        "alpha": alpha.alpha,
        "lambda_re": lam.real,
        "lambda_im": lam.imag,
        "tau": args.tau,
        "n_steps": args.n_steps,
        "classification": verdict.classification,
        "max_norm": verdict.max_norm,
    }
    if args.format == "csv":
        keys = list(doc)
        return _csv_doc(keys, [tuple(doc[k] for k in keys)])
    return _json_doc(doc)


# ---------------------------------------------------------------------------
# parser assembly


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fracstep",
        description="Time-stepping toolkit for fractional evolution equations.",
    )
    subs = parser.add_subparsers(dest="command", required=True)

    p = subs.add_parser("weights", help="emit a coefficient table")
    p.add_argument("--scheme", choices=("be", "bdf2", "l1sub", "l1wave", "pcdg"), required=True)
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("-n", "--n-max", type=int, required=True)
    _add_common(p, fmt_default="csv")
    p.set_defaults(func=_cmd_weights)

    p = subs.add_parser("symbol", help="sample a characteristic symbol")
    p.add_argument("--scheme", choices=("be", "bdf2", "l1sub", "l1wave", "ee", "fcn"), required=True)
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--tau", type=float, default=1.0)
    p.add_argument("--points", type=int, default=256)
    p.add_argument("--report", choices=("curve", "margin", "dfactor"), default="curve")
    p.add_argument("--figure", default=None, help="also render a figure to this path")
    _add_common(p, fmt_default="csv")
    p.set_defaults(func=_cmd_symbol)

    p = subs.add_parser("stability", help="print a step-size bound")
    p.add_argument("--scheme", choices=("ee", "fcn"), required=True)
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--phi", type=float, required=True, help="sector angle (radians)")
    _add_common(p, fmt_default="json")
    p.set_defaults(func=_cmd_stability)

    p = subs.add_parser("solve", help="run one time-stepping solve")
    p.add_argument("--scheme", choices=sorted(_SCHEMES), required=True)
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--tau", type=float, required=True)
    p.add_argument("--n-steps", type=int, required=True)
    p.add_argument("--forcing", choices=("constant", "alternating", "random"), default="constant")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--initial-v", type=float, default=None)
    p.add_argument("--initial-w", type=float, default=None)
    p.add_argument("--full", action="store_true", help="emit full vectors as JSON")
    _add_operator_flags(p)
    _add_common(p, fmt_default="csv")
    p.set_defaults(func=_cmd_solve)

    p = subs.add_parser("converge", help="convergence-order study")
    p.add_argument("--scheme", choices=("be", "bdf2", "l1sub", "l1wave", "ee", "fcn"), required=True)
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--exponent", type=float, default=2.0, help="power of the exact solution")
    p.add_argument("--p", type=float, default=2.0)
    p.add_argument("--horizon", type=float, default=1.0)
    p.add_argument("--tau-list", default=None)
    p.add_argument("--tau0", type=float, default=0.125)
    p.add_argument("--tau-levels", type=int, default=5)
    p.add_argument("--figure", default=None)
    _add_operator_flags(p)
    _add_common(p, fmt_default="json")
    p.set_defaults(func=_cmd_converge)

    p = subs.add_parser("sweep", help="regularity-ratio sweep over a tau ladder")
    p.add_argument("--scheme", choices=("be", "bdf2", "l1sub", "l1wave", "ee", "fcn"), required=True)
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--p", type=float, default=2.0)
    p.add_argument("--forcing", choices=("constant", "alternating", "random"), default="random")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--horizon", type=float, default=1.0)
    p.add_argument("--tau-list", default=None)
    p.add_argument("--tau0", type=float, default=0.25)
    p.add_argument("--tau-levels", type=int, default=7)
    p.add_argument("--figure", default=None)
    _add_operator_flags(p)
    _add_common(p, fmt_default="json")
    p.set_defaults(func=_cmd_sweep)

    p = subs.add_parser("decay", help="decay study for the homogeneous problem")
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--tau", type=float, default=0.01)
    p.add_argument("--n-steps", type=int, default=2000)
    p.add_argument("--figure", default=None)
    _add_operator_flags(p)
    _add_common(p, fmt_default="json")
    p.set_defaults(func=_cmd_decay)

    p = subs.add_parser("probe", help="scalar stability probe")
    p.add_argument("--scheme", choices=("ee", "fcn"), required=True)
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--lambda", dest="lam", required=True)
    p.add_argument("--tau", type=float, required=True)
    p.add_argument("--n-steps", type=int, default=2048)
    _add_common(p, fmt_default="json")
    p.set_defaults(func=_cmd_probe)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code else 0
    try:
        payload = args.func(args)
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    except FracstepError as exc:
        print(f"ERROR {exc.code}: {exc}", file=sys.stderr)
        return 3
    _emit(args, payload)
    return 0


#: operation -> the one subcommand that reaches it (coverage-tested)
DISPATCH = {
    # special functions
    "gamma": "weights",
    "frac_power": "symbol",
    "polylog_circle": "symbol",
    "ml_e": "decay",
    "caputo_power": "converge",
    # weight tables
    "be_weights": "weights",
    "bdf2_weights": "weights",
    "l1_sub_weights": "weights",
    "l1_wave_weights": "weights",
    "pcdg_weights": "weights",
    # symbols and bounds
    "delta": "symbol",
    "shifted_kernel_symbol": "symbol",
    "sector_margin": "symbol",
    "d_factor": "symbol",
    "curve_sample": "symbol",
    "ee_stability_bound": "stability",
    "cn_psi": "stability",
    "cn_rho": "stability",
    "cn_theta_phi": "stability",
    "cn_stability_bound": "stability",
    # operators
    "dirichlet_laplacian_1d": "solve",
    "dirichlet_laplacian_2d": "solve",
    "fractional_laplacian_half": "solve",
    "complex_scaled": "solve",
    "numerical_radius": "sweep",
    "resolvent_norm_scan": "sweep",
    # solvers and norms
    "solve_be": "solve",
    "solve_bdf2": "solve",
    "solve_l1": "solve",
    "solve_ee": "solve",
    "solve_fcn": "solve",
    "solve_be_inhomogeneous": "solve",
    "lp_scaled_norm": "converge",
    "weak_lp_norm": "decay",
    "counting_lp_norm": "sweep",
    # harness experiments
    "manufactured_forcing": "converge",
    "convergence_study": "converge",
    "regularity_sweep": "sweep",
    "decay_study": "decay",
    "stability_probe": "probe",
}


if __name__ == "__main__":
    raise SystemExit(main())
