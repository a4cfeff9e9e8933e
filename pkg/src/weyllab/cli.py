"""Command-line interface.

Output contract: JSON (default) or CSV with a header row, floats printed
with 12 significant digits, stable snake_case keys, byte-identical for a
given configuration regardless of thread count.  Figures are opt-in via
--plot PATH and are written alongside the normal data output.

Exit codes: 0 success, 1 domain error, 2 budget/precision error, 64 usage.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import time

import numpy as np

from . import analytic, approx, circle, counting, diophantine, extremal, manifold
from .errors import DomainError, ResourceError

ENV_THREADS = "WEYLLAB_THREADS"


# ---------------------------------------------------------------------------
# formatting
# ---------------------------------------------------------------------------


def _fmt(v) -> str:
    """Scalar to text; floats at 12 significant digits."""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return f"{float(v):.12g}"
    return str(v)


def _json_value(v) -> str:
    if v is None:
        return "null"
    if isinstance(v, str):
        return json.dumps(v)
    if isinstance(v, (list, tuple, np.ndarray)):
        return "[" + ", ".join(_json_value(x) for x in v) + "]"
    if isinstance(v, dict):
        return _json_object(v)
    return _fmt(v)


def _json_object(d: dict) -> str:
    parts = [f"{json.dumps(k)}: {_json_value(v)}" for k, v in d.items()]
    return "{" + ", ".join(parts) + "}"


def _csv_lines(header, rows) -> str:
    out = [",".join(header)]
    for row in rows:
        out.append(",".join(_fmt(v) for v in row))
    return "\n".join(out) + "\n"


def _emit(args, fields: dict, header=None, rows=None) -> None:
    """Write JSON fields or CSV rows to stdout / --output."""
    if args.format == "csv":
        if rows is None:
            header = list(fields.keys())
            rows = [tuple(fields.values())]
        text = _csv_lines(header, rows)
    else:
        text = _json_object(fields) + "\n"
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------------------
# argument plumbing
# ---------------------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # usage errors exit 64, not argparse's 2
        self.print_usage(sys.stderr)
        self.exit(64, f"{self.prog}: error: {message}\n")


def _add_common(sp):
    sp.add_argument("--format", choices=("json", "csv"), default=None)
    sp.add_argument("--output", default=None, help="write output to a file")
    sp.add_argument("--plot", default=None, help="render a figure to this path")
    sp.add_argument("--config", default=None, help="JSON file with defaults; flags override")
    sp.add_argument("--threads", default=None,
                    help=f"worker threads, integer or 'auto' (default ${ENV_THREADS} or 1)")


def _add_manifold(sp):
    sp.add_argument("--ell", type=int, default=None)
    sp.add_argument("--r", type=int, nargs="+", default=None)


def _merge_config(args) -> None:
    """Fill unset flags from the --config JSON file."""
    if not args.config:
        return
    with open(args.config) as fh:
        cfg = json.load(fh)
    for key, val in cfg.items():
        attr = key.replace("-", "_")
        if hasattr(args, attr) and getattr(args, attr) is None:
            setattr(args, attr, val)


def _threads(args) -> int:
    raw = args.threads if args.threads is not None else os.environ.get(ENV_THREADS, "1")
    if str(raw) == "auto":
        return os.cpu_count() or 1
    n = int(raw)
    if n < 1:
        raise DomainError(f"threads must be >= 1, got {n}")
    return n


def _params(args) -> manifold.ManifoldParams:
    ell = args.ell if args.ell is not None else 1
    r = args.r if args.r is not None else [1] * ell
    return manifold.validate_params(ell, r)


def _need(args, name):
    val = getattr(args, name)
    if val is None:
        raise DomainError(f"--{name.replace('_', '-')} is required")
    return val


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------


def _cmd_count(args) -> None:
    p = _params(args)
    t = float(_need(args, "t"))
    lattice = args.torus_lattice or "standard"
    res = counting.count_spectrum(p, t, threads=_threads(args), torus_lattice=lattice)
    _emit(args, {
        "t": res.t, "N": res.n_of_t, "main": res.main_term,
        "R": res.remainder, "normalized": res.normalized,
    })
    if args.plot:
        from . import plotting

        jumps, cum = counting.spectral_jumps(p, t)
        mains = counting.weyl_coefficient(p) * np.maximum(jumps, 0.0) ** (p.ell + 0.5)
        plotting.plot_counts(jumps, cum, mains, args.plot, p.ell)


def _cmd_weyl_error(args) -> None:
    p = _params(args)
    t = float(_need(args, "t"))
    res = counting.count_spectrum(p, t, threads=_threads(args))
    u = math.sqrt(t / (2.0 * math.pi))
    _emit(args, {
        "t": res.t, "u": u, "R": res.remainder,
        "E": counting.error_normalizer(p) * res.remainder,
        "normalized": res.normalized,
    })


def _cmd_mean_square(args) -> None:
    p = _params(args)
    rep = counting.mean_square(p, float(_need(args, "t_max")), int(args.grid or 100))
    rows = list(zip(rep.t_grid, rep.integral_values, rep.local_slopes))
    _emit(args, {
        "ell": p.ell, "r": list(p.r), "t_max": float(args.t_max),
        "grid": int(args.grid or 100),
        "fitted_slope": rep.fitted_slope,
        "fitted_log_constant": rep.fitted_log_constant,
    }, header=["T", "integral", "local_slope"], rows=rows)
    if args.plot:
        from . import plotting

        plotting.plot_mean_square(rep, args.plot)


def _cmd_vaaler_check(args) -> None:
    H = int(args.H or 25)
    grid = int(args.grid or 10000)
    coeffs = approx.vaaler_coeffs(H)
    w = np.arange(grid) / grid
    slack = approx.vaaler_slack(w, coeffs)
    _emit(args, {
        "H": H, "grid": grid,
        "min_slack": float(slack.min()), "max_slack": float(slack.max()),
        "violations": int(np.sum(slack < -1e-12)),
    })
    if args.plot:
        from . import plotting

        plotting.plot_vaaler(w, slack, H, args.plot)


def _cmd_estar_compare(args) -> None:
    p = _params(args)
    cmp = approx.estar_compare(
        p, float(args.u_min or 50.0), float(args.u_max or 500.0),
        int(args.samples or 200), threads=_threads(args),
    )
    rows = list(zip(cmp.u_values, cmp.e_values, cmp.estar_values,
                    cmp.e_values - cmp.estar_values, cmp.residuals))
    _emit(args, {
        "ell": p.ell, "u_min": float(args.u_min or 50.0),
        "u_max": float(args.u_max or 500.0), "samples": int(args.samples or 200),
        "exponent": cmp.exponent, "exponent_bound": cmp.exponent_bound,
        "within_bound": cmp.within_bound,
        "secular_c0": cmp.secular_c0, "secular_c1": cmp.secular_c1,
    }, header=["u", "E", "Estar", "diff", "residual"], rows=rows)
    if args.plot:
        from . import plotting

        plotting.plot_estar_compare(cmp, args.plot)


def _cmd_theta(args) -> None:
    ell = args.ell if args.ell is not None else 1
    if args.n is not None:
        _emit(args, {"ell": ell, "n": int(args.n),
                     "theta": analytic.theta_coeff(ell, int(args.n))})
        return
    limit = int(_need(args, "limit"))
    table = analytic.theta_table(ell, limit, threads=_threads(args))
    rows = [(n, table.values[n]) for n in range(1, limit + 1)]
    _emit(args, {
        "ell": ell, "limit": limit,
        "nonzero": int(np.sum(table.values > 0)),
        "max_value": float(table.values.max()),
    }, header=["n", "theta"], rows=rows)
    if args.plot:
        from . import plotting

        plotting.plot_theta(table, args.plot)


def _cmd_expsum_check(args) -> None:
    ell = args.ell if args.ell is not None else 1
    j = int(args.j or 0)
    h = int(_need(args, "h"))
    u = float(_need(args, "u"))
    U = float(args.U) if args.U is not None else None
    direct = analytic.exp_sum_direct(j, h, u, ell, U)
    trans = analytic.exp_sum_transformed(j, h, u, ell, U)
    gap = abs(direct - trans)
    bound = analytic.transform_gap_bound(j, h, u, ell)
    _emit(args, {
        "ell": ell, "j": j, "h": h, "u": u,
        "direct_re": direct.real, "direct_im": direct.imag,
        "transformed_re": trans.real, "transformed_im": trans.imag,
        "gap": gap, "bound": bound, "ratio": gap / bound,
    })
    if args.dump_terms:
        trig = analytic.build_trig_sum(U if U is not None else u, ell)
        rows = list(analytic.term_rows(trig, u))
        with open(args.dump_terms, "w") as fh:
            fh.write(_csv_lines(["h", "k", "n", "amplitude", "phase"], rows))


def _cmd_fejer_check(args) -> None:
    T = float(args.T or 50.0)
    Q = float(_need(args, "Q"))
    delta = float(args.delta or 0.0)
    res = analytic.fejer_identity_check(T, Q, delta)
    _emit(args, {
        "T": T, "Q": Q, "delta": delta,
        "numeric_re": res.numeric.real, "numeric_im": res.numeric.imag,
        "closed_re": res.closed.real, "closed_im": res.closed.imag,
        "gap": res.gap, "gap_times_Q": res.gap * Q,
    })


def _cmd_squarefree(args) -> None:
    Q = int(_need(args, "Q"))
    vals = diophantine.squarefree_up_to(Q)
    _emit(args, {"Q": Q, "count": len(vals), "values": [int(v) for v in vals]},
          header=["q"], rows=[(int(v),) for v in vals])


def _cmd_kronecker_search(args) -> None:
    T = float(_need(args, "T"))
    eps0 = float(args.eps0 if args.eps0 is not None else 0.1)
    target = diophantine.KroneckerTarget.for_threshold(T, eps0)
    u_min = int(args.u_min or 1)
    u_max = int(_need(args, "u_max"))
    start = time.perf_counter()
    U = diophantine.kronecker_search(target, u_min, u_max, threads=_threads(args))
    elapsed = time.perf_counter() - start
    dists = target.distances(U) if U is not None else np.array([])
    print(f"search took {elapsed:.3f} s over [{u_min}, {u_max}]", file=sys.stderr)
    fields = {
        "T": T, "epsilon0": eps0, "s": target.s,
        "U": int(U) if U is not None else None,
        "max_distance": float(dists.max()) if U is not None else None,
    }
    rows = [(q, d) for q, d in zip(target.qs, dists)] if U is not None else []
    _emit(args, fields, header=["q", "distance"], rows=rows)


def _cmd_besicovitch(args) -> None:
    if args.qs:
        qs = [int(q) for q in args.qs]
    else:
        qs = [int(q) for q in diophantine.squarefree_up_to(int(_need(args, "Q")))]
    cert = diophantine.besicovitch_check(qs, int(args.h_max or 2))
    _emit(args, {
        "s": len(qs), "h_max": int(args.h_max or 2),
        "min_dist": cert.min_dist, "witness": list(cert.witness),
    })


def _cmd_search_exceptional(args) -> None:
    p = _params(args)
    rep = extremal.run_pipeline(
        p, float(_need(args, "T")),
        float(args.eps0 if args.eps0 is not None else 0.1),
        int(args.budget or 10 ** 6), grid=int(args.grid or 2001),
        threads=_threads(args),
    )
    _emit(args, {
        "ell": p.ell, "r": list(p.r),
        "T": rep.T, "U": rep.U, "u_star": rep.u_star,
        "S_at_u_star": rep.S_at_u_star, "I_value": rep.I_value,
        "t_star": rep.t_star, "R_at_t_star": rep.R_at_t_star,
        "normalized_R": rep.normalized_R, "omega_value": rep.omega_value,
        "theta_sum_lower": rep.theta_sum_lower, "r_exact": rep.r_exact,
    })
    if args.trace:
        with open(args.trace, "w") as fh:
            fh.write(_csv_lines(["u", "S"], zip(rep.u_grid, rep.s_trace)))
    if args.plot:
        from . import plotting

        plotting.plot_s_trace(rep, args.plot)


def _cmd_circle(args) -> None:
    sample = circle.circle_count(float(_need(args, "x")))
    _emit(args, {"x": sample.x, "count": sample.count, "P": sample.p_value},
          header=["x", "count", "P"],
          rows=[(sample.x, sample.count, sample.p_value)])


def _cmd_circle_mean_square(args) -> None:
    rep = circle.cramer_mean_square(float(_need(args, "xmax")), int(args.grid or 100))
    rows = list(zip(rep.x_grid, rep.integral_values, rep.local_slopes))
    _emit(args, {
        "x_max": float(args.xmax), "grid": int(args.grid or 100),
        "slope": rep.slope, "log_constant": rep.log_constant,
    }, header=["X", "integral", "local_slope"], rows=rows)
    if args.plot:
        from . import plotting

        plotting.plot_cramer(rep, args.plot)


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


def build_parser() -> _Parser:
    parser = _Parser(prog="weyllab",
                     description="Weyl-law remainder laboratory for rational "
                                 "Heisenberg manifolds")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, fn, configure):
        sp = sub.add_parser(name)
        configure(sp)
        _add_common(sp)
        sp.set_defaults(fn=fn)

    def c_count(sp):
        _add_manifold(sp)
        sp.add_argument("--t", type=float, default=None)
        sp.add_argument("--torus-lattice", choices=("standard", "dual"), default=None)

    add("count", _cmd_count, c_count)

    def c_weyl(sp):
        _add_manifold(sp)
        sp.add_argument("--t", type=float, default=None)

    add("weyl-error", _cmd_weyl_error, c_weyl)

    def c_ms(sp):
        _add_manifold(sp)
        sp.add_argument("--t-max", type=float, default=None)
        sp.add_argument("--grid", type=int, default=None)

    add("mean-square", _cmd_mean_square, c_ms)

    def c_vaaler(sp):
        sp.add_argument("--H", type=int, default=None)
        sp.add_argument("--grid", type=int, default=None)

    add("vaaler-check", _cmd_vaaler_check, c_vaaler)

    def c_estar(sp):
        _add_manifold(sp)
        sp.add_argument("--u-min", type=float, default=None)
        sp.add_argument("--u-max", type=float, default=None)
        sp.add_argument("--samples", type=int, default=None)

    add("estar-compare", _cmd_estar_compare, c_estar)

    def c_theta(sp):
        sp.add_argument("--ell", type=int, default=None)
        sp.add_argument("--n", type=int, default=None)
        sp.add_argument("--limit", type=int, default=None)

    add("theta", _cmd_theta, c_theta)

    def c_expsum(sp):
        sp.add_argument("--ell", type=int, default=None)
        sp.add_argument("--j", type=int, default=None)
        sp.add_argument("--h", type=int, default=None)
        sp.add_argument("--u", type=float, default=None)
        sp.add_argument("--U", type=float, default=None)
        sp.add_argument("--dump-terms", default=None)

    add("expsum-check", _cmd_expsum_check, c_expsum)

    def c_fejer(sp):
        sp.add_argument("--T", type=float, default=None)
        sp.add_argument("--Q", type=float, default=None)
        sp.add_argument("--delta", type=float, default=None)

    add("fejer-check", _cmd_fejer_check, c_fejer)

    def c_sqfree(sp):
        sp.add_argument("--Q", type=int, default=None)

    add("squarefree", _cmd_squarefree, c_sqfree)

    def c_kron(sp):
        sp.add_argument("--T", type=float, default=None)
        sp.add_argument("--eps0", type=float, default=None)
        sp.add_argument("--u-min", type=int, default=None)
        sp.add_argument("--u-max", type=int, default=None)

    add("kronecker-search", _cmd_kronecker_search, c_kron)

    def c_besi(sp):
        sp.add_argument("--Q", type=int, default=None)
        sp.add_argument("--qs", type=int, nargs="+", default=None)
        sp.add_argument("--h-max", type=int, default=None)

    add("besicovitch", _cmd_besicovitch, c_besi)

    def c_exc(sp):
        _add_manifold(sp)
        sp.add_argument("--T", type=float, default=None)
        sp.add_argument("--eps0", type=float, default=None)
        sp.add_argument("--budget", type=int, default=None)
        sp.add_argument("--grid", type=int, default=None)
        sp.add_argument("--trace", default=None, help="CSV trace of S over the u-grid")

    add("search-exceptional", _cmd_search_exceptional, c_exc)

    def c_circle(sp):
        sp.add_argument("--x", type=float, default=None)

    add("circle", _cmd_circle, c_circle)

    def c_cms(sp):
        sp.add_argument("--xmax", type=float, default=None)
        sp.add_argument("--grid", type=int, default=None)

    add("circle-meansquare", _cmd_circle_mean_square, c_cms)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        _merge_config(args)
        if args.format is None:
            args.format = "json"
        args.fn(args)
    except DomainError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    except ResourceError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
