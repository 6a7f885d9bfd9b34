"""Command-line experiment runner.

Subcommands: gauss, sigma-check, energy, norms, sweep.  All randomness
flows from the single --seed flag; reports echo the resolved config so a
file is self-describing.  Exit codes: 0 all pass, 1 fail verdicts present,
2 configuration error.
"""

from __future__ import annotations

import argparse
import os
import sys

import numpy as np

from . import __version__
from .characters import CharacterTable, gauss_sum_closed_form, quadratic_exponential_sum
from .energy import run_energy_sweep, second_moment_decomposition
from .field import field_from_string, make_field, odd_prime_powers, parse_prime_power
from .fourier import extend, l2_identity_check, ones_on, sigma_inverse_closed_form_grid
from .geometry import ENUM_CAP, Paraboloid, build_isotropic_subspace, necessary_condition_sides, sample_subset
from .norms import (
    bochner_riesz_kernel,
    endpoint_sweep,
    family_admits,
    kernel_transform_identity_error,
    loglog_slope,
    random_grid_function,
    random_surface_function,
    ratio,
    stein_tomas_checks,
)
from .reports import Report

TOOL = f"parabext {__version__}"


def _q_list(text: str) -> list[tuple[int, int]]:
    try:
        return [parse_prime_power(tok.strip()) for tok in text.split(",") if tok.strip()]
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


class ConfigError(Exception):
    pass


def _check_cap(p: int, l: int, d: int, cap: int = ENUM_CAP) -> None:
    q = p**l
    if q**d > cap:
        raise ConfigError(f"q^d = {q**d} exceeds the enumeration cap {cap} for q={q}, d={d}")


def _out_path(args) -> str | None:
    if args.out is None:
        return None
    outdir = os.environ.get("PARABEXT_OUTDIR", "")
    return os.path.join(outdir, args.out) if outdir else args.out


def _moduli(fields) -> dict[str, list[int]]:
    return {str(f.q): list(f.modulus) for f in fields}


# ---------------------------------------------------------------------------


def cmd_gauss(args) -> Report:
    pairs = _q_list(args.q) if args.q else [parse_prime_power(q) for q in odd_prime_powers(121)]
    fields = [make_field(p, l) for p, l in pairs]
    report = Report(TOOL, {"cmd": "gauss", "q": [f.q for f in fields], "tol": args.tol}, _moduli(fields))
    for f in fields:
        table = CharacterTable(f)
        direct = table.gauss_sum(1)
        closed = gauss_sum_closed_form(f)
        diff = abs(direct - closed)
        report.add_row(
            q=f.q,
            direct=direct,
            closed_form=closed,
            abs_diff=diff,
            verdict="pass" if diff < args.tol else "fail",
        )
    return report


def cmd_sigma_check(args) -> Report:
    pairs = _q_list(args.q)
    report = Report(
        TOOL,
        {"cmd": "sigma-check", "q": [p**l for p, l in pairs], "d": args.d, "tol": args.tol},
        _moduli([make_field(p, l) for p, l in pairs]),
    )
    for p, l in pairs:
        _check_cap(p, l, args.d)
        field = make_field(p, l)
        variety = Paraboloid(field, args.d)
        direct = extend(ones_on(variety)).values
        closed = sigma_inverse_closed_form_grid(variety).values
        diffs = np.abs(direct - closed)
        for m_index in range(diffs.size):
            report.add_row(
                q=field.q,
                d=args.d,
                m_index=m_index,
                closed=complex(closed[m_index]),
                direct=complex(direct[m_index]),
                abs_diff=float(diffs[m_index]),
                verdict="pass" if diffs[m_index] < args.tol else "fail",
            )
    return report


def cmd_energy(args) -> Report:
    pairs = _q_list(args.q)
    fields = [make_field(p, l) for p, l in pairs]
    config = {
        "cmd": "energy",
        "q": [f.q for f in fields],
        "d": args.d,
        "parity": args.parity,
        "samples": args.samples,
        "seed": args.seed,
        "size_cap": args.size_cap,
        "c_desk": args.c_desk,
        "densities": args.densities,
    }
    report = Report(TOOL, config, _moduli(fields))
    densities = [float(tok) for tok in args.densities.split(",")] if args.densities else None
    for field in fields:
        rows = run_energy_sweep(
            field,
            args.d,
            samples=args.samples,
            seed=args.seed,
            parity=args.parity,
            size_cap=args.size_cap,
            densities=densities,
        )
        for row in rows:
            verdict = "pass" if row["ratio"] <= args.c_desk else "fail"
            if not row["precondition_ok"]:
                verdict = "warn"
            report.add_row(
                q=row["q"],
                d=row["d"],
                size=row["size"],
                energy=row["energy"],
                bound=row["bound"],
                ratio=row["ratio"],
                branch=row["branch"],
                family=row["family"],
                verdict=verdict,
                warning=row["warning"],
            )
    return report


def cmd_norms(args) -> Report:
    pairs = _q_list(args.q_list)
    fields = [make_field(p, l) for p, l in pairs]
    config = {
        "cmd": "norms",
        "theorem": args.theorem,
        "q": [f.q for f in fields],
        "d": args.d,
        "budget": args.budget,
        "seed": args.seed,
        "delta": args.delta,
    }
    report = Report(TOOL, config, _moduli(fields))
    for field in fields:
        ok, why = family_admits(args.theorem, field, args.d)
        if not ok:
            raise ConfigError(why)
        _check_cap(field.p, field.l, args.d)
    rows = endpoint_sweep(args.theorem, fields, args.d, budget=args.budget, seed=args.seed, delta=args.delta)
    for row in rows:
        report.add_row(**row, verdict="pass")
    return report


def _sweep_rows(report: Report, field, d: int, seed: int, samples: int, budget: int, c_desk: float) -> None:
    q = field.q
    rng = np.random.default_rng(seed)
    table = CharacterTable(field)

    diff = abs(table.gauss_sum(1) - gauss_sum_closed_form(field))
    report.add_row(check="gauss", q=q, d=d, value=diff, threshold=1e-9,
                   verdict="pass" if diff < 1e-9 else "fail")

    variety = Paraboloid(field, d)
    direct = extend(ones_on(variety)).values
    closed = sigma_inverse_closed_form_grid(variety, table).values
    err = float(np.abs(direct - closed).max())
    report.add_row(check="sigma_closed_form", q=q, d=d, value=err, threshold=1e-8,
                   verdict="pass" if err < 1e-8 else "fail")

    worst = 0.0
    for _ in range(24):
        t = int(rng.integers(1, q))
        beta = rng.integers(0, q, size=d - 1)
        qs = quadratic_exponential_sum(table, t, beta)
        worst = max(worst, abs(qs.direct - qs.closed))
    report.add_row(check="square_completion", q=q, d=d, value=worst, threshold=1e-9,
                   verdict="pass" if worst < 1e-9 else "fail")

    worst = 0.0
    for _ in range(20):
        f = random_surface_function(variety, rng)
        lhs, rhs = l2_identity_check(f)
        worst = max(worst, abs(lhs - rhs) / max(rhs, 1e-30), abs(ratio(f, 2, 2) - np.sqrt(q)))
    report.add_row(check="l2_identity", q=q, d=d, value=worst, threshold=1e-9,
                   verdict="pass" if worst < 1e-9 else "fail")

    rows = run_energy_sweep(field, d, samples=samples, seed=seed)
    max_ratio = max(row["ratio"] for row in rows)
    report.add_row(check="energy_max_ratio", q=q, d=d, value=max_ratio, threshold=c_desk,
                   detail=f"subsets={len(rows)}",
                   verdict="pass" if max_ratio <= c_desk else "fail")

    E = sample_subset(field, d, min(8, q ** (d - 1)), rng)
    xbar = tuple(int(c) for c in E.xbar_rows()[0])
    terms = second_moment_decomposition(E, xbar, table)
    i_err = abs(terms.diag_direct - terms.diag_closed)
    ii_err = abs(terms.offdiag_direct - terms.offdiag_closed)
    report.add_row(check="second_moment", q=q, d=d, value=max(i_err, ii_err), threshold=1e-8,
                   verdict="pass" if max(i_err, ii_err) < 1e-8 else "fail")

    if d % 2 == 0 and d >= 4:
        K = bochner_riesz_kernel(variety)
        err = kernel_transform_identity_error(variety, K)
        report.add_row(check="kernel_identity", q=q, d=d, value=err, threshold=1e-9,
                       verdict="pass" if err < 1e-9 else "fail")
        violations = 0
        for _ in range(20):
            g = random_grid_function(field, d, rng)
            row = stein_tomas_checks(g, K)
            violations += 0 if row["l2_ok"] else 1
        report.add_row(check="kernel_l2_bound", q=q, d=d, value=violations, threshold=0,
                       verdict="pass" if violations == 0 else "fail")

        H = build_isotropic_subspace(field, d)
        if H is not None:
            p0 = 4 * d / (3 * d - 2)
            left, right = necessary_condition_sides(H, p0, 4.0)
            report.add_row(check="subspace_obstruction", q=q, d=d, value=left / right,
                           threshold=None, verdict="pass")


def cmd_sweep(args) -> Report:
    pairs = _q_list(args.q)
    fields = [make_field(p, l) for p, l in pairs]
    config = {
        "cmd": "sweep",
        "q": [f.q for f in fields],
        "d": args.d,
        "seed": args.seed,
        "samples": args.samples,
        "budget": args.budget,
        "c_desk": args.c_desk,
    }
    report = Report(TOOL, config, _moduli(fields))
    for field in fields:
        _check_cap(field.p, field.l, args.d)
        _sweep_rows(report, field, args.d, args.seed, args.samples, args.budget, args.c_desk)

    if args.d % 2 == 0 and args.d >= 4 and all(family_admits("p4", f, args.d)[0] for f in fields):
        rows = endpoint_sweep("p4", fields, args.d, budget=args.budget, seed=args.seed)
        endpoints = [(r["q"], r["estimate"]) for r in rows if r["kind"] == "endpoint"]
        slope = loglog_slope([q for q, _ in endpoints], [v for _, v in endpoints])
        for row in rows:
            report.add_row(check="norms_endpoint", q=row["q"], d=row["d"], value=row["estimate"],
                           detail=f"kind={row['kind']} p={row['p']:.4f} r={row['r']}", verdict="pass")
        report.add_row(check="norms_slope", q=0, d=args.d, value=slope, threshold=0.2,
                       verdict="pass" if slope <= 0.2 else "warn")
    return report


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="parabext", description=__doc__)
    parser.add_argument("--version", action="version", version=TOOL)
    sub = parser.add_subparsers(dest="cmd", required=True)

    def common(sp):
        sp.add_argument("--out", default=None, help="output path (default stdout)")
        sp.add_argument("--format", default="csv", choices=["csv", "json"])
        sp.add_argument("--seed", type=int, default=0)

    sp = sub.add_parser("gauss", help="direct vs closed-form Gauss sums")
    common(sp)
    sp.add_argument("--q", default=None, help="comma list of odd prime powers (default: all q <= 121)")
    sp.add_argument("--tol", type=float, default=1e-9)
    sp.set_defaults(func=cmd_gauss)

    sp = sub.add_parser("sigma-check", help="surface-measure transform closed form vs direct sum")
    common(sp)
    sp.add_argument("--q", required=True)
    sp.add_argument("--d", type=int, required=True)
    sp.add_argument("--tol", type=float, default=1e-8)
    sp.set_defaults(func=cmd_sigma_check)

    sp = sub.add_parser("energy", help="additive-energy bound monitoring")
    common(sp)
    sp.add_argument("--q", required=True)
    sp.add_argument("--d", type=int, required=True)
    sp.add_argument("--parity", default="auto", choices=["auto", "even", "odd"])
    sp.add_argument("--samples", type=int, default=1000)
    sp.add_argument("--size-cap", dest="size_cap", type=int, default=None)
    sp.add_argument("--c-desk", dest="c_desk", type=float, default=16.0)
    sp.add_argument("--densities", default=None,
                    help="comma list of size exponents e; subset sizes are round(q^e)")
    sp.set_defaults(func=cmd_energy)

    sp = sub.add_parser("norms", help="extension-constant estimates at family endpoints")
    common(sp)
    sp.add_argument("--theorem", required=True, choices=["p4", "2r", "odd"])
    sp.add_argument("--q-list", dest="q_list", required=True)
    sp.add_argument("--d", type=int, required=True)
    sp.add_argument("--budget", type=int, default=2000)
    sp.add_argument("--delta", type=float, default=0.1)
    sp.set_defaults(func=cmd_norms)

    sp = sub.add_parser("sweep", help="all verifications over a (q, d) grid")
    common(sp)
    sp.add_argument("--q", required=True)
    sp.add_argument("--d", type=int, required=True)
    sp.add_argument("--samples", type=int, default=200)
    sp.add_argument("--budget", type=int, default=600)
    sp.add_argument("--c-desk", dest="c_desk", type=float, default=16.0)
    sp.set_defaults(func=cmd_sweep)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        report = args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    report.write(_out_path(args), args.format)
    return report.exit_code()


if __name__ == "__main__":
    sys.exit(main())
