"""Command-line front end: `cy lattice|verify|converge|rate <config.json>`.

Exit codes: 0 success, 2 validation error, 3 numerical degeneracy,
4 verification/acceptance failure.
"""

from __future__ import annotations

import argparse
import copy
import csv
import os
import sys
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, CyLatticeError, GeneralPositionError
from .geometry import ChungYaoLattice, deboor_identity_residual
from .poly import MultiPoly, SymmetricForm, homogeneous_indices, vandermonde
from .functions import ExpAffine, PolynomialFunction
from .chungyao import (
    deboor_remainder,
    homogeneous_representation,
    interpolate,
    newton_identity,
    pk_polynomial,
    remainder_sign_flip_deviation,
    techobserv_check,
)
from .convergence import (
    bound_evaluator,
    check_conditions,
    convergence_experiment,
    observed_delta,
    RESULT_COLUMNS,
)
from .config import ExperimentConfig, load_config

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_DEGENERACY = 3
EXIT_FAILURE = 4


def _fmt(value) -> str:
    if isinstance(value, bool):
        return str(int(value))
    if isinstance(value, int):
        return str(value)
    return format(float(value), ".17g")


def _resolve_threads(args, config: ExperimentConfig) -> int:
    env = os.environ.get("CY_THREADS")
    if env:
        return max(1, int(env))
    if args.threads is not None:
        return max(1, args.threads)
    return max(1, config.threads)


def _apply_overrides(config: ExperimentConfig, args) -> ExperimentConfig:
    if getattr(args, "quad_degree", None) is not None:
        config.quad_degree = args.quad_degree
    return config


def _select_s_values(args, config: ExperimentConfig):
    values = [s for s in config.s_values
              if (args.s_min is None or s >= args.s_min)
              and (args.s_max is None or s <= args.s_max)]
    if not values:
        raise ConfigError("the --s-min/--s-max window selects no s values")
    return tuple(values)


# ---------------------------------------------------------------------------
# cy lattice
# ---------------------------------------------------------------------------

def cmd_lattice(args) -> int:
    config = _apply_overrides(load_config(args.config), args)
    s_values = _select_s_values(args, config)
    family = config.family(s_values[0])
    lattice = ChungYaoLattice(family)
    lines = lattice.line_subsets()

    print(f"family: N={family.dimension} d={family.count} degree={family.degree}")
    print(f"certificate: {family.report}")
    print(f"lattice norm: {_fmt(lattice.norm())}")
    print(f"vertices ({len(lattice.vertices)}):")
    for subset, theta in sorted(lattice.vertices.items()):
        coords = ", ".join(_fmt(v) for v in theta)
        print(f"  H={subset}: ({coords})")
    print(f"line subsets ({len(lines)}):")
    for line in lines:
        direction = ", ".join(_fmt(v) for v in line.direction)
        print(f"  K={line.indices}: direction ({direction}), {line.points.shape[0]} points")

    if args.out:
        import json
        payload = {
            "dimension": family.dimension,
            "count": family.count,
            "degree": family.degree,
            "min_det": family.report.min_det,
            "vertices": {str(k): v.tolist() for k, v in lattice.vertices.items()},
            "lines": [
                {"K": list(line.indices), "direction": line.direction.tolist(),
                 "points": line.points.tolist()}
                for line in lines
            ],
        }
        with open(args.out, "w") as handle:
            json.dump(payload, handle, indent=2)
        print(f"wrote {args.out}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# cy verify
# ---------------------------------------------------------------------------

@dataclass
class CheckResult:
    name: str
    residual: float
    tolerance: float
    passed: bool
    note: str = ""


def _inject_vertex_fault(lattice: ChungYaoLattice, scale: float) -> ChungYaoLattice:
    """Copy the lattice and displace one stored vertex (consistency breaker)."""
    broken = copy.copy(lattice)
    broken.vertices = dict(lattice.vertices)
    key = next(iter(sorted(broken.vertices)))
    vertex = broken.vertices[key].copy()
    vertex[0] += scale
    vertex.setflags(write=False)
    broken.vertices[key] = vertex
    return broken


def run_verification(
    config: ExperimentConfig,
    seed: int = 0,
    tol_override: float | None = None,
    fault_inject: bool = False,
    sign_flip: bool = False,
    s: int | None = None,
) -> list[CheckResult]:
    """Run the identity suite on the config's family; returns one result per check."""
    rng = np.random.default_rng(seed)
    family = config.family(s)
    lattice = ChungYaoLattice(family)
    n_dim, d = family.dimension, family.count
    m = d - n_dim + 1
    quad_degree = config.quad_degree
    results: list[CheckResult] = []

    def record(name, residual, tol, note=""):
        tol = tol_override if tol_override is not None else tol
        results.append(CheckResult(name=name, residual=residual, tolerance=tol,
                                   passed=bool(residual <= tol), note=note))

    # Interpolation match at the vertices (fault injection breaks this one).
    f_probe = ExpAffine(np.ones(n_dim))
    work_lattice = _inject_vertex_fault(lattice, 1e-3 * (1.0 + lattice.diameter())) \
        if fault_inject else lattice
    interp = interpolate(work_lattice, f_probe)
    record("interpolation_match", interp.vertex_residual(), 1e-9,
           note="fault injected" if fault_inject else "")

    # de Boor's identity at random points.
    xs = rng.uniform(-1.0, 1.0, size=(50, n_dim))
    residual = max(deboor_identity_residual(lattice, subset, xs)
                   for subset in lattice.vertices)
    record("deboor_identity", residual, 1e-10)

    # Remainder formula on the exact path: monomial of degree d - N + 1.
    alpha = [0] * n_dim
    alpha[0] = m
    f_mono = PolynomialFunction.monomial(n_dim, alpha)
    interp_mono = interpolate(lattice, f_mono)
    lines = lattice.line_subsets()
    worst = 0.0
    for x in rng.uniform(-0.5, 0.5, size=(10, n_dim)):
        dec = deboor_remainder(lattice, f_mono, x, quad_degree,
                               interpolant=interp_mono, lines=lines)
        worst = max(worst, dec.relative_residual())
    record("deboor_remainder", worst, 1e-9)

    # Homogeneous unisolvence: cardinality of the direction set.
    directions = [line.direction for line in lines]
    basis = [MultiPoly.monomial(n_dim, a) for a in homogeneous_indices(n_dim, m)]
    vdm = abs(vandermonde(directions, basis))
    worst = 0.0
    for i, line in enumerate(lines):
        pk = pk_polynomial(family, line.indices, homogeneous=True,
                           direction=line.direction)
        for j, other in enumerate(lines):
            expected = 1.0 if i == j else 0.0
            worst = max(worst, abs(pk.evaluate(other.direction) - expected))
    record("homogeneous_unisolvence", worst, 1e-10,
           note=f"|VDM| = {vdm:.3e}")

    # Homogeneous representation of random symmetric forms.
    worst = 0.0
    for _ in range(10):
        coeffs = {a: rng.uniform(-1.0, 1.0) for a in homogeneous_indices(n_dim, m)}
        phi = SymmetricForm(m, n_dim, MultiPoly(n_dim, m, coeffs))
        v = rng.uniform(-1.0, 1.0, size=n_dim)
        lhs = phi(*([v] * m))
        rhs = homogeneous_representation(family, phi, v)
        worst = max(worst, abs(lhs - rhs) / max(1.0, abs(lhs)))
    record("homogeneous_representation", worst, 1e-9)

    # Newton-like staged identity.
    worst = 0.0
    for _ in range(5):
        coeffs = {a: rng.uniform(-1.0, 1.0) for a in homogeneous_indices(n_dim, m)}
        phi = SymmetricForm(m, n_dim, MultiPoly(n_dim, m, coeffs))
        for _ in range(5):
            x = rng.uniform(-1.0, 1.0, size=n_dim)
            dec = newton_identity(family, phi, x, lattice=lattice)
            worst = max(worst, dec.residual() / max(1.0, abs(dec.target)))
    record("newton_identity", worst, 1e-9)

    # Technical vanishing lemma (needs N >= 2 and at least N + 1 planes).
    if n_dim >= 2 and d >= n_dim + 1:
        worst = 0.0
        pairs = 0
        from itertools import combinations as _comb
        for k_prime in _comb(range(d - 1), n_dim - 2):
            report = techobserv_check(family, k_prime)
            pairs += len(report.entries)
            worst = max(worst, report.max_abs())
        note = "vacuous (every K contains the empty subset)" if pairs == 0 else f"{pairs} pairs"
        record("techobserv", worst, 1e-10, note=note)
    else:
        record("techobserv", 0.0, 1e-10, note="skipped (needs d > N and N >= 2)")

    if sign_flip:
        worst = 0.0
        for x in rng.uniform(-0.5, 0.5, size=(3, n_dim)):
            worst = max(worst, remainder_sign_flip_deviation(
                lattice, f_mono, x, quad_degree))
        record("sign_flip_invariance", worst, 1e-12)

    return results


def cmd_verify(args) -> int:
    config = _apply_overrides(load_config(args.config), args)
    s_values = _select_s_values(args, config)
    results = run_verification(
        config,
        seed=args.seed,
        tol_override=args.tol,
        fault_inject=args.fault_inject,
        sign_flip=args.sign_flip,
        s=s_values[0],
    )
    failed = 0
    for result in results:
        status = "PASS" if result.passed else "FAIL"
        note = f"  [{result.note}]" if result.note else ""
        print(f"[{status}] {result.name:28s} residual {result.residual:.3e} "
              f"(tol {result.tolerance:.1e}){note}")
        failed += 0 if result.passed else 1
    print(f"{len(results) - failed}/{len(results)} checks passed")
    return EXIT_OK if failed == 0 else EXIT_FAILURE


# ---------------------------------------------------------------------------
# cy converge
# ---------------------------------------------------------------------------

def _write_csv(path: str, rows) -> None:
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(RESULT_COLUMNS)
        for row in rows:
            writer.writerow([_fmt(v) for v in row.as_tuple()])


def cmd_converge(args) -> int:
    config = _apply_overrides(load_config(args.config), args)
    s_values = _select_s_values(args, config)
    seq = config.sequence()
    f = config.function()
    threads = _resolve_threads(args, config)
    report = convergence_experiment(
        seq, f,
        s_values=s_values,
        radius=config.radius,
        grid_per_axis=config.grid_per_axis,
        c2_threshold=config.c2_threshold,
        threads=threads,
    )
    conditions = check_conditions(seq, s_values, config.c2_threshold)

    print(f"sequence: {seq.label or 'unnamed'}  degree {report.degree}")
    header = "  ".join(f"{c:>13s}" for c in RESULT_COLUMNS)
    print(header)
    for row in report.rows:
        if not row.valid:
            print(f"{row.s:>13d}  <family failed: {row.error}>")
            continue
        cells = [f"{v:>13.6g}" if not isinstance(v, int) else f"{v:>13d}"
                 for v in row.as_tuple()]
        print("  ".join(cells))
    print(f"fitted log-log slope (coeff vs lattice norm): {report.slope_coeff:.4f}")
    print(f"fitted log-log slope (sup vs lattice norm):   {report.slope_sup:.4f}")
    print(f"C1 (vertices -> 0): {'PASS' if conditions.c1_pass else 'FAIL'}")
    print(f"C2 (volumes bounded below, min {conditions.c2_min:.4g}): "
          f"{'PASS' if conditions.c2_pass else 'FAIL'}")
    print(f"C3 (offsets -> 0): {'PASS' if conditions.c3_pass else 'FAIL'}")
    print(f"errors decay: {'YES' if report.errors_decay() else 'NO'}")

    out = args.out or config.output
    if out:
        _write_csv(out, report.rows)
        print(f"wrote {out}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# cy rate
# ---------------------------------------------------------------------------

def cmd_rate(args) -> int:
    config = _apply_overrides(load_config(args.config), args)
    s_values = _select_s_values(args, config)
    seq = config.sequence()
    f = config.function()
    violations = 0
    applicable = 0
    print(f"{'s':>6s} {'norm':>12s} {'delta':>10s} {'pk_max':>12s} {'pk_bound':>12s} "
          f"{'measured':>12s} {'bound':>12s} {'ok':>3s}")
    for s in s_values:
        try:
            family = seq.family(s)
            lattice = ChungYaoLattice(family)
        except CyLatticeError as exc:
            print(f"{s:>6d} <family failed: {exc}>")
            continue
        delta = observed_delta(lattice)
        norm = lattice.norm()
        if delta <= 0.0 or norm > config.radius:
            print(f"{s:>6d} {norm:>12.4g} {delta:>10.4g} hypotheses not met "
                  f"(need norm <= {config.radius:g})")
            continue
        report = bound_evaluator(lattice, f, config.radius, delta=delta,
                                 grid_per_axis=config.grid_per_axis)
        applicable += 1
        ok = report.pk_within_bound and report.error_within_bound
        violations += 0 if ok else 1
        print(f"{s:>6d} {norm:>12.4g} {delta:>10.4g} {report.sampled_pk_max:>12.4g} "
              f"{report.pk_bound:>12.4g} {report.measured_sup_error:>12.4g} "
              f"{report.total_bound:>12.4g} {'yes' if ok else 'NO'}")
    if applicable == 0:
        print("no index satisfied the bound hypotheses")
    return EXIT_OK if violations == 0 else EXIT_FAILURE


# ---------------------------------------------------------------------------
# Entry point
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cy",
        description="Chung-Yao lattice construction, verification, and convergence runs",
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("config", help="path to a JSON experiment config")
    common.add_argument("--tol", type=float, default=None,
                        help="override the per-check tolerance (verify)")
    common.add_argument("--quad-degree", type=int, default=None, dest="quad_degree",
                        help="override quadrature exactness degree")
    common.add_argument("--threads", type=int, default=None,
                        help="worker threads (CY_THREADS env overrides)")
    common.add_argument("--s-min", type=int, default=None, dest="s_min")
    common.add_argument("--s-max", type=int, default=None, dest="s_max")

    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("lattice", parents=[common],
                       help="print vertices, line subsets, and the certificate")
    p.add_argument("--out", default=None, help="also write the lattice as JSON")
    p.set_defaults(func=cmd_lattice)

    p = sub.add_parser("verify", parents=[common],
                       help="run the identity suite at configured tolerances")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--fault-inject", action="store_true", dest="fault_inject",
                   help="perturb a vertex to demonstrate failure detection")
    p.add_argument("--sign-flip", action="store_true", dest="sign_flip",
                   help="also check invariance of remainder terms under direction flips")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("converge", parents=[common],
                       help="run the convergence experiment and emit CSV")
    p.add_argument("--out", default=None, help="CSV output path")
    p.set_defaults(func=cmd_converge)

    p = sub.add_parser("rate", parents=[common],
                       help="evaluate the explicit error bound against measurements")
    p.set_defaults(func=cmd_rate)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        code = args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except GeneralPositionError as exc:
        print(f"degenerate family: {exc}", file=sys.stderr)
        return EXIT_DEGENERACY
    except CyLatticeError as exc:
        print(f"numerical degeneracy: {exc}", file=sys.stderr)
        return EXIT_DEGENERACY
    return code


if __name__ == "__main__":
    sys.exit(main())
