"""Command-line entry point: ``ergoqg <command> [options]``.

Every run writes ``<output-dir>/<command>.json`` (config, results, content
hash) plus CSV tables, prints a short summary, and exits 0 iff every asserted
identity holds.  Options may also come from ``--config FILE`` holding
``key = value`` lines; explicit flags override the file.
"""

from __future__ import annotations

import argparse
import os
import sys
import time
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Sequence

import numpy as np

from . import acceptance
from .cuntz import CuntzElement, all_words, invariance_check, quasi_free_state
from .haar import NonConvergence
from .linalg import RationalMatrix
from .magic import (
    RankDeficiency,
    build_magic,
    coaction_check,
    noncommutativity_witness,
    verify_magic,
    word_independence_rank,
)
from .modular import EigenvalueList, cuntz_factor_type, spectrum_growth_report, uhf_factor_type
from .quotient import FiniteGroup, Subgroup, builtin_group, quotient_check, standard_pair
from .reports import build_record, write_csv, write_record
from .scalars import parse_scalar, re_im
from .temperley_lieb import markov_check, quantum_vs_classical_contrast, tl_span_dimension, verify_tl_relations
from .tensor import DensityFunctional, random_classical_points, random_diagonal_points

OUTPUT_ENV = "ERGOQG_OUTPUT_DIR"
DEFAULT_OUTPUT = "reports"
MAX_N = 3
MAX_K = 6


class ConfigError(ValueError):
    """A run configuration failed validation; the message names the field."""


@dataclass
class Outcome:
    result: dict
    passed: bool
    failures: list[str] = field(default_factory=list)
    tables: dict[str, tuple[Sequence[str], list]] = field(default_factory=dict)
    summary: list[str] = field(default_factory=list)


# --------------------------------------------------------------------------
# parsing helpers


def parse_q(text: str, name: str = "q") -> tuple:
    try:
        vals = tuple(parse_scalar(t) for t in text.split(",") if t.strip())
    except ValueError as exc:
        raise ConfigError(f"{name}: {exc}") from None
    if len(vals) < 2:
        raise ConfigError(f"{name}: need at least two entries")
    return vals


def parse_matrix(text: str, name: str = "Q") -> list[list]:
    rows = [parse_q(r, name) for r in text.split(";") if r.strip()]
    if any(len(r) != len(rows) for r in rows):
        raise ConfigError(f"{name}: matrix must be square (rows separated by ';')")
    return rows


def density_from_args(args) -> DensityFunctional:
    try:
        if getattr(args, "Q", None):
            rows = parse_matrix(args.Q)
            exact = all(isinstance(v, Fraction) for r in rows for v in r)
            data = RationalMatrix.from_entries(rows) if exact else np.array(rows, dtype=complex)
            return DensityFunctional(data)
        q = parse_q(args.q)
        if args.backend == "float":
            q = tuple(float(v) for v in q)
        return DensityFunctional.diagonal(q)
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(f"Q: {exc}") from None


def eigenvalues_from_args(args) -> EigenvalueList:
    try:
        if getattr(args, "Q", None):
            return EigenvalueList.from_density(density_from_args(args).Q)
        q = parse_q(args.q)
        if args.backend == "float":
            q = tuple(float(v) for v in q)
        return EigenvalueList(q)
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(f"q: {exc}") from None


def check_nk(n: int, k: int, k_min: int = 2, k_max: int = MAX_K) -> None:
    if not 2 <= n <= MAX_N:
        raise ConfigError(f"n: must be in 2..{MAX_N}, got {n}")
    if not k_min <= k <= k_max:
        raise ConfigError(f"k: must be in {k_min}..{k_max}, got {k}")


def theta_grid(args) -> np.ndarray:
    if args.theta:
        try:
            return np.array([float(t) for t in args.theta.split(",") if t.strip()])
        except ValueError:
            raise ConfigError(f"theta: cannot parse {args.theta!r}") from None
    if args.grid < 1:
        raise ConfigError("grid: must be positive")
    return np.linspace(0.0, 2 * np.pi, args.grid)


# --------------------------------------------------------------------------
# handlers


def cmd_tl_verify(args) -> Outcome:
    check_nk(args.n, args.k)
    rep = verify_tl_relations(args.n, args.k)
    rows = rep.rows()
    return Outcome(
        {"n": rep.n, "k": rep.k, "beta": rep.beta, "residuals": rep.residuals, "checked": rep.checked},
        rep.passed,
        [f"relation {name}: residual {r}" for name, r in rep.residuals.items() if r != 0],
        {"relations": (("relation", "instances", "residual"), rows)},
        [f"{name:13s} checked {c:3d}  residual {r}" for name, c, r in rows],
    )


def cmd_markov(args) -> Outcome:
    check_nk(args.n, args.k, k_min=3)
    rep = markov_check(args.n, args.k)
    fails = [] if rep.worst_residual == 0 else [f"Markov residual {rep.worst_residual}"]
    fails += [f"tau(e_{s}) = {v}" for s, v in rep.trace_of_projections.items() if v != Fraction(1, rep.beta)]
    ratios = {r.ratio for r in rep.rows}
    return Outcome(
        {
            "n": rep.n,
            "k": rep.k,
            "beta": rep.beta,
            "words": rep.word_count,
            "worst_residual": rep.worst_residual,
            "trace_of_projections": rep.trace_of_projections,
            "ratios": sorted(str(r) for r in ratios),
        },
        rep.passed,
        fails,
        {"markov": (("word", "tau_w", "tau_w_e", "ratio"), rep.table())},
        [f"{rep.word_count} words, ratio column {sorted(str(r) for r in ratios)}, worst residual {rep.worst_residual}"],
    )


def cmd_tl_dim(args) -> Outcome:
    check_nk(args.n, args.k)
    from .temperley_lieb import catalan

    d = tl_span_dimension(args.n, args.k)
    ok = d == catalan(args.k)
    return Outcome(
        {"n": args.n, "k": args.k, "dimension": d, "catalan": catalan(args.k)},
        ok,
        [] if ok else [f"dimension {d} != Catalan {catalan(args.k)}"],
        {"tl_dim": (("n", "k", "dimension"), [(args.n, args.k, d)])},
        [f"dim TL span (n={args.n}, k={args.k}) = {d}"],
    )


def cmd_contrast(args) -> Outcome:
    check_nk(args.n, args.k, k_max=3 if args.n == 2 else 2)
    try:
        rep = quantum_vs_classical_contrast(args.n, args.k, args.group, args.samples, args.seed, args.gap)
    except NonConvergence as exc:
        return Outcome({"error": str(exc)}, False, [str(exc)])
    fails = []
    if rep.dim_classical < rep.dim_tl:
        fails.append("classical fixed space smaller than TL span")
    if args.group.upper().startswith("O") and not rep.contained:
        fails.append(f"TL words not inside the O({args.n}) fixed space (residual {rep.containment_residual:.3g})")
    return Outcome(
        {
            "n": args.n,
            "k": args.k,
            "group": rep.group,
            "dim_tl": rep.dim_tl,
            "dim_classical": rep.dim_classical,
            "contained": rep.contained,
            "containment_residual": rep.containment_residual,
            "fixed_space": rep.fixed_space.as_dict(),
        },
        not fails,
        fails,
        {"contrast": (("n", "k", "dim_tl", "dim_classical"), [rep.csv_row()])},
        [f"dim TL = {rep.dim_tl}, dim Fix_{rep.group} = {rep.dim_classical}, contained = {rep.contained}"],
    )


def cmd_cuntz_eval(args) -> Outcome:
    Q = density_from_args(args)
    if args.word:
        items = [(w, CuntzElement.parse(w, Q.n)) for w in args.word]
    else:
        items = [(str(w), CuntzElement(Q.n, {w: Fraction(1)})) for w in all_words(Q.n, args.max_length)]
    rows = []
    for text, x in items:
        re, im = re_im(quasi_free_state(Q, x))
        rows.append((text, re, im))
    return Outcome(
        {"Q": Q.Q.entries() if Q.backend == "exact" else Q.array(), "backend": Q.backend, "values": {t: (r, i) for t, r, i in rows}},
        True,
        [],
        {"cuntz_eval": (("word", "re", "im"), rows)},
        [f"omega({t}) = {r}" + (f" + {i}i" if i else "") for t, r, i in rows[:20]],
    )


def cmd_cuntz_invariance(args) -> Outcome:
    Q = density_from_args(args)
    rng = np.random.default_rng(args.seed)
    if args.point == "swap":
        P = np.eye(Q.n)[::-1]
        points = [P]
    elif args.point == "diagonal":
        points = [p.U for p in random_diagonal_points(Q, args.points, rng)]
    else:
        points = [p.U for p in random_classical_points(Q, args.points, rng)]
    words = list(all_words(Q.n, args.max_length))
    reps = [invariance_check(U, Q, words, tol=args.tol) for U in points]
    worst = max(r.max_deviation for r in reps)
    fails = [f"point {i}: relations fail" for i, r in enumerate(reps) if not r.point.passed]
    fails += [f"point {i}: deviation {r.max_deviation:.3g}" for i, r in enumerate(reps) if not r.invariant]
    rows = [(i, r.point.relation_residual, r.max_deviation, r.passed) for i, r in enumerate(reps)]
    return Outcome(
        {"points": args.point, "count": len(reps), "words": len(words), "max_deviation": worst, "reports": [r.as_dict() for r in reps]},
        not fails,
        fails,
        {"invariance": (("point", "relation_residual", "max_deviation", "passed"), rows)},
        [f"{len(reps)} {args.point} points, {len(words)} words, max deviation {worst:.3g}"],
    )


def _inversion_symmetric(spectrum) -> bool:
    vals = sorted(float(v) for v, m in spectrum.items() for _ in range(m))
    inv = sorted(1 / v for v in vals)
    return bool(np.allclose(vals, inv, rtol=1e-9, atol=0))


def cmd_modular_spectrum(args) -> Outcome:
    if not 1 <= args.k <= 6:
        raise ConfigError(f"k: must be in 1..6, got {args.k}")
    q = eigenvalues_from_args(args)
    rep = spectrum_growth_report(q, args.k)
    symmetric = all(_inversion_symmetric(s) for s in rep.spectra.values())
    return Outcome(
        {"q": q.q, "k_max": args.k, "distinct": {k: len(s) for k, s in rep.spectra.items()}, "inversion_symmetric": symmetric},
        symmetric,
        [] if symmetric else ["spectrum not inversion symmetric"],
        {"modular_spectrum": (("k", "value", "multiplicity"), rep.table())},
        [f"k={k}: {len(s)} distinct values" for k, s in rep.spectra.items()],
    )


def cmd_factor_type(args) -> Outcome:
    q = eigenvalues_from_args(args)
    fn = uhf_factor_type if args.family == "uhf" else cuntz_factor_type
    label = fn(q, tol=args.tol, depth=args.depth, method=args.method)
    out = label.as_dict() | {"family": args.family, "q": q.q}
    expected_ok = args.expect is None or str(label) == args.expect
    return Outcome(
        out,
        expected_ok,
        [] if expected_ok else [f"label {label} != expected {args.expect}"],
        {},
        [f"{args.family} factor type: {label}" + (f"  (caveat: {label.caveat})" if label.caveat else "")],
    )


def cmd_magic_verify(args) -> Outcome:
    grid = theta_grid(args)
    rows, worst, hom = [], 0.0, 0.0
    for t in grid:
        M = build_magic(float(t))
        mag = verify_magic(M, args.tol)
        co = coaction_check(M, args.tol)
        worst = max(worst, float(mag.max_residual))
        hom = max(hom, max(co.homomorphism.values()))
        rows.append((float(t), float(mag.max_residual), max(co.homomorphism.values()), noncommutativity_witness(float(t))))
    ok = worst <= args.tol and hom <= args.tol
    return Outcome(
        {"angles": len(grid), "max_residual": worst, "max_homomorphism_residual": hom, "tol": args.tol},
        ok,
        [] if ok else [f"max residual {worst:.3g} exceeds {args.tol}"],
        {"magic": (("theta", "magic_residual", "homomorphism_residual", "commutator_norm"), rows)},
        [f"{len(grid)} angles, max magic residual {worst:.3g}, max homomorphism residual {hom:.3g}"],
    )


def cmd_magic_rank(args) -> Outcome:
    if args.L < 1:
        raise ConfigError("L: must be at least 1")
    rows, fails = [], []
    for L in range(1, args.L + 1):
        try:
            r = word_independence_rank(L, seed=args.seed, strict=True)
        except RankDeficiency as exc:
            r = exc.rank
            fails.append(f"L={L}: {exc}")
        rows.append((L, r, 2 * L + 1))
    return Outcome(
        {"ranks": {L: r for L, r, _ in rows}, "seed": args.seed},
        not fails,
        fails,
        {"magic_rank": (("L", "rank", "reduced_words"), rows)},
        [f"L={L}: rank {r} of {w}" for L, r, w in rows],
    )


def _subgroup_from_args(args) -> tuple[Subgroup, str]:
    try:
        if args.pair:
            return standard_pair(args.pair), args.pair
        if args.table:
            G = FiniteGroup.load(args.table)
        elif args.group:
            G = builtin_group(args.group)
        else:
            raise ConfigError("quotient: give --pair, or --group/--table with --subgroup")
        if not args.subgroup:
            raise ConfigError("subgroup: element indices required")
        idx = [int(v) for v in args.subgroup.split(",") if v.strip()]
        H = Subgroup(G, tuple(idx))
        return H, f"{G.name}/{{{args.subgroup}}}"
    except ConfigError:
        raise
    except (ValueError, OSError) as exc:
        raise ConfigError(f"quotient: {exc}") from None


def cmd_quotient_check(args) -> Outcome:
    H, label = _subgroup_from_args(args)
    rep = quotient_check(H, label)
    fails = [] if rep.passed else [f"{label}: {k}" for k, v in rep.as_dict().items() if v is False]
    d = rep.as_dict()
    return Outcome(
        d,
        rep.passed,
        fails or ([] if rep.passed else [f"{label} failed"]),
        {"quotient": (("pair", "order", "subgroup_order", "dimension", "ergodic_dimension"),
                      [(label, rep.order, rep.subgroup_order, rep.fixed.dimension, rep.ergodic_dimension)])},
        [f"{label}: dim C(H\\G) = {rep.fixed.dimension}, ergodic dim = {rep.ergodic_dimension}, "
         f"integration residual {rep.integration.residual}"],
    )


def cmd_all(args) -> Outcome:
    start = time.perf_counter()
    results = acceptance.run_all(args.seed)
    total = time.perf_counter() - start
    ok = all(r.passed for r in results) and total < acceptance.FULL_SUITE_LIMIT
    fails = [f"criterion {r.number}: {f}" for r in results for f in r.failures]
    if total >= acceptance.FULL_SUITE_LIMIT:
        fails.append(f"total runtime {total:.1f}s exceeds {acceptance.FULL_SUITE_LIMIT:.0f}s")
    return Outcome(
        {"criteria": [r.as_dict() for r in results], "seed": args.seed},
        ok,
        fails,
        {"acceptance": (("criterion", "title", "passed", "limit_seconds"),
                        [(r.number, r.title, r.passed, r.limit) for r in results])},
        [r.line() for r in results] + [f"total {total:.2f}s (< {acceptance.FULL_SUITE_LIMIT:.0f}s)"],
    )


# --------------------------------------------------------------------------
# argument parser


def _add_q(p, required=True):
    g = p.add_mutually_exclusive_group(required=required)
    g.add_argument("--q", help="eigenvalues, e.g. 1/3,2/3 (exact) or 0.3,0.7 (float)")
    g.add_argument("--Q", help="full density matrix, rows separated by ';'")
    p.add_argument("--backend", choices=("exact", "float"), default="exact",
                   help="float forces the floating backend even for rational input")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ergoqg", description="Finite-dimensional checks for ergodic quantum group actions.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--output-dir", default=None, help=f"report directory (default ${OUTPUT_ENV} or ./{DEFAULT_OUTPUT})")
    common.add_argument("--config", default=None, help="key = value file mirroring the flags")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--quiet", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def leaf(parent, name, fn, help_):
        p = parent.add_parser(name, parents=[common], help=help_)
        p.set_defaults(handler=fn, command_name=name)
        return p

    tl = sub.add_parser("tl", help="Temperley-Lieb relations").add_subparsers(dest="sub", required=True)
    p = leaf(tl, "verify", cmd_tl_verify, "check the Jones projection relations exactly")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.set_defaults(command_name="tl-verify")

    p = leaf(sub, "markov", cmd_markov, "check the Markov trace property")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, required=True)

    p = leaf(sub, "tl-dim", cmd_tl_dim, "dimension of the Temperley-Lieb span")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, required=True)

    p = leaf(sub, "contrast", cmd_contrast, "TL span against a classical commutant")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--group", default="O", help="O, U, torus or trivial")
    p.add_argument("--samples", type=int, default=2000)
    p.add_argument("--gap", type=float, default=1e-4)

    cz = sub.add_parser("cuntz", help="Cuntz words and the quasi-free state").add_subparsers(dest="sub", required=True)
    p = leaf(cz, "eval", cmd_cuntz_eval, "evaluate the quasi-free state")
    _add_q(p)
    p.add_argument("--word", action="append", help='word such as "S1 S2 S2* S1*" (repeatable)')
    p.add_argument("--max-length", type=int, default=4, help="tabulate all words up to this length when no --word")
    p.set_defaults(command_name="cuntz-eval")
    p = leaf(cz, "invariance", cmd_cuntz_invariance, "invariance at classical points")
    _add_q(p)
    p.add_argument("--point", choices=("diagonal", "classical", "swap"), default="diagonal")
    p.add_argument("--points", type=int, default=50)
    p.add_argument("--max-length", type=int, default=6)
    p.add_argument("--tol", type=float, default=1e-10)
    p.set_defaults(command_name="cuntz-invariance")

    md = sub.add_parser("modular", help="modular data").add_subparsers(dest="sub", required=True)
    p = leaf(md, "spectrum", cmd_modular_spectrum, "modular spectrum up to k legs")
    _add_q(p)
    p.add_argument("--k", type=int, default=3)
    p.set_defaults(command_name="modular-spectrum")

    p = leaf(sub, "factor-type", cmd_factor_type, "factor-type label from eigenvalues")
    _add_q(p)
    p.add_argument("--family", choices=("uhf", "cuntz"), required=True)
    p.add_argument("--method", choices=("auto", "exact", "cf"), default="auto")
    p.add_argument("--depth", type=int, default=40)
    p.add_argument("--tol", type=float, default=1e-12)
    p.add_argument("--expect", default=None, help="assert this label")

    mg = sub.add_parser("magic", help="magic unitary family").add_subparsers(dest="sub", required=True)
    p = leaf(mg, "verify", cmd_magic_verify, "quantum permutation axioms on a theta grid")
    p.add_argument("--theta", default=None, help="comma-separated angles")
    p.add_argument("--grid", type=int, default=100, help="evenly spaced angles in [0, 2pi]")
    p.add_argument("--tol", type=float, default=1e-12)
    p.set_defaults(command_name="magic-verify")
    p = leaf(mg, "rank", cmd_magic_rank, "rank of reduced words in p, q")
    p.add_argument("--L", type=int, default=8)
    p.set_defaults(command_name="magic-rank")

    qt = sub.add_parser("quotient", help="finite quotient spaces").add_subparsers(dest="sub", required=True)
    p = leaf(qt, "check", cmd_quotient_check, "fixed algebra, ergodicity, integration formula")
    p.add_argument("--pair", default=None, help="S4/S3, S3/A3, S3/C2, Z6/Z2, S3/1 or S3/S3")
    p.add_argument("--group", default=None, help="built-in group S<n>, Z<n> or D<n>")
    p.add_argument("--table", default=None, help="group table file (order, then table rows)")
    p.add_argument("--subgroup", default=None, help="comma-separated element indices")
    p.set_defaults(command_name="quotient-check")

    leaf(sub, "all", cmd_all, "run the full acceptance suite")
    return parser


# --------------------------------------------------------------------------
# config files


def read_config(path: str | Path) -> list[tuple[str, str]]:
    pairs = []
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"config line {lineno}: expected key = value")
        key, value = (s.strip() for s in line.split("=", 1))
        pairs.append((key, value))
    return pairs


def expand_config(argv: list[str]) -> list[str]:
    """Splice ``--config`` entries in after the command words so explicit flags win."""
    argv = list(argv)
    path = None
    for i, tok in enumerate(argv):
        if tok == "--config" and i + 1 < len(argv):
            path = argv[i + 1]
            del argv[i : i + 2]
            break
        if tok.startswith("--config="):
            path = tok.split("=", 1)[1]
            del argv[i]
            break
    if path is None:
        return argv
    try:
        pairs = read_config(path)
    except OSError as exc:
        raise ConfigError(f"config: {exc}") from None
    head = []
    while argv and not argv[0].startswith("-"):
        head.append(argv.pop(0))
    flags = []
    for key, value in pairs:
        if key == "command":
            if not head:
                head = value.split()
            continue
        flag = "--" + key.replace("_", "-") if key not in ("L", "Q") else "--" + key
        if value.lower() in ("true", "yes"):
            flags.append(flag)
        elif value.lower() in ("false", "no"):
            continue
        else:
            flags += [flag, value]
    return head + flags + argv


# backend and tolerance recorded for commands that take no such flag
PROVENANCE = {
    "tl-verify": ("exact", 0),
    "markov": ("exact", 0),
    "tl-dim": ("exact", 0),
    "contrast": ("float", 1e-6),
    "modular-spectrum": ("exact", 1e-9),
    "magic-rank": ("float", 1e-12),
    "quotient-check": ("exact", 0),
    "all": ("mixed", "per criterion"),
}


def _config_dict(args) -> dict:
    skip = {"handler", "config", "output_dir", "quiet", "sub", "command"}
    out = {k: v for k, v in sorted(vars(args).items()) if k not in skip}
    backend, tol = PROVENANCE.get(args.command_name, ("float", None))
    out.setdefault("backend", backend)
    out.setdefault("tol", tol)
    return out


def run(argv: Sequence[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(expand_config(argv))
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    out_dir = Path(args.output_dir or os.environ.get(OUTPUT_ENV) or DEFAULT_OUTPUT)
    name = args.command_name
    try:
        outcome: Outcome = args.handler(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    config = _config_dict(args)
    record = build_record(name, config, outcome.result, outcome.passed, outcome.failures)
    path = write_record(out_dir / f"{name}.json", record)
    for table, (header, rows) in outcome.tables.items():
        write_csv(out_dir / f"{table}.csv", header, rows)
    if not args.quiet:
        for line in outcome.summary:
            print(line)
        for f in outcome.failures:
            print(f"FAILED: {f}")
        print(f"{'PASS' if outcome.passed else 'FAIL'} {name} -> {path}")
    return 0 if outcome.passed else 1


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
