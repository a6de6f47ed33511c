"""``blockent`` command line: sweep, gibbs, analyze, blocks, verify.

Exit codes: 0 ok, 1 verification failure, 2 usage error, 3 invalid input state.
"""
import argparse
import contextlib
import sys

import numpy as np

from . import thermal
from .bipartite import BipartiteState, validate
from .blockfinder import DEFAULT_TOL, detect_blocks, rank_report, verify_block_structure
from .errors import BlockEntError, PartitionInvalid
from .matrixio import MatrixFileError, dumps, load_matrix_file, matrix_file_dict, save_matrix_file
from .measures import AUTO, EOF, LINEAR_ENTROPY, RoofPolicy, block_averaged_entanglement, negativity
from .verify import FAULTS, run_suites

EXIT_OK = 0
EXIT_VERIFY = 1
EXIT_USAGE = 2
EXIT_INVALID = 3


@contextlib.contextmanager
def _output(path):
    if path is None or path == "-":
        yield sys.stdout
    else:
        with open(path, "w", newline="") as fh:
            yield fh


def _model_args(p):
    p.add_argument("--K", type=int, required=True, help="environment spin K (blocks m = -K..K)")
    p.add_argument("--omega", type=float, default=1.0)
    p.add_argument("--alpha", type=float, default=None, help="coupling scale (default 1/sqrt(K))")
    p.add_argument("--mode", default="midpoint", help="midpoint, infinite or explicit:<E_m>")
    p.add_argument("--m-min", type=int, default=None)
    p.add_argument("--m-max", type=int, default=None)


def _model_spec(parser, args) -> thermal.ModelSpec:
    if args.K < 1:
        parser.error(f"--K must be a positive integer, got {args.K}")
    if args.alpha is not None and not args.alpha > 0:
        parser.error(f"--alpha must be positive, got {args.alpha}")
    if not np.isfinite(args.omega):
        parser.error(f"--omega must be finite, got {args.omega}")
    try:
        mode, energy = thermal.parse_mode(args.mode)
    except ValueError as exc:
        parser.error(f"--mode: {exc}")
    lo = -args.K if args.m_min is None else args.m_min
    hi = args.K if args.m_max is None else args.m_max
    if lo < -args.K or hi > args.K or lo > hi:
        parser.error(f"--m-min/--m-max must satisfy -K <= m-min <= m-max <= K, got {lo}, {hi}")
    return thermal.ModelSpec(args.K, args.omega, args.alpha, mode, energy, tuple(range(lo, hi + 1)))


def cmd_sweep(parser, args) -> int:
    spec = _model_spec(parser, args)
    if args.t_points < 2:
        parser.error(f"--t-points must be at least 2, got {args.t_points}")
    for flag, v in (("--t-min", args.t_min), ("--t-max", args.t_max)):
        if v is not None and not v > 0:
            parser.error(f"{flag} must be positive, got {v}")
    default = thermal.default_temperatures(spec, 2)
    t_min = default[0] if args.t_min is None else args.t_min
    t_max = default[-1] if args.t_max is None else args.t_max
    if not t_min < t_max:
        parser.error(f"--t-min must be below --t-max, got {t_min} and {t_max}")
    records = thermal.sweep(spec, thermal.temperature_grid(t_min, t_max, args.t_points))
    death = thermal.sudden_death_temperature(records)
    footer = "no sudden death" if death is None else f"sudden_death_T={death:.12g}"
    with _output(args.out) as fh:
        thermal.write_sweep_csv(records, fh, footer)
    return EXIT_OK


def cmd_gibbs(parser, args) -> int:
    spec = _model_spec(parser, args)
    if spec.separable_mode == thermal.INFINITE:
        parser.error("--mode infinite has no finite full Hamiltonian")
    if not args.T > 0:
        parser.error(f"--T must be positive, got {args.T}")
    h, m, n = thermal.assemble_full_hamiltonian(spec)
    state = BipartiteState(m, n, thermal.gibbs_state(h, args.T))
    if args.out is None:
        sys.stdout.write(dumps(matrix_file_dict(state)) + "\n")
    else:
        save_matrix_file(state, args.out)
    return EXIT_OK


def _load(args):
    """Matrix file plus its validation report, or an exit code."""
    try:
        state = load_matrix_file(args.path)
    except MatrixFileError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return None, None, EXIT_USAGE
    report = validate(state)
    if not report.valid:
        print(dumps({"validation": report.to_dict()}))
        print(f"error: {args.path} is not a valid density matrix", file=sys.stderr)
        return state, report, EXIT_INVALID
    return state, report, EXIT_OK


def _blocks_dict(decomp) -> dict:
    return {
        "dim_s": decomp.dim_s,
        "dim_e": decomp.dim_e,
        "blocks": [{"e_indices": list(b.e_indices), "p": b.p} for b in decomp.blocks],
        "dropped": [{"e_indices": list(b.e_indices), "p": b.p} for b in decomp.dropped],
    }


def cmd_analyze(parser, args) -> int:
    if args.samples < 1 or args.refine_iters < 0:
        parser.error("--samples must be >= 1 and --refine-iters >= 0")
    state, report, code = _load(args)
    if code:
        return code
    decomp = detect_blocks(state, args.tol)
    policy = RoofPolicy(args.measure, args.samples, args.refine_iters, args.k_max, args.seed)
    ent = block_averaged_entanglement(state, args.tol, policy)
    out = {
        "validation": report.to_dict(),
        "decomposition": _blocks_dict(decomp),
        "rank_report": rank_report(state, decomp, args.tol).to_dict(),
        "entanglement": ent.to_dict(),
        "negativity": negativity(state),
    }
    with _output(args.out) as fh:
        fh.write(dumps(out) + "\n")
    return EXIT_OK


def _parse_sets(text: str) -> list:
    try:
        return [tuple(int(i) for i in part.split(",")) for part in text.split(";") if part.strip()]
    except ValueError as exc:
        raise PartitionInvalid(f"cannot parse E-index sets {text!r}") from exc


def cmd_blocks(parser, args) -> int:
    state, report, code = _load(args)
    if code:
        return code
    decomp = detect_blocks(state, args.tol)
    out = {"validation": report.to_dict(), "decomposition": _blocks_dict(decomp)}
    status = EXIT_OK
    if args.assert_blocks is not None:
        try:
            check = verify_block_structure(state, _parse_sets(args.assert_blocks), args.tol)
        except PartitionInvalid as exc:
            parser.error(f"--assert-blocks: {exc}")
        out["assertion"] = {
            "ok": check.ok,
            "max_violation": check.max_violation,
            "location": None if check.location is None else list(check.location),
        }
        if not check.ok:
            print(
                f"assertion failed: entry {check.location} has magnitude {check.max_violation:.12g}",
                file=sys.stderr,
            )
            status = EXIT_VERIFY
    with _output(args.out) as fh:
        fh.write(dumps(out) + "\n")
    return status


def cmd_verify(parser, args) -> int:
    if args.trials < 1:
        parser.error(f"--trials must be positive, got {args.trials}")
    results = run_suites(args.trials, args.seed, args.inject_fault)
    for r in results:
        print(r.line())
    ok = all(r.ok for r in results)
    print("all suites passed" if ok else "verification FAILED")
    return EXIT_OK if ok else EXIT_VERIFY


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="blockent", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sweep", help="thermal entanglement sweep as CSV")
    _model_args(p)
    p.add_argument("--t-min", type=float, default=None)
    p.add_argument("--t-max", type=float, default=None)
    p.add_argument("--t-points", type=int, default=400)
    p.add_argument("--out", default=None)
    p.add_argument("--seed", type=int, default=0, help="accepted for uniformity; the sweep is deterministic")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("gibbs", help="Gibbs state of the full model Hamiltonian as a matrix file")
    _model_args(p)
    p.add_argument("--T", type=float, required=True)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_gibbs)

    p = sub.add_parser("analyze", help="full entanglement report for a matrix file")
    p.add_argument("path")
    p.add_argument("--tol", type=float, default=DEFAULT_TOL)
    p.add_argument("--measure", choices=(AUTO, EOF, LINEAR_ENTROPY), default=AUTO)
    p.add_argument("--samples", type=int, default=512)
    p.add_argument("--refine-iters", type=int, default=200)
    p.add_argument("--k-max", type=int, default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("blocks", help="block detection report for a matrix file")
    p.add_argument("path")
    p.add_argument("--tol", type=float, default=DEFAULT_TOL)
    p.add_argument("--assert-blocks", default=None, help='claimed E-index sets, e.g. "0,1;2,3"')
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_blocks)

    p = sub.add_parser("verify", help="run the self-verification suites")
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--inject-fault", choices=FAULTS, default=None, help=argparse.SUPPRESS)
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(parser, args)
    except BlockEntError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
