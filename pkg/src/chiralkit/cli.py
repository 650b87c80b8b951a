"""Command-line front end.  Exit codes: 0 success, 1 failed check, 2 bad input."""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import __version__
from .model import MODEL_FORMAT, ModelError, ModelFormatError, load_model

TABLE_FORMAT = "chiralkit-dims-v1"
REPORT_FORMAT = "chiralkit-report-v1"

CHECKS = ("prop3.4", "prop3.5", "lemma4.6", "lemma4.8", "remark-beta", "vertop",
          "d-squared", "sigma")


class InputError(Exception):
    pass


def _emit(text: str, out: str | None):
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _dump(obj) -> str:
    return json.dumps(obj, indent=1, sort_keys=True) + "\n"


def _load(path, check=True):
    try:
        return load_model(path, check=check)
    except FileNotFoundError:
        raise InputError(f"{path}: no such file") from None
    except ModelFormatError as exc:
        raise InputError(f"{path}: at key '{exc.key}': {exc}") from None
    except ModelError as exc:
        raise InputError(f"{path}: {exc}") from None


def _tmax(value: str) -> int:
    t = int(value)
    if t < 2:
        raise argparse.ArgumentTypeError("t_max must be at least 2")
    return t


# -- subcommands --------------------------------------------------------------

def cmd_lattice(args) -> int:
    from .lattice import lattice_info
    _emit(_dump(lattice_info()), None)
    return 0


def _ansatz_from_json(path):
    from .checks import GeneralAnsatz
    try:
        data = json.loads(Path(path).read_text())
    except FileNotFoundError:
        raise InputError(f"{path}: no such file") from None
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: invalid JSON: {exc}") from None
    try:
        delta = [tuple(p) for p in data["delta"]]
        dual = [tuple(int(x) for x in p) for p in data["delta_dual_numerators"]]
        F = {(int(e["i"]), tuple(e["m"])): _frac(e["c"]) for e in data["F"]}
        from .lattice import NPoint
        G = {(int(e["i"]), NPoint(tuple(int(x) for x in e["n_numerators"]))): _frac(e["c"])
             for e in data["G"]}
        return GeneralAnsatz(delta, [NPoint(p) for p in dual], F, G)
    except KeyError as exc:
        raise InputError(f"{path}: at key '{exc.args[0]}': missing") from None
    except (TypeError, ValueError) as exc:
        raise InputError(f"{path}: {exc}") from None


def _frac(x):
    from .model import parse_rational
    return parse_rational(x)


def cmd_check_diff(args) -> int:
    from .checks import GeneralAnsatz, check_differential_general, check_differential_quintic
    if args.general:
        rep = check_differential_general(_ansatz_from_json(args.general))
    else:
        F, g = _load(args.model, check=False)
        rep = check_differential_quintic(F, g)
        if args.full_ope:
            full = check_differential_general(GeneralAnsatz.from_quintic(F, g))
            rep.details["full_self_ope_pass"] = full.passed
    _emit(rep.dumps() + "\n", args.out)
    return 0 if rep.passed else 1


def cmd_chiral(args) -> int:
    from .chiral import cohomology_dims
    F, g = _load(args.model)
    table = cohomology_dims(F, g, args.ring, args.tmax, threads=args.threads)
    if args.tsv:
        _emit(table.to_tsv(), args.out)
    else:
        _emit(_dump(dict(table.to_json(), format=TABLE_FORMAT)), args.out)
    return 0


def cmd_jacobian(args) -> int:
    from .oracle import jacobian_dims
    F, _ = _load(args.model)
    rep = jacobian_dims(F.R(), args.dmax)
    _emit(_dump(rep.to_json()), args.out)
    return 0


def cmd_oracle_compare(args) -> int:
    from .chiral import cohomology_dims
    from .oracle import OracleRefused, dense_cohomology_dims
    F, g = _load(args.model)
    rings = ("A", "B") if args.ring == "both" else (args.ring,)
    result, ok = {}, True
    for ring in rings:
        sparse = cohomology_dims(F, g, ring, args.tmax)
        try:
            dense = dense_cohomology_dims(F, g, ring, args.tmax)
        except OracleRefused as exc:
            raise InputError(str(exc)) from None
        same = sparse == dense
        ok &= same
        result[ring] = {"equal": same, "sparse": sparse.to_json(), "dense": dense.to_json()}
    _emit(_dump({"format": REPORT_FORMAT, "check": "oracle-compare", "pass": ok, "rings": result}),
          args.out)
    return 0 if ok else 1


def cmd_verify(args) -> int:
    from . import checks as C
    name = args.check
    if name == "prop3.4":
        rep = C.check_prop34_suite(seed=args.seed, count=args.count or 20)
    elif name == "prop3.5":
        rep = C.verify_LJ_descend()
    elif name == "lemma4.6":
        rep = C.verify_hat_fields(args.dim or 3)
    elif name == "lemma4.8":
        rep = C.verify_hat_LJ(args.dim or 2, variant=args.variant)
    elif name == "remark-beta":
        rep = C.verify_remark_beta(args.dim or 3)
    elif name == "vertop":
        rep = C.verify_vertop(seed=args.seed, count=args.count or 50)
    elif name == "d-squared":
        rep = C.verify_d_squared(seed=args.seed, count=args.count if args.count is not None else 20,
                                 t_top=args.ttop, ring=args.ring)
    else:
        rep = C.verify_sigma_truncation()
    _emit(rep.dumps() + "\n", args.out)
    return 0 if rep.passed else 1


# -- parser -------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="chiralkit", description=__doc__)
    p.add_argument("--version", action="version",
                   version=f"chiralkit {__version__} (model {MODEL_FORMAT}, "
                           f"tables {TABLE_FORMAT}, reports {REPORT_FORMAT})")
    sub = p.add_subparsers(dest="command", required=True)

    lat = sub.add_parser("lattice", help="lattice data")
    lat.add_argument("what", choices=["info"])
    lat.set_defaults(func=cmd_lattice)

    cd = sub.add_parser("check-diff", help="check that the differential squares to zero")
    src = cd.add_mutually_exclusive_group(required=True)
    src.add_argument("--model")
    src.add_argument("--general", help="JSON file with a general ansatz")
    cd.add_argument("--full-ope", action="store_true",
                    help="also compute the full self-OPE of the differential field")
    cd.add_argument("--out")
    cd.set_defaults(func=cmd_check_diff)

    ch = sub.add_parser("chiral", help="chiral-ring cohomology dimensions")
    ch.add_argument("--model", required=True)
    ch.add_argument("--ring", choices=["A", "B"], default="A")
    ch.add_argument("--tmax", type=_tmax, default=4)
    ch.add_argument("--threads", type=int, default=1)
    ch.add_argument("--tsv", action="store_true")
    ch.add_argument("--out")
    ch.set_defaults(func=cmd_chiral)

    jac = sub.add_parser("jacobian", help="graded dimensions of C[x]/(R^0..R^4)")
    jac.add_argument("--model", required=True)
    jac.add_argument("--dmax", type=int, default=16)
    jac.add_argument("--out")
    jac.set_defaults(func=cmd_jacobian)

    oc = sub.add_parser("oracle-compare", help="sparse engine against the brute-force oracle")
    oc.add_argument("--model", required=True)
    oc.add_argument("--tmax", type=_tmax, default=3)
    oc.add_argument("--ring", choices=["A", "B", "both"], default="both")
    oc.add_argument("--out")
    oc.set_defaults(func=cmd_oracle_compare)

    ve = sub.add_parser("verify", help="scripted symbolic verifications")
    ve.add_argument("--check", required=True, choices=CHECKS)
    ve.add_argument("--dim", type=int)
    ve.add_argument("--variant", choices=["printed", "derived"], default="printed",
                    help="lemma4.8: identities as printed, or with the corrected sign and "
                         "the supplemented preimage")
    ve.add_argument("--seed", type=int, default=0)
    ve.add_argument("--count", type=int)
    ve.add_argument("--ttop", type=int, default=5, help="d-squared: largest t")
    ve.add_argument("--ring", choices=["A", "B"], default="A")
    ve.add_argument("--out")
    ve.set_defaults(func=cmd_verify)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0) and 2
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
