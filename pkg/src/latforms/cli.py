"""Command-line surface over generators, estimators, criterion checks, and
the constructive searches, emitting deterministic JSON reports.

Exit codes: 0 all checks hold / construction succeeded; 2 certified
violation or refusal (a report is still written); 3 undecided at the
precision cap or search budget; 1 usage or I/O errors.  For a fixed input
and configuration the report bytes are identical between runs except for
the timestamp field, which is excluded from identity comparisons.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from datetime import datetime, timezone
from fractions import Fraction
from typing import Optional

from . import __version__
from . import criteria as _criteria
from . import exponents as _exponents
from . import minkowski as _minkowski
from . import numerics as _numerics
from .corpus import (
    GENERATORS,
    GeneratorSpec,
    InfeasibleSpec,
    default_basis,
    dumps_jsonl,
    generate,
    import_jsonl,
    loads_jsonl,
)
from .criteria import (
    BudgetExceeded,
    RecordsExhausted,
    check_nesterenko,
    check_siegel,
    verify_conclusion,
)
from .exponents import profile
from .minkowski import Refusal, SearchFailed, construct_dual_witness, \
    construct_primal_form
from .model import Basis, MissingRecord, ValidationError
from .numerics import BallReal, TriBool, UncertifiedComparison, parse_real

__all__ = ["build_parser", "run", "main"]

_HARD_CAP = 1 << 16
_EXIT = {"holds": 0, "success": 0, "violated": 2, "refused": 2, "unknown": 3}


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on bad flags; 2 means "certified violation" here, so
    # reroute usage problems through the 1 path
    def error(self, message):
        raise _UsageError(message)


def _frac(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational: {text!r}")


def _posint(text: str) -> int:
    try:
        v = int(text, 10)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}")
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be positive: {text!r}")
    return v


def _default_prec() -> int:
    raw = os.environ.get("LATFORMS_PREC")
    if raw is None:
        return 64
    try:
        v = int(raw)
    except ValueError:
        raise _UsageError(f"LATFORMS_PREC must be an integer, got {raw!r}")
    if v < 8:
        raise _UsageError(f"LATFORMS_PREC must be >= 8, got {v}")
    return v


def _apply_prec_cap(bits: int) -> None:
    # escalation loops read their module's PREC_CAP; rebind all of them
    for mod in (_numerics, _exponents, _criteria, _minkowski):
        mod.PREC_CAP = bits


def _jsonable(x):
    if isinstance(x, BallReal):
        return x.round_to(64).to_json()
    if isinstance(x, TriBool):
        return x.name
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, (int, str, bool)) or x is None:
        return x
    if hasattr(x, "to_json"):
        return _jsonable(x.to_json())
    return str(x)


# ---------------------------------------------------------------------------
# input plumbing


def _add_common(sp, *, budget: bool = False) -> None:
    sp.add_argument("--prec", type=_posint, default=_default_prec(),
                    metavar="BITS",
                    help="working precision (default 64 or $LATFORMS_PREC)")
    sp.add_argument("--prec-cap", type=_posint, default=_HARD_CAP,
                    dest="prec_cap", metavar="BITS",
                    help=f"precision-escalation ceiling (default {_HARD_CAP})")
    sp.add_argument("--jobs", type=_posint, default=1,
                    help="parallelism cap; any value yields the same "
                         "first-found-wins result order")
    if budget:
        sp.add_argument("--budget", type=_posint, default=10 ** 7,
                        help="candidate budget for scans (default 10^7)")
    sp.add_argument("--output", metavar="PATH",
                    help="write output here instead of stdout")


def _add_input(sp) -> None:
    sp.add_argument("--input", metavar="PATH",
                    help="JSONL form-sequence file")
    sp.add_argument("--gen", choices=GENERATORS,
                    help="generate the input sequence instead of reading one")
    sp.add_argument("--n-max", dest="n_max", type=_posint,
                    help="last index for --gen")
    sp.add_argument("--params", metavar="JSON",
                    help="generator parameters (synthetic-power)")
    sp.add_argument("--xi", nargs="+", metavar="EXPR",
                    help="basis override: golden zeta3 zeta2 e sqrt(k) p/q "
                         "or decimals")


def _spec_from_args(args) -> GeneratorSpec:
    if args.n_max is None:
        raise _UsageError("--gen requires --n-max")
    params = {}
    if args.params:
        try:
            params = json.loads(args.params)
        except json.JSONDecodeError as e:
            raise _UsageError(f"--params is not valid JSON: {e.msg}")
        if not isinstance(params, dict):
            raise _UsageError("--params must be a JSON object")
    if args.gen.startswith("apery"):
        params.setdefault("prec", args.prec)
    return GeneratorSpec(args.gen, args.n_max, params)


def _load_sequence(args):
    if bool(args.input) == bool(args.gen):
        raise _UsageError("exactly one of --input / --gen is required")
    if args.input:
        return import_jsonl(args.input)
    return generate(_spec_from_args(args))


def _basis_for(args, seq) -> Basis:
    if args.xi:
        try:
            return Basis(tuple(parse_real(x, args.prec) for x in args.xi))
        except ValueError as e:
            raise _UsageError(str(e))
    prov = seq.provenance
    if isinstance(prov, dict) and prov.get("generator") in GENERATORS:
        params = dict(prov.get("params", {}))
        n_max = params.get("n_max")
        if not (isinstance(n_max, int) and n_max >= 3):
            n_max = 3
        return default_basis(GeneratorSpec(prov["generator"], n_max, params))
    raise _UsageError("no basis available: pass --xi or an input with "
                      "generator provenance")


def _explicit_basis(args) -> Basis:
    try:
        return Basis(tuple(parse_real(x, args.prec) for x in args.xi))
    except ValueError as e:
        raise _UsageError(str(e))


# ---------------------------------------------------------------------------
# subcommands


def _cmd_generate(args):
    seq = generate(_spec_from_args(args))
    text = dumps_jsonl(seq)
    if args.output:
        with open(args.output, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return None, None


def _cmd_roundtrip(args):
    with open(args.input, "r", encoding="utf-8") as fh:
        original = fh.read()
    seq = loads_jsonl(original)
    canonical = dumps_jsonl(seq)
    again = loads_jsonl(canonical)
    lossless = (again.records == seq.records
                and again.provenance == seq.provenance
                and dumps_jsonl(again) == canonical)
    if args.output:
        with open(args.output, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(canonical)
    status = "success" if lossless else "violated"
    return status, {
        "lossless": lossless,
        "already_canonical": original == canonical,
        "records": len(seq),
        "p": seq.p,
        "canonical_bytes": len(canonical.encode()),
    }


def _cmd_estimate(args):
    seq = _load_sequence(args)
    basis = _basis_for(args, seq)
    prof = profile(seq, basis, args.prec, args.tol)
    decided = (all(b is not None for b in prof.tau)
               and all(b is not None for b in prof.gamma)
               and prof.growth is not None)
    return ("success" if decided else "unknown"), {
        "records": len(seq), "p": seq.p, "profile": prof.to_json()}


def _cmd_check_nesterenko(args):
    seq = _load_sequence(args)
    basis = _basis_for(args, seq)
    rep = check_nesterenko(seq, basis, args.prec, args.tol)
    status = {TriBool.TRUE: "holds", TriBool.FALSE: "violated",
              TriBool.UNKNOWN: "unknown"}[rep.consistent]
    return status, rep.to_json()


def _cmd_check_siegel(args):
    seq = _load_sequence(args)
    basis = _basis_for(args, seq)
    rep = check_siegel(seq, basis, args.n1, args.n2, args.prec)
    ok = (rep.alpha0_ok and rep.det_nonzero and rep.rank_propagates
          and rep.det_consistent is not TriBool.FALSE)
    return ("holds" if ok else "violated"), rep.to_json()


def _cmd_verify(args):
    seq = _load_sequence(args)
    basis = _basis_for(args, seq)
    verdicts = [verify_conclusion(seq, basis, args.tau, Q, args.eps,
                                  args.prec, args.budget)
                for Q in args.Q]
    statuses = [v.status for v in verdicts]
    if "violated" in statuses:
        overall = "violated"
    elif "unknown" in statuses:
        overall = "unknown"
    else:
        overall = "holds"
    return overall, {"verdicts": [v.to_json() for v in verdicts]}


def _cmd_construct_primal(args):
    basis = _explicit_basis(args)
    out = construct_primal_form(basis, args.tau, args.delta, args.Q,
                                slack=args.slack, prec=args.prec,
                                budget=args.budget, gamma=args.gamma)
    return "success", out.to_json()


def _cmd_construct_dual(args):
    basis = _explicit_basis(args)
    out = construct_dual_witness(basis, args.tau, args.gamma, args.delta,
                                 args.Q, args.eps, prec=args.prec,
                                 budget=args.budget)
    return "success", out.to_json()


# ---------------------------------------------------------------------------
# parser


def build_parser() -> _Parser:
    p = _Parser(prog="latforms",
                description="Exact checks for sequences of integer linear "
                            "forms with divisor lattices.")
    p.add_argument("--version", action="version",
                   version=f"latforms {__version__}")
    sub = p.add_subparsers(dest="command", required=True, metavar="COMMAND")

    sp = sub.add_parser("generate", help="emit a built-in sequence as JSONL")
    sp.add_argument("--gen", choices=GENERATORS, required=True)
    sp.add_argument("--n-max", dest="n_max", type=_posint, required=True)
    sp.add_argument("--params", metavar="JSON")
    sp.add_argument("--prec", type=_posint, default=_default_prec())
    sp.add_argument("--output", metavar="PATH")
    sp.set_defaults(handler=_cmd_generate, data_output=True)

    sp = sub.add_parser("estimate",
                        help="exponent profile (tau, gamma, growth)")
    _add_input(sp)
    sp.add_argument("--tol", type=_frac, default=Fraction(1, 20),
                    help="oscillation tolerance (default 1/20)")
    _add_common(sp)
    sp.set_defaults(handler=_cmd_estimate)

    sp = sub.add_parser("check-nesterenko",
                        help="hypothesis report: divisor chains, decay "
                             "traces, norm growth")
    _add_input(sp)
    sp.add_argument("--tol", type=_frac, default=Fraction(1, 20))
    _add_common(sp)
    sp.set_defaults(handler=_cmd_check_nesterenko)

    sp = sub.add_parser("check-siegel",
                        help="recurrence fits, alpha_0(n) != 0, exact "
                             "window determinant")
    _add_input(sp)
    sp.add_argument("--n1", type=_posint, required=True)
    sp.add_argument("--n2", type=_posint, required=True)
    _add_common(sp)
    sp.set_defaults(handler=_cmd_check_siegel)

    sp = sub.add_parser("verify",
                        help="exhaustive finite-Q check of the conclusion "
                             "|a.xi| > Q^(-1-eps)")
    _add_input(sp)
    sp.add_argument("--tau", nargs="+", type=_frac, required=True)
    sp.add_argument("--Q", nargs="+", type=_posint, required=True)
    sp.add_argument("--eps", type=_frac, required=True)
    _add_common(sp, budget=True)
    sp.set_defaults(handler=_cmd_verify)

    sp = sub.add_parser("construct-primal",
                        help="small form in the divisor lattice via "
                             "directed Minkowski search")
    sp.add_argument("--xi", nargs="+", metavar="EXPR", required=True)
    sp.add_argument("--tau", nargs="+", type=_frac, required=True)
    sp.add_argument("--delta", nargs="+", type=_posint, required=True)
    sp.add_argument("--Q", type=_posint, required=True)
    sp.add_argument("--gamma", nargs="+", type=_frac,
                    help="asymptotic divisor exponents (default all zero)")
    sp.add_argument("--slack", type=_frac, default=Fraction(1, 20))
    _add_common(sp, budget=True)
    sp.set_defaults(handler=_cmd_construct_primal)

    sp = sub.add_parser("construct-dual",
                        help="dual witness violating the conclusion at "
                             "scale Q")
    sp.add_argument("--xi", nargs="+", metavar="EXPR", required=True)
    sp.add_argument("--tau", nargs="+", type=_frac, required=True)
    sp.add_argument("--gamma", nargs="+", type=_frac, required=True)
    sp.add_argument("--delta", nargs="+", type=_posint, required=True)
    sp.add_argument("--Q", type=_posint, required=True)
    sp.add_argument("--eps", type=_frac, required=True)
    _add_common(sp, budget=True)
    sp.set_defaults(handler=_cmd_construct_dual)

    sp = sub.add_parser("roundtrip",
                        help="canonicalize a JSONL file and certify the "
                             "round trip is lossless")
    sp.add_argument("--input", metavar="PATH", required=True)
    sp.add_argument("--output", metavar="PATH",
                    help="write the canonical form here")
    sp.set_defaults(handler=_cmd_roundtrip, data_output=True)

    return p


# ---------------------------------------------------------------------------
# driver


def _emit(report: dict, out: Optional[str]) -> None:
    text = json.dumps(_jsonable(report), sort_keys=True, indent=2) + "\n"
    if out:
        with open(out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _config_echo(args) -> dict:
    skip = {"handler", "command", "output", "data_output"}
    return {k: _jsonable(v) for k, v in vars(args).items() if k not in skip}


def run(argv: Optional[list[str]] = None) -> int:
    try:
        parser = build_parser()
        args = parser.parse_args(argv)
    except _UsageError as e:
        print(f"latforms: error: {e}", file=sys.stderr)
        return 1
    _apply_prec_cap(getattr(args, "prec_cap", _HARD_CAP))
    # for data-path commands --output names the JSONL, so reports go to stdout
    report_out = None if getattr(args, "data_output", False) \
        else getattr(args, "output", None)
    try:
        status, result = args.handler(args)
    except _UsageError as e:
        print(f"latforms: error: {e}", file=sys.stderr)
        return 1
    except InfeasibleSpec as e:
        status = "refused"
        result = {"why": str(e),
                  "condition": None if e.report is None
                  else e.report.to_json()}
    except Refusal as e:
        status = "refused"
        result = {"why": str(e),
                  "condition": None if e.report is None
                  else e.report.to_json(),
                  "detail": _jsonable(e.detail)}
    except SearchFailed as e:
        status = "unknown"
        result = {"why": str(e), "unknowns": e.unknowns}
    except (BudgetExceeded, UncertifiedComparison) as e:
        status = "unknown"
        result = {"why": str(e)}
    except (ValidationError, MissingRecord, RecordsExhausted, OSError,
            ValueError) as e:
        print(f"latforms: error: {e}", file=sys.stderr)
        return 1
    if status is None:
        return 0  # generate already wrote its JSONL
    report = {
        "command": args.command,
        "version": __version__,
        "timestamp": datetime.now(timezone.utc).isoformat(),
        "config": _config_echo(args),
        "status": status,
        "result": result,
    }
    _emit(report, report_out)
    return _EXIT[status]


def main() -> None:
    sys.exit(run())
