"""Command-line entry point.

Structured single results print as JSON and scans as CSV; ``--format``
switches between the two. Exit codes: 0 ok, 1 computation error (with a
stable code string), 2 usage error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any, Sequence

from . import __version__
from .elemdiv import complexity_N, min_complexity_double_coset, symplectic_elementary_divisors
from .errors import ParseError, SymplecticError
from .expander import expander_scan
from .finquot import (
    DEFAULT_CLOSURE_CAP,
    bounded_image_experiment,
    generated_subgroup,
    group_order,
    quotient_index_of_gamma_gamma,
)
from .fundom import HalfPlanePoint, height_complexity_experiment, reduce_to_fundamental
from .hecke import DEFAULT_ORBIT_CAP, coset_representatives, hecke_index
from .ratmat import denom, height, parse_matrix
from .symplectic import GeneratorSet, SimilitudeElement, standard_generators

logger = logging.getLogger(__name__)


@dataclass
class CommandResult:
    status: str = "ok"
    payload: Any = None
    columns: list[str] | None = None  # set for tabular payloads
    diagnostics: list[str] = field(default_factory=list)
    code: str = ""

    @property
    def exit_code(self) -> int:
        return 0 if self.status == "ok" else 1


def _num(x: Fraction | int):
    x = Fraction(x)
    return x.numerator if x.denominator == 1 else str(x)


def _fmt_float(x: float | None) -> str:
    return "" if x is None else f"{x:.12g}"


def _read_matrix(text: str) -> SimilitudeElement:
    return SimilitudeElement(parse_matrix(text))


def _read_matrix_file(path: str) -> list[SimilitudeElement]:
    out = []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        line = line.split("#", 1)[0].strip()
        if line:
            out.append(_read_matrix(line))
    return out


def _read_gens(path: str, g: int | None) -> GeneratorSet:
    mats = _read_matrix_file(path)
    if not mats:
        if g is None:
            raise ParseError("empty generator file needs --g")
        return GeneratorSet(g, ())
    return GeneratorSet(mats[0].g, tuple(mats))


# -- subcommands ------------------------------------------------------------------


def cmd_elemdiv(args) -> CommandResult:
    M = _read_matrix(args.matrix)
    f = symplectic_elementary_divisors(M)
    return CommandResult(
        payload={
            "a": list(f.a),
            "b": list(f.b),
            "nu": _num(M.nu),
            "kappa": f.kappa.matrix.to_text(),
            "lambda": f.lambda_.matrix.to_text(),
            "delta": f.delta.matrix.to_text(),
            "checked": f.is_valid_for(M),
        }
    )


def cmd_complexity(args) -> CommandResult:
    M = _read_matrix(args.matrix)
    return CommandResult(
        payload={
            "N": _num(complexity_N(M)),
            "N_min_double_coset": min_complexity_double_coset(M),
            "denom": denom(M.matrix),
            "height": height(M.matrix),
            "nu": _num(M.nu),
        }
    )


def cmd_hecke_index(args) -> CommandResult:
    M = _read_matrix(args.matrix)
    payload: dict[str, Any] = {"index": hecke_index(M, cap=args.cap), "nu": _num(M.nu)}
    if args.reps:
        payload["reps"] = [x.matrix.to_text() for x in coset_representatives(M, cap=args.cap)]
    return CommandResult(payload=payload)


def cmd_finquot_order(args) -> CommandResult:
    return CommandResult(payload={"g": args.g, "q": args.q, "order": group_order(args.g, args.q)})


def cmd_finquot_surjective(args) -> CommandResult:
    target = group_order(args.g, args.q)
    H = generated_subgroup(standard_generators(args.g), args.q, args.cap)
    return CommandResult(
        payload={
            "g": args.g,
            "q": args.q,
            "closure_size": len(H),
            "group_order": target,
            "surjective": len(H) == target,
        }
    )


def cmd_finquot_gamma_index(args) -> CommandResult:
    M = _read_matrix(args.matrix)
    return CommandResult(payload={"index": quotient_index_of_gamma_gamma(M, cap=args.cap), "nu": _num(M.nu)})


def cmd_finquot_image_index(args) -> CommandResult:
    gens = _read_gens(args.gens, args.g)
    if gens.g != args.g:
        raise ParseError(f"generators have genus {gens.g}, expected {args.g}")
    exp = bounded_image_experiment(gens, [args.q], cap=args.cap)
    row = exp.rows[0]
    return CommandResult(
        payload={
            "g": args.g,
            "q": row.q,
            "subgroup_order": row.subgroup_order,
            "index": row.index,
            "skipped": row.skipped,
        }
    )


def cmd_expander_scan(args) -> CommandResult:
    gens = _read_gens(args.gens, args.g) if args.gens else standard_generators(args.g)
    rows = expander_scan(gens, b=args.b, q_max=args.qmax, cap=args.cap, n_jobs=args.threads)
    return CommandResult(
        payload=[[r.q, "" if r.n is None else r.n, _fmt_float(r.gap), _fmt_float(r.sweep), r.excluded_reason] for r in rows],
        columns=["q", "n", "gap", "sweep", "excluded_reason"],
    )


def cmd_reduce_tau(args) -> CommandResult:
    tau, m = reduce_to_fundamental(HalfPlanePoint(args.re, args.im))
    return CommandResult(payload={"re": _fmt_float(tau.re), "im": _fmt_float(tau.im), "matrix": m.matrix.to_text()})


def cmd_height_scan(args) -> CommandResult:
    family = _read_matrix_file(args.family)
    rows, _ = height_complexity_experiment(HalfPlanePoint(args.re, args.im), family)
    return CommandResult(
        payload=[[i, r.N, r.H, str(r.ratio)] for i, r in enumerate(rows, start=1)],
        columns=["n", "N", "H", "ratio"],
    )


# -- parser and rendering --------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="symphecke", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("--format", choices=("json", "csv"), default=None)
    p.add_argument("--threads", type=int, default=1, help="worker processes for scans (default 1)")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("elemdiv", help="symplectic elementary divisors")
    s.add_argument("matrix")
    s.set_defaults(func=cmd_elemdiv, tabular=False)

    s = sub.add_parser("complexity", help="complexity N and its double-coset minimum")
    s.add_argument("matrix")
    s.set_defaults(func=cmd_complexity, tabular=False)

    s = sub.add_parser("hecke-index", help="[Γ : Γ_γ] by lattice orbit enumeration")
    s.add_argument("matrix")
    s.add_argument("--reps", action="store_true", help="emit coset representatives")
    s.add_argument("--cap", type=int, default=DEFAULT_ORBIT_CAP)
    s.set_defaults(func=cmd_hecke_index, tabular=False)

    fq = sub.add_parser("finquot", help="finite quotients Sp_2g(Z/qZ)")
    fsub = fq.add_subparsers(dest="fq_command", required=True)
    s = fsub.add_parser("order")
    s.add_argument("g", type=int)
    s.add_argument("q", type=int)
    s.set_defaults(func=cmd_finquot_order, tabular=False)
    s = fsub.add_parser("surjective")
    s.add_argument("g", type=int)
    s.add_argument("q", type=int)
    s.add_argument("--cap", type=int, default=DEFAULT_CLOSURE_CAP)
    s.set_defaults(func=cmd_finquot_surjective, tabular=False)
    s = fsub.add_parser("gamma-index")
    s.add_argument("matrix")
    s.add_argument("--cap", type=int, default=DEFAULT_CLOSURE_CAP)
    s.set_defaults(func=cmd_finquot_gamma_index, tabular=False)
    s = fsub.add_parser("image-index")
    s.add_argument("g", type=int)
    s.add_argument("q", type=int)
    s.add_argument("--gens", required=True, help="file with one generator matrix per line")
    s.add_argument("--cap", type=int, default=DEFAULT_CLOSURE_CAP)
    s.set_defaults(func=cmd_finquot_image_index, tabular=False)

    s = sub.add_parser("expander-scan", help="spectral gaps over b-th-power-free moduli")
    s.add_argument("--g", type=int, default=1)
    s.add_argument("--b", type=int, default=2)
    s.add_argument("--qmax", type=int, default=10)
    s.add_argument("--gens", default=None)
    s.add_argument("--cap", type=int, default=DEFAULT_CLOSURE_CAP)
    s.set_defaults(func=cmd_expander_scan, tabular=True)

    s = sub.add_parser("reduce-tau", help="reduce a point to the SL_2(Z) fundamental domain")
    s.add_argument("--re", type=float, required=True)
    s.add_argument("--im", type=float, required=True)
    s.set_defaults(func=cmd_reduce_tau, tabular=False)

    s = sub.add_parser("height-scan", help="height vs complexity over a family of matrices")
    s.add_argument("--family", required=True)
    s.add_argument("--re", type=float, default=0.0)
    s.add_argument("--im", type=float, default=1.0)
    s.set_defaults(func=cmd_height_scan, tabular=True)
    return p


def render(result: CommandResult, fmt: str) -> str:
    if result.status != "ok":
        body = {"status": "error", "code": result.code, "diagnostics": result.diagnostics}
        return json.dumps(body, sort_keys=True) + "\n"
    if fmt == "json":
        if result.columns is not None:
            data = [dict(zip(result.columns, row)) for row in result.payload]
            return json.dumps(data, sort_keys=True) + "\n"
        return json.dumps(result.payload, sort_keys=True) + "\n"
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    if result.columns is not None:
        w.writerow(result.columns)
        w.writerows(result.payload)
    else:
        keys = sorted(result.payload)
        w.writerow(keys)
        w.writerow(
            [json.dumps(result.payload[k]) if isinstance(result.payload[k], (list, dict, bool)) else result.payload[k] for k in keys]
        )
    return buf.getvalue()


def dispatch(argv: Sequence[str] | None = None) -> tuple[CommandResult, str]:
    """Parse ``argv`` and run the subcommand; returns the result and its rendering.

    Usage errors raise SystemExit(2) from argparse.
    """
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, stream=sys.stderr)
    fmt = args.format or ("csv" if args.tabular else "json")
    try:
        result = args.func(args)
    except SymplecticError as exc:
        result = CommandResult(status="error", code=exc.code, diagnostics=[str(exc)])
    except (OSError, ValueError) as exc:
        result = CommandResult(status="error", code="INVALID_INPUT", diagnostics=[str(exc)])
    return result, render(result, fmt)


def main(argv: Sequence[str] | None = None) -> int:
    result, text = dispatch(argv)
    sys.stdout.write(text)
    for d in result.diagnostics:
        print(d, file=sys.stderr)
    return result.exit_code


if __name__ == "__main__":
    sys.exit(main())
