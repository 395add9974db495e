"""Command-line front end: ``skewtorsion verify`` and ``skewtorsion tower``."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import __version__
from .catalog import catalog_list, load
from .config import DEFAULT
from .homogeneous import bianchi_check, canonical_homogeneous, validate_model
from .modelfile import ModelFileError, load_model_file
from .nearly_kahler import (
    build_nk_quotient,
    check_axis_equivariance,
    check_characteristic_match,
    check_reducible_holonomy,
    check_special_algebraic_torsion,
    check_TJ_formulas,
    compute_F,
)
from .quaternionic import build_qk_quotient, check_quaternionic_parallelism, measure_nablaJ2
from .report import RefusedError, VerificationReport
from .sasaki import (
    NearlyKahlerStructure,
    canonical_connection,
    canonical_connection_report,
    check_3ad,
    check_nearly_kahler,
    validate_acm,
)
from .submersion import check_fiber_geometry, check_nablavert, check_projecttau, check_torsion_in_torsion
from .tower import run_tower

SUITES = ("acm", "3ad", "canonical-connection", "bianchi", "submersion-hypotheses", "nk", "qk")

EXIT_OK, EXIT_FAIL, EXIT_LOAD = 0, 1, 2

TOWER_HELP = """\
Build M -> N (nearly Kaehler) -> N' (quaternionic Kaehler) and the direct
quotient of M along all three Reeb fields, then compare the two 4-dimensional
bases.

Tolerance floor: with parameters that are not exact binary fractions, such as
--params 0.1,0.2, float-mode residuals reach the 1e-14 level, so

    skewtorsion tower --model sp2_s7 --params 0.1,0.2 --tol 1e-15

fails (exit 1).  This is the expected demonstration of the float noise floor.
The same run with --mode rational reports exact zeros, and dyadic parameters
such as 1,2 are exact in float and pass even at 1e-15.
"""


class LoadError(Exception):
    pass


def parse_params(text: str | None, exact_mode: bool):
    if not text:
        return None
    out = []
    for part in text.split(","):
        f = Fraction(part.strip())
        out.append(f if exact_mode else float(f))
    return tuple(out)


def load_entry(ref: str, params, exact_mode: bool):
    path = Path(ref)
    try:
        if path.suffix in (".yaml", ".yml", ".json") or path.exists():
            entry = load_model_file(path, exact_mode)
        else:
            entry = load(ref, params, exact_mode)
    except RefusedError:
        raise
    except (ModelFileError, KeyError, ValueError, OSError) as err:
        raise LoadError(str(err)) from err
    rep = validate_model(entry.model)
    if not rep.passed:
        raise LoadError(f"model '{entry.name}' fails validation: " + ", ".join(c.name for c in rep.failures))
    return entry


def _not_applicable(rep: VerificationReport, suite: str, why: str):
    rep.add(f"{suite}: not applicable", 0.0, 1.0, vacuous=True, notes=why)


def _refused(rep: VerificationReport, suite: str, err: RefusedError):
    if err.report is not None:
        for c in err.report.failures:
            rep.checks.append(type(c)(f"{suite}: {c.name}", c.residual, c.tolerance, c.status, c.anchor, c.notes))
    rep.refuse(f"{suite}: refused at gate '{err.gate}'", notes=str(err))


def run_suite(entry, suite: str, tol: float, rep: VerificationReport):
    t = entry.triple
    if suite in ("acm", "3ad", "canonical-connection") and t is None:
        return _not_applicable(rep, suite, "model carries no 3-(alpha, delta) structure")
    if suite == "acm":
        rep.extend(validate_acm(t, tol), "acm: ")
    elif suite == "3ad":
        rep.extend(check_3ad(t, tol), "3ad: ")
    elif suite == "canonical-connection":
        conn = canonical_connection(t, tol, check=False)
        rep.extend(canonical_connection_report(t, conn, tol), "canonical-connection: ")
    elif suite == "bianchi":
        conn = canonical_connection(t, tol, check=False) if t is not None else canonical_homogeneous(entry.model)
        rep.extend(bianchi_check(conn, tol), "bianchi: ")
    elif suite == "submersion-hypotheses":
        if t is None:
            return _not_applicable(rep, suite, "no Reeb fields to use as vertical directions")
        conn = canonical_connection(t, tol, check=False)
        verticals = [("span(xi_1,xi_2,xi_3)", t.vertical)]
        if t.is_parallel:
            verticals.insert(0, ("span(xi_1)", t.xi[0][:, None]))
        for label, v in verticals:
            for f in (check_projecttau, check_torsion_in_torsion, check_fiber_geometry, check_nablavert):
                rep.extend(f(conn, v, tol), f"submersion-hypotheses [{label}]: ")
    elif suite == "nk":
        if t is None and entry.J is not None:
            rep.extend(check_nearly_kahler(entry.model, entry.J, tol), "nk: ")
            return
        if t is None:
            return _not_applicable(rep, suite, "needs a 3-(alpha, delta) structure or J")
        res = build_nk_quotient(t, tol=tol)
        rep.extend(res.report, "nk: ")
        for f in (check_TJ_formulas, check_characteristic_match, check_special_algebraic_torsion):
            rep.extend(f(res, tol=tol), "nk: ")
        rep.extend(compute_F(res, tol)[1], "nk: ")
        if res.base.dm >= 4:
            rep.extend(check_reducible_holonomy(res, tol), "nk: ")
        if not entry.model.exact:
            rep.extend(check_axis_equivariance(t, [1.0, 2.0, 3.0], tol), "nk: ")
    elif suite == "qk":
        if t is not None:
            res = build_nk_quotient(t, tol=tol)
            nk, vertical = res.nk, res.vertical
        elif entry.J is not None and entry.V is not None:
            nk = NearlyKahlerStructure(entry.model, entry.J)
            v = entry.V
            vertical = np.stack([v, entry.J @ v], axis=1)
        else:
            return _not_applicable(rep, suite, "needs a 3-(alpha, delta) structure or (J, V)")
        if nk.model.dm < 4:
            return _not_applicable(rep, suite, f"base of dimension {nk.model.dm} leaves no room for a vertical plane")
        V = vertical[:, 0]
        qk = build_qk_quotient(nk, vertical, V, tol)
        rep.extend(qk.report, "qk: ")
        rep.extend(check_quaternionic_parallelism(qk, tol), "qk: ")
        rep.extend(measure_nablaJ2(nk, vertical, V, qk.k, tol)[2], "qk: ")


def cmd_verify(args) -> int:
    exact_mode = args.mode == "rational"
    try:
        entry = load_entry(args.model, parse_params(args.params, exact_mode), exact_mode)
    except (LoadError, RefusedError) as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_LOAD
    rep = VerificationReport(f"verify {entry.name}", fingerprint=entry.model.fingerprint(), mode=args.mode)
    suites = SUITES if args.suite == "all" else (args.suite,)
    for suite in suites:
        if args.suite == "all" and suite in ("nk", "qk") and entry.triple is not None \
                and not entry.triple.is_parallel:
            _not_applicable(rep, suite, "quotient along one Reeb field needs delta = 2 alpha; "
                                        "run --suite nk to see the refusal")
            continue
        try:
            run_suite(entry, suite, args.tol, rep)
        except RefusedError as err:
            _refused(rep, suite, err)
    return _finish(rep, args)


def cmd_tower(args) -> int:
    exact_mode = args.mode == "rational"
    try:
        entry = load_entry(args.model, parse_params(args.params, exact_mode), exact_mode)
    except (LoadError, RefusedError) as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_LOAD
    rep = VerificationReport(f"tower {entry.name}", fingerprint=entry.model.fingerprint(), mode=args.mode)
    if entry.triple is None:
        print("error: tower needs a model with a 3-(alpha, delta) structure", file=sys.stderr)
        return EXIT_LOAD
    try:
        res = run_tower(entry.triple, args.tol)
        rep.extend(res.report)
    except RefusedError as err:
        _refused(rep, "tower", err)
    return _finish(rep, args)


def _finish(rep: VerificationReport, args) -> int:
    print(rep.summary())
    if args.report:
        Path(args.report).write_text(rep.to_json() + "\n")
    return EXIT_OK if rep.passed else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="skewtorsion",
                                description="Verify parallel skew-torsion structures on reductive homogeneous models.")
    p.add_argument("--version", action="version", version=__version__)
    p.add_argument("--list", action="store_true", help="list catalog models and exit")
    sub = p.add_subparsers(dest="command")

    def common(sp):
        sp.add_argument("--model", required=True, help="catalog name or path to a .yaml/.json model file")
        sp.add_argument("--params", help="comma-separated parameters, e.g. 1,2 or 1/2,1")
        sp.add_argument("--tol", type=float, default=DEFAULT.check, help="residual tolerance (default 1e-9)")
        sp.add_argument("--mode", choices=("float", "rational"), default="float")
        sp.add_argument("--report", help="write the structured JSON report to this path")
        sp.add_argument("-v", "--verbose", action="store_true")

    v = sub.add_parser("verify", help="run verification suites on one model")
    common(v)
    v.add_argument("--suite", choices=SUITES + ("all",), default="all",
                   help="'all' runs every suite applicable to the model (nk and qk need delta = 2 alpha)")
    v.set_defaults(func=cmd_verify)
    t = sub.add_parser("tower", help="run the nearly Kaehler / quaternionic tower", description=TOWER_HELP,
                       formatter_class=argparse.RawDescriptionHelpFormatter)
    common(t)
    t.set_defaults(func=cmd_tower)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.list:
        print(json.dumps(catalog_list(), indent=1))
        return EXIT_OK
    if not args.command:
        parser.print_help()
        return EXIT_LOAD
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
