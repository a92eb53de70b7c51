"""Command-line front end emitting deterministic JSON reports.

Exit codes: 0 success, 1 verification failure (with a witness in the
report), 2 input error.  Sets are reported as sorted label lists and
rationals as "p/q" strings, so identical inputs yield identical reports
(the timing block aside).
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from fractions import Fraction
from pathlib import Path
from typing import Any, Optional

from . import density as D
from . import hyper as H
from . import measure as M
from . import oracle as O
from . import spacefile as SF
from .spacefile import format_rational as q

EXIT_OK = 0
EXIT_VERIFICATION = 1
EXIT_INPUT = 2


class VerificationFailure(Exception):
    """Carries the partially built report for an exit-1 outcome."""

    def __init__(self, results: dict, verification: dict):
        self.results = results
        self.verification = verification
        super().__init__("verification failed")


def _labels(s: M.MeasurableSet) -> list[str]:
    return s.labels()


def _weights_map(m: M.SignedMeasure) -> dict[str, str]:
    return {
        label: q(m.weights[i]) for i, label in enumerate(m.space.atoms)
    }


def _parse_fraction(text: str, what: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise SF.SpaceFileError(f"bad rational for {what}: {text!r}")


def _density_map(f: D.SimpleDensity) -> dict[str, str]:
    av = f.atom_values()
    return {label: q(av[i]) for i, label in enumerate(f.space.atoms)}


def _tiebreak(sf: SF.SpaceFile, name: Optional[str]) -> M.Measure:
    if name is None:
        return M.Measure.uniform(sf.space)
    return sf.nonnegative_measure(name)


def cmd_hahn(sf: SF.SpaceFile, args) -> dict:
    mu = sf.measure(args.measure)
    nu = _tiebreak(sf, args.tiebreak)
    m_plus, m_minus = M.hahn_decomposition(mu, nu)
    results = {
        "positive_set": _labels(m_plus),
        "negative_set": _labels(m_minus),
        "value": q(mu(m_plus)),
        "tiebreak_value": q(nu(m_plus)),
    }
    verification: dict[str, Any] = {}
    if len(sf.space) <= O.ATOM_LIMIT:
        _, best = O.max_measure_subset(mu, nu)
        verification["oracle_max_matches"] = mu(m_plus) == best
        if not verification["oracle_max_matches"]:
            verification["witness"] = q(best)
            raise VerificationFailure(results, verification)
    return {"results": results, "verification": verification}


def cmd_jordan(sf: SF.SpaceFile, args) -> dict:
    mu = sf.measure(args.measure)
    nu = _tiebreak(sf, args.tiebreak)
    plus, minus = M.jordan_decomposition(mu, nu)
    m_plus, m_minus = M.hahn_decomposition(mu, nu)
    results = {
        "mu_plus": _weights_map(plus),
        "mu_minus": _weights_map(minus),
        "positive_set": _labels(m_plus),
        "negative_set": _labels(m_minus),
    }
    consistent = all(
        plus.weights[i] - minus.weights[i] == mu.weights[i]
        for i in range(len(mu.space))
    )
    verification = {"difference_reconstructs_mu": consistent}
    if not consistent:
        raise VerificationFailure(results, verification)
    return {"results": results, "verification": verification}


def cmd_check_ac(sf: SF.SpaceFile, args) -> dict:
    lam = sf.nonnegative_measure(args.num)
    nu = sf.nonnegative_measure(args.den)
    ok, witness = M.is_absolutely_continuous(lam, nu)
    results = {
        "absolutely_continuous": ok,
        "witness": _labels(witness) if witness is not None else None,
    }
    if not ok:
        raise VerificationFailure(results, {"definition_holds": False})
    return {"results": results, "verification": {"definition_holds": True}}


def _derive_one(
    lam: M.Measure, nu: M.Measure, chain: D.RefinementChain, verify: bool
) -> tuple[dict, dict, bool]:
    outcome = D.rn_derive(lam, nu, chain)
    results = {
        "density": _density_map(outcome.density),
        "degenerate": outcome.degenerate,
        "levels": [
            {
                "level": r.level,
                "l1_to_final": q(r.l1_to_final),
                "converged": r.converged,
            }
            for r in outcome.level_reports
        ],
    }
    verification: dict[str, Any] = {}
    ok = True
    if verify:
        reference = O.direct_density(lam, nu)
        verification["matches_direct_density"] = (
            outcome.density.atom_values() == reference.atom_values()
        )
        if len(lam.space) <= O.ATOM_LIMIT:
            exact = O.exhaustive_identity_check(lam, nu, outcome.density)
            verification["exact"] = exact
        else:
            discrepancy = D.verify_density(lam, nu, outcome.density, sampled=True)
            verification["exact"] = discrepancy == 0
            verification["mode"] = "sampled"
        ok = verification["matches_direct_density"] and verification["exact"]
    return results, verification, ok


def cmd_rn_derive(sf: SF.SpaceFile, args) -> dict:
    num = sf.measure(args.num)
    nu = sf.nonnegative_measure(args.den)
    chain = sf.chain(args.chain)
    verification: dict[str, Any] = {}
    if num.is_nonnegative():
        lam = M.Measure(num.space, num.weights)
        results, verification, ok = _derive_one(lam, nu, chain, args.verify)
    else:
        # Signed numerator: split first, then derive a density per half.
        lam_plus, lam_minus = M.jordan_decomposition(num, nu)
        res_p, ver_p, ok_p = _derive_one(lam_plus, nu, chain, args.verify)
        res_m, ver_m, ok_m = _derive_one(lam_minus, nu, chain, args.verify)
        results = {"f_plus": res_p, "f_minus": res_m}
        verification = {"f_plus": ver_p, "f_minus": ver_m}
        ok = ok_p and ok_m
    if args.plot:
        from . import plots

        figdir = Path(args.plot)
        figdir.mkdir(parents=True, exist_ok=True)
        level_blocks = (
            [results] if "levels" in results else [results["f_plus"], results["f_minus"]]
        )
        figures = []
        for tag, block in zip(("f", "f_plus", "f_minus"), level_blocks):
            levels = [r["level"] for r in block["levels"]]
            errs = [Fraction(r["l1_to_final"]) for r in block["levels"]]
            fig = plots.render_error_decay(
                levels,
                {"L1 distance to final density": errs},
                figdir / f"rn_derive_{tag}.png",
                "Refinement-chain convergence",
            )
            figures.append(str(fig))
        results = dict(results, figures=figures)
    if args.verify and not ok:
        raise VerificationFailure(results, verification)
    return {"results": results, "verification": verification}


def cmd_approx(sf: SF.SpaceFile, args) -> dict:
    lam = sf.nonnegative_measure(args.num)
    nu = sf.nonnegative_measure(args.den)
    f = D.atom_density(lam, nu, D.FiniteAlgebra.atomic(sf.space))
    reports = [
        D.approximation_report(f, nu, n) for n in range(1, args.levels + 1)
    ]
    results: dict[str, Any] = {
        "density": _density_map(f),
        "reports": [
            {
                "level": r.level,
                "l1_error": q(r.l1_error),
                "tail_mass": q(r.tail_mass),
                "bound": q(r.bound),
                "converged": r.converged,
            }
            for r in reports
        ],
    }
    if args.plot:
        from . import plots

        figdir = Path(args.plot)
        figdir.mkdir(parents=True, exist_ok=True)
        fig = plots.render_error_decay(
            [r.level for r in reports],
            {
                "L1 error": [r.l1_error for r in reports],
                "bound": [r.bound for r in reports],
            },
            figdir / "approx_convergence.png",
            "Dyadic approximation error and certified bound",
        )
        results["figures"] = [str(fig)]
    verification = {
        "bound_respected": all(r.l1_error <= r.bound for r in reports)
    }
    return {"results": results, "verification": verification}


def cmd_levelset(sf: SF.SpaceFile, args) -> dict:
    lam = sf.nonnegative_measure(args.num)
    nu = sf.nonnegative_measure(args.den)
    f = D.atom_density(lam, nu, D.FiniteAlgebra.atomic(sf.space))
    a = _parse_fraction(args.at, "--at")
    if args.band is not None:
        b = _parse_fraction(args.band, "--band")
        s = D.level_band(f, a, b)
        kind = "band"
    else:
        s = D.level_set(f, a)
        kind = "level_set"
    nu_gap, mu_gap = D.hahn_level_correspondence(lam, nu, f, a)
    results = {
        "kind": kind,
        "set": _labels(s),
        "nu_mass": q(nu(s)),
        "lam_mass": q(lam(s)),
    }
    verification = {
        "hahn_gap_nu": q(nu_gap),
        "hahn_gap_affine": q(mu_gap),
        "hahn_correspondence": nu_gap == 0 and mu_gap == 0,
    }
    return {"results": results, "verification": verification}


def cmd_limsup(sf: SF.SpaceFile, args) -> dict:
    spec = sf.sequence(args.sequence)
    s = M.limsup_sets(spec)
    results = {"limsup": _labels(s)}
    if "nu" in sf.measures and sf.measures["nu"].is_nonnegative():
        nu = sf.nonnegative_measure("nu")
        results["nu_mass"] = q(nu(s))
    return {"results": results, "verification": {}}


def _hyper_demo(args) -> dict:
    horizon = args.horizon
    tolerance = _parse_fraction(args.tolerance, "--tolerance")
    one = H.HyperReal.of(1)
    if args.demo == "st":
        if args.variant == "constant":
            x = H.HyperReal.of(Fraction(3, 7))
        else:
            x = H.arith(one, H.arith(one, H.HyperReal.omega(), "/"), "+")
        value = H.standard_part(x, tolerance, horizon)
        return {
            "results": {
                "variant": args.variant,
                "standard_part": q(value) if value is not None else "unknown",
            },
            "verification": {},
        }
    if args.demo == "limit":
        target = _parse_fraction(args.target, "--target")
        if args.variant == "oscillating":
            seq = lambda n: Fraction((-1) ** n)
        else:
            seq = lambda n: Fraction(1, n + 1)
        horizons = [max(8, horizon // 16), max(8, horizon // 4), horizon]
        v = H.check_limit(seq, target, horizons)
        return {
            "results": {
                "variant": args.variant,
                "target": q(target),
                "verdict": v.status.value,
                "reason": v.reason,
            },
            "verification": {},
        }
    if args.demo == "ucont":
        if args.variant == "step":
            f = lambda x: Fraction(0) if x < Fraction(1, 2) else Fraction(1)
            v = H.check_uniform_continuity(f, args.grid, horizon)
        else:
            f = lambda x: x * x
            v = H.check_uniform_continuity(
                f, args.grid, horizon, modulus=lambda eps: eps / 2
            )
        witness = (
            [q(w) for w in v.witness] if isinstance(v.witness, tuple) else None
        )
        return {
            "results": {
                "variant": args.variant,
                "verdict": v.status.value,
                "witness": witness,
                "reason": v.reason,
            },
            "verification": {},
        }
    # rs
    parts = (
        H.PartitionSequence.powers_of_three()
        if args.partition == "thirds"
        else H.PartitionSequence.dyadic()
    )
    f = {
        "linear": lambda x: x,
        "square": lambda x: x * x,
        "constant": lambda x: Fraction(1),
    }[args.variant]
    g = lambda x: x
    value = H.rs_integral(f, g, parts, tolerance, horizon)
    return {
        "results": {
            "variant": args.variant,
            "partition": args.partition,
            "integral": q(value) if value is not None else "unknown",
        },
        "verification": {},
    }


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rnforge",
        description="Exact decompositions and densities on finite measure spaces.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def with_input(p):
        p.add_argument("--input", required=True, help="space file (JSON)")
        return p

    p = with_input(sub.add_parser("hahn", help="Hahn decomposition of a signed measure"))
    p.add_argument("--measure", required=True)
    p.add_argument("--tiebreak", default=None, help="nonnegative tie-break measure")

    p = with_input(sub.add_parser("jordan", help="Jordan decomposition"))
    p.add_argument("--measure", required=True)
    p.add_argument("--tiebreak", default=None)

    p = with_input(sub.add_parser("check-ac", help="absolute continuity check"))
    p.add_argument("--num", required=True)
    p.add_argument("--den", required=True)

    p = with_input(sub.add_parser("rn-derive", help="derivative along a refinement chain"))
    p.add_argument("--num", required=True)
    p.add_argument("--den", required=True)
    p.add_argument("--chain", required=True)
    p.add_argument("--verify", action="store_true")
    p.add_argument("--plot", default=None, help="directory for figures")

    p = with_input(sub.add_parser("approx", help="dyadic approximation reports"))
    p.add_argument("--num", required=True)
    p.add_argument("--den", required=True)
    p.add_argument("--levels", type=int, required=True)
    p.add_argument("--plot", default=None, help="directory for figures")

    p = with_input(sub.add_parser("levelset", help="density level sets and bands"))
    p.add_argument("--num", required=True)
    p.add_argument("--den", required=True)
    p.add_argument("--at", required=True, help="threshold P/Q")
    p.add_argument("--band", default=None, help="upper threshold P/Q")

    p = with_input(sub.add_parser("limsup", help="limsup of a set sequence"))
    p.add_argument("--sequence", required=True)

    p = sub.add_parser("hyper-demo", help="sequence-model calculus demonstrations")
    p.add_argument("demo", choices=["st", "limit", "ucont", "rs"])
    p.add_argument("--horizon", type=int, required=True)
    p.add_argument("--tolerance", required=True, help="rational, e.g. 1/1000000")
    p.add_argument("--variant", default=None)
    p.add_argument("--target", default="0", help="limit target (limit demo)")
    p.add_argument("--grid", type=int, default=64)
    p.add_argument("--partition", choices=["dyadic", "thirds"], default="dyadic")

    p = sub.add_parser("examples", help="write the bundled example space files")
    p.add_argument("--dir", required=True)

    return parser


_DEFAULT_VARIANTS = {"st": "omega", "limit": "inverse", "ucont": "square", "rs": "linear"}


def run(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    started = time.perf_counter()
    report: dict[str, Any] = {"command": [args.command] + (argv or sys.argv[1:])[1:]}
    code = EXIT_OK
    try:
        if args.command == "examples":
            try:
                written = SF.emit_example_files(args.dir)
            except OSError as exc:
                print(f"error: cannot write examples: {exc}", file=sys.stderr)
                return EXIT_INPUT
            report["results"] = {"written": [str(p) for p in written]}
            report["verification"] = {}
        elif args.command == "hyper-demo":
            if args.variant is None:
                args.variant = _DEFAULT_VARIANTS[args.demo]
            report["command"] = [args.command, args.demo]
            body = _hyper_demo(args)
            report.update(body)
        else:
            sf = SF.load(args.input)
            report["input"] = {"path": args.input, "digest": sf.digest}
            handler = {
                "hahn": cmd_hahn,
                "jordan": cmd_jordan,
                "check-ac": cmd_check_ac,
                "rn-derive": cmd_rn_derive,
                "approx": cmd_approx,
                "levelset": cmd_levelset,
                "limsup": cmd_limsup,
            }[args.command]
            body = handler(sf, args)
            report.update(body)
    except VerificationFailure as vf:
        report["results"] = vf.results
        report["verification"] = vf.verification
        code = EXIT_VERIFICATION
    except (SF.SpaceFileError, M.SpaceMismatchError, M.PreconditionError,
            D.AbsoluteContinuityError, D.AlgebraMeasurabilityError,
            ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    report["timing"] = {"seconds": round(time.perf_counter() - started, 6)}
    print(json.dumps(report, indent=2, sort_keys=True))
    return code


def main() -> None:
    raise SystemExit(run())
