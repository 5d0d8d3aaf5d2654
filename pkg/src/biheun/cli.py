"""Command-line front end: eigen, eval, classify, atlas and verify.

Every JSON document carries "schema": 1, complex numbers are written as
{"re": .., "im": ..} and split into two columns in CSV. Exit codes: 0 ok,
2 precondition failure, 3 numeric failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import errors as E
from .params import (
    CanonicalParams,
    GeneralParams,
    JimboMiwaParams,
    Painleve4Params,
    atlas_lines,
    canonical_to_general,
    classify_degeneration,
    from_jimbo_miwa,
    from_painleve4,
    general_to_canonical,
    to_jimbo_miwa,
    to_painleve4,
)

SCHEMA = 1
EXIT_OK, EXIT_PRECONDITION, EXIT_NUMERIC = 0, 2, 3

PRECONDITION_ERRORS = (
    E.CriterionError,
    E.PreconditionError,
    E.RegionError,
    E.DegenerateLambda,
    E.DomainError,
    E.DegenerateData,
    E.PoleError,
    E.DependenceError,
)


class UsageError(Exception):
    """Bad or missing command-line input (exit code 2)."""


# ---------------------------------------------------------------------------
# Parsing
# ---------------------------------------------------------------------------


def parse_complex(text: str) -> complex:
    s = text.strip().replace(" ", "").replace("i", "j")
    try:
        return complex(s)
    except ValueError as exc:
        raise UsageError(f"cannot parse number {text!r}") from exc


def parse_assignments(tokens: list[str] | None) -> dict[str, str]:
    """'a=1,b=2' or ['a=1', 'b=2'] -> {'a': '1', 'b': '2'}."""
    out: dict[str, str] = {}
    for tok in tokens or []:
        for part in tok.split(","):
            if not part:
                continue
            if "=" not in part:
                raise UsageError(f"expected key=value, got {part!r}")
            k, v = part.split("=", 1)
            out[k.strip()] = v.strip()
    return out


_ALIASES = {
    "canonical": {"a": "a", "alpha": "a", "b": "b", "beta": "b", "g": "g", "gamma": "g", "d": "d", "delta": "d"},
    "general": {"b": "b", "c": "c", "d": "d", "e": "e"},
    "jm": {"theta0": "theta0", "th0": "theta0", "thetaInf": "thetaInf", "thinf": "thetaInf", "t": "t", "lam": "lam", "lambda": "lam"},
    "p4": {"xi": "xi", "eta": "eta", "t": "t"},
}


def _keyed(form: str, tokens) -> dict[str, complex]:
    raw = parse_assignments(tokens)
    out = {}
    for k, v in raw.items():
        key = _ALIASES[form].get(k)
        if key is None:
            raise UsageError(f"unknown key {k!r} for --{form}")
        out[key] = parse_complex(v)
    return out


@dataclass(frozen=True)
class ParamInput:
    form: str
    values: dict

    def canonical(self) -> CanonicalParams:
        v = self.values
        if self.form == "canonical":
            return CanonicalParams(v.get("a", 0j), v.get("b", 0j), v.get("g", 0j), v.get("d", 0j))
        if self.form == "general":
            return general_to_canonical(self.general())
        return from_jimbo_miwa(self.jm())

    def general(self) -> GeneralParams:
        v = self.values
        if self.form == "general":
            return GeneralParams(v.get("b", 0j), v.get("c", 0j), v.get("d", 0j), v.get("e", 0j))
        return canonical_to_general(self.canonical())

    def jm(self) -> JimboMiwaParams:
        v = self.values
        if self.form == "jm":
            if "theta0" not in v or "thetaInf" not in v:
                raise UsageError("--jm needs theta0 and thetaInf")
            return JimboMiwaParams(v["theta0"], v["thetaInf"], v.get("t", 0j), v.get("lam"))
        if self.form == "p4":
            if "xi" not in v or "eta" not in v:
                raise UsageError("--p4 needs xi and eta")
            return from_painleve4(Painleve4Params(v["xi"], v["eta"]), v.get("t", 0j))
        return to_jimbo_miwa(self.canonical(), strict=False)


def param_input(args) -> ParamInput:
    for form in ("canonical", "general", "jm", "p4"):
        tokens = getattr(args, form, None)
        if tokens is not None:
            return ParamInput(form, _keyed(form, tokens))
    raise UsageError("one of --canonical, --general, --jm, --p4 is required")


def parse_grid(text: str, seed: int = 0) -> list[complex]:
    """circle:r=..,n=..[,cx=..] | segment:a=..,b=..,n=.. | disk:r=..,n=.. (random, seeded)."""
    kind, _, rest = text.partition(":")
    opts = parse_assignments([rest])
    n = int(opts.get("n", "16"))
    if n < 1:
        raise UsageError("grid needs n >= 1")
    if kind == "circle":
        r = float(opts.get("r", "1"))
        cx = parse_complex(opts.get("cx", "0"))
        return [cx + r * complex(math.cos(2 * math.pi * k / n), math.sin(2 * math.pi * k / n)) for k in range(n)]
    if kind == "segment":
        a = parse_complex(opts.get("a", "-1"))
        b = parse_complex(opts.get("b", "1"))
        return [a + (b - a) * (k / (n - 1) if n > 1 else 0.0) for k in range(n)]
    if kind == "disk":
        r = float(opts.get("r", "1"))
        rng = np.random.default_rng(seed)
        rad = r * np.sqrt(rng.uniform(0, 1, n))
        ang = rng.uniform(0, 2 * np.pi, n)
        return [complex(v) for v in rad * np.exp(1j * ang)]
    raise UsageError(f"unknown grid kind {kind!r}; use circle, segment or disk")


# ---------------------------------------------------------------------------
# Serialisation
# ---------------------------------------------------------------------------


def _clean(x: float) -> float | None:
    x = float(x)
    if not math.isfinite(x):
        return None
    return 0.0 if x == 0 else x


def cjson(z) -> dict:
    z = complex(z)
    return {"re": _clean(z.real), "im": _clean(z.imag)}


def dump_json(doc: dict) -> str:
    return json.dumps({"schema": SCHEMA, **doc}, indent=2, allow_nan=False) + "\n"


def dump_csv(header: list[str], rows: list[list]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow(["" if v is None else (repr(_clean(v)) if isinstance(v, float) else v) for v in row])
    return buf.getvalue()


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------


def cmd_eigen(args) -> int:
    from .spectra import case_system, eigen_coeffs, eigenvalues_d, original_params, termination_criterion

    if args.N is None:
        raise UsageError("eigen needs --N")
    p = param_input(args).canonical()
    sys_ = case_system(args.case, p, args.N)
    ds = eigenvalues_d(sys_)
    pairs = [eigen_coeffs(sys_, d) for d in ds]
    deltas = [original_params(args.case, p, d).delta for d in ds]
    crit = termination_criterion(sys_.params, args.N)
    if args.format == "csv":
        header = ["index", "re_d", "im_d", "re_delta", "im_delta"] + [
            f"{part}_A{k}" for k in range(args.N + 1) for part in ("re", "im")
        ]
        rows = []
        for i, (d, de, pair) in enumerate(zip(ds, deltas, pairs)):
            row = [i, d.real, d.imag, de.real, de.imag]
            for a in pair.coeffs:
                row += [a.real, a.imag]
            rows.append(row)
        _emit(dump_csv(header, rows), args.out)
    else:
        doc = {
            "case": args.case,
            "N": args.N,
            "criterion": crit,
            "eigenvalues_d": [cjson(d) for d in ds],
            "delta_values": [cjson(v) for v in deltas],
            "coefficient_table": [[cjson(a) for a in pair.coeffs] for pair in pairs],
        }
        _emit(dump_json(doc), args.out)
    return EXIT_OK


def _select_solution(args, pin: ParamInput):
    """(jet-capable solution, canonical params for residuals, entire or None)."""
    from .series import SeriesSolution, glue_entire
    from .spectra import eigen_solutions

    kind, _, arg = args.solution.partition(":")
    if kind == "eigen":
        if args.N is None:
            raise UsageError("eigen solutions need --N")
        sols = eigen_solutions(args.case, pin.canonical(), args.N, args.kind)
        idx = int(arg or 0)
        if not 0 <= idx < len(sols):
            raise UsageError(f"eigen index {idx} out of range 0..{len(sols) - 1}")
        sol = sols[idx][1]
        return sol, sol.params, None
    g = pin.general()
    if kind == "series":
        return SeriesSolution(g, arg or "Base", args.kind), general_to_canonical(g), None
    if kind == "entire":
        ent = glue_entire(g)
        return ent, general_to_canonical(g), ent
    raise UsageError(f"unknown solution selector {args.solution!r}; use eigen:K, series:VARIANT or entire")


def cmd_eval(args) -> int:
    from .spectra import bhe_residual

    pin = param_input(args)
    sol, cp, entire = _select_solution(args, pin)
    pts = parse_grid(args.grid, args.seed)
    rows = []
    for z in pts:
        status, y, err, res, cont = "ok", None, None, None, None
        try:
            jet = sol.jet(z)
            y, err = jet.y, float(jet.abs_error)
            res = bhe_residual(sol, cp, z)
            if entire is not None and abs(z.imag) <= 1e-14:
                psi = entire.lower(z).y
                cont = abs(entire.upper(z).y - psi) / (1 + abs(psi))
        except E.RegionError:
            status = "out-of-region"
        except (E.ConvergenceError, E.DomainError) as exc:
            status = type(exc).__name__
        rows.append((z, y, err, res, cont, status))
    if args.format == "csv":
        header = ["re_z", "im_z", "re_y", "im_y", "abs_err", "residual", "continuity", "status"]
        out = []
        for z, y, err, res, cont, status in rows:
            out.append([z.real, z.imag, None if y is None else y.real, None if y is None else y.imag, err, res, cont, status])
        _emit(dump_csv(header, out), args.out)
    else:
        doc = {
            "solution": args.solution,
            "kind": args.kind,
            "rows": [
                {
                    "z": cjson(z),
                    "y": None if y is None else cjson(y),
                    "abs_err": None if err is None else _clean(err),
                    "residual": None if res is None else _clean(res),
                    "continuity": None if cont is None else _clean(cont),
                    "status": status,
                }
                for z, y, err, res, cont, status in rows
            ],
        }
        _emit(dump_json(doc), args.out)
    return EXIT_OK


def cmd_classify(args) -> int:
    jm = param_input(args).jm()
    p4 = to_painleve4(jm)
    cls = classify_degeneration(jm, args.tol if args.tol is not None else 1e-9)
    doc = {
        "theta0": cjson(jm.theta0),
        "thetaInf": cjson(jm.thetaInf),
        "xi": cjson(p4.xi),
        "eta": cjson(p4.eta),
        "class": cls.tag.value,
        "witnesses": [{"relation": w.relation, "n": w.n, "eps": w.eps, "label": w.label} for w in cls.witnesses],
    }
    if args.format == "csv":
        rows = [[w["label"], w["relation"], w["n"], w["eps"]] for w in doc["witnesses"]]
        head = f"# class={doc['class']}\n"
        _emit(head + dump_csv(["label", "relation", "n", "eps"], rows), args.out)
    else:
        _emit(dump_json(doc), args.out)
    return EXIT_OK


ATLAS_HEADER = ["family", "label", "n", "a_coeff", "g_coeff", "const", "in_f2"]


def atlas_documents(n_max: int) -> tuple[str, str]:
    ds = atlas_lines(n_max)
    f2 = ds.keys("F2")
    rows = [[ln.family, ln.label, ln.n, ln.a_coeff, ln.g_coeff, ln.const, ln.key() in f2] for ln in ds.lines]
    doc = {
        "n_max": n_max,
        "relation": "a_coeff*alpha + g_coeff*gamma + const = 0",
        "lines": [dict(zip(ATLAS_HEADER, [r[0], r[1], r[2], _clean(r[3]), _clean(r[4]), _clean(r[5]), r[6]])) for r in rows],
        "f3_minus_f2": [ln.label for ln in ds.missing],
    }
    return dump_json(doc), dump_csv(ATLAS_HEADER, rows)


def cmd_atlas(args) -> int:
    js, cs = atlas_documents(args.n_max)
    if args.out_dir:
        d = Path(args.out_dir)
        d.mkdir(parents=True, exist_ok=True)
        (d / "atlas.json").write_text(js)
        (d / "atlas.csv").write_text(cs)
    else:
        _emit(cs if args.format == "csv" else js, args.out)
    return EXIT_OK


def cmd_verify(args) -> int:
    from .verify import SUITES, run_suites

    names = [s for tok in (args.suite or []) for s in tok.split(",") if s] or list(SUITES)
    unknown = [n for n in names if n not in SUITES]
    if unknown:
        raise UsageError(f"unknown suite(s) {unknown}; available: {sorted(SUITES)}")
    results = run_suites(names, tol=args.tol, seed=args.seed)
    passed = all(r.passed for r in results)
    if args.format == "csv":
        rows = [[r.name, r.invariant, r.measured, r.tol, r.passed] for r in results]
        _emit(dump_csv(["suite", "invariant", "measured", "tol", "passed"], rows), args.out)
    else:
        doc = {
            "passed": passed,
            "suites": [
                {"suite": r.name, "invariant": r.invariant, "measured": _clean(r.measured), "tol": r.tol, "passed": r.passed}
                for r in results
            ],
        }
        _emit(dump_json(doc), args.out)
    return EXIT_OK if passed else EXIT_NUMERIC


# ---------------------------------------------------------------------------
# Entry point
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="biheun", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def common(sp, params=True):
        if params:
            g = sp.add_mutually_exclusive_group()
            g.add_argument("--canonical", nargs="+", metavar="KEY=VAL", help="a=..,b=..,g=..,d=.. (alpha, beta, gamma, delta)")
            g.add_argument("--general", nargs="+", metavar="KEY=VAL", help="b=..,c=..,d=..,e=..")
            g.add_argument("--jm", nargs="+", metavar="KEY=VAL", help="theta0=..,thetaInf=..[,t=..,lam=..]")
            g.add_argument("--p4", nargs="+", metavar="KEY=VAL", help="xi=..,eta=..[,t=..]")
        sp.add_argument("--format", choices=("json", "csv"), default="json")
        sp.add_argument("--out", help="output file (default stdout)")
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--tol", type=float, default=None)

    sp = sub.add_parser("eigen", help="eigenvalues and coefficient vectors of a terminating case")
    common(sp)
    sp.add_argument("--N", type=int)
    sp.add_argument("--case", choices=("I", "II", "III", "IV"), default="I")
    sp.set_defaults(func=cmd_eigen)

    sp = sub.add_parser("eval", help="evaluate a solution on a grid with residuals")
    common(sp)
    sp.add_argument("--N", type=int)
    sp.add_argument("--case", choices=("I", "II", "III", "IV"), default="I")
    sp.add_argument("--kind", choices=("D", "E"), default="D")
    sp.add_argument("--solution", default="eigen:0", help="eigen:K | series:Base|Phi4|Phi5 | entire")
    sp.add_argument("--grid", default="circle:r=1,n=16")
    sp.set_defaults(func=cmd_eval)

    sp = sub.add_parser("classify", help="degeneration class of connection data")
    common(sp)
    sp.set_defaults(func=cmd_classify)

    sp = sub.add_parser("atlas", help="emit the parameter line atlas")
    common(sp, params=False)
    sp.add_argument("--n-max", type=int, default=3)
    sp.add_argument("--out-dir", help="write atlas.json and atlas.csv here")
    sp.set_defaults(func=cmd_atlas)

    sp = sub.add_parser("verify", help="run invariant suites")
    common(sp, params=False)
    sp.add_argument("--suite", action="append", help="suite name(s), comma separated; default all")
    sp.set_defaults(func=cmd_verify)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, *PRECONDITION_ERRORS) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    except (E.BiheunError, ArithmeticError, np.linalg.LinAlgError) as exc:
        print(f"numeric failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
