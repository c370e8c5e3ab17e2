"""Command-line front end.

    discrete-appell eval --fn f1d1 --a 1 --b1 1 --b2 1 --c 1 --t1 2 --k1 1 --x 0.5
    discrete-appell verify --regime terminating --count 50 --seed 42
    discrete-appell integral-check --fn f1d1 --kind euler --a 1 ...
    discrete-appell table --fn f1d1 --a 1 ... --x-range -0.5 0.5 3 --y-range -0.5 0.5 3
    discrete-appell list-identities

Exit codes: 0 success, 1 error or failed check, 2 divergence suspected,
64 bad command line.
"""
import argparse
import csv
import dataclasses
import json
import os
import re
import sys

import numpy as np

from .errors import DomainError, PoleError, PreconditionError, QuadratureError
from .functions import (
    Appell1Params,
    Appell2Params,
    HumbertVariant,
    KdFSpec,
    eval_classical_f1,
    eval_f1_d1,
    eval_f1_d2,
    eval_humbert,
    eval_kdf,
)
from .integrals import FIRST_FORM_KINDS, SECOND_FORM_KINDS, IntegralForm, eval_integral, with_target
from .quadrature import DEFAULT_QUADRATURE
from .relations import CATALOGUES
from .series import DEFAULT_OPTIONS, Verdict
from .verification import (
    ALIASES,
    DEFAULT_TOLERANCES,
    FAMILIES,
    DrawPolicy,
    allowed_residual,
    asymptotic_reference,
    family_tolerance,
    rel_residual,
    run_suite,
)

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_DIVERGENT = 2
EXIT_USAGE = 64

FIRST_KEYS = ("a", "b1", "b2", "c", "t1", "t2", "k1", "k2", "x", "y")
SECOND_KEYS = ("a", "b1", "b2", "c", "t", "k", "x", "y")
KDF_KEYS = ("upper_joint", "upper_x", "upper_y", "lower_joint", "lower_x", "lower_y", "x", "y")
CLASSICAL_KEYS = ("a", "b1", "b2", "c", "x", "y")



def _without(keys, *dropped):
    return tuple(k for k in keys if k not in dropped)


# the Humbert limits lose a parameter each: phi1 has no b2, phi2 no a, phi3 neither
FUNCTIONS = {
    "f1d1": FIRST_KEYS,
    "f1d2": SECOND_KEYS,
    "phi1d1": _without(FIRST_KEYS, "b2"),
    "phi2d1": _without(FIRST_KEYS, "a"),
    "phi3d1": _without(FIRST_KEYS, "a", "b2"),
    "phi1d2": _without(SECOND_KEYS, "b2"),
    "phi2d2": _without(SECOND_KEYS, "a"),
    "phi3d2": _without(SECOND_KEYS, "a", "b2"),
    "f1": CLASSICAL_KEYS,
    "kdf": KDF_KEYS,
}
INTEGER_KEYS = {"k", "k1", "k2"}
LIST_KEYS = set(KDF_KEYS) - {"x", "y"}
REQUIRED_KEYS = {"a", "b1", "b2", "c"}

_NUMBER = r"(\d+\.?\d*|\.\d+)([eE][+-]?\d+)?"
_COMPLEX = re.compile(rf"^[+-]?({_NUMBER}([+-]({_NUMBER})?i)?|({_NUMBER})?i)$")


class UsageError(Exception):
    """Bad command line; the message names the offending key."""


class _Parser(argparse.ArgumentParser):
    def __init__(self, *args, **kwargs):
        kwargs.setdefault("allow_abbrev", False)
        super().__init__(*args, **kwargs)

    def error(self, message):
        raise UsageError(message)


def parse_complex(text, key="value"):
    """Parse "re" or "re+imi" (also "re-imi", "re+i")."""
    s = text.strip().replace(" ", "")
    if not _COMPLEX.match(s):
        raise UsageError(f"--{key}: cannot parse {text!r} as a complex number (use re or re+imi)")
    if s.endswith("i"):
        s = s[:-1] + "j"
        if len(s) == 1 or s[-2] in "+-":
            s = s[:-1] + "1j"
    return complex(s)


_PLAIN_NEGATIVE = re.compile(r"-(\d+\.?\d*|\.\d+)([eE][-+]?\d+)?")


def _attach_negative_values(argv):
    """Turn "--key -0.1+0.2i" into "--key=-0.1+0.2i" so argparse does not read an option."""
    out = []
    for token in argv:
        # argparse already accepts plain negative reals, also after nargs options
        if _PLAIN_NEGATIVE.fullmatch(token):
            out.append(token)
        elif out and out[-1].startswith("--") and "=" not in out[-1] and token.startswith("-") \
                and _COMPLEX.match(token.replace(" ", "")):
            out[-1] = f"{out[-1]}={token}"
        else:
            out.append(token)
    return out


def parse_int(text, key):
    try:
        value = int(text)
    except ValueError:
        raise UsageError(f"--{key}: expected a nonnegative integer, got {text!r}") from None
    if value < 0:
        raise UsageError(f"--{key}: expected a nonnegative integer, got {text!r}")
    return value


def parse_list(text, key):
    return tuple(parse_complex(part, key) for part in text.split(",") if part.strip())


def format_complex(z):
    z = complex(z)
    sign = "+" if z.imag >= 0 or np.isnan(z.imag) else "-"
    return f"{z.real:.16g}{sign}{abs(z.imag):.16g}i"


def _add_param_flags(p, keys=None):
    for key in keys or sorted(set(FIRST_KEYS + SECOND_KEYS + KDF_KEYS)):
        p.add_argument(f"--{key.replace('_', '-')}", dest=key, default=None, metavar="VALUE")


def _add_series_flags(p):
    p.add_argument("--rel-tol", type=float, default=None)
    p.add_argument("--max-diagonal", type=int, default=None)


def _add_output_flag(p, default="plain", choices=("json", "csv", "plain")):
    p.add_argument("--output", choices=choices, default=default)


def build_parser():
    parser = _Parser(prog="discrete-appell", description="Discrete Appell F1 functions and identity checks.")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    p = sub.add_parser("eval", help="evaluate one function")
    p.add_argument("--fn", choices=sorted(FUNCTIONS), default="f1d1")
    _add_param_flags(p)
    _add_series_flags(p)
    _add_output_flag(p)

    p = sub.add_parser("verify", help="run an identity suite")
    p.add_argument("--regime", choices=("terminating", "classical"), default="terminating")
    p.add_argument("--count", type=int, default=50)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--families", default=None, help="comma-separated family ids or aliases")
    p.add_argument("--tol", action="append", default=[], metavar="NAME=VALUE",
                   help="tolerance override for a family id or category (repeatable)")
    _add_series_flags(p)
    _add_output_flag(p, default="json")

    p = sub.add_parser("integral-check", help="compare an integral representation with its reference")
    p.add_argument("--fn", choices=("f1d1", "f1d2"), default="f1d1")
    p.add_argument("--kind", required=True)
    p.add_argument("--target-tol", type=float, default=DEFAULT_QUADRATURE.target_tol)
    p.add_argument("--tol", type=float, default=None, help="residual accepted (default by kind)")
    _add_param_flags(p, sorted(set(FIRST_KEYS + SECOND_KEYS)))
    _add_series_flags(p)
    _add_output_flag(p)

    p = sub.add_parser("table", help="tabulate a function over a rectangular grid")
    p.add_argument("--fn", choices=("f1d1", "f1d2", "f1"), default="f1d1")
    p.add_argument("--x-range", nargs=3, default=["0", "0", "1"], metavar=("LO", "HI", "N"))
    p.add_argument("--y-range", nargs=3, default=["0", "0", "1"], metavar=("LO", "HI", "N"))
    _add_param_flags(p, sorted(set(FIRST_KEYS + SECOND_KEYS) - {"x", "y"}))
    _add_series_flags(p)
    _add_output_flag(p, default="csv", choices=("csv", "json"))

    p = sub.add_parser("list-identities", help="list identity families, aliases or a relation catalogue")
    p.add_argument("--aliases", action="store_true")
    p.add_argument("--catalogue", default=None)
    _add_output_flag(p)
    return parser


# -- argument conversion -------------------------------------------------------------


def series_options(args):
    changes = {}
    if args.rel_tol is not None:
        changes["rel_tol"] = args.rel_tol
    if args.max_diagonal is not None:
        changes["max_diagonal"] = args.max_diagonal
    if not changes:
        return DEFAULT_OPTIONS
    try:
        return dataclasses.replace(DEFAULT_OPTIONS, **changes)
    except ValueError as err:
        raise UsageError(str(err)) from None


def collect_params(args, fn):
    """Parameters given on the command line, checked against the keys ``fn`` accepts."""
    allowed = FUNCTIONS[fn]
    given = {}
    for key in sorted(set(FIRST_KEYS + SECOND_KEYS + KDF_KEYS)):
        raw = getattr(args, key, None)
        if raw is None:
            continue
        if key not in allowed:
            raise UsageError(f"--{key.replace('_', '-')} is not a parameter of --fn {fn}")
        if key in INTEGER_KEYS:
            given[key] = parse_int(raw, key)
        elif key in LIST_KEYS:
            given[key] = parse_list(raw, key.replace("_", "-"))
        else:
            given[key] = parse_complex(raw, key)
    for key in sorted(REQUIRED_KEYS & set(allowed)):
        if key not in given:
            raise UsageError(f"--{key} is required for --fn {fn}")
    return given


def build_params(fn, values):
    if fn.startswith("phi"):
        # parameters the limit drops are never read; any finite placeholder will do
        values = {"a": 1, "b2": 1, **values}
    if fn in ("f1d1", "phi1d1", "phi2d1", "phi3d1"):
        return Appell1Params(**values)
    if fn in ("f1d2", "phi1d2", "phi2d2", "phi3d2"):
        return Appell2Params(**values)
    return values


def evaluate(fn, values, opts):
    params = build_params(fn, values)
    if fn == "f1d1":
        return eval_f1_d1(params, opts)
    if fn == "f1d2":
        return eval_f1_d2(params, opts)
    if fn.startswith("phi"):
        return eval_humbert(HumbertVariant(fn[:4], "first" if fn.endswith("d1") else "second"), params, opts)
    if fn == "f1":
        return eval_classical_f1(values["a"], values["b1"], values["b2"], values["c"],
                                 values.get("x", 0), values.get("y", 0), opts)
    spec = KdFSpec(**{k: v for k, v in values.items() if k in LIST_KEYS})
    return eval_kdf(spec, values.get("x", 0), values.get("y", 0), opts)


def verdict_exit(verdict):
    if verdict in (Verdict.CONVERGED, Verdict.TERMINATED):
        return EXIT_OK
    if verdict == Verdict.DIVERGENCE_SUSPECTED:
        return EXIT_DIVERGENT
    return EXIT_ERROR


# -- commands -------------------------------------------------------------------------


def cmd_eval(args, out):
    opts = series_options(args)
    values = collect_params(args, args.fn)
    result = evaluate(args.fn, values, opts)
    record = {
        "value": format_complex(result.value),
        "verdict": result.verdict.value,
        "terms_summed": result.terms_summed,
        "tail_estimate": result.tail_estimate,
    }
    if args.output == "json":
        out.write(json.dumps(record) + "\n")
    elif args.output == "csv":
        w = csv.writer(out, lineterminator="\n")
        w.writerow(["re", "im", "verdict", "terms_summed", "tail_estimate"])
        w.writerow([repr(result.value.real), repr(result.value.imag), result.verdict.value,
                    result.terms_summed, result.tail_estimate])
    else:
        for key, val in record.items():
            out.write(f"{key}: {val}\n")
    return verdict_exit(result.verdict)


def _parse_tolerances(items):
    table = {}
    for item in items:
        name, sep, raw = item.partition("=")
        name = name.strip()
        if not sep or not name:
            raise UsageError(f"--tol expects NAME=VALUE, got {item!r}")
        if name not in FAMILIES and name not in DEFAULT_TOLERANCES:
            raise UsageError(f"--tol: unknown family or category {name!r}")
        try:
            table[name] = float(raw)
        except ValueError:
            raise UsageError(f"--tol {name}: cannot parse {raw!r}") from None
    return table


def cmd_verify(args, out):
    if args.count < 0:
        raise UsageError("--count must be nonnegative")
    families = None
    if args.families is not None:
        families = [name.strip() for name in args.families.split(",") if name.strip()]
        for name in families:
            if name not in FAMILIES and name not in ALIASES:
                raise UsageError(f"--families: unknown family {name!r}")
    tolerances = _parse_tolerances(args.tol)
    policy = DrawPolicy(args.regime, args.count, args.seed)
    report = run_suite(policy, families, series_options(args), tolerances)
    if args.output == "json":
        out.write(report.to_json(indent=2) + "\n")
    elif args.output == "csv":
        w = csv.writer(out, lineterminator="\n")
        w.writerow(["id", "pass", "fail", "skip", "worst_residual"])
        for f in report.families:
            w.writerow([f.id, f.passed, f.failed, f.skipped, f"{f.worst_residual:.3e}"])
    else:
        out.write(f"suite {report.suite}, seed {report.seed}, {report.wall_ms / 1000:.1f} s\n")
        for f in report.families:
            flag = "ok  " if f.ok else "FAIL"
            out.write(f"{flag} {f.id:45s} pass={f.passed} fail={f.failed} skip={f.skipped} "
                      f"worst={f.worst_residual:.2e}\n")
    return EXIT_OK if report.ok else EXIT_ERROR


def _default_integral_tol(kind):
    return DEFAULT_TOLERANCES["integral"] if kind in ("euler", "simplex") else DEFAULT_TOLERANCES["integral_t"]


def cmd_integral_check(args, out):
    form_name = "first" if args.fn == "f1d1" else "second"
    kinds = FIRST_FORM_KINDS if form_name == "first" else SECOND_FORM_KINDS
    if args.kind not in kinds:
        raise UsageError(f"--kind: {args.kind!r} is not one of {', '.join(kinds)} for --fn {args.fn}")
    if not args.target_tol > 0:
        raise UsageError("--target-tol must be positive")
    opts = series_options(args)
    params = build_params(args.fn, collect_params(args, args.fn))
    q = with_target(DEFAULT_QUADRATURE, args.target_tol)
    form = IntegralForm(args.kind, form_name)
    result = eval_integral(form, params, q)
    # the Gamma(-t)-weighted forms have no convergent series to compare with:
    # T1 and T2 are checked against each other under x <-> y, the second-form
    # T against the optimally truncated series, up to its smallest term
    allowance = 0.0
    if args.kind == "laplace_t1":
        reference, label = eval_integral(IntegralForm("laplace_t2"), params.swapped(), q).value, "laplace_t2 mirrored"
    elif args.kind == "laplace_t2":
        reference, label = eval_integral(IntegralForm("laplace_t1"), params.swapped(), q).value, "laplace_t1 mirrored"
    elif args.kind == "laplace_t":
        reference, allowance = asymptotic_reference(params, opts)
        label = "optimally truncated series" if allowance else "series"
    else:
        series = evaluate(args.fn, collect_params(args, args.fn), opts)
        if verdict_exit(series.verdict) != EXIT_OK:
            out.write(f"series verdict {series.verdict.value}; no reference value\n")
            return verdict_exit(series.verdict)
        reference, label = series.value, "series"
    res = allowed_residual(result.value, reference, allowance)
    tol = args.tol if args.tol is not None else _default_integral_tol(args.kind)
    record = {
        "form": str(form),
        "integral": format_complex(result.value),
        "reference": format_complex(reference),
        "reference_kind": label,
        "allowance": allowance,
        "raw_residual": rel_residual(result.value, reference),
        "residual": res,
        "refinement_estimate": result.tail_estimate,
        "pass": res <= tol,
    }
    if args.output == "json":
        out.write(json.dumps(record) + "\n")
    elif args.output == "csv":
        w = csv.writer(out, lineterminator="\n")
        w.writerow(list(record))
        w.writerow(list(record.values()))
    else:
        for key, val in record.items():
            out.write(f"{key}: {val}\n")
    return EXIT_OK if res <= tol else EXIT_ERROR


def _grid(spec, key):
    lo, hi = parse_complex(spec[0], key).real, parse_complex(spec[1], key).real
    n = parse_int(spec[2], key)
    if n < 1:
        raise UsageError(f"--{key}: need at least one point")
    if max(abs(lo), abs(hi)) >= 1:
        raise UsageError(f"--{key}: grid must stay inside (-1, 1)")
    return np.linspace(lo, hi, n) if n > 1 else np.array([lo])


def cmd_table(args, out):
    opts = series_options(args)
    base = collect_params(args, args.fn)
    xs, ys = _grid(args.x_range, "x-range"), _grid(args.y_range, "y-range")
    rows = []
    for x in xs:
        for y in ys:
            try:
                result = evaluate(args.fn, {**base, "x": complex(x), "y": complex(y)}, opts)
            except (PoleError, DomainError, PreconditionError) as err:
                rows.append((x, y, None, f"error: {err}"))
                continue
            if result.verdict == Verdict.DIVERGENCE_SUSPECTED:
                rows.append((x, y, None, "divergent"))
            else:
                rows.append((x, y, result.value, result.verdict.value))
    if args.output == "json":
        out.write(json.dumps([
            {"x": x, "y": y, "re": None if v is None else v.real, "im": None if v is None else v.imag, "verdict": verdict}
            for x, y, v, verdict in rows
        ]) + "\n")
    else:
        w = csv.writer(out, lineterminator="\n")
        w.writerow(["x", "y", "re", "im", "verdict"])
        for x, y, v, verdict in rows:
            w.writerow([repr(float(x)), repr(float(y)), "" if v is None else repr(v.real),
                        "" if v is None else repr(v.imag), verdict])
    return EXIT_OK


def cmd_list_identities(args, out):
    if args.catalogue is not None:
        if args.catalogue not in CATALOGUES:
            raise UsageError(f"--catalogue: unknown catalogue {args.catalogue!r}")
        form, flavour, texts = CATALOGUES[args.catalogue]
        rows = [{"index": i, "relation": text} for i, text in enumerate(texts, 1)]
        if args.output == "json":
            out.write(json.dumps({"catalogue": args.catalogue, "form": form, "flavour": flavour,
                                  "relations": rows}) + "\n")
        else:
            for row in rows:
                out.write(f"{row['index']:3d}  {row['relation']}\n")
        return EXIT_OK
    if args.aliases:
        if args.output == "json":
            out.write(json.dumps(ALIASES) + "\n")
        else:
            for name, ids in ALIASES.items():
                out.write(f"{name:32s} {', '.join(ids)}\n")
        return EXIT_OK
    rows = [
        {"id": f.id, "category": f.category, "regimes": list(f.regimes),
         "tolerance": family_tolerance(f), "description": f.description}
        for f in FAMILIES.values()
    ]
    if args.output == "json":
        out.write(json.dumps(rows) + "\n")
    elif args.output == "csv":
        w = csv.writer(out, lineterminator="\n")
        w.writerow(["id", "category", "regimes", "tolerance", "description"])
        for r in rows:
            w.writerow([r["id"], r["category"], " ".join(r["regimes"]), r["tolerance"], r["description"]])
    else:
        for r in rows:
            out.write(f"{r['id']:45s} {r['category']:13s} {'/'.join(r['regimes']):22s} {r['description']}\n")
    return EXIT_OK


COMMANDS = {
    "eval": cmd_eval,
    "verify": cmd_verify,
    "integral-check": cmd_integral_check,
    "table": cmd_table,
    "list-identities": cmd_list_identities,
}


def run(argv=None, out=None, err=None):
    """Run the CLI and return the exit code instead of exiting."""
    out = sys.stdout if out is None else out
    err = sys.stderr if err is None else err
    try:
        argv = sys.argv[1:] if argv is None else list(argv)
        args = build_parser().parse_args(_attach_negative_values(argv))
        return COMMANDS[args.command](args, out)
    except UsageError as e:
        err.write(f"usage error: {e}\n")
        return EXIT_USAGE
    except (PoleError, DomainError, PreconditionError, QuadratureError, ValueError, OverflowError) as e:
        err.write(f"error: {e}\n")
        return EXIT_ERROR


def main(argv=None):
    try:
        code = run(argv)
        sys.stdout.flush()
    except SystemExit as e:  # --help
        code = e.code if isinstance(e.code, int) else EXIT_OK
    except BrokenPipeError:
        # reader went away (e.g. piped into head); keep the interpreter quiet on exit
        os.dup2(os.open(os.devnull, os.O_WRONLY), sys.stdout.fileno())
        code = EXIT_OK
    sys.exit(code)


if __name__ == "__main__":
    main()
