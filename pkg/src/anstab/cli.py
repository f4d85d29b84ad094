"""Command-line driver: every subsystem behind one executable.

Subcommands: tilt, exchange-graph, c-act, msc-validate, plumb, defect,
limit, strata, braid, twist-data.  Exit status 0 on success, 1 when a
validation fails, 2 on usage errors (including malformed JSON).  Output is
JSON by default; ``--format dot`` or ``table`` where meaningful.  The
environment variable MSTAB_PRECISION ("exact" or a digit count) overrides
--precision.
"""

from __future__ import annotations

import argparse
import json
import os
import re
import sys
from fractions import Fraction

from . import hearts as H
from . import klattice as K
from . import limits as LIM
from . import multiscale as MS
from . import strata as ST
from .anquiver import make_linear
from .exact import LaurentGR, gr
from .stability import StabilityError, c_act, validate

SCHEMA = 1


class UsageError(ValueError):
    pass


class Failure(ValueError):
    pass


# ---------------------------------------------------------------------------
# Small parsers


_TERM = re.compile(
    r"^(?P<sign>[+-]?)(?P<num>\d+)?(?:/(?P<den>\d+))?(?P<i>i)?(?P<t>t)?(?:\^(?P<pow>-?\d+))?"
    r"(?:/(?P<den2>\d+))?$"
)


def _split_terms(expr: str) -> list[str]:
    expr = expr.replace(" ", "")
    if not expr:
        raise UsageError("empty expression")
    terms = []
    start = 0
    for i, ch in enumerate(expr):
        if ch in "+-" and i > start:
            terms.append(expr[start:i])
            start = i
    terms.append(expr[start:])
    return terms


def parse_laurent(expr: str) -> LaurentGR:
    """Parse '-1+it', '2it^2-3/4t', 'i/3' into a Laurent polynomial."""
    coeffs: dict[int, list[Fraction]] = {}
    for term in _split_terms(expr):
        m = _TERM.match(term)
        if not m or (m.group("num") is None and m.group("i") is None and m.group("t") is None):
            raise UsageError(f"cannot parse term {term!r}")
        num = Fraction(int(m.group("num") or 1))
        den = m.group("den") or m.group("den2")
        if den:
            num /= int(den)
        if m.group("sign") == "-":
            num = -num
        power = int(m.group("pow") or (1 if m.group("t") else 0))
        if not m.group("t"):
            power = 0
        re_im = coeffs.setdefault(power, [Fraction(0), Fraction(0)])
        if m.group("i"):
            re_im[1] += num
        else:
            re_im[0] += num
    return LaurentGR({k: gr(a, b) for k, (a, b) in coeffs.items()})


def parse_rational_complex(expr: str) -> tuple[Fraction, Fraction]:
    poly = parse_laurent(expr)
    if any(k != 0 for k in poly.coeffs):
        raise UsageError(f"{expr!r} must not involve t")
    c = poly.coeff(0)
    return c.re, c.im


def parse_family(expr: str) -> list[LaurentGR]:
    expr = expr.strip()
    if expr.startswith("(") and expr.endswith(")"):
        expr = expr[1:-1]
    return [parse_laurent(part) for part in expr.split(",")]


def parse_braid_word(expr: str) -> K.BraidWord:
    """Parse '(1 2)^3', '1 2 1^-1', or JSON [[i, e], ...]."""
    expr = expr.strip()
    if expr.startswith("["):
        return K.BraidWord.from_json(json.loads(expr))
    tokens = re.findall(r"\(|\)|\^-?\d+|-?\d+", expr)
    def parse_seq(pos: int, stop_at_close: bool):
        letters: list[tuple[int, int]] = []
        while pos < len(tokens):
            tok = tokens[pos]
            if tok == ")":
                if not stop_at_close:
                    raise UsageError("unbalanced ')'")
                return letters, pos
            if tok == "(":
                inner, pos = parse_seq(pos + 1, True)
                pos += 1
                power = 1
                if pos < len(tokens) and tokens[pos].startswith("^"):
                    power = int(tokens[pos][1:])
                    pos += 1
                letters.extend(K.BraidWord(tuple(inner)).__pow__(power).letters)
                continue
            if tok.startswith("^"):
                raise UsageError("exponent without a base")
            gen = int(tok)
            power = 1
            if pos + 1 < len(tokens) and tokens[pos + 1].startswith("^"):
                power = int(tokens[pos + 1][1:])
                pos += 1
            letters.extend(K.BraidWord(((abs(gen), 1 if gen > 0 else -1),)).__pow__(power).letters)
            pos += 1
        if stop_at_close:
            raise UsageError("unbalanced '('")
        return letters, pos

    letters, _ = parse_seq(0, False)
    return K.BraidWord.build(letters)


def _load_json_arg(arg: str):
    if arg == "-":
        return json.load(sys.stdin)
    if os.path.exists(arg):
        with open(arg) as fh:
            return json.load(fh)
    try:
        return json.loads(arg)
    except json.JSONDecodeError as exc:
        raise UsageError(f"not a readable path and not valid JSON: {exc}") from exc


def _heart_from_arg(arg: str) -> H.Heart:
    m = re.fullmatch(r"[Aa](\d+)", arg.strip())
    if m:
        return H.standard_heart(int(m.group(1)))
    return H.Heart.from_json(_load_json_arg(arg))


def _msc_from_arg(arg: str) -> MS.MultiScaleStab:
    return MS.MultiScaleStab.from_json(_load_json_arg(arg))


def _precision_digits(args) -> int:
    """Numeric printing width: 17 significant digits unless overridden."""
    env = os.environ.get("MSTAB_PRECISION")
    raw = env if env else args.precision
    if raw == "exact":
        return 17
    return max(1, int(raw))


def _emit(payload, args) -> None:
    if getattr(args, "format", "json") == "table" and isinstance(payload, dict):
        for k, v in payload.items():
            print(f"{k}\t{v}")
        return
    print(json.dumps(payload, indent=2, default=str))


# ---------------------------------------------------------------------------
# Subcommand handlers


def _cmd_tilt(args) -> int:
    heart = _heart_from_arg(args.heart)
    word = []
    for step in args.word.split(","):
        step = step.strip()
        if not step:
            continue
        direction = -1 if step.startswith("-") else 1
        word.append((int(step.lstrip("+-")), direction))
    result = H.apply_tilt_word(heart, word)
    _emit({"schema": SCHEMA, "heart": result.to_json()}, args)
    return 0


def _cmd_exchange_graph(args) -> int:
    heart = _heart_from_arg(args.heart)
    vertices, edges = H.exchange_graph(heart, args.radius)
    if args.format == "dot":
        print(H.exchange_graph_dot(vertices, edges))
        return 0
    _emit(
        {
            "schema": SCHEMA,
            "vertex_count": len(vertices),
            "edge_count": len(edges),
            "vertices": [h.to_json() for h in vertices.values()],
        },
        args,
    )
    return 0


def _cmd_c_act(args) -> int:
    data = _load_json_arg(args.input)
    heart = H.Heart.from_json(data["heart"])
    lam = parse_rational_complex(args.lam)
    charge = {}
    for k, v in data["charge"].items():
        charge[int(k)] = gr(Fraction(v[0], v[1]), Fraction(v[2], v[3]))
    sigma = validate(heart, charge)
    result = c_act(sigma, lam)
    _emit({"schema": SCHEMA, "result": result.to_json()}, args)
    return 0


def _cmd_msc_validate(args) -> int:
    try:
        m = _msc_from_arg(args.input)
    except MS.MscError as exc:
        raise Failure(str(exc)) from exc
    _emit(
        {
            "schema": SCHEMA,
            "valid": True,
            "levels_below_zero": m.L,
            "rho": [list(r) for r in MS.type_rho(m)],
        },
        args,
    )
    return 0


def _cmd_plumb(args) -> int:
    m = _msc_from_arg(args.input)
    taus = []
    for part in args.tau.split(";"):
        part = part.strip()
        if part in ("inf", "-ioo", "oo", ""):
            taus.append(MS.INFTY)
        else:
            taus.append(parse_rational_complex(part))
    result = MS.plumb(m, taus)
    _emit({"schema": SCHEMA, "result": result.to_json()}, args)
    return 0


def _cmd_defect(args) -> int:
    m = _msc_from_arg(args.input)
    digits = _precision_digits(args)
    rows = []
    for lam_expr in args.lam.split(";"):
        for tau_expr in args.tau.split(";"):
            lam = parse_rational_complex(lam_expr)
            tau = parse_rational_complex(tau_expr)
            r = MS.commutation_defect(m, lam, tau)
            rows.append(
                {
                    "lam": lam_expr.strip(),
                    "tau": tau_expr.strip(),
                    "max_defect": r.max_simple_defect,
                    "bound": r.bound,
                    "within_bound": r.within_bound,
                }
            )
    if args.format == "table":
        print("lam\ttau\tmax_defect\tbound\twithin")
        for row in rows:
            print(
                f"{row['lam']}\t{row['tau']}\t{row['max_defect']:.{digits}g}"
                f"\t{row['bound']:.{digits}g}\t{row['within_bound']}"
            )
        return 0
    _emit({"schema": SCHEMA, "rows": rows}, args)
    return 0


def _cmd_limit(args) -> int:
    heart = _heart_from_arg(args.heart)
    if args.family.strip().startswith("{"):
        zc = LIM.LaurentCharge.from_json(_load_json_arg(args.family))
    else:
        polys = parse_family(args.family)
        if len(polys) != heart.rank():
            raise UsageError("family arity does not match the heart rank")
        zc = LIM.LaurentCharge.build(dict(zip(heart.labels, polys)))
    try:
        m, rot = LIM.extract_limit(heart, zc)
    except LIM.LimitError as exc:
        raise Failure(str(exc)) from exc
    _emit(
        {
            "schema": SCHEMA,
            "rotation": [rot.numerator, rot.denominator],
            "result": m.to_json(),
        },
        args,
    )
    return 0


def _cmd_strata(args) -> int:
    graphs = ST.enumerate_graphs(args.n, args.levels)
    if args.poset:
        keyed, rel = ST.adjacency_poset(graphs, labeled=args.labeled)
        names = {k: f"type{idx}" for idx, k in enumerate(sorted(keyed, key=repr))}
        payload = {
            "schema": SCHEMA,
            "strata": {
                names[k]: {
                    "depth": keyed[k].depth,
                    "undegenerations": sorted(names[u] for u in rel[k]),
                }
                for k in keyed
            },
        }
        _emit(payload, args)
        return 0
    if args.format == "dot":
        for g in graphs:
            print(g.to_dot())
        return 0
    payload = ST.census(args.n, args.levels)
    if not args.labeled:
        for entry in payload["types"]:
            entry.pop("representative", None)
    if args.format == "table":
        print("depth\tlabeled\tenhancements\tprongs")
        for entry in payload["types"]:
            print(
                f"{entry['depth']}\t{entry['labeled_count']}\t"
                f"{entry['enhancements']}\t{entry['prongs']}"
            )
        return 0
    _emit(payload, args)
    return 0


def _cmd_braid(args) -> int:
    q = make_linear(args.n)
    word = parse_braid_word(args.word)
    mat = K.word_matrix(q, word)
    _emit(
        {
            "schema": SCHEMA,
            "word": word.to_json(),
            "matrix": [list(r) for r in mat.rows],
            "matrix_row_major": mat.to_json(),
        },
        args,
    )
    return 0


def _cmd_twist_data(args) -> int:
    rho = json.loads(args.rho)
    data = K.simple_twist_data(rho)
    _emit({"schema": SCHEMA, "rho": rho, "levels": data.to_json()}, args)
    return 0


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="anstab",
        description="exact engine for multi-scale stability conditions of A_n type",
    )
    p.add_argument(
        "--precision",
        default="exact",
        help="'exact' or a digit count for numeric printing (env MSTAB_PRECISION)",
    )
    sub = p.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("tilt", help="apply a tilt word to a heart")
    sp.add_argument("--heart", required=True, help="A<n> or heart JSON/path")
    sp.add_argument("--word", required=True, help="comma list like '2,-1,3'")
    sp.add_argument("--format", default="json", choices=["json", "table"])
    sp.set_defaults(func=_cmd_tilt)

    sp = sub.add_parser("exchange-graph", help="breadth-first tilt closure")
    sp.add_argument("--heart", required=True)
    sp.add_argument("--radius", type=int, required=True)
    sp.add_argument("--format", default="json", choices=["json", "dot"])
    sp.set_defaults(func=_cmd_exchange_graph)

    sp = sub.add_parser("c-act", help="apply the rescaled rotation action")
    sp.add_argument("input", help="JSON {heart, charge} or path")
    sp.add_argument("--lam", required=True, help="rational complex like '1/2+1/3i'")
    sp.add_argument("--format", default="json", choices=["json", "table"])
    sp.set_defaults(func=_cmd_c_act)

    sp = sub.add_parser("msc-validate", help="validate a multi-scale object")
    sp.add_argument("input")
    sp.add_argument("--format", default="json", choices=["json", "table"])
    sp.set_defaults(func=_cmd_msc_validate)

    sp = sub.add_parser("plumb", help="plumb level passages")
    sp.add_argument("input")
    sp.add_argument("--tau", required=True, help="';'-separated entries; 'inf' skips")
    sp.add_argument("--format", default="json", choices=["json", "table"])
    sp.set_defaults(func=_cmd_plumb)

    sp = sub.add_parser("defect", help="commutation defect over a lam/tau grid")
    sp.add_argument("input")
    sp.add_argument("--lam", required=True, help="';'-separated rational complex values")
    sp.add_argument("--tau", required=True)
    sp.add_argument("--format", default="table", choices=["json", "table"])
    sp.set_defaults(func=_cmd_defect)

    sp = sub.add_parser("limit", help="extract the limit of a Laurent family")
    sp.add_argument("--heart", required=True)
    sp.add_argument("--family", required=True, help="'(-1+it, 1+it)' or JSON")
    sp.add_argument("--format", default="json", choices=["json", "table"])
    sp.set_defaults(func=_cmd_limit)

    sp = sub.add_parser("strata", help="boundary census / poset for given n")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--levels", type=int, default=1)
    sp.add_argument("--labeled", action="store_true")
    sp.add_argument("--poset", action="store_true")
    sp.add_argument("--format", default="json", choices=["json", "dot", "table"])
    sp.set_defaults(func=_cmd_strata)

    sp = sub.add_parser("braid", help="braid word to K-theory matrix")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--word", required=True, help="'(1 2)^3' or JSON letters")
    sp.add_argument("--format", default="json", choices=["json", "table"])
    sp.set_defaults(func=_cmd_braid)

    sp = sub.add_parser("twist-data", help="twist group numerics for a type rho")
    sp.add_argument("--rho", required=True, help="JSON like [[1,1],[2]]")
    sp.add_argument("--format", default="json", choices=["json", "table"])
    sp.set_defaults(func=_cmd_twist_data)

    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    except json.JSONDecodeError as exc:
        print(f"malformed JSON near {exc.pos}: {exc.msg}", file=sys.stderr)
        return 2
    except (Failure, StabilityError, MS.MscError, LIM.LimitError, ST.StrataError) as exc:
        print(f"validation failure: {exc}", file=sys.stderr)
        return 1
    except (KeyError, TypeError) as exc:
        print(f"usage error: bad input field: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
