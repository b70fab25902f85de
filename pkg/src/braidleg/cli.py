"""Command-line front end.

Exit codes: 0 success, 1 invalid input, 2 internal consistency failure.
"""
from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

import jsonschema

from .algebra import ACap, BCap, Element, Gen, format_element, parse_element, specialize_gens
from .bracket import bracket
from .epoche import epoche_normal_form, format_epoch, parse_epoch
from .errors import BraidlegError, ConsistencyError, ValidationError
from .hamsys import ham_evolve, verify_flow_braiding
from .hj import HamTable, hj_evolve, verify_hj_braiding
from .classical import oracle_legendre_multidim
from .legendre import (
    LegendreContext,
    LegendreWork,
    cap_dictionary,
    cap_lists,
    classical_check,
    classical_values,
)
from .qcoeff import Context
from .suites import DEFAULT_SEED, SUITES

# -- schemas ------------------------------------------------------------------

_RATIONAL = {"oneOf": [{"type": "integer"}, {"type": "string", "pattern": r"^\s*-?\d+(\s*/\s*\d+)?\s*$"}]}
_MI = {"type": "array", "items": {"type": "integer", "minimum": 0}}
_Q = {"oneOf": [
    {"enum": ["symbolic", "one", "side-conditions"]},
    {"type": "array", "items": {
        "type": "object", "additionalProperties": False, "required": ["pair", "value"],
        "properties": {"pair": {"type": "array", "items": {"type": "integer"}, "minItems": 2, "maxItems": 2},
                       "value": _RATIONAL}}},
]}
_BASE = {"version": {"const": 1}, "s": {"type": "integer", "minimum": 1}, "q": _Q}
_SPECIALIZE = {"type": "object", "additionalProperties": _RATIONAL}
_HAM = {"type": "array", "items": {
    "type": "object", "additionalProperties": False, "required": ["K", "L"],
    "properties": {"K": _MI, "L": _MI, "value": {"type": ["string", "integer"]}}}}


def _schema(required, **props) -> dict:
    return {"type": "object", "additionalProperties": False,
            "required": ["version", "s"] + list(required),
            "properties": {**_BASE, **props}}


SCHEMAS = {
    "normal-form": _schema(["expression"], expression={"type": "string"}),
    "bracket": _schema(["left", "right"], left={"type": "string"}, right={"type": "string"}),
    "hj-evolve": _schema(
        ["hamiltonian", "Mmax", "D"],
        hamiltonian=_HAM,
        seed={"oneOf": [{"const": "generic"}, {"type": "array", "items": {
            "type": "object", "additionalProperties": False, "required": ["N", "value"],
            "properties": {"N": _MI, "value": {"type": ["string", "integer"]}}}}]},
        Mmax={"type": "integer", "minimum": 0}, D={"type": "integer", "minimum": 0},
        specialize=_SPECIALIZE, verify={"type": "boolean"},
    ),
    "ham-evolve": _schema(
        ["hamiltonian", "Mmax", "D"],
        hamiltonian=_HAM,
        seeds={"oneOf": [{"const": "generic"}, {
            "type": "object", "additionalProperties": False,
            "properties": {k: {"type": "array", "items": {
                "type": "object", "additionalProperties": False, "required": ["index", "M", "value"],
                "properties": {"index": {"type": "integer", "minimum": 1}, "M": _MI,
                               "value": {"type": ["string", "integer"]}}}} for k in ("P", "X")}}]},
        Mmax={"type": "integer", "minimum": 0}, D={"type": "integer", "minimum": 0},
        specialize=_SPECIALIZE, verify={"type": "boolean"},
    ),
    "legendre": {
        **_schema(["r_max", "mode"], r_max={"type": "integer", "minimum": 1},
                  mode={"enum": ["symbolic", "classical"]},
                  b={"type": "array", "minItems": 1, "items": {
                      "type": "object", "additionalProperties": False, "required": ["N", "value"],
                      "properties": {"N": _MI, "value": _RATIONAL}}}),
        "if": {"properties": {"mode": {"const": "classical"}}},
        "then": {"required": ["b"]},
    },
    "epoche-nf": _schema(["expression"], expression={"type": "string"},
                         leafcap={"type": "integer", "minimum": 1}, etacap={"type": "integer", "minimum": 0},
                         labels={"enum": ["mechanical", "thermo"]}),
}


def validate_problem(command: str, data) -> dict:
    try:
        jsonschema.validate(data, SCHEMAS[command])
    except jsonschema.ValidationError as exc:
        where = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise ValidationError(f"schema: {where}: {exc.message}") from None
    return data


def load_problem(path: str, command: str) -> dict:
    try:
        with open(path) as fh:
            data = json.load(fh)
    except OSError as exc:
        raise ValidationError(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise ValidationError(f"malformed JSON in {path}: {exc.msg} (line {exc.lineno})") from None
    return validate_problem(command, data)


# -- helpers ------------------------------------------------------------------

def make_context(s: int, q) -> Context:
    if q in (None, "symbolic"):
        return Context.symbolic(s)
    if q == "one":
        return Context.classical(s)
    if q == "side-conditions":
        return Context.side_conditions(s)
    fixed = {}
    for item in q:
        i, j = item["pair"]
        v = Fraction(item["value"])
        if i > j:
            i, j, v = j, i, 1 / v if v else v
        fixed[(i, j)] = v
    return Context(s, fixed)


def _value(v, ctx: Context) -> Element:
    if isinstance(v, int):
        return Element.scalar(v, ctx)
    return parse_element(v, ctx)


def _single_gen(text: str, ctx: Context) -> Gen:
    el = parse_element(text, ctx)
    if len(el.terms) != 1:
        raise ValidationError(f"{text!r} is not a single generator")
    (mono, c), = el.terms.items()
    if len(mono) != 1 or mono[0][1] != 1 or c != 1:
        raise ValidationError(f"{text!r} is not a single generator")
    return mono[0][0]


def _specializer(data: dict, ctx: Context):
    given = data.get("specialize") or {}
    if not given:
        return lambda el: el
    if not ctx.is_classical:
        raise ValidationError("generator values may only be specialised with q = one")
    values = {_single_gen(k, ctx): Fraction(v) for k, v in sorted(given.items())}
    return lambda el: specialize_gens(el, values)


def _hamiltonian(data: dict, ctx: Context) -> HamTable:
    H_ = HamTable(ctx)
    for item in data["hamiltonian"]:
        v = item.get("value", "symbolic")
        H_.add(item["K"], item["L"], v if v == "symbolic" else _value(v, ctx))
    return H_


# -- commands -----------------------------------------------------------------

def cmd_normal_form(data: dict) -> dict:
    ctx = make_context(data["s"], data.get("q"))
    return {"result": format_element(parse_element(data["expression"], ctx))}


def cmd_bracket(data: dict) -> dict:
    ctx = make_context(data["s"], data.get("q"))
    f = parse_element(data["left"], ctx)
    g = parse_element(data["right"], ctx)
    return {"result": format_element(bracket(f, g))}


def cmd_hj(data: dict) -> dict:
    ctx = make_context(data["s"], data.get("q"))
    H_ = _hamiltonian(data, ctx)
    seed = data.get("seed", "generic")
    if seed != "generic":
        seed = {tuple(it["N"]): _value(it["value"], ctx) for it in seed}
    else:
        seed = None
    series = hj_evolve(seed, H_, data["Mmax"], data["D"])
    evaluate = _specializer(data, ctx)
    rows = [{"m": m, "N": list(N), "value": format_element(evaluate(b))}
            for (m, N), b in sorted(series.coeffs.items())]
    out = {"coefficients": rows, "exact_to_degree": {str(m): d for m, d in sorted(series.valid.items())}}
    if data.get("verify"):
        out["violations"] = verify_hj_braiding(series)
    return out


def cmd_ham(data: dict) -> dict:
    ctx = make_context(data["s"], data.get("q"))
    H_ = _hamiltonian(data, ctx)
    seeds = data.get("seeds", "generic")
    if seeds == "generic":
        seeds = None
    else:
        seeds = {k: {(it["index"], tuple(it["M"])): _value(it["value"], ctx) for it in seeds.get(k, [])}
                 for k in ("P", "X")}
    flow = ham_evolve(seeds, H_, data["Mmax"], data["D"])
    evaluate = _specializer(data, ctx)
    rows = [{"kind": kind, "index": i, "n": n, "M": list(M), "value": format_element(evaluate(e))}
            for kind, i, n, M, e in flow.entries()]
    out = {"coefficients": rows}
    if data.get("verify"):
        out["violations"] = verify_flow_braiding(flow, H_)
    return out


def _b_table(data: dict) -> dict:
    return {tuple(it["N"]): Fraction(it["value"]) for it in data.get("b", [])}


def cmd_legendre(data: dict, inverse: bool = False, check: bool = False) -> dict:
    s, r_max = data["s"], data["r_max"]
    for N in _b_table(data):
        if len(N) != s:
            raise ValidationError(f"b multi-index {list(N)} does not have length s={s}")
    make = BCap if inverse else ACap
    out: dict = {"direction": "inverse" if inverse else "forward"}
    if data["mode"] == "classical":
        ctx = Context.classical(s)
        b = _b_table(data)
        R = r_max + 2
        vals = classical_values(b, s, R)
        if inverse:
            rep = classical_check(b, s, R)
            if not rep["ok"]:
                raise ConsistencyError(f"classical dictionary mismatch: {rep['mismatches']}")
            a = oracle_legendre_multidim(b, s, R)
            vals = {g: v for g, v in vals.items() if g.tag in ("H", "ABar", "BBar")}
            for ls in cap_lists(s, r_max):
                vals[ACap(ls)] = cap_dictionary(a, s, ls)
        work = LegendreWork(LegendreContext(ctx, r_max, "classical", vals), mirror=inverse)
    else:
        ctx = make_context(s, data.get("q"))
        work = LegendreWork(LegendreContext(ctx, r_max, "symbolic"), mirror=inverse)
    images = []
    for ls in cap_lists(s, r_max):
        g = make(ls)
        img = work.compute_A_hash(ls)
        images.append({"generator": format_element(Element.gen(g, ctx)), "image": format_element(img)})
    out["images"] = images
    if check:
        if data["mode"] != "classical":
            raise ValidationError("--classical-check needs mode 'classical' and a b table")
        out["classical_check"] = classical_check(_b_table(data), s, r_max + 2)
    return out


def cmd_epoche(data: dict) -> dict:
    ctx = make_context(data["s"], data.get("q"))
    thermo = data.get("labels", "mechanical") == "thermo"
    if thermo and data["s"] != 2:
        raise ValidationError("thermodynamic labels need s = 2")
    el = parse_epoch(data["expression"], ctx, thermo)
    nf = epoche_normal_form(el, data.get("leafcap", 6), data.get("etacap", 4))
    return {"result": format_epoch(nf, thermo)}


# -- output -------------------------------------------------------------------

def emit_report(results: dict, fmt: str = "json") -> str:
    """Deterministic rendering; dictionaries are key-sorted."""
    if fmt == "json":
        return json.dumps(results, sort_keys=True, indent=2)
    if not results:
        return "no output"
    if set(results) == {"result"}:
        return str(results["result"])
    lines = []
    for key in sorted(results):
        val = results[key]
        if isinstance(val, list):
            lines.append(f"{key}:")
            for item in val:
                lines.append("  " + (json.dumps(item, sort_keys=True) if isinstance(item, (dict, list)) else str(item)))
        elif isinstance(val, dict):
            lines.append(f"{key}: {json.dumps(val, sort_keys=True)}")
        else:
            lines.append(f"{key}: {val}")
    return "\n".join(lines)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="braidleg", description="Braided phase-space algebra and q-Legendre tools")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, inline=True):
        p.add_argument("--problem", help="JSON problem file")
        p.add_argument("--format", choices=["json", "text"], default=None)
        if inline:
            p.add_argument("--s", type=int, default=1)
            p.add_argument("--q", choices=["symbolic", "one", "side-conditions"], default="one")

    p = sub.add_parser("normal-form", help="PBW normal form of an expression")
    p.add_argument("expression", nargs="?")
    common(p)
    p = sub.add_parser("bracket", help="q-Poisson bracket <left, right>")
    p.add_argument("left", nargs="?")
    p.add_argument("right", nargs="?")
    common(p)
    for name in ("hj-evolve", "ham-evolve"):
        p = sub.add_parser(name)
        common(p, inline=False)
        p.add_argument("--verify", action="store_true", help="also run the braiding check")
    p = sub.add_parser("legendre", help="images of cap generators under the q-Legendre map")
    common(p, inline=False)
    p.add_argument("--inverse", action="store_true")
    p.add_argument("--classical-check", action="store_true")
    p = sub.add_parser("epoche-nf", help="normal form in the bracketing algebra")
    p.add_argument("expression", nargs="?")
    common(p)
    p.add_argument("--leafcap", type=int, default=6)
    p.add_argument("--etacap", type=int, default=4)
    p.add_argument("--labels", choices=["mechanical", "thermo"], default="mechanical")
    p = sub.add_parser("verify", help="run a verification suite")
    p.add_argument("--suite", choices=sorted(SUITES), required=True)
    p.add_argument("--s", type=int, default=None)
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--format", choices=["json", "text"], default="text")
    return ap


def _inline(args, command: str) -> dict:
    data = {"version": 1, "s": args.s, "q": args.q}
    if command == "bracket":
        if args.left is None or args.right is None:
            raise ValidationError("bracket needs two expressions or --problem")
        data.update(left=args.left, right=args.right)
    else:
        if args.expression is None:
            raise ValidationError(f"{command} needs an expression or --problem")
        data["expression"] = args.expression
    if command == "epoche-nf":
        data.update(leafcap=args.leafcap, etacap=args.etacap, labels=args.labels)
    return validate_problem(command, data)


def run(argv) -> tuple[int, str]:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return (0 if exc.code == 0 else 1), ""
    cmd = args.command
    try:
        if cmd == "verify":
            kw = {"seed": args.seed}
            if args.s is not None:
                kw["s"] = args.s
            try:
                rep = SUITES[args.suite](**kw)
            except ValueError as exc:
                raise ValidationError(str(exc)) from None
            text = emit_report(rep, "json") if args.format == "json" else rep["message"]
            return (0 if rep["ok"] else 2), text
        if args.problem:
            data = load_problem(args.problem, cmd)
        elif cmd in ("normal-form", "bracket", "epoche-nf"):
            data = _inline(args, cmd)
        else:
            raise ValidationError(f"{cmd} needs --problem")
        if cmd == "normal-form":
            res = cmd_normal_form(data)
        elif cmd == "bracket":
            res = cmd_bracket(data)
        elif cmd == "hj-evolve":
            if args.verify:
                data = {**data, "verify": True}
            res = cmd_hj(data)
        elif cmd == "ham-evolve":
            if args.verify:
                data = {**data, "verify": True}
            res = cmd_ham(data)
        elif cmd == "legendre":
            res = cmd_legendre(data, args.inverse, args.classical_check)
        else:
            res = cmd_epoche(data)
        inline_default = "text" if cmd in ("normal-form", "bracket", "epoche-nf") and not args.problem else "json"
        return 0, emit_report(res, args.format or inline_default)
    except ConsistencyError as exc:
        return 2, f"error: internal consistency: {exc}"
    except (BraidlegError, ValueError, ZeroDivisionError) as exc:
        return 1, f"error: {exc}"


def main(argv=None) -> int:
    code, text = run(sys.argv[1:] if argv is None else argv)
    if text:
        print(text, file=sys.stderr if text.startswith("error:") else sys.stdout)
    return code


if __name__ == "__main__":
    sys.exit(main())
