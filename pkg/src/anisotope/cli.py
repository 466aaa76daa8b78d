"""Command line entry point: ``anisotope <command> --field K args...``.

Every command prints one JSON object (schema "1") on stdout.  Exit codes:
0 success, 2 unparsable input, 3 undetermined within the search bounds,
4 internal invariant breach (including a failing self-test).
"""

from __future__ import annotations

import argparse
import json
import sys

from . import cft, dioph, qform
from .field import DomainError, GlobalField, parse_place
from .hilbert import hilbert_symbol

SCHEMA = "1"

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_UNDETERMINED = 3
EXIT_BREACH = 4


class ParseError(Exception):
    pass


# -- (de)serialization of certificates ----------------------------------------------


def _s(x):
    return None if x is None else str(x)


def certificate_to_dict(cert):
    out = {"kind": cert.kind}
    if cert.witness is not None:
        out["witness"] = [str(x) for x in cert.witness]
    if cert.place is not None:
        out["place"] = str(cert.place)
    if cert.diagonal is not None:
        out["diagonal"] = [str(x) for x in cert.diagonal]
    if cert.congruence is not None:
        out["congruence"] = [[str(x) for x in row] for row in cert.congruence]
    if cert.obstruction:
        obs = {}
        for k, v in cert.obstruction.items():
            if isinstance(v, tuple):
                obs[k] = [str(x) for x in v]
            elif isinstance(v, int):
                obs[k] = v
            else:
                obs[k] = str(v)
        out["obstruction"] = obs
    return out


def certificate_from_dict(data, K):
    obs = dict(data.get("obstruction", {}))
    for k in ("value", "disc"):
        if k in obs:
            obs[k] = K(obs[k])
    if "args" in obs:
        obs["args"] = tuple(K(x) for x in obs["args"])
    witness = data.get("witness")
    return qform.IsotropyCertificate(
        kind=data["kind"],
        witness=None if witness is None else tuple(K(x) for x in witness),
        place=parse_place(data["place"], K) if "place" in data else None,
        diagonal=tuple(K(x) for x in data["diagonal"]) if "diagonal" in data else None,
        congruence=tuple(tuple(K(x) for x in row) for row in data["congruence"]) if "congruence" in data else None,
        obstruction=obs,
    )


# -- argument handling --------------------------------------------------------------------


def parse_matrix(text, K):
    rows = [r for r in text.split(";") if r.strip()]
    return [[K(x) for x in row.split(",")] for row in rows]


def _form(args, K):
    if args.matrix:
        return qform.QuadForm.from_coefficients(K, parse_matrix(args.matrix, K))
    if not args.args:
        raise ParseError("expected coefficients or --matrix")
    return qform.QuadForm.diagonal(K, [K(x) for x in args.args])


def _constants(args, K):
    consts, _ = cft.load_constants(K, args.constants)
    return consts


def _parse_witness(text, K):
    w = {}
    for part in filter(None, (p.strip() for p in text.split(","))):
        name, _, value = part.partition("=")
        if not _:
            raise ParseError(f"witness entries look like name=value, got {part!r}")
        w[name.strip()] = K(value)
    return w


def cmd_decide(args, K):
    f = _form(args, K)
    heights = [args.height] if args.height is not None else None
    d = qform.decide(f, heights=heights)
    cert = d.certificate
    return {
        "verdict": d.verdict,
        "place": _s(cert.place),
        "witness": None if cert.witness is None else [str(x) for x in cert.witness],
        "certificate": certificate_to_dict(cert),
    }


def cmd_check(args, K):
    f = _form(args, K)
    if not args.certificate:
        raise ParseError("check needs --certificate (JSON text or @file)")
    text = args.certificate
    if text.startswith("@"):
        with open(text[1:]) as fh:
            text = fh.read()
    data = json.loads(text)
    if "certificate" in data:
        data = data["certificate"]
    res = qform.check_certificate(f, certificate_from_dict(data, K))
    return {"valid": res.ok, "reason": res.reason}


def cmd_hilbert(args, K):
    if len(args.args) != 3:
        raise ParseError("hilbert takes a, b and a place")
    a, b = K(args.args[0]), K(args.args[1])
    v = parse_place(args.args[2], K)
    return {"symbol": hilbert_symbol(a, b, v), "place": str(v)}


def cmd_emit(args, K):
    kind = args.kind
    if kind == "isotropy":
        F = dioph.emit_isotropy_system([K(x) for x in args.args], K)
    elif kind == "anisotropy":
        consts = _constants(args, K) if len(args.args) == 4 else None
        F = dioph.emit_anisotropy_formula([K(x) for x in args.args], consts, K)
    elif kind == "t-membership":
        if len(args.args) != 2:
            raise ParseError("t-membership takes a and b")
        F = dioph.emit_t_membership(K(args.args[0]), K(args.args[1]), K)
    else:
        raise ParseError(f"unknown formula kind {kind!r}")
    out = {"formula": dioph.to_sexpr(F), "existential_positive": dioph.is_existential_positive(F)}
    if args.flatten:
        out["flat"] = dioph.to_sexpr(dioph.flatten(F, K))
        out["and_constant"] = str(K.nonsquare_constant())
    return out


def cmd_eval(args, K):
    if not args.formula:
        raise ParseError("eval needs --formula")
    F = dioph.parse_sexpr(args.formula, K)
    w = _parse_witness(args.witness or "", K)
    needs = any(isinstance(n, dioph.Pred) and n.name in ("phi", "psi", "coset_unit", "coset_one_plus_j") for n in dioph.walk(F))
    ev = dioph.SemanticEvaluator(K, _constants(args, K) if needs else None)
    return {"value": dioph.eval_formula(F, w, ev)}


def cmd_constants(args, K):
    bound = args.bound or 500
    if args.find:
        consts, counts = cft.find_constants(K, bound)
        text = cft.constants_to_json(consts, bound, counts)
        if args.write:
            with open(args.write, "w") as fh:
                fh.write(text)
        return {"constants": consts.to_dict(), "bound": bound, "checks": counts}
    consts, data = cft.load_constants(K, args.constants)
    bound = args.bound or data.get("bound", 500)
    counts, failures = cft.verify_constants(consts, bound)
    kernel, classes, rfail = cft.reciprocity_check(consts, 10_000, kernel_bound=10**6 if K.is_rational else None)
    ok = not failures and not rfail
    out = {
        "constants": consts.to_dict(),
        "bound": bound,
        "checks": counts,
        "reciprocity": {"kernel": kernel, "classes": classes},
        "failures": failures + rfail,
        "ok": ok,
    }
    if not ok:
        raise Breach(out)
    return out


def cmd_selftest(args, K):
    from .acceptance import run_all

    only = {int(x) for x in args.only.split(",")} if args.only else None
    results = run_all(scale=args.scale, only=only)
    out = {
        "results": [
            {"criterion": r.number, "title": r.title, "passed": r.passed, "detail": r.detail, "seconds": round(r.seconds, 2)}
            for r in results
        ],
        "passed": all(r.passed for r in results),
    }
    if not out["passed"]:
        raise Breach(out)
    return out


class Breach(Exception):
    def __init__(self, payload):
        super().__init__("invariant breach")
        self.payload = payload


COMMANDS = {
    "decide": cmd_decide,
    "check": cmd_check,
    "hilbert": cmd_hilbert,
    "emit": cmd_emit,
    "eval": cmd_eval,
    "constants": cmd_constants,
    "selftest": cmd_selftest,
}


def build_parser():
    p = argparse.ArgumentParser(prog="anisotope", description="Isotropy of quadratic forms over Q and F_q(t).")
    p.add_argument("command", choices=sorted(COMMANDS))
    p.add_argument("args", nargs="*", help="coefficients, or a b place for hilbert")
    p.add_argument("--field", default="Q", help="Q or F<q>(t), e.g. F3(t)")
    p.add_argument("--matrix", help="symmetric coefficient matrix, rows separated by ';'")
    p.add_argument("--height", type=int, help="witness search height (decide)")
    p.add_argument("--bound", type=int, help="place norm bound (constants)")
    p.add_argument("--constants", help="constants fixture path (default: bundled)")
    p.add_argument("--certificate", help="certificate JSON or @file (check)")
    p.add_argument("--kind", default="isotropy", help="isotropy | anisotropy | t-membership (emit)")
    p.add_argument("--flatten", action="store_true", help="also print the single-equation form (emit)")
    p.add_argument("--formula", help="s-expression formula (eval)")
    p.add_argument("--witness", help="name=value,... assignment (eval)")
    p.add_argument("--find", action="store_true", help="search for constants instead of verifying (constants)")
    p.add_argument("--write", help="write found constants to this path (constants)")
    p.add_argument("--scale", type=float, default=1.0, help="sample scale for selftest")
    p.add_argument("--only", help="comma-separated criterion numbers (selftest)")
    p.add_argument("--pretty", action="store_true", help="indented output")
    return p


def _emit(obj, pretty, stream=None):
    stream = stream or sys.stdout
    if pretty:
        stream.write(json.dumps(obj, indent=2) + "\n")
    else:
        stream.write(json.dumps(obj, separators=(",", ":")) + "\n")


def run(argv=None, stream=None):
    parser = build_parser()
    try:
        args = parser.parse_intermixed_args(argv)
    except SystemExit as exc:
        return EXIT_PARSE if exc.code else EXIT_OK
    head = {"schema": SCHEMA, "command": args.command}
    try:
        K = GlobalField.parse(args.field)
        head["field"] = K.tag
        body = COMMANDS[args.command](args, K)
        code = EXIT_OK
    except cft.SearchExhausted as exc:
        body, code = {"error": "undetermined", "message": str(exc)}, EXIT_UNDETERMINED
    except Breach as exc:
        body, code = dict(exc.payload, error="invariant breach"), EXIT_BREACH
    except (ParseError, DomainError, json.JSONDecodeError, ZeroDivisionError, KeyError, OSError) as exc:
        body, code = {"error": "parse", "message": str(exc)}, EXIT_PARSE
    except Exception as exc:  # noqa: BLE001 - anything else is our bug
        body, code = {"error": "invariant breach", "message": f"{type(exc).__name__}: {exc}"}, EXIT_BREACH
    _emit({**head, **body}, args.pretty, stream)
    return code


def main(argv=None):
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
