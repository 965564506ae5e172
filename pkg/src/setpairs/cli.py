"""Command-line driver.

Exit codes: 0 pass, 1 usage or I/O, 2 invalid input, 3 finding (a failed
check or a rejected certificate), 4 search stopped by its budget.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from typing import Sequence

from .certificate import ELL_OUT_OF_SCOPE, INVALID_INPUT, certify
from .decomposition import Policy, run_decomposition
from .errors import Finding, InvalidInput
from .privatepairs import select_private_pairs
from .recheck import check_certificate, explain
from .search import SearchSpec, enumerate_systems, sample_systems, stream_lines
from .setsystem import SetFamily, bounds_for_m, validate_nm_system
from .skew import SetPairSystem, bollobas_bound_check, verify_skew

EXIT_OK, EXIT_USAGE, EXIT_INVALID, EXIT_FINDING, EXIT_TRUNCATED = 0, 1, 2, 3, 4


class _Usage(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise _Usage(f"{self.prog}: error: {message}")


def _braces(xs) -> str:
    return "{" + ",".join(map(str, xs)) + "}"


def _read_json(path: str):
    try:
        if path == "-":
            return json.load(sys.stdin)
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise _Usage(f"cannot read {path}: {exc.strerror or exc}") from exc
    except ValueError as exc:
        raise _Usage(f"{path}: not valid JSON ({exc})") from exc


def _read_family(path: str) -> SetFamily:
    obj = _read_json(path)
    try:
        return SetFamily.from_json(obj)
    except InvalidInput:
        raise
    except ValueError as exc:
        raise _Usage(f"{path}: {exc}") from exc


def _emit(text: str, output: str | None) -> None:
    if output:
        try:
            with open(output, "w", encoding="utf-8") as fh:
                fh.write(text + "\n")
        except OSError as exc:
            raise _Usage(f"cannot write {output}: {exc.strerror or exc}") from exc
    else:
        print(text)


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, ensure_ascii=False)


def _invalid_message(exc: InvalidInput) -> str:
    w = exc.witness
    if exc.code == "PropertyIIFailed":
        return f"property (ii) failed, witness {_braces(w)}"
    if exc.code == "PropertyIFailed":
        if "vertex" in w:
            return f"property (i) failed, vertex {w['vertex']} lies in every set"
        return f"property (i) failed, dropping set {w['set']} empties the intersection"
    return f"{exc.code}: {exc}"


def _policy(args) -> Policy:
    return Policy(min_stage_size=args.min_stage_size)


# -- commands ----------------------------------------------------------------


def cmd_validate(args) -> int:
    fam = _read_family(args.file)
    try:
        nm = validate_nm_system(fam)
    except InvalidInput as exc:
        report = {"valid": False, "error": exc.code, "witness": exc.witness}
        print(_dump(report) if args.json else _invalid_message(exc))
        return EXIT_INVALID
    report = {"valid": True, "n": nm.n, "k": nm.k, "m": nm.m, "ell": nm.ell}
    print(_dump(report) if args.json else f"valid (n={nm.n}, k={nm.k}, m={nm.m}, ℓ={nm.ell})")
    return EXIT_OK


def _validated(args):
    fam = _read_family(args.file)
    return validate_nm_system(fam)


def cmd_decompose(args) -> int:
    d = run_decomposition(_validated(args), _policy(args))
    doc = d.to_json()
    if args.json:
        print(_dump(doc))
        return EXIT_OK
    print(f"t={doc['t']}  A={_braces(doc['A'])}  G={_braces(doc['G'])}")
    for st in doc["stages"]:
        kern = ", ".join(f"x{i}={x}" for i, x in st["kernel"])
        print(f"stage {st['j']}: sets {_braces(st['members'])}  kernel {kern}")
    return EXIT_OK


def cmd_pairs(args) -> int:
    d = run_decomposition(_validated(args), _policy(args))
    doc = select_private_pairs(d).to_json()
    if args.json:
        print(_dump(doc))
        return EXIT_OK
    for p in doc:
        rules = f"  via {'+'.join(p['rules'])}" if p["rules"] else ""
        print(f"set {p['owner']} stage {p['time']}: pair {_braces(p['pair'])} anchor {p['anchor']}{rules}")
    return EXIT_OK


def _render_certificate(doc: dict) -> str:
    status = doc["status"]
    lines = [f"status: {status}"]
    if status == INVALID_INPUT:
        v = doc["validation"]
        lines.append(f"invalid input: {v['error']} witness {v['witness']}")
        return "\n".join(lines)
    p = doc["parameters"]
    lines.append(f"n={p['n']}, k={p['k']}, m={p['m']}, ℓ={p['ell']}")
    if status == ELL_OUT_OF_SCOPE:
        floor = doc["policy"]["min_stage_size"]
        lines.append(f"ℓ<{floor}: out-of-scope case; arithmetic bounds only")
    d = doc["decomposition"]
    if d is not None:
        lines.append(f"t={d['t']}  A={_braces(d['A'])}  G={_braces(d['G'])}")
    b = doc["bounds"]
    if b is not None:
        if b["h"] is not None:
            lines.append(f"h={b['h']} <= C(m+2,2)={b['bollobas']}")
        lines.append(f"n={b['n']} <= {b['main']}: {'yes' if b['main_ok'] else 'NO'}")
        lines.append(f"n={b['n']} <= {b['conjecture']} (conjecture): {'yes' if b['conjecture_ok'] else 'no'}")
    failed = [c["name"] for c in doc["checks"] if c["status"] == "fail"]
    if failed:
        lines.append("failed checks: " + ", ".join(failed))
    if doc["error"]:
        lines.append(f"finding: {doc['error']['code']}: {doc['error']['message']}")
    return "\n".join(lines)


def cmd_certify(args) -> int:
    if args.check:
        doc = _read_json(args.file)
        if not isinstance(doc, dict):
            print("not a certificate: expected a JSON object", file=sys.stderr)
            return EXIT_INVALID
        ok = check_certificate(doc)
        if args.json:
            print(_dump({"valid": ok, "reason": None if ok else explain(doc)}))
        else:
            print("certificate verified" if ok else f"certificate rejected: {explain(doc)}")
        return EXIT_OK if ok else EXIT_FINDING

    fam = _read_family(args.file)
    start = time.perf_counter()
    cert = certify(fam, _policy(args))
    doc = cert.data
    if args.timing:
        doc = dict(doc, meta={"elapsed_seconds": round(time.perf_counter() - start, 6)})
    _emit(_dump(doc) if args.json else _render_certificate(doc), args.output)
    if cert.status == INVALID_INPUT:
        return EXIT_INVALID
    return EXIT_OK if cert.passed else EXIT_FINDING


def cmd_skew_verify(args) -> int:
    obj = _read_json(args.file)
    try:
        sys_ = SetPairSystem.from_json(obj)
    except ValueError as exc:
        raise _Usage(f"{args.file}: {exc}") from exc
    rep = verify_skew(sys_)
    bound = bollobas_bound_check(sys_)
    doc = {
        "valid": rep.valid,
        "condition": rep.condition,
        "witness": list(rep.witness) if rep.witness else None,
        "h": bound.h,
        "bound": bound.bound,
        "tight": rep.valid and bound.tight,
    }
    if args.json:
        print(_dump(doc))
    elif not rep.valid:
        where = {
            "size": "entry {0} has the wrong sizes",
            "a": "condition (a) fails: A_{0} meets B_{0}",
            "b": "condition (b) fails: A_{0} misses B_{1}",
        }[rep.condition]
        print(where.format(*rep.witness) + f" (witness i={rep.witness[0]})")
    else:
        print("condition (a): pass\ncondition (b): pass")
        rel = "=" if bound.tight else ("<" if bound.ok else ">")
        tag = " (tight)" if bound.tight else ""
        print(f"h={bound.h} {rel} bound {bound.bound}{tag}")
    if not rep.valid:
        return EXIT_INVALID
    return EXIT_OK if bound.ok else EXIT_FINDING


def cmd_search(args) -> int:
    if args.budget_seconds is not None and args.budget_seconds <= 0:
        raise _Usage("--budget-seconds must be positive")
    if args.m is not None and args.m < 1:
        raise _Usage("--m must be at least 1")
    k = None if args.m is None else args.n - args.m
    spec = SearchSpec(
        n=args.n,
        k=k,
        ell_range=(args.ell_min, args.ell_max),
        time_budget=args.budget_seconds,
        canonicalize=args.canonicalize,
        seed=args.seed,
        jobs=args.jobs,
    )
    out = open(args.output, "w", encoding="utf-8") if args.output else sys.stdout
    try:
        if args.sample is not None:
            found = sample_systems(spec, args.sample)
            for fam in found:
                print(json.dumps(fam.to_json()), file=out)
            summary = {"summary": {"mode": "sample", "seed": args.seed, "draws": args.sample, "found": len(found)}}
            print(json.dumps(summary), file=out)
            return EXIT_OK
        result = enumerate_systems(spec, checkpoint=args.checkpoint)
        for line in stream_lines(result):
            print(line, file=out)
        summary = result.summary()
        summary["best_n"] = args.n if result.systems else None
        print(json.dumps({"summary": summary}), file=out)
    finally:
        if out is not sys.stdout:
            out.close()
    return EXIT_OK if result.exhausted else EXIT_TRUNCATED


def cmd_bound(args) -> int:
    if args.m < 1:
        raise _Usage("--m must be at least 1")
    b = bounds_for_m(args.m)
    if args.json:
        print(_dump({"m": args.m, "conjecture": b.conjecture, "main": b.main, "tuza": str(b.tuza)}))
    else:
        print(f"conjecture {b.conjecture}, main {b.main}, tuza {b.tuza}")
    return EXIT_OK


# -- parser ------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="setpairs", description="(n,m)-system decomposition, certificates and search.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def with_file(name, help_):
        sp = sub.add_parser(name, help=help_)
        sp.add_argument("file", help="input JSON file, or - for stdin")
        sp.add_argument("--json", action="store_true", help="emit JSON instead of text")
        return sp

    with_file("validate", "check that a family is an (n,m)-system")
    for name, help_ in (("decompose", "show the staged decomposition"), ("pairs", "show the private pairs")):
        sp = with_file(name, help_)
        sp.add_argument("--min-stage-size", type=int, default=4)

    sp = with_file("certify", "run the whole pipeline and emit a certificate")
    sp.add_argument("--min-stage-size", type=int, default=4)
    sp.add_argument("--check", action="store_true", help="FILE is a certificate; re-verify it")
    sp.add_argument("--output", "-o", help="write the certificate here")
    sp.add_argument("--timing", action="store_true", help="add a meta block with elapsed time")

    with_file("skew-verify", "check a skew set-pair system and its binomial bound")

    sp = sub.add_parser("search", help="exhaustive search for (n,m)-systems")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--m", type=int)
    sp.add_argument("--ell-min", type=int, default=2)
    sp.add_argument("--ell-max", type=int)
    sp.add_argument("--budget-seconds", type=float)
    sp.add_argument("--jobs", type=int, default=1)
    sp.add_argument("--canonicalize", action=argparse.BooleanOptionalAction, default=True)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--sample", type=int, metavar="COUNT", help="draw COUNT random candidates instead of enumerating")
    sp.add_argument("--checkpoint", help="resume file for finished subtrees")
    sp.add_argument("--output", "-o", help="write the JSON-lines stream here")

    sp = sub.add_parser("bound", help="print the reference bounds for m")
    sp.add_argument("--m", type=int, required=True)
    sp.add_argument("--json", action="store_true")
    return p


COMMANDS = {
    "validate": cmd_validate,
    "decompose": cmd_decompose,
    "pairs": cmd_pairs,
    "certify": cmd_certify,
    "skew-verify": cmd_skew_verify,
    "search": cmd_search,
    "bound": cmd_bound,
}


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _Usage as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    try:
        return COMMANDS[args.command](args)
    except _Usage as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except InvalidInput as exc:
        if args.command == "search":
            # bad flags (n too large, empty ranges) are usage errors here
            print(f"{exc.code}: {exc}", file=sys.stderr)
            return EXIT_USAGE
        print(_invalid_message(exc), file=sys.stderr)
        return EXIT_INVALID
    except Finding as exc:
        print(f"finding: {exc.code}: {exc}", file=sys.stderr)
        return EXIT_FINDING


if __name__ == "__main__":
    sys.exit(main())
