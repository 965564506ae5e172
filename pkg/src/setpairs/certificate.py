"""End-to-end certification of an (n,m)-system.

``certify`` runs decomposition, pair selection, the kernel digraph, free
pairs, the m-set recursion and the skew system, and records every
intermediate plus every lemma verdict in a JSON document. The document is
checked by :mod:`setpairs.recheck`, which shares no code with this pipeline.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from math import comb

from .decomposition import Policy, run_decomposition, verify_observations
from .errors import Finding, InvalidInput
from .freepairs import (
    build_digraph,
    count_free,
    half_floor_check,
    independence_check,
    max_independent_set_forest,
    verify_digraph,
)
from .privatepairs import select_private_pairs, verify_pair_lemmas
from .report import FAIL, PASS, Check
from .setsystem import NMSystem, SetFamily, bounds_for_m, validate_nm_system
from .skew import (
    assemble_skew_system,
    bollobas_bound_check,
    build_m_sets,
    m_sets_to_json,
    verify_skew,
)

FORMAT = "setpairs-certificate"
VERSION = 1

CERTIFIED = "certified"
FINDING = "finding"
INVALID_INPUT = "invalid_input"
ELL_OUT_OF_SCOPE = "ell_out_of_scope"

PIPELINE_SECTIONS = ("decomposition", "pairs", "digraph", "free", "msets", "skew")


@dataclass
class Certificate:
    data: dict

    @property
    def status(self) -> str:
        return self.data["status"]

    @property
    def passed(self) -> bool:
        """No recorded check failed and the input was in scope of the pipeline."""
        return self.status in (CERTIFIED, ELL_OUT_OF_SCOPE)

    def to_json(self, indent: int | None = 2) -> str:
        return json.dumps(self.data, indent=indent)


def _bounds_block(n: int, m: int, h: int | None) -> dict:
    b = bounds_for_m(m)
    block = {
        "n": n,
        "m": m,
        "main": b.main,
        "conjecture": b.conjecture,
        "tuza": str(b.tuza),
        "main_ok": n <= b.main,
        "conjecture_ok": n <= b.conjecture,
        "h": h,
        "free_floor": None,
        "bollobas": None,
        "implied_max_n": None,
    }
    if h is not None:
        bollobas = comb(m + 2, 2)
        block["free_floor"] = str(Fraction(n - 3 * m, 2))
        block["bollobas"] = bollobas
        # (n - 3m)/2 <= h <= C(m+2, 2) forces n <= 2*C(m+2, 2) + 3m
        block["implied_max_n"] = 2 * bollobas + 3 * m
    return block


def _bound_checks(bounds: dict) -> list[Check]:
    checks = []
    if bounds["main_ok"]:
        checks.append(Check("bound.main", PASS))
    else:
        checks.append(Check("bound.main", FAIL, {"n": bounds["n"], "main": bounds["main"]}))
    if bounds["h"] is not None:
        n, m, h = bounds["n"], bounds["m"], bounds["h"]
        floor_ok = n - 3 * m <= 2 * h
        chain_ok = (
            floor_ok
            and h <= bounds["bollobas"]
            and bounds["implied_max_n"] == bounds["main"]
            and n <= bounds["implied_max_n"]
        )
        if chain_ok:
            checks.append(Check("bound.chain", PASS))
        else:
            checks.append(Check("bound.chain", FAIL, {"n": n, "h": h, "implied_max_n": bounds["implied_max_n"]}))
    return checks


def _empty(family: SetFamily, policy: Policy) -> dict:
    data = {
        "format": FORMAT,
        "version": VERSION,
        "status": None,
        "policy": policy.to_json(),
        "system": family.to_json(),
        "validation": None,
        "parameters": None,
    }
    data.update({name: None for name in PIPELINE_SECTIONS})
    data.update({"checks": [], "bounds": None, "error": None})
    return data


def certify(system: NMSystem | SetFamily, policy: Policy | None = None) -> Certificate:
    """Run the whole pipeline and record it; failures are embedded, not raised."""
    policy = policy or Policy()
    family = system.family if isinstance(system, NMSystem) else system
    data = _empty(family, policy)

    try:
        nm = validate_nm_system(family)
    except InvalidInput as exc:
        data["status"] = INVALID_INPUT
        data["validation"] = {"valid": False, "error": exc.code, "witness": exc.witness}
        return Certificate(data)
    data["validation"] = {"valid": True, "error": None, "witness": None}
    data["parameters"] = {"n": nm.n, "k": nm.k, "m": nm.m, "ell": nm.ell}

    if nm.ell < policy.min_stage_size:
        bounds = _bounds_block(nm.n, nm.m, None)
        data["bounds"] = bounds
        checks = _bound_checks(bounds)
        data["checks"] = [c.to_json() for c in checks]
        data["status"] = ELL_OUT_OF_SCOPE if all(c.ok for c in checks) else FINDING
        return Certificate(data)

    checks: list[Check] = []
    try:
        d = run_decomposition(nm, policy)
        data["decomposition"] = d.to_json()
        checks += verify_observations(d)

        ledger = select_private_pairs(d)
        data["pairs"] = ledger.to_json()
        checks += verify_pair_lemmas(ledger, d)

        g = build_digraph(ledger, d)
        data["digraph"] = g.to_json()
        checks += verify_digraph(g, d)

        marking = max_independent_set_forest(g)
        data["free"] = marking.to_json()
        checks += [independence_check(marking, g), half_floor_check(marking, g), count_free(marking, nm)]

        msets = build_m_sets(nm, d, ledger, marking)
        data["msets"] = m_sets_to_json(msets)
        skew = assemble_skew_system(ledger, marking, msets, nm.m)
        data["skew"] = skew.to_json()
        rep = verify_skew(skew)
        if rep.valid:
            checks.append(Check("skew.system", PASS))
        else:
            checks.append(Check("skew.system", FAIL, {"condition": rep.condition, "index": list(rep.witness)}))
        bound = bollobas_bound_check(skew)
        checks.append(Check("skew.bound", PASS) if bound.ok else Check("skew.bound", FAIL, {"h": bound.h, "bound": bound.bound}))

        bounds = _bounds_block(nm.n, nm.m, skew.h)
        data["bounds"] = bounds
        checks += _bound_checks(bounds)
    except Finding as exc:
        data["error"] = {"code": exc.code, "message": str(exc), "witness": exc.witness}

    data["checks"] = [c.to_json() for c in checks]
    failed = data["error"] is not None or not all(c.ok for c in checks)
    data["status"] = FINDING if failed else CERTIFIED
    return Certificate(data)
