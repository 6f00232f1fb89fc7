"""Structured certificate documents and their independent re-verification.

A document is plain JSON (``schema: 1``).  Polynomials and forms are stored
as canonical strings of the problem-file language so that a document can be
re-checked by parsing them back and redoing only products, derivatives and
wedges: no linear solve is repeated, except for the negative divisibility
claim behind ``NOT_INVARIANT``.
"""

from __future__ import annotations

import json
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from .dsl import (
    Elaborator,
    format_form,
    format_jet,
    format_monomial,
    format_tform,
    format_tpoly,
    parse_expression,
    value_to_jet,
    value_to_pform,
    value_to_tform,
    value_to_tpoly,
)
from .forms import PForm, TForm, d_function, exterior_d, twedge, wedge
from .linalg import replay
from .ring import INFINITE, Jet, TPoly, monomials_of_degree
from .solver import INVARIANT, RELATIVE, ObstructionCertificate, divides, format_unknown, render_certificate

SCHEMA = 1

SUCCESS = "SUCCESS"
OBSTRUCTION = "OBSTRUCTION"
NOT_INVARIANT = "NOT_INVARIANT"
INCONCLUSIVE = "INCONCLUSIVE"
FAIL = "FAIL"

EXIT_CODES = {SUCCESS: 0, OBSTRUCTION: 2, NOT_INVARIANT: 2, FAIL: 2, INCONCLUSIVE: 3}


class Printer:
    """Formats and re-parses values in one variable/truncation context."""

    def __init__(self, names: Sequence[str], D: int, K: int):
        self.names = list(names)
        self.n = len(self.names)
        self.D, self.K = D, K

    def jet(self, j: Jet) -> str:
        return format_jet(j, self.names)

    def form(self, a: PForm) -> str:
        return format_form(a, self.names)

    def tform(self, a: TForm) -> str:
        return format_tform(a, self.names)

    def tpoly(self, F: TPoly) -> str:
        return format_tpoly(F, self.names)

    def mono(self, e) -> str:
        return format_monomial(e, self.names) or "1"

    def basis(self, idx) -> str:
        return "*".join("d" + self.names[i] for i in idx)

    # -- parsing back -------------------------------------------------------
    def _value(self, text: str):
        return Elaborator(self.names, self.D, self.K).evaluate(parse_expression(text))

    def parse_jet(self, text: str) -> Jet:
        return value_to_jet(self._value(text), self.n, self.D)

    def parse_form(self, text: str, p: int = 1) -> PForm:
        return value_to_pform(self._value(text), p, self.n, self.D)

    def parse_tform(self, text: str, p: int = 1) -> TForm:
        return value_to_tform(self._value(text), p, self.n, self.D, self.K)

    def parse_tpoly(self, text: str) -> TPoly:
        return value_to_tpoly(self._value(text), self.n, self.D, self.K)


def nu(x) -> object:
    return "infinite" if x == INFINITE else int(x)


def obstruction_payload(cert: ObstructionCertificate, target: PForm, f: Jet, pr: Printer) -> Dict:
    return {
        "problem": cert.problem,
        "degree": cert.degree,
        "equation_degree": cert.equation_degree,
        "t_order": cert.t_order,
        "target": pr.form(target),
        "f": pr.jet(f),
        "equations": [
            {
                "component": "d" + pr.names[eq.label[0]],
                "monomial": pr.mono(eq.label[1]),
                "row": {format_unknown(c, pr.names): str(v) for c, v in sorted(
                    eq.row.items(), key=lambda cv: format_unknown(cv[0], pr.names))},
                "rhs": str(eq.rhs),
                "multiplier": str(m),
            }
            for m, eq in zip(cert.multipliers, cert.equations)
        ],
        "sum": f"0 = {cert.rhs}",
        "note": (f"t-order {cert.t_order}: " if cert.t_order else "") + render_certificate(cert, pr.names),
    }


def make_document(task: str, args: List, status: str, pr: Printer, trusted: int, payload: Dict) -> Dict:
    return {
        "schema": SCHEMA,
        "task": task,
        "args": [str(a) for a in args],
        "status": status,
        "vars": pr.names,
        "degree": pr.D,
        "torder": pr.K,
        "trusted_degree": trusted,
        "payload": payload,
    }


def dumps(doc: Dict) -> str:
    return json.dumps(doc, indent=2) + "\n"


# -- independent re-verification ---------------------------------------------
def _expected_row(problem: str, target: PForm, f: Jet, i: int, m, names) -> Tuple[Dict[str, str], Fraction]:
    """Rebuild one coefficient equation directly from its definition."""
    row: Dict[str, Fraction] = {}

    def add(label, v):
        key = format_unknown(label, names)
        row[key] = row.get(key, 0) + v

    fi = f.diff(i)
    for g, c in fi.terms.items():
        if all(a >= b for a, b in zip(m, g)):
            add(("a", tuple(a - b for a, b in zip(m, g))), c)
    if problem == RELATIVE:
        up = list(m)
        up[i] += 1
        add(("h", tuple(up)), Fraction(m[i] + 1))
    elif problem == INVARIANT:
        for g, c in f.terms.items():
            if all(a >= b for a, b in zip(m, g)):
                add(("eta", i, tuple(a - b for a, b in zip(m, g))), c)
    rhs = target.component((i,)).coeff(m)
    return {k: str(v) for k, v in row.items() if v}, rhs


def _parse_monomial(text: str, names) -> Tuple[int, ...]:
    e = [0] * len(names)
    if text == "1":
        return tuple(e)
    for part in text.split("*"):
        name, _, k = part.partition("^")
        e[names.index(name)] += int(k) if k else 1
    return tuple(e)


def check_obstruction(ob: Dict, pr: Printer) -> List[str]:
    errors = []
    target = pr.parse_form(ob["target"])
    f = pr.parse_jet(ob["f"])
    rows = []
    for eq in ob["equations"]:
        i = pr.names.index(eq["component"][1:])
        m = _parse_monomial(eq["monomial"], pr.names)
        row, rhs = _expected_row(ob["problem"], target, f, i, m, pr.names)
        if row != eq["row"] or str(rhs) != eq["rhs"]:
            errors.append(f"equation [{eq['component']} | {eq['monomial']}] does not match its definition")
        rows.append(({k: Fraction(v) for k, v in eq["row"].items()}, Fraction(eq["rhs"])))
    comb = {i: Fraction(eq["multiplier"]) for i, eq in enumerate(ob["equations"])}
    acc, rhs = replay(rows, comb)
    if acc or not rhs:
        errors.append("the combination of equations is not of the form 0 = c with c != 0")
    return errors


def _relative_ok(pr, eta, f, h, a, D) -> bool:
    lhs = d_function(h).truncate(D) + d_function(f).truncate(D).times(a.truncate(D))
    return (lhs - eta.truncate(D)).truncate(D).is_zero()


def _invariant_ok(pr, omega, f, a, eta, D) -> bool:
    lhs = d_function(f).truncate(D).times(a.truncate(D)) + eta.truncate(D).times(f.truncate(D))
    return (lhs - omega.truncate(D)).truncate(D).is_zero()


def _first_integral_errors(om: TForm, F: TPoly, G: TPoly | None, D: int, f0: Jet | None) -> List[str]:
    errors = []
    dF = TForm.from_tpoly(F).d_x().truncate(D)
    om = om.truncate(D)
    if not twedge(om, dF).is_zero():
        errors.append("omega_t ^ d_x F does not vanish")
    if G is not None and not (om - dF.times(G.truncate(D))).truncate(D).is_zero():
        errors.append("omega_t != G d_x F")
    if f0 is not None and not F.coeff(0).equal_within(f0, D + 1):
        errors.append("F(x, 0) != f0")
    return errors


def _witness_errors(p: Dict, pr: Printer) -> List[str]:
    f = pr.parse_jet(p["f"])
    Dj = p["jacobian_trusted_degree"]
    k = p["k"]
    partials = [f.diff(i).truncate(Dj) for i in range(pr.n)]
    seen = set()
    errors = []
    for w in p["witnesses"]:
        m = _parse_monomial(w["monomial"], pr.names)
        seen.add(m)
        acc = Jet.zero(pr.n, Dj)
        for g_text, part in zip(w["multipliers"], partials):
            acc = acc + pr.parse_jet(g_text).truncate(Dj).mul_trunc(part, Dj)
        if acc != Jet.monomial(pr.n, Dj, m):
            errors.append(f"witness for {w['monomial']} does not reproduce it")
    if seen != set(monomials_of_degree(pr.n, k)):
        errors.append(f"witnesses do not cover every monomial of degree {k}")
    return errors


def recheck_document(doc: Dict) -> Tuple[bool, List[str]]:
    """Re-verify a certificate from its explicit contents; returns (ok, messages)."""
    if doc.get("schema") != SCHEMA:
        return False, [f"unsupported schema {doc.get('schema')!r}"]
    task, status, p = doc["task"], doc["status"], doc["payload"]
    # embed-qh picks its own t-order, which may exceed the file's
    pr = Printer(doc["vars"], doc["degree"], max(doc["torder"], p.get("torder_used", 0)))
    D = doc["trusted_degree"]
    errors: List[str] = []
    if status == OBSTRUCTION:
        errors += check_obstruction(p["obstruction"], pr)
    elif status == INCONCLUSIVE:
        pass
    elif status == NOT_INVARIANT:
        omega, f = pr.parse_form(p["omega"]), pr.parse_jet(p["f"])
        theta = wedge(omega, d_function(f))
        comp = theta.comps.get(tuple(pr.names.index(s[1:]) for s in p["component"].split("*")))
        if comp is None or divides(f, comp, theta.D) is not None:
            errors.append("the reported component is divisible by f")
    elif task == "check-integrability":
        if "f0" in p:
            om = pr.parse_tform(p["family"])
            res = twedge(om, om.d_x())
        else:
            om = pr.parse_form(p["form"])
            res = wedge(om, exterior_d(om))
        if res.is_zero() != (status == SUCCESS):
            errors.append("integrability residual disagrees with the status")
    elif task == "decompose-relative":
        eta, f, h, a = (pr.parse_form(p["eta"]), pr.parse_jet(p["f"]),
                        pr.parse_jet(p["h"]), pr.parse_jet(p["a"]))
        if not _relative_ok(pr, eta, f, h, a, D):
            errors.append("eta != dh + a df")
    elif task == "decompose-invariant":
        omega, f, a, eta = (pr.parse_form(p["omega"]), pr.parse_jet(p["f"]),
                            pr.parse_jet(p["a"]), pr.parse_form(p["eta"]))
        if not _invariant_ok(pr, omega, f, a, eta, D):
            errors.append("omega != a df + f eta")
    elif task in ("normalize", "embed-qh"):
        om, F, G = pr.parse_tform(p["family"]), pr.parse_tpoly(p["F"]), pr.parse_tpoly(p["G"])
        f0 = pr.parse_jet(p["f0"])
        errors += _first_integral_errors(om, F, G, D, f0)
        if task == "embed-qh":
            omega = pr.parse_form(p["omega"])
            dF1 = d_function(F.at_one()).truncate(D)
            if not wedge(omega.truncate(D), dF1).is_zero():
                errors.append("omega ^ dF(t=1) does not vanish")
    elif task == "certify":
        kind = p["kind"]
        if kind == "first-integral":
            om, F = pr.parse_tform(p["family"]), pr.parse_tpoly(p["F"])
            ok = not _first_integral_errors(om, F, None, D, None)
        elif kind == "relative":
            ok = _relative_ok(pr, pr.parse_form(p["eta"]), pr.parse_jet(p["f"]),
                              pr.parse_jet(p["h"]), pr.parse_jet(p["a"]), D)
        else:
            ok = _invariant_ok(pr, pr.parse_form(p["omega"]), pr.parse_jet(p["f"]),
                               pr.parse_jet(p["a"]), pr.parse_form(p["eta"]), D)
        if ok != (status == SUCCESS):
            errors.append("certify verdict does not reproduce")
    elif task == "analyze-singularity":
        errors += _witness_errors(p, pr)
    elif task == "theorem3":
        omega, f = pr.parse_form(p["omega"]), pr.parse_jet(p["f"])
        a = pr.parse_jet(p["a"])
        if not _invariant_ok(pr, omega, f, a, pr.parse_form(p["eta"]), D):
            errors.append("omega != a df + f eta")
        errors += _witness_errors(p["singularity"], pr)
        n_om, n_df = nu(omega.order()), nu(d_function(f).order())
        if (n_om, n_df) != (p["nu_omega"], p["nu_df"]):
            errors.append("multiplicities do not reproduce")
        if p["first_integral_expected"] != (a.constant() != 0 and n_om == n_df):
            errors.append("criterion verdict does not reproduce")
    else:
        errors.append(f"no re-verification route for task {task!r} with status {status}")
    return not errors, errors


def certify_problem(doc: Dict) -> Optional[str]:
    """A ``certify`` problem file restating the claim of a SUCCESS document, if it has one."""
    if doc.get("status") != SUCCESS:
        return None
    p = doc["payload"]
    task = doc["task"]
    head = [
        f"vars {' '.join(doc['vars'])};",
        f"degree {doc['trusted_degree'] + 1};",
        f"torder {max(doc['torder'], p.get('torder_used', 0))};",
    ]
    if task in ("normalize", "embed-qh"):
        body = [f"family Omega = {p['family']};", f"family F = {p['F']};", "task certify(Omega, F);"]
    elif task == "decompose-relative":
        body = [f"form eta = {p['eta']};", f"poly f = {p['f']};", f"poly h = {p['h']};",
                f"poly a = {p['a']};", "task certify(eta, f, h, a);"]
    elif task in ("decompose-invariant", "theorem3"):
        body = [f"form omega = {p['omega']};", f"poly f = {p['f']};", f"poly a = {p['a']};",
                f"form eta = {p['eta']};", "task certify(omega, f, a, eta);"]
    else:
        return None
    return "\n".join(head + body) + "\n"
