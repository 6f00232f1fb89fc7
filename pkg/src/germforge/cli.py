"""``germ-forge``: run one task from a problem file, or re-verify a certificate."""

from __future__ import annotations

import argparse
import json
import sys
from typing import Dict, List, Optional

from . import certificates as C
from .dsl import DSLError, Elaborator, Node, ProblemFile, parse_problem, value_to_jet, value_to_pform, value_to_tform, value_to_tpoly
from .forms import PForm, exterior_d, wedge
from .normalizer import DeformationFamily, NotIntegrable, certify_first_integral, check_cascade, normalize
from .quasihom import (
    NotQuasiHomogeneous,
    certify_isolated_singularity,
    detect_quasihomogeneity,
    embed_as_deformation,
    theorem3_criterion,
)
from .ring import Jet
from .solver import NotInvariant, ObstructionCertificate, check_relative_closedness, solve_invariant_split, solve_relative


class TaskError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # usage errors share exit code 1 with internal errors; 2 is reserved for negative answers
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


class Session:
    """Typed access to the definitions of a problem file."""

    def __init__(self, pf: ProblemFile, D: int, K: int):
        if not pf.variables:
            raise TaskError("no variables declared")
        for name in pf.definitions:
            if name in pf.variables or (name.startswith("d") and name[1:] in pf.variables):
                d = pf.definitions[name]
                raise DSLError(f"definition {name!r} shadows a variable or differential", d.line, d.col)
        self.pf = pf
        self.D, self.K = D, K
        self.n = len(pf.variables)
        self.pr = C.Printer(pf.variables, D, K)
        self.el = Elaborator(pf.variables, D, K, pf.definitions)

    def _value(self, name):
        if not isinstance(name, str):
            raise TaskError(f"expected a name, got {name!r}")
        if name not in self.pf.definitions:
            raise TaskError(f"undefined name {name!r}")
        d = self.pf.definitions[name]
        try:
            return self.el.evaluate(Node("name", (name,), d.line, d.col))
        except DSLError:
            raise
        except (ValueError, ArithmeticError) as exc:
            raise DSLError(str(exc), d.line, d.col)

    def _wrap(self, name, fn):
        try:
            return fn(self._value(name))
        except DSLError as exc:
            d = self.pf.definitions[name]
            raise DSLError(f"{name}: {exc.msg}", d.line, d.col)

    def jet(self, name) -> Jet:
        return self._wrap(name, lambda v: value_to_jet(v, self.n, self.D))

    def form(self, name, p: int = 1) -> PForm:
        return self._wrap(name, lambda v: value_to_pform(v, p, self.n, self.D))

    def tform(self, name):
        return self._wrap(name, lambda v: value_to_tform(v, 1, self.n, self.D, self.K))

    def tpoly(self, name):
        return self._wrap(name, lambda v: value_to_tpoly(v, self.n, self.D, self.K))

    def kind(self, name) -> str:
        return self.pf.definitions[name].kind if name in self.pf.definitions else "?"

    def has_t(self, name) -> bool:
        return self._value(name).has_t()


def _arity(args, *allowed):
    if len(args) not in allowed:
        want = " or ".join(str(a) for a in allowed)
        raise TaskError(f"expected {want} arguments, got {len(args)}")


def _singularity_payload(s: Session, f: Jet) -> Dict:
    rep = certify_isolated_singularity(f)
    return {
        "f": s.pr.jet(f),
        "status": rep.status,
        "k": rep.k_found,
        "jacobian_trusted_degree": rep.trusted_degree,
        "witnesses": [
            {"monomial": s.pr.mono(m), "multipliers": [s.pr.jet(g) for g in gs]}
            for m, gs in sorted(rep.witnesses.items(), key=lambda kv: (sum(kv[0]), tuple(-x for x in kv[0])))
        ],
    }


def _normalization_payload(s: Session, fam: DeformationFamily, res) -> Dict:
    return {
        "f0": s.pr.jet(fam.f0),
        "family": s.pr.tform(fam.as_tform()),
        "F": s.pr.tpoly(res.F),
        "G": s.pr.tpoly(res.G),
        "h_hat": s.pr.tpoly(res.h_hat),
        "steps": [
            {"order": st.order, "rho": s.pr.form(st.rho), "f_j": s.pr.jet(st.f_j), "a_j": s.pr.jet(st.a_j)}
            for st in res.steps
        ],
        "residual": "0",
    }


# -- task handlers: each returns (status, trusted_degree, payload) ----------
def task_check_integrability(s: Session, args):
    _arity(args, 1, 2)
    if len(args) == 2:
        fam = DeformationFamily.from_tform(s.jet(args[1]), s.tform(args[0]))
        rep = check_cascade(fam)
        status = C.SUCCESS if rep.passed else C.FAIL
        return status, fam.trusted_degree - 1, {
            "f0": s.pr.jet(fam.f0),
            "family": s.pr.tform(fam.as_tform()),
            "failed_order": rep.failed_order,
            "residual": s.pr.form(rep.residual) if rep.residual is not None else "0",
            "residuals": [s.pr.form(r) for r in rep.residuals],
        }
    om = s.form(args[0])
    res = wedge(om, exterior_d(om))
    status = C.SUCCESS if res.is_zero() else C.FAIL
    return status, res.D, {"form": s.pr.form(om), "residual": s.pr.form(res)}


def task_decompose_relative(s: Session, args):
    _arity(args, 2)
    eta, f = s.form(args[0]), s.jet(args[1])
    closed, residual = check_relative_closedness(eta, f)
    dec = solve_relative(eta, f)
    Dt = min(eta.D, f.D - 1)
    base = {"eta": s.pr.form(eta), "f": s.pr.jet(f), "closed": closed, "closedness_residual": s.pr.form(residual)}
    if isinstance(dec, ObstructionCertificate):
        base["obstruction"] = C.obstruction_payload(dec, eta, f, s.pr)
        return C.OBSTRUCTION, Dt, base
    base.update(h=s.pr.jet(dec["h"]), a=s.pr.jet(dec["a"]), residual="0")
    return C.SUCCESS, dec.trusted_degree, base


def task_decompose_invariant(s: Session, args):
    _arity(args, 2)
    omega, f = s.form(args[0]), s.jet(args[1])
    base = {"omega": s.pr.form(omega), "f": s.pr.jet(f)}
    Dt = min(omega.D, f.D - 1)
    try:
        dec = solve_invariant_split(omega, f)
    except NotInvariant as exc:
        base.update(component=s.pr.basis(exc.index), value=s.pr.jet(exc.component))
        return C.NOT_INVARIANT, Dt, base
    if isinstance(dec, ObstructionCertificate):
        base["obstruction"] = C.obstruction_payload(dec, omega, f, s.pr)
        return C.OBSTRUCTION, Dt, base
    a = dec["a"]
    base.update(a=s.pr.jet(a), eta=s.pr.form(dec["eta"]), a_is_unit=a.constant() != 0, residual="0")
    return C.SUCCESS, dec.trusted_degree, base


def _run_normalize(s: Session, fam: DeformationFamily, extra: Dict):
    try:
        res = normalize(fam)
    except NotIntegrable as exc:
        rep = exc.report
        extra.update(
            family=s.pr.tform(fam.as_tform()),
            failed_order=rep.failed_order,
            residual=s.pr.form(rep.residual),
        )
        return C.FAIL, fam.trusted_degree - 1, extra
    if isinstance(res, ObstructionCertificate):
        extra["family"] = s.pr.tform(fam.as_tform())
        extra["obstruction"] = C.obstruction_payload(res, res.target, fam.f0, s.pr)
        return C.OBSTRUCTION, fam.trusted_degree, extra
    extra.update(_normalization_payload(s, fam, res))
    extra["F_at_1"] = s.pr.jet(res.F.at_one())
    return C.SUCCESS, res.trusted_degree, extra


def task_normalize(s: Session, args):
    _arity(args, 2)
    fam = DeformationFamily.from_tform(s.jet(args[1]), s.tform(args[0]))
    return _run_normalize(s, fam, {})


def task_embed_qh(s: Session, args):
    _arity(args, 2, 3)
    omega, f = s.form(args[0]), s.jet(args[1])
    max_w = args[2] if len(args) == 3 else 12
    if not isinstance(max_w, int) or max_w < 1:
        raise TaskError("the weight bound must be a positive integer")
    qh = detect_quasihomogeneity(f, max_w)
    base = {
        "omega": s.pr.form(omega),
        "f": s.pr.jet(f),
        "quasi_homogeneity": {"is_qh": qh.is_qh, "strict": qh.strict,
                              "weights": list(qh.weights) if qh.weights else None, "d": qh.d},
    }
    if not (qh.is_qh and qh.strict):
        base["reason"] = f"no positive weights up to {max_w} make f quasi-homogeneous"
        return C.FAIL, min(omega.D, f.D - 1), base
    try:
        fam = embed_as_deformation(omega, f, qh.weight_vector())
    except NotInvariant as exc:
        base.update(component=s.pr.basis(exc.index), value=s.pr.jet(exc.component))
        return C.NOT_INVARIANT, min(omega.D, f.D - 1), base
    except (ValueError, NotQuasiHomogeneous) as exc:
        base["reason"] = str(exc)
        return C.FAIL, min(omega.D, f.D - 1), base
    base["torder_used"] = fam.K
    return _run_normalize(s, fam, base)


def task_certify(s: Session, args):
    _arity(args, 2, 4)
    if len(args) == 2:
        om, F = s.tform(args[0]), s.tpoly(args[1])
        chk = certify_first_integral(om, F)
        status = C.SUCCESS if chk.valid else C.FAIL
        return status, chk.trusted_degree, {
            "kind": "first-integral",
            "family": s.pr.tform(om),
            "F": s.pr.tpoly(F),
            "failed_order": chk.failed_order,
            "residuals": [s.pr.form(r) for r in chk.residual.coeffs],
        }
    if s.kind(args[2]) == "poly" and s.kind(args[3]) == "poly":
        eta, f, h, a = s.form(args[0]), s.jet(args[1]), s.jet(args[2]), s.jet(args[3])
        D = min(eta.D, f.D - 1, h.D - 1, a.D)
        ok = C._relative_ok(s.pr, eta, f, h, a, D)
        payload = {"kind": "relative", "eta": s.pr.form(eta), "f": s.pr.jet(f), "h": s.pr.jet(h), "a": s.pr.jet(a)}
    else:
        omega, f, a, eta = s.form(args[0]), s.jet(args[1]), s.jet(args[2]), s.form(args[3])
        D = min(omega.D, f.D - 1, a.D, eta.D)
        ok = C._invariant_ok(s.pr, omega, f, a, eta, D)
        payload = {"kind": "invariant", "omega": s.pr.form(omega), "f": s.pr.jet(f), "a": s.pr.jet(a), "eta": s.pr.form(eta)}
    return (C.SUCCESS if ok else C.FAIL), D, payload


def task_analyze_singularity(s: Session, args):
    _arity(args, 1)
    f = s.jet(args[0])
    p = _singularity_payload(s, f)
    qh = detect_quasihomogeneity(f)
    p["quasi_homogeneity"] = {"is_qh": qh.is_qh, "strict": qh.strict,
                              "weights": list(qh.weights) if qh.weights else None, "d": qh.d}
    status = C.SUCCESS if p["status"] == "CERTIFIED" else C.INCONCLUSIVE
    return status, p["jacobian_trusted_degree"], p


def task_theorem3(s: Session, args):
    _arity(args, 2)
    omega, f = s.form(args[0]), s.jet(args[1])
    base = {"omega": s.pr.form(omega), "f": s.pr.jet(f)}
    Dt = min(omega.D, f.D - 1)
    try:
        rep = theorem3_criterion(omega, f)
    except NotInvariant as exc:
        base.update(component=s.pr.basis(exc.index), value=s.pr.jet(exc.component))
        return C.NOT_INVARIANT, Dt, base
    base.update(
        nu_omega=C.nu(rep.nu_omega),
        nu_df=C.nu(rep.nu_df),
        isolated=rep.isolated,
        a_is_unit=rep.a_is_unit,
        first_integral_expected=rep.first_integral_expected,
        singularity=_singularity_payload(s, f),
    )
    if isinstance(rep.split, ObstructionCertificate):
        base["obstruction"] = C.obstruction_payload(rep.split, omega, f, s.pr)
        return C.OBSTRUCTION, Dt, base
    base.update(a=s.pr.jet(rep.split["a"]), eta=s.pr.form(rep.split["eta"]))
    status = C.SUCCESS if rep.isolated else C.INCONCLUSIVE
    return status, rep.split.trusted_degree, base


HANDLERS = {
    "check-integrability": task_check_integrability,
    "decompose-relative": task_decompose_relative,
    "decompose-invariant": task_decompose_invariant,
    "normalize": task_normalize,
    "embed-qh": task_embed_qh,
    "certify": task_certify,
    "analyze-singularity": task_analyze_singularity,
    "theorem3": task_theorem3,
}


def run_problem(pf: ProblemFile, degree: Optional[int] = None, torder: Optional[int] = None) -> Dict:
    """Run the task of a parsed problem file and return its certificate document."""
    if pf.task is None:
        raise TaskError("the problem file declares no task")
    D = degree if degree is not None else pf.D
    K = torder if torder is not None else pf.K
    s = Session(pf, D, K)
    status, trusted, payload = HANDLERS[pf.task](s, pf.task_args)
    return C.make_document(pf.task, pf.task_args, status, s.pr, trusted, payload)


def run_text(text: str, degree: Optional[int] = None, torder: Optional[int] = None) -> Dict:
    return run_problem(parse_problem(text), degree, torder)


# -- human-readable summary --------------------------------------------------
def summarize(doc: Dict, verbose: bool = False) -> str:
    p = doc["payload"]
    lines = [f"task {doc['task']}({', '.join(doc['args'])}): {doc['status']}",
             f"vars {' '.join(doc['vars'])}; degree {doc['degree']}; torder {doc['torder']}; "
             f"trusted through degree {doc['trusted_degree']}"]
    if "obstruction" in p:
        ob = p["obstruction"]
        where = f" at t-order {ob['t_order']}" if ob.get("t_order") else ""
        lines.append(f"obstruction{where}, degree {ob['degree']}")
        lines.append(ob["note"])
    shown = ["h", "a", "eta", "F", "G", "F_at_1", "component", "value", "reason",
             "failed_order", "k", "nu_omega", "nu_df", "isolated", "first_integral_expected"]
    if doc["status"] == C.FAIL:
        shown.append("residual")
    for key in shown:
        if key in p:
            lines.append(f"{key} = {p[key]}")
    if "quasi_homogeneity" in p and p["quasi_homogeneity"]["is_qh"]:
        q = p["quasi_homogeneity"]
        lines.append(f"weights {tuple(q['weights'])}, weighted degree {q['d']}")
    if verbose:
        for st in p.get("steps", []):
            lines.append(f"  step {st['order']}: f_j = {st['f_j']}; a_j = {st['a_j']}")
        for w in p.get("witnesses", []):
            lines.append(f"  {w['monomial']} = " + " + ".join(
                f"({g})*d{v}(f)" for g, v in zip(w["multipliers"], doc["vars"])))
    return "\n".join(lines)


def main(argv: Optional[List[str]] = None) -> int:
    ap = _Parser(
        prog="germ-forge",
        description="Exact jet computations for holomorphic foliations: decompositions, "
                    "normal forms of deformations, and certificates.",
    )
    ap.add_argument("input", help="problem file, or a certificate JSON to re-verify")
    ap.add_argument("--certificate", metavar="PATH", help="write the certificate JSON here ('-' for stdout)")
    ap.add_argument("--degree", type=int, help="x-truncation degree (overrides the file)")
    ap.add_argument("--torder", type=int, help="t-truncation order (overrides the file)")
    ap.add_argument("-v", "--verbose", action="store_true")
    ns = ap.parse_args(argv)
    for flag in ("degree", "torder"):
        v = getattr(ns, flag)
        if v is not None and v <= 0:
            ap.error(f"--{flag} must be positive")
    try:
        with open(ns.input, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        print(f"germ-forge: {exc}", file=sys.stderr)
        return 1

    if text.lstrip().startswith("{"):
        try:
            doc = json.loads(text)
            ok, errors = C.recheck_document(doc)
            restated = C.certify_problem(doc)
            if restated is not None:
                again = run_text(restated)
                if again["status"] != C.SUCCESS:
                    ok = False
                    errors.append("the certify task rejects the restated claim")
        except (ValueError, KeyError, TypeError, DSLError, TaskError) as exc:
            print(f"germ-forge: malformed certificate: {exc}", file=sys.stderr)
            return 1
        if ok:
            print(f"certificate verified: {doc['task']} {doc['status']}")
            return 0
        print("certificate REJECTED:")
        for e in errors:
            print(f"  {e}")
        return 2

    try:
        pf = parse_problem(text)
        D = ns.degree if ns.degree is not None else pf.D
        K = ns.torder if ns.torder is not None else pf.K
        doc = run_problem(pf, D, K)
    except DSLError as exc:
        print(f"{ns.input}:{exc}", file=sys.stderr)
        return 1
    except TaskError as exc:
        print(f"germ-forge: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"germ-forge: {exc}", file=sys.stderr)
        return 1
    if pf.degree is None or pf.torder is None:
        print(f"(using degree {D}, torder {K})")
    print(summarize(doc, ns.verbose))
    if ns.certificate:
        out = C.dumps(doc)
        if ns.certificate == "-":
            sys.stdout.write(out)
        else:
            with open(ns.certificate, "w", encoding="utf-8") as fh:
                fh.write(out)
    return C.EXIT_CODES[doc["status"]]


if __name__ == "__main__":
    sys.exit(main())
