"""Normalization of an integrable deformation of ``df0`` into ``G * d_x F``.

At stage ``j`` the ``t^j`` coefficient ``rho_j`` of the current family is
written as ``df_j + a_j df0``; dividing the family by the unit ``1 + t^j a_j``
turns that coefficient into the exact form ``df_j`` and leaves the lower
orders untouched.  After ``K`` stages the family is ``d_x F`` with
``F = f0 + sum t^j f_j`` and ``G`` the product of the units.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Optional, Sequence

from .forms import PForm, TForm, d_function, exterior_d, twedge, wedge
from .ring import Jet, TPoly, tpoly_invert_unit
from .solver import (
    InternalConsistencyError,
    ObstructionCertificate,
    solve_relative,
)


class NotIntegrable(ValueError):
    def __init__(self, report: "CascadeReport"):
        super().__init__(f"integrability fails at t-order {report.failed_order}")
        self.report = report


@dataclass
class DeformationFamily:
    """``omega_t = df0 + sum_{j=1..K} t^j omega_j``."""

    f0: Jet
    omegas: Sequence[PForm]

    def __post_init__(self):
        self.omegas = tuple(self.omegas)
        for w in self.omegas:
            if w.p != 1 or w.n != self.f0.n:
                raise ValueError("deformation terms must be 1-forms in the dimension of f0")
        if d_function(self.f0).is_zero():
            raise ValueError("df0 vanishes within the truncation")

    @property
    def K(self) -> int:
        return len(self.omegas)

    @property
    def n(self) -> int:
        return self.f0.n

    @property
    def trusted_degree(self) -> int:
        return min([self.f0.D - 1] + [w.D for w in self.omegas])

    def as_tform(self) -> TForm:
        D = self.trusted_degree
        return TForm([d_function(self.f0).truncate(D)] + [w.truncate(D) for w in self.omegas])

    @classmethod
    def from_tform(cls, f0: Jet, omega_t: TForm) -> "DeformationFamily":
        """Split off ``t^0``; it must equal ``df0`` within the common trust."""
        D = min(f0.D - 1, omega_t.D)
        if not omega_t.coeff(0).equal_within(d_function(f0), D):
            raise ValueError("the t^0 coefficient of the family is not d(f0)")
        return cls(f0, omega_t.coeffs[1:])


@dataclass
class CascadeReport:
    passed: bool
    orders_checked: int
    failed_order: Optional[int]
    residual: Optional[PForm]
    residuals: List[PForm] = field(default_factory=list)


def check_cascade(fam: DeformationFamily) -> CascadeReport:
    """Check ``omega_t ^ d omega_t = 0`` coefficient by coefficient in ``t``."""
    om = fam.as_tform()
    res = twedge(om, om.d_x())
    failed = res.first_nonzero()
    return CascadeReport(
        passed=failed is None,
        orders_checked=res.K,
        failed_order=failed,
        residual=None if failed is None else res.coeffs[failed],
        residuals=list(res.coeffs),
    )


@dataclass
class Step:
    order: int
    rho: PForm
    f_j: Jet
    a_j: Jet


@dataclass
class NormalizationResult:
    G: TPoly
    F: TPoly
    certificate_residual: TForm
    steps: List[Step]
    h_hat: TPoly
    trusted_degree: int


def normalize(fam: DeformationFamily):
    """Return a :class:`NormalizationResult`, or an obstruction annotated with its t-order."""
    report = check_cascade(fam)
    if not report.passed:
        raise NotIntegrable(report)
    f0, K, n = fam.f0, fam.K, fam.n
    D = fam.trusted_degree
    df0 = d_function(f0).truncate(D)
    current = fam.as_tform()
    G = TPoly.one(n, D, K)
    Fs = [f0.truncate(D + 1)]
    steps: List[Step] = []
    for j in range(1, K + 1):
        rho = current.coeff(j)
        closed = wedge(exterior_d(rho), df0)
        if closed:
            raise InternalConsistencyError(f"d rho_{j} ^ df0 != 0 after normalizing lower orders")
        dec = solve_relative(rho, f0)
        if isinstance(dec, ObstructionCertificate):
            dec.t_order = j
            dec.target = rho
            dec.human_note = f"t-order {j}: " + dec.human_note
            return dec
        h, a = dec["h"], dec["a"].truncate(D)
        steps.append(Step(j, rho, h, a))
        Fs.append(h)
        if a:
            unit = TPoly.one(n, D, K) + TPoly.monomial(a, j, K)
            before = current
            current = current.times(tpoly_invert_unit(unit))
            G = G * unit
            if any(current.coeffs[i] != before.coeffs[i] for i in range(j)):
                raise InternalConsistencyError("division disturbed lower t-orders")
    F = TPoly(Fs)
    omega_t = fam.as_tform()
    dF = TForm.from_tpoly(F).d_x()
    mismatch = omega_t - dF.times(G)
    if not mismatch.truncate(D).is_zero():
        raise InternalConsistencyError("omega_t != G d_x F within the trusted degree")
    residual = twedge(omega_t, dF)
    if not residual.is_zero():
        raise InternalConsistencyError("omega_t ^ d_x F does not vanish")
    h_hat = (G * F.t_derivative().truncate(D)) if K else TPoly([Jet.zero(n, D)])
    return NormalizationResult(G, F, residual, steps, h_hat, D)


@dataclass
class FirstIntegralCheck:
    valid: bool
    residual: TForm
    failed_order: Optional[int]
    trusted_degree: int


def certify_first_integral(fam: DeformationFamily | TForm, F: TPoly) -> FirstIntegralCheck:
    """Check ``omega_t ^ d_x F = 0`` per t-order, independently of :func:`normalize`."""
    om = fam.as_tform() if isinstance(fam, DeformationFamily) else fam
    dF = TForm.from_tpoly(F).d_x()
    res = twedge(om, dF)
    failed = res.first_nonzero()
    return FirstIntegralCheck(failed is None, res, failed, res.D)
