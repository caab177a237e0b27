"""Application formulas built on the principal eigenvalue.

Both quantities are pure post-processing of lambda(Omega, alpha): the best
constant in the boundary-trace inequality
||u||^2_{boundary} <= eps ||grad u||^2 + C(eps) ||u||^2 comes out as
C(eps) = -eps * lambda(Omega, 1/eps), and the superconductor critical
temperature shifts by -T_c0 * lambda(Omega, xi0/|b|).  The solver enters
only through the eigenvalue, so injected eigenvalues reproduce outputs
bitwise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import ValidationError
from .geometry import DomainSpec
from . import asymptotics


@dataclass(frozen=True)
class EhrlingResult:
    """Best trace constant at one epsilon.

    ``limit_ratio`` rescales eps * C(eps) by the predicted energy modulus;
    it tends to 1 from the leading-order asymptotics as eps shrinks.
    """

    epsilon: float
    alpha: float
    eigenvalue: float
    c_eps: float
    limit_ratio: float


def ehrling_from_eigenvalue(
    epsilon: float, eigenvalue: float, energy: float
) -> EhrlingResult:
    """Assemble the trace-constant result from a known eigenvalue."""
    if not epsilon > 0:
        raise ValidationError("epsilon must be positive")
    c_eps = -epsilon * eigenvalue
    ratio = epsilon * c_eps / abs(energy) if energy != 0 else math.inf
    return EhrlingResult(
        epsilon=epsilon,
        alpha=1.0 / epsilon,
        eigenvalue=eigenvalue,
        c_eps=c_eps,
        limit_ratio=ratio,
    )


def ehrling_constant(
    d: DomainSpec, epsilon: float, tol: float = 1e-8
) -> EhrlingResult:
    """Best trace constant on a domain: one eigensolve at alpha = 1/eps."""
    if not epsilon > 0:
        raise ValidationError("epsilon must be positive")
    result, _ = asymptotics.solve_domain(d, 1.0 / epsilon, tol=tol)
    return ehrling_from_eigenvalue(
        epsilon, result.eigenvalue, asymptotics.predicted_energy(d)
    )


@dataclass(frozen=True)
class TcResult:
    """Critical temperature of a surface-superconductivity sample.

    With a negative eigenvalue the boundary term raises T_c above the bulk
    value T_c0; the enhancement grows with confinement (sharper corners
    push lambda further down).
    """

    t_c0: float
    xi0: float
    b: float
    alpha: float
    eigenvalue: float
    t_c: float


def tc_from_eigenvalue(
    t_c0: float, xi0: float, b: float, eigenvalue: float
) -> TcResult:
    """Assemble the critical temperature from a known eigenvalue."""
    if not t_c0 > 0:
        raise ValidationError("T_c0 must be positive")
    if not xi0 > 0:
        raise ValidationError("coherence length xi0 must be positive")
    if not b < 0:
        raise ValidationError("penetration parameter b must be negative")
    alpha = 0.0 if math.isinf(b) else xi0 / abs(b)
    return TcResult(
        t_c0=t_c0,
        xi0=xi0,
        b=b,
        alpha=alpha,
        eigenvalue=eigenvalue,
        t_c=t_c0 - t_c0 * eigenvalue,
    )


def critical_temperature(
    d: DomainSpec, t_c0: float, xi0: float, b: float, tol: float = 1e-8
) -> TcResult:
    """Critical temperature of a domain: one eigensolve at alpha = xi0/|b|."""
    if not t_c0 > 0:
        raise ValidationError("T_c0 must be positive")
    if not xi0 > 0:
        raise ValidationError("coherence length xi0 must be positive")
    if not b < 0:
        raise ValidationError("penetration parameter b must be negative")
    alpha = 0.0 if math.isinf(b) else xi0 / abs(b)
    if alpha == 0.0:
        eigenvalue = 0.0
    else:
        result, _ = asymptotics.solve_domain(d, alpha, tol=tol)
        eigenvalue = result.eigenvalue
    return tc_from_eigenvalue(t_c0, xi0, b, eigenvalue)
