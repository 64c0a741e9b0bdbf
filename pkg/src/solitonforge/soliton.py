"""Certification of algebraic and semi-algebraic Ricci soliton structure.

A left-invariant metric is an algebraic Ricci soliton when its Ricci operator
satisfies ``Ric = lambda I + D`` for a derivation ``D``; it is semi-algebraic
when ``Ric = lambda I + (D + D*)/2``.  Certification is a linear least-squares
fit of ``(lambda, D)`` over the derivation space, with the minimum-norm
solution chosen among minimisers so that degenerate inputs give deterministic
output.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .algebra import (
    LinearMap,
    MetricLieAlgebra,
    as_matrix,
    derivation_space,
    require_valid,
)
from .curvature import _frame, _riemann_frame, divergence
from .reports import VerificationReport, make_check

TOL_FIT = 1e-8

_TINY = 1e-12

KIND_ALGEBRAIC = "algebraic"
KIND_SEMI_ALGEBRAIC = "semi_algebraic"
KIND_TRIVIAL_EINSTEIN = "trivial_einstein"
KIND_DEGENERATE_FLAT = "degenerate_flat"


@dataclass(frozen=True)
class SolitonCertificate:
    """Accepted soliton data: constant, derivation, its symmetric/antisymmetric split.

    Operators are expressed in the algebra's input basis; the symmetric and
    antisymmetric parts are taken with respect to the metric (plain transpose
    in an orthonormal frame).  ``residual`` is the Frobenius fit residual
    relative to the norm of the Ricci operator; ``normal_defect`` is
    ``||SA - AS||_F``, zero exactly when the derivation is a normal operator.
    """

    lam: float
    D: LinearMap
    S: LinearMap
    A: LinearMap
    residual: float
    normal_defect: float
    kind: str

    @property
    def is_normal(self) -> bool:
        scale = max(float(np.linalg.norm(self.S.matrix) * np.linalg.norm(self.A.matrix)), 1.0)
        return self.normal_defect <= 1e-8 * scale


def split(d_op) -> tuple[LinearMap, LinearMap]:
    """Symmetric and antisymmetric parts (orthonormal frame): S + A = D exactly."""
    d = as_matrix(d_op)
    s = 0.5 * (d + d.T)
    return LinearMap(s), LinearMap(d - s)


def normality_defect(s_op, a_op) -> float:
    """Frobenius norm of the commutator [S, A]; zero iff S + A is normal."""
    s = as_matrix(s_op)
    a = as_matrix(a_op)
    if s.shape != a.shape:
        raise ValueError("operator shapes do not match")
    return float(np.linalg.norm(s @ a - a @ s))


def _ricci_operator_frame(alg: MetricLieAlgebra) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    alg_on, b, t = _frame(alg)
    r4 = _riemann_frame(alg_on)
    ric = np.einsum("ijki->jk", r4)
    return 0.5 * (ric + ric.T), b, t


def _derivations_frame(alg: MetricLieAlgebra) -> tuple[list[np.ndarray], np.ndarray, np.ndarray]:
    ders = derivation_space(alg)
    _, b, t = _frame(alg)
    if np.allclose(b, np.eye(alg.dim)):
        return [d.matrix for d in ders], b, t
    return [t @ d.matrix @ b for d in ders], b, t


def _fit(alg: MetricLieAlgebra, symmetric_part_only: bool):
    """Least-squares fit of Ric against lambda*I plus a derivation (or its symmetric part)."""
    ric, b, t = _ricci_operator_frame(alg)
    ders, _, _ = _derivations_frame(alg)
    n = alg.dim
    cols = [np.eye(n).flatten()]
    for d in ders:
        target = 0.5 * (d + d.T) if symmetric_part_only else d
        cols.append(target.flatten())
    a_mat = np.column_stack(cols)
    rhs = ric.flatten()
    x, *_ = np.linalg.lstsq(a_mat, rhs, rcond=None)
    resid = rhs - a_mat @ x
    rel = float(np.linalg.norm(resid)) / max(float(np.linalg.norm(ric)), _TINY)
    lam = float(x[0])
    d_on = sum((coef * d for coef, d in zip(x[1:], ders)), np.zeros((n, n)))
    return lam, d_on, rel, ric, b, t


def _certificate(alg: MetricLieAlgebra, lam: float, d_on: np.ndarray, rel: float,
                 ric: np.ndarray, b: np.ndarray, t: np.ndarray, tol_fit: float,
                 semi: bool) -> SolitonCertificate | None:
    if rel > tol_fit:
        return None
    n = alg.dim
    s_on = 0.5 * (d_on + d_on.T)
    a_on = d_on - s_on
    defect = float(np.linalg.norm(s_on @ a_on - a_on @ s_on))
    if float(np.linalg.norm(d_on)) <= tol_fit * max(float(np.linalg.norm(ric)), abs(lam), 1.0):
        kind = KIND_TRIVIAL_EINSTEIN
    else:
        kind = KIND_SEMI_ALGEBRAIC if semi else KIND_ALGEBRAIC
    to_user = lambda m: b @ m @ t  # frame operator -> input-basis operator
    return SolitonCertificate(
        lam=lam,
        D=LinearMap(to_user(d_on)),
        S=LinearMap(to_user(s_on)),
        A=LinearMap(to_user(a_on)),
        residual=rel,
        normal_defect=defect,
        kind=kind,
    )


def _flat_certificate(alg: MetricLieAlgebra) -> SolitonCertificate:
    n = alg.dim
    zero = LinearMap(np.zeros((n, n)))
    return SolitonCertificate(
        lam=0.0, D=zero, S=zero, A=zero,
        residual=0.0, normal_defect=0.0, kind=KIND_DEGENERATE_FLAT,
    )


def _is_flat(alg: MetricLieAlgebra, tol_fit: float) -> bool:
    ric, _, _ = _ricci_operator_frame(alg)
    scale = max(float(np.max(np.abs(alg.c))) ** 2, _TINY)
    return float(np.linalg.norm(ric)) <= tol_fit * max(scale, _TINY)


def find_algebraic_soliton(alg: MetricLieAlgebra, tol_fit: float = TOL_FIT) -> SolitonCertificate | None:
    """Fit ``Ric = lambda I + D`` over the derivation space.

    Flat metrics are reported as ``degenerate_flat`` with ``lambda = 0``
    because the constant is not determined there (``-lambda I`` is absorbed
    by a derivation on abelian algebras); extension builders require an
    explicit override in that case.
    """
    require_valid(alg)
    if _is_flat(alg, tol_fit):
        return _flat_certificate(alg)
    lam, d_on, rel, ric, b, t = _fit(alg, symmetric_part_only=False)
    return _certificate(alg, lam, d_on, rel, ric, b, t, tol_fit, semi=False)


def find_semi_algebraic_soliton(alg: MetricLieAlgebra, tol_fit: float = TOL_FIT) -> SolitonCertificate | None:
    """Fit ``Ric = lambda I + (D + D*)/2`` over the derivation space.

    When an algebraic certificate also exists at tolerance it is preferred
    and returned as-is; the unconstrained antisymmetric component is left at
    zero (minimum norm), so the distinction between the two fits stays
    observable.
    """
    require_valid(alg)
    if _is_flat(alg, tol_fit):
        return _flat_certificate(alg)
    algebraic = find_algebraic_soliton(alg, tol_fit)
    if algebraic is not None:
        return algebraic
    lam, d_on, rel, ric, b, t = _fit(alg, symmetric_part_only=True)
    return _certificate(alg, lam, d_on, rel, ric, b, t, tol_fit, semi=True)


def soliton_identities(alg: MetricLieAlgebra, cert: SolitonCertificate,
                       tol: float = TOL_FIT) -> VerificationReport:
    """Residuals of the scalar identities every genuine soliton satisfies.

    Checks ``tr(S^2) = -lambda tr(S)``, ``div S = 0`` and
    ``|Ric|^2 = lambda scal``; raw residuals are reported alongside values
    normalised by the scale of the terms entering each identity.
    """
    require_valid(alg)
    ric, _, t = _ricci_operator_frame(alg)
    s_user = cert.S.matrix
    s_on = t @ s_user @ np.linalg.inv(t) if not alg.is_orthonormal() else s_user
    tr_s = float(np.trace(s_on))
    tr_s2 = float(np.trace(s_on @ s_on))
    lam = cert.lam
    checks = [
        make_check(
            "trace_identity",
            raw=tr_s2 + lam * tr_s,
            scale=max(abs(tr_s2), abs(lam * tr_s), lam ** 2),
            tolerance=tol,
            detail=f"tr(S^2)={tr_s2:.12g}, -lambda*tr(S)={-lam * tr_s:.12g}",
        ),
        make_check(
            "divergence_free",
            raw=float(np.linalg.norm(divergence(alg, cert.S))),
            scale=max(float(np.linalg.norm(s_on)), abs(lam)) * max(float(np.max(np.abs(alg.c))), _TINY),
            tolerance=tol,
        ),
        make_check(
            "ricci_norm_identity",
            raw=float(np.linalg.norm(ric) ** 2 - lam * np.trace(ric)),
            scale=max(float(np.linalg.norm(ric) ** 2), abs(lam * float(np.trace(ric)))),
            tolerance=tol,
            detail=f"|Ric|^2={float(np.linalg.norm(ric) ** 2):.12g}, lambda*scal={lam * float(np.trace(ric)):.12g}",
        ),
    ]
    return VerificationReport(checks=tuple(checks))
