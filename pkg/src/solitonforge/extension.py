"""One-dimensional extensions of metric Lie algebras and their Einstein variants.

Given an algebra ``h`` with a derivation ``D`` and a constant ``alpha``, the
extension adjoins a unit vector ``xi`` orthogonal to ``h`` with
``[xi, X] = alpha D(X)``.  Choosing ``alpha^2 = 1/tr(S)`` on a soliton whose
derivation is normal produces an Einstein metric; choosing
``alpha^2 = 1/(tr(S) - lambda m)`` produces a metric whose warped product
with a flat m-dimensional fiber (warping e^{L r}, L = lambda alpha) is
Einstein.  The flat fiber can itself be adjoined as an abelian block, giving
a homogeneous Einstein ambient of any higher dimension.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, replace

import numpy as np

from .algebra import (
    LinearMap,
    MetricLieAlgebra,
    as_matrix,
    derivation_defect,
    require_valid,
)
from .curvature import _frame, divergence, ricci
from .soliton import (
    KIND_DEGENERATE_FLAT,
    SolitonCertificate,
    find_algebraic_soliton,
    normality_defect,
    split,
)

_TINY = 1e-12

MODE_GENERIC = "generic"
MODE_EINSTEIN = "einstein"
MODE_WPE = "wpe"
MODE_AMBIENT = "ambient"


class NotADerivationError(ValueError):
    """The supplied map fails the derivation identity, so the extension would not satisfy Jacobi."""


class NonNormalDerivationError(ValueError):
    """The certificate's derivation does not commute with its adjoint; the Einstein construction cannot work."""


class ExtensionModeError(ValueError):
    """An extension result of the wrong mode was passed to a mode-specific operation."""


@dataclass(frozen=True)
class ExtensionResult:
    """An extended algebra together with the data used to build it.

    ``xi_index`` locates the adjoined unit vector; ``alpha`` scales the
    derivation inside the bracket; ``L`` is the warping exponent
    (``lambda * alpha`` in wpe mode, 0 in einstein mode); ``m`` is the fiber
    dimension parameter.  ``lam`` is the soliton/Einstein constant when one
    is attached, else None.
    """

    ext: MetricLieAlgebra
    xi_index: int
    alpha: float
    L: float
    m: float
    lam: float | None
    mode: str
    source: str


def _check_derivation(alg: MetricLieAlgebra, d: np.ndarray, tol: float = 1e-8) -> None:
    if derivation_defect(alg, d) > tol:
        raise NotADerivationError(
            f"the supplied map is not a derivation of '{alg.name}' "
            f"(identity defect {derivation_defect(alg, d):.3e})"
        )


def one_dim_extension(alg: MetricLieAlgebra, d_op, alpha: float) -> ExtensionResult:
    """Adjoin a unit vector xi with ``[xi, X] = alpha D(X)``; xi sits at the last index."""
    require_valid(alg)
    d = as_matrix(d_op)
    if d.shape != (alg.dim, alg.dim):
        raise ValueError("derivation dimension does not match the algebra")
    _check_derivation(alg, d)
    n = alg.dim
    c_ext = np.zeros((n + 1, n + 1, n + 1))
    c_ext[:n, :n, :n] = alg.c
    c_ext[n, :n, :n] = float(alpha) * d.T  # [xi, e_j] = alpha * sum_k D[k, j] e_k
    c_ext[:n, n, :n] = -float(alpha) * d.T
    gram = np.zeros((n + 1, n + 1))
    gram[:n, :n] = alg.gram
    gram[n, n] = 1.0
    labels = None
    if alg.basis_labels is not None:
        labels = alg.basis_labels + ("xi",)
    ext = MetricLieAlgebra(
        name=f"{alg.name}+xi",
        dim=n + 1,
        c=c_ext,
        gram=gram,
        basis_labels=labels,
    )
    return ExtensionResult(
        ext=ext, xi_index=n, alpha=float(alpha), L=0.0, m=0.0,
        lam=None, mode=MODE_GENERIC, source=alg.name,
    )


def closed_form_extension_ricci(alg: MetricLieAlgebra, d_op, alpha: float) -> np.ndarray:
    """Ricci tensor of the extension assembled without building it.

    Uses the base Ricci tensor, ``Ric(xi, xi) = -alpha^2 tr(S^2)``,
    ``Ric(X, xi) = -alpha div(S)(X)`` and
    ``Ric(X, X) = Ric_base(X, X) - alpha^2 tr(S) <S X, X> - alpha^2 <[S,A] X, X>``,
    where S and A are the metric-symmetric and antisymmetric parts of D.
    Returned as a bilinear form in the extension's basis (base basis plus xi
    at the last index), directly comparable with the brute-force Ricci of the
    built extension.
    """
    require_valid(alg)
    d = as_matrix(d_op)
    _check_derivation(alg, d)
    n = alg.dim
    alg_on, b, t = _frame(alg)
    d_on = t @ d @ b
    s_on, a_on = (m.matrix for m in split(d_on))
    tr_s = float(np.trace(s_on))
    comm = s_on @ a_on - a_on @ s_on
    ric_base_on = ricci(alg_on).ricci_tensor
    a2 = float(alpha) ** 2
    block_on = ric_base_on - a2 * tr_s * s_on - a2 * comm
    div_on = divergence(alg_on, LinearMap(s_on))
    full_on = np.zeros((n + 1, n + 1))
    full_on[:n, :n] = block_on
    full_on[n, :n] = -float(alpha) * div_on
    full_on[:n, n] = -float(alpha) * div_on
    full_on[n, n] = -a2 * float(np.trace(s_on @ s_on))
    if alg.is_orthonormal():
        return full_on
    p = np.zeros((n + 1, n + 1))
    p[:n, :n] = t
    p[n, n] = 1.0
    return p.T @ full_on @ p


def _resolve_certificate(alg: MetricLieAlgebra, cert: SolitonCertificate,
                         lam: float | None, derivation=None,
                         tol: float = 1e-8) -> tuple[float, np.ndarray, np.ndarray, np.ndarray]:
    """Return (lambda, D, S, A) in the orthonormal frame, handling the flat override.

    Flat inputs do not determine the constant, so they require an explicit
    ``(lam < 0, derivation)`` pair; the pair is admitted only if it satisfies
    the construction identities (Ricci equation with the commutator
    correction, divergence-free S, and ``tr(S^2) = -lambda tr(S)``).
    """
    _, b, t = _frame(alg)
    if cert.kind == KIND_DEGENERATE_FLAT:
        if lam is None or derivation is None:
            raise ValueError(
                "flat input: the soliton constant is not determined; "
                "supply an explicit (lam, derivation) override"
            )
        if lam >= 0:
            raise ValueError("the override constant must be negative")
        d_user = as_matrix(derivation)
        _check_derivation(alg, d_user)
        d_on = t @ d_user @ b
        s_on, a_on = (m.matrix for m in split(d_on))
        _verify_construction_conditions(alg, float(lam), s_on, a_on, tol)
        return float(lam), d_on, s_on, a_on
    if lam is not None or derivation is not None:
        raise ValueError("(lam, derivation) overrides are only accepted for flat inputs")
    if cert.lam is None:
        raise ValueError("certificate carries no soliton constant")
    d_on = t @ cert.D.matrix @ b
    s_on, a_on = (m.matrix for m in split(d_on))
    return float(cert.lam), d_on, s_on, a_on


def _verify_construction_conditions(alg: MetricLieAlgebra, lam: float,
                                    s_on: np.ndarray, a_on: np.ndarray, tol: float) -> None:
    alg_on, _, _ = _frame(alg)
    ric_on = ricci(alg_on).ricci_tensor
    tr_s = float(np.trace(s_on))
    if tr_s <= 0:
        raise ValueError("tr(S) must be positive for the construction")
    comm = s_on @ a_on - a_on @ s_on
    scale = max(float(np.linalg.norm(ric_on)), abs(lam) * np.sqrt(alg.dim), 1.0)
    eq1 = float(np.linalg.norm(ric_on - lam * np.eye(alg.dim) - s_on - comm / tr_s))
    eq2 = float(np.linalg.norm(divergence(alg_on, LinearMap(s_on))))
    eq3 = abs(float(np.trace(s_on @ s_on)) + lam * tr_s)
    if max(eq1, eq2, eq3) > tol * scale:
        raise ValueError(
            "override pair rejected: construction identities fail "
            f"(ricci {eq1:.2e}, div {eq2:.2e}, trace {eq3:.2e})"
        )


def _require_normal(s_on: np.ndarray, a_on: np.ndarray, tol: float) -> None:
    defect = normality_defect(s_on, a_on)
    scale = max(float(np.linalg.norm(s_on)) * max(float(np.linalg.norm(a_on)), 1.0), 1.0)
    if defect > tol * scale:
        raise NonNormalDerivationError(
            f"derivation is not normal (|[S,A]| = {defect:.3e}); "
            "the extension of a non-normal soliton cannot be Einstein"
        )


def einstein_extension(alg: MetricLieAlgebra, cert: SolitonCertificate,
                       lam: float | None = None, derivation=None,
                       tol: float = 1e-8) -> ExtensionResult:
    """Einstein one-dimensional extension of a normal soliton, ``alpha^2 = 1/tr(S)``."""
    require_valid(alg)
    lam_val, d_on, s_on, a_on = _resolve_certificate(alg, cert, lam, derivation, tol)
    _require_normal(s_on, a_on, tol)
    tr_s = float(np.trace(s_on))
    if tr_s <= tol:
        raise ValueError(
            f"tr(S) = {tr_s:.3e} is not positive; such solitons are flat/trivial "
            "and admit no Einstein extension of this form"
        )
    alpha = float(np.sqrt(1.0 / tr_s))
    _, b, t = _frame(alg)
    d_user = b @ d_on @ t
    result = one_dim_extension(alg, d_user, alpha)
    return replace(result, mode=MODE_EINSTEIN, lam=lam_val, L=0.0, m=0.0)


def wpe_extension(alg: MetricLieAlgebra, cert: SolitonCertificate, m: float,
                  lam: float | None = None, derivation=None,
                  tol: float = 1e-8) -> ExtensionResult:
    """Warped-product-Einstein extension: ``alpha^2 = 1/(tr(S) - lambda m)``, ``L = lambda alpha``.

    ``m`` may be any positive real (the defining equations are rational in
    m); a warning is emitted for non-integral values because the geometric
    fiber interpretation needs an integer dimension.
    """
    require_valid(alg)
    if m <= 0:
        raise ValueError("the fiber dimension parameter m must be positive")
    if abs(m - round(m)) > 1e-9:
        warnings.warn(
            "non-integral m: the extension equations are well-defined, but the "
            "warped-product fiber interpretation needs an integer dimension",
            stacklevel=2,
        )
    lam_val, d_on, s_on, a_on = _resolve_certificate(alg, cert, lam, derivation, tol)
    if lam_val >= 0:
        raise ValueError("the soliton constant must be negative for a warped extension")
    _require_normal(s_on, a_on, tol)
    tr_s = float(np.trace(s_on))
    if tr_s <= tol:
        raise ValueError(f"tr(S) = {tr_s:.3e} is not positive; flat/trivial solitons are rejected")
    denom = tr_s - lam_val * float(m)
    assert denom > 0, "tr(S) - lambda*m must be positive when tr(S) > 0 and lambda < 0"
    alpha = float(np.sqrt(1.0 / denom))
    _, b, t = _frame(alg)
    d_user = b @ d_on @ t
    result = one_dim_extension(alg, d_user, alpha)
    return replace(result, mode=MODE_WPE, lam=lam_val, L=lam_val * alpha, m=float(m))


def abelian_flat_extension(wpe_result: ExtensionResult, m_int: int) -> ExtensionResult:
    """Adjoin the flat abelian fiber to a wpe extension: ``[xi, U] = -L U``, ``[X, U] = 0``.

    The result realises the warped product with a flat m-dimensional fiber as
    a metric Lie algebra (metric taken at the basepoint where the warping
    function equals 1).  The wpe block keeps its basis indices; the abelian
    block is appended after it.
    """
    if wpe_result.mode != MODE_WPE:
        raise ExtensionModeError(
            f"abelian_flat_extension needs a wpe-mode result, got mode '{wpe_result.mode}'"
        )
    m_int = int(m_int)
    if m_int <= 0:
        raise ValueError("m_int must be a positive integer")
    if abs(wpe_result.m - m_int) > 1e-9:
        raise ValueError(
            f"m_int = {m_int} does not match the wpe fiber parameter m = {wpe_result.m}"
        )
    base = wpe_result.ext
    n = base.dim
    xi = wpe_result.xi_index
    big = n + m_int
    c = np.zeros((big, big, big))
    c[:n, :n, :n] = base.c
    for a in range(n, big):
        c[xi, a, a] = -wpe_result.L
        c[a, xi, a] = wpe_result.L
    gram = np.eye(big)
    gram[:n, :n] = base.gram
    ext = MetricLieAlgebra(
        name=f"{base.name}+flat{m_int}",
        dim=big,
        c=c,
        gram=gram,
    )
    return replace(wpe_result, ext=ext, mode=MODE_AMBIENT)


def einstein_ambient_pipeline(alg: MetricLieAlgebra, m: int,
                              cert: SolitonCertificate | None = None,
                              lam: float | None = None, derivation=None,
                              tol: float = 1e-8) -> ExtensionResult:
    """End-to-end Einstein ambient of codimension m + 1.

    ``m = 0`` routes to the Einstein one-dimensional extension; ``m >= 1``
    composes the warped extension with its flat abelian fiber.  The result is
    verified Einstein against the brute-force Ricci before being returned.
    """
    require_valid(alg)
    m = int(m)
    if m < 0:
        raise ValueError("m must be a non-negative integer")
    if cert is None:
        cert = find_algebraic_soliton(alg)
        if cert is None:
            raise ValueError(f"'{alg.name}' admits no algebraic soliton certificate at tolerance")
    if m == 0:
        result = einstein_extension(alg, cert, lam=lam, derivation=derivation, tol=tol)
    else:
        wpe = wpe_extension(alg, cert, float(m), lam=lam, derivation=derivation, tol=tol)
        result = abelian_flat_extension(wpe, m)
    lam_val = result.lam
    assert lam_val is not None
    rep = ricci(result.ext)
    target = lam_val * result.ext.gram
    resid = float(np.linalg.norm(rep.ricci_tensor - target)) / max(float(np.linalg.norm(target)), _TINY)
    if resid > max(tol, 1e-9):
        raise RuntimeError(
            f"internal consistency failure: ambient of '{alg.name}' is not Einstein "
            f"(residual {resid:.3e})"
        )
    return result
