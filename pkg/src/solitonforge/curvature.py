"""Brute-force curvature of a left-invariant metric from structure constants.

Conventions, fixed once for the whole package:

* connection coefficients ``gamma[i, j, k] = <nabla_{e_i} e_j, e_k>`` in an
  orthonormal frame, from the Koszul formula
  ``2 gamma[i,j,k] = <[e_i,e_j],e_k> - <[e_j,e_k],e_i> + <[e_k,e_i],e_j>``;
* curvature ``R(X, Y)Z = nabla_X nabla_Y Z - nabla_Y nabla_X Z - nabla_{[X,Y]} Z``;
* Ricci ``Ric(Y, Z) = sum_i <R(e_i, Y)Z, e_i>``, so the round sphere has
  positive Ricci curvature.

Algebras with a non-identity gram matrix are handled by computing in the
orthonormalised presentation and pulling tensors back to the user's basis, so
Ricci and Riemann outputs are always bilinear/multilinear forms in the input
coordinates.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .algebra import (
    LinearMap,
    MetricLieAlgebra,
    Subspace,
    as_matrix,
    is_ideal,
    orthonormalize,
    require_valid,
)

_TINY = 1e-12


@dataclass(frozen=True)
class Connection:
    """Levi-Civita connection coefficients in an orthonormal frame."""

    gamma: np.ndarray  # shape (n, n, n)

    def __post_init__(self):
        g = np.array(self.gamma, dtype=float)
        g.setflags(write=False)
        object.__setattr__(self, "gamma", g)


@dataclass(frozen=True)
class CurvatureReport:
    """Ricci data of a left-invariant metric, expressed in the input basis."""

    ricci_tensor: np.ndarray  # bilinear form, (n, n)
    ricci_operator: LinearMap
    scal: float
    riemann: np.ndarray | None = None  # optional (0,4) tensor R[i,j,k,l] = <R(e_i,e_j)e_k, e_l>

    def __post_init__(self):
        t = np.array(self.ricci_tensor, dtype=float)
        t.setflags(write=False)
        object.__setattr__(self, "ricci_tensor", t)
        if self.riemann is not None:
            r = np.array(self.riemann, dtype=float)
            r.setflags(write=False)
            object.__setattr__(self, "riemann", r)


def _frame(alg: MetricLieAlgebra):
    """Orthonormalised presentation plus both coordinate maps.

    Returns ``(alg_on, b, t)`` where columns of ``b`` are the orthonormal
    basis in old coordinates and ``t = b^-1`` maps old coordinates to frame
    coordinates.  For an already orthonormal algebra both maps are identity.
    """
    require_valid(alg)
    if alg.is_orthonormal():
        eye = np.eye(alg.dim)
        return alg, eye, eye
    alg_on, bmap = orthonormalize(alg)
    b = bmap.matrix
    return alg_on, b, np.linalg.inv(b)


def _gamma(alg_on: MetricLieAlgebra) -> np.ndarray:
    # gamma[i,j,k] = (c[i,j,k] - c[j,k,i] + c[k,i,j]) / 2
    c = alg_on.c
    return 0.5 * (c - c.transpose(2, 0, 1) + c.transpose(1, 2, 0))


def levi_civita(alg: MetricLieAlgebra) -> Connection:
    """Connection coefficients of an algebra presented in an orthonormal frame."""
    require_valid(alg)
    if not alg.is_orthonormal(tol=1e-10):
        raise ValueError(
            f"levi_civita requires an orthonormal frame; run orthonormalize on '{alg.name}' first"
        )
    return Connection(_gamma(alg))


def _riemann_frame(alg_on: MetricLieAlgebra) -> np.ndarray:
    gamma = _gamma(alg_on)
    c = alg_on.c
    # R[i,j,k,l] = <R(e_i,e_j)e_k, e_l>
    return (
        np.einsum("jkm,iml->ijkl", gamma, gamma)
        - np.einsum("ikm,jml->ijkl", gamma, gamma)
        - np.einsum("ijm,mkl->ijkl", c, gamma)
    )


def riemann(alg: MetricLieAlgebra) -> np.ndarray:
    """The (0,4) curvature tensor in the input basis."""
    alg_on, _, t = _frame(alg)
    r4 = _riemann_frame(alg_on)
    if alg.is_orthonormal():
        return r4
    return np.einsum("ai,bj,ck,dl,abcd->ijkl", t, t, t, t, r4)


def ricci(alg: MetricLieAlgebra, include_riemann: bool = False) -> CurvatureReport:
    """Ricci tensor, Ricci operator and scalar curvature (brute force)."""
    alg_on, _, t = _frame(alg)
    r4 = _riemann_frame(alg_on)
    ric_on = np.einsum("ijki->jk", r4)
    ric_on = 0.5 * (ric_on + ric_on.T)
    if alg.is_orthonormal():
        tensor = ric_on
        operator = ric_on
    else:
        tensor = t.T @ ric_on @ t
        operator = np.linalg.solve(alg.gram, tensor)
    scal = float(np.trace(operator))
    rie = None
    if include_riemann:
        rie = r4 if alg.is_orthonormal() else np.einsum("ai,bj,ck,dl,abcd->ijkl", t, t, t, t, r4)
    return CurvatureReport(
        ricci_tensor=tensor,
        ricci_operator=LinearMap(operator),
        scal=scal,
        riemann=rie,
    )


def divergence(alg: MetricLieAlgebra, s_op) -> np.ndarray:
    """Divergence covector of a symmetric operator field.

    ``(div S)(X) = sum_i <(nabla_{e_i} S)(e_i), X>`` with
    ``(nabla_{e_i} S)(e_j) = nabla_{e_i}(S e_j) - S(nabla_{e_i} e_j)``; for
    left-invariant fields there is no directional-derivative term.
    """
    s = as_matrix(s_op)
    if s.shape != (alg.dim, alg.dim):
        raise ValueError("operator dimension does not match the algebra")
    gs = alg.gram @ s
    scale = max(float(np.max(np.abs(gs))), _TINY)
    if np.max(np.abs(gs - gs.T)) > 1e-8 * scale:
        raise ValueError("divergence expects a metric-symmetric operator")
    alg_on, _, t = _frame(alg)
    gamma = _gamma(alg_on)
    s_on = t @ s @ np.linalg.inv(t) if not alg.is_orthonormal() else s
    div_on = np.einsum("ji,ijk->k", s_on, gamma) - s_on @ np.einsum("iij->j", gamma)
    return div_on if alg.is_orthonormal() else t.T @ div_on


def covariant_ricci_along(alg: MetricLieAlgebra, xi) -> np.ndarray:
    """The bilinear form ``(nabla_xi Ric)(X, Y)`` in the input basis.

    For left-invariant fields the Ricci components are constant, so only the
    connection terms ``-Ric(nabla_xi X, Y) - Ric(X, nabla_xi Y)`` survive.
    """
    xi = np.asarray(xi, dtype=float)
    if xi.shape != (alg.dim,):
        raise ValueError(f"xi must be a vector of length {alg.dim}")
    alg_on, _, t = _frame(alg)
    gamma = _gamma(alg_on)
    r4 = _riemann_frame(alg_on)
    ric_on = np.einsum("ijki->jk", r4)
    ric_on = 0.5 * (ric_on + ric_on.T)
    xi_on = t @ xi
    # cmat[k, j] = <nabla_xi e_j, e_k>: the operator nabla_xi acting on the frame
    cmat = np.einsum("i,ijk->kj", xi_on, gamma)
    m_on = -(cmat.T @ ric_on + ric_on @ cmat)
    return m_on if alg.is_orthonormal() else t.T @ m_on @ t


def _check_unit_orthogonal(alg: MetricLieAlgebra, xi_index: int, tol: float = 1e-10) -> None:
    g = alg.gram
    n = alg.dim
    if not (0 <= xi_index < n):
        raise ValueError(f"xi_index {xi_index} out of range for dim {n}")
    if abs(g[xi_index, xi_index] - 1.0) > tol:
        raise ValueError("the distinguished basis vector must have unit length")
    off = np.delete(g[xi_index], xi_index)
    if np.max(np.abs(off)) > tol:
        raise ValueError("the distinguished basis vector must be orthogonal to its complement")


def shape_operator(alg: MetricLieAlgebra, xi_index: int) -> LinearMap:
    """Shape operator of the orbit orthogonal to the unit vector ``e_{xi_index}``.

    ``T(X)`` is the projection onto the complement of ``xi`` of
    ``nabla_X xi``.  The complement must be an ideal (the hallmark of a
    one-dimensional extension presentation), otherwise the result would not
    be symmetric and the call is rejected.
    """
    require_valid(alg)
    _check_unit_orthogonal(alg, xi_index)
    n = alg.dim
    others = [i for i in range(n) if i != xi_index]
    comp = Subspace(np.eye(n)[:, others])
    if not is_ideal(alg, comp):
        raise ValueError(
            "the orthogonal complement of xi is not an ideal; "
            "this algebra is not presented as a one-dimensional extension"
        )
    alg_on, _, _ = _frame(alg)
    gamma = _gamma(alg_on)
    tmat = gamma[np.ix_(others, [xi_index], others)][:, 0, :].T
    # tmat[k, j] = <nabla_{e_j} xi, e_k> restricted to the complement
    return LinearMap(tmat)
