"""Finite-dimensional metric Lie algebras and their structural linear algebra.

An algebra is stored as a structure-constant array ``c`` with
``[e_i, e_j] = sum_k c[i, j, k] e_k`` together with a gram matrix holding the
inner products of the basis vectors.  All rank decisions are made by
singular-value thresholding relative to the largest singular value, so the
results are invariant under rescaling of the input data.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

# Default tolerances.  Rank decisions are relative to the largest singular
# value; the Jacobi residual is absolute after normalising max|c| to 1.
TOL_RANK = 1e-9
TOL_JACOBI = 1e-10
TOL_SPD = 1e-10

_TINY = 1e-12


class InvalidAlgebraError(ValueError):
    """The given structure constants / gram matrix do not define a metric Lie algebra."""


def _frozen_array(a, shape=None) -> np.ndarray:
    out = np.array(a, dtype=float)
    if shape is not None and out.shape != shape:
        raise ValueError(f"expected array of shape {shape}, got {out.shape}")
    out.setflags(write=False)
    return out


def as_matrix(op) -> np.ndarray:
    """Coerce a LinearMap or array-like to a plain square ndarray."""
    if isinstance(op, LinearMap):
        return op.matrix
    m = np.asarray(op, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {m.shape}")
    return m


@dataclass(frozen=True)
class LinearMap:
    """An endomorphism of the algebra; columns are images of basis vectors."""

    matrix: np.ndarray

    def __post_init__(self):
        m = np.array(self.matrix, dtype=float)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError(f"LinearMap needs a square matrix, got shape {m.shape}")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.matrix, dtype=dtype)


@dataclass(frozen=True)
class Subspace:
    """A subspace stored as an orthonormal spanning set (columns of ``basis``)."""

    basis: np.ndarray  # shape (n, r), orthonormal columns

    def __post_init__(self):
        b = np.array(self.basis, dtype=float)
        if b.ndim != 2:
            raise ValueError("Subspace basis must be a 2-d array (columns span)")
        b.setflags(write=False)
        object.__setattr__(self, "basis", b)

    @classmethod
    def span(cls, vectors, ambient_dim: int | None = None, tol_rank: float = TOL_RANK) -> "Subspace":
        """Orthonormalised span of the given vectors at the rank tolerance."""
        vecs = [np.asarray(v, dtype=float) for v in vectors]
        if not vecs:
            if ambient_dim is None:
                raise ValueError("cannot infer ambient dimension of an empty span")
            return cls(np.zeros((ambient_dim, 0)))
        mat = np.column_stack(vecs)
        u, s, _ = np.linalg.svd(mat, full_matrices=False)
        if s.size == 0 or s[0] == 0.0:
            return cls(np.zeros((mat.shape[0], 0)))
        r = int(np.sum(s > tol_rank * s[0]))
        return cls(u[:, :r])

    @property
    def dim(self) -> int:
        return self.basis.shape[1]

    @property
    def ambient_dim(self) -> int:
        return self.basis.shape[0]

    def project(self, v: np.ndarray) -> np.ndarray:
        return self.basis @ (self.basis.T @ np.asarray(v, dtype=float))

    def contains(self, v, tol_rank: float = TOL_RANK) -> bool:
        v = np.asarray(v, dtype=float)
        nv = np.linalg.norm(v)
        if nv == 0.0:
            return True
        return np.linalg.norm(v - self.project(v)) <= max(tol_rank, 10 * TOL_RANK) * nv


@dataclass(frozen=True)
class MetricLieAlgebra:
    """A Lie algebra with an inner product, given by structure constants and a gram matrix."""

    name: str
    dim: int
    c: np.ndarray  # shape (n, n, n): [e_i, e_j] = sum_k c[i, j, k] e_k
    gram: np.ndarray  # shape (n, n)
    basis_labels: tuple[str, ...] | None = None

    def __post_init__(self):
        n = int(self.dim)
        if n <= 0:
            raise ValueError("dim must be a positive integer")
        object.__setattr__(self, "dim", n)
        object.__setattr__(self, "c", _frozen_array(self.c, (n, n, n)))
        object.__setattr__(self, "gram", _frozen_array(self.gram, (n, n)))
        if self.basis_labels is not None:
            labels = tuple(str(s) for s in self.basis_labels)
            if len(labels) != n:
                raise ValueError("basis_labels length must equal dim")
            object.__setattr__(self, "basis_labels", labels)

    def basis_vector(self, i: int) -> np.ndarray:
        e = np.zeros(self.dim)
        e[i] = 1.0
        return e

    def is_orthonormal(self, tol: float = 1e-12) -> bool:
        return bool(np.max(np.abs(self.gram - np.eye(self.dim))) <= tol)


def from_brackets(name: str, dim: int, brackets: dict, gram=None, labels=None) -> MetricLieAlgebra:
    """Build an algebra from 1-based sparse bracket data.

    ``brackets`` maps pairs ``(i, j)`` with ``i < j`` to ``{k: coeff}`` meaning
    ``[e_i, e_j] = sum coeff * e_k``; antisymmetric counterparts are filled in.
    """
    c = np.zeros((dim, dim, dim))
    for (i, j), coeffs in brackets.items():
        if not (1 <= i < j <= dim):
            raise ValueError(f"bracket pair ({i}, {j}) must satisfy 1 <= i < j <= dim")
        for k, v in coeffs.items():
            if not (1 <= k <= dim):
                raise ValueError(f"bracket target index {k} out of range")
            c[i - 1, j - 1, k - 1] = float(v)
            c[j - 1, i - 1, k - 1] = -float(v)
    g = np.eye(dim) if gram is None else np.asarray(gram, dtype=float)
    return MetricLieAlgebra(name=name, dim=dim, c=c, gram=g, basis_labels=labels)


@dataclass(frozen=True)
class ValidationReport:
    """Result of checking the metric Lie algebra axioms."""

    antisymmetry_defect: float
    jacobi_residual: float
    gram_symmetry_defect: float
    gram_min_eigenvalue: float
    valid: bool

    def summary(self) -> str:
        status = "valid" if self.valid else "INVALID"
        return (
            f"{status}: antisymmetry defect {self.antisymmetry_defect:.3e}, "
            f"jacobi residual {self.jacobi_residual:.3e}, "
            f"gram symmetry defect {self.gram_symmetry_defect:.3e}, "
            f"min gram eigenvalue {self.gram_min_eigenvalue:.3e}"
        )


def jacobi_residual(c: np.ndarray) -> float:
    """Max-norm of the cyclic Jacobi sum after normalising max|c| to 1."""
    scale = float(np.max(np.abs(c)))
    if scale == 0.0:
        return 0.0
    cs = c / scale
    jac = (
        np.einsum("ijm,mkl->ijkl", cs, cs)
        + np.einsum("jkm,mil->ijkl", cs, cs)
        + np.einsum("kim,mjl->ijkl", cs, cs)
    )
    return float(np.max(np.abs(jac)))


def validate(alg: MetricLieAlgebra, tol_jacobi: float = TOL_JACOBI, tol_spd: float = TOL_SPD) -> ValidationReport:
    """Check antisymmetry, the Jacobi identity and positive-definiteness of the gram matrix."""
    anti = float(np.max(np.abs(alg.c + alg.c.transpose(1, 0, 2))))
    scale = max(float(np.max(np.abs(alg.c))), 1.0)
    jac = jacobi_residual(alg.c)
    gsym = float(np.max(np.abs(alg.gram - alg.gram.T)))
    eigs = np.linalg.eigvalsh(0.5 * (alg.gram + alg.gram.T))
    min_eig = float(eigs[0])
    max_eig = float(eigs[-1])
    ok = (
        anti <= 1e-12 * scale
        and jac <= tol_jacobi
        and gsym <= 1e-12 * max(max_eig, 1.0)
        and max_eig > 0
        and min_eig > tol_spd * max_eig
    )
    return ValidationReport(
        antisymmetry_defect=anti,
        jacobi_residual=jac,
        gram_symmetry_defect=gsym,
        gram_min_eigenvalue=min_eig,
        valid=bool(ok),
    )


def require_valid(alg: MetricLieAlgebra) -> None:
    report = validate(alg)
    if not report.valid:
        raise InvalidAlgebraError(f"algebra '{alg.name}' failed validation ({report.summary()})")


def bracket(alg: MetricLieAlgebra, x, y) -> np.ndarray:
    """Lie bracket [x, y] of coordinate vectors, contracted through the structure constants."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != (alg.dim,) or y.shape != (alg.dim,):
        raise ValueError(f"bracket arguments must be vectors of length {alg.dim}")
    return np.einsum("i,j,ijk->k", x, y, alg.c)


def ad(alg: MetricLieAlgebra, x) -> LinearMap:
    """The adjoint map ad_x = [x, .] as a matrix (columns are [x, e_j])."""
    x = np.asarray(x, dtype=float)
    if x.shape != (alg.dim,):
        raise ValueError(f"ad argument must be a vector of length {alg.dim}")
    return LinearMap(np.einsum("i,ijk->kj", x, alg.c))


def _bracket_span(alg: MetricLieAlgebra, left: Subspace, right: Subspace, tol_rank: float) -> Subspace:
    vecs = []
    for u in left.basis.T:
        for v in right.basis.T:
            vecs.append(bracket(alg, u, v))
    return Subspace.span(vecs, ambient_dim=alg.dim, tol_rank=tol_rank)


def lower_central_series(alg: MetricLieAlgebra, tol_rank: float = TOL_RANK) -> list[Subspace]:
    """Terms g, [g, g], [g, [g, g]], ... until the dimension stabilises."""
    require_valid(alg)
    full = Subspace(np.eye(alg.dim))
    terms = [full]
    while True:
        nxt = _bracket_span(alg, full, terms[-1], tol_rank)
        if nxt.dim == terms[-1].dim:
            break
        terms.append(nxt)
    return terms


def derived_series(alg: MetricLieAlgebra, tol_rank: float = TOL_RANK) -> list[Subspace]:
    """Terms g, [g, g], [[g, g], [g, g]], ... until the dimension stabilises."""
    require_valid(alg)
    terms = [Subspace(np.eye(alg.dim))]
    while True:
        nxt = _bracket_span(alg, terms[-1], terms[-1], tol_rank)
        if nxt.dim == terms[-1].dim:
            break
        terms.append(nxt)
    return terms


def is_nilpotent(alg: MetricLieAlgebra, tol_rank: float = TOL_RANK) -> bool:
    return lower_central_series(alg, tol_rank)[-1].dim == 0


def is_solvable(alg: MetricLieAlgebra, tol_rank: float = TOL_RANK) -> bool:
    return derived_series(alg, tol_rank)[-1].dim == 0


def derivation_space(alg: MetricLieAlgebra, tol_rank: float = TOL_RANK) -> list[LinearMap]:
    """Orthonormal (Frobenius) basis of all derivations.

    A derivation satisfies D[x, y] = [Dx, y] + [x, Dy]; the constraints over
    all basis pairs form a linear system in the n^2 entries of D whose null
    space is extracted by singular-value thresholding.
    """
    require_valid(alg)
    n = alg.dim
    c = alg.c
    eye = np.eye(n)
    # Constraint tensor M[(i,j,k), (a,b)] multiplying D[a, b]:
    #   [De_i, e_j]_k -> delta_{b i} c[a, j, k]
    #   [e_i, De_j]_k -> delta_{b j} c[i, a, k]
    #   -D[e_i,e_j]_k -> -delta_{a k} c[i, j, b]
    m = (
        np.einsum("ajk,bi->ijkab", c, eye)
        + np.einsum("iak,bj->ijkab", c, eye)
        - np.einsum("ijb,ak->ijkab", c, eye)
    )
    rows = []
    for i in range(n):
        for j in range(i + 1, n):
            rows.append(m[i, j].reshape(n, n * n))
    system = np.vstack(rows)
    if np.max(np.abs(system)) == 0.0:
        # Abelian: no constraints, every endomorphism is a derivation.
        return [LinearMap(v.reshape(n, n)) for v in np.eye(n * n)]
    _, s, vt = np.linalg.svd(system)
    smax = s[0]
    null_rows = vt[np.concatenate([s <= tol_rank * smax, np.ones(vt.shape[0] - s.size, dtype=bool)])]
    return [LinearMap(row.reshape(n, n)) for row in null_rows]


def derivation_defect(alg: MetricLieAlgebra, d) -> float:
    """Relative residual of the derivation identity for the map ``d``."""
    dm = as_matrix(d)
    c = alg.c
    lhs = np.einsum("ijm,km->ijk", c, dm)
    rhs = np.einsum("ai,ajk->ijk", dm, c) + np.einsum("aj,iak->ijk", dm, c)
    scale = max(float(np.max(np.abs(c))) * max(float(np.max(np.abs(dm))), _TINY), _TINY)
    return float(np.max(np.abs(lhs - rhs))) / scale


def is_ideal(alg: MetricLieAlgebra, sub: Subspace, tol_rank: float = TOL_RANK) -> bool:
    """True iff [algebra, sub] lies inside sub at the rank tolerance."""
    if sub.ambient_dim != alg.dim:
        raise ValueError("subspace ambient dimension does not match the algebra")
    if sub.dim == 0:
        return True
    vecs = []
    for i in range(alg.dim):
        for v in sub.basis.T:
            vecs.append(bracket(alg, alg.basis_vector(i), v))
    w = np.column_stack(vecs)
    scale = max(float(np.max(np.abs(w))), _TINY)
    resid = w - sub.basis @ (sub.basis.T @ w)
    return bool(np.max(np.abs(resid)) <= max(tol_rank, 10 * TOL_RANK) * scale)


def orthonormalize(alg: MetricLieAlgebra) -> tuple[MetricLieAlgebra, LinearMap]:
    """Re-express the algebra in an orthonormal basis (gram becomes the identity).

    Returns the new presentation together with the basis-change map whose
    columns are the orthonormal basis vectors written in the original
    coordinates.  Curvature of the two presentations agrees as bilinear forms.
    """
    require_valid(alg)
    n = alg.dim
    if alg.is_orthonormal():
        return alg, LinearMap(np.eye(n))
    try:
        chol = np.linalg.cholesky(alg.gram)
    except np.linalg.LinAlgError as exc:
        raise InvalidAlgebraError(f"gram matrix of '{alg.name}' is not positive definite") from exc
    b = np.linalg.inv(chol).T  # columns: orthonormal basis in old coordinates
    b_inv = chol.T  # old coordinates -> new coordinates
    c_new = np.einsum("ia,jb,ijk,dk->abd", b, b, alg.c, b_inv)
    new = MetricLieAlgebra(
        name=alg.name,
        dim=n,
        c=c_new,
        gram=np.eye(n),
        basis_labels=alg.basis_labels,
    )
    return new, LinearMap(b)


def subalgebra_restriction(alg: MetricLieAlgebra, sub: Subspace, name: str | None = None,
                           tol_rank: float = TOL_RANK) -> tuple[MetricLieAlgebra, float]:
    """Restrict the algebra to a subspace that is closed under the bracket.

    Returns the restricted metric Lie algebra (in the subspace's orthonormal
    coordinates) and the worst relative closure defect of the restriction.
    """
    v = sub.basis
    r = sub.dim
    if r == 0:
        raise ValueError("cannot restrict to the zero subspace")
    c_res = np.zeros((r, r, r))
    defect = 0.0
    scale = max(float(np.max(np.abs(alg.c))), _TINY)
    for a in range(r):
        for b_ in range(r):
            w = bracket(alg, v[:, a], v[:, b_])
            coeffs = v.T @ w
            rem = w - v @ coeffs
            defect = max(defect, float(np.linalg.norm(rem)) / scale)
            c_res[a, b_] = coeffs
    gram_res = v.T @ alg.gram @ v
    res = MetricLieAlgebra(
        name=name or f"{alg.name}|sub",
        dim=r,
        c=c_res,
        gram=gram_res,
    )
    return res, defect
