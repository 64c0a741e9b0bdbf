import numpy as np
import pytest

from solitonforge.algebra import (
    InvalidAlgebraError,
    MetricLieAlgebra,
    Subspace,
    ad,
    bracket,
    derivation_defect,
    derivation_space,
    derived_series,
    from_brackets,
    is_ideal,
    is_nilpotent,
    is_solvable,
    lower_central_series,
    orthonormalize,
    validate,
)
from solitonforge.curvature import ricci


def test_validate_abelian(abelian3):
    report = validate(abelian3)
    assert report.valid
    assert report.jacobi_residual == 0.0
    assert report.antisymmetry_defect == 0.0


def test_validate_heisenberg(heis3):
    assert validate(heis3).valid


def test_validate_so3(so3):
    assert validate(so3).valid


def test_validate_broken_antisymmetry():
    c = np.zeros((3, 3, 3))
    c[0, 1, 2] = 1.0  # no compensating c[1,0,2]
    alg = MetricLieAlgebra(name="broken", dim=3, c=c, gram=np.eye(3))
    report = validate(alg)
    assert not report.valid
    assert report.antisymmetry_defect == pytest.approx(1.0)


def test_validate_broken_jacobi():
    # [e1,e2]=e3, [e1,e3]=e2, [e2,e3]=e3 violates Jacobi
    alg = from_brackets("bad", 3, {(1, 2): {3: 1.0}, (1, 3): {2: 1.0}, (2, 3): {3: 1.0}})
    report = validate(alg)
    assert not report.valid
    assert report.jacobi_residual > 1e-2


def test_validate_indefinite_gram(heis3):
    alg = MetricLieAlgebra(name="bad_gram", dim=3, c=heis3.c, gram=np.diag([1.0, 1.0, -1.0]))
    assert not validate(alg).valid


def test_bracket_heisenberg(heis3):
    e1, e2, e3 = np.eye(3)
    assert np.allclose(bracket(heis3, e1, e2), e3)
    assert np.allclose(bracket(heis3, e3, e1), 0.0)


def test_bracket_antisymmetry_random(heis5):
    rng = np.random.default_rng(7)
    for _ in range(10):
        x = rng.normal(size=5)
        y = rng.normal(size=5)
        assert np.allclose(bracket(heis5, x, y), -bracket(heis5, y, x))
        assert np.allclose(bracket(heis5, x, x), 0.0)


def test_bracket_dimension_mismatch(heis3):
    with pytest.raises(ValueError):
        bracket(heis3, np.ones(2), np.ones(3))


def test_ad_heisenberg(heis3):
    m = ad(heis3, heis3.basis_vector(0)).matrix
    expected = np.zeros((3, 3))
    expected[2, 1] = 1.0
    assert np.allclose(m, expected)


def test_ad_abelian(abelian3):
    rng = np.random.default_rng(0)
    assert np.allclose(ad(abelian3, rng.normal(size=3)).matrix, 0.0)


def test_ad_solv2(solv2):
    assert np.allclose(ad(solv2, solv2.basis_vector(0)).matrix, np.diag([0.0, 1.0]))


def test_series_heisenberg(heis3):
    dims = [s.dim for s in lower_central_series(heis3)]
    assert dims == [3, 1, 0]
    assert is_nilpotent(heis3)
    assert is_solvable(heis3)


def test_series_solv2(solv2):
    assert [s.dim for s in derived_series(solv2)] == [2, 1, 0]
    assert [s.dim for s in lower_central_series(solv2)] == [2, 1]
    assert is_solvable(solv2)
    assert not is_nilpotent(solv2)


def test_series_abelian(abelian3):
    assert [s.dim for s in lower_central_series(abelian3)] == [3, 0]
    assert is_nilpotent(abelian3)
    assert is_solvable(abelian3)


def test_series_so3_not_solvable(so3):
    assert not is_solvable(so3)
    assert not is_nilpotent(so3)


def test_series_monotone(heis3, heis5, solv2, so3):
    for alg in (heis3, heis5, solv2, so3):
        for series in (lower_central_series(alg), derived_series(alg)):
            dims = [s.dim for s in series]
            assert all(a >= b for a, b in zip(dims, dims[1:]))


@pytest.mark.parametrize("name, dim_expected", [("abelian", 4), ("heis3", 6), ("solv2", 2)])
def test_derivation_space_dimensions(name, dim_expected, heis3, solv2):
    alg = {"abelian": from_brackets("abelian_2", 2, {}), "heis3": heis3, "solv2": solv2}[name]
    assert len(derivation_space(alg)) == dim_expected


def test_derivation_space_satisfies_identity(heis3, heis5, solv2, so3):
    for alg in (heis3, heis5, solv2, so3):
        for d in derivation_space(alg):
            assert derivation_defect(alg, d) <= 1e-8


def test_derivation_space_orthonormal(heis3):
    basis = [d.matrix.flatten() for d in derivation_space(heis3)]
    g = np.array([[a @ b for b in basis] for a in basis])
    assert np.allclose(g, np.eye(len(basis)), atol=1e-12)


def test_derivations_closed_under_commutator(heis3, heis5, solv2):
    for alg in (heis3, heis5, solv2):
        ders = [d.matrix for d in derivation_space(alg)]
        span = np.column_stack([d.flatten() for d in ders])
        proj = span @ span.T
        for i in range(len(ders)):
            for j in range(i + 1, len(ders)):
                comm = (ders[i] @ ders[j] - ders[j] @ ders[i]).flatten()
                norm = np.linalg.norm(comm)
                if norm < 1e-12:
                    continue
                assert np.linalg.norm(comm - proj @ comm) <= 1e-8 * norm


def test_is_ideal_center_of_heisenberg(heis3):
    assert is_ideal(heis3, Subspace.span([heis3.basis_vector(2)]))


def test_is_ideal_solv2(solv2):
    assert is_ideal(solv2, Subspace.span([solv2.basis_vector(1)]))
    assert not is_ideal(solv2, Subspace.span([solv2.basis_vector(0)]))


def test_derived_algebra_is_ideal(heis3, heis5, solv2, so3):
    for alg in (heis3, heis5, solv2, so3):
        series = derived_series(alg)
        if len(series) > 1:
            assert is_ideal(alg, series[1])


def test_orthonormalize_identity_gram(heis3):
    alg_on, transform = orthonormalize(heis3)
    assert np.allclose(transform.matrix, np.eye(3))
    assert np.allclose(alg_on.c, heis3.c)


def test_orthonormalize_rescaled_abelian():
    alg = from_brackets("ab", 2, {}, gram=np.diag([4.0, 1.0]))
    alg_on, transform = orthonormalize(alg)
    assert np.allclose(alg_on.gram, np.eye(2))
    assert np.allclose(transform.matrix, np.diag([0.5, 1.0]))


def test_orthonormalize_heisenberg_scaled_center():
    # |e3| = 2, so the unit center vector is e3/2 and [f1, f2] = 2 f3.
    alg = from_brackets("h3g", 3, {(1, 2): {3: 1.0}}, gram=np.diag([1.0, 1.0, 4.0]))
    alg_on, transform = orthonormalize(alg)
    assert alg_on.c[0, 1, 2] == pytest.approx(2.0, abs=1e-14)
    assert np.allclose(transform.matrix, np.diag([1.0, 1.0, 0.5]))


def test_orthonormalize_idempotent():
    rng = np.random.default_rng(3)
    a = rng.normal(size=(3, 3))
    gram = a @ a.T + 3.0 * np.eye(3)
    alg = from_brackets("h3r", 3, {(1, 2): {3: 1.0}}, gram=gram)
    once, _ = orthonormalize(alg)
    twice, t2 = orthonormalize(once)
    assert np.allclose(once.gram, np.eye(3))
    assert np.allclose(twice.gram, np.eye(3))
    assert np.max(np.abs(twice.c - once.c)) <= 1e-12
    assert np.allclose(t2.matrix, np.eye(3))


def test_orthonormalize_curvature_agreement():
    """Ricci of the two presentations agrees as a bilinear form.

    Cross-checked with a general-frame Koszul oracle that never
    orthonormalises: the connection is computed with the gram matrix in
    place, and the Ricci tensor is the trace of the curvature operator.
    """
    gram = np.diag([1.0, 1.0, 4.0])
    alg = from_brackets("h3g", 3, {(1, 2): {3: 1.0}}, gram=gram)
    rep = ricci(alg)

    n, c, g = alg.dim, alg.c, gram
    ginv = np.linalg.inv(g)
    lowered = np.einsum("ijm,mk->ijk", c, g)  # <[e_i, e_j], e_k>
    omega = 0.5 * (lowered - lowered.transpose(2, 0, 1) + lowered.transpose(1, 2, 0))
    chris = np.einsum("ijk,kl->ijl", omega, ginv)  # Gamma^l_{ij}
    ric = np.zeros((n, n))
    for j in range(n):
        for k in range(n):
            val = 0.0
            for i in range(n):
                for m in range(n):
                    val += chris[j, k, m] * chris[i, m, i] - chris[i, k, m] * chris[j, m, i]
                    val -= c[i, j, m] * chris[m, k, i]
            ric[j, k] = val
    assert np.allclose(rep.ricci_tensor, ric, atol=1e-10)

    alg_on, transform = orthonormalize(alg)
    rep_on = ricci(alg_on)
    t = np.linalg.inv(transform.matrix)
    assert np.allclose(rep.ricci_tensor, t.T @ rep_on.ricci_tensor @ t, atol=1e-12)
    assert rep.scal == pytest.approx(rep_on.scal, abs=1e-12)


def test_orthonormalize_rejects_non_spd():
    alg = MetricLieAlgebra(name="bad", dim=2, c=np.zeros((2, 2, 2)), gram=np.diag([1.0, -1.0]))
    with pytest.raises(InvalidAlgebraError):
        orthonormalize(alg)


def test_subspace_span_tolerance():
    v1 = np.array([1.0, 0.0, 0.0])
    v2 = np.array([1.0, 1e-15, 0.0])
    sub = Subspace.span([v1, v2])
    assert sub.dim == 1
    assert sub.contains(np.array([2.0, 0.0, 0.0]))
    assert not sub.contains(np.array([0.0, 1.0, 0.0]))
