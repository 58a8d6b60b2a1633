import itertools

import numpy as np
import pytest

import goldens
from unitonflow.cxlinalg import orthonormalize, projector
from unitonflow.errors import RankAmbiguous
from unitonflow.harmonic_builder import (LaurentMatrix, alpha_span_vectors,
                                         build_chain, c_elementary, c_table,
                                         evaluate_phi, extended_from_chain,
                                         extended_solution, laurent_from_samples,
                                         phi_from_chain)
from unitonflow.uniton_array import mv_derivative, mv_eval


def random_complements(rng, n, count):
    out = []
    for _ in range(count):
        k = int(rng.integers(1, n))
        g = rng.standard_normal((n, k)) + 1j * rng.standard_normal((n, k))
        q, _ = np.linalg.qr(g)
        out.append(np.eye(n) - q @ q.conj().T)
    return out


def brute_elementary(comps, s):
    n = comps[0].shape[0]
    total = np.zeros((n, n), dtype=complex)
    for combo in itertools.combinations(range(len(comps)), s):
        prod = np.eye(n, dtype=complex)
        for idx in combo:  # ascending, each factor lands on the left
            prod = comps[idx] @ prod
        total = total + prod
    return total


def test_c_table_against_brute_force():
    rng = np.random.default_rng(3)
    comps = random_complements(rng, 4, 3)
    table = c_table(comps, 4)
    for s in range(4):
        np.testing.assert_allclose(table[s], brute_elementary(comps, s), atol=1e-12)


def test_c_elementary_bounds():
    rng = np.random.default_rng(4)
    comps = random_complements(rng, 3, 2)
    np.testing.assert_allclose(c_elementary(comps, 0), np.eye(3), atol=1e-14)
    with pytest.raises(IndexError):
        c_elementary(comps, 3)
    with pytest.raises(IndexError):
        c_elementary(comps, -1)


def test_two_row_second_span_formula():
    # level-2 span should agree with {H0j + pi1perp H1j, pi1perp H0j'}
    arr = goldens.two_row_array()
    z = 0.91 - 0.34j
    chain = build_chain(arr, z)
    p1c = chain.complements[0]
    manual = []
    for j in range(arr.J):
        h0 = mv_eval(arr.entry(0, j), z)
        h1 = mv_eval(arr.entry(1, j), z)
        d0 = mv_eval(mv_derivative(arr.entry(0, j)), z)
        manual.append(h0 + p1c @ h1)
        manual.append(p1c @ d0)
    p_manual = projector(orthonormalize(manual, ambient_dim=arr.n))
    np.testing.assert_allclose(chain.projectors[1], p_manual, atol=1e-10)


def test_alpha_span_vector_count():
    arr = goldens.single_column_array()
    z = 0.77 + 0.62j
    chain = build_chain(arr, z)
    vecs = alpha_span_vectors(arr, 2, z, chain)
    assert len(vecs) == 3  # (i+1) * J with i=2, J=1


def test_chain_ranks_bounded_by_level():
    arr = goldens.single_column_array()
    chain = build_chain(arr, 1.13 + 0.21j)
    for i, rank in enumerate(chain.ranks):
        assert rank <= i + 1


def test_diagonal_chain_is_nested():
    chain = build_chain(goldens.diagonal_3x3_array(), 0.52 - 0.87j)
    assert chain.is_nested()


def test_rank_ambiguous_carries_step():
    # two nearly identical lead entries put level 1 in the ambiguity band
    from goldens import vec, rat
    from unitonflow.uniton_array import ArrayColumn, UnitonArray
    h = vec(1, rat(0, 1), 0, 0)
    h_eps = vec(1 + 3e-8, rat(0, 1), 0, 0)
    arr = UnitonArray(n=4, r=1, columns=(
        ArrayColumn(0, (h,)), ArrayColumn(0, (h_eps,))))
    with pytest.raises(RankAmbiguous) as exc:
        build_chain(arr, 0.4 + 0.9j)
    assert exc.value.step == 1


def test_phi_unitary_on_goldens():
    for label, arr, q in goldens.golden_unitons():
        phi = evaluate_phi(arr, q, 0.67 + 0.45j)
        np.testing.assert_allclose(phi @ phi.conj().T, np.eye(arr.n),
                                   atol=1e-9, err_msg=label)


def test_empty_array_gives_left_factor():
    from unitonflow.uniton_array import UnitonArray
    arr = UnitonArray(n=3, r=0, columns=())
    q = np.diag([1j, -1j, 1]).astype(complex)
    np.testing.assert_allclose(evaluate_phi(arr, q, 0.3 + 0.2j), q, atol=1e-14)


def test_extended_solution_degree_and_normalization():
    for label, arr, _ in goldens.golden_unitons():
        ext = extended_solution(arr, 0.81 + 0.23j)
        assert min(ext.support, default=0) >= 0, label
        assert max(ext.support, default=0) <= arr.r, label
        np.testing.assert_allclose(ext.eval(1.0), np.eye(arr.n), atol=1e-12,
                                   err_msg=label)


def test_extended_at_minus_one_is_bare_map():
    # the lambda = -1 member recovers the map with identity left factor,
    # with sign +1 (each factor evaluates to the reflection exactly)
    arr = goldens.two_row_array()
    z = 1.21 + 0.48j
    ext = extended_solution(arr, z)
    np.testing.assert_allclose(ext.eval(-1.0), evaluate_phi(arr, None, z),
                               atol=1e-10)


def test_laurent_matmul_matches_pointwise():
    rng = np.random.default_rng(11)
    a = LaurentMatrix(2, {-1: rng.standard_normal((2, 2)) + 0j,
                          1: rng.standard_normal((2, 2)) + 0j})
    b = LaurentMatrix(2, {0: rng.standard_normal((2, 2)) + 0j,
                          2: rng.standard_normal((2, 2)) + 0j})
    lam = np.exp(0.77j)
    np.testing.assert_allclose((a @ b).eval(lam), a.eval(lam) @ b.eval(lam),
                               atol=1e-10)


def test_laurent_from_samples_recovers_coefficients():
    c_neg = np.array([[0, 1], [0, 0]], dtype=complex)
    c_pos = np.array([[2, 0], [0, 3]], dtype=complex)
    target = LaurentMatrix(2, {-1: c_neg, 2: c_pos})
    rebuilt = laurent_from_samples(target.eval, -2, 2, 2)
    assert set(rebuilt.support) == {-1, 2}
    np.testing.assert_allclose(rebuilt.coeff(-1), c_neg, atol=1e-10)
    np.testing.assert_allclose(rebuilt.coeff(2), c_pos, atol=1e-10)


def test_extended_from_chain_consistency():
    arr = goldens.diagonal_3x3_array()
    z = 0.44 + 0.91j
    chain = build_chain(arr, z)
    ext = extended_from_chain(chain, arr.n)
    lam = np.exp(1.3j)
    manual = np.eye(arr.n, dtype=complex)
    for p, pc in zip(chain.projectors, chain.complements):
        manual = manual @ (p + lam * pc)
    np.testing.assert_allclose(ext.eval(lam), manual, atol=1e-11)


def test_phi_from_chain_left_factor_shapes():
    arr = goldens.two_row_array()
    chain = build_chain(arr, 0.3 + 1.1j)
    bare = phi_from_chain(chain, None, arr.n)
    q = np.eye(arr.n, dtype=complex) * 1j
    np.testing.assert_allclose(phi_from_chain(chain, q, arr.n), 1j * bare,
                               atol=1e-12)
