import numpy as np
import pytest

import goldens
from unitonflow.cxlinalg import orthonormalize, projector
from unitonflow.harmonic_builder import (build_chain, evaluate_phi,
                                         extended_solution,
                                         laurent_from_samples)
from unitonflow.spectral_flow import deform
from unitonflow.uniton_array import mv_eval
from unitonflow.verifier import (eta, eta_from_factors, grassmann_check,
                                 grassmann_residual, harmonicity_of_function,
                                 harmonicity_residual, lambda_plus_check,
                                 maurer_cartan_check, s1_invariance_check,
                                 wirtinger)


def test_wirtinger_on_holomorphic_and_antiholomorphic():
    f = lambda w: np.array([[w ** 2]])
    dz, dzb = wirtinger(f, 1.0 + 1.0j, 1e-5)
    assert dz[0, 0] == pytest.approx(2 * (1 + 1j), rel=1e-8)
    assert abs(dzb[0, 0]) < 1e-8

    g = lambda w: np.array([[np.conj(w)]])
    dz, dzb = wirtinger(g, 0.3 - 0.7j, 1e-5)
    assert abs(dz[0, 0]) < 1e-10
    assert dzb[0, 0] == pytest.approx(1.0, rel=1e-8)


def test_harmonicity_passes_on_golden_map():
    arr = goldens.diagonal_3x3_array()
    rep = harmonicity_residual(arr, None, 0.62 + 0.48j)
    assert rep.passed
    assert rep.ratio is None or 2.5 <= rep.ratio <= 6.0


def test_harmonicity_rejects_unitary_but_non_harmonic():
    arr = goldens.diagonal_3x3_array()

    def twisted(w):
        # unitary for every w, but the phase breaks the critical-point law
        return np.exp(1j * abs(w) ** 2) * evaluate_phi(arr, None, w)

    rep = harmonicity_of_function(twisted, 0.62 + 0.48j)
    assert not rep.passed


def test_harmonicity_rejects_corrupted_chain():
    # level-2 span built without the derivative vectors is not a uniton
    arr = goldens.two_row_array()

    def corrupted(w):
        chain = build_chain(arr, w)
        lvl1 = [mv_eval(arr.entry(0, j), w) for j in range(arr.J)]
        junk = lvl1 + [np.array([1, 0, 0, 0, 0], dtype=complex)]
        p1 = chain.projectors[0]
        p2 = projector(orthonormalize(junk, ambient_dim=arr.n))
        f1 = 2 * p1 - np.eye(arr.n)
        f2 = 2 * p2 - np.eye(arr.n)
        return f1 @ f2

    rep = harmonicity_of_function(corrupted, 0.58 - 0.74j)
    assert not rep.passed


def test_maurer_cartan_on_goldens():
    lam = [np.exp(2j * np.pi * k / 8) for k in range(8)]
    for label, arr, _ in goldens.golden_unitons():
        rep = maurer_cartan_check(arr, 0.93 + 0.37j, lam)
        assert rep.passed, (label, rep.residual, rep.ratio)


def test_eta_r1_is_constant_interpolation():
    q, arr = goldens.uniton_one_array()
    t, z = 0.4, 0.66 + 0.59j
    lm = eta(arr, t, z)
    chain = build_chain(arr, z)
    expect = chain.projectors[0] + t * chain.complements[0]
    assert set(lm.support) == {0}
    np.testing.assert_allclose(lm.coeff(0), expect, atol=1e-10)


def test_eta_equals_factor_product():
    arr = goldens.two_row_array()
    t, z = 0.35, 0.72 - 0.51j
    a = eta(arr, t, z)
    b = eta_from_factors(arr, t, z)
    for k in sorted(set(a.support) | set(b.support)):
        np.testing.assert_allclose(a.coeff(k), b.coeff(k), atol=1e-9)


def test_eta_no_negative_powers_on_two_row():
    arr = goldens.two_row_array()
    lm = eta(arr, 0.5, 1.05 + 0.33j)
    ok, worst = lambda_plus_check(lm)
    assert ok, worst


def test_eta_at_one_is_identity_loop():
    for label, arr, _ in goldens.golden_unitons():
        if arr.r == 0:
            continue
        lm = eta(arr, 1.0, 0.88 + 0.41j)
        np.testing.assert_allclose(lm.coeff(0), np.eye(arr.n), atol=1e-10,
                                   err_msg=label)
        for k in lm.support:
            if k != 0:
                assert np.linalg.norm(lm.coeff(k)) < 1e-10, (label, k)


def test_lambda_plus_negative_control_mismatched_arrays():
    # quotient of extended solutions from two unrelated arrays picks up
    # genuine negative spectral powers
    a = goldens.diagonal_3x3_array()
    b = goldens.filled_3x3_array()
    t, z = 0.5, 0.69 + 0.57j
    ext_a = extended_solution(a, z)
    ext_bt = extended_solution(deform(b, t), z)

    def fn(lam):
        return np.linalg.inv(ext_bt.eval(lam)) @ ext_a.eval(lam * t)

    lm = laurent_from_samples(fn, -2 * a.r, 2 * a.r, a.n)
    ok, worst = lambda_plus_check(lm)
    assert not ok
    assert worst > 1e-3


def test_s1_invariance_positive_and_negative():
    diag = goldens.diagonal_3x3_array()
    assert s1_invariance_check(diag, 0.74 + 0.52j) < 1e-8
    filled = goldens.filled_3x3_array()
    assert s1_invariance_check(filled, 0.74 + 0.52j) > 1e-3


def test_grassmann_on_g27():
    q, arr = goldens.g27_array()
    z = 0.95 - 0.28j
    phi = evaluate_phi(arr, q, z)
    assert grassmann_check(phi)


def test_grassmann_negative_with_noncommuting_reflection():
    from unitonflow.sampling import random_reflection
    q, arr = goldens.g27_array()
    z = 0.95 - 0.28j
    rng = np.random.default_rng(23)
    bad_q = random_reflection(rng, arr.n)
    phi = evaluate_phi(arr, bad_q, z)
    assert grassmann_residual(phi) > 1e-3
    assert not grassmann_check(phi)


def test_grassmann_residual_zero_for_reflection():
    p = np.diag([1, 1, 0, 0]).astype(complex)
    assert grassmann_residual(2 * p - np.eye(4)) < 1e-14
