import numpy as np
import pytest

import goldens
from goldens import rat, vec
from unitonflow.errors import AlternationViolation, NotEchelon
from unitonflow.harmonic_builder import build_chain, evaluate_phi
from unitonflow.spectral_flow import (deform, deform_k, flow_family,
                                      flow_table_header, limit_array)
from unitonflow.uniton_array import (ArrayColumn, UnitonArray, from_f0,
                                     is_diagonal, mv_eval, to_echelon,
                                     validate)


def test_deform_at_one_is_structural_identity():
    for label, arr, _ in goldens.golden_unitons():
        assert deform(arr, 1.0) == arr, label


def test_deform_rejects_out_of_range_parameter():
    arr = goldens.two_row_array()
    for t in (0.0, -0.25, 1.5):
        with pytest.raises(ValueError):
            deform(arr, t)


def test_deform_requires_echelon():
    bad = UnitonArray(n=4, r=2, columns=(
        ArrayColumn(lead_row=1, cells=(vec(1, 0, 0, 0), vec(0, 1, 0, 0))),
    ))
    with pytest.raises(NotEchelon):
        deform(bad, 0.5)


def test_deformed_rows_binomial_expansion():
    # lead-0 column: row 1 at t is (t-1) H0 + t H1
    arr = goldens.filled_3x3_array()
    t, z = 0.4, 0.83 + 0.71j
    arr_t = deform(arr, t)
    h0 = mv_eval(arr.entry(0, 0), z)
    h1 = mv_eval(arr.entry(1, 0), z)
    h2 = mv_eval(arr.entry(2, 0), z)
    np.testing.assert_allclose(mv_eval(arr_t.entry(1, 0), z),
                               (t - 1) * h0 + t * h1, atol=1e-12)
    np.testing.assert_allclose(mv_eval(arr_t.entry(2, 0), z),
                               (t - 1) ** 2 * h0 + 2 * t * (t - 1) * h1 + t ** 2 * h2,
                               atol=1e-12)


def test_deform_keeps_lead_rows_and_validity():
    arr = goldens.filled_3x3_array()
    arr_t = deform(arr, 0.3)
    assert [c.lead_row for c in arr_t.columns] == [c.lead_row for c in arr.columns]
    assert validate(arr_t) == []


def test_limit_array_closed_form():
    arr = goldens.filled_3x3_array()
    lim = limit_array(arr)
    z = 0.57 - 0.66j
    t = 1e-6
    arr_t = deform(arr, t)
    for j, col in enumerate(arr.columns):
        k = col.lead_row
        for i in range(k, arr.r):
            expect = (-1) ** (i - k) * _comb(i, k) * mv_eval(col.cells[k], z)
            np.testing.assert_allclose(mv_eval(lim.entry(i, j), z), expect,
                                       atol=1e-12)
            np.testing.assert_allclose(mv_eval(arr_t.entry(i, j), z), expect,
                                       atol=1e-4)


def _comb(i, k):
    import math
    return math.comb(i, k)


def test_limit_is_diagonal_and_valid():
    for label, arr, _ in goldens.golden_unitons():
        lim = limit_array(arr)
        assert validate(lim) == [], label
        assert is_diagonal(lim), label


def test_deform_k_scaling_and_identity():
    karr = goldens.g27_f0()
    assert deform_k(karr, 1.0).columns == karr.columns
    t = 0.5
    kt = deform_k(karr, t)
    z = 0.71 + 0.32j
    # column 3 leads at row 1, so its lead entry is unscaled
    np.testing.assert_allclose(mv_eval(kt.columns[2][1], z),
                               mv_eval(karr.columns[2][1], z), atol=1e-12)
    # a row below a lead-0 column would scale by t; leads stay put
    np.testing.assert_allclose(mv_eval(kt.columns[0][0], z),
                               mv_eval(karr.columns[0][0], z), atol=1e-12)


def test_deform_k_scales_below_lead():
    basis = ((1 + 0j, 0j, 0j, 0j), (0j, 1 + 0j, 0j, 0j))
    k0 = vec(1, rat(0, 1), 0, 0)
    k1 = vec(0, 0, 1, rat(0, 1))
    k2 = vec(rat(0, 1), 1, 0, 0)
    from unitonflow.uniton_array import FZeroArray
    karr = FZeroArray(n=4, r=3, f0_basis=basis, columns=((k0, k1, k2),))
    t = 0.25
    kt = deform_k(karr, t)
    z = 1.4 - 0.2j
    np.testing.assert_allclose(mv_eval(kt.columns[0][1], z),
                               t * mv_eval(k1, z), atol=1e-13)
    np.testing.assert_allclose(mv_eval(kt.columns[0][2], z),
                               t ** 2 * mv_eval(k2, z), atol=1e-13)


def test_deform_k_validates_alternation():
    basis = ((1 + 0j, 0j, 0j, 0j),)
    mixed = vec(1, 1, 0, 0)
    from unitonflow.uniton_array import FZeroArray
    karr = FZeroArray(n=4, r=1, f0_basis=basis, columns=((mixed,),))
    with pytest.raises(AlternationViolation):
        deform_k(karr, 0.5)


def test_k_route_matches_h_route_structurally_for_g27():
    # r=2 alternating grid: both deformation routes give the same echelon
    # array once constant-multiple tails are cleaned
    karr = goldens.g27_f0()
    q, arr = from_f0(karr)
    t = 0.5
    via_h = to_echelon([c.cells for c in deform(arr, t).columns], arr.n, arr.r)
    via_k = from_f0(deform_k(karr, t))[1]
    assert via_h == via_k


def test_flow_family_table_shape_and_order():
    arr = goldens.two_row_array()
    pts = [0.52 + 0.77j, -0.81 + 0.44j]
    t_grid = [0.75, 0.25]
    rows = flow_family(arr, None, t_grid, pts)
    header = flow_table_header(arr.n)
    assert len(header) == 3 + 2 * arr.n ** 2 + 2
    assert len(rows) == len(pts) * len(t_grid)
    assert all(len(r) == len(header) for r in rows)
    ts = [r[0] for r in rows]
    assert ts == sorted(ts)  # canonical ordering: t first, then z


def test_flow_family_matches_direct_evaluation():
    arr = goldens.two_row_array()
    z = 0.52 + 0.77j
    t = 0.5
    rows = flow_family(arr, None, [t], [z])
    phi = evaluate_phi(deform(arr, t), None, z)
    got = np.array(rows[0][3:3 + 2 * arr.n ** 2]).reshape(arr.n, arr.n, 2)
    np.testing.assert_allclose(got[..., 0] + 1j * got[..., 1], phi, atol=1e-10)


def test_r1_flow_is_constant_in_t():
    q, arr = goldens.uniton_one_array()
    z = 0.91 + 0.15j
    base = evaluate_phi(arr, q, z)
    for t in (0.2, 0.6, 1.0):
        np.testing.assert_allclose(evaluate_phi(deform(arr, t), q, z), base,
                                   atol=1e-10)
