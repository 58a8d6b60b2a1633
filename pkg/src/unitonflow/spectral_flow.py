"""One-parameter deformation of echelon arrays along the energy flow.

Each column with lead row k is replaced by binomial combinations
H_i(t) = sum_{s=k..i} C(i,s) t^(s-k) (t-1)^(i-s) H_s, t in (0,1].
At t=1 nothing moves; the t->0 endpoint has the closed form
(-1)^(i-k) C(i,k) H_k, an array equivalent to a diagonal one.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import AlternationViolation, NotEchelon
from .uniton_array import (ArrayColumn, FZeroArray, UnitonArray, mv_combine,
                           mv_is_zero, mv_scale, mv_zero, validate_f0)


def _require_echelon(arr: UnitonArray) -> None:
    prev = 0
    for j, col in enumerate(arr.columns):
        for i in range(col.lead_row):
            if not mv_is_zero(col.cells[i]):
                raise NotEchelon(f"column {j}: nonzero entry above lead row {col.lead_row}")
        if mv_is_zero(col.cells[col.lead_row]):
            raise NotEchelon(f"column {j}: zero lead entry at row {col.lead_row}")
        if col.lead_row < prev:
            raise NotEchelon(f"column {j}: lead rows not nondecreasing")
        prev = col.lead_row


def _require_flow_param(t: float) -> None:
    if not 0 < t <= 1:
        raise ValueError(f"flow parameter t={t} outside (0, 1]")


def deform(arr: UnitonArray, t: float) -> UnitonArray:
    """Array of the flow at time t; equals arr structurally at t=1."""
    _require_echelon(arr)
    _require_flow_param(t)
    cols = []
    for col in arr.columns:
        k = col.lead_row
        cells = list(col.cells[:k])
        for i in range(k, arr.r):
            terms = [(math.comb(i, s) * t ** (s - k) * (t - 1.0) ** (i - s), col.cells[s])
                     for s in range(k, i + 1)]
            cells.append(mv_combine(terms))
        cols.append(ArrayColumn(lead_row=k, cells=tuple(cells)))
    return UnitonArray(n=arr.n, r=arr.r, columns=tuple(cols))


def limit_array(arr: UnitonArray) -> UnitonArray:
    """Endpoint of the flow: below-lead entries become signed binomial
    multiples of the lead entry, so the result is diagonal-equivalent."""
    _require_echelon(arr)
    cols = []
    for col in arr.columns:
        k = col.lead_row
        cells = list(col.cells[:k]) + [col.cells[k]]
        for i in range(k + 1, arr.r):
            cells.append(mv_scale(col.cells[k], complex((-1) ** (i - k) * math.comb(i, k))))
        cols.append(ArrayColumn(lead_row=k, cells=tuple(cells)))
    return UnitonArray(n=arr.n, r=arr.r, columns=tuple(cols))


def deform_k(karr: FZeroArray, t: float) -> FZeroArray:
    """Alternating-grid version of the flow: scale row i of a column with
    lead row k by t^(i-k)."""
    _require_flow_param(t)
    bad = validate_f0(karr)
    if bad:
        raise AlternationViolation("; ".join(bad))
    cols = []
    for j, col in enumerate(karr.columns):
        k = karr.column_lead_row(j)
        if k is None or t == 1:
            cols.append(col)
            continue
        cells = []
        for i, cell in enumerate(col):
            if i <= k or mv_is_zero(cell):
                cells.append(cell)
            else:
                cells.append(mv_scale(cell, complex(t ** (i - k))))
        cols.append(tuple(cells))
    return FZeroArray(n=karr.n, r=karr.r, f0_basis=karr.f0_basis, columns=tuple(cols))


def flow_table_header(n: int) -> list[str]:
    cols = ["t", "z_re", "z_im"]
    for a in range(n):
        for b in range(n):
            cols += [f"phi_{a}{b}_re", f"phi_{a}{b}_im"]
    cols += ["unitarity_residual", "harmonicity_residual"]
    return cols


def flow_family(arr: UnitonArray, q, t_grid, z_samples, h: float = 1e-3) -> list[list[float]]:
    """Map values phi_t(z) over the (t, z) grid, one plot-ready row each.

    Rows are sorted by t, then by z, regardless of evaluation order.
    """
    from .verifier import harmonicity_residual  # deferred: verifier imports deform
    from .harmonic_builder import evaluate_phi

    rows = []
    for t in sorted(t_grid):
        arr_t = deform(arr, t)
        for z in sorted(z_samples, key=lambda w: (w.real, w.imag)):
            phi = evaluate_phi(arr_t, q, z)
            unit = float(np.linalg.norm(phi @ phi.conj().T - np.eye(arr.n)))
            harm = harmonicity_residual(arr_t, q, z, h).residual
            row = [float(t), float(z.real), float(z.imag)]
            for a in range(arr.n):
                for b in range(arr.n):
                    row += [float(phi[a, b].real), float(phi[a, b].imag)]
            row += [unit, harm]
            rows.append(row)
    return rows
