"""Meromorphic uniton arrays: validation, echelon reduction, diagonal detection.

An array is a grid of C^n-valued rational functions, stored column-wise.
Columns are grouped by lead row (first nonzero entry); the group sizes
give the breakpoints d_1 <= ... <= d_r that the span construction and
the flow deformation both consume.

Echelon reduction works over the field C(z) with exact rational
arithmetic: invertible column operations, dropping of zero columns, and
removal of below-lead entries that are constant multiples of the lead
entry.  The last step goes beyond column operations but preserves the
harmonic map the array determines, because those multiples contribute
nothing to any span in the chain construction (each contribution lands
in a subspace an earlier projector complement kills).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .cxlinalg import Frame, orthonormalize, projector
from .errors import AlternationViolation, PoleAtPoint
from .ratfun import ComplexRational

MeroVector = tuple[ComplexRational, ...]

_RZERO = ComplexRational.zero()


# -- MeroVector helpers -------------------------------------------------


def mv_zero(n: int) -> MeroVector:
    return (_RZERO,) * n


def mv_from_rationals(components) -> MeroVector:
    return tuple(components)


def mv_is_zero(v: MeroVector) -> bool:
    return all(c.is_zero() for c in v)


def mv_add(v: MeroVector, w: MeroVector) -> MeroVector:
    return tuple(a + b for a, b in zip(v, w))


def mv_sub(v: MeroVector, w: MeroVector) -> MeroVector:
    return tuple(a - b for a, b in zip(v, w))


def mv_scale(v: MeroVector, c) -> MeroVector:
    return tuple(a * c for a in v)


def mv_combine(terms) -> MeroVector:
    """Sum of coeff*vector terms; skips zero coefficients and returns the
    sole vector unchanged when the combination is 1.0*v (so deformation
    at t=1 reproduces the input structurally, not just numerically)."""
    live = [(c, v) for c, v in terms if c != 0]
    if not live:
        first_v = next(iter(terms))[1]
        return mv_zero(len(first_v))
    if len(live) == 1 and live[0][0] == 1:
        return live[0][1]
    acc = mv_scale(live[0][1], live[0][0])
    for c, v in live[1:]:
        acc = mv_add(acc, mv_scale(v, c))
    return acc


def mv_derivative(v: MeroVector) -> MeroVector:
    return tuple(c.derivative() for c in v)


def mv_eval(v: MeroVector, z: complex, pole_tol: float = 1e-8) -> np.ndarray:
    return np.array([c.eval(z, pole_tol) for c in v], dtype=complex)


def mv_constant_ratio(v: MeroVector, lead: MeroVector):
    """Constant c with v = c*lead, or None.

    Only genuine complex constants count; z-dependent ratios are not the
    pattern the diagonal-equivalence argument covers.
    """
    pivot = next((k for k, c in enumerate(lead) if not c.is_zero()), None)
    if pivot is None:
        return None
    if v[pivot].is_zero():
        ratio = 0j
    else:
        q = v[pivot] / lead[pivot]
        if not q.is_constant():
            return None
        ratio = q.constant_value()
    for a, b in zip(v, lead):
        if not (a - b * ratio).is_zero():
            return None
    return ratio


def mv_to_json(v: MeroVector) -> list:
    return [c.to_json() for c in v]


def mv_from_json(obj) -> MeroVector:
    return tuple(ComplexRational.from_json(c) for c in obj)


# -- array types --------------------------------------------------------


@dataclass(frozen=True)
class ArrayColumn:
    lead_row: int
    cells: tuple[MeroVector, ...]


@dataclass(frozen=True)
class UnitonArray:
    """Echelon array of C^n-valued rational functions, columns grouped by lead row."""

    n: int
    r: int
    columns: tuple[ArrayColumn, ...]

    @property
    def J(self) -> int:
        return len(self.columns)

    @cached_property
    def breakpoints(self) -> tuple[int, ...]:
        """d_1 <= ... <= d_r; d_k counts columns with lead row below k."""
        return tuple(sum(1 for c in self.columns if c.lead_row < k)
                     for k in range(1, self.r + 1))

    @property
    def entries(self) -> tuple[tuple[MeroVector, ...], ...]:
        """Row-major grid view, entries[i][j]."""
        return tuple(tuple(col.cells[i] for col in self.columns)
                     for i in range(self.r))

    def entry(self, i: int, j: int) -> MeroVector:
        return self.columns[j].cells[i]

    def derivative_grid(self, k: int) -> tuple[tuple[MeroVector, ...], ...]:
        """Column-major grid of k-th derivatives, cached per order."""
        cache = self.__dict__.setdefault("_deriv_cache", {})
        if k not in cache:
            if k == 0:
                cache[0] = tuple(col.cells for col in self.columns)
            else:
                prev = self.derivative_grid(k - 1)
                cache[k] = tuple(tuple(mv_derivative(cell) for cell in col) for col in prev)
        return cache[k]

    def _compiled(self, k: int):
        """Padded coefficient tensors for vectorized Horner at one point."""
        cache = self.__dict__.setdefault("_compiled_cache", {})
        if k not in cache:
            grid = self.derivative_grid(k)
            J, r, n = self.J, self.r, self.n
            dn = max((len(c.num) for col in grid for cell in col for c in cell), default=1)
            dd = max((len(c.den) for col in grid for cell in col for c in cell), default=1)
            num = np.zeros((J, r, n, max(dn, 1)), dtype=complex)
            den = np.zeros((J, r, n, max(dd, 1)), dtype=complex)
            den[..., 0] = 1.0
            for j, col in enumerate(grid):
                for i, cell in enumerate(col):
                    for p, c in enumerate(cell):
                        if c.num:
                            num[j, i, p, :len(c.num)] = c.num
                        den[j, i, p, :len(c.den)] = c.den
            cache[k] = (num, den)
        return cache[k]

    def eval_grid(self, z: complex, k: int = 0, pole_tol: float = 1e-8) -> np.ndarray:
        """All k-th derivative entries at z, shape (r, J, n).

        Raises PoleAtPoint if any denominator is tiny at z.
        """
        num, den = self._compiled(k)
        nv = num[..., -1].copy()
        for idx in range(num.shape[-1] - 2, -1, -1):
            nv = nv * z + num[..., idx]
        dv = den[..., -1].copy()
        for idx in range(den.shape[-1] - 2, -1, -1):
            dv = dv * z + den[..., idx]
        if np.any(np.abs(dv) < pole_tol):
            raise PoleAtPoint(z)
        return np.transpose(nv / dv, (1, 0, 2))

    @cached_property
    def pole_locations(self) -> tuple[complex, ...]:
        """Roots of all cell denominators (degree 0 dens contribute none)."""
        roots: list[complex] = []
        for col in self.columns:
            for cell in col.cells:
                for c in cell:
                    if len(c.den) > 1:
                        roots.extend(np.roots(list(reversed(c.den))).tolist())
        return tuple(roots)


@dataclass(frozen=True)
class ConstantLeftFactor:
    """Constant unitary pre-factor for the harmonic map."""

    matrix: np.ndarray

    def __post_init__(self):
        q = np.asarray(self.matrix, dtype=complex)
        object.__setattr__(self, "matrix", q)
        n = q.shape[0]
        if q.shape != (n, n) or np.linalg.norm(q @ q.conj().T - np.eye(n)) >= 1e-10:
            raise ValueError("left factor must be unitary")


@dataclass(frozen=True)
class FZeroArray:
    """r x n grid whose columns alternate between a fixed subspace and its complement."""

    n: int
    r: int
    f0_basis: tuple[tuple[complex, ...], ...]
    columns: tuple[tuple[MeroVector, ...], ...]  # each column: r cells

    @cached_property
    def f0_frame(self) -> Frame:
        return orthonormalize([np.array(v, dtype=complex) for v in self.f0_basis],
                              ambient_dim=self.n)

    @cached_property
    def f0_projector(self) -> np.ndarray:
        return projector(self.f0_frame)

    def column_lead_row(self, j: int):
        for i, cell in enumerate(self.columns[j]):
            if not mv_is_zero(cell):
                return i
        return None


# -- validation ----------------------------------------------------------


def _project_cell(p: np.ndarray, cell: MeroVector) -> MeroVector:
    """Constant matrix applied to a rational vector, componentwise combos."""
    out = []
    for row in p:
        acc = _RZERO
        for coeff, comp in zip(row, cell):
            if coeff != 0 and not comp.is_zero():
                acc = acc + comp * complex(coeff)
        out.append(acc)
    return tuple(out)


_PROBE_POINTS = (0.73 + 0.41j, -1.13 + 0.87j, 0.35 - 1.21j, 1.62 + 0.29j, -0.52 - 1.73j)


def validate(arr: UnitonArray) -> list[str]:
    """Invariant check; returns human-readable violations (empty = valid)."""
    out: list[str] = []
    if not (0 <= arr.r <= arr.n - 1):
        out.append(f"uniton number r={arr.r} outside [0, n-1] for n={arr.n}")
    if arr.J > arr.n:
        out.append(f"column count {arr.J} exceeds ambient dimension {arr.n}")
    prev_lead = 0
    for j, col in enumerate(arr.columns):
        if len(col.cells) != arr.r:
            out.append(f"column {j} has {len(col.cells)} rows, expected {arr.r}")
            continue
        if not (0 <= col.lead_row < arr.r):
            out.append(f"column {j} lead row {col.lead_row} out of range")
            continue
        for i in range(col.lead_row):
            if not mv_is_zero(col.cells[i]):
                out.append(f"echelon violation at row {i}, column {j}: nonzero above lead row")
        if mv_is_zero(col.cells[col.lead_row]):
            out.append(f"column {j} lead entry (row {col.lead_row}) is zero")
        if any(len(c) != arr.n for c in col.cells):
            out.append(f"column {j} has a cell of wrong ambient dimension")
        if col.lead_row < prev_lead:
            out.append(f"column {j} lead row {col.lead_row} breaks nondecreasing order")
        prev_lead = max(prev_lead, col.lead_row)
    if out:
        return out
    for k in range(arr.r):
        group = [j for j, col in enumerate(arr.columns) if col.lead_row == k]
        if len(group) <= 1:
            continue
        ok = False
        for z in _PROBE_POINTS:
            try:
                vecs = [mv_eval(arr.columns[j].cells[k], z) for j in group]
            except PoleAtPoint:
                continue
            if orthonormalize(vecs, ambient_dim=arr.n).rank == len(group):
                ok = True
                break
        if not ok:
            out.append(f"row {k} entries of columns {group} look linearly dependent over C(z)")
    return out


# -- echelon reduction -----------------------------------------------------


def _lead_row(cells) -> int | None:
    for i, cell in enumerate(cells):
        if not mv_is_zero(cell):
            return i
    return None


def to_echelon(raw_columns, n: int, r: int) -> UnitonArray:
    """Echelon form via exact column reduction over C(z).

    Scans columns left to right; within each lead-row group, eliminates
    with the earliest accepted column whose pivot component matches (ties
    broken by column order), so output is deterministic.  Zero columns
    are dropped.  Finally, below-lead entries that are constant multiples
    of their column's lead entry are removed (they never contribute to a
    span in the chain construction).
    """
    accepted: list[list[MeroVector]] = []
    acc_lead: list[int] = []
    acc_pivot: list[int] = []
    for col in raw_columns:
        cells = [mv_from_rationals(c) for c in col]
        if len(cells) != r:
            raise ValueError(f"column with {len(cells)} rows, expected {r}")
        while True:
            k = _lead_row(cells)
            if k is None:
                break
            for a_cells, a_lead, a_piv in zip(accepted, acc_lead, acc_pivot):
                if a_lead != k:
                    continue
                factor = cells[k][a_piv] / a_cells[k][a_piv]
                if factor.is_zero():
                    continue
                for i in range(k, r):
                    cells[i] = mv_sub(cells[i], mv_scale(a_cells[i], factor))
            if not mv_is_zero(cells[k]):
                pivot = next(p for p, c in enumerate(cells[k]) if not c.is_zero())
                accepted.append(cells)
                acc_lead.append(k)
                acc_pivot.append(pivot)
                break
            # lead entry eliminated: the column now starts deeper, reprocess
    order = sorted(range(len(accepted)), key=lambda idx: (acc_lead[idx], idx))
    cols = []
    for idx in order:
        cells, k = accepted[idx], acc_lead[idx]
        cleaned = list(cells)
        for i in range(k + 1, r):
            if mv_is_zero(cleaned[i]):
                continue
            if mv_constant_ratio(cleaned[i], cleaned[k]) is not None:
                cleaned[i] = mv_zero(n)
        cols.append(ArrayColumn(lead_row=k, cells=tuple(cleaned)))
    return UnitonArray(n=n, r=r, columns=tuple(cols))


def is_diagonal(arr: UnitonArray) -> bool:
    """True when the array is (equivalent to) one with only lead entries."""
    e = to_echelon([col.cells for col in arr.columns], arr.n, arr.r)
    return all(mv_is_zero(col.cells[i])
               for col in e.columns
               for i in range(arr.r) if i != col.lead_row)


# -- F0 arrays -------------------------------------------------------------


def validate_f0(karr: FZeroArray) -> list[str]:
    """Alternation check: each column sticks to one of the two parity patterns."""
    out: list[str] = []
    p = karr.f0_projector
    p_perp = np.eye(karr.n) - p
    for j, col in enumerate(karr.columns):
        if len(col) != karr.r:
            out.append(f"column {j} has {len(col)} rows, expected {karr.r}")
            continue
        patt_a = all(mv_is_zero(_project_cell(p_perp if i % 2 == 0 else p, cell))
                     for i, cell in enumerate(col))
        patt_b = all(mv_is_zero(_project_cell(p if i % 2 == 0 else p_perp, cell))
                     for i, cell in enumerate(col))
        if not (patt_a or patt_b):
            out.append(f"column {j} does not alternate between the subspace and its complement")
    return out


def from_f0(karr: FZeroArray):
    """Left factor and echelon array derived from an alternating grid.

    Row 0 copies over; row i >= 1 is the signed binomial combination
    sum_{s=1..i} (-1)^(s+i) C(i-1, s-1) K_s of the column's entries.
    """
    bad = validate_f0(karr)
    if bad:
        raise AlternationViolation("; ".join(bad))
    q = 2.0 * karr.f0_projector - np.eye(karr.n)
    raw = []
    for col in karr.columns:
        cells = [col[0]]
        for i in range(1, karr.r):
            terms = [(((-1) ** (s + i)) * math.comb(i - 1, s - 1), col[s])
                     for s in range(1, i + 1)]
            cells.append(mv_combine(terms))
        raw.append(cells)
    arr = to_echelon(raw, karr.n, karr.r)
    return ConstantLeftFactor(q), arr


# -- JSON ------------------------------------------------------------------


def _matrix_to_json(m: np.ndarray) -> list:
    return [[[c.real, c.imag] for c in row] for row in np.asarray(m, dtype=complex)]


def _matrix_from_json(obj) -> np.ndarray:
    return np.array([[complex(re, im) for re, im in row] for row in obj], dtype=complex)


def array_to_json(arr: UnitonArray, left_factor=None, f0_basis=None) -> dict:
    obj = {
        "n": arr.n,
        "r": arr.r,
        "columns": [
            {"lead_row": col.lead_row, "rows": [mv_to_json(cell) for cell in col.cells]}
            for col in arr.columns
        ],
    }
    if left_factor is not None:
        m = left_factor.matrix if isinstance(left_factor, ConstantLeftFactor) else left_factor
        obj["left_factor"] = _matrix_to_json(m)
    if f0_basis is not None:
        obj["f0_basis"] = [[[c.real, c.imag] for c in map(complex, v)] for v in f0_basis]
    return obj


def array_from_json(obj) -> tuple[UnitonArray, np.ndarray | None]:
    n, r = int(obj["n"]), int(obj["r"])
    cols = []
    for col in obj["columns"]:
        cells = tuple(mv_from_json(cell) for cell in col["rows"])
        cols.append(ArrayColumn(lead_row=int(col["lead_row"]), cells=cells))
    arr = UnitonArray(n=n, r=r, columns=tuple(cols))
    q = _matrix_from_json(obj["left_factor"]) if obj.get("left_factor") else None
    return arr, q


def fzero_to_json(karr: FZeroArray) -> dict:
    return {
        "n": karr.n,
        "r": karr.r,
        "f0_basis": [[[c.real, c.imag] for c in map(complex, v)] for v in karr.f0_basis],
        "columns": [
            {"lead_row": karr.column_lead_row(j) or 0,
             "rows": [mv_to_json(cell) for cell in col]}
            for j, col in enumerate(karr.columns)
        ],
    }


def fzero_from_json(obj) -> FZeroArray:
    basis = tuple(tuple(complex(re, im) for re, im in v) for v in obj["f0_basis"])
    cols = tuple(tuple(mv_from_json(cell) for cell in col["rows"]) for col in obj["columns"])
    return FZeroArray(n=int(obj["n"]), r=int(obj["r"]), f0_basis=basis, columns=cols)
