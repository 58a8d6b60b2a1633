"""Seeded random inputs: annulus sample points, random echelon arrays,
random alternating arrays, and vector families.

Every draw flows from a single numpy Generator so a fixed seed pins the
whole run.  Sample points live in the annulus 0.3 <= |z| <= 3 (uniform
in area) and keep clear of the pole set plus the finite-difference
stencil radius.
"""

from __future__ import annotations

import cmath
import math

import numpy as np

from .errors import ResampleNeeded
from .harmonic_builder import build_chain
from .lemma_oracles import VFamily
from .ratfun import ComplexRational, ZERO
from .uniton_array import (ArrayColumn, FZeroArray, MeroVector, UnitonArray,
                           from_f0, mv_is_zero, mv_zero, validate, validate_f0)

RADIUS_RANGE = (0.3, 3.0)
CLEARANCE = 0.12  # pole guard; covers the nested h=1e-3 stencil with margin


def annulus_point(rng: np.random.Generator, poles=(), clearance: float = CLEARANCE) -> complex:
    lo2, hi2 = RADIUS_RANGE[0] ** 2, RADIUS_RANGE[1] ** 2
    for _ in range(2000):
        rad = math.sqrt(rng.uniform(lo2, hi2))
        z = rad * cmath.exp(1j * rng.uniform(0.0, 2.0 * math.pi))
        if all(abs(z - p) >= clearance for p in poles):
            return z
    raise RuntimeError("annulus sampler could not clear the pole set")


def generic_points(rng: np.random.Generator, arr: UnitonArray, count: int,
                   clearance: float = CLEARANCE) -> list[complex]:
    """Sample points where the projector chain of arr is well defined."""
    pts: list[complex] = []
    budget = 200 * count + 50
    poles = arr.pole_locations
    while len(pts) < count:
        budget -= 1
        if budget < 0:
            raise RuntimeError("could not find enough generic sample points")
        z = annulus_point(rng, poles, clearance)
        try:
            build_chain(arr, z)
        except ResampleNeeded:
            continue
        pts.append(z)
    return pts


def _random_poly(rng: np.random.Generator, deg_max: int = 2) -> tuple[complex, ...]:
    deg = int(rng.integers(0, deg_max + 1))
    re = rng.integers(-3, 4, size=deg + 1)
    im = rng.integers(-3, 4, size=deg + 1)
    coeffs = tuple(complex(int(a), int(b)) for a, b in zip(re, im))
    if all(c == 0 for c in coeffs):
        coeffs = (1 + 0j,) + coeffs[1:]
    return coeffs


def random_rational(rng: np.random.Generator, pole_pool=(), deg_max: int = 2) -> ComplexRational:
    num = _random_poly(rng, deg_max)
    if pole_pool and rng.uniform() < 0.25:
        a = pole_pool[int(rng.integers(0, len(pole_pool)))]
        return ComplexRational(num, (-a, 1 + 0j))
    return ComplexRational(num)


def random_mero_vector(rng: np.random.Generator, n: int, pole_pool=(),
                       sparsity: float = 0.35) -> MeroVector:
    """Random rational vector; a sparsity fraction of components stay zero."""
    comps = []
    for _ in range(n):
        if rng.uniform() < sparsity:
            comps.append(ZERO)
        else:
            comps.append(random_rational(rng, pole_pool))
    v = tuple(comps)
    if mv_is_zero(v):
        idx = int(rng.integers(0, n))
        v = v[:idx] + (random_rational(rng, pole_pool),) + v[idx + 1:]
    return v


def _probe_chain(rng: np.random.Generator, arr: UnitonArray, tries: int = 2) -> bool:
    try:
        for _ in range(tries):
            build_chain(arr, annulus_point(rng, arr.pole_locations))
    except (ResampleNeeded, RuntimeError):
        return False
    return True


def random_echelon_array(rng: np.random.Generator, n_max: int = 6,
                         r_max: int = 3) -> UnitonArray:
    for _ in range(60):
        n = int(rng.integers(3, n_max + 1))
        r = int(rng.integers(1, min(r_max, n - 1) + 1))
        j_count = int(rng.integers(1, min(3, n - 1) + 1))
        leads = [0] + sorted(int(rng.integers(0, r)) for _ in range(j_count - 1))
        pole_pool = tuple(annulus_point(rng) for _ in range(2))
        cols = []
        for k in leads:
            cells = [mv_zero(n)] * k
            cells.append(random_mero_vector(rng, n, pole_pool))
            for _ in range(k + 1, r):
                if rng.uniform() < 0.65:
                    cells.append(random_mero_vector(rng, n, pole_pool))
                else:
                    cells.append(mv_zero(n))
            cols.append(ArrayColumn(lead_row=k, cells=tuple(cells)))
        arr = UnitonArray(n=n, r=r, columns=tuple(cols))
        if validate(arr):
            continue
        if _probe_chain(rng, arr):
            return arr
    raise RuntimeError("random echelon array generation kept failing validation")


def _subspace_vector(rng: np.random.Generator, n: int, support, pole_pool) -> MeroVector:
    """Random rational vector supported on the given coordinate set."""
    comps = [ZERO] * n
    placed = False
    for p in support:
        if rng.uniform() < 0.7:
            comps[p] = random_rational(rng, pole_pool)
            placed = True
    if not placed:
        comps[support[int(rng.integers(0, len(support)))]] = random_rational(rng, pole_pool)
    return tuple(comps)


def random_f0_array(rng: np.random.Generator, n_max: int = 7,
                    r_max: int = 3) -> FZeroArray:
    """Random alternating array over a coordinate subspace F0.

    Coordinate subspaces keep the alternation exact in floating point;
    the derived echelon array and its flow are as generic as any.
    """
    for _ in range(60):
        n = int(rng.integers(4, n_max + 1))
        r = int(rng.integers(1, min(r_max, n - 1) + 1))
        f_dim = int(rng.integers(1, n))
        perm = [int(p) for p in rng.permutation(n)]
        inside = sorted(perm[:f_dim])
        outside = sorted(perm[f_dim:])
        basis = tuple(tuple(1 + 0j if p == s else 0j for p in range(n)) for s in inside)
        pole_pool = tuple(annulus_point(rng) for _ in range(2))
        j_count = int(rng.integers(1, min(3, n - 1) + 1))
        leads = [0] + sorted(int(rng.integers(0, r)) for _ in range(j_count - 1))
        cols = []
        for k in leads:
            parity = int(rng.integers(0, 2))
            cells = [mv_zero(n)] * k
            for i in range(k, r):
                support = inside if (i + parity) % 2 == 0 else outside
                if not support:
                    cells.append(mv_zero(n))
                elif i == k or rng.uniform() < 0.7:
                    cells.append(_subspace_vector(rng, n, support, pole_pool))
                else:
                    cells.append(mv_zero(n))
            cols.append(tuple(cells))
        karr = FZeroArray(n=n, r=r, f0_basis=basis, columns=tuple(cols))
        if validate_f0(karr):
            continue
        try:
            _, arr = from_f0(karr)
        except ValueError:
            continue
        if arr.J == 0 or validate(arr):
            continue
        if _probe_chain(rng, arr):
            return karr
    raise RuntimeError("random alternating array generation kept failing validation")


def random_vfamily(rng: np.random.Generator, n: int, length: int, m: int = 0) -> VFamily:
    vecs = tuple(rng.standard_normal(n) + 1j * rng.standard_normal(n)
                 for _ in range(length))
    return VFamily(m, vecs)


def random_unitary(rng: np.random.Generator, n: int) -> np.ndarray:
    g = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    q, upper = np.linalg.qr(g)
    return q * (np.diag(upper) / np.abs(np.diag(upper)))


def random_reflection(rng: np.random.Generator, n: int) -> np.ndarray:
    """pi_W - pi_W^perp for a random subspace W; unitary and involutive."""
    dim = int(rng.integers(1, n))
    g = rng.standard_normal((n, dim)) + 1j * rng.standard_normal((n, dim))
    q, _ = np.linalg.qr(g)
    p = q @ q.conj().T
    return 2.0 * p - np.eye(n)
