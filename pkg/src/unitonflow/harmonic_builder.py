"""Pointwise chain construction and evaluation of the harmonic map.

At a generic sample point z the array determines a chain of subspaces
alpha_1 subset-of-C^n, ..., alpha_r, each spanned by derivative
combinations of the array entries weighted by elementary operators built
from the earlier projector complements.  The map itself is the product
Q (pi_1 - pi_1^perp) ... (pi_r - pi_r^perp), and substituting a spectral
weight lambda on the complements gives the extended solution.
"""

from __future__ import annotations

import numpy as np

from .cxlinalg import identity, orthonormalize_report, projector
from .errors import RankAmbiguous
from .ratfun import ComplexRational  # noqa: F401  (re-exported type context)
from .uniton_array import ConstantLeftFactor, UnitonArray


class ProjectionChain:
    """Frames and cached projectors for the subspace chain at one point."""

    __slots__ = ("point", "frames", "projectors", "complements")

    def __init__(self, point: complex, frames=()):
        self.point = point
        self.frames = tuple(frames)
        self.projectors = tuple(projector(f) for f in self.frames)
        self.complements = tuple(np.eye(f.ambient_dim) - p
                                 for f, p in zip(self.frames, self.projectors))

    @property
    def depth(self) -> int:
        return len(self.frames)

    @property
    def ranks(self) -> tuple[int, ...]:
        return tuple(f.rank for f in self.frames)

    def is_nested(self, tol: float = 1e-9) -> bool:
        """||pi_{i+1} pi_i - pi_i|| small for consecutive steps."""
        return all(
            np.linalg.norm(self.projectors[i + 1] @ self.projectors[i] - self.projectors[i]) < tol
            for i in range(self.depth - 1)
        )


def c_table(projector_complements, n: int) -> list[np.ndarray]:
    """All elementary operators C^i_s for s = 0..i, i = len(complements).

    Row recursion C^i_s = C^{i-1}_s + pi_i^perp C^{i-1}_{s-1}, starting
    from the empty-product row [Id].
    """
    row = [np.eye(n, dtype=complex)]
    for q in projector_complements:
        nxt = [row[0]]
        for s in range(1, len(row) + 1):
            term = q @ row[s - 1]
            if s < len(row):
                term = row[s] + term
            nxt.append(term)
        row = nxt
    return row


def c_elementary(projector_complements, s: int) -> np.ndarray:
    """C^i_s from pi_1^perp..pi_i^perp; the complements must be nonempty."""
    i = len(projector_complements)
    if not 0 <= s <= i:
        raise IndexError(f"C^{i}_{s} undefined: s must lie in 0..{i}")
    if i == 0:
        raise IndexError("need at least one complement to fix the dimension")
    n = projector_complements[0].shape[0]
    return c_table(projector_complements, n)[s]


def alpha_span_vectors(arr: UnitonArray, i: int, z: complex,
                       chain_so_far: ProjectionChain) -> list[np.ndarray]:
    """Candidate spanning vectors for the (i+1)-th subspace at z.

    For each derivative order k = 0..i and column j the vector is
    sum_{s=k..i} C^i_s H^(k)_{s-k,j}(z); zero vectors are allowed and
    dropped later by orthonormalization.
    """
    grids = [arr.eval_grid(z, k) for k in range(i + 1)]
    table = c_table(chain_so_far.complements[:i], arr.n)
    out = []
    for k in range(i + 1):
        for j in range(arr.J):
            acc = np.zeros(arr.n, dtype=complex)
            for s in range(k, i + 1):
                acc += table[s] @ grids[k][s - k, j]
            out.append(acc)
    return out


def build_chain(arr: UnitonArray, z: complex, tol: float = 1e-9) -> ProjectionChain:
    """Chain alpha_1..alpha_r at z; raises RankAmbiguous on borderline rank."""
    frames = []
    chain = ProjectionChain(z)
    for i in range(arr.r):
        cand = alpha_span_vectors(arr, i, z, chain)
        frame, borderline = orthonormalize_report(cand, tol=tol, ambient_dim=arr.n)
        if borderline:
            raise RankAmbiguous(i + 1, borderline)
        frames.append(frame)
        chain = ProjectionChain(z, frames)
    return chain


def _left_factor_matrix(q, n: int) -> np.ndarray:
    if q is None:
        return identity(n)
    if isinstance(q, ConstantLeftFactor):
        return q.matrix
    return np.asarray(q, dtype=complex)


def phi_from_chain(chain: ProjectionChain, q, n: int) -> np.ndarray:
    phi = _left_factor_matrix(q, n)
    for p, pc in zip(chain.projectors, chain.complements):
        phi = phi @ (p - pc)
    return phi


def evaluate_phi(arr: UnitonArray, q, z: complex) -> np.ndarray:
    """phi(z) = Q (pi_1 - pi_1^perp) ... (pi_r - pi_r^perp)."""
    return phi_from_chain(build_chain(arr, z), q, arr.n)


class LaurentMatrix:
    """Matrix-valued finite Laurent series in the spectral parameter."""

    PRUNE = 1e-14

    __slots__ = ("n", "coeffs")

    def __init__(self, n: int, coeffs: dict):
        self.n = n
        self.coeffs = {k: np.asarray(m, dtype=complex) for k, m in coeffs.items()
                       if np.linalg.norm(m) >= self.PRUNE}

    @classmethod
    def identity(cls, n: int) -> "LaurentMatrix":
        return cls(n, {0: np.eye(n, dtype=complex)})

    @property
    def support(self) -> tuple[int, ...]:
        return tuple(sorted(self.coeffs))

    def coeff(self, k: int) -> np.ndarray:
        return self.coeffs.get(k, np.zeros((self.n, self.n), dtype=complex))

    def __matmul__(self, other: "LaurentMatrix") -> "LaurentMatrix":
        acc: dict[int, np.ndarray] = {}
        for ka, ma in self.coeffs.items():
            for kb, mb in other.coeffs.items():
                k = ka + kb
                prod = ma @ mb
                if k in acc:
                    acc[k] = acc[k] + prod
                else:
                    acc[k] = prod
        return LaurentMatrix(self.n, acc)

    def scale(self, c: complex) -> "LaurentMatrix":
        return LaurentMatrix(self.n, {k: c * m for k, m in self.coeffs.items()})

    def eval(self, lam: complex) -> np.ndarray:
        acc = np.zeros((self.n, self.n), dtype=complex)
        for k, m in self.coeffs.items():
            acc += (lam ** k) * m
        return acc

    def __call__(self, lam: complex) -> np.ndarray:
        return self.eval(lam)

    def negative_part_norm(self) -> float:
        """Largest Frobenius norm among coefficients of negative exponents."""
        return max((float(np.linalg.norm(m)) for k, m in self.coeffs.items() if k < 0),
                   default=0.0)

    def __repr__(self):
        return f"LaurentMatrix(n={self.n}, support={self.support})"


def extended_from_chain(chain: ProjectionChain, n: int) -> LaurentMatrix:
    """Product of the factors pi_i + lambda pi_i^perp along the chain."""
    phi = LaurentMatrix.identity(n)
    for p, pc in zip(chain.projectors, chain.complements):
        phi = phi @ LaurentMatrix(n, {0: p, 1: pc})
    return phi


def extended_solution(arr: UnitonArray, z: complex) -> LaurentMatrix:
    """Extended solution at z: polynomial in lambda of degree <= r, Id at lambda=1."""
    return extended_from_chain(build_chain(arr, z), arr.n)


def laurent_from_samples(fn, lo: int, hi: int, n: int) -> LaurentMatrix:
    """Coefficient extraction by DFT at hi-lo+1 roots of unity.

    Exact when fn is a Laurent polynomial supported inside [lo, hi].
    """
    count = hi - lo + 1
    pts = [np.exp(2j * np.pi * m / count) for m in range(count)]
    vals = [np.asarray(fn(lam), dtype=complex) for lam in pts]
    coeffs = {}
    for k in range(lo, hi + 1):
        acc = np.zeros_like(vals[0])
        for lam, v in zip(pts, vals):
            acc += v * lam ** (-k)
        coeffs[k] = acc / count
    return LaurentMatrix(n, coeffs)
