"""Dense complex linear algebra: frames, projectors, small matrix helpers.

Matrices are numpy arrays of complex128 (the CMatrix of this package);
numpy supplies the elementwise kernels while this module owns the
rank-revealing orthonormalization and the projector construction, which
carry the numerical policy (tolerances, tie-band reporting) everything
downstream relies on.

Subspaces are always compared through their projectors (Frobenius
distance); frames are basis-dependent and never compared vectorwise.
"""

from __future__ import annotations

import numpy as np

from .errors import DimensionMismatch

# Default rank tolerance. The constructions downstream are valid away
# from a discrete set of points, near which rank is genuinely ambiguous;
# residuals falling in [tol, 100*tol] are reported so callers can resample.
RANK_TOL = 1e-9
AMBIGUITY_BAND = 100.0

CMatrix = np.ndarray


class Frame:
    """Ordered orthonormal vectors in C^n (possibly none).

    vectors are stored as the columns of .matrix, shape (n, rank).
    """

    __slots__ = ("ambient_dim", "matrix")

    def __init__(self, ambient_dim: int, vectors=()):
        self.ambient_dim = int(ambient_dim)
        cols = [np.asarray(v, dtype=complex).reshape(-1) for v in vectors]
        for v in cols:
            if v.shape != (self.ambient_dim,):
                raise DimensionMismatch(
                    f"frame vector of length {v.shape[0]} in ambient dimension {self.ambient_dim}")
        if cols:
            self.matrix = np.column_stack(cols)
        else:
            self.matrix = np.zeros((self.ambient_dim, 0), dtype=complex)

    @property
    def rank(self) -> int:
        return self.matrix.shape[1]

    @property
    def vectors(self) -> list[np.ndarray]:
        return [self.matrix[:, k].copy() for k in range(self.rank)]

    @property
    def gram(self) -> np.ndarray:
        return self.matrix.conj().T @ self.matrix

    def __repr__(self):
        return f"Frame(n={self.ambient_dim}, rank={self.rank})"


def orthonormalize_report(spanning, tol: float = RANK_TOL, ambient_dim: int | None = None):
    """Modified Gram-Schmidt with one re-orthogonalization pass.

    Returns (frame, borderline) where borderline lists the normalized
    residuals of accepted candidates that fell inside the ambiguity band
    [tol, 100*tol); an empty list means the rank decision was clean.

    A candidate is discarded when its residual after projection onto the
    previously accepted vectors is below tol*(1+|candidate|).
    """
    vecs = [np.asarray(v, dtype=complex).reshape(-1) for v in spanning]
    if ambient_dim is None:
        if not vecs:
            raise DimensionMismatch("empty spanning set with no ambient dimension given")
        ambient_dim = vecs[0].shape[0]
    accepted: list[np.ndarray] = []
    borderline: list[float] = []
    for v in vecs:
        if v.shape != (ambient_dim,):
            raise DimensionMismatch(
                f"vector of length {v.shape[0]} in ambient dimension {ambient_dim}")
        w = v.copy()
        for q in accepted:
            w -= (q.conj() @ w) * q
        # second pass guards against cancellation in nearly dependent sets
        for q in accepted:
            w -= (q.conj() @ w) * q
        res = float(np.linalg.norm(w))
        cut = tol * (1.0 + float(np.linalg.norm(v)))
        if res < cut:
            continue
        ratio = res / (1.0 + float(np.linalg.norm(v)))
        if ratio < AMBIGUITY_BAND * tol:
            borderline.append(ratio)
        accepted.append(w / res)
    frame = Frame(ambient_dim)
    if accepted:
        frame.matrix = np.column_stack(accepted)
    return frame, borderline


def orthonormalize(spanning, tol: float = RANK_TOL, ambient_dim: int | None = None) -> Frame:
    frame, _ = orthonormalize_report(spanning, tol, ambient_dim)
    return frame


def projector(f: Frame) -> np.ndarray:
    """Hermitian orthogonal projector onto the span of the frame."""
    return f.matrix @ f.matrix.conj().T


def complement(p: np.ndarray) -> np.ndarray:
    return np.eye(p.shape[0], dtype=complex) - p


# Thin wrappers: they exist so every shape error in the package surfaces
# as DimensionMismatch rather than a numpy broadcast surprise.

def matmul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    if a.shape[1] != b.shape[0]:
        raise DimensionMismatch(f"cannot multiply {a.shape} by {b.shape}")
    return a @ b


def adjoint(a: np.ndarray) -> np.ndarray:
    return a.conj().T


def matadd(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    if a.shape != b.shape:
        raise DimensionMismatch(f"cannot add {a.shape} and {b.shape}")
    return a + b


def matsub(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    if a.shape != b.shape:
        raise DimensionMismatch(f"cannot subtract {b.shape} from {a.shape}")
    return a - b


def identity(n: int) -> np.ndarray:
    return np.eye(n, dtype=complex)


def norm_fro(a: np.ndarray) -> float:
    """Frobenius norm; the norm behind every tolerance in this package."""
    return float(np.linalg.norm(a))


def is_unitary(q: np.ndarray, tol: float = 1e-9) -> bool:
    n = q.shape[0]
    return q.shape == (n, n) and norm_fro(q.conj().T @ q - np.eye(n)) < tol
