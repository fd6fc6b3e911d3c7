"""Dense complex matrix kernels and the operator-tuple container.

Everything downstream (characteristic polynomials, spectra, perturbation
probes) consumes the primitives here: determinants, eigendecompositions of
normal matrices with multiplicity clustering, extreme singular values, and
commutator norms.  Matrices are plain ``numpy`` arrays validated by
:func:`as_complex_matrix`; the LAPACK-backed kernels (pivoted LU for
determinants, complex Schur for eigendecompositions) sit behind these
functions.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import (
    ArityMismatchError,
    DimensionMismatchError,
    NoConvergenceError,
    NotNormalError,
)

__all__ = [
    "as_complex_matrix",
    "determinant",
    "operator_norm",
    "smallest_singular_value",
    "commutator_norm",
    "is_normal",
    "is_selfadjoint",
    "cluster_points",
    "EigenCluster",
    "SpectralDecomposition",
    "eig_normal",
    "OperatorTuple",
]

# Absolute/relative gap rule for grouping eigenvalues into multiplicity
# clusters; overridable per call.
EIG_CLUSTER_ABS = 1e-7
EIG_CLUSTER_REL = 1e-6


def as_complex_matrix(data) -> np.ndarray:
    """Validate ``data`` as a square, finite, complex matrix.

    Returns a read-only copy so validated matrices can be shared freely.
    """
    M = np.array(data, dtype=complex)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise DimensionMismatchError(f"expected a square matrix, got shape {M.shape}")
    if M.shape[0] == 0:
        raise DimensionMismatchError("empty matrix")
    if not np.all(np.isfinite(M)):
        raise ValueError("matrix entries must be finite")
    M.setflags(write=False)
    return M


def _eigvalsh(H):
    try:
        return np.linalg.eigvalsh(H)
    except np.linalg.LinAlgError as exc:
        raise NoConvergenceError(f"hermitian eigensolver failed: {exc}") from exc


def determinant(M) -> complex:
    """Determinant by pivoted LU elimination."""
    M = np.asarray(M, dtype=complex)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise DimensionMismatchError(f"expected a square matrix, got shape {M.shape}")
    return complex(np.linalg.det(M))


def operator_norm(M) -> float:
    """Operator 2-norm, the largest singular value via the spectrum of M*M."""
    M = np.asarray(M, dtype=complex)
    w = _eigvalsh(M.conj().T @ M)
    return float(np.sqrt(max(float(w[-1]), 0.0)))


def smallest_singular_value(M) -> float:
    """Smallest singular value via the Hermitian spectrum of M*M.

    Accurate to roughly ``norm(M) * sqrt(eps)`` absolute, which is enough
    for the desk-scale membership tests this package runs.
    """
    M = as_complex_matrix(M)
    w = _eigvalsh(M.conj().T @ M)
    return float(np.sqrt(max(float(w[0]), 0.0)))


def commutator_norm(A, B) -> float:
    """``norm(AB - BA)`` in the operator 2-norm."""
    A = np.asarray(A, dtype=complex)
    B = np.asarray(B, dtype=complex)
    if A.shape != B.shape:
        raise DimensionMismatchError(f"shape mismatch: {A.shape} vs {B.shape}")
    return operator_norm(A @ B - B @ A)


def is_normal(M, tol: float = 1e-7) -> bool:
    M = np.asarray(M, dtype=complex)
    nrm = operator_norm(M)
    return operator_norm(M @ M.conj().T - M.conj().T @ M) <= tol * max(1.0, nrm * nrm)


def is_selfadjoint(M, tol: float = 1e-7) -> bool:
    M = np.asarray(M, dtype=complex)
    return operator_norm(M - M.conj().T) <= tol * max(1.0, operator_norm(M))


def cluster_points(points, gap) -> list[list[int]]:
    """Group complex points into connected components of the ``gap`` relation.

    ``gap`` may be a float (absolute threshold) or a callable
    ``gap(p, q) -> float`` giving the pairwise threshold.  Components are
    returned as index lists, deterministically ordered by first member.
    """
    pts = np.asarray(points, dtype=complex)
    m = len(pts)
    parent = list(range(m))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(m):
        for j in range(i + 1, m):
            thr = gap(pts[i], pts[j]) if callable(gap) else gap
            if abs(pts[i] - pts[j]) <= thr:
                ri, rj = find(i), find(j)
                if ri != rj:
                    parent[max(ri, rj)] = min(ri, rj)

    groups: dict[int, list[int]] = {}
    for i in range(m):
        groups.setdefault(find(i), []).append(i)
    return [groups[r] for r in sorted(groups)]


@dataclass(frozen=True)
class EigenCluster:
    """One eigenvalue with its multiplicity and basis-column indices."""

    value: complex
    multiplicity: int
    indices: tuple[int, ...]


@dataclass(frozen=True)
class SpectralDecomposition:
    """Unitary eigendecomposition of a normal matrix.

    ``values[k]`` is the eigenvalue attached to column ``k`` of ``basis``;
    ``clusters`` groups those columns into eigenspaces, ordered by
    decreasing eigenvalue modulus.
    """

    values: np.ndarray
    basis: np.ndarray
    clusters: tuple[EigenCluster, ...]

    @property
    def dim(self) -> int:
        return self.basis.shape[0]

    def eigenspace_basis(self, k: int) -> np.ndarray:
        return self.basis[:, list(self.clusters[k].indices)]

    def projection(self, k: int) -> np.ndarray:
        """Orthogonal projection onto the k-th eigenspace."""
        V = self.eigenspace_basis(k)
        return V @ V.conj().T


def eig_normal(M, tol: float = 1e-7, cluster_gap: float | None = None) -> SpectralDecomposition:
    """Eigendecomposition of a normal matrix with multiplicity clustering.

    The matrix is reduced to complex Schur form (Hessenberg reduction plus
    shifted QR inside LAPACK); for a normal input the triangular factor is
    diagonal up to roundoff, which is asserted.  Eigenvalues within
    ``cluster_gap`` (default ``max(1e-7, 1e-6 * norm(M))``) are merged into
    one cluster and assigned a common multiplicity.

    Raises
    ------
    NotNormalError
        if ``norm(M M* - M* M) > tol * norm(M)**2``.
    NoConvergenceError
        if the QR iteration fails or the Schur factor is not diagonal.
    """
    M = as_complex_matrix(M)
    nrm = operator_norm(M)
    if operator_norm(M @ M.conj().T - M.conj().T @ M) > tol * max(nrm * nrm, 1e-300):
        raise NotNormalError("matrix does not commute with its adjoint within tolerance")

    try:
        T, U = scipy.linalg.schur(np.array(M), output="complex")
    except Exception as exc:  # LAPACK failure surfaces as LinAlgError or ValueError
        raise NoConvergenceError(f"schur decomposition failed: {exc}") from exc

    values = np.diag(T).copy()
    off = T - np.diag(values)
    off_tol = max(10.0 * tol * nrm, 1e3 * np.finfo(float).eps * max(nrm, 1.0) * M.shape[0])
    if operator_norm(off) > off_tol:
        raise NoConvergenceError("schur factor of a normal matrix is not diagonal")

    gap = cluster_gap if cluster_gap is not None else max(EIG_CLUSTER_ABS, EIG_CLUSTER_REL * nrm)
    groups = cluster_points(values, gap)
    clusters = []
    for idx in groups:
        mean = complex(np.mean(values[idx]))
        clusters.append(EigenCluster(value=mean, multiplicity=len(idx), indices=tuple(idx)))
    clusters.sort(key=lambda c: (-abs(c.value), c.value.real, c.value.imag))

    values.setflags(write=False)
    U = np.array(U)
    U.setflags(write=False)
    return SpectralDecomposition(values=values, basis=U, clusters=tuple(clusters))


class OperatorTuple:
    """An ordered tuple of same-size square complex matrices.

    The basic object of study: ``pencil(z)`` builds ``I + sum z_k A_k``.
    At least one member must be nonzero.  Instances are immutable; the
    stored arrays are read-only.
    """

    def __init__(self, matrices):
        mats = [as_complex_matrix(m) for m in matrices]
        if not mats:
            raise ValueError("need at least one operator")
        dim = mats[0].shape[0]
        for m in mats[1:]:
            if m.shape[0] != dim:
                raise DimensionMismatchError("all matrices in a tuple must share a dimension")
        if all(not m.any() for m in mats):
            raise ValueError("at least one operator in the tuple must be nonzero")
        self.matrices = tuple(mats)
        self.dim = dim
        self.arity = len(mats)
        self._stack = np.stack(mats)
        self._stack.setflags(write=False)
        self._norms: tuple[float, ...] | None = None
        self._flag_cache: dict[tuple[str, float], bool] = {}

    def __len__(self) -> int:
        return self.arity

    def __getitem__(self, j: int) -> np.ndarray:
        return self.matrices[j]

    def norms(self) -> tuple[float, ...]:
        if self._norms is None:
            self._norms = tuple(operator_norm(m) for m in self.matrices)
        return self._norms

    def combine(self, coeffs) -> np.ndarray:
        """``sum_k coeffs[k] * A_k``."""
        c = np.asarray(coeffs, dtype=complex)
        if c.shape != (self.arity,):
            raise ArityMismatchError(f"expected {self.arity} coefficients, got shape {c.shape}")
        return np.tensordot(c, self._stack, axes=1)

    def pencil(self, z) -> np.ndarray:
        """``I + sum_k z_k A_k``."""
        return self.combine(z) + np.eye(self.dim, dtype=complex)

    def _flag(self, kind: str, tol: float, pred) -> bool:
        key = (kind, tol)
        if key not in self._flag_cache:
            self._flag_cache[key] = all(pred(m, tol) for m in self.matrices)
        return self._flag_cache[key]

    def all_normal(self, tol: float = 1e-7) -> bool:
        return self._flag("normal", tol, is_normal)

    def all_selfadjoint(self, tol: float = 1e-7) -> bool:
        return self._flag("selfadjoint", tol, is_selfadjoint)


def as_operator_tuple(obj) -> OperatorTuple:
    """Coerce a sequence of matrices (or pass through an OperatorTuple)."""
    if isinstance(obj, OperatorTuple):
        return obj
    return OperatorTuple(obj)
