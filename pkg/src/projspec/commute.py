"""Commutativity, reducibility, and joint-spectrum equivalence pipelines.

For a tuple of normal matrices, three conditions coincide: the matrices
pairwise commute, the joint point spectrum is a finite union of complex
hyperplanes, and the characteristic polynomial is completely reducible.
:func:`equivalence_report` measures all three routes numerically and
reports the raw residuals alongside the verdicts; for non-normal tuples
reducibility without commutativity is a known phenomenon and is flagged
but never "corrected".

:func:`simultaneous_diagonalize` constructs the shared eigenbasis of a
commuting normal tuple by recursive eigenspace refinement, processing
eigenvalues in decreasing modulus.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .config import Config
from .errors import (
    DimensionMismatchError,
    NoSharedVectorError,
    NotCommutingError,
    NotNormalError,
)
from .factor import REDUCIBLE, LinearFactorization, factor_linear
from .linalg import (
    OperatorTuple,
    as_complex_matrix,
    as_operator_tuple,
    commutator_norm,
    eig_normal,
    is_normal,
    operator_norm,
)
from .poly import charpoly
from .spectra import HyperplaneReport, hyperplane_membership

__all__ = [
    "JointDiagonalization",
    "EquivalenceReport",
    "NormalityReport",
    "CompleteCommutativityReport",
    "SharedEigenvector",
    "simultaneous_diagonalize",
    "equivalence_report",
    "normality_test",
    "complete_commutativity_test",
    "shared_eigenvector",
]


@dataclass(frozen=True)
class JointDiagonalization:
    """Shared unitary eigenbasis for a commuting normal tuple.

    ``diagonals[j]`` lists the eigenvalues of the j-th matrix in the order
    of the basis columns; ``residual`` is the largest relative
    off-diagonal leakage of ``U* A_j U``.
    """

    basis: np.ndarray
    diagonals: np.ndarray
    residual: float


def _joint_basis(mats: list[np.ndarray], norms: list[float], tol: float) -> np.ndarray:
    dim = mats[0].shape[0] if mats else 0
    if not mats or dim == 1:
        return np.eye(dim, dtype=complex)
    head, rest = mats[0], mats[1:]
    rest_norms = norms[1:]
    # tolerance widened per level: compressions inherit clustering error
    dec = eig_normal(head, tol=100.0 * tol)
    U = np.zeros((dim, dim), dtype=complex)
    col = 0
    for k, cluster in enumerate(dec.clusters):
        V = dec.eigenspace_basis(k)
        m = cluster.multiplicity
        sub = []
        for A, nrm in zip(rest, rest_norms):
            compressed = V.conj().T @ A @ V
            leak = operator_norm(A @ V - V @ compressed)
            if leak > 10.0 * tol * max(nrm, 1.0):
                raise NotCommutingError(
                    f"eigenspace of eigenvalue {cluster.value:.6g} is not invariant: "
                    f"leakage {leak:.3e}"
                )
            sub.append(compressed)
        W = _joint_basis(sub, rest_norms, tol) if sub else np.eye(m, dtype=complex)
        U[:, col : col + m] = V @ W
        col += m
    return U


def simultaneous_diagonalize(tup, tol: float = 1e-7) -> JointDiagonalization:
    """Diagonalize a commuting tuple of normal matrices in one basis.

    Recursion: diagonalize the first matrix, split into its eigenspaces
    (largest eigenvalue modulus first), restrict the remaining matrices to
    each eigenspace (they must leave it invariant up to tolerance), and
    recurse until every matrix is scalar on every block.

    Raises :class:`NotCommutingError` when a pairwise commutator exceeds
    ``tol * norm(A_i) * norm(A_j)`` or a restriction leaks outside its
    eigenspace, and :class:`NotNormalError` when a member fails the
    normality test.  The commutator precondition is checked first.
    """
    tup = as_operator_tuple(tup)
    norms = list(tup.norms())
    for i in range(tup.arity):
        for j in range(i + 1, tup.arity):
            bound = tol * max(norms[i] * norms[j], 1e-300)
            cij = commutator_norm(tup[i], tup[j])
            if cij > bound:
                raise NotCommutingError(
                    f"matrices {i} and {j} have commutator norm {cij:.3e} > {bound:.3e}"
                )
    for i, M in enumerate(tup.matrices):
        if not is_normal(M, tol):
            raise NotNormalError(f"matrix {i} is not normal within tolerance")

    U = _joint_basis(list(tup.matrices), norms, tol)
    diagonals = np.empty((tup.arity, tup.dim), dtype=complex)
    residual = 0.0
    for j, (A, nrm) in enumerate(zip(tup.matrices, norms)):
        D = U.conj().T @ A @ U
        diagonals[j] = np.diag(D)
        if nrm > 0:
            residual = max(residual, operator_norm(D - np.diag(diagonals[j])) / nrm)
    if residual > 100.0 * tol:
        raise NotCommutingError(f"joint diagonalization residual {residual:.3e} too large")
    U.setflags(write=False)
    diagonals.setflags(write=False)
    return JointDiagonalization(basis=U, diagonals=diagonals, residual=residual)


@dataclass
class EquivalenceReport:
    """All three equivalence routes with raw numbers.

    ``consistent`` means the commutator verdict, the reducibility verdict,
    and the hyperplane-containment verdict agree; for a tuple of normal
    matrices they must.  ``non_normal_gap`` marks the expected one-way gap
    (reducible but not commuting) for non-normal tuples; it is
    informational, not an error.
    """

    all_normal: bool
    max_commutator: float
    commute: bool
    factorization: LinearFactorization
    hyperplanes: list[HyperplaneReport] = field(default_factory=list)
    consistent: bool = False
    non_normal_gap: bool = False

    def to_json_dict(self) -> dict:
        return {
            "all_normal": self.all_normal,
            "max_commutator": self.max_commutator,
            "commute": self.commute,
            "factorization": self.factorization.to_json_dict(),
            "hyperplanes": [
                {
                    "coeffs": [[c.real, c.imag] for c in h.coeffs],
                    "contained": h.contained,
                    "max_witness": h.max_witness,
                    "max_poly_residual": h.max_poly_residual,
                }
                for h in self.hyperplanes
            ],
            "consistent": self.consistent,
            "non_normal_gap": self.non_normal_gap,
        }


def equivalence_report(tup, cfg: Config | None = None) -> EquivalenceReport:
    """Run all three equivalence routes on a tuple and compare verdicts.

    (a) max pairwise commutator norm, (b) complete reducibility of the
    characteristic polynomial, (c) containment of every recovered factor
    hyperplane in the joint point spectrum.
    """
    cfg = cfg or Config()
    tup = as_operator_tuple(tup)
    norms = tup.norms()

    max_comm = 0.0
    commute = True
    for i in range(tup.arity):
        for j in range(i + 1, tup.arity):
            cij = commutator_norm(tup[i], tup[j])
            max_comm = max(max_comm, cij)
            if cij > cfg.tol * max(1.0, norms[i] * norms[j]):
                commute = False

    p = charpoly(tup, radius=cfg.interpolation_radius,
                 prune_rel=cfg.prune_rel, grid_cap=cfg.grid_cap)
    factorization = factor_linear(p, cfg)

    hyperplanes: list[HyperplaneReport] = []
    if factorization.reducible:
        for fac in factorization.factors:
            if not fac.coeffs.any():
                continue  # constant factor: no hyperplane to test
            hyperplanes.append(
                hyperplane_membership(
                    tup, fac.coeffs, samples=cfg.hyperplane_samples,
                    tol=cfg.tol, seed=cfg.seed, poly=p,
                )
            )
        spectrum_linear = all(h.contained for h in hyperplanes)
    else:
        spectrum_linear = False

    all_normal = tup.all_normal(cfg.tol)
    consistent = commute == factorization.reducible == spectrum_linear
    gap = (not all_normal) and factorization.reducible and not commute
    return EquivalenceReport(
        all_normal=all_normal,
        max_commutator=max_comm,
        commute=commute,
        factorization=factorization,
        hyperplanes=hyperplanes,
        consistent=consistent,
        non_normal_gap=gap,
    )


@dataclass
class NormalityReport:
    """Normality of one matrix, decided through its joint spectrum."""

    spectral_normal: bool
    direct_normal: bool
    direct_residual: float
    pair_report: EquivalenceReport | None

    @property
    def agree(self) -> bool:
        return self.spectral_normal == self.direct_normal

    def to_json_dict(self) -> dict:
        return {
            "spectral_normal": self.spectral_normal,
            "direct_normal": self.direct_normal,
            "direct_residual": self.direct_residual,
            "agree": self.agree,
            "pair_report": None if self.pair_report is None else self.pair_report.to_json_dict(),
        }


def normality_test(A, cfg: Config | None = None) -> NormalityReport:
    """Decide normality of ``A`` from the spectrum of ``(A + A*, i(A - A*))``.

    The two members are self-adjoint, and they commute exactly when ``A``
    is normal; the pair's reducibility verdict therefore decides
    normality.  The direct commutator ``norm(A A* - A* A)`` is reported as
    the cross-check.
    """
    cfg = cfg or Config()
    A = as_complex_matrix(A)
    direct_residual = operator_norm(A @ A.conj().T - A.conj().T @ A)
    direct_normal = direct_residual <= cfg.tol * max(1.0, operator_norm(A) ** 2)
    h1 = A + A.conj().T
    h2 = 1j * (A - A.conj().T)
    if not h1.any() and not h2.any():
        # A == 0: trivially normal, no pencil to analyze
        return NormalityReport(True, direct_normal, direct_residual, None)
    report = equivalence_report(OperatorTuple([h1, h2]), cfg)
    return NormalityReport(
        spectral_normal=report.factorization.reducible,
        direct_normal=direct_normal,
        direct_residual=direct_residual,
        pair_report=report,
    )


@dataclass
class CompleteCommutativityReport:
    """Complete commutativity of a pair, decided through four joint spectra.

    ``pair_verdicts`` maps the four self-adjoint combinations to their
    reducibility outcomes; ``four_tuple_reducible`` is the single test on
    the combined 4-tuple, which decides "normal and commuting" in one
    shot.
    """

    pair_verdicts: dict[str, LinearFactorization]
    four_tuple: LinearFactorization
    direct_commutator: float
    direct_adjoint_commutator: float
    tol: float

    @property
    def completely_commuting(self) -> bool:
        return all(f.reducible for f in self.pair_verdicts.values())

    @property
    def direct_completely_commuting(self) -> bool:
        return max(self.direct_commutator, self.direct_adjoint_commutator) <= self.tol

    @property
    def agree(self) -> bool:
        return self.completely_commuting == self.direct_completely_commuting

    def to_json_dict(self) -> dict:
        return {
            "pair_verdicts": {k: v.to_json_dict() for k, v in self.pair_verdicts.items()},
            "four_tuple": self.four_tuple.to_json_dict(),
            "direct_commutator": self.direct_commutator,
            "direct_adjoint_commutator": self.direct_adjoint_commutator,
            "completely_commuting": self.completely_commuting,
            "direct_completely_commuting": self.direct_completely_commuting,
            "agree": self.agree,
        }


def _pair_reducibility(M1, M2, cfg: Config) -> LinearFactorization:
    if not M1.any() and not M2.any():
        # both zero: pencil is I, trivially a (empty) product of lines
        return LinearFactorization(verdict=REDUCIBLE, residual=0.0, factors=[])
    p = charpoly(OperatorTuple([M1, M2]), radius=cfg.interpolation_radius,
                 prune_rel=cfg.prune_rel, grid_cap=cfg.grid_cap)
    return factor_linear(p, cfg)


def complete_commutativity_test(A, B, cfg: Config | None = None) -> CompleteCommutativityReport:
    """Decide whether ``A`` commutes with both ``B`` and ``B*``.

    Forms the four combinations ``(A +/- A*, B +/- B*)``; the difference
    members are skew-Hermitian and are rotated by ``i`` (a linear change
    of variables, so lines map to lines) to make every tested pair
    self-adjoint.  Complete commutativity holds exactly when all four
    pairs have reducible characteristic polynomials.  Also runs the
    one-shot variant on the 4-tuple
    ``(A + A*, i(A - A*), B + B*, i(B - B*))``, whose reducibility
    characterizes "normal and commuting".
    """
    cfg = cfg or Config()
    A = as_complex_matrix(A)
    B = as_complex_matrix(B)
    if A.shape != B.shape:
        raise DimensionMismatchError("pair members must share a dimension")

    a_plus = A + A.conj().T
    a_minus = 1j * (A - A.conj().T)
    b_plus = B + B.conj().T
    b_minus = 1j * (B - B.conj().T)

    combos = {
        "A+A*, B+B*": (a_plus, b_plus),
        "A+A*, i(B-B*)": (a_plus, b_minus),
        "i(A-A*), B+B*": (a_minus, b_plus),
        "i(A-A*), i(B-B*)": (a_minus, b_minus),
    }
    verdicts = {name: _pair_reducibility(M1, M2, cfg) for name, (M1, M2) in combos.items()}

    four = [a_plus, a_minus, b_plus, b_minus]
    if any(m.any() for m in four):
        p4 = charpoly(OperatorTuple(four), radius=cfg.interpolation_radius,
                      prune_rel=cfg.prune_rel, grid_cap=cfg.grid_cap)
        four_tuple = factor_linear(p4, cfg)
    else:
        four_tuple = LinearFactorization(verdict=REDUCIBLE, residual=0.0, factors=[])

    scale = max(1.0, operator_norm(A) * operator_norm(B))
    return CompleteCommutativityReport(
        pair_verdicts=verdicts,
        four_tuple=four_tuple,
        direct_commutator=commutator_norm(A, B) / scale,
        direct_adjoint_commutator=commutator_norm(A, B.conj().T) / scale,
        tol=cfg.tol,
    )


@dataclass(frozen=True)
class SharedEigenvector:
    """A unit vector certifying a joint spectral line of a pair."""

    vector: np.ndarray
    eigen_residual: float        # norm(A x - lambda x)
    inner_residual: float        # |<B x, x> - mu|
    b_eigen_residual: float      # norm(B x - mu x); binding when |mu| = norm(B)


def shared_eigenvector(A, B, coeffs, tol: float = 1e-7) -> SharedEigenvector:
    """Find a unit ``x`` with ``A x = lambda x`` and ``<B x, x> = mu``.

    ``coeffs = (lambda, mu)`` names the spectral line
    ``lambda z + mu w + 1 = 0``; the caller is expected to have verified
    that the line lies in the joint point spectrum and that ``A`` is
    normal.  The vector is drawn from the eigenspace of ``A`` for
    ``lambda``, choosing the eigenvector of the compressed ``B`` whose
    eigenvalue is nearest ``mu`` (ties broken by minimal
    ``norm(B x - mu x)``).  When additionally ``|mu| = norm(B)``, the
    stronger conclusion ``B x = mu x`` is enforced.

    Raises :class:`NoSharedVectorError` with the achieved residuals when
    the bounds fail.
    """
    A = as_complex_matrix(A)
    B = as_complex_matrix(B)
    if A.shape != B.shape:
        raise DimensionMismatchError("pair members must share a dimension")
    lam, mu = complex(coeffs[0]), complex(coeffs[1])

    dec = eig_normal(A, tol=tol)
    gap_scale = max(1e-6 * (1.0 + abs(lam)), tol * (1.0 + abs(lam)))
    best = min(dec.clusters, key=lambda c: abs(c.value - lam), default=None)
    if best is None or abs(best.value - lam) > gap_scale:
        raise NoSharedVectorError(f"{lam} is not an eigenvalue of the first matrix")
    k = dec.clusters.index(best)
    V = dec.eigenspace_basis(k)

    comp = V.conj().T @ B @ V
    w, Y = np.linalg.eig(comp)
    dists = np.abs(w - mu)
    near = np.flatnonzero(dists <= dists.min() + tol * (1.0 + abs(mu)))
    candidates = []
    for i in near:
        x = V @ Y[:, i]
        x = x / np.linalg.norm(x)
        candidates.append((float(np.linalg.norm(B @ x - mu * x)), x))
    b_resid, x = min(candidates, key=lambda t: t[0])

    a_resid = float(np.linalg.norm(A @ x - lam * x))
    inner = complex(np.vdot(x, B @ x))
    inner_resid = abs(inner - mu)

    na, nb = operator_norm(A), operator_norm(B)
    ok = a_resid <= tol * (1.0 + na) and inner_resid <= tol * (1.0 + nb)
    if ok and abs(abs(mu) - nb) <= tol * (1.0 + nb):
        ok = b_resid <= tol * (1.0 + nb)
    if not ok:
        raise NoSharedVectorError(
            f"no shared eigenvector: eigen residual {a_resid:.3e}, "
            f"inner residual {inner_resid:.3e}, b residual {b_resid:.3e}"
        )
    x = x.copy()
    x.setflags(write=False)
    return SharedEigenvector(
        vector=x, eigen_residual=a_resid,
        inner_residual=inner_resid, b_eigen_residual=b_resid,
    )
