"""Spectral perturbation probes: Riesz projections and first-order formulas.

For a normal matrix ``A`` with eigenvalue ``lambda`` and eigenvector
``v``, the eigenvalue branch of ``A + eps B`` through ``lambda`` has
derivative ``<B v, v>`` at ``eps = 0``.  Equivalently, when ``lambda`` is
simple and nonzero, the spectral curve ``det(z A + w B + I) = 0`` passes
through ``(-1/lambda, 0)`` as an analytic graph ``z = phi(w)`` and the
tangent line there is ``lambda z + mu w + 1 = 0`` with
``mu = -lambda phi'(0) = <B v, v>``.

This module measures both sides: contour-quadrature Riesz projections
(with first-order expansion checks), finite-difference eigenvalue
derivatives with Richardson extrapolation, and root tracking of the
spectral curve.  Every probe records the raw numbers it compared.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import Config
from .errors import (
    ContourThroughSpectrumError,
    DerivativeMismatchError,
    MultiplicityRegimeError,
    RankMismatchError,
    SingularPointError,
    TrackingLostError,
)
from .linalg import (
    OperatorTuple,
    as_complex_matrix,
    eig_normal,
    is_selfadjoint,
    operator_norm,
)
from .poly import MultiPoly, charpoly, restrict_to_line
from .spectra import OFF_VARIETY, SINGULAR, classify_point

__all__ = [
    "ContourSpec",
    "RieszProjection",
    "PerturbationProbe",
    "ExpansionCheck",
    "separation_contour",
    "riesz_projection",
    "first_order_projection_term",
    "eigenvalue_derivative",
    "tangent_mu",
    "projection_expansion_check",
]

_RESOLVENT_CAP = 1e13


@dataclass(frozen=True)
class ContourSpec:
    """A circular contour for resolvent quadrature.

    The circle must separate the spectrum: no eigenvalue of the probed
    matrix may fall inside the annulus ``radius * (1 -/+ margin)`` around
    the circle.  ``nodes`` equispaced points drive the trapezoid rule,
    which converges geometrically for this analytic integrand.
    """

    center: complex
    radius: float
    nodes: int = 64
    margin: float = 0.2

    def __post_init__(self):
        if self.radius <= 0:
            raise ValueError("contour radius must be positive")
        if self.nodes < 16:
            raise ValueError("need at least 16 quadrature nodes")
        if not 0 <= self.margin < 1:
            raise ValueError("margin must lie in [0, 1)")

    def points(self) -> tuple[np.ndarray, np.ndarray]:
        """Quadrature nodes ``u_m`` and weights for (1/2 pi i) * du."""
        theta = 2.0 * np.pi * np.arange(self.nodes) / self.nodes
        phase = np.exp(1j * theta)
        return self.center + self.radius * phase, self.radius * phase / self.nodes

    def validate_against(self, eigenvalues) -> None:
        """Raise when some eigenvalue violates the separation annulus."""
        d = np.abs(np.asarray(eigenvalues, dtype=complex) - self.center)
        lo, hi = self.radius * (1.0 - self.margin), self.radius * (1.0 + self.margin)
        bad = np.flatnonzero((d >= lo) & (d <= hi))
        if bad.size:
            raise ContourThroughSpectrumError(
                f"{bad.size} eigenvalue(s) inside the separation annulus "
                f"[{lo:.3e}, {hi:.3e}] around the contour"
            )


def separation_contour(eigenvalues, target: complex, nodes: int = 64,
                       margin: float = 0.2) -> ContourSpec:
    """Contour around ``target`` with radius half the gap to the rest."""
    vals = np.asarray(eigenvalues, dtype=complex)
    d = np.abs(vals - target)
    inner = d <= 1e-8 * (1.0 + abs(target))
    outside = d[~inner]
    radius = 1.0 if outside.size == 0 else float(outside.min()) / 2.0
    return ContourSpec(center=complex(target), radius=radius, nodes=nodes, margin=margin)


@dataclass(frozen=True)
class RieszProjection:
    """Quadrature approximation of a spectral projection.

    ``rank`` is the rounded trace, i.e. the number of enclosed
    eigenvalues with multiplicity; ``hermiticity_residual`` is zero (up to
    quadrature) for normal matrices and genuinely positive for oblique
    projections of non-normal ones.
    """

    matrix: np.ndarray
    rank: int
    trace: complex
    idempotency_residual: float
    hermiticity_residual: float


def _resolvents(A: np.ndarray, spec: ContourSpec) -> tuple[np.ndarray, np.ndarray]:
    dim = A.shape[0]
    eye = np.eye(dim, dtype=complex)
    us, ws = spec.points()
    res = np.empty((spec.nodes, dim, dim), dtype=complex)
    scale = max(1.0, operator_norm(A))
    for m, u in enumerate(us):
        try:
            R = np.linalg.solve(u * eye - A, eye)
        except np.linalg.LinAlgError as exc:
            raise ContourThroughSpectrumError(f"resolvent singular at node {u}") from exc
        if operator_norm(R) > _RESOLVENT_CAP / scale:
            raise ContourThroughSpectrumError(
                f"resolvent norm exceeds cap at node {u}; contour touches the spectrum"
            )
        res[m] = R
    return res, ws


def riesz_projection(A, spec: ContourSpec) -> RieszProjection:
    """``P = (1/2 pi i) * contour integral of (u I - A)^-1 du``.

    Trapezoid quadrature on the circle; with a valid separating contour
    the result is idempotent to quadrature accuracy and its trace is an
    integer (the enclosed multiplicity).

    Raises :class:`ContourThroughSpectrumError` when a node sees a
    resolvent above the cap or the projection fails idempotency, and
    :class:`RankMismatchError` when the trace is far from an integer.
    """
    A = as_complex_matrix(A)
    res, ws = _resolvents(np.array(A), spec)
    P = np.tensordot(ws, res, axes=1)

    idem = operator_norm(P @ P - P)
    if idem > 1e-8 * max(1.0, operator_norm(P)):
        raise ContourThroughSpectrumError(
            f"projection not idempotent (residual {idem:.3e}); "
            "contour too close to the spectrum"
        )
    tr = complex(np.trace(P))
    rank = round(tr.real)
    if abs(tr - rank) > 1e-6:
        raise RankMismatchError(f"projection trace {tr} is far from an integer")
    herm = operator_norm(P - P.conj().T)
    P.setflags(write=False)
    return RieszProjection(
        matrix=P, rank=rank, trace=tr,
        idempotency_residual=idem, hermiticity_residual=herm,
    )


def first_order_projection_term(A, B, spec: ContourSpec) -> np.ndarray:
    """``(1/2 pi i) * contour integral of R(u) B R(u) du``.

    The first-order coefficient of the perturbed Riesz projection of
    ``A + eps B`` in ``eps``.
    """
    A = as_complex_matrix(A)
    B = as_complex_matrix(B)
    res, ws = _resolvents(np.array(A), spec)
    T = np.zeros_like(res[0])
    for w, R in zip(ws, res):
        T += w * (R @ B @ R)
    return T


def _richardson(hs, vals):
    """Fold central-difference samples assuming O(h^2) error terms."""
    pairs = list(zip(hs, vals))
    order = 2
    while len(pairs) > 1:
        nxt = []
        for (h1, v1), (h2, v2) in zip(pairs, pairs[1:]):
            r = (h1 / h2) ** order
            nxt.append((h2, (r * v2 - v1) / (r - 1.0)))
        pairs = nxt
        order += 2
    return pairs[0][1]


def _nearest_eigenvalue(values: np.ndarray, target: complex, cluster_tol: float) -> complex:
    d = np.abs(values - target)
    order = np.argsort(d)
    j1 = order[0]
    if len(values) > 1:
        j2 = order[1]
        same = abs(values[j1] - values[j2]) <= cluster_tol * (1.0 + abs(values[j1]))
        if d[j2] < 2.0 * d[j1] and not same:
            raise TrackingLostError(
                f"two eigenvalues compete for {target}: {values[j1]} and {values[j2]}"
            )
    return complex(values[j1])


def _hermitian_branch(M: np.ndarray, center: complex, count: int,
                      branch: int, gap: float) -> complex:
    vals = np.linalg.eigvalsh(M)
    sel = vals[np.abs(vals - center.real) < gap / 2.0]
    if len(sel) != count:
        raise TrackingLostError(
            f"expected {count} eigenvalues near {center}, found {len(sel)}"
        )
    return complex(np.sort(sel)[::-1][branch])


@dataclass(frozen=True)
class PerturbationProbe:
    """First-order eigenvalue data for a perturbation ``A + eps B``."""

    eigenvalue: complex
    multiplicity: int
    vector: np.ndarray
    inner: complex               # <B v, v>
    fd_derivative: complex       # Richardson-extrapolated central differences
    epsilons: tuple[float, ...]
    agreement: float             # |inner - fd_derivative|
    p0_rank: int
    p0_norm: float
    p_eps_rank: int
    p_eps_norm: float


def eigenvalue_derivative(A, B, lam: complex, cfg: Config | None = None) -> PerturbationProbe:
    """Derivative of the eigenvalue branch of ``A + eps B`` through ``lam``.

    ``A`` must be normal and ``lam`` one of its eigenvalues.  For a simple
    ``lam`` any ``B`` is allowed and the branch is tracked as the nearest
    perturbed eigenvalue.  For a multiple ``lam`` both matrices must be
    self-adjoint; the branch splits with slopes equal to the eigenvalues
    of the compressed ``B`` on the eigenspace, and the probe follows the
    branch of the largest compressed eigenvalue (its eigenvector supplies
    ``v``).

    The analytic value ``<B v, v>`` and the extrapolated finite
    difference must agree within ``cfg.derivative_tol``; disagreement
    raises :class:`DerivativeMismatchError`.
    """
    cfg = cfg or Config()
    A = as_complex_matrix(A)
    B = as_complex_matrix(B)
    dec = eig_normal(A, tol=cfg.tol)

    best = min(dec.clusters, key=lambda c: abs(c.value - lam))
    if abs(best.value - lam) > max(1e-6 * (1.0 + abs(lam)), cfg.tol * (1.0 + abs(lam))):
        raise ValueError(f"{lam} is not an eigenvalue of the matrix")
    lam0 = best.value
    mult = best.multiplicity
    k = dec.clusters.index(best)
    V = dec.eigenspace_basis(k)

    others = [c.value for c in dec.clusters if c is not best]
    gap = min((abs(v - lam0) for v in others), default=2.0)

    hermitian = is_selfadjoint(A, cfg.tol) and is_selfadjoint(B, cfg.tol)
    if mult > 1 and not hermitian:
        raise MultiplicityRegimeError(
            f"eigenvalue has multiplicity {mult}; the non-simple regime requires "
            "both matrices self-adjoint"
        )

    if mult == 1:
        v = V[:, 0]
        branch = 0
    else:
        comp = V.conj().T @ B @ V
        w, Y = np.linalg.eigh(comp)
        order = np.argsort(w)[::-1]
        branch = 0
        v = V @ Y[:, order[branch]]
        v = v / np.linalg.norm(v)
    inner = complex(np.vdot(v, B @ v))

    nb = operator_norm(B)
    diffs = []
    used = []
    for eps in cfg.fd_epsilons:
        if nb > 0 and eps * nb > gap / 4.0:
            continue  # the disk around lam0 would no longer isolate the branch
        if mult == 1:
            lp = _nearest_eigenvalue(np.linalg.eigvals(A + eps * B), lam0, cfg.root_cluster_tol)
            lm = _nearest_eigenvalue(np.linalg.eigvals(A - eps * B), lam0, cfg.root_cluster_tol)
        else:
            lp = _hermitian_branch(A + eps * B, lam0, mult, branch, gap)
            lm = _hermitian_branch(A - eps * B, lam0, mult, mult - 1 - branch, gap)
        diffs.append((lp - lm) / (2.0 * eps))
        used.append(eps)
    if not diffs:
        raise TrackingLostError("no finite-difference step small enough for the spectral gap")
    fd = complex(_richardson(used, diffs))

    spec = separation_contour(dec.values, lam0, nodes=cfg.contour_nodes, margin=cfg.contour_margin)
    P0 = riesz_projection(A, spec)
    if P0.rank != mult:
        raise RankMismatchError(
            f"projection rank {P0.rank} does not match multiplicity {mult}"
        )
    Pe = riesz_projection(A + used[0] * B, spec)

    agreement = abs(inner - fd)
    if agreement > cfg.derivative_tol * (1.0 + abs(inner)):
        raise DerivativeMismatchError(
            f"<Bv,v> = {inner} but finite differences give {fd} "
            f"(gap {agreement:.3e})"
        )
    v = v.copy()
    v.setflags(write=False)
    return PerturbationProbe(
        eigenvalue=lam0, multiplicity=mult, vector=v, inner=inner,
        fd_derivative=fd, epsilons=tuple(used), agreement=agreement,
        p0_rank=P0.rank, p0_norm=operator_norm(P0.matrix),
        p_eps_rank=Pe.rank, p_eps_norm=operator_norm(Pe.matrix),
    )


def _tracked_root(p: MultiPoly, w: complex, target: complex, cluster_tol: float) -> complex:
    q = restrict_to_line(p, np.array([0.0, w]), np.array([1.0, 0.0]))
    c = q.coefficients_1d()
    amax = float(np.max(np.abs(c)))
    eff = len(c) - 1
    while eff > 0 and abs(c[eff]) <= 1e-12 * amax:
        eff -= 1
    if eff == 0:
        raise TrackingLostError(f"restriction at w={w} degenerated to a constant")
    vals = np.roots(c[eff::-1])
    return _nearest_eigenvalue(vals, target, cluster_tol)


def tangent_mu(A, B, lam: complex, cfg: Config | None = None) -> complex:
    """Tangent-line coefficient ``mu = -lambda * phi'(0)`` at ``(-1/lambda, 0)``.

    ``lam`` must be a simple nonzero eigenvalue of the normal matrix
    ``A``; the point ``(-1/lambda, 0)`` is then a regular point of the
    spectral curve and the root ``z(w)`` of ``det(z A + w B + I)`` is
    tracked for small ``w`` to estimate ``phi'(0)`` by extrapolated
    central differences.  Points where the z-partial of the polynomial
    vanishes are refused rather than guessed.

    The result is cross-checked against ``<B v, v>`` from
    :func:`eigenvalue_derivative`; disagreement raises
    :class:`DerivativeMismatchError`.
    """
    cfg = cfg or Config()
    A = as_complex_matrix(A)
    B = as_complex_matrix(B)
    dec = eig_normal(A, tol=cfg.tol)
    best = min(dec.clusters, key=lambda c: abs(c.value - lam))
    if abs(best.value - lam) > max(1e-6 * (1.0 + abs(lam)), cfg.tol * (1.0 + abs(lam))):
        raise ValueError(f"{lam} is not an eigenvalue of the matrix")
    if best.multiplicity != 1:
        raise MultiplicityRegimeError("tangent tracking requires a simple eigenvalue")
    lam0 = best.value
    if abs(lam0) <= cfg.tol:
        raise ValueError("tangent tracking requires a nonzero eigenvalue")

    p = charpoly(OperatorTuple([A, B]), radius=cfg.interpolation_radius,
                 prune_rel=cfg.prune_rel, grid_cap=cfg.grid_cap)
    z0 = -1.0 / lam0
    point = np.array([z0, 0.0], dtype=complex)
    scale = max(p.max_coeff(), 1.0)
    cls = classify_point(p, point, tol=cfg.tol * scale)
    if cls == SINGULAR:
        raise SingularPointError(f"({z0}, 0) is a singular point of the spectral curve")
    if cls == OFF_VARIETY:
        raise SingularPointError(f"({z0}, 0) does not lie on the spectral curve")
    if abs(p.partial(0).evaluate(point)) <= cfg.tol * scale:
        raise SingularPointError(
            "z-partial vanishes at the base point; the curve is not a graph z(w) there"
        )

    diffs = []
    for h in cfg.tangent_steps:
        zp = _tracked_root(p, +h, z0, cfg.root_cluster_tol)
        zm = _tracked_root(p, -h, z0, cfg.root_cluster_tol)
        diffs.append((zp - zm) / (2.0 * h))
    phi_prime = complex(_richardson(list(cfg.tangent_steps), diffs))
    mu = -lam0 * phi_prime

    probe = eigenvalue_derivative(A, B, lam0, cfg)
    gap = abs(mu - probe.inner)
    if gap > cfg.derivative_tol * (1.0 + abs(mu)):
        raise DerivativeMismatchError(
            f"tangent gives mu = {mu} but <Bv,v> = {probe.inner} (gap {gap:.3e})"
        )
    return mu


@dataclass(frozen=True)
class ExpansionCheck:
    """Residuals of the first-order Riesz projection expansion at one eps.

    ``residual = norm(P_eps - P_0 - eps T)`` must scale quadratically in
    ``eps``; ``eigen_residual`` verifies that the perturbed projection
    maps into an eigenspace (exactly the eigen-equation for rank one, an
    invariance bound otherwise).
    """

    eps: float
    residual: float
    eigen_residual: float
    rank0: int
    rank_eps: int


def projection_expansion_check(A, B, spec: ContourSpec, eps: float,
                               cfg: Config | None = None) -> ExpansionCheck:
    """Measure ``norm(P_eps - P_0 - eps T)`` for one perturbation size.

    ``T`` is the first-order contour term; the caller checks quadratic
    scaling by comparing residuals across an ``eps`` ladder (halving
    ``eps`` should shrink the residual by roughly 4x).
    """
    cfg = cfg or Config()
    A = as_complex_matrix(A)
    B = as_complex_matrix(B)
    P0 = riesz_projection(A, spec)
    A_eps = A + eps * B
    Pe = riesz_projection(A_eps, spec)
    T = first_order_projection_term(A, B, spec)
    residual = operator_norm(Pe.matrix - P0.matrix - eps * T)

    rng = np.random.default_rng(cfg.seed)
    if Pe.rank == 1:
        lam_eps = complex(np.trace(A_eps @ Pe.matrix))
        eigen_residual = np.inf
        for _ in range(4):
            x = rng.standard_normal(A.shape[0]) + 1j * rng.standard_normal(A.shape[0])
            y = Pe.matrix @ x
            ny = np.linalg.norm(y)
            if ny < 1e-10:
                continue
            eigen_residual = float(np.linalg.norm(A_eps @ y - lam_eps * y) / ny)
            break
    else:
        eye = np.eye(A.shape[0], dtype=complex)
        eigen_residual = operator_norm((eye - Pe.matrix) @ A_eps @ Pe.matrix) / max(
            1.0, operator_norm(A_eps)
        )
    return ExpansionCheck(
        eps=eps, residual=residual, eigen_residual=eigen_residual,
        rank0=P0.rank, rank_eps=Pe.rank,
    )
