"""Joint point-spectrum queries for operator tuples.

The joint point spectrum of a tuple (A_1, ..., A_n) is the set of points
z in C^n where the pencil ``I + z_1 A_1 + ... + z_n A_n`` has a
nontrivial kernel.  In finite dimension that is equivalent to a vanishing
determinant, and numerically both become threshold statements on the
smallest singular value of the pencil; every verdict here therefore also
reports its raw witness.
"""

from __future__ import annotations

import io
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .config import Config
from .errors import (
    ArityMismatchError,
    DegenerateLeadingCoefficientError,
    SingularTransformError,
    ZeroNormalError,
)
from .linalg import as_operator_tuple, operator_norm, smallest_singular_value, OperatorTuple
from .poly import MultiPoly, charpoly, restrict_to_line, roots

__all__ = [
    "REGULAR",
    "SINGULAR",
    "OFF_VARIETY",
    "SpectrumPoint",
    "HyperplaneReport",
    "CurveRow",
    "CurveSample",
    "ChangeOfBasis",
    "membership",
    "hyperplane_membership",
    "sample_curve",
    "classify_point",
    "transform_tuple",
]

REGULAR = "regular"
SINGULAR = "singular"
OFF_VARIETY = "off_variety"

CURVE_CSV_HEADER = "w_re,w_im,z_re,z_im,residual,multiple_flag"


@dataclass(frozen=True)
class SpectrumPoint:
    """A probe of one point: raw witness plus the scaled threshold used."""

    z: np.ndarray
    witness: float
    threshold: float

    @property
    def member(self) -> bool:
        return self.witness <= self.threshold


def membership(tup, z, tol: float = 1e-7) -> SpectrumPoint:
    """Test whether ``z`` lies in the joint point spectrum of the tuple.

    The witness is the smallest singular value of the pencil; the point is
    declared a member when the witness is at most
    ``tol * (1 + sum |z_k| norm(A_k))``.
    """
    tup = as_operator_tuple(tup)
    z = np.asarray(z, dtype=complex)
    if z.shape != (tup.arity,):
        raise ArityMismatchError(f"point has shape {z.shape}, tuple arity is {tup.arity}")
    witness = smallest_singular_value(tup.pencil(z))
    scale = 1.0 + float(np.sum(np.abs(z) * np.array(tup.norms())))
    z = z.copy()
    z.setflags(write=False)
    return SpectrumPoint(z=z, witness=witness, threshold=tol * scale)


@dataclass(frozen=True)
class HyperplaneReport:
    """Sampled evidence that a hyperplane lies inside the point spectrum."""

    coeffs: np.ndarray
    contained: bool
    max_witness: float
    max_poly_residual: float
    samples: int


def _hyperplane_points(a: np.ndarray, samples: int, rng: np.random.Generator) -> np.ndarray:
    """Random points on ``{z : <a, z> + 1 = 0}``.

    Points are ``z* + V t`` with ``z* = -conj(a) / |a|^2`` (the closest
    point to the origin), ``V`` an orthonormal basis of the directions
    annihilated by ``a``, and ``t`` uniform in a disk of radius 2.
    """
    n = len(a)
    zstar = -np.conj(a) / float(np.vdot(a, a).real)
    basis = scipy.linalg.null_space(a.reshape(1, n))  # columns v with a @ v = 0
    k = basis.shape[1]
    pts = np.empty((samples, n), dtype=complex)
    for i in range(samples):
        if k:
            t = 2.0 * np.sqrt(rng.uniform(0.0, 1.0, k)) * np.exp(
                2j * np.pi * rng.uniform(0.0, 1.0, k)
            )
            pts[i] = zstar + basis @ t
        else:
            pts[i] = zstar
    return pts


def hyperplane_membership(tup, a, samples: int = 20, tol: float = 1e-7,
                          seed: int = 42, poly: MultiPoly | None = None) -> HyperplaneReport:
    """Test whether the hyperplane ``<a, z> + 1 = 0`` sits in the spectrum.

    Dense sampling on the plane stands in for the whole plane (a variety
    containing an open piece of it contains all of it); for matrix tuples
    the claim is cross-checked through the characteristic polynomial,
    which must vanish at the same sample points for the factor
    ``1 + <a, z>`` to divide it.
    """
    tup = as_operator_tuple(tup)
    a = np.asarray(a, dtype=complex)
    if a.shape != (tup.arity,):
        raise ArityMismatchError("hyperplane coefficient arity does not match the tuple")
    if not a.any():
        raise ZeroNormalError("hyperplane normal vector must be nonzero")

    p = poly if poly is not None else charpoly(tup)
    rng = np.random.default_rng(seed)
    pts = _hyperplane_points(a, samples, rng)
    max_witness = 0.0
    max_poly = 0.0
    contained = True
    pmax = max(p.max_coeff(), 1.0)
    for z in pts:
        probe = membership(tup, z, tol=tol)
        max_witness = max(max_witness, probe.witness)
        pres = abs(p.evaluate(z)) / pmax
        max_poly = max(max_poly, pres)
        if not probe.member or pres > tol:
            contained = False
    a = a.copy()
    a.setflags(write=False)
    return HyperplaneReport(
        coeffs=a,
        contained=contained,
        max_witness=max_witness,
        max_poly_residual=max_poly,
        samples=samples,
    )


@dataclass(frozen=True)
class CurveRow:
    w: complex
    z: complex
    residual: float
    multiple: bool


@dataclass
class CurveSample:
    """Numerically sampled spectral curve of a pair, one row per (w, root)."""

    label: str
    rows: list[CurveRow] = field(default_factory=list)
    dropped: list[int] = field(default_factory=list)  # roots at infinity per w

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write(CURVE_CSV_HEADER + "\n")
        for r in self.rows:
            buf.write(
                f"{r.w.real!r},{r.w.imag!r},{r.z.real!r},{r.z.imag!r},"
                f"{r.residual!r},{int(r.multiple)}\n"
            )
        return buf.getvalue()


def sample_curve(A, B, w_grid, cluster_tol: float = 1e-6,
                 near_tol: float = 1e-4, label: str = "(A,B)") -> CurveSample:
    """Sample the curve ``det(z A + w B + I) = 0`` over a grid of ``w``.

    For each ``w`` the grid restricts the pair's characteristic polynomial
    to the line ``{(t, w)}`` and takes all roots in ``z``.  Residuals are
    direct determinant evaluations (independent of the polynomial route).
    Roots closer than ``near_tol * (1 + |z|)`` to another root are flagged
    as candidate singular points; degree drops are recorded per ``w`` as
    roots at infinity.
    """
    tup = OperatorTuple([A, B])
    p = charpoly(tup)
    eye = np.eye(tup.dim, dtype=complex)
    out = CurveSample(label=label)
    for w in np.asarray(w_grid, dtype=complex):
        q = restrict_to_line(p, np.array([0.0, w]), np.array([1.0, 0.0]))
        lost = 0
        c = q.coefficients_1d()
        try:
            rr = roots(q, cluster_tol=cluster_tol)
        except DegenerateLeadingCoefficientError:
            amax = float(np.max(np.abs(c)))
            eff = len(c) - 1
            while eff > 0 and abs(c[eff]) <= 1e-10 * amax:
                eff -= 1
            lost = len(c) - 1 - eff
            if eff == 0:
                out.dropped.append(lost)
                continue
            trimmed = MultiPoly(1, {(k,): v for k, v in enumerate(c[: eff + 1]) if v != 0})
            rr = roots(trimmed, cluster_tol=cluster_tol)
        flat = rr.flat()
        for value, mult in rr.roots:
            near = any(
                other is not value and abs(other - value) <= near_tol * (1.0 + abs(value))
                for other in flat
            )
            residual = float(abs(np.linalg.det(value * tup[0] + w * tup[1] + eye)))
            out.rows.append(
                CurveRow(w=complex(w), z=value, residual=residual,
                         multiple=mult >= 2 or near)
            )
        out.dropped.append(lost)
    return out


def classify_point(p: MultiPoly, z0, tol: float = 1e-7) -> str:
    """Classify ``z0`` against the variety ``p = 0``.

    Returns ``off_variety`` when ``|p(z0)| > tol``; otherwise ``singular``
    when every partial derivative has modulus at most ``tol`` at ``z0``,
    else ``regular``.  Partials are computed exactly from the terms.
    """
    if p.total_degree() == 0:
        raise ValueError("classification needs a nonconstant polynomial")
    z0 = np.asarray(z0, dtype=complex)
    if abs(p.evaluate(z0)) > tol:
        return OFF_VARIETY
    for j in range(p.arity):
        if abs(p.partial(j).evaluate(z0)) > tol:
            return REGULAR
    return SINGULAR


@dataclass(frozen=True)
class ChangeOfBasis:
    """An invertible linear change of variables on the tuple coefficients."""

    matrix: np.ndarray
    inverse: np.ndarray

    @classmethod
    def from_matrix(cls, C) -> "ChangeOfBasis":
        C = np.asarray(C, dtype=complex)
        if C.ndim != 2 or C.shape[0] != C.shape[1]:
            raise SingularTransformError(f"expected a square matrix, got shape {C.shape}")
        try:
            inv = np.linalg.inv(C)
        except np.linalg.LinAlgError as exc:
            raise SingularTransformError(f"matrix is singular: {exc}") from exc
        n = C.shape[0]
        resid = operator_norm(C @ inv - np.eye(n))
        if resid > 1e-10 * max(1.0, operator_norm(C)):
            raise SingularTransformError(
                f"matrix too ill-conditioned: inverse residual {resid:.3e}"
            )
        C = C.copy()
        C.setflags(write=False)
        inv = np.array(inv)
        inv.setflags(write=False)
        return cls(matrix=C, inverse=inv)

    @property
    def arity(self) -> int:
        return self.matrix.shape[0]


def transform_tuple(tup, C) -> OperatorTuple:
    """Apply a linear change of variables: ``B_i = sum_j C[i, j] A_j``.

    The pencils satisfy ``sum z_i B_i + I = sum w_j A_j + I`` with
    ``w = z C``, so membership of ``z`` for the transformed tuple is
    membership of ``z C`` for the original, with identical witnesses.
    """
    tup = as_operator_tuple(tup)
    if not isinstance(C, ChangeOfBasis):
        C = ChangeOfBasis.from_matrix(C)
    if C.arity != tup.arity:
        raise ArityMismatchError("change-of-variables size does not match the tuple arity")
    mats = [tup.combine(C.matrix[i]) for i in range(tup.arity)]
    return OperatorTuple(mats)
