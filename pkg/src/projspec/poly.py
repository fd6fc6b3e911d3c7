"""Multivariate polynomials and the characteristic polynomial of a tuple.

The central construction is :func:`charpoly`, which interpolates

    p(z_1, ..., z_n) = det(I + z_1 A_1 + ... + z_n A_n)

on a tensor grid of scaled roots of unity, ``N + 1`` nodes per variable.
Each entry of the pencil is affine in ``z``, so the per-variable degree is
at most ``N`` and the grid determines the polynomial exactly; inversion is
a multidimensional discrete Fourier transform, which is perfectly
conditioned.  Interpolation leaves noise-level artifacts on absent
monomials, so coefficients below a relative prune threshold are dropped.

Also here: evaluation, restriction to affine lines, exact partial
derivatives, and univariate root finding via companion matrices.
"""

from __future__ import annotations

import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import (
    ArityMismatchError,
    DegenerateLeadingCoefficientError,
    GridTooLargeError,
    NoConvergenceError,
)
from .linalg import as_operator_tuple, cluster_points, determinant

__all__ = [
    "MultiPoly",
    "UnivariateRoots",
    "charpoly",
    "restrict_to_line",
    "roots",
]


class MultiPoly:
    """A sparse polynomial in ``arity`` complex variables.

    ``terms`` maps exponent tuples to complex coefficients.  Instances are
    treated as immutable after construction.
    """

    __slots__ = ("arity", "terms", "_dense", "_tdeg")

    def __init__(self, arity: int, terms: dict):
        if arity < 1:
            raise ValueError("arity must be at least 1")
        clean: dict[tuple[int, ...], complex] = {}
        for exp, coeff in terms.items():
            exp = tuple(int(e) for e in exp)
            if len(exp) != arity:
                raise ArityMismatchError(f"exponent {exp} does not have arity {arity}")
            if any(e < 0 for e in exp):
                raise ValueError(f"negative exponent in {exp}")
            c = complex(coeff)
            if c != 0:
                clean[exp] = c
        self.arity = arity
        self.terms = clean
        self._dense = None
        self._tdeg = max((sum(e) for e in clean), default=0)

    # -- construction helpers -------------------------------------------------

    @classmethod
    def from_dense(cls, coeffs: np.ndarray, prune_rel: float = 0.0,
                   max_total_degree: int | None = None) -> "MultiPoly":
        """Build from a dense coefficient array (axis k = variable k)."""
        coeffs = np.asarray(coeffs, dtype=complex)
        if coeffs.ndim < 1:
            coeffs = coeffs.reshape(1)
        amax = float(np.max(np.abs(coeffs))) if coeffs.size else 0.0
        cut = prune_rel * amax
        terms = {}
        for exp in np.ndindex(coeffs.shape):
            c = coeffs[exp]
            if c == 0 or abs(c) <= cut:
                continue
            if max_total_degree is not None and sum(exp) > max_total_degree:
                continue
            terms[exp] = complex(c)
        return cls(coeffs.ndim, terms)

    # -- basic queries ---------------------------------------------------------

    def total_degree(self) -> int:
        return self._tdeg

    def degrees(self) -> tuple[int, ...]:
        """Maximum exponent per variable."""
        degs = [0] * self.arity
        for exp in self.terms:
            for j, e in enumerate(exp):
                degs[j] = max(degs[j], e)
        return tuple(degs)

    def dense(self) -> np.ndarray:
        if self._dense is None:
            shape = tuple(d + 1 for d in self.degrees())
            arr = np.zeros(shape, dtype=complex)
            for exp, c in self.terms.items():
                arr[exp] = c
            arr.setflags(write=False)
            self._dense = arr
        return self._dense

    def max_coeff(self) -> float:
        return max((abs(c) for c in self.terms.values()), default=0.0)

    def leading_margin(self, prune_rel: float = 1e-10) -> float:
        """How far the top-degree coefficients sit above the prune floor.

        Returns ``min |c| over terms of maximal total degree`` divided by
        ``prune_rel * max |c|``; values near 1 flag a numerically dubious
        degree.  Infinite for the zero/constant polynomial.
        """
        amax = self.max_coeff()
        top = [abs(c) for e, c in self.terms.items() if sum(e) == self._tdeg]
        if not top or amax == 0.0:
            return math.inf
        return min(top) / (prune_rel * amax)

    # -- evaluation ------------------------------------------------------------

    def evaluate(self, z) -> complex:
        """Evaluate at a point via nested Horner folds over the dense array."""
        z = np.asarray(z, dtype=complex)
        if z.shape != (self.arity,):
            raise ArityMismatchError(f"expected a point with {self.arity} coordinates")
        acc = self.dense()
        for zj in z[::-1]:
            out = acc[..., -1]
            for k in range(acc.shape[-1] - 2, -1, -1):
                out = out * zj + acc[..., k]
            acc = out
        return complex(acc)

    __call__ = evaluate

    def partial(self, j: int) -> "MultiPoly":
        """Exact partial derivative with respect to variable ``j``."""
        if not 0 <= j < self.arity:
            raise ArityMismatchError(f"variable index {j} out of range")
        terms: dict[tuple[int, ...], complex] = {}
        for exp, c in self.terms.items():
            if exp[j] == 0:
                continue
            new = list(exp)
            new[j] -= 1
            key = tuple(new)
            terms[key] = terms.get(key, 0.0) + c * exp[j]
        return MultiPoly(self.arity, terms)

    def coefficients_1d(self) -> np.ndarray:
        """Ascending coefficient vector; arity must be 1."""
        if self.arity != 1:
            raise ArityMismatchError("coefficients_1d requires a univariate polynomial")
        deg = self.degrees()[0]
        c = np.zeros(deg + 1, dtype=complex)
        for (e,), v in self.terms.items():
            c[e] = v
        return c

    # -- serialization ---------------------------------------------------------

    def to_json_dict(self) -> dict:
        items = sorted(self.terms.items())
        return {
            "arity": self.arity,
            "terms": [
                {"exp": list(exp), "re": c.real, "im": c.imag} for exp, c in items
            ],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), sort_keys=True)

    @classmethod
    def from_json_dict(cls, doc: dict) -> "MultiPoly":
        terms = {tuple(t["exp"]): complex(t["re"], t["im"]) for t in doc["terms"]}
        return cls(int(doc["arity"]), terms)

    def __repr__(self) -> str:
        return f"MultiPoly(arity={self.arity}, degree={self._tdeg}, nterms={len(self.terms)})"


@dataclass(frozen=True)
class UnivariateRoots:
    """Roots of a univariate polynomial, clustered into multiplicities.

    ``roots`` pairs each representative value with its multiplicity;
    ``residuals`` records ``|q(root)|`` per representative.  Counted with
    multiplicity the roots exhaust the polynomial degree.
    """

    roots: tuple[tuple[complex, int], ...]
    residuals: tuple[float, ...]

    def flat(self) -> list[complex]:
        out = []
        for value, mult in self.roots:
            out.extend([value] * mult)
        return out

    def count(self) -> int:
        return sum(m for _, m in self.roots)


def _thread_cap() -> int:
    try:
        return max(1, int(os.environ.get("PROJSPEC_THREADS", "1")))
    except ValueError:
        return 1


def charpoly(tup, radius: float = 1.0, prune_rel: float = 1e-10,
             grid_cap: int = 10**6) -> MultiPoly:
    """Characteristic polynomial ``det(I + z_1 A_1 + ... + z_n A_n)``.

    Interpolates the determinant of the pencil on a tensor grid of
    ``(N+1)``-st roots of unity scaled by ``radius``, then inverts with an
    n-dimensional FFT.  The constant term is forced to exactly ``1``
    (``det(I) = 1``); coefficients below ``prune_rel`` of the largest and
    exponents of total degree above ``N`` (pure interpolation noise) are
    dropped.

    Raises :class:`GridTooLargeError` when ``(N+1)**n`` exceeds
    ``grid_cap``.  Grid evaluations are independent; setting the
    ``PROJSPEC_THREADS`` environment variable above 1 evaluates them in a
    thread pool (the assembled result does not depend on ordering).
    """
    tup = as_operator_tuple(tup)
    N, n = tup.dim, tup.arity
    nodes = N + 1
    if nodes**n > grid_cap:
        raise GridTooLargeError(f"grid of {nodes}**{n} points exceeds cap {grid_cap}")

    node_values = radius * np.exp(2j * np.pi * np.arange(nodes) / nodes)
    shape = (nodes,) * n
    vals = np.empty(shape, dtype=complex)
    indices = list(np.ndindex(shape))

    def _eval(idx):
        z = [node_values[i] for i in idx]
        return determinant(tup.pencil(z))

    workers = _thread_cap()
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            for idx, v in zip(indices, pool.map(_eval, indices)):
                vals[idx] = v
    else:
        for idx in indices:
            vals[idx] = _eval(idx)

    coeffs = np.fft.fftn(vals) / nodes**n
    if radius != 1.0:
        total = np.zeros(shape)
        for grids in np.indices(shape):
            total += grids
        coeffs = coeffs / radius**total

    const = coeffs[(0,) * n]
    if abs(const - 1.0) > 1e-6 * max(1.0, float(np.max(np.abs(coeffs)))):
        raise NoConvergenceError(
            f"interpolated constant term {const} is far from det(I) = 1"
        )

    p = MultiPoly.from_dense(coeffs, prune_rel=prune_rel, max_total_degree=N)
    terms = dict(p.terms)
    terms[(0,) * n] = 1.0
    return MultiPoly(n, terms)


def _binomial_factor(b: complex, d: complex, e: int) -> np.ndarray:
    """Ascending coefficients of ``(b + d t)**e``."""
    return np.array(
        [math.comb(e, k) * b ** (e - k) * d**k for k in range(e + 1)], dtype=complex
    )


def restrict_to_line(p: MultiPoly, base, direction) -> MultiPoly:
    """Substitute ``z = base + t * direction`` and expand in ``t``.

    Returns a univariate polynomial ``q`` with ``q(t) = p(base + t dir)``
    and degree at most the total degree of ``p``.
    """
    base = np.asarray(base, dtype=complex)
    direction = np.asarray(direction, dtype=complex)
    if base.shape != (p.arity,) or direction.shape != (p.arity,):
        raise ArityMismatchError("base/direction arity does not match the polynomial")
    if not direction.any():
        raise ValueError("direction must be nonzero")

    d = p.total_degree()
    out = np.zeros(d + 1, dtype=complex)
    if not base.any():
        # base = 0: each term contributes only to degree |e|
        for exp, c in p.terms.items():
            val = c
            for dj, ej in zip(direction, exp):
                if ej:
                    val *= dj**ej
            out[sum(exp)] += val
    else:
        for exp, c in p.terms.items():
            poly = np.array([c], dtype=complex)
            for bj, dj, ej in zip(base, direction, exp):
                if ej:
                    poly = np.convolve(poly, _binomial_factor(bj, dj, ej))
            out[: len(poly)] += poly
    return MultiPoly(1, {(k,): v for k, v in enumerate(out) if v != 0})


def roots(q: MultiPoly, cluster_tol: float = 1e-6,
          degeneracy_rel: float = 1e-10) -> UnivariateRoots:
    """All roots of a univariate polynomial via its companion matrix.

    Roots within ``cluster_tol * (1 + |root|)`` of each other are merged
    into a single value (their mean) with the cluster size as
    multiplicity; companion eigenvalues of an m-fold root scatter like
    ``eps**(1/m)``, so the merge threshold is deliberately loose.

    Raises :class:`DegenerateLeadingCoefficientError` when the leading
    coefficient falls below ``degeneracy_rel`` of the largest coefficient
    (the degree has effectively dropped; the caller must decide how to
    treat the lost roots).
    """
    c = q.coefficients_1d()
    if len(c) < 2:
        raise ValueError("root finding requires degree at least 1")
    amax = float(np.max(np.abs(c)))
    if amax == 0.0 or abs(c[-1]) <= degeneracy_rel * amax:
        raise DegenerateLeadingCoefficientError(
            f"leading coefficient {c[-1]!r} is degenerate relative to {amax!r}"
        )
    raw = np.roots(c[::-1])

    def gap(a, b):
        return cluster_tol * (1.0 + 0.5 * (abs(a) + abs(b)))

    groups = cluster_points(raw, gap)
    reps = []
    residuals = []
    for idx in groups:
        value = complex(np.mean(raw[idx]))
        reps.append((value, len(idx)))
        residuals.append(abs(q.evaluate(np.array([value]))))
    order = sorted(range(len(reps)), key=lambda i: (reps[i][0].real, reps[i][0].imag))
    return UnivariateRoots(
        roots=tuple(reps[i] for i in order),
        residuals=tuple(residuals[i] for i in order),
    )
