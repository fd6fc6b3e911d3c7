"""Deterministic tuple generators and the JSON tuple-document format.

Documents look like::

    {"N": 2, "n": 2,
     "matrices": [[[[1.0, 0.0], [0.0, 0.0]], [[0.0, 0.0], [2.0, 0.0]]], ...],
     "labels": ["A_1", "A_2"], "seed": 7}

with every entry stored as an ``[re, im]`` pair so fixtures stay
hand-editable.  Generators are pure functions of ``(kind, N, n, seed)``.
"""

from __future__ import annotations

import numpy as np

from .errors import DocumentError
from .linalg import OperatorTuple

__all__ = [
    "KINDS",
    "random_unitary",
    "commuting_normal_tuple",
    "random_normal_tuple",
    "random_tuple",
    "counterexample_pair",
    "generate",
    "to_document",
    "from_document",
]

KINDS = ("commuting-normal", "random-normal", "random", "counterexample")

MAX_DIM = 32
MAX_ARITY = 6


def random_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-ish random unitary from the QR of a complex Gaussian matrix."""
    G = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / np.sqrt(2.0)
    Q, R = np.linalg.qr(G)
    d = np.diag(R)
    phases = d / np.abs(d)
    return Q * phases[None, :].conj()


def _random_spectrum(dim: int, rng: np.random.Generator, real: bool) -> np.ndarray:
    if real:
        return rng.uniform(-2.0, 2.0, dim) + 0j
    return (rng.standard_normal(dim) + 1j * rng.standard_normal(dim)) / np.sqrt(2.0)


def commuting_normal_tuple(dim: int, arity: int, seed: int,
                           real_spectrum: bool = False) -> tuple[list[np.ndarray], np.ndarray]:
    """Commuting normal matrices sharing one random eigenbasis.

    Returns ``(matrices, joint)`` where column ``k`` of the
    ``(arity, dim)`` array ``joint`` is the joint eigenvalue vector of the
    k-th shared eigenvector.  With ``real_spectrum=True`` every member is
    self-adjoint.
    """
    rng = np.random.default_rng(seed)
    U = random_unitary(dim, rng)
    joint = np.stack([_random_spectrum(dim, rng, real_spectrum) for _ in range(arity)])
    mats = [U @ np.diag(joint[j]) @ U.conj().T for j in range(arity)]
    return mats, joint


def random_normal_tuple(dim: int, arity: int, seed: int,
                        real_spectrum: bool = False) -> list[np.ndarray]:
    """Independent normal matrices; generically non-commuting."""
    rng = np.random.default_rng(seed)
    mats = []
    for _ in range(arity):
        U = random_unitary(dim, rng)
        mats.append(U @ np.diag(_random_spectrum(dim, rng, real_spectrum)) @ U.conj().T)
    return mats


def random_tuple(dim: int, arity: int, seed: int) -> list[np.ndarray]:
    """Unstructured complex Gaussian matrices."""
    rng = np.random.default_rng(seed)
    return [
        (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / np.sqrt(2.0)
        for _ in range(arity)
    ]


def counterexample_pair() -> list[np.ndarray]:
    """The 2x2 pair whose polynomial splits although the matrices do not commute."""
    A = np.array([[1.0, 0.0], [0.0, 2.0]], dtype=complex)
    B = np.array([[3.0, 0.0], [4.0, 5.0]], dtype=complex)
    return [A, B]


def generate(kind: str, dim: int, arity: int, seed: int) -> list[np.ndarray]:
    """Dispatch on ``kind``; validates parameters for the CLI."""
    if kind not in KINDS:
        raise DocumentError(f"unknown kind {kind!r}; expected one of {KINDS}")
    if kind == "counterexample":
        if (dim, arity) != (2, 2):
            raise DocumentError("the counterexample pair is fixed at N=2, n=2")
        return counterexample_pair()
    if not 1 <= dim <= MAX_DIM:
        raise DocumentError(f"N must lie in [1, {MAX_DIM}], got {dim}")
    if not 1 <= arity <= MAX_ARITY:
        raise DocumentError(f"n must lie in [1, {MAX_ARITY}], got {arity}")
    if kind == "commuting-normal":
        return commuting_normal_tuple(dim, arity, seed)[0]
    if kind == "random-normal":
        return random_normal_tuple(dim, arity, seed)
    return random_tuple(dim, arity, seed)


def to_document(matrices, labels=None, seed: int | None = None) -> dict:
    """Serialize matrices into the JSON tuple-document layout."""
    mats = [np.asarray(m, dtype=complex) for m in matrices]
    dim = mats[0].shape[0]
    doc = {
        "N": dim,
        "n": len(mats),
        "matrices": [
            [[[float(v.real), float(v.imag)] for v in row] for row in m] for m in mats
        ],
    }
    if labels is not None:
        doc["labels"] = list(labels)
    if seed is not None:
        doc["seed"] = int(seed)
    return doc


def from_document(doc: dict) -> OperatorTuple:
    """Parse and validate a tuple document into an :class:`OperatorTuple`."""
    if not isinstance(doc, dict):
        raise DocumentError("document must be a JSON object")
    try:
        dim = int(doc["N"])
        arity = int(doc["n"])
        raw = doc["matrices"]
    except (KeyError, TypeError, ValueError) as exc:
        raise DocumentError(f"missing or malformed document field: {exc}") from exc
    if not isinstance(raw, list) or len(raw) != arity:
        raise DocumentError(f"expected {arity} matrices, found {len(raw) if isinstance(raw, list) else 'none'}")
    mats = []
    for mi, m in enumerate(raw):
        if not isinstance(m, list) or len(m) != dim:
            raise DocumentError(f"matrix {mi} must have {dim} rows")
        out = np.empty((dim, dim), dtype=complex)
        for ri, row in enumerate(m):
            if not isinstance(row, list) or len(row) != dim:
                raise DocumentError(f"matrix {mi} row {ri} must have {dim} entries")
            for ci, entry in enumerate(row):
                try:
                    re, im = float(entry[0]), float(entry[1])
                except (TypeError, ValueError, IndexError) as exc:
                    raise DocumentError(
                        f"matrix {mi} entry ({ri},{ci}) must be a [re, im] pair"
                    ) from exc
                out[ri, ci] = complex(re, im)
        if not np.all(np.isfinite(out)):
            raise DocumentError(f"matrix {mi} has non-finite entries")
        mats.append(out)
    try:
        return OperatorTuple(mats)
    except ValueError as exc:
        raise DocumentError(str(exc)) from exc
