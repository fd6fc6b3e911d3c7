"""Shared constructions for the test suite.

Oracles live next to the tests that use them; here are only the seeded
random builders every module needs.
"""

import numpy as np
import pytest

from projspec.generate import commuting_normal_tuple, random_unitary


def rng_for(seed):
    return np.random.default_rng(seed)


def random_hermitian(dim, rng):
    G = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    return (G + G.conj().T) / 2.0


def random_normal_matrix(dim, rng, real_spectrum=False):
    """Construct-then-recover oracle: unitary conjugation of a known diagonal."""
    U = random_unitary(dim, rng)
    if real_spectrum:
        d = rng.uniform(-2.0, 2.0, dim) + 0j
    else:
        d = (rng.standard_normal(dim) + 1j * rng.standard_normal(dim)) / np.sqrt(2.0)
    return U @ np.diag(d) @ U.conj().T, d, U


def perturbed_commuting_tuple(dim, arity, seed, rotation):
    """Commuting normal tuple with the last member's eigenbasis rotated.

    Every member stays exactly normal, but the last one no longer shares
    the eigenbasis, so pairwise commutators scale with ``rotation``.
    """
    rng = np.random.default_rng(seed)
    U = random_unitary(dim, rng)
    diags = [
        (rng.standard_normal(dim) + 1j * rng.standard_normal(dim)) / np.sqrt(2.0)
        for _ in range(arity)
    ]
    H = random_hermitian(dim, rng)
    H = H / max(np.abs(np.linalg.eigvalsh(H)))
    import scipy.linalg

    V = U @ scipy.linalg.expm(1j * rotation * H)
    mats = [U @ np.diag(d) @ U.conj().T for d in diags[:-1]]
    mats.append(V @ np.diag(diags[-1]) @ V.conj().T)
    return mats


@pytest.fixture
def counterexample():
    from projspec.generate import counterexample_pair

    return counterexample_pair()
