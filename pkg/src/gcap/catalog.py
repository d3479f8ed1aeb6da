"""Ready-made channels used throughout the tests, demos and the CLI."""

from __future__ import annotations

import numpy as np

from .channels import ClassicalChannel, CQChannel
from .groups import AbelianGroup, ValidationError

KET_PLUS = np.array([1, 1]) / np.sqrt(2)
KET_MINUS = np.array([1, -1]) / np.sqrt(2)
KET_PLUS_I = np.array([1, 1j]) / np.sqrt(2)
KET_MINUS_I = np.array([1, -1j]) / np.sqrt(2)


def _proj(v: np.ndarray) -> np.ndarray:
    return np.outer(v, v.conj())


def _mixture(weight: float, v: np.ndarray, w: np.ndarray) -> np.ndarray:
    return weight * _proj(v) + (1 - weight) * _proj(w)


def additive_noise_channel(n: int, noise) -> ClassicalChannel:
    """Y = X + Z mod n on Z_n, with integer labels mapped through the primary split."""
    noise = np.asarray(noise, dtype=float)
    if noise.shape != (n,):
        raise ValidationError(f"noise law needs {n} entries")
    G = AbelianGroup.cyclic(n)
    labels = G.integer_labels()
    W = np.zeros((n, n))
    for x in range(n):
        W[labels[x], [labels[(x + z) % n] for z in range(n)]] = noise
    return ClassicalChannel(G, W)


def symmetric_channel(n: int, p: float) -> ClassicalChannel:
    """n-ary symmetric channel: correct with probability 1 - p, else uniform over the other symbols."""
    noise = np.full(n, p / (n - 1))
    noise[0] = 1 - p
    return additive_noise_channel(n, noise)


def bsc(p: float) -> ClassicalChannel:
    return symmetric_channel(2, p)


def octonary_channel() -> ClassicalChannel:
    """Z8 additive noise with P(Z=0) = 1/2 and the rest spread evenly."""
    noise = np.full(8, 1 / 14)
    noise[0] = 1 / 2
    return additive_noise_channel(8, noise)


def binary_qubit_channel() -> CQChannel:
    """0 -> maximally mixed qubit, 1 -> 1/4 |+><+| + 3/4 |-><-|."""
    states = [np.eye(2) / 2, _mixture(1 / 4, KET_PLUS, KET_MINUS)]
    return CQChannel(AbelianGroup.cyclic(2), np.array(states, dtype=complex))


def quaternary_qubit_channel() -> CQChannel:
    """Z4 inputs mapped to the maximally mixed state and three biased Pauli eigenstate mixtures."""
    states = [
        np.eye(2) / 2,
        _mixture(1 / 4, KET_PLUS, KET_MINUS),
        _mixture(3 / 4, KET_PLUS, KET_MINUS),
        _mixture(1 / 4, KET_PLUS_I, KET_MINUS_I),
    ]
    return CQChannel(AbelianGroup.cyclic(4), np.array(states, dtype=complex))


def identity_channel(group: AbelianGroup) -> ClassicalChannel:
    return ClassicalChannel(group, np.eye(group.order))


def random_density(d: int, rng: np.random.Generator, rank: int | None = None) -> np.ndarray:
    rank = d if rank is None else rank
    X = rng.normal(size=(d, rank)) + 1j * rng.normal(size=(d, rank))
    rho = X @ X.conj().T
    return rho / np.trace(rho).real


def random_cq_channel(group: AbelianGroup, d: int, rng: np.random.Generator) -> CQChannel:
    return CQChannel(group, np.array([random_density(d, rng) for _ in range(group.order)]))


def random_classical_channel(group: AbelianGroup, n_out: int, rng: np.random.Generator, sparsity: float = 0.0) -> ClassicalChannel:
    W = rng.random((group.order, n_out)) ** 2
    W[rng.random(W.shape) < sparsity] = 0
    W[np.arange(group.order), rng.integers(n_out, size=group.order)] += 0.05
    return ClassicalChannel(group, W / W.sum(axis=1, keepdims=True))
