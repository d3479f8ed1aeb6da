"""Exhaustive and Monte-Carlo checks of the random group-code ensemble."""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .channels import ClassicalChannel, CQChannel, InputEnsemble
from .groups import (
    InputGroup,
    ThetaHat,
    ValidationError,
    check_cap,
    enumerate_theta_hats,
    generator_choices,
    iter_codes,
    Subgroup,
    partition_into_T_theta,
    sample_generators,
    theta_map,
    transversal,
)
from .htest import ih_test_classical
from .linalg import pinv_sqrt
from .rates import allocate_eps, srm_error_bound, thm1_error_bound, thm5_test

CHUNK = 20_000
Z95 = 1.959963984540054


def wilson_interval(successes: float, trials: int, z: float = Z95) -> tuple[float, float]:
    """Wilson score interval; ``successes`` may be fractional (expected counts)."""
    if trials <= 0:
        raise ValidationError("need at least one trial")
    p = successes / trials
    z2 = z * z
    centre = (p + z2 / (2 * trials)) / (1 + z2 / trials)
    half = z / (1 + z2 / trials) * math.sqrt(max(p * (1 - p), 0.0) / trials + z2 / (4 * trials**2))
    return max(centre - half, 0.0), min(centre + half, 1.0)


@dataclass
class SimReport:
    trials: int
    errors: float
    bound: float
    seed: int
    decoder: str
    meta: dict = field(default_factory=dict)

    @property
    def error_rate(self) -> float:
        return self.errors / self.trials

    @property
    def interval(self) -> tuple[float, float]:
        return wilson_interval(self.errors, self.trials)

    @property
    def width(self) -> float:
        lo, hi = self.interval
        return hi - lo

    def within_bound(self, widths: float = 3.0) -> bool:
        return self.error_rate <= self.bound + widths * self.width

    def to_json(self) -> dict:
        lo, hi = self.interval
        return {
            "trials": self.trials,
            "empirical_error": self.error_rate,
            "wilson95": [lo, hi],
            "bound": self.bound,
            "seed": self.seed,
            "decoder": self.decoder,
            **self.meta,
        }


def lemma2_exhaustive(J: InputGroup, theta: ThetaHat, n: int = 1) -> tuple[bool, dict]:
    """Check the pair law of (phi(a) + V, phi(a') + V) over the whole ensemble.

    For every message a and every a' whose difference from a has profile
    ``theta``, each codeword pair (x, x') must occur with frequency
    1 / (|G^n| |H_theta^n|) when x' - x lies in H_theta^n, and never otherwise.
    Returns (passed, {pair difference index: observed frequency}) pooled over messages.
    """
    theta = tuple(theta)
    if theta not in enumerate_theta_hats(J, include_all_s=True):
        raise ValidationError(f"{theta} is not a valuation profile of J")
    dst = J.group.power(n)
    H = theta_map(J, theta, group=dst)
    expected = Fraction(1, dst.order * H.order)
    codes = list(iter_codes(J, n))
    total = len(codes)
    JG = J.as_group
    messages = JG.elements()
    books = np.array([dst.index(c.codebook()) for c in codes])  # (codes, |J|)
    in_H = H.contains(dst.elements())
    pooled: Counter = Counter()
    passed = True
    for ai, a in enumerate(messages):
        for other in partition_into_T_theta(J, a)[theta]:
            bi = int(JG.index(other))
            counts = Counter(zip(books[:, ai].tolist(), books[:, bi].tolist()))
            for x in range(dst.order):
                for xt in range(dst.order):
                    diff = int(dst.index(dst.sub(dst.element(xt), dst.element(x))))
                    freq = Fraction(counts.get((x, xt), 0), total)
                    if freq != (expected if in_H[diff] else 0):
                        passed = False
                    if freq:
                        pooled[diff] = freq
    return passed, {"expected": expected, "codes": total, "frequencies": dict(pooled), "subgroup_exponents": H.exps}


def _codebook_indices(J: InputGroup, gens: np.ndarray, dither: np.ndarray) -> np.ndarray:
    """Codeword indices, shape (batch, |J|), for a batch of generator tables and dithers."""
    G = J.group
    msgs = J.as_group.elements()
    words = np.einsum("mi,bij->bmj", msgs, gens) + dither[:, None, :]
    return np.mod(words, G.moduli) @ G.strides


def _dither_shifts(J: InputGroup) -> list[InputEnsemble]:
    """Regular ensembles, one per coset of the image subgroup; a uniform dither picks one uniformly."""
    base = InputEnsemble.regular(J)
    return [InputEnsemble(J, {}, b) for b in transversal(Subgroup.whole(J.group), base.support)]


def _region(channel: ClassicalChannel, J: InputGroup, alloc, mode: str = "deterministic") -> np.ndarray:
    """Per dither coset, the intersection over profiles of the optimal acceptance
    sets; the cosets have disjoint input supports, so the union is one table."""
    region = np.zeros(channel.W.shape, dtype=bool)
    for ens in _dither_shifts(J):
        part = np.ones(channel.W.shape, dtype=bool)
        for theta, e in alloc.items():
            test = ih_test_classical(ens, channel, theta, e, mode)
            part &= np.asarray(test.weights).reshape(channel.W.shape) > 0.5
        region |= part
    return region


def simulate_classical(
    channel: ClassicalChannel,
    J: InputGroup,
    eps: float | None = None,
    decoder: str = "region",
    trials: int = 100_000,
    seed: int = 0,
    alloc=None,
) -> SimReport:
    """Empirical error of random codes from the regular ensemble.

    The region decoder accepts the unique message whose codeword lands in the
    intersection of the per-profile acceptance sets of its dither coset; no match or several
    matches count as errors. The ML decoder breaks likelihood ties uniformly
    at random, counted through their expected contribution.
    """
    if channel.group != J.group:
        raise ValidationError("J must be defined over the channel input group")
    if decoder not in ("region", "ml"):
        raise ValidationError(f"unknown decoder {decoder!r}")
    if trials < 1:
        raise ValidationError("trials must be positive")
    if alloc is None:
        if eps is None:
            raise ValidationError("need eps or an explicit allocation")
        alloc = allocate_eps(J, eps)
    # the dither lands in each coset equally often
    bound = float(np.mean([thm1_error_bound(channel, J, alloc, ens=e).value for e in _dither_shifts(J)]))
    region = _region(channel, J, alloc) if decoder == "region" else None
    W = channel.W
    cum = np.cumsum(W, axis=1)
    G = J.group
    n_msg = J.order
    chunks = math.ceil(trials / CHUNK)
    errors = 0.0
    for c, child in enumerate(np.random.SeedSequence(seed).spawn(chunks)):
        rng = np.random.default_rng(child)
        size = min(CHUNK, trials - c * CHUNK)
        gens = sample_generators(J, 1, size, rng)
        dither = G.elements()[rng.integers(G.order, size=size)]
        books = _codebook_indices(J, gens, dither)
        sent = rng.integers(n_msg, size=size)
        x = books[np.arange(size), sent]
        u = rng.random(size)
        y = np.minimum((u[:, None] > cum[x]).sum(axis=1), W.shape[1] - 1)
        if decoder == "region":
            hits = region[books, y[:, None]]
            ok = (hits.sum(axis=1) == 1) & hits[np.arange(size), sent]
            errors += size - ok.sum()
        else:
            like = W[books, y[:, None]]
            best = like.max(axis=1, keepdims=True)
            top = like == best
            ok = top[np.arange(size), sent] / top.sum(axis=1)
            errors += size - ok.sum()
    return SimReport(trials, float(errors), bound, seed, decoder, {"allocation": {",".join(map(str, t)): e for t, e in alloc.items()}})


def srm_code_error(channel: CQChannel, ops: np.ndarray, book: np.ndarray) -> float:
    """Average error of the square-root measurement built from per-input operators ``ops``."""
    A = ops[book]
    S_inv = pinv_sqrt(A.sum(axis=0))
    rho = channel.states[book]
    # tr(E_u rho_u) with E_u = S^-1/2 A_u S^-1/2; kernel mass of S is lost to the abstain outcome
    E = S_inv[None] @ A @ S_inv[None]
    success = np.einsum("uij,uji->u", E, rho).real
    return float(np.mean(1 - success))


def simulate_cq_srm(channel: CQChannel, J: InputGroup, eps: float, trials: int = 200, seed: int = 0) -> SimReport:
    """Exact square-root decoder error averaged over ``trials`` sampled codes.

    The decoder uses the blocks of the optimal test between the joint state
    and the mixture state pi_J; the reference value is the square-root bound
    at that test's type-I error and D_H.
    """
    if channel.group != J.group:
        raise ValidationError("J must be defined over the channel input group")
    if channel.dim > 8 or J.order > 8:
        raise ValidationError("square-root simulation supports d <= 8 and |J| <= 8")
    if trials < 1:
        raise ValidationError("trials must be positive")
    test = thm5_test(channel, J, eps)
    G = J.group
    ops = np.zeros((G.order, channel.dim, channel.dim), dtype=complex)
    ens = InputEnsemble.regular(J)
    # one test block per input symbol
    for x, op in zip(ens.support_indices, test.weights):
        ops[x] = op
    check_cap(math.prod(len(c) for c in generator_choices(J)), "generator space")
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    gens = sample_generators(J, 1, trials, rng)
    dither = G.elements()[rng.integers(G.order, size=trials)]
    books = _codebook_indices(J, gens, dither)
    errs = np.array([srm_code_error(channel, ops, book) for book in books])
    bound = float(srm_error_bound(test.value, 1 - test.alpha, J.rate()))
    return SimReport(trials, float(errs.sum()), bound, seed, "srm", {"d_h": test.value, "type_i": float(1 - test.alpha), "error_std": float(errs.std())})
