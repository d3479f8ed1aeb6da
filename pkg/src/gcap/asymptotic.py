"""Single-letter group capacity: conditional mutual informations, the maximin
LP over input cosets, and the search over weight vectors."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .channels import ClassicalChannel, CQChannel, InputEnsemble, _check_nested, reduced_ensembles
from .groups import (
    AbelianGroup,
    InputGroup,
    Subgroup,
    ValidationError,
    WeightVector,
    enumerate_theta_hats,
    omega_theta,
)
from .htest import dh_classical, group_mutual_info
from .linalg import von_neumann_entropy
from .simplex import maximin, minimax

GAP_TOL = 1e-9


def entropy_bits(p) -> float:
    p = np.asarray(p, dtype=float).ravel()
    p = p[p > 0]
    return float(-np.sum(p * np.log2(p)))


def binary_entropy(p: float) -> float:
    return entropy_bits([p, 1 - p])


def _cosets(ens: InputEnsemble, H: Subgroup) -> list[np.ndarray]:
    ids = H.coset_ids()[ens.support_indices]
    return [ens.support_indices[ids == c] for c in np.unique(ids)]


def cond_mutual_info_classical(ens: InputEnsemble, channel: ClassicalChannel, H: Subgroup) -> float:
    """I(X; Y | [X]) in bits, X uniform on the ensemble support and [X] its coset of H."""
    _check_nested(ens, H)
    W = channel.W
    row_h = np.array([entropy_bits(r) for r in W])
    total = 0.0
    n = len(ens.support_indices)
    for members in _cosets(ens, H):
        total += len(members) / n * (entropy_bits(W[members].mean(axis=0)) - row_h[members].mean())
    return float(max(total, 0.0))


def cond_mutual_info_cq(ens: InputEnsemble, channel: CQChannel, H: Subgroup) -> float:
    """Holevo form of I(X; B | [X])."""
    _check_nested(ens, H)
    rho = channel.states
    total = 0.0
    n = len(ens.support_indices)
    for members in _cosets(ens, H):
        avg = rho[members].mean(axis=0)
        inner = np.mean([von_neumann_entropy(rho[i]) for i in members])
        total += len(members) / n * (von_neumann_entropy(avg) - inner)
    return float(max(total, 0.0))


def cond_mutual_info(ens: InputEnsemble, channel, H: Subgroup) -> float:
    if isinstance(channel, CQChannel):
        return cond_mutual_info_cq(ens, channel, H)
    return cond_mutual_info_classical(ens, channel, H)


def maximin_alpha_lp(objective: np.ndarray, denominators: np.ndarray) -> tuple[float, np.ndarray]:
    """max t s.t. sum_r alpha_r c[r, theta] >= t (1 - omega_theta), alpha a distribution.

    ``objective`` has one row per input coset and one column per profile.
    """
    c = np.asarray(objective, dtype=float)
    d = np.asarray(denominators, dtype=float)
    if c.ndim != 2 or c.shape[0] == 0 or c.shape[1] != len(d):
        raise ValidationError("objective must be (rows, profiles) with one denominator per profile")
    if np.any(d <= 0):
        raise ValidationError("denominators 1 - omega must be positive")
    if not np.any(c):
        return 0.0, np.eye(c.shape[0])[0]
    t, alpha = maximin(c.T, d)
    dual, _ = minimax(c.T, d)
    if abs(dual - t) > GAP_TOL * max(1.0, abs(t)):
        raise RuntimeError(f"LP duality gap {abs(dual - t)} above tolerance")
    return t, alpha


@dataclass
class CapacityCertificate:
    value: float
    weights: dict
    alpha: list[tuple[dict, float]]
    slack: list[dict]
    meta: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "value": self.value,
            "w": {f"{p},{s}": v for (p, s), v in self.weights.items()},
            "alpha": [{"ensemble": e, "weight": a} for e, a in self.alpha],
            "slack": self.slack,
            **self.meta,
        }


def _compositions(total: int, parts: int):
    """Nonnegative integer vectors of length ``parts`` summing to ``total``, lexicographically decreasing."""
    if parts == 1:
        yield (total,)
        return
    for first in range(total, -1, -1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def group_capacity(channel, grid: float = 0.02, refine: int = 2) -> CapacityCertificate:
    """Grid search over weight vectors on S(G), then ``refine`` passes on a
    10x finer lattice around the incumbent; each point solves the maximin LP."""
    G: AbelianGroup = channel.group
    if G.order > 64:
        raise ValidationError("group capacity search supports |G| <= 64")
    coords = G.s_index
    steps = round(1 / grid)
    if steps < 1 or abs(steps * grid - 1) > 1e-9:
        raise ValidationError("grid step must divide 1")
    tables: dict = {}

    def table(active):
        if active not in tables:
            wv = WeightVector(G, tuple((key, 1 / len(active)) for key in active))
            ensembles = reduced_ensembles(wv)
            thetas = enumerate_theta_hats(wv)
            C = np.array([[cond_mutual_info(e, channel, e.coset_subgroup(t)) for t in thetas] for e in ensembles])
            tables[active] = (ensembles, thetas, C)
        return tables[active]

    def evaluate(counts, denom):
        values = tuple((key, c / denom) for key, c in zip(coords, counts) if c)
        wv = WeightVector(G, values)
        ensembles, thetas, C = table(wv.active)
        d = np.array([1 - omega_theta(t, wv) for t in thetas])
        t, alpha = maximin_alpha_lp(C, d)
        return t, (wv, ensembles, thetas, C, d, alpha)

    best = None
    evaluated = 0
    for counts in _compositions(steps, len(coords)):
        t, info = evaluate(counts, steps)
        evaluated += 1
        if best is None or t > best[0] + 1e-12:
            best = (t, counts, steps, info)
    for _ in range(refine):
        _, counts, denom, info = best
        fine = denom * 10
        centre = tuple(c * 10 for c in counts)
        best = (best[0], centre, fine, info)
        for off in itertools.product(range(-10, 11), repeat=len(coords) - 1):
            head = [c + o for c, o in zip(centre, off)]
            cand = tuple(head + [fine - sum(head)])
            if min(cand) < 0 or abs(cand[-1] - centre[-1]) > 10 or cand == centre:
                continue
            t, info = evaluate(cand, fine)
            evaluated += 1
            if t > best[0] + 1e-12:
                best = (t, cand, fine, info)

    t, counts, denom, (wv, ensembles, thetas, C, d, alpha) = best
    achieved = (alpha @ C) / d
    slack = [
        {"theta": ",".join(map(str, th)), "omega": 1 - di, "objective": float(a), "slack": float(a - t)}
        for th, di, a in zip(thetas, d, achieved)
    ]
    support = [(e.describe(), float(a)) for e, a in zip(ensembles, alpha) if a > 1e-12]
    meta = {"grid": grid, "refine": refine, "resolution": 1 / denom, "points_evaluated": evaluated}
    return CapacityCertificate(float(t), {key: c / denom for key, c in zip(coords, counts)}, support, slack, meta)


def example5_simplified(channel: CQChannel) -> float:
    """max{min{I4, I2 + I2'}, I2, I2'} for a CQ channel on Z4, computed directly
    from the Holevo quantities of the full group and of the two cosets of 2Z4."""
    if channel.group != AbelianGroup.cyclic(4):
        raise ValidationError("this closed form applies to Z4 only")
    I4, I2, I2p = quaternary_holevo_terms(channel)
    return max(min(I4, I2 + I2p), I2, I2p)


def quaternary_holevo_terms(channel: CQChannel) -> tuple[float, float, float]:
    rho = channel.states

    def holevo(idx):
        avg = rho[idx].mean(axis=0)
        return float(von_neumann_entropy(avg) - np.mean([von_neumann_entropy(rho[i]) for i in idx]))

    return holevo([0, 1, 2, 3]), holevo([0, 2]), holevo([1, 3])


def example4_reference(p: float, w: float) -> tuple[float, float, float, float]:
    """Closed forms for the 10-ary symmetric channel with weight w on the Z2 part.

    A and B are the rate constraints of the two nontrivial profiles, C the
    Shannon capacity and L the rate of linear codes over Z7.
    """
    hb = binary_entropy
    l3, l5, l7, l9 = (math.log2(v) for v in (3, 5, 7, 9))
    noise = hb(p) + p * l9
    mix = w + (1 - w) * l5
    A = math.inf if w == 0 else mix / w * (hb(8 * p / 9) + 24 * p / 9 + (1 - 8 * p / 9) - noise)
    B = math.inf if w == 1 else mix / ((1 - w) * l5) * (hb(5 * p / 9) + l5 - noise)
    C = math.log2(10) - noise
    L = hb(p / 3) + p / 3 * l3 + (1 - p / 3) * l7 - noise
    return A, B, C, L


def example6_degeneration(channel: ClassicalChannel, n: int, k: int, eps: float, mode: str = "randomized") -> float:
    """For a channel on Z_p and J = Z_p^k inside Z_p^n, check the single profile
    has omega 0 and return I_H^eps(X^n; Y^n), matched against the plain product D_H."""
    G = channel.group
    if G.rank != 1 or G.factors[0][1] != 1:
        raise ValidationError("need a channel on Z_p with p prime")
    p = G.factors[0][0]
    if not 1 <= k <= n:
        raise ValidationError("need 1 <= k <= n")
    prod = channel.power(n)
    J = InputGroup.from_counts(prod.group, {(p, 1): k})
    thetas = enumerate_theta_hats(J)
    if thetas != [(0,)] or omega_theta(thetas[0], J) != 0:
        raise RuntimeError("expected a single profile with omega = 0")
    ens = InputEnsemble.regular(J)
    value = group_mutual_info(ens, prod, thetas[0], eps, mode)
    Pxy = np.full(p, 1 / p)[:, None] * channel.W
    Py = Pxy.sum(axis=0)
    joint, null = Pxy, np.full(p, 1 / p)[:, None] * Py[None, :]
    for _ in range(n - 1):
        joint = np.kron(joint, Pxy)
        null = np.kron(null, np.full(p, 1 / p)[:, None] * Py[None, :])
    direct = dh_classical(joint, null, eps, mode).value
    if not math.isclose(value, direct, rel_tol=1e-9, abs_tol=1e-9):
        raise RuntimeError(f"structured value {value} differs from direct product value {direct}")
    return value
