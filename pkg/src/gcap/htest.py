"""Hypothesis testing relative entropy, classical (set or randomized tests) and
quantum (operator tests), and the group mutual informations derived from it."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .channels import (
    ClassicalChannel,
    CQBlockState,
    CQChannel,
    InputEnsemble,
    coset_null_classical,
    cq_coset_null,
    cq_joint,
    joint_classical,
    product_distribution,
)
from .groups import ThetaHat, ValidationError
from .linalg import hermitian_eig

FEAS_TOL = 1e-12
STATE_BUDGET = 2_000_000


class ConvergenceError(RuntimeError):
    pass


@dataclass(eq=False)
class HypothesisTest:
    """An optimal test and its errors.

    ``kind`` is "set", "randomized" or "operator". ``weights`` holds per-atom
    acceptance weights for classical tests, or one operator per block for
    quantum tests. ``alpha`` is the acceptance probability under the null
    hypothesis and ``beta`` under the alternative.
    """

    kind: str
    weights: np.ndarray | list
    alpha: float
    beta: float
    exact: bool = True
    meta: dict = field(default_factory=dict)

    @property
    def value(self) -> float:
        return math.inf if self.beta <= 0 else 0.0 - math.log2(self.beta)

    def to_json(self) -> dict:
        v = self.value
        return {
            "value_bits": "inf" if math.isinf(v) else v,
            "achieved_alpha": self.alpha,
            "type_ii_error": self.beta,
            "test_kind": self.kind,
            "exact": self.exact,
        }


def _check_eps(eps: float) -> None:
    if not 0 < eps < 1:
        raise ValidationError(f"eps must lie in (0, 1), got {eps}")


def _ratio_classes(P: np.ndarray, Q: np.ndarray, idx: np.ndarray) -> list[np.ndarray]:
    """Atoms sorted by decreasing P/Q, with tied ratios merged; index order breaks ties."""
    # compare P_i Q_j against P_j Q_i to avoid dividing by tiny Q
    ratio = np.where(Q[idx] > 0, P[idx] / np.where(Q[idx] > 0, Q[idx], 1), np.inf)
    order = idx[np.lexsort((idx, -ratio))]
    classes, current = [], [order[0]]
    for a in order[1:]:
        b = current[0]
        if abs(P[a] * Q[b] - P[b] * Q[a]) <= 1e-12 * max(P[a] * Q[b], P[b] * Q[a]):
            current.append(a)
        else:
            classes.append(np.array(current))
            current = [a]
    classes.append(np.array(current))
    return classes


def _randomized(P: np.ndarray, Q: np.ndarray, eps: float) -> HypothesisTest:
    target = 1 - eps
    weights = np.zeros_like(P)
    idx = np.flatnonzero(P > 0)
    alpha = beta = 0.0
    threshold = 0.0
    for cls in _ratio_classes(P, Q, idx):
        mass = P[cls].sum()
        if alpha + mass < target - FEAS_TOL:
            weights[cls] = 1
            alpha += mass
            beta += Q[cls].sum()
            continue
        frac = min(max((target - alpha) / mass, 0.0), 1.0)
        weights[cls] = frac
        alpha += frac * mass
        beta += frac * Q[cls].sum()
        threshold = P[cls[0]] / Q[cls[0]] if Q[cls[0]] > 0 else math.inf
        break
    return HypothesisTest("randomized", weights, alpha, beta, meta={"threshold": threshold})


def _deterministic(P: np.ndarray, Q: np.ndarray, eps: float) -> HypothesisTest:
    """Minimum-Q set with P-mass at least 1 - eps.

    Atoms with identical (P, Q) are interchangeable and handled as groups. The
    groups are swept in likelihood-ratio order while keeping only the Pareto
    frontier of (mass, cost) over partial selections; states whose cost plus
    the fractional completion cannot beat the incumbent are dropped. Exact
    unless the frontier outgrows the state budget.
    """
    need = 1 - eps - FEAS_TOL
    idx = np.flatnonzero(P > 0)
    keys = np.stack([P[idx], Q[idx]], axis=1)
    uniq, inverse = np.unique(keys, axis=0, return_inverse=True)
    inverse = inverse.ravel()
    members = [idx[inverse == g] for g in range(len(uniq))]
    p_at, q_at = uniq[:, 0], uniq[:, 1]
    ratio = np.where(q_at > 0, p_at / np.where(q_at > 0, q_at, 1), np.inf)
    order = np.lexsort((np.array([m[0] for m in members]), -ratio))
    p_at, q_at, members = p_at[order], q_at[order], [members[g] for g in order]
    mult = np.array([len(m) for m in members])
    n_groups = len(members)
    cum_p = np.concatenate([[0.0], np.cumsum(p_at * mult)])
    cum_q = np.concatenate([[0.0], np.cumsum(q_at * mult)])

    def completion(i: int, need_left: np.ndarray) -> np.ndarray:
        """Fractional cost of gathering ``need_left`` more mass from groups i onward."""
        target = cum_p[i] + np.maximum(need_left, 0.0)
        j = np.searchsorted(cum_p, target, side="left")
        out = np.full(need_left.shape, np.inf)
        ok = j <= n_groups
        j = np.clip(j, 1, n_groups)
        rest = target - cum_p[j - 1]
        # rest / p stays below the group size on the lanes that are kept
        with np.errstate(over="ignore", invalid="ignore"):
            frac = np.where(rest > 0, np.maximum(rest, 0.0) / p_at[j - 1] * q_at[j - 1], 0.0)
        out[ok] = (cum_q[j - 1] - cum_q[i] + frac)[ok]
        out[need_left <= 0] = 0.0
        return out

    # incumbent from the threshold family: whole groups in ratio order
    counts = np.zeros(n_groups, dtype=int)
    got = 0.0
    for j in range(n_groups):
        if got >= need:
            break
        with np.errstate(over="ignore"):
            want = (need - got) / p_at[j]
        take = mult[j] if want >= mult[j] else math.ceil(want - 1e-12)
        counts[j] = take
        got += take * p_at[j]
    best_cost, best_counts = float(np.dot(counts, q_at)), counts

    mass = np.zeros(1)
    cost = np.zeros(1)
    layers = []  # per group: (parent state, count taken)
    states = 0
    exhausted = False
    for i in range(n_groups):
        c = np.arange(mult[i] + 1)
        new_mass = np.minimum((mass[:, None] + c[None, :] * p_at[i]).ravel(), need)
        new_cost = (cost[:, None] + c[None, :] * q_at[i]).ravel()
        parent = np.repeat(np.arange(len(mass)), len(c))
        taken = np.tile(c, len(mass))
        done = new_mass >= need
        if np.any(done):
            k = np.flatnonzero(done)[np.argmin(new_cost[done])]
            if new_cost[k] < best_cost - 1e-15:
                best_cost = float(new_cost[k])
                best_counts = _trace_counts(layers, int(parent[k]), int(taken[k]), n_groups, i)
        keep = ~done & (new_cost + completion(i + 1, need - new_mass) < best_cost - 1e-15)
        new_mass, new_cost, parent, taken = new_mass[keep], new_cost[keep], parent[keep], taken[keep]
        # Pareto filter: by mass descending, keep strictly cheaper than everything heavier
        o = np.lexsort((new_cost, -new_mass))
        new_mass, new_cost, parent, taken = new_mass[o], new_cost[o], parent[o], taken[o]
        prev_min = np.minimum.accumulate(np.concatenate([[np.inf], new_cost[:-1]]))
        front = new_cost < prev_min - 1e-15
        mass, cost = new_mass[front], new_cost[front]
        layers.append((parent[front], taken[front]))
        states += len(mass)
        if len(mass) == 0:
            break
        if states > STATE_BUDGET:
            exhausted = True
            break

    weights = np.zeros_like(P)
    for g, c in enumerate(best_counts):
        weights[members[g][:c]] = 1
    alpha = float(np.dot(weights, P))
    beta = float(np.dot(weights, Q))
    return HypothesisTest("set", weights, alpha, beta, exact=not exhausted, meta={"states": states, "atoms": len(idx)})


def _trace_counts(layers, parent: int, taken: int, n_groups: int, last: int) -> np.ndarray:
    counts = np.zeros(n_groups, dtype=int)
    counts[last] = taken
    for i in range(last - 1, -1, -1):
        par, tk = layers[i]
        counts[i] = tk[parent]
        parent = int(par[parent])
    return counts


def dh_classical(P, Q, eps: float, mode: str = "deterministic") -> HypothesisTest:
    """D_H^eps(P||Q) over deterministic (set) or randomized tests."""
    _check_eps(eps)
    P = np.asarray(P, dtype=float).ravel()
    Q = np.asarray(Q, dtype=float).ravel()
    if P.shape != Q.shape:
        raise ValidationError(f"distributions have different supports: {P.shape} vs {Q.shape}")
    for name, D in (("P", P), ("Q", Q)):
        if not np.all(np.isfinite(D)) or np.any(D < 0) or abs(D.sum() - 1) > 1e-9:
            raise ValidationError(f"{name} is not a probability distribution")
    if mode == "randomized":
        return _randomized(P, Q, eps)
    if mode == "deterministic":
        return _deterministic(P, Q, eps)
    raise ValidationError(f"unknown mode {mode!r}")


def _block_pairs(rho, sigma) -> tuple[list[np.ndarray], list[np.ndarray]]:
    if isinstance(rho, CQBlockState) != isinstance(sigma, CQBlockState):
        raise ValidationError("both states must be block states or both plain matrices")
    if isinstance(rho, CQBlockState):
        if rho.labels != sigma.labels or rho.states.shape != sigma.states.shape:
            raise ValidationError("block states must share labels and block dimensions")
        return list(rho.operators()), list(sigma.operators())
    rho, sigma = np.asarray(rho, dtype=complex), np.asarray(sigma, dtype=complex)
    if rho.shape != sigma.shape:
        raise ValidationError(f"states have different shapes: {rho.shape} vs {sigma.shape}")
    return [rho], [sigma]


def _np_spectra(R, S, t):
    return [hermitian_eig(r - t * s) for r, s in zip(R, S)]


def _accepted_mass(R, spectra) -> float:
    total = 0.0
    for r, sp in zip(R, spectra):
        U = sp.vectors[:, sp.values > 0]
        total += np.einsum("ij,ik,kj->", U.conj(), r, U).real
    return total


def dh_quantum(rho, sigma, eps: float, projective: bool = False, max_iter: int = 200) -> HypothesisTest:
    """D_H^eps(rho||sigma) over operator tests 0 <= L <= I, blockwise.

    Bisection on t brackets the Neyman-Pearson threshold where tr[{rho - t sigma > 0} rho]
    crosses 1 - eps; the eigenvectors whose eigenvalue changes sign across the
    bracket receive a common fractional weight that meets the constraint exactly.
    With ``projective`` the crossing space is accepted in full instead.
    """
    _check_eps(eps)
    R, S = _block_pairs(rho, sigma)
    target = 1 - eps
    # mass of rho on the kernel of sigma is free
    kernel_ops, kernel_mass = [], 0.0
    for r, s in zip(R, S):
        sp = hermitian_eig(s)
        scale = max(abs(sp.values).max(), 1e-300)
        K = sp.vectors[:, sp.values <= 1e-10 * scale]
        kernel_ops.append(K @ K.conj().T)
        kernel_mass += np.einsum("ij,ik,kj->", K.conj(), r, K).real
    if kernel_mass >= target - FEAS_TOL:
        c = 1.0 if projective else min(target / kernel_mass, 1.0)
        ops = [c * K for K in kernel_ops]
        return HypothesisTest("operator", ops, c * kernel_mass, 0.0, meta={"threshold": math.inf})

    lo, hi = 0.0, 1.0
    while _accepted_mass(R, _np_spectra(R, S, hi)) >= target:
        lo, hi = hi, 2 * hi
        if hi > 1e300:
            raise ConvergenceError("threshold search diverged")
    it = 0
    while it < max_iter and hi - lo > 4e-16 * hi:
        mid = 0.5 * (lo + hi)
        if _accepted_mass(R, _np_spectra(R, S, mid)) >= target:
            lo = mid
        else:
            hi = mid
        it += 1
    spec_lo = _np_spectra(R, S, lo)
    spec_hi = _np_spectra(R, S, hi)
    base_ops, cross_ops = [], []
    base = cross = 0.0
    for r, a, b in zip(R, spec_lo, spec_hi):
        n_lo = int(np.sum(a.values > 0))
        n_hi = min(int(np.sum(b.values > 0)), n_lo)
        U, C = a.vectors[:, :n_hi], a.vectors[:, n_hi:n_lo]
        base_ops.append(U @ U.conj().T)
        cross_ops.append(C @ C.conj().T)
        base += np.einsum("ij,ik,kj->", U.conj(), r, U).real
        cross += np.einsum("ij,ik,kj->", C.conj(), r, C).real
    if projective or cross <= 0:
        c = 1.0
    else:
        c = min(max((target - base) / cross, 0.0), 1.0)
    ops = [u + c * x for u, x in zip(base_ops, cross_ops)]
    alpha = base + c * cross
    beta = max(sum(np.trace(op @ s).real for op, s in zip(ops, S)), 0.0)
    if alpha < target - 1e-9:
        raise ConvergenceError(f"acceptance {alpha} misses 1 - eps = {target} after {it} steps")
    return HypothesisTest("operator", ops, alpha, beta, meta={"threshold": 0.5 * (lo + hi), "iterations": it})


def ih_test_classical(ens: InputEnsemble, channel: ClassicalChannel, theta: ThetaHat, eps: float, mode: str = "deterministic") -> HypothesisTest:
    P = joint_classical(ens, channel)
    Q = coset_null_classical(ens, channel, ens.coset_subgroup(theta))
    return dh_classical(P, Q, eps, mode)


def group_mutual_info_classical(ens: InputEnsemble, channel: ClassicalChannel, theta: ThetaHat, eps: float, mode: str = "deterministic") -> float:
    return ih_test_classical(ens, channel, theta, eps, mode).value


def ih_test_cq(ens: InputEnsemble, channel: CQChannel, theta: ThetaHat, eps: float) -> HypothesisTest:
    rho = cq_joint(ens, channel)
    sigma = cq_coset_null(ens, channel, ens.coset_subgroup(theta))
    return dh_quantum(rho, sigma, eps)


def group_mutual_info_cq(ens: InputEnsemble, channel: CQChannel, theta: ThetaHat, eps: float) -> float:
    return ih_test_cq(ens, channel, theta, eps).value


def group_mutual_info(ens: InputEnsemble, channel, theta: ThetaHat, eps: float, mode: str = "deterministic") -> float:
    if isinstance(channel, CQChannel):
        return group_mutual_info_cq(ens, channel, theta, eps)
    return group_mutual_info_classical(ens, channel, theta, eps, mode)


def relative_entropy(P, Q) -> float:
    P = np.asarray(P, dtype=float).ravel()
    Q = np.asarray(Q, dtype=float).ravel()
    m = P > 0
    if np.any(Q[m] == 0):
        return math.inf
    return float(np.sum(P[m] * np.log2(P[m] / Q[m])))


def aep_check(P, Q, eps: float, n_list, mode: str = "randomized") -> list[tuple[int, float]]:
    """Normalized D_H^eps over i.i.d. products, one entry per block length."""
    out = []
    for n in n_list:
        Pn, Qn = product_distribution(P, n), product_distribution(Q, n)
        out.append((n, dh_classical(Pn, Qn, eps, mode).value / n))
    return out
