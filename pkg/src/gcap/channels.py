"""Channels over finite Abelian groups, coset-uniform input ensembles, and the
joint and alternative distributions used by the coding bounds."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import Mapping

import numpy as np

from .groups import (
    AbelianGroup,
    InputGroup,
    Subgroup,
    ThetaHat,
    ValidationError,
    check_cap,
    enumeration_cap,
    enumerate_etas,
    enumerate_theta_hats,
    group_from_json,
    t_theta_size,
    theta_map,
    transversal,
)
from .linalg import block_diag, check_density, density_from_json, density_to_json, kron

ROW_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class ClassicalChannel:
    group: AbelianGroup
    W: np.ndarray

    def __post_init__(self):
        W = np.asarray(self.W, dtype=float)
        if W.ndim != 2 or W.shape[0] != self.group.order:
            raise ValidationError(f"W must have {self.group.order} rows, got shape {W.shape}")
        bad = np.argwhere(~np.isfinite(W))
        if len(bad):
            i, j = bad[0]
            raise ValidationError(f"W[{i}][{j}] is not finite")
        bad = np.argwhere(W < 0)
        if len(bad):
            i, j = bad[0]
            raise ValidationError(f"W[{i}][{j}] is negative")
        sums = W.sum(axis=1)
        bad = np.flatnonzero(np.abs(sums - 1) > ROW_TOL)
        if len(bad):
            raise ValidationError(f"W[{bad[0]}] sums to {float(sums[bad[0]])!r}, expected 1")
        object.__setattr__(self, "W", W)

    @property
    def n_outputs(self) -> int:
        return self.W.shape[1]

    def power(self, n: int) -> ClassicalChannel:
        check_cap(self.group.order**n * self.n_outputs**n, "product channel")
        W = self.W
        for _ in range(n - 1):
            W = np.kron(W, self.W)
        return ClassicalChannel(self.group.power(n), W)

    def as_cq(self) -> CQChannel:
        return CQChannel(self.group, np.array([np.diag(row).astype(complex) for row in self.W]))

    def to_json(self) -> dict:
        return {"group": self.group.to_json(), "W": self.W.tolist()}


@dataclass(frozen=True, eq=False)
class CQChannel:
    group: AbelianGroup
    states: np.ndarray  # (|G|, d, d)

    def __post_init__(self):
        states = np.asarray(self.states, dtype=complex)
        if states.ndim != 3 or states.shape[0] != self.group.order:
            raise ValidationError(f"need {self.group.order} output states, got shape {states.shape}")
        for i, rho in enumerate(states):
            check_density(rho, name=f"states[{i}]")
        object.__setattr__(self, "states", states)

    @property
    def dim(self) -> int:
        return self.states.shape[1]

    def power(self, n: int) -> CQChannel:
        check_cap(self.group.order**n * self.dim ** (2 * n), "product channel")
        states = self.states
        for _ in range(n - 1):
            states = np.array([np.kron(a, b) for a in states for b in self.states])
        return CQChannel(self.group.power(n), states)

    def to_json(self) -> dict:
        return {"group": self.group.to_json(), "states": [density_to_json(s) for s in self.states]}


def channel_from_json(obj) -> ClassicalChannel | CQChannel:
    if not isinstance(obj, dict) or "group" not in obj:
        raise ValidationError('channel JSON needs a "group" entry')
    group = group_from_json(obj["group"])
    if "W" in obj:
        try:
            W = np.array(obj["W"], dtype=float)
        except (TypeError, ValueError) as exc:
            raise ValidationError(f"W is not a numeric matrix ({exc})") from exc
        return ClassicalChannel(group, W)
    if "states" in obj:
        states = [density_from_json(s, name=f"states[{i}]") for i, s in enumerate(obj["states"])]
        return CQChannel(group, np.array(states))
    raise ValidationError('channel JSON needs either "W" or "states"')


@dataclass(frozen=True, eq=False)
class InputEnsemble:
    """Uniform input on the coset H_eta + b, where H_eta is the image subgroup
    selected by eta for the message group J."""

    J: InputGroup
    eta: Mapping[tuple[int, int, int, int], int]
    b: np.ndarray
    averaged: bool = False

    def __post_init__(self):
        object.__setattr__(self, "eta", dict(self.eta))
        object.__setattr__(self, "b", self.support.representative(self.group.normalize(self.b)))

    @classmethod
    def regular(cls, J: InputGroup) -> InputEnsemble:
        return cls(J, {}, J.group.zero)

    @classmethod
    def averaged_over_dither(cls, J: InputGroup, eta=None) -> InputEnsemble:
        """Uniform input on all of G: the law of phi(u) + V once the uniform
        dither V is averaged out. Coset subgroups are those of ``eta``."""
        return cls(J, eta or {}, J.group.zero, averaged=True)

    @property
    def group(self) -> AbelianGroup:
        return self.J.group

    @cached_property
    def support(self) -> Subgroup:
        return Subgroup.whole(self.group) if self.averaged else theta_map(self.J, eta=self.eta)

    def coset_subgroup(self, theta: ThetaHat) -> Subgroup:
        return theta_map(self.J, theta, self.eta)

    @cached_property
    def support_indices(self) -> np.ndarray:
        G = self.group
        return np.sort(G.index(G.add(self.support.elements(), self.b)))

    @cached_property
    def probabilities(self) -> np.ndarray:
        P = np.zeros(self.group.order)
        P[self.support_indices] = 1 / self.support.order
        return P

    def describe(self) -> dict:
        return {
            "eta": {",".join(map(str, k)): v for k, v in sorted(self.eta.items())},
            "b": self.b.tolist(),
            "support_exponents": list(self.support.exps),
            "averaged_over_dither": self.averaged,
        }


def reduced_ensembles(J) -> list[InputEnsemble]:
    """One ensemble per distinct (H_eta, b, {H_{eta+theta}}) profile, b over the transversal of H_eta."""
    out, seen = [], set()
    thetas = enumerate_theta_hats(J)
    G = J.group
    whole = Subgroup.whole(G)
    for eta in enumerate_etas(J):
        support = theta_map(J, eta=eta)
        profile = tuple(theta_map(J, t, eta).exps for t in thetas)
        for b in transversal(whole, support):
            key = (support.exps, tuple(b), profile)
            if key in seen:
                continue
            seen.add(key)
            out.append(InputEnsemble(J, eta, b))
    return out


def _check_nested(ens: InputEnsemble, H: Subgroup) -> None:
    if not H.is_subgroup_of(ens.support):
        raise ValidationError(f"subgroup {H.exps} is not inside the input support {ens.support.exps}")


def _coset_average(values: np.ndarray, ens: InputEnsemble, H: Subgroup) -> np.ndarray:
    """For each x in the support, the mean of ``values`` over the coset x + H."""
    ids = H.coset_ids()[ens.support_indices]
    _, inverse, counts = np.unique(ids, return_inverse=True, return_counts=True)
    sums = np.zeros((len(counts),) + values.shape[1:], dtype=values.dtype)
    np.add.at(sums, inverse, values[ens.support_indices])
    shape = (-1,) + (1,) * (values.ndim - 1)
    return (sums / counts.reshape(shape))[inverse]


def joint_classical(ens: InputEnsemble, channel: ClassicalChannel) -> np.ndarray:
    return ens.probabilities[:, None] * channel.W


def coset_null_classical(ens: InputEnsemble, channel: ClassicalChannel, H: Subgroup) -> np.ndarray:
    """P_X(x) times the channel output law averaged over the coset of x in H."""
    _check_nested(ens, H)
    Q = np.zeros_like(channel.W)
    Q[ens.support_indices] = _coset_average(channel.W, ens, H) / ens.support.order
    return Q


def mixture_weights(J: InputGroup) -> dict[ThetaHat, float]:
    if J.order < 2:
        raise ValidationError("the mixture needs |J| >= 2")
    return {t: t_theta_size(J, t) / (J.order - 1) for t in enumerate_theta_hats(J)}


def mixture_P_XY_given_J(ens: InputEnsemble, channel: ClassicalChannel) -> np.ndarray:
    out = np.zeros_like(channel.W)
    for theta, weight in mixture_weights(ens.J).items():
        out += weight * coset_null_classical(ens, channel, ens.coset_subgroup(theta))
    return out


@dataclass(frozen=True, eq=False)
class CQBlockState:
    """Block-diagonal state sum_i weights[i] |label_i><label_i| (x) states[i]."""

    labels: tuple
    weights: np.ndarray
    states: np.ndarray  # (blocks, d, d)

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        if len(w) != len(self.labels) or len(w) != len(self.states):
            raise ValidationError("labels, weights and states must have equal length")
        if np.any(w < 0) or abs(w.sum() - 1) > 1e-9:
            raise ValidationError("block weights must be nonnegative and sum to 1")
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "states", np.asarray(self.states, dtype=complex))

    def operators(self) -> np.ndarray:
        return self.weights[:, None, None] * self.states

    def matrix(self) -> np.ndarray:
        return block_diag(self.operators())


def cq_joint(ens: InputEnsemble, channel: CQChannel) -> CQBlockState:
    idx = ens.support_indices
    w = np.full(len(idx), 1 / len(idx))
    return CQBlockState(tuple(int(i) for i in idx), w, channel.states[idx])


def cq_coset_null(ens: InputEnsemble, channel: CQChannel, H: Subgroup) -> CQBlockState:
    """Blocks keep the input weights; each state is the coset-averaged channel output."""
    _check_nested(ens, H)
    idx = ens.support_indices
    w = np.full(len(idx), 1 / len(idx))
    return CQBlockState(tuple(int(i) for i in idx), w, _coset_average(channel.states, ens, H))


def cq_mixture_pi_J(ens: InputEnsemble, channel: CQChannel) -> CQBlockState:
    idx = ens.support_indices
    states = np.zeros((len(idx), channel.dim, channel.dim), dtype=complex)
    for theta, weight in mixture_weights(ens.J).items():
        states += weight * _coset_average(channel.states, ens, ens.coset_subgroup(theta))
    w = np.full(len(idx), 1 / len(idx))
    return CQBlockState(tuple(int(i) for i in idx), w, states)


def product_distribution(P: np.ndarray, n: int) -> np.ndarray:
    """n-fold i.i.d. product of a probability table, flattened."""
    P = np.asarray(P, dtype=float).ravel()
    support = int(np.count_nonzero(P))
    if n * math.log2(max(support, 1)) > math.log2(enumeration_cap()):
        raise ValidationError(f"{n}-fold product of {support} atoms exceeds the enumeration cap")
    out = P
    for _ in range(n - 1):
        out = np.kron(out, P)
    return out


def product_extension(obj, n: int):
    """n-fold product of a distribution, a classical channel or a CQ channel."""
    if isinstance(obj, (ClassicalChannel, CQChannel)):
        return obj.power(n)
    return product_distribution(obj, n)


def product_state(rho: np.ndarray, n: int) -> np.ndarray:
    return kron(*([rho] * n))
