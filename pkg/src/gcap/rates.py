"""One-shot achievability and converse bounds for group codes."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Mapping, NamedTuple

import numpy as np

from .channels import (
    ClassicalChannel,
    CQChannel,
    InputEnsemble,
    cq_joint,
    cq_mixture_pi_J,
    joint_classical,
    mixture_P_XY_given_J,
    reduced_ensembles,
)
from .groups import (
    InputGroup,
    ThetaHat,
    ValidationError,
    enumerate_theta_hats,
    omega_theta,
    t_theta_bound,
    t_theta_size,
)
from .htest import dh_classical, dh_quantum, group_mutual_info


class Bound(NamedTuple):
    value: float
    vacuous: bool


def _ensemble(J: InputGroup, eta=None, b=None, ens: InputEnsemble | None = None) -> InputEnsemble:
    """The input law at (eta, b), or ``ens`` when one is supplied."""
    if ens is not None:
        if ens.J != J:
            raise ValidationError("ensemble was built for a different J")
        return ens
    return InputEnsemble(J, eta or {}, J.group.zero if b is None else b)


def _check_channel(channel, J: InputGroup) -> None:
    if channel.group != J.group:
        raise ValidationError("J must be defined over the channel input group")


def allocate_eps(J: InputGroup, eps: float, policy: str = "uniform", channel=None, ens=None, mode="deterministic") -> dict[ThetaHat, float]:
    """Split eps over the nontrivial valuation profiles.

    ``uniform`` gives eps/M to each; ``grid`` (M <= 3) searches a simplex grid
    for the split minimizing the first achievability bound.
    """
    if not 0 < eps < 1:
        raise ValidationError(f"eps must lie in (0, 1), got {eps}")
    thetas = enumerate_theta_hats(J)
    M = len(thetas)
    if policy == "uniform":
        return {t: eps / M for t in thetas}
    if policy == "grid":
        if M > 3 or channel is None:
            raise ValidationError("grid allocation needs a channel and at most 3 profiles")
        ens = ens or _ensemble(J)
        best = None
        for fr in _simplex_grid(M):
            alloc = {t: eps * f for t, f in zip(thetas, fr)}
            val = thm1_error_bound(channel, J, alloc, mode=mode, ens=ens).value
            if best is None or val < best[0] - 1e-15:
                best = (val, alloc)
        return best[1]
    raise ValidationError(f"unknown allocation policy {policy!r}")


def _check_alloc(J: InputGroup, alloc: Mapping[ThetaHat, float]) -> float:
    thetas = enumerate_theta_hats(J)
    if set(alloc) != set(thetas):
        raise ValidationError(f"allocation must cover exactly {thetas}")
    if any(v <= 0 for v in alloc.values()):
        raise ValidationError("every allocated eps must be positive")
    total = sum(alloc.values())
    if total >= 1:
        raise ValidationError(f"allocated eps sums to {total} >= 1")
    return total


def ih_values(channel, J: InputGroup, alloc: Mapping[ThetaHat, float], eta=None, b=None, mode="deterministic", ens: InputEnsemble | None = None) -> dict[ThetaHat, float]:
    ens = _ensemble(J, eta, b, ens)
    return {t: group_mutual_info(ens, channel, t, e, mode) for t, e in alloc.items()}


def _exponential_sum(J: InputGroup, ih: Mapping[ThetaHat, float], exact_counts: bool) -> float:
    R = J.rate()
    total = 0.0
    for t, val in ih.items():
        log_size = math.log2(t_theta_size(J, t)) if exact_counts else (1 - omega_theta(t, J)) * R
        total += 0.0 if math.isinf(val) else 2.0 ** (log_size - val)
    return total


def thm1_error_bound(channel: ClassicalChannel, J: InputGroup, alloc: Mapping[ThetaHat, float], eta=None, b=None, mode="deterministic", exact_counts=False, ens: InputEnsemble | None = None) -> Bound:
    """eps + sum over profiles of 2^{(1-omega) R - I_H}.

    With ``exact_counts`` the exponent uses log |T_theta| in place of (1-omega) R.
    """
    _check_channel(channel, J)
    eps = _check_alloc(J, alloc)
    val = eps + _exponential_sum(J, ih_values(channel, J, alloc, eta, b, mode, ens), exact_counts)
    return Bound(val, val > 1)


def thm2_rate_bound(channel: ClassicalChannel, J: InputGroup, eps: float, eps_prime: float, eta=None, b=None, mode="deterministic", ens: InputEnsemble | None = None) -> Bound:
    """D_H^eps(P_XY || P_{XY|J}) - log2 1/(eps' - eps)."""
    _check_channel(channel, J)
    if not 0 < eps < eps_prime < 1:
        raise ValidationError("need 0 < eps < eps' < 1")
    ens = _ensemble(J, eta, b, ens)
    d = dh_classical(joint_classical(ens, channel), mixture_P_XY_given_J(ens, channel), eps, mode).value
    val = d - math.log2(1 / (eps_prime - eps))
    return Bound(val, val < 0)


def prop1_check(channel: ClassicalChannel, J: InputGroup, alloc: Mapping[ThetaHat, float], eta=None, b=None, mode="randomized", ens: InputEnsemble | None = None) -> tuple[float, float, bool]:
    """Compare D_H^eps(P_XY || P_{XY|J}) with -log2 sum_theta |T|/(|J|-1) 2^{-I_H^{eps_theta}}.

    eps is the total allocation. The right side is what the per-profile tests
    certify for the mixture test.
    """
    _check_channel(channel, J)
    eps = _check_alloc(J, alloc)
    ens = _ensemble(J, eta, b, ens)
    lhs = dh_classical(joint_classical(ens, channel), mixture_P_XY_given_J(ens, channel), eps, mode).value
    ih = ih_values(channel, J, alloc, mode=mode, ens=ens)
    s = sum(t_theta_size(J, t) / (J.order - 1) * (0.0 if math.isinf(v) else 2.0**-v) for t, v in ih.items())
    rhs = math.inf if s == 0 else -math.log2(s)
    return lhs, rhs, lhs >= rhs - 1e-9


def _simplex_grid(M: int, steps: int = 20) -> list[tuple[float, ...]]:
    out = []
    for parts in itertools.product(range(1, steps), repeat=M - 1):
        last = steps - sum(parts)
        if last >= 1:
            out.append(tuple(c / steps for c in parts + (last,)))
    return out or [(1.0,)]


def _maxmin(channel, J: InputGroup, ensembles, allocations, mode) -> tuple[float, InputEnsemble, ThetaHat, dict]:
    """Best (value, ensemble, binding profile, allocation) of min_theta I_H / (1 - omega)."""
    thetas = enumerate_theta_hats(J)
    best = None
    for ens in ensembles:
        cache: dict = {}
        for alloc in allocations:
            worst = None
            for t in thetas:
                key = (t, alloc[t])
                if key not in cache:
                    cache[key] = group_mutual_info(ens, channel, t, alloc[t], mode) / (1 - omega_theta(t, J))
                if worst is None or cache[key] < worst[0]:
                    worst = (cache[key], t)
            if best is None or worst[0] > best[0]:
                best = (worst[0], ens, worst[1], alloc)
    return best


def oneshot_converse(channel, J: InputGroup, eps: float, eta=None, b=None, ens: InputEnsemble | None = None) -> float:
    """Largest rate compatible with error eps: max over input cosets of
    min over profiles of I_H^eps / (1 - omega), with randomized or operator tests.

    Passing ``eta``/``b`` restricts to that input coset.
    """
    _check_channel(channel, J)
    if not 0 < eps < 1:
        raise ValidationError(f"eps must lie in (0, 1), got {eps}")
    if ens is not None or eta is not None or b is not None:
        ensembles = [_ensemble(J, eta, b, ens)]
    else:
        ensembles = reduced_ensembles(J)
    full = {t: eps for t in enumerate_theta_hats(J)}
    return _maxmin(channel, J, ensembles, [full], "randomized")[0]


def oneshot_group_capacity(channel, J: InputGroup, eps: float, policy: str = "uniform", mode="deterministic"):
    """Max over reduced (eta, b) of min over profiles of I_H^{eps_theta} / (1 - omega).

    ``policy`` is "uniform" (eps/M each) or "grid" (M <= 3: best split on a
    simplex grid, chosen per input coset). Returns (value, ensemble, binding
    profile).
    """
    _check_channel(channel, J)
    thetas = enumerate_theta_hats(J)
    if policy == "uniform":
        allocations = [allocate_eps(J, eps)]
    elif policy == "grid":
        if len(thetas) > 3:
            raise ValidationError("grid allocation supports at most 3 profiles")
        allocations = [{t: eps * f for t, f in zip(thetas, fr)} for fr in _simplex_grid(len(thetas))]
    else:
        raise ValidationError(f"unknown allocation policy {policy!r}")
    return _maxmin(channel, J, reduced_ensembles(J), allocations, mode)[:3]


def thm4_error_bound(channel: CQChannel, J: InputGroup, alloc: Mapping[ThetaHat, float], eta=None, b=None, ens: InputEnsemble | None = None) -> Bound:
    """sqrt(eps)(33 + 16 |Theta| zeta(G)) + 8 sum 2^{(1-omega) R - I_H}."""
    _check_channel(channel, J)
    eps = _check_alloc(J, alloc)
    ih = ih_values(channel, J, alloc, eta, b, ens=ens)
    val = math.sqrt(eps) * (33 + 16 * len(alloc) * J.group.zeta) + 8 * _exponential_sum(J, ih, False)
    return Bound(val, val > 1)


def thm5_test(channel: CQChannel, J: InputGroup, eps: float, eta=None, b=None, ens: InputEnsemble | None = None):
    ens = _ensemble(J, eta, b, ens)
    return dh_quantum(cq_joint(ens, channel), cq_mixture_pi_J(ens, channel), eps)


def thm5_rate_bound(channel: CQChannel, J: InputGroup, eps: float, eps_prime: float, eta=None, b=None, ens: InputEnsemble | None = None) -> Bound:
    """D_H^eps(pi || pi_J) - log2(4 eps' / (eps' - eps)^2)."""
    _check_channel(channel, J)
    if not 0 < eps < eps_prime < 1:
        raise ValidationError("need 0 < eps < eps' < 1")
    d = thm5_test(channel, J, eps, eta, b, ens).value
    val = d - math.log2(4 * eps_prime / (eps_prime - eps) ** 2)
    return Bound(val, val < 0)


def srm_error_bound(d_value: float, eps: float, rate: float) -> float:
    """Error of the square-root decoder built from a test with type-I error eps:
    min over c > 0 of (1 + c) eps + (2 + c + 1/c) 2^{R - D}."""
    if math.isinf(d_value):
        return eps
    x = 2.0 ** (rate - d_value)
    # stationary point of (1 + c) eps + (2 + c + 1/c) x
    c = math.sqrt(x / (eps + x))
    return (1 + c) * eps + (2 + c + 1 / c) * x


@dataclass
class OneShotReport:
    rows: list[dict]
    thm1_error_bound: Bound
    thm2_rate_bound: Bound | None
    converse_rate: float
    ensemble: dict
    allocation: dict
    rate: float
    meta: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        def clean(v):
            return "inf" if isinstance(v, float) and math.isinf(v) else v

        return {
            "rate": self.rate,
            "ensemble": self.ensemble,
            "allocation": {",".join(map(str, t)): e for t, e in self.allocation.items()},
            "profiles": [{k: clean(v) for k, v in r.items()} for r in self.rows],
            "thm1_error_bound": {"value": self.thm1_error_bound.value, "vacuous": self.thm1_error_bound.vacuous},
            "thm2_rate_bound": None
            if self.thm2_rate_bound is None
            else {"value": clean(self.thm2_rate_bound.value), "vacuous": self.thm2_rate_bound.vacuous},
            "converse_rate": clean(self.converse_rate),
            **self.meta,
        }


def oneshot_report(channel, J: InputGroup, eps: float, eps_prime: float | None = None, eta=None, b=None, policy="uniform", mode="deterministic", ens: InputEnsemble | None = None) -> OneShotReport:
    """Per-profile table plus the achievability and converse bounds at one (eta, b)."""
    ens = _ensemble(J, eta, b, ens)
    alloc = allocate_eps(J, eps, policy, channel=channel, ens=ens, mode=mode)
    quantum = isinstance(channel, CQChannel)
    ih = ih_values(channel, J, alloc, mode=mode, ens=ens)
    rows = [
        {
            "theta": ",".join(map(str, t)),
            "omega": omega_theta(t, J),
            "T_size": t_theta_size(J, t),
            "T_size_product_form": t_theta_bound(J, t),
            "eps": alloc[t],
            "I_H": ih[t],
        }
        for t in alloc
    ]
    if quantum:
        first = thm4_error_bound(channel, J, alloc, ens=ens)
        second = thm5_rate_bound(channel, J, eps, eps_prime, ens=ens) if eps_prime else None
    else:
        first = thm1_error_bound(channel, J, alloc, mode=mode, ens=ens)
        second = thm2_rate_bound(channel, J, eps, eps_prime, mode=mode, ens=ens) if eps_prime else None
    converse = oneshot_converse(channel, J, eps, ens=ens)
    return OneShotReport(rows, first, second, converse, ens.describe(), alloc, J.rate(), {"quantum": quantum, "mode": "operator" if quantum else mode})
