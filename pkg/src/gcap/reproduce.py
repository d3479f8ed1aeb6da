"""Data tables behind the worked examples: the closed-form values, the eps
sweeps of the one-shot rates and the decimal-channel curves."""

from __future__ import annotations

import math

import numpy as np

from .asymptotic import (
    binary_entropy,
    cond_mutual_info_cq,
    example4_reference,
    example5_simplified,
    example6_degeneration,
    group_capacity,
    quaternary_holevo_terms,
)
from .catalog import binary_qubit_channel, bsc, octonary_channel, quaternary_qubit_channel, symmetric_channel
from .channels import InputEnsemble
from .groups import AbelianGroup, InputGroup, Subgroup, ValidationError, enumerate_theta_hats, omega_theta
from .htest import dh_classical, group_mutual_info_classical, ih_test_cq

EPS_GRID = tuple(round(0.01 * i, 2) for i in range(1, 100))
Table = list[dict]


def _regular(group: AbelianGroup, counts) -> InputEnsemble:
    return InputEnsemble.regular(InputGroup.from_counts(group, counts))


def example1_table(p: float) -> Table:
    """Breakpoints of the BSC one-shot rate, with the solver's value at each left end and midpoint."""
    if not 0 < p < 0.5:
        raise ValidationError("need 0 < p < 1/2")
    ch = bsc(p)
    P = np.full(2, 0.5)[:, None] * ch.W
    Q = np.full((2, 2), 0.25)
    edges = [0.0, p / 2, p, (1 + p) / 2, 1.0]
    exact = [0.0, math.log2(4 / 3), 1.0, 2.0]
    rows = []
    for lo, hi, val in zip(edges, edges[1:], exact):
        left = lo if lo > 0 else hi / 2
        rows.append(
            {
                "eps_low": lo,
                "eps_high": hi,
                "exact": val,
                "at_left": dh_classical(P, Q, left).value,
                "at_mid": dh_classical(P, Q, 0.5 * (lo + hi)).value,
            }
        )
    return rows


def example1_sweep(p: float, eps_grid=EPS_GRID) -> Table:
    ch = bsc(p)
    P = np.full(2, 0.5)[:, None] * ch.W
    Q = np.full((2, 2), 0.25)
    return [
        {"eps": e, "deterministic": dh_classical(P, Q, e).value, "randomized": dh_classical(P, Q, e, "randomized").value}
        for e in eps_grid
    ]


def example2_sweep(eps_grid=EPS_GRID) -> Table:
    ch = binary_qubit_channel()
    ens = _regular(ch.group, {(2, 1): 1})
    rows = []
    for e in eps_grid:
        op = ih_test_cq(ens, ch, (0,), e)
        rows.append({"eps": e, "operator": op.value})
    return rows


def example2_capacity() -> dict:
    ch = binary_qubit_channel()
    ens = _regular(ch.group, {(2, 1): 1})
    value = cond_mutual_info_cq(ens, ch, Subgroup.whole(ch.group))
    closed = binary_entropy(3 / 8) - 0.5 - 0.5 * binary_entropy(1 / 4)
    return {"capacity": value, "closed_form": closed, "group_capacity": group_capacity(ch).value}


def example3_sweep(eps_grid=EPS_GRID) -> Table:
    """Both profiles of J = Z4 inside Z8 on the octonary channel, input uniform on Z8."""
    ch = octonary_channel()
    ens = InputEnsemble.averaged_over_dither(InputGroup.from_counts(ch.group, {(2, 2): 1}))
    rows = []
    for e in eps_grid:
        row = {"eps": e}
        for t in enumerate_theta_hats(ens.J):
            for mode in ("deterministic", "randomized"):
                row[f"theta{t[0]}_{mode}"] = group_mutual_info_classical(ens, ch, t, e, mode)
        rows.append(row)
    return rows


def example4_curves(p_grid=None, with_capacity: bool = True) -> Table:
    """C(p) and L(p) for the decimal symmetric channel, plus the computed group capacity."""
    p_grid = [round(0.01 * i, 2) for i in range(1, 51)] if p_grid is None else p_grid
    rows = []
    for p in p_grid:
        _, _, C, L = example4_reference(p, 0.5)
        row = {"p": p, "C": C, "L": L}
        if with_capacity:
            row["group_capacity"] = group_capacity(symmetric_channel(10, p)).value
        rows.append(row)
    return rows


def example4_check(p: float) -> dict:
    cert = group_capacity(symmetric_channel(10, p))
    _, _, C, L = example4_reference(p, 0.5)
    ws = np.linspace(0.01, 0.99, 99)
    gap = max(min(A, B) - C for A, B, _, _ in (example4_reference(p, w) for w in ws))
    return {"p": p, "group_capacity": cert.value, "C": C, "L": L, "linear_below_capacity": L < C, "best_min_AB_minus_C": gap}


def example5_values() -> dict:
    ch = quaternary_qubit_channel()
    I4, I2, I2p = quaternary_holevo_terms(ch)
    return {"I4": I4, "I2": I2, "I2_prime": I2p, "capacity": group_capacity(ch).value, "closed_form": example5_simplified(ch)}


def example6_record(n: int = 2, k: int = 1, eps: float = 0.1, p: float = 0.1) -> dict:
    ch = bsc(p)
    value = example6_degeneration(ch, n, k, eps)
    J = InputGroup.from_counts(ch.group.power(n), {(2, 1): k})
    (theta,) = enumerate_theta_hats(J)
    return {"n": n, "k": k, "eps": eps, "p": p, "profiles": 1, "omega": omega_theta(theta, J), "I_H": value}


def reproduce(example: int, p: float = 0.1) -> dict[str, Table | dict]:
    """Named artifacts for one example; tables are lists of flat rows."""
    if example == 1:
        return {"table": example1_table(p), "sweep": example1_sweep(p)}
    if example == 2:
        return {"sweep": example2_sweep(), "capacity": example2_capacity()}
    if example == 3:
        return {"sweep": example3_sweep()}
    if example == 4:
        return {"curves": example4_curves(), "check": example4_check(p)}
    if example == 5:
        return {"values": example5_values()}
    if example == 6:
        return {"record": example6_record(p=p)}
    raise ValidationError(f"unknown example {example}; choose 1 to 6")
