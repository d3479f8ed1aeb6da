"""Hypothesis-testing rates of a binary symmetric channel.

With the input uniform, the joint law of (X, Y) has two atoms of mass
(1 - p)/2 and two of mass p/2, while the product of marginals is flat.
A set-valued test can only move in whole atoms, so its rate is a staircase
in eps; a randomized test interpolates between the steps.

    python3 demos/01_bsc_breakpoints.py
"""

# %%
import math

import numpy as np

from gcap.catalog import bsc
from gcap.htest import dh_classical

p = 0.1
P = 0.5 * bsc(p).W
Q = np.full((2, 2), 0.25)

# %% the staircase: the value only changes when eps crosses an atom boundary
print(f"{'eps':>6} {'set test':>10} {'randomized':>11}")
for eps in [0.01, 0.04, 0.05, 0.07, 0.1, 0.3, 0.54, 0.55, 0.9]:
    det = dh_classical(P, Q, eps).value
    rnd = dh_classical(P, Q, eps, "randomized").value
    print(f"{eps:6.2f} {det:10.4f} {rnd:11.4f}")

# %% steps sit at p/2, p and (1 + p)/2, with heights 0, log2(4/3), 1 and 2
steps = {"below p/2": 0.0, "p/2 to p": math.log2(4 / 3), "p to (1+p)/2": 1.0, "above (1+p)/2": 2.0}
for name, height in steps.items():
    print(f"{name:>15}: {height:.4f} bits")

# %% the chosen test is a plain set of (x, y) pairs
test = dh_classical(P, Q, 0.07)
print("accepted pairs:", [divmod(int(i), 2) for i in np.flatnonzero(test.weights)])
print(f"type-I error {1 - test.alpha:.3f}, type-II error {test.beta:.3f}")
