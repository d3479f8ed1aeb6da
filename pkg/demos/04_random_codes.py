"""Random group codes, exhaustively and by sampling.

An encoder is a homomorphism from the message group into G plus a uniform
dither. Exhaustive enumeration confirms the pairwise law of codewords; the
Monte-Carlo simulator estimates decoding error with Wilson intervals.

    python3 demos/04_random_codes.py
"""

# %%
from gcap.catalog import binary_qubit_channel, bsc, octonary_channel
from gcap.ensemble import lemma2_exhaustive, simulate_classical, simulate_cq_srm
from gcap.groups import AbelianGroup, InputGroup, enumerate_theta_hats

# %% pair law over every code: each admissible codeword pair is equally likely
G = AbelianGroup.cyclic(8)
J = InputGroup.from_counts(G, {(2, 2): 1})
for theta in enumerate_theta_hats(J, include_all_s=True):
    ok, info = lemma2_exhaustive(J, theta)
    print(f"profile {theta}: {info['codes']} codes, frequency {info['expected']}, {'uniform' if ok else 'NOT uniform'}")

# %% BSC with one-bit messages: the bound exceeds 1, the simulated error does not
ch = bsc(0.1)
J2 = InputGroup.from_counts(ch.group, {(2, 1): 1})
for decoder in ("region", "ml"):
    rep = simulate_classical(ch, J2, 0.1, decoder=decoder, trials=100_000, seed=0)
    lo, hi = rep.interval
    print(f"{decoder:>6}: error {rep.error_rate:.4f} [{lo:.4f}, {hi:.4f}], bound {rep.bound:.3f}")

# %% the octonary channel with Z4 messages
ch8 = octonary_channel()
J4 = InputGroup.from_counts(ch8.group, {(2, 2): 1})
rep = simulate_classical(ch8, J4, 0.2, decoder="ml", trials=50_000, seed=1)
print(f"octonary ML error {rep.error_rate:.4f}")

# %% square-root decoding on a qubit channel
cq = binary_qubit_channel()
rep = simulate_cq_srm(cq, InputGroup.from_counts(cq.group, {(2, 1): 1}), 0.1, trials=500, seed=0)
print(f"square-root decoder error {rep.error_rate:.4f} (D_H {rep.meta['d_h']:.4f}), bound {rep.bound:.3f}")
