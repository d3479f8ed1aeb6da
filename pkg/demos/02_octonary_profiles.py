"""Message group Z4 inside an 8-ary additive-noise channel.

Differences between messages in Z4 fall into two valuation profiles: odd
differences (profile 0) and the difference 2 (profile 1). Each profile has
its own coset subgroup of Z8 and its own hypothesis test; the achievability
bound adds one exponential term per profile.

    python3 demos/02_octonary_profiles.py
"""

# %%
from gcap.catalog import octonary_channel
from gcap.channels import InputEnsemble
from gcap.groups import InputGroup, enumerate_theta_hats, omega_theta, t_theta_bound, t_theta_size, theta_map
from gcap.htest import group_mutual_info_classical
from gcap.rates import oneshot_converse, thm1_error_bound

ch = octonary_channel()
J = InputGroup.from_counts(ch.group, {(2, 2): 1})
print(f"rate log2|J| = {J.rate()}")

# %% the profile table
for theta in enumerate_theta_hats(J):
    H = theta_map(J, theta)
    print(f"profile {theta}: omega {omega_theta(theta, J):.2f}, |T| {t_theta_size(J, theta)} (product form {t_theta_bound(J, theta)}), coset subgroup of order {H.order}")

# %% two input laws: the code with the dither held fixed, and with the dither averaged out
fixed = InputEnsemble.regular(J)
averaged = InputEnsemble.averaged_over_dither(J)
print(f"fixed-dither support {fixed.support_indices.tolist()}, averaged support {averaged.support_indices.tolist()}")
for eps in (0.05, 0.1, 0.3):
    row = []
    for ens in (fixed, averaged):
        for theta in enumerate_theta_hats(J):
            row.append(group_mutual_info_classical(ens, ch, theta, eps))
    print(f"eps {eps:.2f}: fixed {row[0]:.4f} {row[1]:.4f} | averaged {row[2]:.4f} {row[3]:.4f}")

# %% randomized tests do not see the difference between the two laws
for ens, name in ((fixed, "fixed"), (averaged, "averaged")):
    vals = [group_mutual_info_classical(ens, ch, t, 0.1, "randomized") for t in enumerate_theta_hats(J)]
    print(f"{name:>8} randomized: " + " ".join(f"{v:.6f}" for v in vals))

# %% one-shot bounds: at rate 2 the error bound is far above 1, and the converse says why
alloc = {(0,): 0.1, (1,): 0.1}
print(f"error bound {thm1_error_bound(ch, J, alloc, ens=averaged).value:.4f}")
print(f"largest rate compatible with eps 0.2: {oneshot_converse(ch, J, 0.2):.4f}")
