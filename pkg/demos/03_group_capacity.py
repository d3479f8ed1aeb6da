"""Single-letter group capacity.

The capacity of group codes is a maximin: an outer search over weight
vectors on the cyclic factors, and for each weight vector a small linear
program over input cosets. The certificate records the binding profiles.

    python3 demos/03_group_capacity.py
"""

# %%
import math

from gcap.asymptotic import example4_reference, example5_simplified, group_capacity, quaternary_holevo_terms
from gcap.catalog import quaternary_qubit_channel, symmetric_channel

# %% a 10-ary symmetric channel: group codes over Z10 reach the Shannon capacity,
# while linear codes over Z7 stay strictly below it
print(f"{'p':>5} {'group cap':>10} {'Shannon':>8} {'Z7 linear':>10}")
for p in (0.05, 0.1, 0.2, 0.3):
    cert = group_capacity(symmetric_channel(10, p))
    _, _, C, L = example4_reference(p, 0.5)
    print(f"{p:5.2f} {cert.value:10.5f} {C:8.5f} {L:10.5f}")

# %% a qubit channel on Z4: the answer is max{min{I4, I2 + I2'}, I2, I2'}
ch = quaternary_qubit_channel()
I4, I2, I2p = quaternary_holevo_terms(ch)
cert = group_capacity(ch)
print(f"I4 {I4:.4f}  I2 {I2:.4f}  I2' {I2p:.4f}")
print(f"group capacity {cert.value:.4f}, closed form {example5_simplified(ch):.4f}")
print("weights:", {f"Z{p ** s}": round(w, 3) for (p, s), w in cert.weights.items()})
for row in cert.slack:
    print(f"  profile {row['theta']}: objective {row['objective']:.4f}, slack {row['slack']:.2e}")

# %% never above log2 |G|
print(f"ceiling {math.log2(4):.1f} bits")
