"""Finite Abelian groups in primary form, their coset structure, and the
random-homomorphism code ensemble.

A group is stored as an ordered list of cyclic factors ``Z_{p^r}``. Elements are
integer vectors of residues, one per factor, and are indexed in mixed radix with
the last factor varying fastest.
"""

from __future__ import annotations

import itertools
import math
import os
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Iterator, Mapping, Sequence

import numpy as np
from sympy import factorint, isprime

DEFAULT_CAP = 10**6


class ValidationError(ValueError):
    """Raised for malformed or inconsistent inputs."""


class CapExceededError(ValidationError):
    """Raised when an enumeration would exceed the configured cap."""


def enumeration_cap() -> int:
    """Enumeration cap, overridable with the ``GCAP_CAP`` environment variable."""
    raw = os.environ.get("GCAP_CAP")
    if raw is None:
        return DEFAULT_CAP
    try:
        cap = int(float(raw))
    except ValueError as exc:
        raise ValidationError(f"GCAP_CAP must be an integer, got {raw!r}") from exc
    if cap < 1:
        raise ValidationError("GCAP_CAP must be positive")
    return cap


def check_cap(size: int, what: str) -> None:
    cap = enumeration_cap()
    if size > cap:
        raise CapExceededError(f"{what} has size {size}, above the enumeration cap {cap}")


@dataclass(frozen=True)
class AbelianGroup:
    """Direct sum of cyclic groups of prime-power order.

    ``factors`` lists ``(p, r)`` for each cyclic component in storage order. The
    m-th repetition of a pair ``(p, r)`` gets the label ``(p, r, m)`` with m from 1.
    """

    factors: tuple[tuple[int, int], ...]

    def __post_init__(self):
        if not self.factors:
            raise ValidationError("a group needs at least one cyclic factor")
        for p, r in self.factors:
            if not isinstance(p, (int, np.integer)) or not isprime(int(p)):
                raise ValidationError(f"{p} is not a prime")
            if int(r) < 1:
                raise ValidationError(f"exponent r must be >= 1, got {r}")
        object.__setattr__(self, "factors", tuple((int(p), int(r)) for p, r in self.factors))

    @classmethod
    def from_primary_spec(cls, spec: Iterable[Sequence[int]]) -> AbelianGroup:
        """Build from ``[(p, r, multiplicity), ...]``; factors are sorted by (p, r)."""
        seen = set()
        rows = []
        for entry in spec:
            if len(entry) != 3:
                raise ValidationError(f"primary spec entries are (p, r, mult), got {entry!r}")
            p, r, mult = (int(v) for v in entry)
            if (p, r) in seen:
                raise ValidationError(f"duplicate pair (p, r) = ({p}, {r})")
            if mult < 1:
                raise ValidationError(f"multiplicity must be >= 1 for ({p}, {r})")
            seen.add((p, r))
            rows.append((p, r, mult))
        rows.sort()
        return cls(tuple((p, r) for p, r, mult in rows for _ in range(mult)))

    @classmethod
    def cyclic(cls, n: int) -> AbelianGroup:
        """``Z_n`` split into its primary components."""
        if n < 2:
            raise ValidationError("Z_n needs n >= 2")
        return cls(tuple(sorted(factorint(n).items())))

    @cached_property
    def labels(self) -> tuple[tuple[int, int, int], ...]:
        count: dict[tuple[int, int], int] = {}
        out = []
        for p, r in self.factors:
            count[(p, r)] = count.get((p, r), 0) + 1
            out.append((p, r, count[(p, r)]))
        return tuple(out)

    @cached_property
    def primary_spec(self) -> tuple[tuple[int, int, int], ...]:
        count: dict[tuple[int, int], int] = {}
        for pr in self.factors:
            count[pr] = count.get(pr, 0) + 1
        return tuple((p, r, m) for (p, r), m in sorted(count.items()))

    @cached_property
    def primes(self) -> tuple[int, ...]:
        return tuple(sorted({p for p, _ in self.factors}))

    def exponents(self, p: int) -> tuple[int, ...]:
        """R_p: the distinct exponents r appearing with prime p."""
        return tuple(sorted({r for q, r in self.factors if q == p}))

    def max_exponent(self, p: int) -> int:
        return max(self.exponents(p))

    @cached_property
    def ring_index(self) -> tuple[tuple[int, int], ...]:
        """Q(G): the distinct (p, r) pairs."""
        return tuple(sorted(set(self.factors)))

    @cached_property
    def digit_index(self) -> tuple[tuple[int, int, int, int], ...]:
        """G*(G): quadruples (p, r, m, k) with 1 <= k <= r."""
        return tuple((p, r, m, k) for p, r, m in self.labels for k in range(1, r + 1))

    @cached_property
    def s_index(self) -> tuple[tuple[int, int], ...]:
        """S(G): pairs (p, s) with 1 <= s <= r_p."""
        return tuple((p, s) for p in self.primes for s in range(1, self.max_exponent(p) + 1))

    @cached_property
    def zeta(self) -> int:
        return sum(r for _, r in self.factors)

    @cached_property
    def moduli(self) -> np.ndarray:
        return np.array([p**r for p, r in self.factors], dtype=np.int64)

    @cached_property
    def order(self) -> int:
        return math.prod(p**r for p, r in self.factors)

    @cached_property
    def strides(self) -> np.ndarray:
        out = np.ones(len(self.factors), dtype=np.int64)
        for i in range(len(self.factors) - 2, -1, -1):
            out[i] = out[i + 1] * self.moduli[i + 1]
        return out

    @property
    def rank(self) -> int:
        return len(self.factors)

    def power(self, n: int) -> AbelianGroup:
        """G^n with factors ordered coordinate by coordinate."""
        if n < 1:
            raise ValidationError("block length must be >= 1")
        return AbelianGroup(self.factors * n)

    def elements(self) -> np.ndarray:
        """All elements as an ``(order, rank)`` array in index order."""
        check_cap(self.order, "group enumeration")
        grids = np.indices(tuple(int(m) for m in self.moduli)).reshape(self.rank, -1)
        return grids.T.astype(np.int64)

    def normalize(self, x: Sequence[int] | np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=np.int64)
        if x.shape[-1] != self.rank:
            raise ValidationError(f"element needs {self.rank} residues, got shape {x.shape}")
        return np.mod(x, self.moduli)

    def index(self, x: Sequence[int] | np.ndarray) -> np.ndarray | int:
        """Mixed-radix index of one element or of a stack of elements."""
        idx = self.normalize(x) @ self.strides
        return int(idx) if np.ndim(idx) == 0 else idx

    def element(self, i: int) -> np.ndarray:
        return (int(i) // self.strides) % self.moduli

    def add(self, x, y) -> np.ndarray:
        return np.mod(np.asarray(x) + np.asarray(y), self.moduli)

    def sub(self, x, y) -> np.ndarray:
        return np.mod(np.asarray(x) - np.asarray(y), self.moduli)

    @property
    def zero(self) -> np.ndarray:
        return np.zeros(self.rank, dtype=np.int64)

    def integer_labels(self) -> np.ndarray:
        """For a cyclic group Z_n: ``out[x]`` is the index of the integer x."""
        if len(set(self.primes)) != self.rank:
            raise ValidationError("integer labels need one factor per prime (a cyclic group)")
        n = self.order
        xs = np.arange(n, dtype=np.int64)
        return self.index(np.mod(xs[:, None], self.moduli[None, :]))

    def to_json(self) -> dict:
        return {"primary": [list(t) for t in self.primary_spec]}


@dataclass(frozen=True)
class Subgroup:
    """``H = (+) p^e Z_{p^r}`` over the factors of ``group``; one exponent per factor."""

    group: AbelianGroup
    exps: tuple[int, ...]

    def __post_init__(self):
        if len(self.exps) != self.group.rank:
            raise ValidationError("one exponent per cyclic factor is required")
        for e, (p, r) in zip(self.exps, self.group.factors):
            if not 0 <= e <= r:
                raise ValidationError(f"exponent {e} outside [0, {r}] for Z_{p}^{r}")
        object.__setattr__(self, "exps", tuple(int(e) for e in self.exps))

    @classmethod
    def whole(cls, group: AbelianGroup) -> Subgroup:
        return cls(group, (0,) * group.rank)

    @classmethod
    def trivial(cls, group: AbelianGroup) -> Subgroup:
        return cls(group, tuple(r for _, r in group.factors))

    @cached_property
    def steps(self) -> np.ndarray:
        return np.array([p**e for e, (p, _) in zip(self.exps, self.group.factors)], dtype=np.int64)

    @cached_property
    def order(self) -> int:
        return math.prod(p ** (r - e) for e, (p, r) in zip(self.exps, self.group.factors))

    @property
    def index_in_group(self) -> int:
        return self.group.order // self.order

    def contains(self, x) -> bool | np.ndarray:
        hit = np.all(np.mod(np.asarray(x), self.steps) == 0, axis=-1)
        return bool(hit) if np.ndim(hit) == 0 else hit

    def is_subgroup_of(self, other: Subgroup) -> bool:
        return self.group == other.group and all(a >= b for a, b in zip(self.exps, other.exps))

    def representative(self, x) -> np.ndarray:
        """Canonical coset representative [x]: componentwise residue mod p^e."""
        return np.mod(np.asarray(x, dtype=np.int64), self.steps)

    def elements(self) -> np.ndarray:
        check_cap(self.order, "subgroup enumeration")
        axes = [np.arange(0, m, s) for m, s in zip(self.group.moduli, self.steps)]
        return np.array(list(itertools.product(*axes)), dtype=np.int64).reshape(-1, self.group.rank)

    def coset_ids(self) -> np.ndarray:
        """For every element index of the group, the index of its canonical representative."""
        return self.group.index(self.representative(self.group.elements()))


def coset_split(x, H: Subgroup) -> tuple[np.ndarray, np.ndarray]:
    """Split x = [x] + xbar with [x] canonical and xbar in H."""
    rep = H.representative(x)
    return rep, H.group.sub(x, rep)


def transversal(ambient: Subgroup, H: Subgroup) -> np.ndarray:
    """Canonical representatives of the cosets of H inside ``ambient``, in lexicographic order."""
    if not H.is_subgroup_of(ambient):
        raise ValidationError(f"subgroup {H.exps} is not contained in {ambient.exps}")
    axes = [np.arange(0, h, a) for a, h in zip(ambient.steps, H.steps)]
    size = math.prod(len(a) for a in axes)
    check_cap(size, "transversal")
    return np.array(list(itertools.product(*axes)), dtype=np.int64).reshape(-1, H.group.rank)


def _positive_part(x: int) -> int:
    return x if x > 0 else 0


@dataclass(frozen=True)
class InputGroup:
    """The message group J = (+) Z_{q^s}^{k_{q,s}} relative to an input group G.

    ``counts`` maps (q, s) in S(G) to k_{q,s}.
    """

    group: AbelianGroup
    counts: tuple[tuple[tuple[int, int], int], ...]

    def __post_init__(self):
        s_index = set(self.group.s_index)
        clean = {}
        for key, k in dict(self.counts).items():
            key = (int(key[0]), int(key[1]))
            if key not in s_index:
                raise ValidationError(f"(q, s) = {key} is not in S(G) = {sorted(s_index)}")
            if int(k) < 0:
                raise ValidationError(f"k for {key} must be nonnegative")
            if int(k) > 0:
                clean[key] = int(k)
        if not clean:
            raise ValidationError("J needs at least one positive k_{q,s}")
        object.__setattr__(self, "counts", tuple(sorted(clean.items())))

    @classmethod
    def from_counts(cls, group: AbelianGroup, counts: Mapping[tuple[int, int], int]) -> InputGroup:
        return cls(group, tuple(counts.items()))

    @cached_property
    def k(self) -> dict[tuple[int, int], int]:
        return dict(self.counts)

    @cached_property
    def active(self) -> tuple[tuple[int, int], ...]:
        return tuple(key for key, _ in self.counts)

    @cached_property
    def total(self) -> int:
        return sum(self.k.values())

    @cached_property
    def weights(self) -> dict[tuple[int, int], float]:
        return {key: k / self.total for key, k in self.counts}

    @cached_property
    def as_group(self) -> AbelianGroup:
        return AbelianGroup(tuple((q, s) for (q, s), k in self.counts for _ in range(k)))

    @cached_property
    def order(self) -> int:
        return math.prod(q ** (s * k) for (q, s), k in self.counts)

    def rate(self, n: int = 1) -> float:
        return sum(s * k * math.log2(q) for (q, s), k in self.counts) / n

    @cached_property
    def blocks(self) -> dict[tuple[int, int], np.ndarray]:
        """Positions in ``as_group`` belonging to each active (q, s)."""
        out, start = {}, 0
        for key, k in self.counts:
            out[key] = np.arange(start, start + k)
            start += k
        return out

    def to_json(self) -> dict:
        return {"k": {f"{q},{s}": k for (q, s), k in self.counts}}


@dataclass(frozen=True)
class WeightVector:
    """Real weights over S(G), used by the single-letter capacity search."""

    group: AbelianGroup
    values: tuple[tuple[tuple[int, int], float], ...]

    def __post_init__(self):
        total = sum(v for _, v in self.values)
        if any(v < 0 for _, v in self.values) or abs(total - 1) > 1e-9:
            raise ValidationError("weights must be nonnegative and sum to 1")

    @cached_property
    def weights(self) -> dict[tuple[int, int], float]:
        return {key: v for key, v in self.values if v > 0}

    @cached_property
    def active(self) -> tuple[tuple[int, int], ...]:
        return tuple(sorted(self.weights))


ThetaHat = tuple[int, ...]


def all_s(J) -> ThetaHat:
    return tuple(s for _, s in J.active)


def enumerate_theta_hats(J, include_all_s: bool = False) -> list[ThetaHat]:
    """Valuation profiles over the active (p, s) coordinates of J."""
    out = list(itertools.product(*(range(s + 1) for _, s in J.active)))
    if not include_all_s:
        out.remove(all_s(J))
    return out


def omega_theta(theta: ThetaHat, J) -> float:
    num = sum(t * J.weights[(p, s)] * math.log2(p) for t, (p, s) in zip(theta, J.active))
    den = sum(s * J.weights[(p, s)] * math.log2(p) for p, s in J.active)
    return num / den


def t_theta_size(J: InputGroup, theta: ThetaHat) -> int:
    """Number of messages whose difference from a fixed message has valuation profile theta."""
    size = 1
    for t, (p, s) in zip(theta, J.active):
        k = J.k[(p, s)]
        size *= 1 if t == s else p ** ((s - t) * k) - p ** ((s - t - 1) * k)
    return size


def t_theta_bound(J: InputGroup, theta: ThetaHat) -> int:
    """The product form prod p^{(s - theta) k}; its log equals (1 - omega) R exactly."""
    return math.prod(p ** ((s - t) * J.k[(p, s)]) for t, (p, s) in zip(theta, J.active))


EtaVector = Mapping[tuple[int, int, int, int], int]


def theta_map(
    J,
    theta: ThetaHat | None = None,
    eta: EtaVector | None = None,
    group: AbelianGroup | None = None,
) -> Subgroup:
    """The subgroup H_{eta+theta} of ``group`` (default: the input group of J).

    Each factor (p, r, m) gets exponent min over active (p, s) of
    |r - s|^+ + eta_{p,r,m,s} + theta_{p,s}, clamped to r, or r when p has no
    active coordinate.
    """
    group = J.group if group is None else group
    theta = (0,) * len(J.active) if theta is None else tuple(theta)
    eta = {} if eta is None else eta
    exps = []
    for p, r, m in group.labels:
        cands = [
            _positive_part(r - s) + eta.get((p, r, m, s), 0) + t
            for t, (q, s) in zip(theta, J.active)
            if q == p
        ]
        exps.append(min([r] + cands))
    return Subgroup(group, tuple(exps))


def eta_coordinates(J, group: AbelianGroup | None = None) -> list[tuple[int, int, int, int]]:
    group = J.group if group is None else group
    return [(p, r, m, s) for p, r, m in group.labels for q, s in J.active if q == p]


def eta_upper(key: tuple[int, int, int, int]) -> int:
    _, r, _, s = key
    return r - _positive_part(r - s)


def enumerate_etas(J, group: AbelianGroup | None = None) -> Iterator[dict]:
    keys = eta_coordinates(J, group)
    size = math.prod(eta_upper(k) + 1 for k in keys)
    check_cap(size, "eta enumeration")
    for vals in itertools.product(*(range(eta_upper(k) + 1) for k in keys)):
        yield {k: v for k, v in zip(keys, vals) if v}


def valuation_profile(J: InputGroup, d: np.ndarray) -> np.ndarray:
    """Valuation profile theta of message differences ``d`` (rows of ``as_group`` residues)."""
    d = np.atleast_2d(d)
    out = np.empty((d.shape[0], len(J.active)), dtype=np.int64)
    for col, (p, s) in enumerate(J.active):
        block = d[:, J.blocks[(p, s)]]
        val = np.full(block.shape, s, dtype=np.int64)
        for e in range(s - 1, -1, -1):
            val[np.mod(block, p ** (e + 1)) != 0] = e
        out[:, col] = val.min(axis=1)
    return out


def partition_into_T_theta(J: InputGroup, a) -> dict[ThetaHat, np.ndarray]:
    """Group the elements of J by the valuation profile of their difference from ``a``."""
    JG = J.as_group
    elems = JG.elements()
    profile = valuation_profile(J, JG.sub(elems, np.asarray(a)))
    out: dict[ThetaHat, list] = {t: [] for t in enumerate_theta_hats(J, include_all_s=True)}
    for row, prof in zip(elems, map(tuple, profile)):
        out[prof].append(row)
    return {t: np.array(rows, dtype=np.int64).reshape(-1, JG.rank) for t, rows in out.items()}


def generator_step(q: int, s: int, p: int, r: int) -> int:
    """Generators from Z_{q^s} to Z_{p^r} are the multiples of this step (0 means forced zero)."""
    if p != q:
        return 0
    return p ** _positive_part(r - s)


@dataclass(frozen=True, eq=False)
class HomomorphismTable:
    """A homomorphism J -> G^n plus dither.

    ``generators[i, j]`` is the image of the i-th unit vector of J in factor j of G^n.
    """

    J: InputGroup
    n: int
    generators: np.ndarray
    dither: np.ndarray

    def __post_init__(self):
        src, dst = self.J.as_group, self.codomain
        gens = np.asarray(self.generators, dtype=np.int64)
        if gens.shape != (src.rank, dst.rank):
            raise ValidationError(f"generator table must have shape {(src.rank, dst.rank)}")
        for i, (q, s) in enumerate(src.factors):
            for j, (p, r) in enumerate(dst.factors):
                step = generator_step(q, s, p, r)
                g = gens[i, j]
                if not 0 <= g < p**r or (step == 0 and g != 0) or (step and g % step):
                    raise ValidationError(f"generator {g} not allowed for Z_{q}^{s} -> Z_{p}^{r}")
        object.__setattr__(self, "generators", gens)
        object.__setattr__(self, "dither", dst.normalize(self.dither))

    @cached_property
    def codomain(self) -> AbelianGroup:
        return self.J.group.power(self.n)

    def apply(self, a) -> np.ndarray:
        """phi(a) without the dither."""
        return np.mod(np.asarray(a, dtype=np.int64) @ self.generators, self.codomain.moduli)

    def encode(self, a) -> np.ndarray:
        return np.mod(self.apply(a) + self.dither, self.codomain.moduli)

    def codebook(self) -> np.ndarray:
        """Codewords of all messages, in the index order of ``J.as_group``."""
        return self.encode(self.J.as_group.elements())


def apply_homomorphism(phi: HomomorphismTable, a) -> np.ndarray:
    return phi.apply(a)


def generator_choices(J: InputGroup, n: int = 1) -> list[np.ndarray]:
    """Allowed values for each generator entry, flattened row-major."""
    dst = J.group.power(n)
    out = []
    for q, s in J.as_group.factors:
        for p, r in dst.factors:
            step = generator_step(q, s, p, r)
            out.append(np.array([0]) if step == 0 else np.arange(0, p**r, step))
    return out


def sample_code(J: InputGroup, n: int, rng: np.random.Generator) -> HomomorphismTable:
    dst = J.group.power(n)
    choices = generator_choices(J, n)
    flat = [c[rng.integers(len(c))] for c in choices]
    gens = np.array(flat, dtype=np.int64).reshape(J.as_group.rank, dst.rank)
    dither = rng.integers(0, dst.moduli)
    return HomomorphismTable(J, n, gens, dither)


def sample_generators(J: InputGroup, n: int, size: int, rng: np.random.Generator) -> np.ndarray:
    """A batch of ``size`` generator tables, shape ``(size, rank J, rank G^n)``."""
    dst = J.group.power(n)
    choices = generator_choices(J, n)
    cols = [c[rng.integers(len(c), size=size)] for c in choices]
    return np.stack(cols, axis=1).reshape(size, J.as_group.rank, dst.rank)


def iter_codes(J: InputGroup, n: int = 1) -> Iterator[HomomorphismTable]:
    """Every (generator table, dither) pair of the ensemble."""
    dst = J.group.power(n)
    choices = generator_choices(J, n)
    size = math.prod(len(c) for c in choices) * dst.order
    check_cap(size, "code ensemble enumeration")
    dithers = dst.elements()
    for flat in itertools.product(*choices):
        gens = np.array(flat, dtype=np.int64).reshape(J.as_group.rank, dst.rank)
        for v in dithers:
            yield HomomorphismTable(J, n, gens, v)


def group_from_json(obj) -> AbelianGroup:
    if not isinstance(obj, dict) or "primary" not in obj:
        raise ValidationError('group JSON needs a "primary" list')
    return AbelianGroup.from_primary_spec(obj["primary"])


def input_group_from_json(group: AbelianGroup, obj) -> InputGroup:
    if not isinstance(obj, dict) or "k" not in obj:
        raise ValidationError('J JSON needs a "k" map')
    counts = {}
    for key, k in obj["k"].items():
        try:
            q, s = (int(v) for v in key.split(","))
        except ValueError as exc:
            raise ValidationError(f'J key {key!r} must look like "p,s"') from exc
        counts[(q, s)] = int(k)
    return InputGroup.from_counts(group, counts)
