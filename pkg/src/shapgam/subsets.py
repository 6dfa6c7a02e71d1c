"""Exact set-function algebra on bitmask-indexed subsets.

Subsets of the feature set {0, ..., d-1} are encoded as integer bitmasks
(feature i <-> bit 1 << i). Exhaustive operations are capped at d <= 25.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

MAX_EXHAUSTIVE_D = 25


class SubsetError(ValueError):
    pass


def _check_d(d: int) -> None:
    if not 1 <= d <= MAX_EXHAUSTIVE_D:
        raise SubsetError(f"feature count d={d} outside [1, {MAX_EXHAUSTIVE_D}]")


@dataclass(frozen=True)
class FeatureSet:
    """An immutable subset of [d] stored as a bitmask."""

    bits: int
    d: int

    def __post_init__(self):
        _check_d(self.d)
        if not 0 <= self.bits < (1 << self.d):
            raise SubsetError(f"bitmask {self.bits} out of range for d={self.d}")

    @classmethod
    def empty(cls, d: int) -> "FeatureSet":
        return cls(0, d)

    @classmethod
    def full(cls, d: int) -> "FeatureSet":
        return cls((1 << d) - 1, d)

    @classmethod
    def of(cls, d: int, *members: int) -> "FeatureSet":
        bits = 0
        for i in members:
            if not 0 <= i < d:
                raise SubsetError(f"feature index {i} out of range for d={d}")
            bits |= 1 << i
        return cls(bits, d)

    @property
    def size(self) -> int:
        return self.bits.bit_count()

    def contains(self, i: int) -> bool:
        return bool(self.bits >> i & 1)

    def add(self, i: int) -> "FeatureSet":
        return FeatureSet(self.bits | (1 << i), self.d)

    def remove(self, i: int) -> "FeatureSet":
        return FeatureSet(self.bits & ~(1 << i), self.d)

    def union(self, other: "FeatureSet") -> "FeatureSet":
        return FeatureSet(self.bits | other.bits, self.d)

    def difference(self, other: "FeatureSet") -> "FeatureSet":
        return FeatureSet(self.bits & ~other.bits, self.d)

    def complement(self) -> "FeatureSet":
        return FeatureSet(~self.bits & ((1 << self.d) - 1), self.d)

    def issubset(self, other: "FeatureSet") -> bool:
        return self.bits & ~other.bits == 0

    def members(self) -> tuple[int, ...]:
        return tuple(i for i in range(self.d) if self.bits >> i & 1)

    def __iter__(self):
        return iter(self.members())

    def __len__(self):
        return self.size


def mask_size(mask: int) -> int:
    return mask.bit_count()


def mask_members(mask: int) -> tuple[int, ...]:
    out = []
    i = 0
    m = mask
    while m:
        if m & 1:
            out.append(i)
        m >>= 1
        i += 1
    return tuple(out)


def submasks(mask: int):
    """Yield every submask of ``mask`` (including 0 and mask itself)."""
    sub = mask
    while True:
        yield sub
        if sub == 0:
            return
        sub = (sub - 1) & mask


def all_sizes(d: int) -> np.ndarray:
    """|S| for every bitmask S in [0, 2^d)."""
    _check_d(d)
    return np.bitwise_count(np.arange(1 << d, dtype=np.uint32)).astype(np.int64)


def masks_of_size(d: int, s: int) -> list[int]:
    return [m for m in range(1 << d) if m.bit_count() == s]


@dataclass
class SetFunctionTable:
    """Dense table of a set function: values[S] for every bitmask S.

    values has shape (2^d, c) for an output dimension c >= 1.
    """

    d: int
    values: np.ndarray

    def __post_init__(self):
        _check_d(self.d)
        self.values = np.asarray(self.values, dtype=np.float64)
        if self.values.ndim == 1:
            self.values = self.values[:, None]
        if self.values.shape[0] != (1 << self.d):
            raise SubsetError(
                f"table has {self.values.shape[0]} entries, expected {1 << self.d}"
            )
        if not np.all(np.isfinite(self.values)):
            raise SubsetError("table entries must be finite")

    @property
    def c(self) -> int:
        return self.values.shape[1]

    def value(self, mask: int) -> np.ndarray:
        return self.values[mask]


@dataclass
class PurifiedTable:
    """Mobius coefficients of a set function: one purified value per subset.

    The zeta-sum over all subsets reconstructs the full-coalition value.
    """

    d: int
    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.float64)
        if self.values.ndim == 1:
            self.values = self.values[:, None]

    @property
    def c(self) -> int:
        return self.values.shape[1]

    def value(self, mask: int) -> np.ndarray:
        return self.values[mask]


@dataclass
class WeightTable:
    """Subset weights that depend only on the subset size.

    ``by_size[s]`` is the weight of one individual subset of size s;
    ``fractions`` keeps the exact rational values used to build it.
    """

    d: int
    by_size: np.ndarray
    fractions: list = field(repr=False)
    includes_endpoints: bool = True
    normalized: bool = True

    def weight(self, mask: int) -> float:
        return float(self.by_size[mask.bit_count()])

    def per_subset(self) -> np.ndarray:
        """Expand to a dense weight per bitmask (lazy; O(2^d))."""
        return self.by_size[all_sizes(self.d)]

    def size_distribution(self) -> np.ndarray:
        """Probability of drawing each size s: C(d,s) * by_size[s]."""
        counts = np.array([_comb(self.d, s) for s in range(self.d + 1)], dtype=np.float64)
        return counts * self.by_size

    def sample_masks(self, rng: np.random.Generator, n: int) -> np.ndarray:
        """Draw n subset bitmasks: size from the size distribution, then a
        uniform subset of that size."""
        q = self.size_distribution()
        q = q / q.sum()
        sizes = rng.choice(self.d + 1, size=n, p=q)
        order = np.argsort(rng.random((n, self.d)), axis=1)
        take = order < sizes[:, None]
        # column j of `take` says whether feature at sorted position is kept;
        # map back through the permutation implied by argsort
        masks = np.zeros(n, dtype=np.int64)
        pow2 = 1 << np.arange(self.d, dtype=np.int64)
        ranks = np.argsort(order, axis=1)  # rank of each feature
        keep = ranks < sizes[:, None]
        masks = (keep * pow2[None, :]).sum(axis=1)
        return masks


def _comb(n: int, k: int) -> int:
    from math import comb

    return comb(n, k)


def shap_unif_weights(d: int) -> WeightTable:
    """Uniform-context attribution weights: w(S) = 1 / ((d+1) * C(d, |S|)).

    Sums to exactly 1 over the full powerset.
    """
    _check_d(d)
    fracs = [Fraction(1, (d + 1) * _comb(d, s)) for s in range(d + 1)]
    by_size = np.array([float(f) for f in fracs])
    return WeightTable(d, by_size, fracs, includes_endpoints=True)


def shap_kernel_weights(d: int) -> WeightTable:
    """Least-squares kernel weights w(S) proportional to 1 / (C(d,s) s (d-s)),
    normalized over proper subsets. The kernel diverges at s in {0, d}; those
    endpoints are excluded and handled as hard constraints by consumers.
    """
    if d < 2:
        raise SubsetError("kernel weights need d >= 2")
    _check_d(d)
    raw = [Fraction(0)] * (d + 1)
    for s in range(1, d):
        raw[s] = Fraction(1, _comb(d, s) * s * (d - s))
    total = sum(raw[s] * _comb(d, s) for s in range(1, d))
    fracs = [f / total for f in raw]
    by_size = np.array([float(f) for f in fracs])
    return WeightTable(d, by_size, fracs, includes_endpoints=False)


def discrete_derivative(table: SetFunctionTable, S: int | FeatureSet, T: int | FeatureSet) -> np.ndarray:
    """Finite difference of a set function over S evaluated at context T:

        sum_{W subseteq S} (-1)^{|S|-|W|} f((T - S) + W)
    """
    s_bits = S.bits if isinstance(S, FeatureSet) else S
    t_bits = T.bits if isinstance(T, FeatureSet) else T
    base = t_bits & ~s_bits
    s_size = s_bits.bit_count()
    out = np.zeros(table.c, dtype=np.float64)
    for w in submasks(s_bits):
        sign = -1.0 if (s_size - w.bit_count()) % 2 else 1.0
        out += sign * table.values[base | w]
    return out


def mobius_transform_array(values: np.ndarray, d: int) -> np.ndarray:
    """In-place-style fast Mobius transform along axis 0 of a (2^d, ...) array."""
    out = np.array(values, dtype=np.float64, copy=True)
    idx = np.arange(1 << d)
    for i in range(d):
        bit = 1 << i
        hi = (idx & bit) != 0
        out[idx[hi]] -= out[idx[hi] ^ bit]
    return out


def zeta_transform_array(values: np.ndarray, d: int) -> np.ndarray:
    """Inverse of the Mobius transform: f(S) = sum_{T subseteq S} ftilde(T)."""
    out = np.array(values, dtype=np.float64, copy=True)
    idx = np.arange(1 << d)
    for i in range(d):
        bit = 1 << i
        hi = (idx & bit) != 0
        out[idx[hi]] += out[idx[hi] ^ bit]
    return out


def mobius_purify(table: SetFunctionTable) -> PurifiedTable:
    """Purify a full powerset table into per-subset interaction effects."""
    return PurifiedTable(table.d, mobius_transform_array(table.values, table.d))


def zeta_reconstruct(purified: PurifiedTable) -> SetFunctionTable:
    return SetFunctionTable(purified.d, zeta_transform_array(purified.values, purified.d))
