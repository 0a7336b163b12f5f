"""Partition/weight pairs, whole space specifications, and sparse vectors.

A space is determined by an exponent p > 2 and a finite family of
(partition, weights) pairs; the trivial pair (discrete partition, constant
weight 1) is always present after normalization and supplies the lower
l_p estimate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import AddressOutOfRange, SpecValidationError
from .partitions import (
    BLOCKS,
    DISCRETE,
    INDISCRETE,
    SUBDIVISION,
    PartitionScheme,
)
from .rationals import INFINITE, is_infinite, parse_rational
from .weights import (
    CONSTANT,
    EXPLICIT,
    GEOMETRIC,
    POWER,
    BoundResult,
    SumResult,
    WeightFamily,
)

_SCALE_KINDS = (CONSTANT, GEOMETRIC, EXPLICIT, POWER)


@dataclass(frozen=True)
class BlockWeights:
    """Weight assignment across the blocks of one partition.

    ``head`` lists families for the leading blocks (block i <= len(head)
    uses head[i-1] at within-block offsets).  All later blocks share
    ``template``, optionally modulated per block by ``scale`` evaluated at
    the block's position past the head.  A plain uniform family is the
    head-free, scale-free case.
    """

    template: WeightFamily
    head: tuple[WeightFamily, ...] = ()
    scale: WeightFamily | None = None

    def __post_init__(self):
        if self.scale is not None and self.scale.kind not in _SCALE_KINDS:
            raise SpecValidationError(
                "block scales must take exactly rational values, "
                f"got {self.scale.kind}"
            )
        if self.scale is not None and self.scale.kind == POWER:
            if self.scale.alpha.denominator != 1:
                raise SpecValidationError(
                    "power block scales need an integer exponent "
                    "(values must stay rational)"
                )
        if self.scale is not None and self.scale.kind == EXPLICIT:
            if self.scale.tail.kind not in (CONSTANT, GEOMETRIC):
                raise SpecValidationError(
                    "explicit block scales need a constant or geometric tail"
                )

    @property
    def is_uniform(self) -> bool:
        return not self.head and self.scale is None

    def scale_at(self, t: int) -> Fraction:
        if self.scale is None:
            return Fraction(1)
        v = self.scale.weight_at(t)
        assert isinstance(v, Fraction)
        return v

    def family_for_block(self, i: int) -> WeightFamily:
        """Concrete weight family used inside block i."""
        if i < 1:
            raise AddressOutOfRange(f"block {i}")
        if i <= len(self.head):
            return self.head[i - 1]
        t = i - len(self.head)
        if self.scale is None:
            return self.template
        return self.template.scaled(self.scale_at(t))

    def weight_at(self, i: int, k: int):
        return self.family_for_block(i).weight_at(k)

    def infimum_for_block(self, i: int, size) -> BoundResult:
        fam = self.family_for_block(i)
        return fam.infimum(None if is_infinite(size) else size)

    def qsum_for_block(self, i: int, q, size) -> SumResult:
        fam = self.family_for_block(i)
        return fam.qsum(q, size=None if is_infinite(size) else size)


@dataclass(frozen=True)
class PartitionWeightPair:
    scheme: PartitionScheme
    weights: BlockWeights

    def __post_init__(self):
        if self.scheme.kind in (DISCRETE, INDISCRETE) and not self.weights.is_uniform:
            raise SpecValidationError(
                f"{self.scheme.kind} pairs take a single weight family "
                "(no head or per-block scale)"
            )
        if self.scheme.kind == SUBDIVISION and not self.weights.is_uniform:
            raise SpecValidationError(
                "subdivision pairs support uniform weights only"
            )
        if self.scheme.kind == BLOCKS:
            n = self.scheme.block_count()
            if not is_infinite(n) and len(self.weights.head) > n:
                raise SpecValidationError(
                    f"weight head lists {len(self.weights.head)} blocks, "
                    f"the partition has {n}"
                )

    @staticmethod
    def uniform(scheme: PartitionScheme, family: WeightFamily) -> "PartitionWeightPair":
        return PartitionWeightPair(scheme, BlockWeights(template=family))

    @staticmethod
    def trivial() -> "PartitionWeightPair":
        return PartitionWeightPair.uniform(
            PartitionScheme.discrete(), WeightFamily.constant(1)
        )

    @property
    def is_trivial(self) -> bool:
        w = self.weights
        return (
            self.scheme.is_discrete_like
            and w.is_uniform
            and w.template.kind == CONSTANT
            and w.template.c == 1
        )

    def weight_at_address(self, block: int, offset: int):
        size = self.scheme.block_size(block)
        if not is_infinite(size) and offset > size:
            raise AddressOutOfRange(
                f"offset {offset} in block {block} of size {size}"
            )
        return self.weights.weight_at(block, offset)

    def weight_at_global(self, g: int):
        b, k = self.scheme.locate(g)
        return self.weights.weight_at(b, k)

    # -- symbolic per-pair queries used by the classifier -----------------------

    def block_infimum(self, block: int) -> BoundResult:
        return self.weights.infimum_for_block(block, self.scheme.block_size(block))

    def block_qsum(self, block: int, q) -> SumResult:
        return self.weights.qsum_for_block(block, q, self.scheme.block_size(block))

    def weight_infimum(self) -> Fraction | float:
        """inf over every index of this pair's weight: the minimum over the
        head blocks and the scaled template over the tail sizes."""
        w = self.weights
        n = self.scheme.block_count()
        head_n = len(w.head) if is_infinite(n) else min(len(w.head), int(n))
        vals = []
        for b in range(1, head_n + 1):
            vals.append(self.block_infimum(b).value)
        if is_infinite(n) or int(n) > head_n:
            t_count = None if is_infinite(n) else int(n) - head_n
            s_inf = (
                Fraction(1)
                if w.scale is None
                else w.scale.infimum(t_count).value
            )
            for size in _tail_block_sizes(self.scheme, head_n):
                base = w.template.infimum(None if is_infinite(size) else size).value
                vals.append(base * s_inf)
        return min(vals)

    def sup_block_qsum(self, q) -> tuple[float, bool]:
        """(sup over blocks of the block q-sum, every block sum finite).

        The supremum is exact over the head and separable over the scaled
        tail: scaling a block by s multiplies its q-sum by s**q, so the
        tail supremum is (sup scale)**q times the template sum.
        """
        n = self.scheme.block_count()
        w = self.weights
        values = []
        head_n = len(w.head)
        explicit = head_n if is_infinite(n) else min(int(n), head_n)
        for b in range(1, explicit + 1):
            r = self.block_qsum(b, q)
            if not r.converges:
                return math.inf, False
            values.append(r.value)
        if is_infinite(n) or int(n) > head_n:
            sizes = _tail_block_sizes(self.scheme, head_n)
            for size in sizes:
                r = w.template.qsum(q, size=None if is_infinite(size) else size)
                if not r.converges:
                    return math.inf, False
                peak = float(w.scale.supremum().value) if w.scale is not None else 1.0
                values.append(peak ** float(q) * r.value)
        return (max(values) if values else 0.0), True


def _tail_block_sizes(scheme: PartitionScheme, head_n: int):
    """Distinct block sizes occurring past the weight head (symbolic)."""
    if scheme.kind == DISCRETE:
        return [1]
    if scheme.kind == INDISCRETE:
        return [INFINITE]
    if scheme.kind == SUBDIVISION:
        sizes = {scheme.chunk}
        pc = scheme.parent.block_count()
        if not is_infinite(pc):
            for pb in range(1, int(pc) + 1):
                t = scheme.parent.block_size(pb)
                if not is_infinite(t) and t % scheme.chunk:
                    sizes.add(t % scheme.chunk)
        return sorted(sizes)
    sizes = []
    seen = 0
    for g in scheme.groups:
        last = seen + (0 if is_infinite(g.count) else g.count)
        if is_infinite(g.count) or last > head_n:
            if g.size not in sizes:
                sizes.append(g.size)
        seen = last
        if is_infinite(g.count):
            break
    return sizes


# ---------------------------------------------------------------------------
# The whole space
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SpaceSpec:
    p: Fraction
    pairs: tuple[PartitionWeightPair, ...]
    name: str | None = field(default=None, compare=False)

    @staticmethod
    def create(p, pairs, name=None) -> "SpaceSpec":
        p = parse_rational(p)
        if p <= 2:
            raise SpecValidationError(f"the exponent must exceed 2, got {p}")
        pairs = tuple(pairs)
        _check_common_extent(pairs)
        normalized = _normalize_pairs(pairs)
        return SpaceSpec(p=p, pairs=normalized, name=name)

    @property
    def q(self) -> Fraction:
        """Critical exponent 2p/(p-2) governing weighted-l2 domination."""
        return 2 * self.p / (self.p - 2)

    def extent(self):
        ext = None
        for pair in self.pairs:
            e = pair.scheme.extent()
            if e is not None:
                ext = e
        return INFINITE if ext is None else ext

    @property
    def trivial_index(self) -> int:
        for i, pair in enumerate(self.pairs):
            if pair.is_trivial:
                return i
        raise AssertionError("normalization guarantees a trivial pair")

    @property
    def non_trivial_pairs(self) -> tuple[tuple[int, PartitionWeightPair], ...]:
        return tuple(
            (i, p) for i, p in enumerate(self.pairs) if not p.is_trivial
        )

    @property
    def reference_pair(self) -> PartitionWeightPair:
        """The pair whose (block, offset) addressing vectors use by default:
        the first non-trivial pair, else the trivial one."""
        for _, pair in self.non_trivial_pairs:
            return pair
        return self.pairs[self.trivial_index]

    def normalized(self) -> "SpaceSpec":
        return SpaceSpec.create(self.p, self.pairs, name=self.name)

    def without_pair(self, index: int) -> "SpaceSpec":
        kept = tuple(p for i, p in enumerate(self.pairs) if i != index)
        return SpaceSpec.create(self.p, kept, name=self.name)


def _check_common_extent(pairs) -> None:
    pinned = {}
    for idx, pair in enumerate(pairs):
        e = pair.scheme.extent()
        if e is not None:
            pinned[idx] = e
    if len(set(pinned.values())) > 1:
        detail = ", ".join(f"pairs[{i}] -> {e}" for i, e in pinned.items())
        raise SpecValidationError(f"pairs pin different index-set sizes: {detail}")


def _normalize_pairs(pairs) -> tuple[PartitionWeightPair, ...]:
    """Drop redundant pairs and guarantee exactly one trivial pair.

    Any discrete-like pair has norm (sum |x_j w_j|^p)^(1/p) <= the plain
    l_p norm since weights stay in (0,1], so it never changes the max and
    is removed; the trivial pair itself is kept (prepended when missing).
    """
    out: list[PartitionWeightPair] = []
    seen_trivial = False
    for pair in pairs:
        if pair.is_trivial:
            if not seen_trivial:
                out.append(pair)
                seen_trivial = True
            continue
        if pair.scheme.is_discrete_like:
            continue  # dominated by the trivial pair pointwise
        if pair in out:
            continue
        out.append(pair)
    if not seen_trivial:
        out.insert(0, PartitionWeightPair.trivial())
    return tuple(out)


# ---------------------------------------------------------------------------
# Admissibility (trivial + regular + indiscrete)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class AdmissibleResult:
    holds: bool
    trivial_index: int | None = None
    regular_index: int | None = None
    indiscrete_index: int | None = None

    def __bool__(self) -> bool:
        return self.holds


def is_admissible(spec: SpaceSpec) -> AdmissibleResult:
    """First trivial, first regular and first indiscrete pair, in
    declaration order; holds when all three exist."""
    trivial = regular = indiscrete = None
    for i, pair in enumerate(spec.pairs):
        if pair.is_trivial:
            if trivial is None:
                trivial = i
        elif pair.scheme.is_regular:
            if regular is None:
                regular = i
        elif pair.scheme.is_indiscrete_like:
            if indiscrete is None:
                indiscrete = i
    holds = None not in (trivial, regular, indiscrete)
    return AdmissibleResult(holds, trivial, regular, indiscrete)


# ---------------------------------------------------------------------------
# Finitely supported vectors
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SparseVector:
    """Finitely supported vector addressed by (block, offset) of a
    reference scheme.  Zero entries are dropped; every address is resolved
    to its global index at construction."""

    scheme: PartitionScheme
    entries: tuple[tuple[tuple[int, int], float], ...]
    globals_: tuple[int, ...]

    @staticmethod
    def from_entries(scheme: PartitionScheme, mapping) -> "SparseVector":
        items = []
        seen = {}
        for (block, offset), value in (
            mapping.items() if hasattr(mapping, "items") else mapping
        ):
            if value == 0:
                continue
            addr = (int(block), int(offset))
            if addr in seen:
                raise SpecValidationError(f"duplicate address {addr}")
            seen[addr] = value
            g = scheme.position(*addr)  # validates the address
            items.append((addr, value, g))
        items.sort(key=lambda t: t[2])
        return SparseVector(
            scheme=scheme,
            entries=tuple((addr, v) for addr, v, _ in items),
            globals_=tuple(g for _, _, g in items),
        )

    @staticmethod
    def from_global(scheme: PartitionScheme, mapping) -> "SparseVector":
        return SparseVector.from_entries(
            scheme,
            {scheme.locate(int(g)): v for g, v in mapping.items() if v != 0},
        )

    @staticmethod
    def basis(scheme: PartitionScheme, g: int) -> "SparseVector":
        return SparseVector.from_global(scheme, {g: 1.0})

    def __len__(self) -> int:
        return len(self.entries)

    def values(self):
        return tuple(v for _, v in self.entries)

    def to_global_dict(self) -> dict[int, float]:
        return {g: v for g, (_, v) in zip(self.globals_, self.entries)}

    def map_values(self, fn) -> "SparseVector":
        return SparseVector.from_entries(
            self.scheme, {addr: fn(v) for addr, v in self.entries}
        )

    def __add__(self, other: "SparseVector") -> "SparseVector":
        if self.scheme != other.scheme:
            raise SpecValidationError("vectors addressed by different schemes")
        acc = dict(self.entries)
        for addr, v in other.entries:
            acc[addr] = acc.get(addr, 0.0) + v
        return SparseVector.from_entries(self.scheme, acc)

    def scaled(self, factor: float) -> "SparseVector":
        return self.map_values(lambda v: factor * v)
