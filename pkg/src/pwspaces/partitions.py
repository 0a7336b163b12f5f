"""Symbolic partitions of a countable index set.

A scheme is one of:

    discrete     every block a singleton (adapts to any index set)
    indiscrete   one block covering everything (adapts to any index set)
    blocks       an ordered list of (size, count) block groups; at most one
                 group may have count INFINITE and it must be last
    subdivision  every block of a parent scheme cut into consecutive chunks
                 of a fixed size (the irreducible form; subdivisions of
                 consecutive parents flatten back to plain blocks)

Every scheme answers profile queries (block sizes and counts, the set of
infinite blocks) symbolically, never by enumeration.

Index layout.  Finitely many finite blocks occupy consecutive positive
integers in declaration order.  A trailing infinite run of finite blocks
continues consecutively.  Infinite blocks are laid out after the finite
prefix: finitely many of them stride round-robin, infinitely many by the
standard diagonal pairing of (block, offset).  When infinitely many finite
blocks coexist with infinite blocks, odd positions host the finite blocks
and even positions the infinite ones.  The layout is a convention (the
isomorphism class never depends on it); it exists so that refinement and
addressing are decidable by arithmetic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

from .errors import (
    AddressOutOfRange,
    IncomparableLayout,
    SpecValidationError,
    UnsupportedFamily,
)
from .rationals import INFINITE, Extent, is_infinite

DISCRETE = "discrete"
INDISCRETE = "indiscrete"
BLOCKS = "blocks"
SUBDIVISION = "subdivision"

_ENUM_CAP = 2_000_000  # guard for explicit boundary enumeration


def _check_extent_value(x, what: str, location=None) -> Extent:
    if x == INFINITE:
        return INFINITE
    if isinstance(x, bool) or not isinstance(x, int):
        raise SpecValidationError(f"{what} must be a positive integer or INFINITE", location)
    if x < 1:
        raise SpecValidationError(f"{what} must be >= 1, got {x}", location)
    return x


@dataclass(frozen=True)
class BlockGroup:
    size: Extent
    count: Extent


@dataclass(frozen=True)
class PartitionScheme:
    kind: str
    groups: tuple[BlockGroup, ...] = ()
    parent: "PartitionScheme | None" = None
    chunk: int | None = None

    # -- constructors --------------------------------------------------------

    @staticmethod
    def discrete() -> "PartitionScheme":
        return PartitionScheme(DISCRETE)

    @staticmethod
    def indiscrete() -> "PartitionScheme":
        return PartitionScheme(INDISCRETE)

    @staticmethod
    def blocks(groups) -> "PartitionScheme":
        gs = []
        for idx, g in enumerate(groups):
            if isinstance(g, BlockGroup):
                size, count = g.size, g.count
            else:
                size, count = g
            size = _check_extent_value(size, "block size", f"blocks[{idx}].size")
            count = _check_extent_value(count, "block count", f"blocks[{idx}].count")
            gs.append(BlockGroup(size, count))
        if not gs:
            raise SpecValidationError("a blocks scheme needs at least one descriptor")
        for idx, g in enumerate(gs[:-1]):
            if is_infinite(g.count):
                raise SpecValidationError(
                    "only the last descriptor may have INFINITE count",
                    f"blocks[{idx}]",
                )
        scheme = PartitionScheme(BLOCKS, groups=tuple(gs))
        # normalizations that lose no information
        if all(g.size == 1 for g in gs) and is_infinite(scheme.extent()):
            return PartitionScheme(DISCRETE)
        if len(gs) == 1 and gs[0] == BlockGroup(INFINITE, 1):
            return PartitionScheme(INDISCRETE)
        return scheme

    @staticmethod
    def subdivide(parent: "PartitionScheme", chunk: int) -> "PartitionScheme":
        if isinstance(chunk, bool) or not isinstance(chunk, int) or chunk < 1:
            raise SpecValidationError(f"chunk size must be a positive integer, got {chunk}")
        if parent.kind == DISCRETE:
            return parent
        if chunk == 1:
            ext = parent.extent()
            if ext is None or is_infinite(ext):
                return PartitionScheme(DISCRETE)
            return PartitionScheme.blocks([(1, ext)])
        if parent.kind == INDISCRETE:
            return PartitionScheme.blocks([(chunk, INFINITE)])
        if parent.kind == SUBDIVISION and parent.chunk % chunk == 0 and all(
            is_infinite(s) or s % parent.chunk == 0 for s in parent._parent_sizes()
        ):
            return PartitionScheme.subdivide(parent.parent, chunk)
        if parent.kind == BLOCKS and parent._layout_case() == "consecutive":
            flat = _flatten_consecutive_subdivision(parent, chunk)
            if flat is not None:
                return flat
        sub = PartitionScheme(SUBDIVISION, parent=parent, chunk=chunk)
        if parent.block_count() == 1 and not is_infinite(parent.block_size(1)) \
                and parent.block_size(1) <= chunk:
            return parent
        return sub

    def _parent_sizes(self):
        p = self.parent
        return [p.block_size(b) for b in range(1, min(_cap(p.block_count()), 64) + 1)]

    # -- profile ---------------------------------------------------------------

    def extent(self) -> Extent | None:
        """Total number of indices, or None for adaptive schemes."""
        if self.kind in (DISCRETE, INDISCRETE):
            return None
        if self.kind == SUBDIVISION:
            return self.parent.extent()
        total = 0
        for g in self.groups:
            if is_infinite(g.size) or is_infinite(g.count):
                return INFINITE
            total += g.size * g.count
        return total

    def block_count(self) -> Extent:
        if self.kind == DISCRETE:
            return INFINITE  # adaptive; treated as countable by default
        if self.kind == INDISCRETE:
            return 1
        if self.kind == SUBDIVISION:
            total = 0
            pc = self.parent.block_count()
            if is_infinite(pc):
                return INFINITE
            for b in range(1, pc + 1):
                s = self.parent.block_size(b)
                if is_infinite(s):
                    return INFINITE
                total += -(-s // self.chunk)
            return total
        total = 0
        for g in self.groups:
            if is_infinite(g.count):
                return INFINITE
            total += g.count
        return total

    def infinite_block_count(self) -> Extent:
        """|I| where I = {blocks of infinite size}."""
        if self.kind == DISCRETE:
            return 0
        if self.kind == INDISCRETE:
            return 1
        if self.kind == SUBDIVISION:
            return 0  # chunks are always finite
        total = 0
        for g in self.groups:
            if is_infinite(g.size):
                if is_infinite(g.count):
                    return INFINITE
                total += g.count
        return total

    def finite_block_count(self) -> Extent:
        """|B \\ I|, the number of finite blocks."""
        if self.kind == DISCRETE:
            return INFINITE
        if self.kind == INDISCRETE:
            return 0
        if self.kind == SUBDIVISION:
            return self.block_count()
        total = 0
        for g in self.groups:
            if not is_infinite(g.size):
                if is_infinite(g.count):
                    return INFINITE
                total += g.count
        return total

    def block_size(self, b: int) -> Extent:
        if b < 1:
            raise AddressOutOfRange(f"block {b}")
        if self.kind == DISCRETE:
            return 1
        if self.kind == INDISCRETE:
            return INFINITE
        if self.kind == SUBDIVISION:
            pb, j = self._sub_block(b)
            t = self.parent.block_size(pb)
            if is_infinite(t):
                return self.chunk
            return min(self.chunk, t - (j - 1) * self.chunk)
        seen = 0
        for g in self.groups:
            if is_infinite(g.count) or b <= seen + g.count:
                return g.size
            seen += g.count
        raise AddressOutOfRange(f"block {b} beyond the {seen} declared blocks")

    @property
    def is_discrete_like(self) -> bool:
        if self.kind == DISCRETE:
            return True
        if self.kind == BLOCKS:
            return all(g.size == 1 for g in self.groups)
        return False

    @property
    def is_indiscrete_like(self) -> bool:
        return self.kind == INDISCRETE or (
            self.kind == BLOCKS and self.block_count() == 1
        )

    @property
    def is_regular(self) -> bool:
        """Neither discrete nor indiscrete."""
        return not (self.is_discrete_like or self.is_indiscrete_like)

    # -- layout ------------------------------------------------------------------

    def _layout_case(self) -> str:
        if self.kind != BLOCKS:
            raise ValueError("layout case applies to blocks schemes")
        n_inf = self.infinite_block_count()
        n_fin = self.finite_block_count()
        if n_inf == 0:
            return "consecutive"
        if is_infinite(n_fin):
            return "split"
        if is_infinite(n_inf):
            return "diagonal"
        return "striped"

    def _roles(self):
        """Per declaration id: role among finite blocks or infinite blocks."""
        fin_before = 0
        inf_before = 0
        out = []
        for g in self.groups:
            out.append((g, fin_before, inf_before))
            if is_infinite(g.count):
                break
            if is_infinite(g.size):
                inf_before += g.count
            else:
                fin_before += g.count
        return out

    def _role(self, b: int):
        """('fin', f_idx, size) or ('inf', i_idx) for declaration id b."""
        seen = 0
        for g, fin_before, inf_before in self._roles():
            cnt = g.count
            if is_infinite(cnt) or b <= seen + cnt:
                pos = b - seen
                if is_infinite(g.size):
                    return ("inf", inf_before + pos)
                return ("fin", fin_before + pos, g.size)
            seen += cnt
        raise AddressOutOfRange(f"block {b}")

    def _id_for_role(self, role: str, idx: int) -> int:
        seen = 0
        for g, fin_before, inf_before in self._roles():
            before = inf_before if role == "inf" else fin_before
            matches = (role == "inf") == is_infinite(g.size)
            if matches:
                if is_infinite(g.count) or idx <= before + g.count:
                    return seen + (idx - before)
            if is_infinite(g.count):
                break
            seen += g.count
        raise AddressOutOfRange(f"no {role} block #{idx}")

    def _fin_sizes(self):
        """(explicit finite-block sizes, trailing size or None) in fin order."""
        sizes = []
        trailing = None
        for g in self.groups:
            if is_infinite(g.size):
                continue
            if is_infinite(g.count):
                trailing = g.size
            else:
                sizes.extend([g.size] * g.count)
        return sizes, trailing

    def _fin_start(self, f_idx: int) -> int:
        sizes, trailing = self._fin_sizes()
        if f_idx <= len(sizes):
            return 1 + sum(sizes[: f_idx - 1])
        if trailing is None:
            raise AddressOutOfRange(f"finite block #{f_idx}")
        return 1 + sum(sizes) + (f_idx - len(sizes) - 1) * trailing

    def _fin_locate(self, pos: int):
        """(f_idx, offset) of consecutive position pos within the finite region."""
        sizes, trailing = self._fin_sizes()
        acc = 0
        for i, s in enumerate(sizes, start=1):
            if pos <= acc + s:
                return i, pos - acc
            acc += s
        if trailing is None:
            raise AddressOutOfRange(f"index {pos} beyond the finite index set")
        rest = pos - acc - 1
        return len(sizes) + 1 + rest // trailing, rest % trailing + 1

    def position(self, block: int, offset: int) -> int:
        """Global index of (block, offset) under this scheme's layout."""
        if block < 1 or offset < 1:
            raise AddressOutOfRange(f"(block={block}, offset={offset})")
        if self.kind == DISCRETE:
            if offset != 1:
                raise AddressOutOfRange("discrete blocks have a single element")
            return block
        if self.kind == INDISCRETE:
            if block != 1:
                raise AddressOutOfRange("the indiscrete scheme has a single block")
            return offset
        if self.kind == SUBDIVISION:
            pb, j = self._sub_block(block)
            size = self.block_size(block)
            if not is_infinite(size) and offset > size:
                raise AddressOutOfRange(f"offset {offset} in block {block} of size {size}")
            return self.parent.position(pb, (j - 1) * self.chunk + offset)
        size = self.block_size(block)
        if not is_infinite(size) and offset > size:
            raise AddressOutOfRange(f"offset {offset} in block {block} of size {size}")
        case = self._layout_case()
        role = self._role(block)
        n_inf = self.infinite_block_count()
        if case == "consecutive":
            return self._fin_start(role[1]) + offset - 1
        if case == "striped":
            T = sum(s for s in self._fin_sizes()[0])
            if role[0] == "fin":
                return self._fin_start(role[1]) + offset - 1
            return T + role[1] + n_inf * (offset - 1)
        if case == "diagonal":
            T = sum(s for s in self._fin_sizes()[0])
            if role[0] == "fin":
                return self._fin_start(role[1]) + offset - 1
            return T + _diag_index(role[1], offset)
        # split: odd positions = finite blocks, even = infinite blocks
        if role[0] == "fin":
            return 2 * (self._fin_start(role[1]) + offset - 1) - 1
        return 2 * (role[1] + n_inf * (offset - 1))

    def locate(self, g: int) -> tuple[int, int]:
        """(block, offset) of global index g."""
        if g < 1:
            raise AddressOutOfRange(f"index {g}")
        ext = self.extent()
        if ext is not None and not is_infinite(ext) and g > ext:
            raise AddressOutOfRange(f"index {g} beyond the index set of size {ext}")
        if self.kind == DISCRETE:
            return g, 1
        if self.kind == INDISCRETE:
            return 1, g
        if self.kind == SUBDIVISION:
            pb, po = self.parent.locate(g)
            j = (po - 1) // self.chunk + 1
            return self._sub_id(pb, j), (po - 1) % self.chunk + 1
        case = self._layout_case()
        n_inf = self.infinite_block_count()
        if case == "consecutive":
            f, off = self._fin_locate(g)
            return self._id_for_role("fin", f), off
        if case in ("striped", "diagonal"):
            T = sum(s for s in self._fin_sizes()[0])
            if g <= T:
                f, off = self._fin_locate(g)
                return self._id_for_role("fin", f), off
            rest = g - T
            if case == "striped":
                i = (rest - 1) % n_inf + 1
                k = (rest - 1) // n_inf + 1
            else:
                i, k = _diag_invert(rest)
            return self._id_for_role("inf", i), k
        # split
        if g % 2 == 1:
            f, off = self._fin_locate((g + 1) // 2)
            return self._id_for_role("fin", f), off
        rest = g // 2
        i = (rest - 1) % n_inf + 1
        k = (rest - 1) // n_inf + 1
        return self._id_for_role("inf", i), k

    # -- subdivision id enumeration ---------------------------------------------

    def _sub_chunks_of_parent(self, pb: int) -> Extent:
        t = self.parent.block_size(pb)
        return INFINITE if is_infinite(t) else -(-t // self.chunk)

    def _sub_enum_case(self) -> str:
        p = self.parent
        if p.infinite_block_count() == 0:
            return "parent-major"
        if is_infinite(p.finite_block_count()):
            return "split"
        if is_infinite(p.infinite_block_count()):
            return "diagonal"
        return "round-robin"

    def _fin_chunk_prefix(self, f_idx: int) -> int:
        """Chunks contributed by finite parent blocks before the f-th one."""
        p = self.parent
        total = 0
        for f in range(1, f_idx):
            pb = p._id_for_role("fin", f)
            total += self._sub_chunks_of_parent(pb)
        return total

    def _sub_id(self, pb: int, j: int) -> int:
        p = self.parent
        case = self._sub_enum_case()
        role = p._role(pb)
        if case == "parent-major":
            # all parent blocks finite; trailing groups give arithmetic counts
            return self._parent_major_id(pb, j)
        n_inf = p.infinite_block_count()
        if role[0] == "fin":
            fid = self._fin_chunk_prefix(role[1]) + j
            return 2 * fid - 1 if case == "split" else fid
        F = 0 if case == "split" else self._total_fin_chunks()
        if case == "round-robin":
            return F + (j - 1) * n_inf + role[1]
        if case == "diagonal":
            return F + _diag_index(role[1], j)
        return 2 * ((j - 1) * n_inf + role[1])  # split, infinite side

    def _total_fin_chunks(self) -> int:
        p = self.parent
        nf = p.finite_block_count()
        if is_infinite(nf):
            raise UnsupportedFamily("finite chunk prefix of an infinite family")
        return self._fin_chunk_prefix(nf + 1)

    def _parent_major_id(self, pb: int, j: int) -> int:
        p = self.parent
        total = 0
        seen = 0
        for g in p.groups:
            per = -(-g.size // self.chunk)
            if is_infinite(g.count) or pb <= seen + g.count:
                return total + (pb - seen - 1) * per + j
            total += per * g.count
            seen += g.count
        raise AddressOutOfRange(f"parent block {pb}")

    def _sub_block(self, fine_id: int) -> tuple[int, int]:
        """(parent block, chunk index) of a subdivision block id."""
        p = self.parent
        case = self._sub_enum_case()
        if case == "parent-major":
            total = 0
            seen = 0
            for g in p.groups:
                per = -(-g.size // self.chunk)
                cnt = g.count
                if is_infinite(cnt) or fine_id <= total + per * cnt:
                    rel = fine_id - total - 1
                    return seen + rel // per + 1, rel % per + 1
                total += per * cnt
                seen += cnt
            raise AddressOutOfRange(f"block {fine_id}")
        n_inf = p.infinite_block_count()
        if case == "split":
            if fine_id % 2 == 1:
                return self._fin_chunk_locate((fine_id + 1) // 2)
            rest = fine_id // 2
            i = (rest - 1) % n_inf + 1
            j = (rest - 1) // n_inf + 1
            return p._id_for_role("inf", i), j
        F = self._total_fin_chunks()
        if fine_id <= F:
            return self._fin_chunk_locate(fine_id)
        rest = fine_id - F
        if case == "round-robin":
            i = (rest - 1) % n_inf + 1
            j = (rest - 1) // n_inf + 1
        else:
            i, j = _diag_invert(rest)
        return p._id_for_role("inf", i), j

    def _fin_chunk_locate(self, fid: int) -> tuple[int, int]:
        p = self.parent
        f = 1
        acc = 0
        while True:
            pb = p._id_for_role("fin", f)
            per = self._sub_chunks_of_parent(pb)
            if fid <= acc + per:
                return pb, fid - acc
            acc += per
            f += 1
            if f > _ENUM_CAP:
                raise UnsupportedFamily("chunk enumeration blew the cap")

    # -- boundary structure for consecutive schemes -------------------------------

    def consecutive_boundaries(self):
        """(explicit block-end positions, (period, first periodic end) or None).

        Only for schemes whose blocks tile consecutive integers: discrete,
        all-finite blocks schemes, and subdivisions that flattened.  Returns
        None for any other layout.
        """
        if self.kind == DISCRETE:
            return [], (1, 1)
        if self.kind == INDISCRETE:
            return None
        if self.kind == BLOCKS and self._layout_case() == "consecutive":
            ends = []
            acc = 0
            for g in self.groups:
                if is_infinite(g.count):
                    return ends, (g.size, acc + g.size)
                for _ in range(g.count):
                    acc += g.size
                    ends.append(acc)
                    if len(ends) > _ENUM_CAP:
                        raise UnsupportedFamily("boundary enumeration blew the cap")
            return ends, None
        return None


def _flatten_consecutive_subdivision(parent, chunk) -> PartitionScheme | None:
    """Rewrite a subdivision of a consecutive scheme as plain blocks."""
    groups = []
    for g in parent.groups:
        if is_infinite(g.size):
            return None
        q, rem = divmod(g.size, chunk)
        if is_infinite(g.count):
            if rem:
                return None  # ragged repeating pattern is not expressible
            groups.append((chunk, INFINITE))
            break
        per = ([(chunk, q)] if q else []) + ([(rem, 1)] if rem else [])
        if len(per) == 1:
            size, cnt = per[0]
            groups.append((size, cnt * g.count))
        else:
            if g.count > 64:
                return None
            groups.extend(per * g.count)
    merged = []
    for size, cnt in groups:
        if merged and merged[-1][0] == size and not is_infinite(merged[-1][1]):
            merged[-1] = (size, merged[-1][1] + cnt if not is_infinite(cnt) else INFINITE)
        else:
            merged.append((size, cnt))
    return PartitionScheme.blocks(merged)


def _diag_index(i: int, k: int) -> int:
    d = i + k
    return (d - 2) * (d - 1) // 2 + i


def _diag_invert(n: int) -> tuple[int, int]:
    # largest d with (d-2)(d-1)/2 < n
    d = (1 + math.isqrt(8 * n - 7)) // 2 + 1
    while (d - 2) * (d - 1) // 2 >= n:
        d -= 1
    while (d - 1) * d // 2 < n:
        d += 1
    i = n - (d - 2) * (d - 1) // 2
    return i, d - i


def _cap(x: Extent) -> int:
    return _ENUM_CAP if is_infinite(x) else int(x)


# ---------------------------------------------------------------------------
# Refinement
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ContainmentMap:
    """Maps each fine block id to the coarse block id containing it."""

    fine_to_coarse: Callable[[int], int]
    description: str

    def __call__(self, fine_block: int) -> int:
        return self.fine_to_coarse(fine_block)


@dataclass(frozen=True)
class RefinesResult:
    holds: bool
    containment: ContainmentMap | None = None

    def __bool__(self) -> bool:
        return self.holds


_NOT_REFINES = RefinesResult(False, None)


def refines(fine: PartitionScheme, coarse: PartitionScheme) -> RefinesResult:
    """Is every fine block contained in exactly one coarse block?

    Decided by layout arithmetic for the supported scheme combinations.
    Raises IncomparableLayout when the two schemes pin different index-set
    sizes (they then do not partition the same set at all).
    """
    ef, ec = fine.extent(), coarse.extent()
    if ef is not None and ec is not None and ef != ec:
        raise IncomparableLayout(
            f"index sets of size {ef} and {ec} cannot share a layout"
        )

    if coarse.is_indiscrete_like:
        return RefinesResult(True, ContainmentMap(lambda b: 1, "everything in the single block"))
    if fine.is_discrete_like:
        def to_coarse(b, fine=fine, coarse=coarse):
            return coarse.locate(fine.position(b, 1))[0]
        return RefinesResult(True, ContainmentMap(to_coarse, "singletons via layout"))
    if fine.is_indiscrete_like:
        return _NOT_REFINES  # coarse is not a single block here
    if coarse.is_discrete_like:
        return _NOT_REFINES  # fine has some block of size >= 2

    if fine == coarse:
        return RefinesResult(True, ContainmentMap(lambda b: b, "identical schemes"))

    if fine.kind == SUBDIVISION:
        if fine.parent == coarse:
            return RefinesResult(
                True, ContainmentMap(lambda b: fine._sub_block(b)[0], "chunks of the parent")
            )
        if coarse.kind == SUBDIVISION and coarse.parent == fine.parent:
            if coarse.chunk % fine.chunk == 0:
                ratio = coarse.chunk // fine.chunk

                def chunk_map(b, fine=fine, coarse=coarse, ratio=ratio):
                    pb, j = fine._sub_block(b)
                    return coarse._sub_id(pb, (j - 1) // ratio + 1)

                return RefinesResult(True, ContainmentMap(chunk_map, "aligned chunking"))
            return _NOT_REFINES
        up = refines(fine.parent, coarse)
        if up.holds:
            def composed(b, fine=fine, up=up):
                return up.containment(fine._sub_block(b)[0])
            return RefinesResult(True, ContainmentMap(composed, "chunks, then the parent map"))
        return _NOT_REFINES

    bf = fine.consecutive_boundaries()
    bc = coarse.consecutive_boundaries()
    if bf is not None and bc is not None:
        return _consecutive_refines(fine, coarse, bf, bc)

    if fine.kind == BLOCKS and coarse.kind == BLOCKS:
        return _striped_refines(fine, coarse)

    return _NOT_REFINES


def _consecutive_refines(fine, coarse, bf, bc) -> RefinesResult:
    """Boundary-set inclusion for consecutive layouts.

    Both boundary sets are eventually periodic, so coarse ⊆ fine reduces to
    a finite prefix check plus one aligned period window.
    """
    ends_f, per_f = bf
    ends_c, per_c = bc
    end_set_f = set(ends_f)

    def fine_has(pos: int) -> bool:
        if pos in end_set_f:
            return True
        if per_f is None:
            return False
        step, start = per_f
        return pos >= start and (pos - start) % step == 0

    for pos in ends_c:
        if not fine_has(pos):
            return _NOT_REFINES
    if per_c is not None:
        if per_f is None:
            return _NOT_REFINES
        step_c, start_c = per_c
        step_f, start_f = per_f
        if step_c % step_f != 0:
            return _NOT_REFINES
        # beyond both explicit prefixes the sets are periodic, so checking
        # one lcm window past the later periodic onset decides everything
        window_end = max(start_c, start_f) + _lcm(step_c, step_f)
        pos = start_c
        while pos <= window_end:
            if not fine_has(pos):
                return _NOT_REFINES
            pos += step_c

    def to_coarse(b, fine=fine, coarse=coarse):
        return coarse.locate(fine.position(b, 1))[0]

    return RefinesResult(True, ContainmentMap(to_coarse, "aligned consecutive boundaries"))


def _striped_refines(fine, coarse) -> RefinesResult:
    """Refinement among striped/diagonal/split layouts.

    Exact for matching layout families: stripes refine stripes when the
    finite prefixes agree and the stripe counts divide; anything else that
    is not structurally equal reports False.
    """
    case_f, case_c = fine._layout_case(), coarse._layout_case()
    if case_f == "striped" and case_c == "striped":
        Tf = sum(fine._fin_sizes()[0])
        Tc = sum(coarse._fin_sizes()[0])
        if Tf != Tc:
            return _NOT_REFINES
        mf, mc = fine.infinite_block_count(), coarse.infinite_block_count()
        if mf % mc != 0:
            return _NOT_REFINES
        if Tf:
            pre_f = PartitionScheme.blocks([(s, 1) for s in fine._fin_sizes()[0]])
            pre_c = PartitionScheme.blocks([(s, 1) for s in coarse._fin_sizes()[0]])
            if not refines(pre_f, pre_c).holds:
                return _NOT_REFINES

        def stripe_map(b, fine=fine, coarse=coarse, mc=mc):
            role = fine._role(b)
            if role[0] == "fin":
                return coarse.locate(fine.position(b, 1))[0]
            return coarse._id_for_role("inf", (role[1] - 1) % mc + 1)

        return RefinesResult(True, ContainmentMap(stripe_map, "nested stripes"))
    return _NOT_REFINES


def _lcm(a: int, b: int) -> int:
    return a * b // math.gcd(a, b)
