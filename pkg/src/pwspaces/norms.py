"""Norm evaluation and the bound constants behind every inequality chain.

For one (partition, weights) pair the norm of a finitely supported x is

    ||x||_(P,W) = ( sum_{N in P} ( sum_{j in N} x_j^2 w_j^2 )^(p/2) )^(1/p)

and the space norm is the maximum over the declared pairs (the trivial
pair contributes the plain l_p norm).  Block sums use compensated
summation; an exact rational path (p-th powers as Fractions) backs the
oracle tests.

The two majorants implemented here share one exponent: with
q = 2p/(p-2),

    (sum x^2 w^2)^(1/2)  <=  ||x||_p * (sum w^q)^(1/q)

by Holder's inequality (1/q = (p-2)/(2p); squaring the two-factor Holder
bound and taking square roots forces the half exponent), and for a fine
pair refining a coarse one with w1 >= w2 pointwise,

    ||x||_(P2,W2)  <=  ( sup_M sum_{N in M} W_N^q )^(1/q) * ||x||_(P1,W1)

where W_N = sup_{k in N} w2_k / w1_k.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import (
    NotARefinement,
    RatioAssumptionViolated,
    SpecValidationError,
    UnsupportedFamily,
)
from .partitions import BLOCKS, SUBDIVISION, PartitionScheme, refines
from .rationals import INFINITE, is_infinite, parse_rational, pow_value, rational_pow
from .spaces import PartitionWeightPair, SparseVector, SpaceSpec, _tail_block_sizes
from .weights import (
    CONSTANT,
    EXPLICIT,
    GEOMETRIC,
    INTERLEAVED,
    POWER,
    RatioSup,
    SumResult,
    WeightFamily,
    ratio_supremum,
)

from scipy.special import zeta as _hurwitz_zeta


# ---------------------------------------------------------------------------
# Norm evaluation
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class NormBreakdown:
    per_pair: tuple[float, ...]
    overall: float
    argmax: int

    def __float__(self) -> float:
        return self.overall


def pair_norm(x: SparseVector, pair: PartitionWeightPair, p) -> float:
    """Norm of x under one pair; sums only over blocks meeting the support."""
    pf = float(parse_rational(p))
    same = x.scheme == pair.scheme
    blocks: dict[int, list[float]] = {}
    for (addr, v), g in zip(x.entries, x.globals_):
        B, K = addr if same else pair.scheme.locate(g)
        w = float(pair.weights.weight_at(B, K))
        blocks.setdefault(B, []).append((v * w) ** 2)
    total = math.fsum(math.fsum(terms) ** (pf / 2.0) for terms in blocks.values())
    return total ** (1.0 / pf)


def space_norm(x: SparseVector, spec: SpaceSpec) -> NormBreakdown:
    """Per-pair norms and their maximum; ties go to the earliest pair."""
    values = tuple(pair_norm(x, pair, spec.p) for pair in spec.pairs)
    arg = 0
    for i, v in enumerate(values):
        if v > values[arg]:
            arg = i
    return NormBreakdown(per_pair=values, overall=values[arg], argmax=arg)


def pair_norm_pth_power_exact(x: SparseVector, pair: PartitionWeightPair, p) -> Fraction:
    """||x||_(P,W)^p as an exact rational.

    Needs p/2 to be an integer and every touched squared weight rational;
    vector values convert exactly (floats are binary rationals).  Supports
    up to 16 entries — this is the oracle path, not the fast path.
    """
    p = parse_rational(p)
    half = p / 2
    if half.denominator != 1:
        raise UnsupportedFamily("exact evaluation needs p/2 to be an integer")
    if len(x) > 16:
        raise SpecValidationError("exact evaluation supports at most 16 entries")
    same = x.scheme == pair.scheme
    blocks: dict[int, Fraction] = {}
    for (addr, v), g in zip(x.entries, x.globals_):
        B, K = addr if same else pair.scheme.locate(g)
        wsq = pair.weights.family_for_block(B).weight_sq_at(K)
        if wsq is None:
            raise UnsupportedFamily("irrational weight in the exact path")
        blocks[B] = blocks.get(B, Fraction(0)) + Fraction(v) ** 2 * wsq
    return sum((s ** int(half) for s in blocks.values()), Fraction(0))


def space_norm_pth_powers_exact(x: SparseVector, spec: SpaceSpec) -> tuple[Fraction, ...]:
    return tuple(pair_norm_pth_power_exact(x, pair, spec.p) for pair in spec.pairs)


# ---------------------------------------------------------------------------
# Holder majorant
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class HolderMajorant:
    """C(w) = (sum w^q)^(1/q), guaranteeing (sum x^2 w^2)^(1/2) <= C ||x||_p."""

    constant: float                       # math.inf when the sum diverges
    exact: Fraction | None
    qsum: SumResult
    partial_sums: tuple[tuple[int, float], ...]
    q: Fraction

    @property
    def finite(self) -> bool:
        return math.isfinite(self.constant)


def critical_exponent(p) -> Fraction:
    p = parse_rational(p)
    if p <= 2:
        raise SpecValidationError(f"the exponent must exceed 2, got {p}")
    return 2 * p / (p - 2)


def holder_majorant(w: WeightFamily, p, size: int | None = None) -> HolderMajorant:
    q = critical_exponent(p)
    total = w.qsum(q, size=size)
    marks = [n for n in (8, 64, 512, 4096) if size is None or n <= size]
    partials = tuple((n, w.qsum(q, size=n).value) for n in marks)
    if not total.converges:
        return HolderMajorant(math.inf, None, total, partials, q)
    exact = rational_pow(total.exact, 1 / q) if total.exact is not None else None
    constant = float(exact) if exact is not None else total.value ** float(1 / q)
    return HolderMajorant(constant, exact, total, partials, q)


def block_ratio(w1: WeightFamily, w2: WeightFamily, size: int | None = None) -> RatioSup:
    """W_N = sup over the block of w2/w1, checking w1 >= w2 symbolically."""
    return ratio_supremum(w1, w2, size)


# ---------------------------------------------------------------------------
# Refinement majorant
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RefinementMajorant:
    """C = (sup_M sum_{N in M} W_N^q)^(1/q) or INFINITE."""

    constant: float
    exact: Fraction | None
    sup_inner: float
    sup_inner_exact: Fraction | None
    q: Fraction
    detail: str

    @property
    def finite(self) -> bool:
        return math.isfinite(self.constant)


class _Acc:
    """Accumulates a sum of q-th powers, tracking exactness and divergence."""

    def __init__(self):
        self.value = 0.0
        self.exact: Fraction | None = Fraction(0)
        self.finite = True

    def add_term(self, ratio: RatioSup, q: Fraction):
        if not self.finite:
            return
        if ratio.exact is not None:
            ex = rational_pow(ratio.exact, q)
            if ex is not None and self.exact is not None:
                self.exact += ex
                self.value += float(ex)
                return
        self.exact = None
        self.value += ratio.value ** float(q)

    def add_raw(self, value: float, exact: Fraction | None):
        if not self.finite:
            return
        if math.isinf(value):
            self.diverge()
            return
        self.value += value
        if exact is not None and self.exact is not None:
            self.exact += exact
        else:
            self.exact = None

    def diverge(self):
        self.finite = False
        self.value = math.inf
        self.exact = None


def _check_ratio(r: RatioSup):
    too_big = r.exact > 1 if r.exact is not None else r.value > 1 + 1e-12
    if too_big:
        raise RatioAssumptionViolated(
            f"w2/w1 reaches {r.value} at index {r.at_index}; need w1 >= w2"
        )
    return r


def fine_block_ratio(
    fine: PartitionWeightPair, coarse: PartitionWeightPair, block: int
) -> RatioSup:
    """W_N for one fine block N, with w2 read through the coarse pair's
    own addressing.  Exact enumeration for finite blocks; closed forms for
    the supported infinite-block structures."""
    size = fine.scheme.block_size(block)
    w1 = fine.weights.family_for_block(block)
    if not is_infinite(size):
        best = None
        for k in range(1, int(size) + 1):
            g = fine.scheme.position(block, k)
            B, K = coarse.scheme.locate(g)
            v2 = coarse.weights.weight_at(B, K)
            v1 = w1.weight_at(k)
            if isinstance(v1, Fraction) and isinstance(v2, Fraction):
                cand = RatioSup(float(v2 / v1), v2 / v1, True, k)
            else:
                cand = RatioSup(float(v2) / float(v1), None, True, k)
            if best is None or cand.value > best.value:
                best = cand
        return _check_ratio(best)
    # infinite fine block: positions are increasing in the offset k
    if w1.kind != CONSTANT:
        raise UnsupportedFamily(
            "ratios over infinite blocks need constant fine weights"
        )
    g1 = fine.scheme.position(block, 1)
    B, K = coarse.scheme.locate(g1)
    fam2 = coarse.weights.family_for_block(B)
    if not fam2.is_monotone_nonincreasing:
        raise UnsupportedFamily(
            "ratios over infinite blocks need monotone coarse weights"
        )
    v2 = fam2.weight_at(K)
    v1 = w1.c
    if isinstance(v2, Fraction):
        return _check_ratio(RatioSup(float(v2 / v1), v2 / v1, True, 1))
    return _check_ratio(RatioSup(float(v2) / float(v1), None, True, 1))


def refinement_majorant(
    fine: PartitionWeightPair, coarse: PartitionWeightPair, p
) -> RefinementMajorant:
    """The constant of the refinement chain, or INFINITE.

    Requires the fine partition to refine the coarse one and w1 >= w2
    pointwise (checked symbolically).  sup_M sum_{N subset M} W_N^q is
    computed in closed form per structural case.
    """
    p = parse_rational(p)
    q = critical_exponent(p)
    if not refines(fine.scheme, coarse.scheme).holds:
        raise NotARefinement(
            f"{fine.scheme.kind} does not refine {coarse.scheme.kind}"
        )
    sup_val, sup_exact, detail = _sup_inner_sums(fine, coarse, q)
    if math.isinf(sup_val):
        return RefinementMajorant(math.inf, None, sup_val, None, q, detail)
    exact = rational_pow(sup_exact, 1 / q) if sup_exact is not None else None
    constant = float(exact) if exact is not None else sup_val ** float(1 / q)
    return RefinementMajorant(constant, exact, sup_val, sup_exact, q, detail)


def _sup_inner_sums(fine, coarse, q):
    fs, cs = fine.scheme, coarse.scheme
    if fs == cs:
        return _sup_identical(fine, coarse, q)
    if cs.is_indiscrete_like:
        acc = _sum_all_fine_blocks(fine, coarse, q)
        tag = "single coarse block: summed W_N^q over every fine block"
        if not acc.finite:
            return math.inf, None, tag
        return acc.value, acc.exact, tag
    if fs.kind == SUBDIVISION and fs.parent == cs:
        return _sup_subdivision(fine, coarse, q)
    ext = fs.extent()
    if ext is not None and not is_infinite(ext):
        return _sup_finite(fine, coarse, q)
    bf = fs.consecutive_boundaries()
    bc = cs.consecutive_boundaries()
    if bf is not None and bc is not None:
        return _sup_consecutive(fine, coarse, q, bf, bc)
    if (
        fs.kind == cs.kind == BLOCKS
        and fs._layout_case() == "striped"
        and cs._layout_case() == "striped"
    ):
        return _sup_striped(fine, coarse, q)
    raise UnsupportedFamily(
        f"refinement sums for {fs.kind} inside {cs.kind} layouts"
    )


def _sup_identical(fine, coarse, q):
    """Equal partitions: each coarse block holds exactly its own fine copy,
    so the sup is (sup over blocks of W_block)^q.  The tail peak uses the
    scale ratio at its first index, which is the exact supremum for
    nonincreasing scale ratios (the only ones accepted)."""
    fs = fine.scheme
    n = fs.block_count()
    head = max(len(fine.weights.head), len(coarse.weights.head))
    explicit = _explicit_block_reach(fs, head)
    if not is_infinite(n):
        explicit = int(n)
    best: RatioSup | None = None
    for b in range(1, explicit + 1):
        size = fs.block_size(b)
        r = ratio_supremum(
            fine.weights.family_for_block(b),
            coarse.weights.family_for_block(b),
            None if is_infinite(size) else int(size),
        )
        _check_ratio(r)
        if best is None or r.value > best.value:
            best = r
    if is_infinite(n):
        s1, s2 = fine.weights.scale, coarse.weights.scale
        if not _scales_nonincreasing_ratio(s1, s2):
            raise UnsupportedFamily("growing scale ratio across identical blocks")
        for size in _tail_block_sizes(fs, explicit):
            r = ratio_supremum(
                fine.weights.template,
                coarse.weights.template,
                None if is_infinite(size) else int(size),
            )
            r = RatioSup(
                r.value * _scale_ratio_peak(s1, s2),
                None if r.exact is None else r.exact * _scale_ratio_peak_exact(s1, s2),
                r.attained,
                r.at_index,
            )
            _check_ratio(r)
            if best is None or r.value > best.value:
                best = r
    sup_inner = best.value ** float(q)
    exact = rational_pow(best.exact, q) if best.exact is not None else None
    return sup_inner, exact, "identical partitions: sup_M W_M^q"


def _scales_nonincreasing_ratio(s1, s2) -> bool:
    """Is scale2(t)/scale1(t) nonincreasing in t (so the peak is at t=1)?"""
    if s1 is None and s2 is None:
        return True
    f1 = s1 or WeightFamily.constant(1)
    f2 = s2 or WeightFamily.constant(1)
    if f1.kind == CONSTANT and f2.kind == CONSTANT:
        return True
    if f1.kind == CONSTANT and f2.kind == GEOMETRIC:
        return True
    if f1.kind == GEOMETRIC and f2.kind == GEOMETRIC and f2.r <= f1.r:
        return True
    return False


def _scale_ratio_peak(s1, s2) -> float:
    return float(_scale_ratio_peak_exact(s1, s2))


def _scale_ratio_peak_exact(s1, s2) -> Fraction:
    v1 = Fraction(1) if s1 is None else s1.weight_at(1)
    v2 = Fraction(1) if s2 is None else s2.weight_at(1)
    return Fraction(v2) / Fraction(v1)


def _explicit_block_reach(scheme, minimum) -> int:
    """Number of leading blocks to handle one by one before the trailing
    uniform group takes over (0-padded up to ``minimum``)."""
    if scheme.kind != BLOCKS:
        return minimum
    before = 0
    for g in scheme.groups:
        if is_infinite(g.count):
            break
        before += g.count
    else:
        return before  # no trailing group: every block is explicit
    return max(before, minimum)


# -- case: coarse indiscrete -------------------------------------------------

def _explicit_value_reach(fam: WeightFamily) -> int:
    if fam.kind == EXPLICIT:
        return len(fam.values)
    if fam.kind == INTERLEAVED:
        return 2 * max(_explicit_value_reach(fam.odd), _explicit_value_reach(fam.even))
    return 0


def _self_similar_factor(fam: WeightFamily, step: int) -> Fraction | None:
    """lambda with fam(g + step) = lambda * fam(g) for all g past the
    explicit reach, or None."""
    if fam.kind == CONSTANT:
        return Fraction(1)
    if fam.kind == GEOMETRIC:
        return fam.r**step
    if fam.kind == EXPLICIT:
        return _self_similar_factor(fam.tail, step)
    if fam.kind == INTERLEAVED and step % 2 == 0:
        lo = _self_similar_factor(fam.odd, step // 2)
        le = _self_similar_factor(fam.even, step // 2)
        if lo is not None and lo == le:
            return lo
    return None


def _scale_tail_form(scale: WeightFamily | None, t0: int):
    """(value at t0, ratio rho) when scale(t) is geometric/constant from t0 on."""
    if scale is None:
        return Fraction(1), Fraction(1)
    if scale.kind == CONSTANT:
        return scale.c, Fraction(1)
    if scale.kind == GEOMETRIC:
        return scale.weight_at(t0), scale.r
    if scale.kind == EXPLICIT and t0 > len(scale.values):
        return _scale_tail_form(scale.tail, t0 - len(scale.values))
    raise UnsupportedFamily("scale tail is not eventually geometric here")


def _geometric_power_series(a: Fraction | float, mu: Fraction, q: Fraction):
    """sum_{u>=0} (a * mu^u)^q: exact when the powers are rational."""
    if mu >= 1:
        return math.inf, None
    muq = rational_pow(mu, q)
    aq = rational_pow(a, q) if isinstance(a, Fraction) else None
    if muq is not None and aq is not None:
        exact = aq / (1 - muq)
        return float(exact), exact
    return float(a) ** float(q) / (1.0 - pow_value(mu, q)), None


def _sum_all_fine_blocks(fine, coarse, q) -> _Acc:
    """sum over every fine block of W_N^q, coarse having a single block."""
    fs = fine.scheme
    acc = _Acc()
    n = fs.block_count()
    if not is_infinite(n) and fs.extent() is not None and not is_infinite(fs.extent()):
        for b in range(1, int(n) + 1):
            acc.add_term(fine_block_ratio(fine, coarse, b), q)
        return acc

    if fs.kind == BLOCKS and fs._layout_case() == "striped":
        for b in range(1, int(n) + 1):
            acc.add_term(fine_block_ratio(fine, coarse, b), q)
        return acc
    if fs.kind == BLOCKS and fs._layout_case() in ("diagonal", "split"):
        # infinitely many blocks whose ratios do not decay along the layout
        first = fine_block_ratio(fine, coarse, 1)
        _check_ratio(first)
        w2 = coarse.weights.template
        if w2.kind == CONSTANT and fine.weights.scale is None:
            acc.diverge()
            return acc
        raise UnsupportedFamily(
            f"indiscrete majorant over a {fs._layout_case()} fine layout"
        )

    bounds = fs.consecutive_boundaries()
    if bounds is None:
        raise UnsupportedFamily("indiscrete majorant needs a consecutive fine layout")
    ends, period = bounds
    if period is None:
        for b in range(1, int(n) + 1):
            acc.add_term(fine_block_ratio(fine, coarse, b), q)
        return acc

    step, _ = period
    head_blocks = len(ends)  # blocks before the trailing uniform group
    w2fam = coarse.weights.template  # single coarse block: uniform family
    reach = _explicit_value_reach(w2fam)
    scale = fine.weights.scale
    explicit = max(
        head_blocks,
        len(fine.weights.head),
        _scale_explicit_reach(scale, len(fine.weights.head)),
    )
    g0 = _fine_prefix_extent(fs, explicit)
    while g0 < reach:
        explicit += 1
        g0 += step

    for b in range(1, explicit + 1):
        acc.add_term(fine_block_ratio(fine, coarse, b), q)

    lam = _self_similar_factor(w2fam, step)
    i0 = explicit + 1
    if lam is None:
        return _power_tail_sum(acc, fine, coarse, q, i0, g0, step)
    t0 = i0 - len(fine.weights.head)
    _, rho = _scale_tail_form(scale, max(1, t0))
    first = fine_block_ratio(fine, coarse, i0)
    _check_ratio(first)
    mu = lam / rho
    if mu > 1:
        raise RatioAssumptionViolated(
            f"W_N grows geometrically (factor {mu}) along the trailing blocks"
        )
    if mu == 1:
        if first.value > 0:
            acc.diverge()
        return acc
    a = first.exact if first.exact is not None else first.value
    value, exact = _geometric_power_series(a, mu, q)
    acc.add_raw(value, exact)
    return acc


def _scale_explicit_reach(scale, offset) -> int:
    if scale is None or scale.kind != EXPLICIT:
        return 0
    return offset + len(scale.values)


def _fine_prefix_extent(fs, explicit) -> int:
    total = 0
    for b in range(1, explicit + 1):
        total += int(fs.block_size(b))
    return total


def _power_tail_sum(acc, fine, coarse, q, i0, g0, step):
    """Trailing blocks against power coarse weights.

    W_i = sup_k w2(g0 + (i-i0)*step + k) / (scale * f1(k)).  With a
    constant fine template the coarse weight is largest at k = 1, so
    W_i ~ t^beta * (g0 + (t-1)*step + 1)^(-alpha) up to constants, where
    t^beta comes from a power block scale (t^-beta under the ratio).
    """
    w2 = coarse.weights.template
    if w2.kind != POWER:
        raise UnsupportedFamily(f"no closed tail for {w2.kind} coarse weights")
    f1 = fine.weights.template
    if f1.kind != CONSTANT:
        raise UnsupportedFamily("power tails need constant fine templates")
    scale = fine.weights.scale
    beta = Fraction(0)
    if scale is not None:
        if scale.kind == CONSTANT:
            beta = Fraction(0)
        elif scale.kind == POWER:
            beta = scale.alpha
        else:
            raise UnsupportedFamily("power tails take constant or power scales")
    alpha = w2.alpha
    if beta > alpha:
        raise RatioAssumptionViolated(
            "W_N grows like a positive power along the trailing blocks"
        )
    head_n = len(fine.weights.head)

    def W_at(i: int) -> float:
        t = i - head_n
        pos = g0 + (i - i0) * step + 1
        s = fine.weights.scale_at(t) if scale is not None else Fraction(1)
        return float(w2.weight_at(pos)) / (float(f1.c) * float(s))

    # unimodal in i (strictly monotone when beta == alpha): scan past the
    # peak checking the domination, then bound by the limit
    prev = W_at(i0)
    if prev > 1 + 1e-12:
        raise RatioAssumptionViolated(f"W_N reaches {prev} at block {i0}")
    if beta == alpha:
        limit = (
            float(w2.c)
            / (float(f1.c) * float(scale.c if scale is not None else 1))
            * float(step) ** (-float(alpha))
        )
        if limit > 1 + 1e-12:
            raise RatioAssumptionViolated(
                f"W_N approaches {limit} along the trailing blocks"
            )
    else:
        i = i0
        while i < i0 + 100_000:
            nxt = W_at(i + 1)
            if nxt > 1 + 1e-12:
                raise RatioAssumptionViolated(f"W_N reaches {nxt} at block {i + 1}")
            if nxt <= prev:
                break
            prev, i = nxt, i + 1

    decay = float((alpha - beta) * q)
    if decay <= 1:
        acc.diverge()
        return acc
    if beta == 0:
        mult = (
            float(w2.c)
            / (float(f1.c) * float(scale.c if scale is not None else 1))
        ) ** float(q)
        a0 = (g0 + 1) / step
        acc.add_raw(mult * step ** (-float(alpha * q)) * float(_hurwitz_zeta(float(alpha * q), a0)), None)
        return acc
    # no elementary closed form: sum numerically with an integral tail bound
    total = 0.0
    i = i0
    while True:
        term = W_at(i) ** float(q)
        total += term
        i += 1
        if i - i0 > 200_000 or (term > 0 and term * (i - i0) / (decay - 1) < 1e-15 * max(total, 1e-300)):
            tail_bound = term * (i - i0) / (decay - 1)
            total += tail_bound
            break
    acc.add_raw(total, None)
    return acc


# -- case: subdivision fine over its parent -----------------------------------

def _chunked_block_sum(w2fam: WeightFamily, f1: WeightFamily, s: int, size, q,
                       check: bool = True):
    """(sum over chunks of W^q, max W) for one coarse block of given size,
    cut into chunks of s against uniform fine weights f1.

    With check=False the domination test is the caller's job (used when
    w2fam is an unscaled template whose per-block scale is applied
    outside)."""
    if not is_infinite(size):
        acc = _Acc()
        peak = None
        n_chunks = -(-int(size) // s)
        for j in range(1, n_chunks + 1):
            best = None
            for k in range(1, min(s, int(size) - (j - 1) * s) + 1):
                v2 = w2fam.weight_at((j - 1) * s + k)
                v1 = f1.weight_at(k)
                if isinstance(v1, Fraction) and isinstance(v2, Fraction):
                    cand = RatioSup(float(v2 / v1), v2 / v1, True, k)
                else:
                    cand = RatioSup(float(v2) / float(v1), None, True, k)
                if best is None or cand.value > best.value:
                    best = cand
            if check:
                _check_ratio(best)
            acc.add_term(best, q)
            if peak is None or best.value > peak.value:
                peak = best
        return acc, peak

    reach = _explicit_value_reach(w2fam)
    j0 = -(-reach // s) + 1  # first chunk living entirely past the reach
    acc = _Acc()
    peak = None
    for j in range(1, j0 + 1):
        best = None
        for k in range(1, s + 1):
            v2 = w2fam.weight_at((j - 1) * s + k)
            v1 = f1.weight_at(k)
            if isinstance(v1, Fraction) and isinstance(v2, Fraction):
                cand = RatioSup(float(v2 / v1), v2 / v1, True, k)
            else:
                cand = RatioSup(float(v2) / float(v1), None, True, k)
            if best is None or cand.value > best.value:
                best = cand
        if check:
            _check_ratio(best)
        if j < j0:
            acc.add_term(best, q)
        if peak is None or best.value > peak.value:
            peak = best
        last = best

    lam = _self_similar_factor(w2fam, s)
    if lam is not None:
        if lam == 1:
            if last.value > 0:
                acc.diverge()
            return acc, peak
        a = last.exact if last.exact is not None else last.value
        value, exact = _geometric_power_series(a, lam, q)
        acc.add_raw(value, exact)
        return acc, peak
    if w2fam.kind == POWER and f1.kind == CONSTANT:
        beta = float(w2fam.alpha * q)
        if beta <= 1:
            acc.diverge()
            return acc, peak
        mult = (float(w2fam.c) / float(f1.c)) ** float(q)
        a0 = ((j0 - 1) * s + 1) / s
        acc.add_raw(mult * s ** (-beta) * float(_hurwitz_zeta(beta, a0)), None)
        return acc, peak
    raise UnsupportedFamily(
        f"no closed chunk series for {w2fam.kind} coarse weights"
    )


def _sup_subdivision(fine, coarse, q):
    fs, cs = fine.scheme, coarse.scheme
    s = fs.chunk
    f1 = fine.weights.template  # subdivision pairs are uniform
    n = cs.block_count()
    head = len(coarse.weights.head)
    explicit = _explicit_block_reach(
        cs, max(head, _scale_explicit_reach(coarse.weights.scale, head))
    )
    sups = []
    exacts = []
    count = explicit if is_infinite(n) else min(int(n), explicit)
    for b in range(1, count + 1):
        fam = coarse.weights.family_for_block(b)
        acc, _ = _chunked_block_sum(fam, f1, s, cs.block_size(b), q)
        if not acc.finite:
            return math.inf, None, "a coarse block accumulates infinitely many W_N"
        sups.append(acc.value)
        exacts.append(acc.exact)
    detail = "subdivision: per-parent chunk sums"
    if is_infinite(n) or int(n) > count:
        sizes = _tail_block_sizes(cs, count)
        t0 = count + 1 - head
        peak_scale, rho = _scale_tail_form(coarse.weights.scale, max(1, t0))
        if rho > 1:
            raise UnsupportedFamily("growing block scales")
        for size in sizes:
            acc, peak = _chunked_block_sum(
                coarse.weights.template, f1, s, size, q, check=False
            )
            if not acc.finite:
                return math.inf, None, "a coarse block accumulates infinitely many W_N"
            scaled_peak = RatioSup(
                peak.value * float(peak_scale),
                None if peak.exact is None else peak.exact * peak_scale,
                peak.attained,
                peak.at_index,
            )
            _check_ratio(scaled_peak)
            factor = pow_value(peak_scale, q)
            sups.append(acc.value * factor)
            eq = rational_pow(peak_scale, q)
            exacts.append(None if acc.exact is None or eq is None else acc.exact * eq)
    best = max(range(len(sups)), key=lambda i: sups[i])
    return sups[best], exacts[best], detail


# -- case: finite extent --------------------------------------------------------

def _sup_finite(fine, coarse, q):
    cs = coarse.scheme
    groups: dict[int, _Acc] = {}
    cont = refines(fine.scheme, cs).containment
    n = int(fine.scheme.block_count())
    for b in range(1, n + 1):
        r = fine_block_ratio(fine, coarse, b)
        M = cont(b)
        groups.setdefault(M, _Acc()).add_term(r, q)
    best_val, best_exact = 0.0, Fraction(0)
    for acc in groups.values():
        if acc.value > best_val:
            best_val, best_exact = acc.value, acc.exact
    return best_val, best_exact, "finite layout: enumerated every block"


# -- case: consecutive in consecutive -------------------------------------------

def _sup_consecutive(fine, coarse, q, bf, bc):
    """Eventually periodic grouping: finitely many leading coarse blocks are
    enumerated, then every later coarse block repeats one scaled pattern."""
    if not fine.weights.is_uniform:
        raise UnsupportedFamily("consecutive refinement sums need uniform fine weights")
    fs, cs = fine.scheme, coarse.scheme
    ends_f, per_f = bf
    ends_c, per_c = bc
    if per_c is None or per_f is None:
        return _sup_finite(fine, coarse, q)
    head = len(coarse.weights.head)
    explicit_c = _explicit_block_reach(
        cs, max(head, _scale_explicit_reach(coarse.weights.scale, head))
    )
    # push the explicit region past both boundary prefixes and the value reach
    reach = _explicit_value_reach(coarse.weights.template)
    step_c, _ = per_c
    while _coarse_prefix_extent(cs, explicit_c) < max(
        ends_f[-1] if ends_f else 0,
        ends_c[-1] if ends_c else 0,
        reach,
        _fine_explicit_extent(fs),
    ):
        explicit_c += 1
    cont = refines(fs, cs).containment
    sups: list[float] = []
    exacts: list[Fraction | None] = []
    accs: dict[int, _Acc] = {}
    b = 1
    while True:
        M = cont(b)
        if M > explicit_c:
            break
        accs.setdefault(M, _Acc()).add_term(fine_block_ratio(fine, coarse, b), q)
        b += 1
    for M in sorted(accs):
        if not accs[M].finite:
            return math.inf, None, "divergent leading coarse block"
        sups.append(accs[M].value)
        exacts.append(accs[M].exact)
    # periodic zone: coarse blocks of size step_c cut into fine blocks of
    # size step_f; the within-block ratio pattern repeats, scaled per block
    step_f, _ = per_f
    f1 = fine.weights.template
    fam = coarse.weights.template
    t0 = explicit_c + 1 - head
    peak_scale, rho = _scale_tail_form(coarse.weights.scale, max(1, t0))
    if rho > 1:
        raise UnsupportedFamily("growing block scales")
    acc, peak = _chunked_block_sum(fam, f1, step_f, step_c, q, check=False)
    if not acc.finite:
        return math.inf, None, "divergent periodic coarse block"
    scaled_peak = RatioSup(
        peak.value * float(peak_scale),
        None if peak.exact is None else peak.exact * peak_scale,
        peak.attained,
        peak.at_index,
    )
    _check_ratio(scaled_peak)
    factor = pow_value(peak_scale, q)
    sups.append(acc.value * factor)
    eq = rational_pow(peak_scale, q)
    exacts.append(None if acc.exact is None or eq is None else acc.exact * eq)
    best = max(range(len(sups)), key=lambda i: sups[i])
    return sups[best], exacts[best], "eventually periodic consecutive grouping"


def _coarse_prefix_extent(cs, explicit) -> int:
    total = 0
    for b in range(1, explicit + 1):
        size = cs.block_size(b)
        if is_infinite(size):
            raise UnsupportedFamily("infinite block inside a consecutive layout")
        total += int(size)
    return total


def _fine_explicit_extent(fs) -> int:
    b = fs.consecutive_boundaries()
    ends, _ = b
    return ends[-1] if ends else 0


# -- case: striped in striped -----------------------------------------------------

def _sup_striped(fine, coarse, q):
    fs, cs = fine.scheme, coarse.scheme
    mf, mc = fs.infinite_block_count(), cs.infinite_block_count()
    d = mf // mc
    cont = refines(fs, cs).containment
    accs: dict[int, _Acc] = {}
    n = int(fs.block_count())
    for b in range(1, n + 1):
        accs.setdefault(cont(b), _Acc()).add_term(_striped_block_ratio(fine, coarse, b), q)
    best_val, best_exact = 0.0, Fraction(0)
    for acc in accs.values():
        if not acc.finite:
            return math.inf, None, "divergent stripe sum"
        if acc.value > best_val:
            best_val, best_exact = acc.value, acc.exact
    return best_val, best_exact, f"{mf} stripes grouped {d} per coarse stripe"


def _striped_block_ratio(fine, coarse, block) -> RatioSup:
    size = fine.scheme.block_size(block)
    if not is_infinite(size):
        return fine_block_ratio(fine, coarse, block)
    w1 = fine.weights.family_for_block(block)
    if w1.kind != CONSTANT:
        raise UnsupportedFamily("striped ratios need constant fine weights")
    g1 = fine.scheme.position(block, 1)
    B, K = coarse.scheme.locate(g1)
    fam2 = coarse.weights.family_for_block(B)
    if not fam2.is_monotone_nonincreasing:
        raise UnsupportedFamily("striped ratios need monotone coarse weights")
    # fine stripe offsets advance arithmetically inside the coarse stripe,
    # so the monotone coarse weight peaks at the first element
    v2 = fam2.weight_at(K)
    if isinstance(v2, Fraction):
        return _check_ratio(RatioSup(float(v2 / w1.c), v2 / w1.c, True, 1))
    return _check_ratio(RatioSup(float(v2) / float(w1.c), None, True, 1))
