"""Symbolic weight families over a 1-based integer domain.

A weight family assigns a value in (0, 1] to every index j >= 1 of a block
(or of the whole index set).  Supported shapes:

    constant    w_j = c
    geometric   w_j = c * r**j                (0 < r < 1)
    power       w_j = c * j**(-alpha)         (alpha > 0)
    explicit    finite list of values, then a tail family (re-indexed)
    interleaved two sub-families alternating by parity of j

Parameters are exact rationals.  Every branch-deciding query (infimum,
supremum, convergence of power sums) is answered by closed form, never by
numeric truncation; numeric values are reported alongside where available.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from scipy.special import zeta as _hurwitz_zeta

from .errors import RatioAssumptionViolated, SpecValidationError, UnsupportedFamily
from .rationals import INFINITE, parse_rational, pow_value, rational_pow

CONSTANT = "constant"
GEOMETRIC = "geometric"
POWER = "power"
EXPLICIT = "explicit"
INTERLEAVED = "interleaved"

_KINDS = (CONSTANT, GEOMETRIC, POWER, EXPLICIT, INTERLEAVED)


# ---------------------------------------------------------------------------
# Query result containers
# ---------------------------------------------------------------------------

# Sum-kind tags for power sums.
FINITE_SUPPORT = "finite-support"          # only finitely many terms
FINITE_VALUE_UNKNOWN = "finite-value-unknown"  # converges on infinite support
DIVERGENT = "divergent"


@dataclass(frozen=True)
class SumResult:
    """Outcome of a power-sum query sum_j w_j**q (possibly restricted)."""

    converges: bool
    tag: str
    value: float                  # math.inf when divergent
    exact: Fraction | None = None  # exact value when a rational closed form exists

    def __add__(self, other: "SumResult") -> "SumResult":
        if not self.converges or not other.converges:
            return SumResult(False, DIVERGENT, math.inf)
        if self.tag == FINITE_SUPPORT and other.tag == FINITE_SUPPORT:
            tag = FINITE_SUPPORT
        else:
            tag = FINITE_VALUE_UNKNOWN
        exact = None
        if self.exact is not None and other.exact is not None:
            exact = self.exact + other.exact
        return SumResult(True, tag, self.value + other.value, exact)


_DIVERGENT_SUM = SumResult(False, DIVERGENT, math.inf)
_EMPTY_SUM = SumResult(True, FINITE_SUPPORT, 0.0, Fraction(0))


@dataclass(frozen=True)
class BoundResult:
    """An infimum or supremum together with attainment information."""

    value: Fraction | float
    attained: bool
    at_index: int | None = None

    def __float__(self) -> float:
        return float(self.value)


@dataclass(frozen=True)
class RatioSup:
    """sup_j w2_j / w1_j over a block, with attainment information."""

    value: float
    exact: Fraction | None
    attained: bool
    at_index: int | None = None


# ---------------------------------------------------------------------------
# The family itself
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class WeightFamily:
    kind: str
    c: Fraction | None = None
    r: Fraction | None = None
    alpha: Fraction | None = None
    values: tuple[Fraction, ...] = ()
    tail: "WeightFamily | None" = None
    odd: "WeightFamily | None" = None
    even: "WeightFamily | None" = None

    # -- constructors -------------------------------------------------------

    @staticmethod
    def constant(c) -> "WeightFamily":
        c = parse_rational(c)
        if not 0 < c <= 1:
            raise SpecValidationError(f"constant weight must be in (0,1], got {c}")
        return WeightFamily(CONSTANT, c=c)

    @staticmethod
    def geometric(c, r) -> "WeightFamily":
        c, r = parse_rational(c), parse_rational(r)
        if not 0 < r < 1:
            raise SpecValidationError(f"geometric ratio must be in (0,1), got {r}")
        if c <= 0 or c * r > 1:
            raise SpecValidationError(
                f"geometric scale must keep values in (0,1]; c={c}, c*r={c * r}"
            )
        return WeightFamily(GEOMETRIC, c=c, r=r)

    @staticmethod
    def power(c, alpha) -> "WeightFamily":
        c, alpha = parse_rational(c), parse_rational(alpha)
        if alpha <= 0:
            raise SpecValidationError(f"power exponent must be positive, got {alpha}")
        if not 0 < c <= 1:
            raise SpecValidationError(f"power scale must be in (0,1], got {c}")
        return WeightFamily(POWER, c=c, alpha=alpha)

    @staticmethod
    def explicit_then_tail(values, tail: "WeightFamily") -> "WeightFamily":
        vals = tuple(parse_rational(v) for v in values)
        if not vals:
            raise SpecValidationError("explicit weight list must be nonempty")
        for v in vals:
            if not 0 < v <= 1:
                raise SpecValidationError(f"explicit weight {v} outside (0,1]")
        if tail.kind == EXPLICIT:
            raise SpecValidationError("explicit tail must not itself be explicit")
        return WeightFamily(EXPLICIT, values=vals, tail=tail)

    @staticmethod
    def interleaved(odd: "WeightFamily", even: "WeightFamily") -> "WeightFamily":
        return WeightFamily(INTERLEAVED, odd=odd, even=even)

    # -- pointwise evaluation ------------------------------------------------

    def weight_at(self, j: int) -> Fraction | float:
        """Exact closed-form value at index j (Fraction whenever rational)."""
        if j < 1 or j != int(j):
            raise SpecValidationError(f"weight index must be a positive integer, got {j}")
        j = int(j)
        if self.kind == CONSTANT:
            return self.c
        if self.kind == GEOMETRIC:
            return self.c * self.r**j
        if self.kind == POWER:
            exact = rational_pow(Fraction(j), -self.alpha)
            if exact is not None:
                return self.c * exact
            return float(self.c) * j ** (-float(self.alpha))
        if self.kind == EXPLICIT:
            m = len(self.values)
            return self.values[j - 1] if j <= m else self.tail.weight_at(j - m)
        if self.kind == INTERLEAVED:
            if j % 2 == 1:
                return self.odd.weight_at((j + 1) // 2)
            return self.even.weight_at(j // 2)
        raise UnsupportedFamily(self.kind)

    def weight_sq_at(self, j: int) -> Fraction | None:
        """Exact squared weight at j, or None when it is irrational."""
        w = self.weight_at(j)
        return w * w if isinstance(w, Fraction) else None

    # -- extremal values ------------------------------------------------------

    def infimum(self, size: int | None = None) -> BoundResult:
        """Exact infimum over {1..size} (or the infinite domain when None)."""
        if size is not None and size < 1:
            raise SpecValidationError("domain size must be >= 1")
        if self.kind == CONSTANT:
            return BoundResult(self.c, True, 1)
        if self.kind == GEOMETRIC:
            if size is None:
                return BoundResult(Fraction(0), False)
            return BoundResult(self.c * self.r**size, True, size)
        if self.kind == POWER:
            if size is None:
                return BoundResult(Fraction(0), False)
            return BoundResult(self.weight_at(size), True, size)
        if self.kind == EXPLICIT:
            m = len(self.values)
            if size is not None and size <= m:
                vals = self.values[:size]
                v = min(vals)
                return BoundResult(v, True, vals.index(v) + 1)
            head = min(self.values)
            head_at = self.values.index(head) + 1
            t = self.tail.infimum(None if size is None else size - m)
            if t.value < head:
                at = None if t.at_index is None else t.at_index + m
                return BoundResult(t.value, t.attained, at)
            return BoundResult(head, True, head_at)
        if self.kind == INTERLEAVED:
            n_odd = None if size is None else (size + 1) // 2
            n_even = None if size is None else size // 2
            lo = self.odd.infimum(n_odd)
            if n_even == 0:
                return BoundResult(lo.value, lo.attained,
                                   None if lo.at_index is None else 2 * lo.at_index - 1)
            le = self.even.infimum(n_even)
            if le.value < lo.value:
                return BoundResult(le.value, le.attained,
                                   None if le.at_index is None else 2 * le.at_index)
            return BoundResult(lo.value, lo.attained,
                               None if lo.at_index is None else 2 * lo.at_index - 1)
        raise UnsupportedFamily(self.kind)

    def supremum(self, size: int | None = None) -> BoundResult:
        """Exact supremum; always attained for the supported shapes."""
        if self.kind == CONSTANT:
            return BoundResult(self.c, True, 1)
        if self.kind == GEOMETRIC:
            return BoundResult(self.c * self.r, True, 1)
        if self.kind == POWER:
            return BoundResult(self.c, True, 1)
        if self.kind == EXPLICIT:
            m = len(self.values)
            if size is not None and size <= m:
                vals = self.values[:size]
                v = max(vals)
                return BoundResult(v, True, vals.index(v) + 1)
            head = max(self.values)
            head_at = self.values.index(head) + 1
            t = self.tail.supremum(None if size is None else size - m)
            if t.value > head:
                return BoundResult(t.value, t.attained,
                                   None if t.at_index is None else t.at_index + m)
            return BoundResult(head, True, head_at)
        if self.kind == INTERLEAVED:
            n_odd = None if size is None else (size + 1) // 2
            n_even = None if size is None else size // 2
            so = self.odd.supremum(n_odd)
            if n_even == 0:
                return BoundResult(so.value, so.attained,
                                   None if so.at_index is None else 2 * so.at_index - 1)
            se = self.even.supremum(n_even)
            if se.value > so.value:
                return BoundResult(se.value, se.attained,
                                   None if se.at_index is None else 2 * se.at_index)
            return BoundResult(so.value, so.attained,
                               None if so.at_index is None else 2 * so.at_index - 1)
        raise UnsupportedFamily(self.kind)

    @property
    def is_monotone_nonincreasing(self) -> bool:
        if self.kind in (CONSTANT, GEOMETRIC, POWER):
            return True
        if self.kind == EXPLICIT:
            vals = self.values
            if any(vals[i] < vals[i + 1] for i in range(len(vals) - 1)):
                return False
            t = self.tail
            return t.is_monotone_nonincreasing and t.supremum().value <= vals[-1]
        return False

    # -- power sums -----------------------------------------------------------

    def _first_index_below(self, eps: Fraction) -> int | None:
        """Smallest j with w_j < eps for a monotone family; None if never.

        The families here are nonincreasing, so the sub-threshold set is a
        tail {j >= j0}.
        """
        if self.kind == CONSTANT:
            return None if self.c >= eps else 1
        if self.kind == GEOMETRIC:
            if self.c * self.r < eps:
                return 1
            # c * r**j < eps  <=>  j > log(eps/c)/log(r)
            est = math.log(float(eps) / float(self.c)) / math.log(float(self.r))
            j = max(1, int(est) - 2)
            while self.c * self.r**j >= eps:
                j += 1
            return j
        if self.kind == POWER:
            if self.c < eps:
                return 1
            # c * j**(-alpha) < eps  <=>  j**alpha > c/eps
            target = self.c / eps
            est = float(target) ** (1.0 / float(self.alpha))
            j = max(1, int(est) - 2)
            a, b = self.alpha.numerator, self.alpha.denominator
            while Fraction(j) ** a <= target**b:
                j += 1
            return j
        raise UnsupportedFamily(f"threshold split on {self.kind}")

    def qsum(
        self,
        q: Fraction,
        size: int | None = None,
        below: Fraction | None = None,
    ) -> SumResult:
        """sum of w_j**q over the domain, restricted to {j : w_j < below}.

        Convergence is decided exactly: geometric sums always converge,
        sum j**(-alpha*q) converges iff alpha*q > 1, and a positive constant
        on an infinite set diverges.  below=None means no restriction.
        """
        q = parse_rational(q)
        if q <= 0:
            raise SpecValidationError(f"power-sum exponent must be positive, got {q}")
        if below is not None:
            below = parse_rational(below)
            if not 0 < below <= 1:
                raise SpecValidationError(f"threshold must be in (0,1], got {below}")

        if size is not None:
            return self._finite_qsum(q, size, below)

        if self.kind == CONSTANT:
            if below is not None and self.c >= below:
                return _EMPTY_SUM
            return _DIVERGENT_SUM
        if self.kind == GEOMETRIC:
            j0 = 1 if below is None else self._first_index_below(below)
            cq = rational_pow(self.c, q)
            rq = rational_pow(self.r, q)
            value = pow_value(self.c, q) * pow_value(self.r, q) ** j0 / (
                1.0 - pow_value(self.r, q)
            )
            exact = None
            if cq is not None and rq is not None:
                exact = cq * rq**j0 / (1 - rq)
                value = float(exact)
            return SumResult(True, FINITE_VALUE_UNKNOWN, value, exact)
        if self.kind == POWER:
            if self.alpha * q <= 1:
                return _DIVERGENT_SUM
            j0 = 1 if below is None else self._first_index_below(below)
            s = float(self.alpha * q)
            value = pow_value(self.c, q) * float(_hurwitz_zeta(s, j0))
            return SumResult(True, FINITE_VALUE_UNKNOWN, value, None)
        if self.kind == EXPLICIT:
            head = _EMPTY_SUM
            for v in self.values:
                if below is None or v < below:
                    head = head + _term_power(v, q)
            return head + self.tail.qsum(q, None, below)
        if self.kind == INTERLEAVED:
            return self.odd.qsum(q, None, below) + self.even.qsum(q, None, below)
        raise UnsupportedFamily(self.kind)

    def _finite_qsum(self, q: Fraction, size: int, below: Fraction | None) -> SumResult:
        total = _EMPTY_SUM
        for j in range(1, size + 1):
            w = self.weight_at(j)
            if below is not None:
                wv = w if isinstance(w, Fraction) else Fraction(w)
                if not wv < below:
                    continue
            if isinstance(w, Fraction):
                total = total + _term_power(w, q)
            else:
                total = total + SumResult(True, FINITE_SUPPORT, w ** float(q), None)
        return total

    # -- structural transforms -------------------------------------------------

    def scaled(self, factor) -> "WeightFamily":
        """Family with every value multiplied by factor in (0,1]."""
        factor = parse_rational(factor)
        if not 0 < factor <= 1:
            raise SpecValidationError(f"scale factor must be in (0,1], got {factor}")
        if factor == 1:
            return self
        if self.kind == CONSTANT:
            return WeightFamily(CONSTANT, c=self.c * factor)
        if self.kind == GEOMETRIC:
            return WeightFamily(GEOMETRIC, c=self.c * factor, r=self.r)
        if self.kind == POWER:
            return WeightFamily(POWER, c=self.c * factor, alpha=self.alpha)
        if self.kind == EXPLICIT:
            return WeightFamily(
                EXPLICIT,
                values=tuple(v * factor for v in self.values),
                tail=self.tail.scaled(factor),
            )
        if self.kind == INTERLEAVED:
            return WeightFamily(
                INTERLEAVED, odd=self.odd.scaled(factor), even=self.even.scaled(factor)
            )
        raise UnsupportedFamily(self.kind)

    def parity_part(self, which: str) -> "WeightFamily":
        """Restriction to odd or even indices, re-indexed by 1,2,3,...

        Exact for constant, geometric, explicit and interleaved shapes.  For
        power families the result is a classification surrogate: it has the
        same infimum positivity and the same power-sum convergence behavior,
        but not the same pointwise values.  Use only for branch decisions.
        """
        if which not in ("odd", "even"):
            raise ValueError("which must be 'odd' or 'even'")
        if self.kind == CONSTANT:
            return self
        if self.kind == GEOMETRIC:
            # odd:  c*r**(2k-1) = (c/r)*(r^2)**k ; even: c*r**(2k) = c*(r^2)**k
            if which == "odd":
                return WeightFamily(GEOMETRIC, c=self.c / self.r, r=self.r**2)
            return WeightFamily(GEOMETRIC, c=self.c, r=self.r**2)
        if self.kind == POWER:
            return self  # surrogate: same convergence class, same zero limit
        if self.kind == EXPLICIT:
            m = len(self.values)
            picked = [self.values[j - 1] for j in range(1, m + 1)
                      if (j % 2 == 1) == (which == "odd")]
            # parity of tail-local indices depends on the prefix length
            if m % 2 == 0:
                tail_part = self.tail.parity_part(which)
            else:
                tail_part = self.tail.parity_part("even" if which == "odd" else "odd")
            if not picked:
                return tail_part
            return WeightFamily.explicit_then_tail(picked, tail_part) \
                if tail_part.kind != EXPLICIT else _merge_explicit(picked, tail_part)
        if self.kind == INTERLEAVED:
            return self.odd if which == "odd" else self.even
        raise UnsupportedFamily(self.kind)


def _merge_explicit(prefix, tail_explicit: WeightFamily) -> WeightFamily:
    return WeightFamily.explicit_then_tail(
        tuple(prefix) + tail_explicit.values, tail_explicit.tail
    )


def _term_power(v: Fraction, q: Fraction) -> SumResult:
    exact = rational_pow(v, q)
    if exact is not None:
        return SumResult(True, FINITE_SUPPORT, float(exact), exact)
    return SumResult(True, FINITE_SUPPORT, pow_value(v, q), None)


# ---------------------------------------------------------------------------
# Spec-level operations (module functions mirroring the library surface)
# ---------------------------------------------------------------------------

def weight_at(family: WeightFamily, j: int) -> Fraction | float:
    return family.weight_at(j)


def weight_infimum(family: WeightFamily, size: int | None = None) -> BoundResult:
    return family.infimum(size)


def tail_power_sum_converges(
    family: WeightFamily, q, threshold=1
) -> tuple[bool, str]:
    """Does sum over {j : w_j < threshold} of w_j**q converge?

    Returns (converges, tag) with tag in {finite-support,
    finite-value-unknown, divergent}.  The family is taken on an infinite
    domain.
    """
    res = family.qsum(parse_rational(q), size=None, below=parse_rational(threshold))
    return res.converges, res.tag


# ---------------------------------------------------------------------------
# Pointwise-ratio analysis between two families on a common block
# ---------------------------------------------------------------------------

def ratio_supremum(w1: WeightFamily, w2: WeightFamily, size: int | None = None) -> RatioSup:
    """sup over the block of w2_j / w1_j, requiring w1 >= w2 pointwise.

    Decided by closed form per shape combination; raises
    RatioAssumptionViolated when the domination fails anywhere (including
    in the limit on infinite blocks).
    """
    sup = _ratio_sup(w1, w2, 1, size)
    too_big = sup.exact > 1 if sup.exact is not None else sup.value > 1 + 1e-12
    if too_big:
        raise RatioAssumptionViolated(
            f"w2/w1 reaches {sup.value} (index {sup.at_index}); need w1 >= w2"
        )
    return sup


def _exact_ratio(a, b) -> tuple[float, Fraction | None]:
    if isinstance(a, Fraction) and isinstance(b, Fraction):
        e = a / b
        return float(e), e
    return float(a) / float(b), None


def _at(w1: WeightFamily, w2: WeightFamily, j: int) -> RatioSup:
    v, e = _exact_ratio(w2.weight_at(j), w1.weight_at(j))
    return RatioSup(v, e, True, j)


def _kinds_involved(w: WeightFamily) -> set[str]:
    out = {w.kind}
    for sub in (w.tail, w.odd, w.even):
        if sub is not None:
            out |= _kinds_involved(sub)
    return out


def _ratio_sup(w1: WeightFamily, w2: WeightFamily, start: int, size: int | None) -> RatioSup:
    """sup of w2(j)/w1(j) over j in {start, ..., start+size-1} (unbounded
    when size is None).  Families are always evaluated at the original
    index j, so explicit prefixes peel without re-indexing."""
    if w1 == w2:
        return RatioSup(1.0, Fraction(1), True, start)

    if w1.kind == INTERLEAVED or w2.kind == INTERLEAVED:
        if start != 1:
            raise UnsupportedFamily("interleaved ratio off the natural origin")
        return _ratio_sup_parity(w1, w2, size)

    # peel explicit prefixes pointwise, then compare the tails
    m = max(len(w1.values) if w1.kind == EXPLICIT else 0,
            len(w2.values) if w2.kind == EXPLICIT else 0)
    if m >= start:
        end = m if size is None else min(m, start + size - 1)
        best = None
        for j in range(start, end + 1):
            cand = _at(w1, w2, j)
            if best is None or cand.value > best.value:
                best = cand
        if size is not None and start + size - 1 <= m:
            return best
        rest_size = None if size is None else size - (end - start + 1)
        rest = _ratio_sup(_strip(w1, m), _strip(w2, m), m + 1, rest_size)
        return rest if rest.value > best.value else best

    k1, k2 = w1.kind, w2.kind
    last = None if size is None else start + size - 1

    if k1 == CONSTANT and k2 == CONSTANT:
        v, e = _exact_ratio(_value_at(w2, start), _value_at(w1, start))
        return RatioSup(v, e, True, start)
    if k1 == CONSTANT:
        # nonincreasing w2 over a constant: sup at the first index
        return _at(w1, w2, start)
    if k2 == CONSTANT:
        # constant over a nonincreasing w1: ratio nondecreasing
        if last is None:
            limit = _limit_value(w1)
            if limit == 0:
                return RatioSup(math.inf, None, False, None)
            v, e = _exact_ratio(_value_at(w2, start), limit)
            return RatioSup(v, e, False, None)
        return _at(w1, w2, last)
    if k1 == GEOMETRIC and k2 == GEOMETRIC:
        if w2.r == w1.r:
            return _at(w1, w2, start)
        if w2.r < w1.r:
            return _at(w1, w2, start)
        if last is None:
            return RatioSup(math.inf, None, False, None)
        return _at(w1, w2, last)
    if k1 == POWER and k2 == POWER:
        # ratio = (c2/c1) * j**(alpha1 - alpha2), monotone in j
        if w2.alpha >= w1.alpha:
            return _at(w1, w2, start)
        if last is None:
            return RatioSup(math.inf, None, False, None)
        return _at(w1, w2, last)
    if k1 == POWER and k2 == GEOMETRIC:
        # ratio = (c2/c1) * r**j * j**alpha1 -> 0; unimodal in j
        j = start
        a, b = w1.alpha.numerator, w1.alpha.denominator
        rb = w2.r**b
        while (last is None or j < last) and rb * Fraction(j + 1) ** a >= Fraction(j) ** a:
            j += 1
        return _at(w1, w2, j)
    if k1 == GEOMETRIC and k2 == POWER:
        # ratio = (c2/c1) * j**(-alpha2) / r**j -> infinity
        if last is None:
            return RatioSup(math.inf, None, False, None)
        return _at(w1, w2, last)
    raise UnsupportedFamily(f"ratio of {k2} over {k1}")


def _strip(w: WeightFamily, m: int) -> WeightFamily:
    """View of w for indices j > m with any explicit prefix resolved away.

    The result is still evaluated at the ORIGINAL index j.  Constant and
    geometric tails re-shift exactly (c*r**(j-k) = (c*r**-k) * r**j, built
    directly to bypass the scale check since values at j > m stay in (0,1]);
    power tails do not stay in the model and are rejected.
    """
    if w.kind != EXPLICIT:
        return w
    k = len(w.values)
    if k > m:
        raise UnsupportedFamily("explicit prefixes of unequal reach")
    tail = w.tail
    if tail.kind == CONSTANT or k == 0:
        return tail
    if tail.kind == GEOMETRIC:
        return WeightFamily(GEOMETRIC, c=tail.c / tail.r**k, r=tail.r)
    raise UnsupportedFamily(f"ratio across an explicit prefix with {tail.kind} tail")


def _value_at(w: WeightFamily, j: int):
    return w.weight_at(j)


def _limit_value(w: WeightFamily) -> Fraction:
    inf = w.infimum(None)
    return inf.value if isinstance(inf.value, Fraction) else Fraction(0)


def _ratio_sup_parity(w1: WeightFamily, w2: WeightFamily, size: int | None) -> RatioSup:
    for w in (w1, w2):
        if POWER in _kinds_involved(w):
            raise UnsupportedFamily(
                "interleaved ratios require parity-exact parts (no power shapes)"
            )
    n_odd = None if size is None else (size + 1) // 2
    n_even = None if size is None else size // 2
    so = _ratio_sup(w1.parity_part("odd"), w2.parity_part("odd"), 1, n_odd)
    so = RatioSup(so.value, so.exact, so.attained,
                  None if so.at_index is None else 2 * so.at_index - 1)
    if n_even == 0:
        return so
    se = _ratio_sup(w1.parity_part("even"), w2.parity_part("even"), 1, n_even)
    se = RatioSup(se.value, se.exact, se.attained,
                  None if se.at_index is None else 2 * se.at_index)
    return se if se.value > so.value else so
