"""Seeded numerical certification of the norm inequalities.

Every check draws a reproducible stream of vectors (plus all basis
vectors), evaluates both sides of one inequality, and reports the worst
slack and any violations beyond tolerance.  Reports never assert
isomorphism: they certify exactly the inequality and boundedness
consequences that the classification rules rest on.

"Dimension n" means the first n indices of the reference layout; for
consecutive layouts the support is rounded down to the last complete
block so per-block l2 sums are never cut mid-block.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import DimensionTooLarge, HypothesisNotMet, SpecValidationError
from .norms import holder_majorant, pair_norm, refinement_majorant
from .partitions import PartitionScheme
from .rationals import is_infinite
from .spaces import PartitionWeightPair, SparseVector, SpaceSpec
from .weights import WeightFamily

CHECK_KINDS = (
    "holder",
    "refinement_chain",
    "sandwich_32_1",
    "sandwich_42_1a",
    "lower_lp",
    "l2_domination",
)

DEFAULT_TOL = 1e-12
ORACLE_TOL = 1e-6


# ---------------------------------------------------------------------------
# Sampling
# ---------------------------------------------------------------------------

def _sample_matrix(dim: int, count: int, rng, distribution: str) -> np.ndarray:
    if distribution == "gaussian":
        return rng.standard_normal((count, dim))
    if distribution == "signs":
        return rng.integers(0, 2, size=(count, dim)) * 2.0 - 1.0
    if distribution == "sparse":
        X = np.zeros((count, dim))
        for i in range(count):
            support = int(rng.integers(1, dim + 1))
            positions = rng.choice(dim, size=support, replace=False)
            X[i, positions] = rng.standard_normal(support)
        return X
    raise SpecValidationError(f"unknown distribution {distribution!r}")


def sample_vectors(dim: int, count: int, seed: int, distribution: str = "gaussian"):
    """Deterministic vector stream addressed by global index (the discrete
    scheme): identical across runs for identical (dim, count, seed)."""
    if dim < 1 or count < 1:
        raise SpecValidationError("dim and count must be positive")
    rng = np.random.default_rng(seed)
    X = _sample_matrix(dim, count, rng, distribution)
    scheme = PartitionScheme.discrete()
    out = []
    for row in X:
        out.append(
            SparseVector.from_global(
                scheme, {g + 1: float(v) for g, v in enumerate(row) if v != 0.0}
            )
        )
    return out


def effective_dim(spec: SpaceSpec, dim: int) -> int:
    """Round dim down to the reference pair's last complete block."""
    scheme = spec.reference_pair.scheme
    b = scheme.consecutive_boundaries()
    if b is None:
        return dim
    ends, period = b
    best = 0
    for e in ends:
        if e <= dim:
            best = max(best, e)
    if period is not None:
        step, start = period
        if start <= dim:
            best = max(best, start + (dim - start) // step * step)
    return best if best >= 1 else dim


# ---------------------------------------------------------------------------
# Batched evaluation plans
# ---------------------------------------------------------------------------

class _EvalPlan:
    """Per-(spec, dim) arrays mapping global indices to blocks and squared
    weights, for vectorized norm evaluation over dense sample batches."""

    def __init__(self, spec: SpaceSpec, dim: int):
        self.spec = spec
        self.dim = dim
        self.p = float(spec.p)
        self.pair_data = []
        for pair in spec.pairs:
            blocks = np.empty(dim, dtype=np.int64)
            wsq = np.empty(dim, dtype=float)
            for g in range(1, dim + 1):
                B, K = pair.scheme.locate(g)
                blocks[g - 1] = B
                wsq[g - 1] = float(pair.weights.weight_at(B, K)) ** 2
            order = np.argsort(blocks, kind="stable")
            sorted_blocks = blocks[order]
            starts = np.flatnonzero(
                np.r_[True, sorted_blocks[1:] != sorted_blocks[:-1]]
            )
            self.pair_data.append((order, starts, wsq))

    def pair_norms(self, X: np.ndarray, index: int) -> np.ndarray:
        order, starts, wsq = self.pair_data[index]
        Y = (X * X * wsq)[:, order]
        S = np.add.reduceat(Y, starts, axis=1)
        return np.power(S, self.p / 2.0).sum(axis=1) ** (1.0 / self.p)

    def space_norms(self, X: np.ndarray) -> np.ndarray:
        values = np.stack(
            [self.pair_norms(X, i) for i in range(len(self.spec.pairs))]
        )
        return values.max(axis=0)

    def lp_norms(self, X: np.ndarray) -> np.ndarray:
        return np.power(np.abs(X), self.p).sum(axis=1) ** (1.0 / self.p)

    @staticmethod
    def l2_norms(X: np.ndarray) -> np.ndarray:
        return np.sqrt((X * X).sum(axis=1))


# ---------------------------------------------------------------------------
# Reports
# ---------------------------------------------------------------------------

@dataclass
class VerificationReport:
    check: str
    spec_digest: str
    dims: tuple[int, ...]
    samples: int
    seed: int
    tol: float
    worst_slack: float
    violations: int
    witness_dim: int
    witness: dict[int, float]
    wall_time: float

    @property
    def passed(self) -> bool:
        return self.violations == 0

    def to_dict(self, include_timing: bool = False) -> dict:
        out = {
            "check": self.check,
            "spec_digest": self.spec_digest,
            "dims": list(self.dims),
            "samples": self.samples,
            "seed": self.seed,
            "tol": self.tol,
            "worst_slack": self.worst_slack,
            "violations": self.violations,
            "witness_dim": self.witness_dim,
            "witness": {str(k): v for k, v in sorted(self.witness.items())},
            "passed": self.passed,
        }
        if include_timing:
            out["wall_time"] = self.wall_time
        return out


@dataclass
class RatioScan:
    dims: tuple[int, ...]
    samples: int
    seed: int
    per_dim_min: dict[int, float]
    per_dim_max: dict[int, float]
    trend: float

    def to_dict(self) -> dict:
        return {
            "dims": list(self.dims),
            "samples": self.samples,
            "seed": self.seed,
            "min": {str(d): v for d, v in sorted(self.per_dim_min.items())},
            "max": {str(d): v for d, v in sorted(self.per_dim_max.items())},
            "trend": self.trend,
        }


# ---------------------------------------------------------------------------
# The inequality checks
# ---------------------------------------------------------------------------

def _digest(spec: SpaceSpec) -> str:
    from .specfile import spec_digest

    return spec_digest(spec)


def _find_indiscrete(spec: SpaceSpec) -> PartitionWeightPair | None:
    for _, pair in spec.non_trivial_pairs:
        if pair.scheme.is_indiscrete_like:
            return pair
    return None


def _find_refinement(spec: SpaceSpec):
    """(fine index, coarse index, majorant) with a finite constant."""
    nt = spec.non_trivial_pairs
    for i, fine in nt:
        for j, coarse in nt:
            if i == j:
                continue
            try:
                rm = refinement_majorant(fine, coarse, spec.p)
            except Exception:
                continue
            if rm.finite:
                return i, j, rm
    return None


def _find_bounded_finite_pair(spec: SpaceSpec):
    """A pair with finitely many blocks and weights bounded below."""
    for _, pair in spec.non_trivial_pairs:
        n = pair.scheme.block_count()
        if is_infinite(n):
            continue
        delta = pair.weight_infimum()
        if delta > 0:
            return pair, delta, int(n)
    return None


def _check_sides(kind: str, spec: SpaceSpec):
    """Per-check symbolic hypothesis gate plus a (lhs, rhs) evaluator
    factory: claims are always lhs <= rhs."""
    p = float(spec.p)
    if kind == "lower_lp":
        def sides(plan, X, dim):
            return plan.lp_norms(X), plan.space_norms(X)
        return sides
    if kind == "l2_domination":
        def sides(plan, X, dim):
            return plan.space_norms(X), plan.l2_norms(X)
        return sides
    if kind == "holder":
        ind = _find_indiscrete(spec)
        if ind is None:
            raise HypothesisNotMet("an indiscrete pair is present")
        w = ind.weights.template
        idx = spec.pairs.index(ind)

        def sides(plan, X, dim):
            constant = holder_majorant(w, spec.p, size=dim).constant
            return plan.pair_norms(X, idx), constant * plan.lp_norms(X)
        return sides
    if kind == "sandwich_32_1":
        ind = _find_indiscrete(spec)
        if ind is None:
            raise HypothesisNotMet("an indiscrete pair is present")
        delta = ind.weights.template.infimum(None).value
        if not delta > 0:
            raise HypothesisNotMet("indiscrete weights bounded below")
        delta = float(delta)

        def sides(plan, X, dim):
            # two-sided sandwich: slack is the lesser of the two one-sided
            # slacks, encoded against a zero left side
            space = plan.space_norms(X)
            l2 = plan.l2_norms(X)
            lhs = np.zeros_like(space)
            rhs = np.minimum(space - delta * l2, l2 - space)
            return lhs, rhs
        return sides
    if kind == "sandwich_42_1a":
        found = _find_bounded_finite_pair(spec)
        if found is None:
            raise HypothesisNotMet(
                "a pair with finitely many blocks and weights bounded below"
            )
        _, delta, m = found
        constant = float(delta) * m ** (1.0 / p - 0.5)

        def sides(plan, X, dim):
            space = plan.space_norms(X)
            l2 = plan.l2_norms(X)
            lhs = np.zeros_like(space)
            rhs = np.minimum(space - constant * l2, l2 - space)
            return lhs, rhs
        return sides
    if kind == "refinement_chain":
        found = _find_refinement(spec)
        if found is None:
            raise HypothesisNotMet("a refinement pair with a finite majorant")
        fi, ci, rm = found

        def sides(plan, X, dim):
            return plan.pair_norms(X, ci), rm.constant * plan.pair_norms(X, fi)
        return sides
    raise SpecValidationError(f"unknown check kind {kind!r}")


def check_inequality(
    kind: str,
    spec: SpaceSpec,
    dims,
    samples: int,
    seed: int,
    tol: float = DEFAULT_TOL,
    distribution: str = "gaussian",
) -> VerificationReport:
    """Evaluate both sides of the named inequality on sampled vectors and
    every basis vector; a violation is slack = rhs - lhs < -tol."""
    t0 = time.perf_counter()
    spec = spec.normalized()
    sides = _check_sides(kind, spec)
    dims = tuple(int(d) for d in dims)
    worst = math.inf
    worst_witness: dict[int, float] = {}
    worst_dim = 0
    violations = 0
    for dim in dims:
        eff = effective_dim(spec, dim)
        plan = _EvalPlan(spec, eff)
        rng = np.random.default_rng([seed, eff])
        X = _sample_matrix(eff, samples, rng, distribution)
        X = np.vstack([X, np.eye(eff)])
        lhs, rhs = sides(plan, X, eff)
        slack = rhs - lhs
        violations += int((slack < -tol).sum())
        i = int(np.argmin(slack))
        if slack[i] < worst:
            worst = float(slack[i])
            worst_dim = eff
            row = X[i]
            worst_witness = {
                g + 1: float(v) for g, v in enumerate(row) if v != 0.0
            }
    return VerificationReport(
        check=kind,
        spec_digest=_digest(spec),
        dims=dims,
        samples=samples,
        seed=seed,
        tol=tol,
        worst_slack=worst,
        violations=violations,
        witness_dim=worst_dim,
        witness=worst_witness,
        wall_time=time.perf_counter() - t0,
    )


# ---------------------------------------------------------------------------
# Ratio scans
# ---------------------------------------------------------------------------

def space_norm_handle(spec: SpaceSpec):
    from .norms import space_norm

    spec = spec.normalized()

    def handle(x: SparseVector) -> float:
        return space_norm(x, spec).overall

    handle.batch = None
    return handle


def lp_handle(p):
    pf = float(p)

    def handle(x: SparseVector) -> float:
        return sum(abs(v) ** pf for _, v in x.entries) ** (1.0 / pf)

    return handle


def l2_handle():
    def handle(x: SparseVector) -> float:
        return math.sqrt(sum(v * v for _, v in x.entries))

    return handle


def pair_norm_handle(pair: PartitionWeightPair, p):
    def handle(x: SparseVector) -> float:
        return pair_norm(x, pair, p)

    return handle


def _as_vector(row: np.ndarray) -> SparseVector:
    scheme = PartitionScheme.discrete()
    return SparseVector.from_global(
        scheme, {g + 1: float(v) for g, v in enumerate(row) if v != 0.0}
    )


def _coordinate_ascent(norm_a, norm_b, row, maximize: bool, steps: int = 100):
    """Local refinement of the ratio a(x)/b(x) from a starting vector,
    halving the step on failure; the ratio is scale invariant, so moves
    are plain coordinate perturbations."""
    x = row.copy()

    def ratio(v):
        vec = _as_vector(v)
        if not len(vec):
            return None
        b = norm_b(vec)
        if b == 0:
            return None
        return norm_a(vec) / b

    best = ratio(x)
    if best is None:
        return best
    step = float(np.max(np.abs(x))) or 1.0
    sign = 1.0 if maximize else -1.0
    for _ in range(steps):
        improved = False
        for i in range(len(x)):
            for delta in (step, -step):
                trial = x.copy()
                trial[i] += delta
                r = ratio(trial)
                if r is not None and sign * (r - best) > 1e-15:
                    x, best = trial, r
                    improved = True
        if not improved:
            step /= 2.0
            if step < 1e-9:
                break
    return best


def ratio_scan(norm_a, norm_b, dims, samples: int, seed: int) -> RatioScan:
    """Empirical min/max of norm_a(x)/norm_b(x) per dimension over samples
    plus all basis vectors, with local coordinate-ascent refinement from
    the best and worst sampled points."""
    dims = tuple(int(d) for d in dims)
    per_min: dict[int, float] = {}
    per_max: dict[int, float] = {}
    for dim in dims:
        rng = np.random.default_rng([seed, dim])
        X = _sample_matrix(dim, samples, rng, "gaussian")
        X = np.vstack([X, np.eye(dim)])
        ratios = []
        for row in X:
            vec = _as_vector(row)
            if not len(vec):
                continue
            b = norm_b(vec)
            if b == 0:
                continue
            ratios.append((norm_a(vec) / b, row))
        values = np.array([r for r, _ in ratios])
        lo_i, hi_i = int(np.argmin(values)), int(np.argmax(values))
        lo = _coordinate_ascent(norm_a, norm_b, ratios[lo_i][1], maximize=False)
        hi = _coordinate_ascent(norm_a, norm_b, ratios[hi_i][1], maximize=True)
        per_min[dim] = min(float(values[lo_i]), lo if lo is not None else math.inf)
        per_max[dim] = max(float(values[hi_i]), hi if hi is not None else -math.inf)
    trend = 0.0
    if len(dims) >= 2:
        top = sorted(dims)[-2:]
        a, b = per_max[top[0]], per_max[top[1]]
        if a > 0:
            trend = (b - a) / a
    return RatioScan(
        dims=dims,
        samples=samples,
        seed=seed,
        per_dim_min=per_min,
        per_dim_max=per_max,
        trend=trend,
    )


# ---------------------------------------------------------------------------
# Brute-force sphere oracle
# ---------------------------------------------------------------------------

@dataclass
class OracleResult:
    value: float
    witness: tuple[float, ...]
    grid: int
    accuracy_bound: float

    def to_dict(self) -> dict:
        return {
            "value": self.value,
            "witness": list(self.witness),
            "grid": self.grid,
            "accuracy_bound": self.accuracy_bound,
        }


def sphere_oracle(pair: PartitionWeightPair, p, dim: int, grid: int = 12) -> OracleResult:
    """Maximum of the pair norm over the unit l_p sphere, by grid search
    over the nonnegative orthant (the norm is unconditional) plus local
    refinement.  The grid value is within a Lipschitz bound sqrt(dim)/grid
    of the true maximum; refinement then tightens far beyond it."""
    if dim > 6:
        raise DimensionTooLarge(f"sphere search supports dim <= 6, got {dim}")
    if dim < 1 or grid < 1:
        raise SpecValidationError("dim and grid must be positive")
    pf = float(p)
    blocks = []
    weights = []
    for g in range(1, dim + 1):
        B, K = pair.scheme.locate(g)
        blocks.append(B)
        weights.append(float(pair.weights.weight_at(B, K)))
    wsq = np.array(weights) ** 2
    labels = {b: i for i, b in enumerate(dict.fromkeys(blocks))}
    blk = np.array([labels[b] for b in blocks])
    nblocks = len(labels)

    def value(y: np.ndarray) -> float:
        s = np.zeros(nblocks)
        np.add.at(s, blk, y * y * wsq)
        return float(np.power(s, pf / 2.0).sum() ** (1.0 / pf))

    def ratio(y: np.ndarray) -> float:
        lp = np.power(y, pf).sum() ** (1.0 / pf)
        return value(y) / lp

    best_r = -math.inf
    best_y = None
    for flat in np.ndindex(*([grid + 1] * dim)):
        y = np.array(flat, dtype=float)
        if not y.any():
            continue
        r = ratio(y)
        if r > best_r:
            best_r, best_y = r, y / grid
    # multiplicative-free coordinate refinement on the scale-invariant ratio
    step = 1.0 / grid
    y = best_y.copy()
    for _ in range(200):
        improved = False
        for i in range(dim):
            for delta in (step, -step):
                trial = y.copy()
                trial[i] = max(0.0, trial[i] + delta)
                if not trial.any():
                    continue
                r = ratio(trial)
                if r > best_r + 1e-16:
                    best_r, y = r, trial
                    improved = True
        if not improved:
            step /= 2.0
            if step < 1e-12:
                break
    lp = np.power(y, pf).sum() ** (1.0 / pf)
    witness = tuple(float(v) for v in (y / lp))
    return OracleResult(
        value=best_r,
        witness=witness,
        grid=grid,
        accuracy_bound=math.sqrt(dim) / grid,
    )
