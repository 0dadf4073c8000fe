"""Nonparametric information estimators over sample columns.

Implements the estimator layer used by the metric computations:

* plug-in Shannon entropy and mutual information for discrete columns,
* Kozachenko-Leonenko kNN differential entropy for continuous columns,
* KSG (type 1) kNN mutual information for continuous or mixed pairs,
* conditional entropy assembled from the above,
* Spearman rank correlation.

All quantities are in nats. Continuous estimators break ties with
deterministic, content-keyed jitter: the noise applied to a column is a
pure function of the config seed and the column bytes, so estimates are
reproducible, symmetric in their arguments, and safe to compute
concurrently. Mean reductions use math.fsum, which makes results
invariant under joint row permutations of pre-jittered data.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass
from typing import Iterable, Literal

import numpy as np
from scipy.spatial import cKDTree
from scipy.special import digamma
from scipy.stats import rankdata

from .errors import (
    AlignmentError,
    DegenerateSampleError,
    InsufficientSamplesError,
    KindMismatchError,
    UndefinedCorrelationError,
)

__all__ = [
    "SampleColumn",
    "EstimatorConfig",
    "MIEstimate",
    "entropy_discrete",
    "entropy_continuous",
    "mi_continuous",
    "mi_continuous_detailed",
    "mi_discrete",
    "conditional_entropy",
    "spearman",
]

Kind = Literal["continuous", "discrete"]

CONTINUOUS: Kind = "continuous"
DISCRETE: Kind = "discrete"


def _as_readonly_f64(values: Iterable[float]) -> np.ndarray:
    arr = np.array(values, dtype=np.float64, copy=True)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class SampleColumn:
    """One realized sample vector (an attribute a_i or a latent z_d).

    values are held as a read-only float64 array; discrete columns must
    contain integer-valued category codes.
    """

    values: np.ndarray
    kind: Kind

    def __post_init__(self) -> None:
        vals = _as_readonly_f64(self.values)
        if vals.ndim != 1:
            raise KindMismatchError("SampleColumn values must be one-dimensional")
        if vals.size < 2:
            raise InsufficientSamplesError(
                f"SampleColumn needs at least 2 samples, got {vals.size}"
            )
        if not np.all(np.isfinite(vals)):
            raise DegenerateSampleError("SampleColumn values must be finite (no NaN/inf)")
        if self.kind not in (CONTINUOUS, DISCRETE):
            raise KindMismatchError(f"unknown column kind: {self.kind!r}")
        if self.kind == DISCRETE and not np.array_equal(vals, np.floor(vals)):
            raise KindMismatchError("discrete column contains non-integer codes")
        object.__setattr__(self, "values", vals)

    @property
    def n(self) -> int:
        return int(self.values.size)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SampleColumn):
            return NotImplemented
        return self.kind == other.kind and np.array_equal(self.values, other.values)

    def __hash__(self) -> int:
        return hash((self.kind, self.values.tobytes()))


@dataclass(frozen=True)
class EstimatorConfig:
    """Knobs shared by all kNN estimators.

    k: neighbor count; jitter: tie-breaking noise amplitude as a fraction
    of the column standard deviation; seed: keys the jitter noise; unit is
    fixed to nats (closed-form oracles are natural-log).
    """

    k: int = 3
    jitter: float = 1e-10
    seed: int = 0
    unit: Literal["nats"] = "nats"

    def __post_init__(self) -> None:
        if self.k < 1:
            raise InsufficientSamplesError(f"k must be >= 1, got {self.k}")
        if not (self.jitter >= 0.0):
            raise DegenerateSampleError(f"jitter must be >= 0, got {self.jitter}")
        if not (0 <= self.seed < 2**64):
            raise DegenerateSampleError("seed must fit in 64 unsigned bits")
        if self.unit != "nats":
            raise KindMismatchError(f"unsupported unit: {self.unit!r}")


@dataclass(frozen=True)
class MIEstimate:
    """Raw KSG estimate plus the deterministic-relation diagnostic.

    deterministic_relation is set when some k-th neighbor distance in the
    joint space underflows to zero, i.e. the sample contains at least k+1
    coincident joint points even after jitter. The value stays finite.
    """

    value: float
    deterministic_relation: bool


def _require_kind(col: SampleColumn, kind: Kind, op: str) -> None:
    if col.kind != kind:
        raise KindMismatchError(f"{op} requires a {kind} column, got {col.kind}")


def _require_aligned(x: SampleColumn, y: SampleColumn) -> int:
    if x.n != y.n:
        raise AlignmentError(f"columns must share N, got {x.n} and {y.n}")
    return x.n


def _require_samples(n: int, k: int) -> None:
    # kNN estimators need k neighbors besides the query point itself.
    if n <= k:
        raise InsufficientSamplesError(f"need N >= k+1 samples, got N={n} with k={k}")


def _jittered(col: SampleColumn, cfg: EstimatorConfig) -> np.ndarray:
    """Return column values with deterministic tie-breaking noise.

    The noise stream is keyed by (seed, column content), not by argument
    position, so mi(x, y) and mi(y, x) see identical point clouds and the
    estimates agree bit for bit. Zero jitter or a constant column returns
    the values unchanged.
    """
    vals = col.values
    if cfg.jitter == 0.0:
        return vals
    sd = float(np.std(vals))
    if sd == 0.0:
        return vals
    key = hashlib.blake2b(
        cfg.seed.to_bytes(8, "little") + vals.tobytes(), digest_size=16
    ).digest()
    rng = np.random.default_rng(int.from_bytes(key, "little"))
    return vals + (cfg.jitter * sd) * rng.random(vals.size)


def entropy_discrete(a: SampleColumn) -> float:
    """Plug-in Shannon entropy of a discrete column, in nats."""
    _require_kind(a, DISCRETE, "entropy_discrete")
    _, counts = np.unique(a.values, return_counts=True)
    n = a.n
    return -math.fsum((c / n) * math.log(c / n) for c in counts)


def _joint_entropy_discrete(x: SampleColumn, y: SampleColumn) -> float:
    n = _require_aligned(x, y)
    pairs = np.column_stack([x.values, y.values])
    _, counts = np.unique(pairs, axis=0, return_counts=True)
    return -math.fsum((c / n) * math.log(c / n) for c in counts)


def entropy_continuous(a: SampleColumn, cfg: EstimatorConfig) -> float:
    """Kozachenko-Leonenko kNN differential entropy of a 1-D sample, in nats.

    H = psi(N) - psi(k) + (1/N) * sum_i ln(2 * eps_i), where eps_i is the
    distance from sample i to its k-th nearest neighbor. May be negative
    for concentrated distributions.
    """
    _require_kind(a, CONTINUOUS, "entropy_continuous")
    _require_samples(a.n, cfg.k)
    pts = _jittered(a, cfg)
    if float(np.std(pts)) == 0.0:
        raise DegenerateSampleError("zero-variance column after jitter")
    tree = cKDTree(pts[:, None])
    eps = tree.query(pts[:, None], k=[cfg.k + 1], p=np.inf)[0][:, 0]
    if np.any(eps == 0.0):
        raise DegenerateSampleError(
            "coincident samples: k-th neighbor distance is zero, "
            "differential entropy undefined (increase jitter)"
        )
    n = a.n
    return digamma(n) - digamma(cfg.k) + math.fsum(np.log(2.0 * eps)) / n


def mi_continuous_detailed(
    x: SampleColumn, y: SampleColumn, cfg: EstimatorConfig
) -> MIEstimate:
    """KSG type-1 mutual information with diagnostics, in nats.

    I = psi(k) + psi(N) - mean_i[psi(nx_i + 1) + psi(ny_i + 1)], where
    eps_i is the Chebyshev distance to the k-th joint neighbor and nx_i,
    ny_i count marginal neighbors strictly inside eps_i. Discrete codes
    are admitted here by jittering them into continuous treatment. The
    raw estimate may be slightly negative; metric consumers clamp it.
    """
    n = _require_aligned(x, y)
    _require_samples(n, cfg.k)
    px = _jittered(x, cfg)
    py = _jittered(y, cfg)

    joint = np.column_stack([px, py])
    tree = cKDTree(joint)
    eps = tree.query(joint, k=[cfg.k + 1], p=np.inf)[0][:, 0]

    # Strict counts |x_j - x_i| < eps_i via a closed ball of radius
    # nextafter(eps, 0). eps == 0 (>= k+1 coincident joint points) would
    # make that radius inclusive again, so those counts are pinned to 0
    # and reported through the deterministic-relation diagnostic.
    degenerate = eps == 0.0
    radius = np.nextafter(eps, 0.0)

    nx = np.zeros(n, dtype=np.int64)
    ny = np.zeros(n, dtype=np.int64)
    ok = ~degenerate
    if np.any(ok):
        tx = cKDTree(px[:, None])
        ty = cKDTree(py[:, None])
        qx = px[ok][:, None]
        qy = py[ok][:, None]
        r = radius[ok]
        nx[ok] = tx.query_ball_point(qx, r, p=np.inf, return_length=True) - 1
        ny[ok] = ty.query_ball_point(qy, r, p=np.inf, return_length=True) - 1

    mean_psi = math.fsum(digamma(nx + 1.0) + digamma(ny + 1.0)) / n
    value = float(digamma(cfg.k) + digamma(n) - mean_psi)
    return MIEstimate(value=value, deterministic_relation=bool(np.any(degenerate)))


def mi_continuous(x: SampleColumn, y: SampleColumn, cfg: EstimatorConfig) -> float:
    """Raw KSG mutual information estimate (see mi_continuous_detailed)."""
    return mi_continuous_detailed(x, y, cfg).value


def mi_discrete(x: SampleColumn, y: SampleColumn) -> float:
    """Plug-in mutual information of two discrete columns, in nats.

    Computed as max(0, H(x) + H(y) - H(x, y)) from the empirical tables,
    which keeps the estimate exactly nonnegative and makes the entropy
    chain rule hold to rounding error.
    """
    _require_kind(x, DISCRETE, "mi_discrete")
    _require_kind(y, DISCRETE, "mi_discrete")
    hx = entropy_discrete(x)
    hy = entropy_discrete(y)
    hxy = _joint_entropy_discrete(x, y)
    return max(0.0, hx + hy - hxy)


def conditional_entropy(
    a: SampleColumn, b: SampleColumn, cfg: EstimatorConfig
) -> float:
    """Conditional entropy H(a | b), in nats.

    Discrete pairs use the exact identity H(a,b) - H(b) on the joint
    table. Any pair involving a continuous column uses H(a) - I(a; b)
    with the kNN estimators, so the result may be negative when a is
    continuous.
    """
    _require_aligned(a, b)
    if a.kind == DISCRETE and b.kind == DISCRETE:
        return _joint_entropy_discrete(a, b) - entropy_discrete(b)
    if a.kind == DISCRETE:
        h_a = entropy_discrete(a)
    else:
        h_a = entropy_continuous(a, cfg)
    return h_a - mi_continuous(a, b, cfg)


def spearman(x: SampleColumn, y: SampleColumn) -> float:
    """Spearman rank correlation: Pearson correlation of average ranks.

    Exact on the cases that matter downstream: identical rank vectors
    give 1.0, exactly reversed ranks give -1.0, and tie-free data uses
    the integer formula 1 - 6*sum(d^2)/(n*(n^2-1)).
    """
    n = _require_aligned(x, y)
    if n < 2:
        raise InsufficientSamplesError("spearman needs at least 2 samples")
    for col, label in ((x, "x"), (y, "y")):
        if np.unique(col.values).size < 2:
            raise UndefinedCorrelationError(
                f"spearman undefined: column {label} is constant"
            )
    rx = rankdata(x.values, method="average")
    ry = rankdata(y.values, method="average")
    if np.array_equal(rx, ry):
        return 1.0
    if np.array_equal(rx, (n + 1.0) - ry):
        return -1.0
    tie_free = (
        np.unique(x.values).size == n and np.unique(y.values).size == n
    )
    if tie_free:
        d2 = sum((int(a) - int(b)) ** 2 for a, b in zip(rx, ry))
        return 1.0 - (6.0 * d2) / (n * (n * n - 1.0))
    cx = rx - rx.mean()
    cy = ry - ry.mean()
    return float(np.dot(cx, cy) / math.sqrt(np.dot(cx, cx) * np.dot(cy, cy)))
