"""Dataset-level MI profiles and the MIG / DMIG metrics.

MIG for attribute a_i is the normalized gap between the mutual
information carried by its regularized latent dimension and by the
strongest other dimension:

    MIG(a_i) = (I(a_i, z_map(i)) - I(a_i, z_j)) / H(a_i),
    j = argmax_{k != map(i)} I(a_i, z_k).

The first term is always taken at the regularized dimension, so MIG goes
negative when another dimension dominates (regularization failure).

DMIG keeps the numerator and swaps the normalizer: when the runner-up
dimension j is itself regularized for some attribute a_j, the denominator
becomes the conditional entropy H(a_i | a_j), which discounts the MI that
z_j holds about a_i merely through the attribute dependence. When the
runner-up is unregularized, DMIG reduces to MIG exactly. Conditional
differential entropy can be negative or near zero, which is surfaced
through flags and a signed infinity sentinel rather than clamped away.
"""

from __future__ import annotations

import hashlib
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Literal

import numpy as np

from .errors import (
    DatasetInvariantError,
    DmigError,
    MetricComputationError,
    ZeroEntropyAttributeError,
)
from .estimation import (
    CONTINUOUS,
    DISCRETE,
    EstimatorConfig,
    SampleColumn,
    conditional_entropy,
    entropy_continuous,
    entropy_discrete,
    mi_continuous_detailed,
    mi_discrete,
    spearman,
)

__all__ = [
    "Dataset",
    "MIProfile",
    "MigResult",
    "AttributeMetrics",
    "MetricReport",
    "mi_profile",
    "compute_mig",
    "compute_dmig",
    "evaluate",
    "FLAG_REGULARIZATION_FAILURE",
    "FLAG_NEAR_ZERO_DENOMINATOR",
    "FLAG_NEGATIVE_DENOMINATOR",
    "FLAG_DMIG_ABOVE_ONE",
    "EPS_ENTROPY",
    "EPS_DENOMINATOR",
]

FLAG_REGULARIZATION_FAILURE = "regularization_failure"
FLAG_NEAR_ZERO_DENOMINATOR = "near_zero_denominator"
FLAG_NEGATIVE_DENOMINATOR = "negative_denominator"
FLAG_DMIG_ABOVE_ONE = "dmig_above_one"

# Attribute entropies at or below EPS_ENTROPY make the normalization
# undefined and are rejected; |denominator| below EPS_DENOMINATOR trips
# the signed-infinity sentinel instead of dividing.
EPS_ENTROPY = 1e-9
EPS_DENOMINATOR = 1e-6

Branch = Literal["regularized", "unregularized"]


def _infer_kind(values: np.ndarray) -> str:
    return DISCRETE if np.array_equal(values, np.floor(values)) else CONTINUOUS


@dataclass(frozen=True, eq=False)
class Dataset:
    """N samples of a D-dimensional latent code paired with M attributes.

    regularized_map[i] is the 0-based latent dimension supervised to
    encode attribute i (identity by default); it must be injective.
    Latent column kinds are inferred: a column whose entries are all
    integer-valued is treated as discrete.
    """

    latents: np.ndarray
    attributes: tuple[SampleColumn, ...]
    regularized_map: tuple[int, ...] | None = None
    names: tuple[str, ...] | None = None
    latent_kinds: tuple[str, ...] = field(init=False)

    def __post_init__(self) -> None:
        lat = np.array(self.latents, dtype=np.float64, copy=True)
        if lat.ndim != 2:
            raise DatasetInvariantError("latents must be an N x D matrix")
        if not np.all(np.isfinite(lat)):
            raise DatasetInvariantError("latents contain NaN or infinite entries")
        lat.setflags(write=False)
        n, d = lat.shape
        if n < 2 or d < 1:
            raise DatasetInvariantError(f"latents need N >= 2 and D >= 1, got {lat.shape}")

        attrs = tuple(self.attributes)
        m = len(attrs)
        for i, col in enumerate(attrs):
            if not isinstance(col, SampleColumn):
                raise DatasetInvariantError(f"attribute {i} is not a SampleColumn")
            if col.n != n:
                raise DatasetInvariantError(
                    f"attribute {i} has N={col.n}, latents have N={n}"
                )
        if m > d:
            raise DatasetInvariantError(f"M={m} attributes exceed D={d} latent dims")

        reg = self.regularized_map
        reg = tuple(range(m)) if reg is None else tuple(int(j) for j in reg)
        if len(reg) != m:
            raise DatasetInvariantError("regularized_map length must equal M")
        if any(j < 0 or j >= d for j in reg):
            raise DatasetInvariantError("regularized_map targets outside 0..D-1")
        if len(set(reg)) != m:
            raise DatasetInvariantError("regularized_map must be injective")

        names = self.names
        names = tuple(str(i + 1) for i in range(m)) if names is None else tuple(names)
        if len(names) != m:
            raise DatasetInvariantError("names length must equal M")
        if len(set(names)) != m:
            raise DatasetInvariantError("attribute names must be unique")
        if any(not s for s in names):
            raise DatasetInvariantError("attribute names must be nonempty")

        object.__setattr__(self, "latents", lat)
        object.__setattr__(self, "attributes", attrs)
        object.__setattr__(self, "regularized_map", reg)
        object.__setattr__(self, "names", names)
        object.__setattr__(
            self, "latent_kinds", tuple(_infer_kind(lat[:, j]) for j in range(d))
        )

    @property
    def n(self) -> int:
        return int(self.latents.shape[0])

    @property
    def d(self) -> int:
        return int(self.latents.shape[1])

    @property
    def m(self) -> int:
        return len(self.attributes)

    def latent_column(self, j: int) -> SampleColumn:
        return SampleColumn(self.latents[:, j], kind=self.latent_kinds[j])

    def digest(self) -> str:
        """Content hash covering latents, attributes, map and names."""
        h = hashlib.blake2b(digest_size=16)
        h.update(np.asarray(self.latents.shape, dtype=np.int64).tobytes())
        h.update(self.latents.tobytes())
        for name, col in zip(self.names, self.attributes):
            h.update(name.encode())
            h.update(col.kind.encode())
            h.update(col.values.tobytes())
        h.update(np.asarray(self.regularized_map, dtype=np.int64).tobytes())
        return h.hexdigest()

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Dataset):
            return NotImplemented
        return (
            np.array_equal(self.latents, other.latents)
            and self.attributes == other.attributes
            and self.regularized_map == other.regularized_map
            and self.names == other.names
        )


@dataclass(frozen=True, eq=False)
class MIProfile:
    """All estimated information quantities a metric pass needs.

    mi is clamped at zero from below; mi_raw keeps the uncorrected KSG
    values for diagnostics. h_cond[i][j] is H(a_i | a_j); the diagonal is
    unused and left at zero.
    """

    mi: np.ndarray
    mi_raw: np.ndarray
    h_marginal: np.ndarray
    h_cond: np.ndarray
    kinds: tuple[str, ...]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, MIProfile):
            return NotImplemented
        return (
            np.array_equal(self.mi, other.mi)
            and np.array_equal(self.mi_raw, other.mi_raw)
            and np.array_equal(self.h_marginal, other.h_marginal)
            and np.array_equal(self.h_cond, other.h_cond)
            and self.kinds == other.kinds
        )


@dataclass(frozen=True)
class MigResult:
    """Outcome of the MIG computation for one attribute."""

    mig: float
    top_dim: int
    runner_up_dim: int | None
    flags: frozenset[str]


@dataclass(frozen=True)
class AttributeMetrics:
    """Per-attribute metric record carried by a MetricReport."""

    name: str | None
    mig: float
    dmig: float
    scc: float | None
    top_dim: int
    runner_up_dim: int | None
    branch: Branch
    denominator: float
    flags: frozenset[str]


@dataclass(frozen=True)
class MetricReport:
    """Self-describing evaluation result for one dataset."""

    per_attribute: tuple[AttributeMetrics, ...]
    mean_mig: float
    mean_dmig: float
    config_echo: EstimatorConfig
    dataset_digest: str


def _pair_mi(a: SampleColumn, z: SampleColumn, cfg: EstimatorConfig) -> float:
    if a.kind == DISCRETE and z.kind == DISCRETE:
        return mi_discrete(a, z)
    return mi_continuous_detailed(a, z, cfg).value


def _marginal_entropy(a: SampleColumn, cfg: EstimatorConfig) -> float:
    return entropy_discrete(a) if a.kind == DISCRETE else entropy_continuous(a, cfg)


def mi_profile(ds: Dataset, cfg: EstimatorConfig, workers: int = 1) -> MIProfile:
    """Estimate every I(a_i, z_d), H(a_i) and H(a_i | a_j) for a dataset.

    Discrete-discrete pairs take the plug-in path; anything touching a
    continuous column takes the KSG/KL path. With workers > 1 the cell
    grid is evaluated in a thread pool; every cell is a pure function of
    its inputs, so concurrent results equal serial ones exactly.
    """
    if ds.n <= cfg.k:
        raise MetricComputationError(
            f"dataset has N={ds.n} samples but estimators need N >= k+1 with k={cfg.k}"
        )
    m, d = ds.m, ds.d
    lat_cols = [ds.latent_column(j) for j in range(d)]

    def mi_cell(i: int, j: int) -> float:
        try:
            return _pair_mi(ds.attributes[i], lat_cols[j], cfg)
        except DmigError as exc:
            raise MetricComputationError(
                f"MI estimation failed for attribute '{ds.names[i]}' "
                f"(index {i}) vs latent z{j + 1}: {exc}"
            ) from exc

    def h_cell(i: int) -> float:
        try:
            return _marginal_entropy(ds.attributes[i], cfg)
        except DmigError as exc:
            raise MetricComputationError(
                f"entropy estimation failed for attribute '{ds.names[i]}' "
                f"(index {i}): {exc}"
            ) from exc

    def cond_cell(i: int, j: int) -> float:
        try:
            return conditional_entropy(ds.attributes[i], ds.attributes[j], cfg)
        except DmigError as exc:
            raise MetricComputationError(
                f"conditional entropy failed for attribute pair "
                f"('{ds.names[i]}', '{ds.names[j]}'): {exc}"
            ) from exc

    mi_raw = np.zeros((m, d))
    h_marginal = np.zeros(m)
    h_cond = np.zeros((m, m))

    mi_tasks = [(i, j) for i in range(m) for j in range(d)]
    cond_tasks = [(i, j) for i in range(m) for j in range(m) if i != j]

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            for (i, j), v in zip(mi_tasks, pool.map(lambda t: mi_cell(*t), mi_tasks)):
                mi_raw[i, j] = v
            for i, v in zip(range(m), pool.map(h_cell, range(m))):
                h_marginal[i] = v
            for (i, j), v in zip(
                cond_tasks, pool.map(lambda t: cond_cell(*t), cond_tasks)
            ):
                h_cond[i, j] = v
    else:
        for i, j in mi_tasks:
            mi_raw[i, j] = mi_cell(i, j)
        for i in range(m):
            h_marginal[i] = h_cell(i)
        for i, j in cond_tasks:
            h_cond[i, j] = cond_cell(i, j)

    mi = np.maximum(mi_raw, 0.0)
    for arr in (mi, mi_raw, h_marginal, h_cond):
        arr.setflags(write=False)
    kinds = tuple(col.kind for col in ds.attributes)
    return MIProfile(mi=mi, mi_raw=mi_raw, h_marginal=h_marginal, h_cond=h_cond, kinds=kinds)


def _gap(
    i: int, p: MIProfile, regularized_map: tuple[int, ...]
) -> tuple[float, float, int, int | None]:
    """Shared MIG/DMIG numerator: (numerator, h_i, top_dim, runner_up_dim)."""
    map_i = regularized_map[i]
    row = p.mi[i]
    h_i = float(p.h_marginal[i])
    if h_i <= EPS_ENTROPY:
        raise ZeroEntropyAttributeError(
            f"attribute index {i} has entropy {h_i!r} <= {EPS_ENTROPY}; "
            "MIG/DMIG normalization undefined",
            attribute_index=i,
        )
    top_dim = int(np.argmax(row))
    if row.size == 1:
        runner_up_dim: int | None = None
        runner_mi = 0.0
    else:
        masked = row.copy()
        masked[map_i] = -np.inf
        runner_up_dim = int(np.argmax(masked))
        runner_mi = float(row[runner_up_dim])
    numerator = float(row[map_i]) - runner_mi
    return numerator, h_i, top_dim, runner_up_dim


def compute_mig(
    i: int, p: MIProfile, regularized_map: tuple[int, ...]
) -> MigResult:
    """MIG for attribute i from a populated profile.

    The argmax for the runner-up excludes the regularized dimension and
    breaks ties toward the lowest dimension index. A negative result
    comes with the regularization_failure flag: some other dimension
    carries more information about a_i than its regularized one.
    """
    numerator, h_i, top_dim, runner_up_dim = _gap(i, p, regularized_map)
    flags = set()
    if top_dim != regularized_map[i]:
        flags.add(FLAG_REGULARIZATION_FAILURE)
    return MigResult(
        mig=numerator / h_i,
        top_dim=top_dim,
        runner_up_dim=runner_up_dim,
        flags=frozenset(flags),
    )


def compute_dmig(
    i: int,
    p: MIProfile,
    regularized_map: tuple[int, ...],
    name: str | None = None,
) -> AttributeMetrics:
    """DMIG for attribute i, with branch selection and diagnostics.

    If the runner-up dimension is in the image of the regularized map,
    the denominator is H(a_i | a_j) for the attribute a_j mapped there
    (branch "regularized"); otherwise it is H(a_i) and DMIG equals MIG
    exactly (branch "unregularized"). A near-zero denominator yields a
    signed infinity sentinel instead of a division; a negative
    denominator is computed as-is and flagged. The dmig_above_one flag
    covers both ways the metric can exceed its ideal ceiling: a value
    above 1, or a negative denominator (where the ratio semantics break
    down entirely).
    """
    numerator, h_i, top_dim, runner_up_dim = _gap(i, p, regularized_map)
    flags = set()
    if top_dim != regularized_map[i]:
        flags.add(FLAG_REGULARIZATION_FAILURE)

    image = {dim: a for a, dim in enumerate(regularized_map)}
    if runner_up_dim is not None and runner_up_dim in image:
        branch: Branch = "regularized"
        denominator = float(p.h_cond[i][image[runner_up_dim]])
    else:
        branch = "unregularized"
        denominator = h_i

    if abs(denominator) < EPS_DENOMINATOR:
        dmig = math.inf if numerator >= 0 else -math.inf
        flags.add(FLAG_NEAR_ZERO_DENOMINATOR)
    else:
        dmig = numerator / denominator
    if denominator < 0.0:
        flags.add(FLAG_NEGATIVE_DENOMINATOR)
    if denominator < 0.0 or dmig > 1.0:
        flags.add(FLAG_DMIG_ABOVE_ONE)

    return AttributeMetrics(
        name=name,
        mig=numerator / h_i,
        dmig=dmig,
        scc=None,
        top_dim=top_dim,
        runner_up_dim=runner_up_dim,
        branch=branch,
        denominator=denominator,
        flags=frozenset(flags),
    )


def _mean(vals: list[float]) -> float:
    # fsum keeps aggregates permutation-invariant but rejects mixed
    # infinities; sentinel-bearing reports fall back to plain summation.
    if all(math.isfinite(v) for v in vals):
        return math.fsum(vals) / len(vals)
    return sum(vals) / len(vals)


def evaluate(ds: Dataset, cfg: EstimatorConfig, workers: int = 1) -> MetricReport:
    """Full evaluation: MI profile, per-attribute MIG/DMIG/SCC, aggregates.

    SCC is the Spearman correlation between each attribute and its
    regularized latent dimension. Aggregates are arithmetic means; they
    go non-finite if any attribute hit the denominator sentinel.
    """
    if ds.m == 0:
        raise DatasetInvariantError("dataset has no attributes; nothing to evaluate")
    profile = mi_profile(ds, cfg, workers=workers)
    per = []
    for i in range(ds.m):
        am = compute_dmig(i, profile, ds.regularized_map, name=ds.names[i])
        try:
            scc = spearman(ds.attributes[i], ds.latent_column(ds.regularized_map[i]))
        except DmigError as exc:
            raise MetricComputationError(
                f"SCC failed for attribute '{ds.names[i]}' (index {i}): {exc}"
            ) from exc
        per.append(replace(am, scc=scc))
    mean_mig = _mean([a.mig for a in per])
    mean_dmig = _mean([a.dmig for a in per])
    return MetricReport(
        per_attribute=tuple(per),
        mean_mig=mean_mig,
        mean_dmig=mean_dmig,
        config_echo=cfg,
        dataset_digest=ds.digest(),
    )
