"""Age and peak-age distributions of an absorbing cycle chain.

The peak age of a cycle is the chain's absorption time conditioned on
ending in the successful column; the stationary age density is the
(normalized) probability of occupying an age-overlap state at elapsed
time ``x``. Both laws share the same matrix-exponential kernel and
differ only in the weighting vector: the successful absorption rates for
peak age, the age-overlap mask for age. All conditioning follows the
defining ratios directly; no renormalized sub-chain is built.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import factorial
from types import MappingProxyType
from typing import Mapping

import numpy as np

from . import _io
from .phasetype import AbsorbingChain, absorption_probability, expm_action, expm_action_grid


@dataclass(frozen=True)
class GridSpec:
    """Evaluation grid: ``points`` log-spaced abscissae from
    ``min_mult * mean`` to ``max_mult * mean``, preceded by 0."""

    points: int = 2000
    min_mult: float = 0.01
    max_mult: float = 40.0

    def __post_init__(self):
        if self.points < 2:
            raise ValueError("grid needs at least two points")
        if not 0 < self.min_mult < self.max_mult:
            raise ValueError("need 0 < min_mult < max_mult")

    def build(self, mean: float) -> np.ndarray:
        if mean <= 0:
            raise ValueError("mean must be positive")
        body = np.geomspace(self.min_mult * mean, self.max_mult * mean,
                            self.points)
        return np.concatenate(([0.0], body))


@dataclass(frozen=True, eq=False)
class DistributionTable:
    """Tabulated pdf/cdf on a grid, with the first two moments."""

    grid: np.ndarray
    pdf: np.ndarray
    cdf: np.ndarray
    mean: float
    second_moment: float
    variance: float
    meta: Mapping = field(default_factory=dict)

    def __post_init__(self):
        grid = np.asarray(self.grid, dtype=float)
        pdf = np.asarray(self.pdf, dtype=float)
        cdf = np.asarray(self.cdf, dtype=float)
        if not (grid.shape == pdf.shape == cdf.shape):
            raise ValueError("grid, pdf and cdf must have equal shapes")
        if np.any(grid < 0) or np.any(np.diff(grid) <= 0):
            raise ValueError("grid must be nonnegative and strictly increasing")
        if np.any(pdf < 0):
            raise ValueError("pdf has negative entries")
        if cdf[0] < 0 or cdf[-1] > 1 + 1e-9 or np.any(np.diff(cdf) < -1e-12):
            raise ValueError("cdf must be nondecreasing within [0, 1]")
        for name, arr in (("grid", grid), ("pdf", pdf), ("cdf", cdf)):
            arr = arr.copy()
            arr.flags.writeable = False
            object.__setattr__(self, name, arr)
        object.__setattr__(self, "meta", MappingProxyType(dict(self.meta)))

    def to_csv(self, path) -> None:
        _io.write_csv(path, ["x", "pdf", "cdf"],
                      zip(self.grid, self.pdf, self.cdf))

    def payload(self) -> dict:
        return {"grid": self.grid, "pdf": self.pdf, "cdf": self.cdf,
                "mean": self.mean, "second_moment": self.second_moment,
                "variance": self.variance, "meta": dict(self.meta)}

    def to_json(self, path) -> None:
        _io.write_json(path, self.payload())


@dataclass(frozen=True, eq=False)
class AoiSummary:
    """Means, first three non-central moments, success probability and
    tabulated distributions of age and peak age."""

    mean_aoi: float
    mean_paoi: float
    aoi_moments: tuple
    paoi_moments: tuple
    p_success: float
    aoi_table: DistributionTable
    paoi_table: DistributionTable
    meta: Mapping = field(default_factory=dict)

    def __post_init__(self):
        if not (self.mean_aoi > 0 and self.mean_paoi > 0):
            raise ValueError("means must be positive")
        if not 0 < self.p_success <= 1:
            raise ValueError("p_success must lie in (0, 1]")
        object.__setattr__(self, "meta", MappingProxyType(dict(self.meta)))

    def payload(self) -> dict:
        return {
            "mean_aoi": self.mean_aoi,
            "mean_paoi": self.mean_paoi,
            "aoi_moments": list(self.aoi_moments),
            "paoi_moments": list(self.paoi_moments),
            "p_success": self.p_success,
            "aoi_table": self.aoi_table.payload(),
            "paoi_table": self.paoi_table.payload(),
            "meta": dict(self.meta),
        }

    def to_json(self, path) -> None:
        _io.write_json(path, self.payload())


# ---------------------------------------------------------------------------
# conditional evaluation against a weighting vector
# ---------------------------------------------------------------------------

def _weights(chain: AbsorbingChain, kind: str) -> np.ndarray:
    if kind == "paoi":
        return chain.V[:, chain.success_col]
    if kind == "aoi":
        return chain.aoi_mask
    raise ValueError(f"unknown distribution kind {kind!r}")


def _norm(chain: AbsorbingChain, w: np.ndarray):
    """Return (y, denom) with ``y = S^{-1} w`` and ``denom = -init @ y``."""
    init = chain.require_init()
    y = chain.solve_right(w)
    denom = float(-(init @ y))
    if denom <= 0:
        raise ValueError("conditioning weight has zero mass under init")
    return y, denom


def _pdf(chain: AbsorbingChain, x, kind: str):
    w = _weights(chain, kind)
    _, denom = _norm(chain, w)
    init = chain.require_init()
    arr = np.asarray(x, dtype=float)
    if np.any(arr < 0):
        raise ValueError("time arguments must be nonnegative")
    if arr.ndim == 0:
        return float(expm_action(chain.S, float(arr), init) @ w) / denom
    order = np.argsort(arr, kind="stable")
    u = expm_action_grid(chain.S, arr[order], init)
    vals = (u @ w) / denom
    out = np.empty_like(vals)
    out[order] = vals
    return out


def _cdf(chain: AbsorbingChain, x, kind: str):
    w = _weights(chain, kind)
    y, denom = _norm(chain, w)
    init = chain.require_init()
    arr = np.asarray(x, dtype=float)
    if np.any(arr < 0):
        raise ValueError("time arguments must be nonnegative")
    if arr.ndim == 0:
        u = expm_action(chain.S, float(arr), init)
        return float((u - init) @ y) / denom
    order = np.argsort(arr, kind="stable")
    u = expm_action_grid(chain.S, arr[order], init)
    vals = ((u - init) @ y) / denom
    out = np.empty_like(vals)
    out[order] = vals
    return out


def _moment(chain: AbsorbingChain, i: int, kind: str) -> float:
    if int(i) != i or i < 1:
        raise ValueError("moment order must be a positive integer")
    i = int(i)
    w = _weights(chain, kind)
    y, denom = _norm(chain, w)
    init = chain.require_init()
    vec = y
    for _ in range(i):
        vec = chain.solve_right(vec)
    sign = 1.0 if (i + 1) % 2 == 0 else -1.0
    return sign * factorial(i) * float(init @ vec) / denom


def paoi_pdf(chain: AbsorbingChain, x):
    """Peak-age density ``init expm(Sx) V_s / (-init S^{-1} V_s)``."""
    return _pdf(chain, x, "paoi")


def paoi_cdf(chain: AbsorbingChain, x):
    """Peak-age cdf ``init (expm(Sx) - I) S^{-1} V_s / (-init S^{-1} V_s)``."""
    return _cdf(chain, x, "paoi")


def paoi_mean(chain: AbsorbingChain) -> float:
    """Mean peak age ``init S^{-2} V_s / (-init S^{-1} V_s)``."""
    return _moment(chain, 1, "paoi")


def paoi_moment(chain: AbsorbingChain, i: int) -> float:
    """``i``-th non-central moment of the peak age."""
    return _moment(chain, i, "paoi")


def aoi_pdf(chain: AbsorbingChain, x):
    """Stationary age density ``init expm(Sx) mask / (-init S^{-1} mask)``."""
    return _pdf(chain, x, "aoi")


def aoi_cdf(chain: AbsorbingChain, x):
    """Stationary age cdf, the integral of :func:`aoi_pdf`."""
    return _cdf(chain, x, "aoi")


def aoi_mean(chain: AbsorbingChain) -> float:
    """Mean age ``init S^{-2} mask / (-init S^{-1} mask)``."""
    return _moment(chain, 1, "aoi")


def aoi_moment(chain: AbsorbingChain, i: int) -> float:
    """``i``-th non-central moment of the stationary age."""
    return _moment(chain, i, "aoi")


def _table(chain: AbsorbingChain, kind: str, grid_spec: GridSpec,
           meta: dict) -> tuple:
    w = _weights(chain, kind)
    y, denom = _norm(chain, w)
    init = chain.require_init()
    moments = []
    vec = y
    for i in range(1, 4):
        vec = chain.solve_right(vec)
        sign = 1.0 if (i + 1) % 2 == 0 else -1.0
        moments.append(sign * factorial(i) * float(init @ vec) / denom)
    mean, m2 = moments[0], moments[1]
    grid = grid_spec.build(mean)
    u = expm_action_grid(chain.S, grid, init)
    pdf = (u @ w) / denom
    cdf = ((u - init) @ y) / denom
    cdf = np.maximum.accumulate(np.clip(cdf, 0.0, 1.0))
    table = DistributionTable(grid, pdf, cdf, mean, m2, m2 - mean * mean,
                              meta=meta)
    return table, tuple(moments)


def summarize(chain: AbsorbingChain, grid_spec: GridSpec = GridSpec()) -> AoiSummary:
    """Evaluate all summary quantities of a cycle chain.

    Each table uses its own grid scaled to the respective mean. The
    result is a pure function of the chain and grid spec; identical
    inputs give bit-identical output.
    """
    base_meta = dict(chain.meta)
    aoi_table, aoi_moments = _table(chain, "aoi", grid_spec,
                                    {**base_meta, "kind": "aoi"})
    paoi_table, paoi_moments = _table(chain, "paoi", grid_spec,
                                      {**base_meta, "kind": "paoi"})
    return AoiSummary(
        mean_aoi=aoi_moments[0],
        mean_paoi=paoi_moments[0],
        aoi_moments=aoi_moments,
        paoi_moments=paoi_moments,
        p_success=absorption_probability(chain, chain.success_col),
        aoi_table=aoi_table,
        paoi_table=paoi_table,
        meta=base_meta,
    )
