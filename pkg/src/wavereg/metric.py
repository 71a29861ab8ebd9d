"""Mask-aware joint-histogram mutual information and Pearson correlation.

MI is reported in bits (log base 2). Binning is hard: each masked pixel
pair contributes one count to exactly one cell, with the bin edges spread
linearly over each image's masked intensity range (top edge inclusive).
Ranges are recomputed from the masked region at every evaluation so warp
fill values never stretch the bins.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass
class MetricConfig:
    histogram_bins: int = 50
    use_all_pixels: bool = True
    num_spatial_samples: int = 500
    sample_seed: int = 0

    def validate(self) -> None:
        if self.histogram_bins < 2:
            raise ValueError(f"histogram_bins must be >= 2, got {self.histogram_bins}")
        if not self.use_all_pixels and self.num_spatial_samples < self.histogram_bins:
            raise ValueError("num_spatial_samples must be >= histogram_bins")


@dataclass
class JointHistogram:
    counts: np.ndarray  # [fixed_bin, moving_bin]
    bins: int
    fixed_range: tuple[float, float]
    moving_range: tuple[float, float]
    total: float
    degenerate: bool = False


def joint_histogram(
    fixed: np.ndarray,
    moving: np.ndarray,
    mask: np.ndarray,
    config: MetricConfig | None = None,
) -> JointHistogram:
    """Accumulate the joint intensity histogram over the masked overlap."""
    config = config or MetricConfig()
    config.validate()
    fixed = np.asarray(fixed, dtype=np.float64)
    moving = np.asarray(moving, dtype=np.float64)
    mask = np.asarray(mask, dtype=bool)
    if fixed.shape != moving.shape or fixed.shape != mask.shape:
        raise ValueError(
            f"dimension mismatch: {fixed.shape} vs {moving.shape} vs {mask.shape}"
        )
    fvals = fixed[mask]
    mvals = moving[mask]
    if fvals.size == 0:
        raise ValueError("no overlap: empty mask")
    if not config.use_all_pixels and fvals.size > config.num_spatial_samples:
        rng = np.random.default_rng(config.sample_seed)
        idx = rng.choice(fvals.size, size=config.num_spatial_samples, replace=False)
        fvals = fvals[idx]
        mvals = mvals[idx]
    fmin, fmax = float(fvals.min()), float(fvals.max())
    mmin, mmax = float(mvals.min()), float(mvals.max())
    bins = config.histogram_bins
    if fmin == fmax or mmin == mmax:
        counts = np.zeros((bins, bins))
        counts[0, 0] = fvals.size
        return JointHistogram(
            counts=counts, bins=bins, fixed_range=(fmin, fmax),
            moving_range=(mmin, mmax), total=float(fvals.size), degenerate=True,
        )
    counts, _, _ = np.histogram2d(
        fvals, mvals, bins=bins, range=[[fmin, fmax], [mmin, mmax]]
    )
    return JointHistogram(
        counts=counts, bins=bins, fixed_range=(fmin, fmax),
        moving_range=(mmin, mmax), total=float(counts.sum()),
    )


def mutual_information(hist: JointHistogram) -> float:
    """MI in bits: sum p(l,k) log2[p(l,k) / (p_Z(k) p_N(l))], zero cells skipped."""
    if hist.degenerate:
        return 0.0
    p = hist.counts / hist.total
    p_fixed = p.sum(axis=1)
    p_moving = p.sum(axis=0)
    nz = p > 0
    outer = np.outer(p_fixed, p_moving)
    return float(np.sum(p[nz] * np.log2(p[nz] / outer[nz])))


def mi_between(
    fixed: np.ndarray,
    moving: np.ndarray,
    mask: np.ndarray,
    config: MetricConfig | None = None,
) -> float:
    """Convenience: joint histogram then MI."""
    return mutual_information(joint_histogram(fixed, moving, mask, config))


def correlation_coefficient(a: np.ndarray, b: np.ndarray, mask: np.ndarray) -> float:
    """Pearson r between the masked intensities of two images."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    mask = np.asarray(mask, dtype=bool)
    if a.shape != b.shape or a.shape != mask.shape:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape} vs {mask.shape}")
    x = a[mask]
    y = b[mask]
    if x.size < 2:
        raise ValueError("need at least 2 masked pixels for correlation")
    dx = x - x.mean()
    dy = y - y.mean()
    denom = np.sqrt(np.sum(dx * dx)) * np.sqrt(np.sum(dy * dy))
    if denom == 0:
        raise ValueError("undefined correlation: zero variance over the mask")
    r = float(np.sum(dx * dy) / denom)
    return min(1.0, max(-1.0, r))
