"""Weighted 2-d kernel density estimation and highest-density regions.

The density is a product-Gaussian KDE evaluated on a rectangular grid.
Bandwidths follow Silverman's rule per coordinate with the Kish effective
sample size substituted for the sample count, which for two dimensions
reduces to ``sd * n_eff**(-1/6)``. The highest-density region (HDR) for a
target mass is the set of grid cells above the largest density threshold
whose cells jointly hold at least that share of the (grid-normalized) KDE
mass.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .ensembles import effective_sample_size
from .exceptions import DegeneracyError
from .validation import check_fraction, check_weights


@dataclass(frozen=True)
class HdrRegion:
    """Grid representation of a highest-density region.

    ``density`` holds the KDE evaluated at the cell centres (x varies along
    axis 0), ``mask`` flags member cells, ``threshold`` is the density cut
    and ``mass`` the share of grid mass actually inside the region.
    """

    x_centers: np.ndarray
    y_centers: np.ndarray
    density: np.ndarray
    mask: np.ndarray
    threshold: float
    target_mass: float
    mass: float

    @property
    def cell_area(self) -> float:
        return float(
            (self.x_centers[1] - self.x_centers[0])
            * (self.y_centers[1] - self.y_centers[0])
        )

    def area(self) -> float:
        """Total area of the member cells."""
        return float(self.mask.sum()) * self.cell_area

    def contains(self, point) -> bool:
        """Whether the cell holding ``point`` belongs to the region.

        Points outside the grid are outside the region by definition.
        """
        x, y = float(point[0]), float(point[1])
        i = _cell_index(self.x_centers, x)
        j = _cell_index(self.y_centers, y)
        if i is None or j is None:
            return False
        return bool(self.mask[i, j])

    def to_json(self) -> str:
        payload = {
            "grid": {
                "x_centers": self.x_centers.tolist(),
                "y_centers": self.y_centers.tolist(),
            },
            "threshold": self.threshold,
            "target_mass": self.target_mass,
            "mass": self.mass,
            "mask": self.mask.astype(int).tolist(),
        }
        return json.dumps(payload)

    @classmethod
    def from_json(cls, text: str) -> "HdrRegion":
        payload = json.loads(text)
        x = np.asarray(payload["grid"]["x_centers"], dtype=float)
        y = np.asarray(payload["grid"]["y_centers"], dtype=float)
        mask = np.asarray(payload["mask"], dtype=bool)
        return cls(
            x_centers=x,
            y_centers=y,
            density=np.zeros_like(mask, dtype=float),
            mask=mask,
            threshold=float(payload["threshold"]),
            target_mass=float(payload["target_mass"]),
            mass=float(payload["mass"]),
        )


def _cell_index(centers: np.ndarray, value: float) -> int | None:
    half = 0.5 * (centers[1] - centers[0])
    if value < centers[0] - half or value > centers[-1] + half:
        return None
    return int(np.clip(np.searchsorted(centers, value - half), 0, centers.size - 1))


def _silverman_bandwidths(samples, weights, n_eff):
    mean = weights @ samples
    var = weights @ (samples - mean) ** 2
    if np.any(var <= 0.0):
        raise DegeneracyError("zero variance in a KDE coordinate")
    return np.sqrt(var) * n_eff ** (-1.0 / 6.0)


def weighted_kde_grid(
    samples: np.ndarray,
    weights: np.ndarray | None = None,
    grid_size: int = 200,
    bandwidth=None,
    span_bandwidths: float = 3.0,
    x_range: tuple[float, float] | None = None,
    y_range: tuple[float, float] | None = None,
):
    """Evaluate a weighted product-Gaussian KDE on a grid.

    Returns ``(x_centers, y_centers, density)`` with the density normalized
    to unit mass over the grid. The grid spans the sample range extended by
    ``span_bandwidths`` bandwidths per side unless explicit ranges are given.
    """
    samples = np.asarray(samples, dtype=float)
    if samples.ndim != 2 or samples.shape[1] != 2:
        raise ValueError("samples must be an (n, 2) array")
    n = samples.shape[0]
    if weights is None:
        weights = np.full(n, 1.0 / n)
    else:
        weights = check_weights(weights)
        total = weights.sum()
        if total <= 0.0:
            raise DegeneracyError("KDE weights sum to zero")
        weights = weights / total
    n_eff = effective_sample_size(weights)
    if n_eff < 10.0:
        raise DegeneracyError(
            f"need at least 10 effective samples for a KDE, got {n_eff:.2f}"
        )
    if bandwidth is None:
        bw = _silverman_bandwidths(samples, weights, n_eff)
    else:
        bw = np.broadcast_to(np.asarray(bandwidth, dtype=float), (2,)).copy()
        if np.any(bw <= 0.0):
            raise ValueError("bandwidth must be positive")

    if x_range is None:
        x_range = (
            samples[:, 0].min() - span_bandwidths * bw[0],
            samples[:, 0].max() + span_bandwidths * bw[0],
        )
    if y_range is None:
        y_range = (
            samples[:, 1].min() - span_bandwidths * bw[1],
            samples[:, 1].max() + span_bandwidths * bw[1],
        )
    x_centers = np.linspace(*x_range, grid_size)
    y_centers = np.linspace(*y_range, grid_size)

    # Product kernel: density = A^T diag(w) B with per-coordinate kernels.
    zx = (x_centers[None, :] - samples[:, 0][:, None]) / bw[0]
    zy = (y_centers[None, :] - samples[:, 1][:, None]) / bw[1]
    kx = np.exp(-0.5 * zx * zx) / (bw[0] * math.sqrt(2.0 * math.pi))
    ky = np.exp(-0.5 * zy * zy) / (bw[1] * math.sqrt(2.0 * math.pi))
    density = (kx * weights[:, None]).T @ ky
    cell = (x_centers[1] - x_centers[0]) * (y_centers[1] - y_centers[0])
    total_mass = density.sum() * cell
    if total_mass <= 0.0:
        raise DegeneracyError("KDE mass vanished on the evaluation grid")
    return x_centers, y_centers, density / total_mass


def kde_hdr(
    samples,
    weights=None,
    mass: float = 0.8,
    grid_size: int = 200,
    bandwidth=None,
    span_bandwidths: float = 3.0,
    x_range=None,
    y_range=None,
) -> HdrRegion:
    """Highest-density region of a weighted 2-d sample at a target mass.

    The region is the smallest-threshold set of grid cells whose mass
    reaches ``mass``; ties at the threshold are included, so the covered
    mass lies in ``[mass, mass + max cell mass]``.
    """
    mass = check_fraction("mass", mass, inclusive_upper=False)
    x_centers, y_centers, density = weighted_kde_grid(
        samples,
        weights,
        grid_size=grid_size,
        bandwidth=bandwidth,
        span_bandwidths=span_bandwidths,
        x_range=x_range,
        y_range=y_range,
    )
    cell = (x_centers[1] - x_centers[0]) * (y_centers[1] - y_centers[0])
    flat = np.sort(density.ravel())[::-1]
    cum = np.cumsum(flat) * cell
    k = int(np.searchsorted(cum, mass))
    k = min(k, flat.size - 1)
    threshold = float(flat[k])
    mask = density >= threshold
    covered = float(density[mask].sum() * cell)
    return HdrRegion(
        x_centers=x_centers,
        y_centers=y_centers,
        density=density,
        mask=mask,
        threshold=threshold,
        target_mass=mass,
        mass=covered,
    )


def hdr_jaccard(
    samples_a,
    samples_b,
    weights_a=None,
    weights_b=None,
    mass: float = 0.8,
    grid_size: int = 200,
) -> float:
    """Jaccard overlap of two HDRs evaluated on a shared grid.

    Both KDEs are recomputed on the union extent of the two individual
    grids so the cell masks are comparable.
    """
    region_a = kde_hdr(samples_a, weights_a, mass=mass, grid_size=grid_size)
    region_b = kde_hdr(samples_b, weights_b, mass=mass, grid_size=grid_size)
    x_range = (
        min(region_a.x_centers[0], region_b.x_centers[0]),
        max(region_a.x_centers[-1], region_b.x_centers[-1]),
    )
    y_range = (
        min(region_a.y_centers[0], region_b.y_centers[0]),
        max(region_a.y_centers[-1], region_b.y_centers[-1]),
    )
    shared_a = kde_hdr(
        samples_a, weights_a, mass=mass, grid_size=grid_size,
        x_range=x_range, y_range=y_range,
    )
    shared_b = kde_hdr(
        samples_b, weights_b, mass=mass, grid_size=grid_size,
        x_range=x_range, y_range=y_range,
    )
    inter = np.logical_and(shared_a.mask, shared_b.mask).sum()
    union = np.logical_or(shared_a.mask, shared_b.mask).sum()
    if union == 0:
        return 0.0
    return float(inter) / float(union)
