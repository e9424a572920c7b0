"""Monte-Carlo threshold-voltage variation.

Each IC instance gets one die-wide inter-die offset plus per-grid-cell
intra-die offsets; the intra part splits into a spatially correlated
Gaussian field over the grid and an independent random component.  All
gates inside a cell see the same offsets.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .layout import GridCell

MODES = ("full", "inter_only", "intra_only", "none")


@dataclass(frozen=True)
class VariationParams:
    vth_nominal: float = 0.3  # V
    inter_3sigma_pct: float = 20.0  # 3-sigma as percent of nominal
    intra_3sigma_pct: float = 15.0
    spatial_fraction: float = 0.5  # share of intra variance in the spatial field
    corr_near: float = 0.8  # correlation of adjacent cells
    corr_far: float = 0.3  # correlation at the grid diameter
    grid: tuple[int, int] = (16, 16)

    def __post_init__(self):
        if self.vth_nominal <= 0:
            raise ValueError("vth_nominal must be positive")
        if self.inter_3sigma_pct < 0 or self.intra_3sigma_pct < 0:
            raise ValueError("variation percentages must be nonnegative")
        if not 0.0 <= self.spatial_fraction <= 1.0:
            raise ValueError("spatial_fraction must be in [0, 1]")
        if not 0.0 < self.corr_far <= self.corr_near < 1.0:
            raise ValueError("need 0 < corr_far <= corr_near < 1")
        if self.grid[0] < 1 or self.grid[1] < 1:
            raise ValueError("grid dims must be >= 1")

    @property
    def sigma_inter(self) -> float:
        return self.inter_3sigma_pct / 100.0 * self.vth_nominal / 3.0

    @property
    def sigma_intra(self) -> float:
        return self.intra_3sigma_pct / 100.0 * self.vth_nominal / 3.0

    @property
    def sigma_spatial(self) -> float:
        return math.sqrt(self.spatial_fraction) * self.sigma_intra

    @property
    def sigma_random(self) -> float:
        return math.sqrt(1.0 - self.spatial_fraction) * self.sigma_intra

    @property
    def n_cells(self) -> int:
        return self.grid[0] * self.grid[1]

    def three_sigma_offset(self) -> float:
        """Worst-case |vth - nominal| the delay law must survive."""
        return 3.0 * (self.sigma_inter + self.sigma_intra)


@dataclass(frozen=True)
class CovarianceModel:
    grid: tuple[int, int]
    sigma_spatial: float
    matrix: np.ndarray  # final PSD covariance over cells, row-major
    factor: np.ndarray  # matrix == factor @ factor.T
    clip_magnitude: float  # |most negative eigenvalue| removed by repair

    def correlation(self, i: int, j: int) -> float:
        if self.sigma_spatial == 0.0:
            return 1.0 if i == j else 0.0
        return float(self.matrix[i, j] / self.sigma_spatial**2)


def _distance_correlation(params: VariationParams) -> np.ndarray:
    rows, cols = params.grid
    n = rows * cols
    r = np.arange(n) // cols
    c = np.arange(n) % cols
    d = np.hypot(r[:, None] - r[None, :], c[:, None] - c[None, :])
    diameter = math.hypot(rows - 1, cols - 1)
    if diameter <= 1.0:
        rho = np.full_like(d, params.corr_near)
    else:
        t = (d - 1.0) / (diameter - 1.0)
        rho = params.corr_near + (params.corr_far - params.corr_near) * t
    corr = np.where(d == 0.0, 1.0, rho)
    return corr


def build_covariance(params: VariationParams) -> CovarianceModel:
    """Distance-interpolated spatial covariance, repaired to PSD.

    Negative eigenvalues (possible for linear distance decay) are clipped
    to zero and the diagonal renormalized; the clip magnitude is reported
    so callers can see how far the requested model was from feasible.
    """
    corr = _distance_correlation(params)
    w, v = np.linalg.eigh(corr)
    clip = float(max(0.0, -w.min()))
    if clip > 0.0:
        w = np.clip(w, 0.0, None)
        fixed = (v * w) @ v.T
        d = np.sqrt(np.diag(fixed))
        fixed = fixed / np.outer(d, d)
    else:
        fixed = corr
    cov = params.sigma_spatial**2 * fixed
    w2, v2 = np.linalg.eigh(cov)
    w2 = np.clip(w2, 0.0, None)
    factor = v2 * np.sqrt(w2)
    return CovarianceModel(
        grid=params.grid,
        sigma_spatial=params.sigma_spatial,
        matrix=cov,
        factor=factor,
        clip_magnitude=clip,
    )


@dataclass(frozen=True)
class VthProfile:
    params: VariationParams
    mode: str
    dv_inter: float
    dv_spatial: np.ndarray  # per cell, row-major
    dv_random: np.ndarray

    @property
    def vth_nominal(self) -> float:
        return self.params.vth_nominal

    def vth_cells(self) -> np.ndarray:
        return self.vth_nominal + self.dv_inter + self.dv_spatial + self.dv_random

    def vth_at(self, cell_index: int) -> float:
        return float(
            self.vth_nominal
            + self.dv_inter
            + self.dv_spatial[cell_index]
            + self.dv_random[cell_index]
        )

    def vth_of(self, cell: GridCell) -> float:
        return self.vth_at(cell.row * self.params.grid[1] + cell.col)

    def to_csv(self) -> str:
        rows, cols = self.params.grid
        lines = ["row,col,dv_inter,dv_spatial,dv_random"]
        for i in range(rows * cols):
            lines.append(
                f"{i // cols},{i % cols},{self.dv_inter!r},"
                f"{self.dv_spatial[i]!r},{self.dv_random[i]!r}"
            )
        return "\n".join(lines) + "\n"


def sample_instance(
    model: CovarianceModel,
    params: VariationParams,
    seed: int,
    mode: str = "full",
) -> VthProfile:
    """One IC instance, reproducible from the seed.

    The same seed draws the same underlying normals for every mode, so
    restricted modes are projections of the full-mode instance.
    """
    if mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}")
    n = params.n_cells
    rng = np.random.default_rng(seed)
    z_inter = rng.standard_normal()
    z_spatial = rng.standard_normal(n)
    z_random = rng.standard_normal(n)
    inter = params.sigma_inter * z_inter if mode in ("full", "inter_only") else 0.0
    if mode in ("full", "intra_only"):
        spatial = model.factor @ z_spatial
        random = params.sigma_random * z_random
    else:
        spatial = np.zeros(n)
        random = np.zeros(n)
    return VthProfile(
        params=params,
        mode=mode,
        dv_inter=float(inter),
        dv_spatial=spatial,
        dv_random=random,
    )


def nominal_profile(params: VariationParams) -> VthProfile:
    n = params.n_cells
    return VthProfile(
        params=params,
        mode="none",
        dv_inter=0.0,
        dv_spatial=np.zeros(n),
        dv_random=np.zeros(n),
    )


def line_sample_profile(params: VariationParams, k_sigma: float = 2.0) -> VthProfile:
    """Deterministic inter-die-shifted profile used to pin down the
    expected line's second point."""
    n = params.n_cells
    return VthProfile(
        params=params,
        mode="inter_only",
        dv_inter=k_sigma * params.sigma_inter,
        dv_spatial=np.zeros(n),
        dv_random=np.zeros(n),
    )
