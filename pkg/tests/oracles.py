"""Independent oracles for the analytic similarity engine.

Everything here avoids the polygon-clipping code path entirely: cells are
queried through raw cross-product membership tests and integrals are
approximated by dense pixel grids or Monte Carlo draws.  Agreement between
these estimates and the exact engine is what the tests assert.
"""

from __future__ import annotations

import numpy as np


def inside_polygon(pts: np.ndarray, vertices: np.ndarray, eps: float = 1e-12) -> np.ndarray:
    """Closed membership for a CCW convex polygon via edge cross products."""
    v = np.asarray(vertices, dtype=float)
    e = np.roll(v, -1, axis=0) - v
    d = pts[:, None, :] - v[None, :, :]
    cross = e[None, :, 0] * d[:, :, 1] - e[None, :, 1] * d[:, :, 0]
    return (cross >= -eps).all(axis=1)


def locate_cells(pts: np.ndarray, dist) -> np.ndarray:
    """Lowest-index containing cell for each point (-1 when none)."""
    out = np.full(pts.shape[0], -1, dtype=int)
    pending = np.arange(pts.shape[0])
    for i, cell in enumerate(dist.partition.cells):
        if pending.size == 0:
            break
        hit = inside_polygon(pts[pending], cell.vertices, eps=1e-9)
        out[pending[hit]] = i
        pending = pending[~hit]
    return out


def _pixel_grid(domain, resolution: int) -> tuple[np.ndarray, float]:
    xmin, xmax, ymin, ymax = domain
    xs = xmin + (xmax - xmin) * (np.arange(resolution) + 0.5) / resolution
    ys = ymin + (ymax - ymin) * (np.arange(resolution) + 0.5) / resolution
    gx, gy = np.meshgrid(xs, ys, indexing="ij")
    pts = np.column_stack([gx.ravel(), gy.ravel()])
    pixel_area = (xmax - xmin) * (ymax - ymin) / resolution**2
    return pts, pixel_area


def mass_table(target, source, pts: np.ndarray, weights: np.ndarray,
               t_idx: np.ndarray, s_idx: np.ndarray) -> np.ndarray:
    """Approximate per-source-cell target-label masses from located points."""
    k_t = target.num_classes
    labels = np.asarray(target.cell_labels)[t_idx]
    n_s = len(source.partition.cells)
    flat = s_idx * k_t + labels
    table = np.bincount(flat, weights=weights, minlength=n_s * k_t)
    return table.reshape(n_s, k_t)


def brute_force_similarity(target, source, resolution: int = 2000,
                           tie_tol: float = 5e-3) -> tuple[float, float]:
    """(ts, ats) by dense pixel integration over the shared domain.

    tie_tol is deliberately coarse: pixelization perturbs exactly tied
    masses by O(boundary length / resolution).
    """
    pts, pixel_area = _pixel_grid(target.partition.domain, resolution)
    t_idx = locate_cells(pts, target)
    s_idx = locate_cells(pts, source)
    keep = (t_idx >= 0) & (s_idx >= 0)
    dens = np.asarray(target.cell_mass) / np.asarray(target.partition.cell_areas())
    weights = dens[t_idx[keep]] * pixel_area
    table = mass_table(target, source, pts[keep], weights, t_idx[keep], s_idx[keep])
    return _ts_ats_from_table(table, tie_tol)


def monte_carlo_similarity(target, source, n_points: int, rng,
                           tie_tol: float = 5e-3) -> tuple[float, float]:
    """(ts, ats) by uniform Monte Carlo under a uniform target marginal."""
    xmin, xmax, ymin, ymax = target.partition.domain
    pts = np.column_stack([
        rng.uniform(xmin, xmax, n_points),
        rng.uniform(ymin, ymax, n_points),
    ])
    t_idx = locate_cells(pts, target)
    s_idx = locate_cells(pts, source)
    keep = (t_idx >= 0) & (s_idx >= 0)
    dens = np.asarray(target.cell_mass) / np.asarray(target.partition.cell_areas())
    domain_area = (xmax - xmin) * (ymax - ymin)
    weights = dens[t_idx[keep]] * domain_area / n_points
    table = mass_table(target, source, pts[keep], weights, t_idx[keep], s_idx[keep])
    return _ts_ats_from_table(table, tie_tol)


def _ts_ats_from_table(table: np.ndarray, tie_tol: float) -> tuple[float, float]:
    best = table.max(axis=1)
    ts_val = float(best.sum())
    if table.shape[1] > 1:
        top2 = np.sort(table, axis=1)[:, -2]
    else:
        top2 = np.full(table.shape[0], -np.inf)
    tied = best - top2 <= tie_tol
    ats_val = float(best[~tied].sum())
    return ts_val, ats_val
