"""P1 finite-element pressure solve for the total-velocity formulation.

The pressure equation is the elliptic balance

    -div(K lam(s, c) grad p) = q,

with no-flow (homogeneous Neumann) walls and a balanced pair of corner
point sources: injection +Q at (0, 0), production -Q at (1, 1).  Each grid
cell is split along its anti-diagonal into two P1 triangles, and the
element coefficient K*lam is taken as the arithmetic mean of its three
vertex values.  The assembled operator is symmetric positive semidefinite
with the constant null vector; the solve pins the pressure to zero at the
production corner and runs preconditioned conjugate gradients on the
reduced system.

The total velocity v = -K lam grad p is recovered from the P1 solution
triangle by triangle and averaged to nodes, which is the field the
characteristic tracing in the transport step consumes.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import sparse

from .grids import Grid2
from .linsolve import SparseSystem, solve_cg

__all__ = ["WellConfig", "node_areas", "injection_density",
           "assemble_pressure", "solve_pressure", "recover_velocity"]


@dataclass(frozen=True)
class WellConfig:
    """Quarter five-spot well pair: inject at (0, 0), produce at (1, 1).

    Both wells carry the same rate Q, so the discrete source terms always
    sum to zero.  With radius = 0 each well is a point source lumped to
    its corner node.  A positive radius spreads the same total rate over a
    smooth bump of that physical size instead; the bump is grid
    independent, which keeps the velocity field bounded under refinement
    and is what the convergence studies use.
    """

    rate: float
    c_injected: float = 0.0
    radius: float = 0.0

    def __post_init__(self):
        if self.rate < 0.0:
            raise ValueError("well rate must be nonnegative")
        if self.c_injected < 0.0:
            raise ValueError("injected concentration must be nonnegative")
        if not 0.0 <= self.radius <= 0.5:
            raise ValueError("well radius must lie in [0, 0.5]")


def _nodal(values):
    # accept a Field or a bare array at module boundaries
    return np.asarray(getattr(values, "data", values), dtype=float)


def node_areas(grid: Grid2) -> np.ndarray:
    """Trapezoidal control area of every node (boundary nodes own less)."""
    wx = np.ones(grid.nx + 1)
    wx[0] = wx[-1] = 0.5
    wy = np.ones(grid.ny + 1)
    wy[0] = wy[-1] = 0.5
    return np.outer(wy, wx) * (grid.hx * grid.hy)


def _bump_density(grid: Grid2, cx: float, cy: float, radius: float,
                  rate: float) -> np.ndarray:
    """Nodal density of a cos^2 bump at (cx, cy), normalized so that the
    area-weighted nodal sum equals the rate exactly."""
    X, Y = grid.xy
    r = np.hypot(X - cx, Y - cy)
    shape = np.where(r < radius, np.cos(np.pi * r / (2.0 * radius)) ** 2, 0.0)
    weight = float(np.sum(shape * node_areas(grid)))
    if weight <= 0.0:
        raise ValueError("well bump covers no grid node; enlarge the radius "
                         "or refine the grid")
    return rate * shape / weight


def injection_density(grid: Grid2, wells: WellConfig | None) -> np.ndarray:
    """Nodal source density of the injection well (zero array if no well).

    Point wells keep the historical convention of a density Q/(hx*hy)
    lumped to the corner node; distributed wells use the normalized bump.
    """
    sigma = np.zeros(grid.shape)
    if wells is None or wells.rate == 0.0:
        return sigma
    if wells.radius == 0.0:
        sigma[0, 0] = wells.rate / (grid.hx * grid.hy)
        return sigma
    return _bump_density(grid, 0.0, 0.0, wells.radius, wells.rate)


def _element_geometry(grid: Grid2):
    """Reference stiffness blocks for the two triangle orientations."""
    hx, hy = grid.hx, grid.hy
    area = hx * hy / 2.0
    gx2, gy2 = 1.0 / hx ** 2, 1.0 / hy ** 2
    lower = area * np.array([
        [gx2 + gy2, -gx2, -gy2],
        [-gx2, gx2, 0.0],
        [-gy2, 0.0, gy2],
    ])
    upper = area * np.array([
        [gy2, -gy2, 0.0],
        [-gy2, gx2 + gy2, -gx2],
        [0.0, -gx2, gx2],
    ])
    return lower, upper


def _element_coefficients(grid: Grid2, s, c, model, K):
    """Per-triangle K*lam, the arithmetic mean of the three vertex values."""
    _, _, lam = model.mobilities(_nodal(s), _nodal(c))
    coef = (np.asarray(K, dtype=float) * lam).ravel()
    tris = grid.triangles
    coef_tri = coef[tris].mean(axis=1)
    if np.any(coef_tri <= 0.0) or not np.all(np.isfinite(coef_tri)):
        raise ValueError("element coefficient K*lam must be positive and finite")
    return coef_tri


def assemble_pressure(grid: Grid2, s, c, model, wells: WellConfig | None = None,
                      K=1.0) -> SparseSystem:
    """Assemble the pure-Neumann pressure system with corner well sources."""
    tris = grid.triangles
    coef_tri = _element_coefficients(grid, s, c, model, K)
    lower, upper = _element_geometry(grid)
    blocks = np.empty((tris.shape[0], 3, 3))
    blocks[0::2] = lower
    blocks[1::2] = upper
    blocks *= coef_tri[:, None, None]

    rows = np.broadcast_to(tris[:, :, None], blocks.shape)
    cols = np.broadcast_to(tris[:, None, :], blocks.shape)
    n = grid.nnodes
    A = sparse.coo_matrix((blocks.ravel(), (rows.ravel(), cols.ravel())),
                          shape=(n, n)).tocsr()

    rhs = np.zeros(n)
    if wells is not None and wells.rate != 0.0:
        if wells.radius == 0.0:
            rhs[grid.node_id(0, 0)] += wells.rate
            rhs[grid.node_id(grid.nx, grid.ny)] -= wells.rate
        else:
            areas = node_areas(grid)
            inj = _bump_density(grid, 0.0, 0.0, wells.radius, wells.rate)
            prod = _bump_density(grid, 1.0, 1.0, wells.radius, wells.rate)
            rhs += ((inj - prod) * areas).ravel()
        if abs(rhs.sum()) > 1e-12 * wells.rate:
            raise ValueError("well sources do not balance")
    return SparseSystem(A, rhs, pure_neumann=True)


def solve_pressure(system: SparseSystem, grid: Grid2, tol: float = 1e-10,
                   max_iter: int | None = None, x0=None) -> np.ndarray:
    """Solve the gauged system; returns nodal pressure of shape (ny+1, nx+1).

    The production corner is pinned to zero, which removes the constant
    null space and fixes the gauge every caller shares.
    """
    n = grid.nnodes
    pin = grid.node_id(grid.nx, grid.ny)
    keep = np.arange(n) != pin
    A_red = system.matrix[keep][:, keep]
    b_red = system.rhs[keep]
    guess = None
    if x0 is not None:
        x0 = _nodal(x0).ravel()
        guess = x0[keep] - x0[pin]
    x_red = solve_cg(A_red, b_red, tol=tol, max_iter=max_iter, x0=guess)
    p = np.zeros(n)
    p[keep] = x_red
    return p.reshape(grid.shape)


def recover_velocity(grid: Grid2, p, s, c, model, K=1.0):
    """Total velocity -K lam grad p, averaged from triangles to nodes.

    The per-triangle P1 gradient is constant; each node receives the mean
    of the velocities of its adjacent triangles.  Returns (vx, vy) arrays
    of shape (ny+1, nx+1).
    """
    coef_tri = _element_coefficients(grid, s, c, model, K)
    tris = grid.triangles
    pv = _nodal(p).ravel()[tris]
    hx, hy = grid.hx, grid.hy

    gx = np.empty(tris.shape[0])
    gy = np.empty(tris.shape[0])
    # lower triangles (v00, v10, v01), upper triangles (v10, v11, v01)
    gx[0::2] = (pv[0::2, 1] - pv[0::2, 0]) / hx
    gy[0::2] = (pv[0::2, 2] - pv[0::2, 0]) / hy
    gx[1::2] = (pv[1::2, 1] - pv[1::2, 2]) / hx
    gy[1::2] = (pv[1::2, 1] - pv[1::2, 0]) / hy

    vx_tri = -coef_tri * gx
    vy_tri = -coef_tri * gy

    n = grid.nnodes
    sums_x = np.zeros(n)
    sums_y = np.zeros(n)
    counts = np.zeros(n)
    flat = tris.ravel()
    np.add.at(sums_x, flat, np.repeat(vx_tri, 3))
    np.add.at(sums_y, flat, np.repeat(vy_tri, 3))
    np.add.at(counts, flat, 1.0)
    vx = (sums_x / counts).reshape(grid.shape)
    vy = (sums_y / counts).reshape(grid.shape)
    return vx, vy
