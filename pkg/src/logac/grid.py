"""Cell-centered rectangular meshes with homogeneous Neumann boundaries.

Fields are plain float64 numpy arrays whose trailing `dim` axes are the
grid axes; any leading axes are batch dimensions (replicates, coupled
levels) and every operation here broadcasts over them.  Ghost cells
mirror the adjacent interior value, which makes the discrete Laplacian
symmetric, negative semidefinite, and exactly summation-by-parts
compatible with the face-based gradient used in the norms.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import scipy.fft

from . import potential as pot

_MAGIC = b"ACF1"


@dataclass(frozen=True)
class Grid:
    extent: tuple[float, ...]
    cells: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "extent", tuple(float(L) for L in self.extent))
        object.__setattr__(self, "cells", tuple(int(n) for n in self.cells))
        if len(self.extent) != len(self.cells):
            raise ValueError("extent and cells must have the same length")
        if len(self.cells) not in (1, 2):
            raise ValueError(f"only 1-D and 2-D grids are supported, got dim {len(self.cells)}")
        if any(L <= 0 for L in self.extent):
            raise ValueError(f"grid extent must be positive, got {self.extent}")
        if any(n < 2 for n in self.cells):
            raise ValueError(f"grid needs at least 2 cells per axis, got {self.cells}")

    @property
    def dim(self) -> int:
        return len(self.cells)

    @property
    def shape(self) -> tuple[int, ...]:
        return self.cells

    @property
    def spacing(self) -> tuple[float, ...]:
        return tuple(L / n for L, n in zip(self.extent, self.cells))

    @property
    def cell_volume(self) -> float:
        v = 1.0
        for h in self.spacing:
            v *= h
        return v

    @property
    def measure(self) -> float:
        v = 1.0
        for L in self.extent:
            v *= L
        return v

    def cell_centers(self, axis: int = 0) -> np.ndarray:
        h = self.spacing[axis]
        return (np.arange(self.cells[axis]) + 0.5) * h

    def zeros(self, *batch: int) -> np.ndarray:
        return np.zeros(tuple(batch) + self.shape)


def _check_field(grid: Grid, u) -> np.ndarray:
    u = np.asarray(u, dtype=float)
    if u.shape[u.ndim - grid.dim :] != grid.shape:
        raise ValueError(f"field shape {u.shape} does not end with grid shape {grid.shape}")
    return u


def _axis_slice(ndim, axis, s):
    idx = [slice(None)] * ndim
    idx[axis] = s
    return tuple(idx)


def laplacian_neumann(grid: Grid, u) -> np.ndarray:
    """Second-order mirror-ghost Laplacian, assembled from face fluxes.

    Boundary fluxes are identically zero, so the discrete integral of the
    output telescopes to round-off.
    """
    u = _check_field(grid, u)
    out = np.zeros_like(u)
    for ax in range(grid.dim):
        a = u.ndim - grid.dim + ax
        h = grid.spacing[ax]
        n = grid.cells[ax]
        flux = np.diff(u, axis=a) / h
        term = np.zeros_like(u)
        term[_axis_slice(u.ndim, a, slice(0, n - 1))] += flux
        term[_axis_slice(u.ndim, a, slice(1, n))] -= flux
        out += term / h
    return out


def _grid_axes(grid: Grid, u) -> tuple[int, ...]:
    return tuple(range(u.ndim - grid.dim, u.ndim))


def h_norm_sq(grid: Grid, u):
    u = _check_field(grid, u)
    return np.sum(u * u, axis=_grid_axes(grid, u)) * grid.cell_volume


def h_inner(grid: Grid, u, v):
    u = _check_field(grid, u)
    v = _check_field(grid, v)
    return np.sum(u * v, axis=_grid_axes(grid, np.broadcast_arrays(u, v)[0])) * grid.cell_volume


def grad_norm_sq(grid: Grid, u):
    u = _check_field(grid, u)
    total = 0.0
    for ax in range(grid.dim):
        a = u.ndim - grid.dim + ax
        g = np.diff(u, axis=a) / grid.spacing[ax]
        total = total + np.sum(g * g, axis=_grid_axes(grid, u)) * grid.cell_volume
    return total


def sup_norm(grid: Grid, u):
    u = _check_field(grid, u)
    return np.max(np.abs(u), axis=_grid_axes(grid, u))


def norms(grid: Grid, u):
    """(||u||_H^2, ||grad u||_H^2, ||u||_inf); the V-norm square is their sum of the first two."""
    return h_norm_sq(grid, u), grad_norm_sq(grid, u), sup_norm(grid, u)


def energy(grid: Grid, params: pot.PotentialParams | None, level: pot.YosidaLevel | None, u):
    """Free energy 1/2 ||grad u||^2 + integral of the (regularized) potential.

    level=None evaluates the sharp potential, which for the logarithmic
    kind requires ||u||_inf < 1; a given level substitutes the Yosida
    regularization, which never exceeds the sharp energy on (-1, 1).
    """
    u = _check_field(grid, u)
    gsq = grad_norm_sq(grid, u)
    if params is None:
        return 0.5 * gsq
    if params.kind == pot.POLYNOMIAL:
        if level is not None:
            raise ValueError("the polynomial potential is not regularized; pass level=None")
        F, _, _ = pot.potential_eval(params, u)
    elif level is None:
        if np.any(sup_norm(grid, u) >= 1.0):
            raise ValueError("sharp logarithmic energy requires ||u||_inf < 1; pass a Yosida level instead")
        F, _, _ = pot.potential_eval(params, u)
    else:
        F, _, _ = pot.regularized_potential_eval(params, level, u)
    return 0.5 * gsq + np.sum(F, axis=_grid_axes(grid, u)) * grid.cell_volume


def drift_apply(grid: Grid, params: pot.PotentialParams, level: pot.YosidaLevel, u, g_force=None):
    """A_lam(u) = -lap(u) + beta_lam(u) - 2c u - g, pointwise on the mesh."""
    if params.kind != pot.LOGARITHMIC:
        raise ValueError("drift_apply is defined for the logarithmic potential")
    u = _check_field(grid, u)
    beta_l, _, _ = pot.yosida_eval(level, u)
    out = -laplacian_neumann(grid, u) + beta_l - 2.0 * params.c * u
    if g_force is not None:
        out = out - _check_field(grid, g_force)
    return out


@lru_cache(maxsize=32)
def _helmholtz_denominator(cells: tuple, spacing: tuple, alpha: float):
    denom = np.zeros(cells)
    for ax, (n, h) in enumerate(zip(cells, spacing)):
        eig = 4.0 / h**2 * np.sin(np.pi * np.arange(n) / (2 * n)) ** 2
        shape = [1] * len(cells)
        shape[ax] = n
        denom = denom + eig.reshape(shape)
    return 1.0 + alpha * denom


def helmholtz_solve(grid: Grid, f, alpha: float) -> np.ndarray:
    """(I - alpha * lap)^(-1) f via the DCT-II eigenbasis of the mirror-ghost Laplacian."""
    f = _check_field(grid, f)
    axes = _grid_axes(grid, f)
    denom = _helmholtz_denominator(grid.cells, grid.spacing, float(alpha))
    fh = scipy.fft.dctn(f, type=2, norm="ortho", axes=axes)
    return scipy.fft.idctn(fh / denom, type=2, norm="ortho", axes=axes)


def vstar_norm_sq(grid: Grid, f):
    """Discrete dual-space norm ||f||^2_{V*} = <f, (I - lap)^(-1) f>_H."""
    return h_inner(grid, f, helmholtz_solve(grid, f, 1.0))


def save_field(path, grid: Grid, u) -> None:
    """Write one field snapshot: 32-byte header then row-major little-endian float64."""
    u = _check_field(grid, u)
    if u.shape != grid.shape:
        raise ValueError("snapshots hold a single field, not a batch")
    n1 = grid.cells[0]
    n2 = grid.cells[1] if grid.dim == 2 else 0
    h1 = grid.spacing[0]
    h2 = grid.spacing[1] if grid.dim == 2 else 0.0
    header = struct.pack("<4sIIIdd", _MAGIC, grid.dim, n1, n2, h1, h2)
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(np.ascontiguousarray(u, dtype="<f8").tobytes())


def load_field(path) -> tuple[Grid, np.ndarray]:
    with open(path, "rb") as fh:
        header = fh.read(32)
        if len(header) != 32:
            raise ValueError(f"truncated snapshot header in {path}")
        magic, dim, n1, n2, h1, h2 = struct.unpack("<4sIIIdd", header)
        if magic != _MAGIC:
            raise ValueError(f"{path} is not a field snapshot (bad magic {magic!r})")
        if dim == 1:
            cells, extent = (n1,), (n1 * h1,)
        elif dim == 2:
            cells, extent = (n1, n2), (n1 * h1, n2 * h2)
        else:
            raise ValueError(f"unsupported snapshot dimension {dim}")
        data = np.frombuffer(fh.read(), dtype="<f8")
    g = Grid(extent=extent, cells=cells)
    if data.size != np.prod(g.shape):
        raise ValueError(f"snapshot payload has {data.size} values, expected {np.prod(g.shape)}")
    return g, data.reshape(g.shape).astype(float)
