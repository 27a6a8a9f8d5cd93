"""Meshes for the truncated cylinder Omega x (0, Y).

The base domain Omega is the unit interval or unit square.  The extended
direction is partitioned by a graded rule that clusters points at y = 0,
where the solution of the weighted extension problem loses regularity.  A
TensorMesh is the tensor product of a base mesh and a graded interval; the
lateral boundary and the top cap carry homogeneous Dirichlet conditions
while the trace plane y = 0 stays free.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np


def _readonly(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a, dtype=float)
    a.flags.writeable = False
    return a


@dataclass(frozen=True)
class GradedInterval:
    """Partition of [0, height] with points (k/M)^grading * height."""

    points: np.ndarray
    grading: float
    height: float

    @property
    def num_cells(self) -> int:
        return len(self.points) - 1

    @property
    def widths(self) -> np.ndarray:
        return np.diff(self.points)


def graded_points(num_cells: int, grading: float, height: float) -> GradedInterval:
    """Build the graded partition y_k = (k/M)^grading * height, k = 0..M."""
    if num_cells < 1:
        raise ValueError(f"need at least one cell, got {num_cells}")
    if grading <= 0.0:
        raise ValueError(f"grading exponent must be positive, got {grading}")
    if height <= 0.0:
        raise ValueError(f"height must be positive, got {height}")
    k = np.arange(num_cells + 1, dtype=float)
    pts = (k / num_cells) ** grading * height
    return GradedInterval(points=_readonly(pts), grading=float(grading),
                          height=float(height))


def default_grading(s: float) -> float:
    """Grading exponent 1.05 * 3/(2s), strictly above the 3/(2s) threshold."""
    if not 0.0 < s < 1.0:
        raise ValueError(f"fractional order must lie in (0, 1), got {s}")
    return 1.05 * 3.0 / (2.0 * s)


def truncation_height(num_base_cells: int) -> float:
    """Cylinder height 1 + log(#base cells)/3."""
    if num_base_cells < 1:
        raise ValueError(f"need at least one base cell, got {num_base_cells}")
    return 1.0 + math.log(num_base_cells) / 3.0


@dataclass(frozen=True)
class BaseMesh:
    """Conforming mesh of the unit interval (dim 1) or unit square (dim 2).

    1D meshes may be non-uniform (they support bisection refinement) and
    carry a per-cell generation counter.  2D meshes are structured tensor
    grids, refined only uniformly.
    """

    dim: int
    xs: np.ndarray
    ys: np.ndarray | None = None
    generations: np.ndarray | None = None

    @property
    def num_vertices(self) -> int:
        if self.dim == 1:
            return len(self.xs)
        return len(self.xs) * len(self.ys)

    @property
    def num_cells(self) -> int:
        if self.dim == 1:
            return len(self.xs) - 1
        return (len(self.xs) - 1) * (len(self.ys) - 1)

    def vertex_coords(self) -> np.ndarray:
        """Vertex coordinates, shape (num_vertices, dim), x-major for dim 2."""
        if self.dim == 1:
            return self.xs[:, None]
        X, Y = np.meshgrid(self.xs, self.ys, indexing="ij")
        return np.column_stack([X.ravel(), Y.ravel()])

    def boundary_vertex_mask(self) -> np.ndarray:
        if self.dim == 1:
            mask = np.zeros(len(self.xs), dtype=bool)
            mask[0] = mask[-1] = True
            return mask
        bx = np.zeros(len(self.xs), dtype=bool)
        bx[0] = bx[-1] = True
        by = np.zeros(len(self.ys), dtype=bool)
        by[0] = by[-1] = True
        return (bx[:, None] | by[None, :]).ravel()

    def cell_widths(self) -> np.ndarray:
        if self.dim != 1:
            raise ValueError("cell_widths is a 1D accessor")
        return np.diff(self.xs)


def uniform_base(dim: int, cells_per_side: int) -> BaseMesh:
    """Uniform partition of (0,1)^dim with cells_per_side cells per side."""
    if dim not in (1, 2):
        raise ValueError(f"unsupported dimension {dim}")
    if cells_per_side < 1:
        raise ValueError(f"need at least one cell, got {cells_per_side}")
    xs = _readonly(np.linspace(0.0, 1.0, cells_per_side + 1))
    if dim == 1:
        gens = np.zeros(cells_per_side, dtype=int)
        gens.flags.writeable = False
        return BaseMesh(dim=1, xs=xs, generations=gens)
    return BaseMesh(dim=2, xs=xs, ys=xs)


def bisect_marked(base: BaseMesh, marked) -> BaseMesh:
    """Bisect the marked cells of a 1D mesh at their midpoints."""
    if base.dim != 1:
        raise ValueError("bisection refinement is only supported for dim 1")
    marked = set(int(c) for c in marked)
    if marked and (min(marked) < 0 or max(marked) >= base.num_cells):
        raise ValueError("marked cell index out of range")
    xs = [base.xs[0]]
    gens = []
    old_gens = (base.generations if base.generations is not None
                else np.zeros(base.num_cells, dtype=int))
    for c in range(base.num_cells):
        left, right = base.xs[c], base.xs[c + 1]
        if c in marked:
            xs.extend([0.5 * (left + right), right])
            gens.extend([old_gens[c] + 1] * 2)
        else:
            xs.append(right)
            gens.append(old_gens[c])
    gens = np.asarray(gens, dtype=int)
    gens.flags.writeable = False
    return BaseMesh(dim=1, xs=_readonly(np.asarray(xs)), generations=gens)


@dataclass(frozen=True)
class TensorMesh:
    """Tensor product of a base mesh and a graded interval.

    Full nodes are numbered vertex-major, level-minor: node(v, l) =
    v*(M+1) + l.  Free DoFs keep that ordering, so the DoFs of one vertical
    line (fixed interior base vertex, levels 0..M-1) are contiguous.
    """

    base: BaseMesh
    interval: GradedInterval
    dirichlet_mask: np.ndarray = field(repr=False)
    free_index: np.ndarray = field(repr=False)
    free_nodes: np.ndarray = field(repr=False)
    interior_vertices: np.ndarray = field(repr=False)

    @property
    def num_levels(self) -> int:
        return self.interval.num_cells + 1

    @property
    def num_full_nodes(self) -> int:
        return self.base.num_vertices * self.num_levels

    @property
    def num_free(self) -> int:
        return len(self.free_nodes)

    @property
    def num_elements(self) -> int:
        return self.base.num_cells * self.interval.num_cells

    @property
    def levels_per_line(self) -> int:
        return self.interval.num_cells

    def node_id(self, vertex: int, level: int) -> int:
        return vertex * self.num_levels + level

    def dof_map(self, vertex: int, level: int) -> int:
        """Free DoF id of (vertex, level), or -1 if Dirichlet."""
        return int(self.free_index[self.node_id(vertex, level)])

    @property
    def trace_dofs(self) -> np.ndarray:
        """Free DoF ids on the trace plane y = 0 (in interior-vertex order)."""
        return np.arange(len(self.interior_vertices)) * self.levels_per_line

    def line_slices(self) -> list[slice]:
        """Free-DoF index ranges of the vertical lines, one per interior vertex."""
        m = self.levels_per_line
        return [slice(i * m, (i + 1) * m) for i in range(len(self.interior_vertices))]

    def full_values(self, v: np.ndarray) -> np.ndarray:
        """Scatter a free-DoF vector to all nodes, zeros on Dirichlet nodes."""
        out = np.zeros(self.num_full_nodes)
        out[self.free_nodes] = v
        return out


def build_tensor(base: BaseMesh, interval: GradedInterval) -> TensorMesh:
    """Assemble the DoF bookkeeping of the cylinder mesh."""
    levels = interval.num_cells + 1
    boundary_v = base.boundary_vertex_mask()
    # Dirichlet: lateral boundary (all levels) and the top cap level M.
    mask = np.repeat(boundary_v, levels).copy()
    top = np.zeros(levels, dtype=bool)
    top[-1] = True
    mask |= np.tile(top, base.num_vertices)
    free_nodes = np.flatnonzero(~mask)
    free_index = np.full(base.num_vertices * levels, -1, dtype=int)
    free_index[free_nodes] = np.arange(len(free_nodes))
    interior = np.flatnonzero(~boundary_v)
    mesh = TensorMesh(base=base, interval=interval,
                      dirichlet_mask=mask, free_index=free_index,
                      free_nodes=free_nodes, interior_vertices=interior)
    # Line contiguity backs the smoother and trace indexing; guard it here.
    m = interval.num_cells
    if len(interior):
        first_line = free_index[interior[0] * levels: interior[0] * levels + m]
        assert first_line[0] == 0 and first_line[-1] == m - 1
    return mesh
