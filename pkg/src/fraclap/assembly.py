"""Weighted finite element assembly on the truncated cylinder.

The bilinear form integrates y^alpha against gradients of tensor-product
bilinear basis functions.  Every y-direction integral is a moment of the
weight against a polynomial and is evaluated in closed form; Gauss rules
would lose accuracy at the degenerate edge y = 0.  The x'-direction uses
standard Gauss quadrature, the integrands there are smooth.

Element contributions tensorize: on K x I the stiffness splits into
(x'-stiffness of K) * (weighted y-mass of I) + (x'-mass of K) *
(weighted y-stiffness of I).  Summing the element scatter over the whole
mesh is the Kronecker product of the assembled 1D factor matrices, which
is how the global matrices are formed here; the per-element route is kept
in the test suite as an independent oracle.
"""

from __future__ import annotations

import math

import numpy as np
import scipy.sparse as sp

from .meshing import BaseMesh, GradedInterval, TensorMesh
from .quadrature import gauss_rule

LOAD_QUAD_POINTS = 4


def weight_moment(a: float, b: float, alpha: float, m: int) -> float:
    """Closed-form moment of the weight: integral of y^(alpha+m) over [a, b]."""
    if not -1.0 < alpha < 1.0:
        raise ValueError(f"weight exponent must lie in (-1, 1), got {alpha}")
    if a < 0.0 or b <= a:
        raise ValueError(f"need 0 <= a < b, got [{a}, {b}]")
    if m < 0 or m != int(m):
        raise ValueError(f"polynomial degree must be a nonnegative integer, got {m}")
    p = alpha + m + 1.0
    return (b**p - a**p) / p


def normalization_ds(s: float) -> float:
    """Normalization 2^(1-2s) Gamma(1-s) / Gamma(s) of the extension map."""
    if not 0.0 < s < 1.0:
        raise ValueError(f"fractional order must lie in (0, 1), got {s}")
    return 2.0 ** (1.0 - 2.0 * s) * math.gamma(1.0 - s) / math.gamma(s)


def weighted_poly_gram(coeffs: np.ndarray, a: float, b: float, alpha: float,
                       derivative: bool = False) -> np.ndarray:
    """Gram matrix of polynomials against the weight y^alpha on [a, b].

    coeffs[i] holds the monomial coefficients (ascending) of the i-th basis
    function.  With derivative=True the Gram of the derivatives is returned.
    All entries reduce to weight moments, hence are exact.
    """
    coeffs = np.asarray(coeffs, dtype=float)
    if derivative:
        deg = coeffs.shape[1] - 1
        coeffs = coeffs[:, 1:] * np.arange(1, deg + 1)[None, :]
        if coeffs.shape[1] == 0:
            return np.zeros((coeffs.shape[0],) * 2)
    nb, nc = coeffs.shape
    moments = np.array([weight_moment(a, b, alpha, m) for m in range(2 * nc - 1)])
    gram = np.zeros((nb, nb))
    for i in range(nb):
        for j in range(i, nb):
            prod = np.convolve(coeffs[i], coeffs[j])
            gram[i, j] = gram[j, i] = prod @ moments[: len(prod)]
    return gram


def hat_coeffs(a: float, b: float) -> np.ndarray:
    """Monomial coefficients of the two linear hat functions on [a, b]."""
    h = b - a
    return np.array([[b / h, -1.0 / h], [-a / h, 1.0 / h]])


def interval_factor_matrices(interval: GradedInterval, alpha: float):
    """Weighted mass and stiffness of the 1D hat basis on the graded interval.

    Returned over all M+1 level nodes (no boundary conditions applied).
    """
    pts = interval.points
    m = interval.num_cells
    rows, cols, mvals, svals = [], [], [], []
    for k in range(m):
        a, b = pts[k], pts[k + 1]
        coeffs = hat_coeffs(a, b)
        mass = weighted_poly_gram(coeffs, a, b, alpha)
        stiff = weighted_poly_gram(coeffs, a, b, alpha, derivative=True)
        for i in range(2):
            for j in range(2):
                rows.append(k + i)
                cols.append(k + j)
                mvals.append(mass[i, j])
                svals.append(stiff[i, j])
    shape = (m + 1, m + 1)
    mw = sp.csr_matrix((mvals, (rows, cols)), shape=shape)
    sw = sp.csr_matrix((svals, (rows, cols)), shape=shape)
    return mw, sw


def _line_factor_matrices(xs: np.ndarray):
    """Unweighted 1D P1 mass and stiffness over the nodes of a partition."""
    n = len(xs)
    rows, cols, mvals, svals = [], [], [], []
    for c in range(n - 1):
        h = xs[c + 1] - xs[c]
        mass = h / 6.0 * np.array([[2.0, 1.0], [1.0, 2.0]])
        stiff = 1.0 / h * np.array([[1.0, -1.0], [-1.0, 1.0]])
        for i in range(2):
            for j in range(2):
                rows.append(c + i)
                cols.append(c + j)
                mvals.append(mass[i, j])
                svals.append(stiff[i, j])
    mw = sp.csr_matrix((mvals, (rows, cols)), shape=(n, n))
    sw = sp.csr_matrix((svals, (rows, cols)), shape=(n, n))
    return mw, sw


def base_factor_matrices(base: BaseMesh):
    """Stiffness and mass of the P1/Q1 basis over all base vertices."""
    mx, sx = _line_factor_matrices(base.xs)
    if base.dim == 1:
        return sx, mx
    my, sy = _line_factor_matrices(base.ys)
    stiff = sp.kron(sx, my) + sp.kron(mx, sy)
    mass = sp.kron(mx, my)
    return stiff.tocsr(), mass.tocsr()


def _free_submatrix(a: sp.spmatrix, mesh: TensorMesh) -> sp.csr_matrix:
    free = mesh.free_nodes
    return a.tocsr()[free][:, free].tocsr()


def assemble_stiffness(mesh: TensorMesh, alpha: float) -> sp.csr_matrix:
    """Weighted stiffness over the free DoFs of the cylinder mesh."""
    sb, mb = base_factor_matrices(mesh.base)
    mw, sw = interval_factor_matrices(mesh.interval, alpha)
    full = sp.kron(sb, mw) + sp.kron(mb, sw)
    return _free_submatrix(full, mesh)


def assemble_weighted_mass(mesh: TensorMesh, alpha: float) -> sp.csr_matrix:
    """Weighted L2 mass over the free DoFs."""
    _, mb = base_factor_matrices(mesh.base)
    mw, _ = interval_factor_matrices(mesh.interval, alpha)
    return _free_submatrix(sp.kron(mb, mw), mesh)


def assemble_weighted_y_stiffness(mesh: TensorMesh, alpha: float) -> sp.csr_matrix:
    """Weighted Gram of the y-derivative alone, used by stability diagnostics."""
    _, mb = base_factor_matrices(mesh.base)
    _, sw = interval_factor_matrices(mesh.interval, alpha)
    return _free_submatrix(sp.kron(mb, sw), mesh)


def assemble_trace_mass(mesh: TensorMesh) -> sp.csr_matrix:
    """Mass matrix of the trace basis on Omega, embedded in free-DoF indexing.

    Rows and columns away from the trace plane are zero.
    """
    _, mb = base_factor_matrices(mesh.base)
    levels = mesh.num_levels
    e00 = sp.csr_matrix(([1.0], ([0], [0])), shape=(levels, levels))
    return _free_submatrix(sp.kron(mb, e00), mesh)


def _base_hat_integrals(base: BaseMesh, f, npts: int) -> np.ndarray:
    """Integral of f against every base vertex hat function, Gauss per cell."""
    if base.dim == 1:
        xs = base.xs
        out = np.zeros(len(xs))
        for c in range(len(xs) - 1):
            gx, gw = gauss_rule(npts, xs[c], xs[c + 1])
            fv = np.asarray(f(gx), dtype=float)
            h = xs[c + 1] - xs[c]
            lam = (gx - xs[c]) / h
            out[c] += gw @ (fv * (1.0 - lam))
            out[c + 1] += gw @ (fv * lam)
        return out
    xs, ys = base.xs, base.ys
    nx, ny = len(xs), len(ys)
    out = np.zeros(nx * ny)
    for cx in range(nx - 1):
        gx, gwx = gauss_rule(npts, xs[cx], xs[cx + 1])
        lx = (gx - xs[cx]) / (xs[cx + 1] - xs[cx])
        shapes_x = np.stack([1.0 - lx, lx])
        for cy in range(ny - 1):
            gy, gwy = gauss_rule(npts, ys[cy], ys[cy + 1])
            ly = (gy - ys[cy]) / (ys[cy + 1] - ys[cy])
            shapes_y = np.stack([1.0 - ly, ly])
            X, Y = np.meshgrid(gx, gy, indexing="ij")
            fv = np.asarray(f(X.ravel(), Y.ravel()), dtype=float).reshape(X.shape)
            wmat = np.outer(gwx, gwy)
            for i in range(2):
                for j in range(2):
                    val = np.sum(wmat * fv * np.outer(shapes_x[i], shapes_y[j]))
                    out[(cx + i) * ny + (cy + j)] += val
    return out


def trace_functional(mesh: TensorMesh, f, npts: int = LOAD_QUAD_POINTS) -> np.ndarray:
    """Vector of integrals of f against the trace of each free basis function."""
    vertex_vals = _base_hat_integrals(mesh.base, f, npts)
    out = np.zeros(mesh.num_free)
    m = mesh.levels_per_line
    for i, v in enumerate(mesh.interior_vertices):
        out[i * m] = vertex_vals[v]
    return out


def assemble_trace_load(mesh: TensorMesh, f, s: float,
                        npts: int = LOAD_QUAD_POINTS) -> np.ndarray:
    """Load vector d_s * integral(f * trace of basis), nonzero only at the trace."""
    return normalization_ds(s) * trace_functional(mesh, f, npts)


def weighted_energy_norm(mesh: TensorMesh, v: np.ndarray, alpha: float,
                         stiffness: sp.csr_matrix | None = None) -> float:
    """Weighted H1 seminorm sqrt(v' A v) of a free-DoF coefficient vector."""
    a = assemble_stiffness(mesh, alpha) if stiffness is None else stiffness
    return math.sqrt(max(float(v @ (a @ v)), 0.0))


def weighted_l2_norm(mesh: TensorMesh, v: np.ndarray, alpha: float,
                     mass: sp.csr_matrix | None = None) -> float:
    """Weighted L2 norm of a free-DoF coefficient vector."""
    m = assemble_weighted_mass(mesh, alpha) if mass is None else mass
    return math.sqrt(max(float(v @ (m @ v)), 0.0))


def trace_l2_norm(mesh: TensorMesh, v: np.ndarray,
                  trace_mass: sp.csr_matrix | None = None) -> float:
    """L2(Omega) norm of the trace of a free-DoF coefficient vector."""
    m = assemble_trace_mass(mesh) if trace_mass is None else trace_mass
    return math.sqrt(max(float(v @ (m @ v)), 0.0))
