import logging
import math
from functools import cached_property

import numpy as np
import scipy.sparse as sp
from numpy.polynomial import legendre
from scipy.linalg import eig_banded
from scipy.special import eval_legendre, gamma, roots_jacobi, roots_legendre

from utils.config import ELEMENT_DEGREE
from utils.errors import DomainError, NumericalError

logger = logging.getLogger(__name__)

DEFAULT_R_MAX = 30.0
DEFAULT_M = 1024


def _lagrange_coefficients(nodes: np.ndarray) -> np.ndarray:
    """Legendre coefficients of the Lagrange basis on `nodes`, one column per basis function"""
    return np.linalg.inv(legendre.legvander(nodes, len(nodes) - 1))


def _basis(coefficients: np.ndarray, t: np.ndarray) -> np.ndarray:
    return legendre.legvander(t, coefficients.shape[0] - 1) @ coefficients


def _basis_derivative(coefficients: np.ndarray, t: np.ndarray) -> np.ndarray:
    slopes = legendre.legder(coefficients, axis=0)
    return legendre.legvander(t, slopes.shape[0] - 1) @ slopes


def _lobatto_rule(p: int) -> tuple[np.ndarray, np.ndarray]:
    interior, _ = roots_jacobi(p - 1, 1, 1)
    t = np.concatenate([[-1.0], np.sort(interior), [1.0]])
    return t, 2 / (p * (p + 1) * eval_legendre(p, t) ** 2)


def _radau_rule(p: int, N: int) -> tuple[np.ndarray, np.ndarray]:
    """
    p+1 point Gauss-Radau rule for the weight (1+t)^{N-1} on [-1, 1] with the
    node t = +1 fixed; exact up to degree 2p.
    """
    beta = N - 1
    free, gauss_weights = roots_jacobi(p, 1, beta)
    order = np.argsort(free)
    free, gauss_weights = free[order], gauss_weights[order]
    weights = gauss_weights / (1 - free)
    end = 2 ** (beta + 1) / (beta + 1) - weights.sum()
    return np.append(free, 1.0), np.append(weights, end)


class RadialGrid:
    """
    Spectral element grid on [0, R_max] for radial functions in N dimensions.

    The interval is cut into M/p elements of polynomial degree p. The first
    element carries Gauss-Radau-Jacobi nodes that absorb the r^{N-1} weight and
    avoid the axis; the others carry Gauss-Lobatto nodes. The node at R_max is
    dropped (v(R_max) = 0), which leaves exactly M unknowns in (0, R_max).
    Quadrature is diagonal, the Laplacian is -W^{-1} S with S the exact
    stiffness matrix, so it is self-adjoint and negative for the weighted product.
    """

    def __init__(self, N: int, R_max: float = DEFAULT_R_MAX, M: int = DEFAULT_M):
        if N < 1:
            raise DomainError(f"dimension must be >= 1, got N={N}")
        if M < ELEMENT_DEGREE or M % ELEMENT_DEGREE:
            raise DomainError(f"M must be a positive multiple of {ELEMENT_DEGREE}, got M={M}")
        if not R_max > 0:
            raise DomainError(f"R_max must be positive, got {R_max}")
        self.N = int(N)
        self.R_max = float(R_max)
        self.M = int(M)
        self.degree = ELEMENT_DEGREE
        self.elements = self.M // self.degree
        self.element_width = self.R_max / self.elements
        # mean node spacing, the resolution unit of the evolution guards
        self.dr = self.R_max / self.M
        self.sphere_area = 2 * math.pi ** (self.N / 2) / gamma(self.N / 2)

        p, h = self.degree, self.element_width
        self._axis_t, axis_weights = _radau_rule(p, self.N)
        self._lobatto_t, lobatto_weights = _lobatto_rule(p)
        self._axis_coefficients = _lagrange_coefficients(self._axis_t)
        self._lobatto_coefficients = _lagrange_coefficients(self._lobatto_t)

        # global index of local node a in element e is e*p + a; index M is the node at R_max
        self._connectivity = np.arange(self.elements)[:, None] * p + np.arange(p + 1)[None, :]
        points = np.empty((self.elements, p + 1))
        points[0] = h * (1 + self._axis_t) / 2
        points[1:] = np.arange(1, self.elements)[:, None] * h + h * (1 + self._lobatto_t[None, :]) / 2
        self._element_points = points

        volumes = np.zeros(self.M + 1)
        np.add.at(volumes, self._connectivity[0], (h / 2) ** self.N * axis_weights)
        if self.elements > 1:
            np.add.at(
                volumes,
                self._connectivity[1:].ravel(),
                ((h / 2) * lobatto_weights[None, :] * points[1:] ** (self.N - 1)).ravel(),
            )
        full_nodes = np.zeros(self.M + 1)
        full_nodes[self._connectivity.ravel()] = points.ravel()
        self.nodes = full_nodes[: self.M]
        # quadrature volumes without the sphere factor; the operators never need it
        self.volumes = volumes[: self.M]
        self.weights = self.sphere_area * self.volumes

    def __repr__(self):
        return f"RadialGrid(N={self.N}, R_max={self.R_max:g}, M={self.M})"

    def __eq__(self, other):
        return (
            isinstance(other, RadialGrid)
            and (self.N, self.R_max, self.M) == (other.N, other.R_max, other.M)
        )

    def __hash__(self):
        return hash((self.N, self.R_max, self.M))

    def _element_stiffness(self, e: int) -> np.ndarray:
        h = self.element_width
        g, gw = roots_legendre(self.degree + self.N + 1)
        r = e * h + h * (1 + g) / 2
        coefficients = self._axis_coefficients if e == 0 else self._lobatto_coefficients
        slopes = _basis_derivative(coefficients, g)
        return (2 / h) * slopes.T @ ((gw * r ** (self.N - 1))[:, None] * slopes)

    @cached_property
    def stiffness_matrix(self) -> sp.csr_matrix:
        """S_ij = ∫ φ_i' φ_j' r^{N-1} dr over the retained basis functions"""
        rows, cols, data = [], [], []
        for e in range(self.elements):
            local = self._element_stiffness(e)
            idx = self._connectivity[e]
            rows.append(np.repeat(idx, len(idx)))
            cols.append(np.tile(idx, len(idx)))
            data.append(local.ravel())
        rows, cols, data = np.concatenate(rows), np.concatenate(cols), np.concatenate(data)
        keep = (rows < self.M) & (cols < self.M)
        S = sp.coo_matrix((data[keep], (rows[keep], cols[keep])), shape=(self.M, self.M)).tocsr()
        return ((S + S.T) / 2).tocsr()

    @cached_property
    def laplacian_matrix(self) -> sp.csr_matrix:
        return (-sp.diags(1 / self.volumes) @ self.stiffness_matrix).tocsr()

    @cached_property
    def bilaplacian_matrix(self) -> sp.csr_matrix:
        L = self.laplacian_matrix
        return (L @ L).tocsr()

    @cached_property
    def _sqrt_volumes(self) -> np.ndarray:
        return np.sqrt(self.volumes)

    @cached_property
    def spectrum(self) -> tuple[np.ndarray, np.ndarray]:
        """
        Eigenvalues (all negative, ascending) and orthonormal eigenvectors of the
        symmetrised Laplacian -V^{-1/2} S V^{-1/2}.
        """
        sv = self._sqrt_volumes
        A = (sp.diags(1 / sv) @ self.stiffness_matrix @ sp.diags(1 / sv)).tocoo()
        p = self.degree
        band = np.zeros((p + 1, self.M))
        upper = A.row <= A.col
        band[p + A.row[upper] - A.col[upper], A.col[upper]] = A.data[upper]
        mu, vectors = eig_banded(band, lower=False)
        eigenvalues, vectors = -mu[::-1], vectors[:, ::-1]
        logger.debug(f"{self}: spectrum in [{eigenvalues[0]:.3e}, {eigenvalues[-1]:.3e}]")
        return eigenvalues, vectors

    def apply_spectral(self, values: np.ndarray, symbol: np.ndarray) -> np.ndarray:
        """Apply f(Δ) given the symbol f(λ) sampled on the eigenvalues"""
        _, Q = self.spectrum
        sv = self._sqrt_volumes
        w = sv * values
        if np.iscomplexobj(w) or np.iscomplexobj(symbol):
            coeffs = Q.T @ np.column_stack([w.real, w.imag])
            c = (coeffs[:, 0] + 1j * coeffs[:, 1]) * symbol
            back = Q @ np.column_stack([c.real, c.imag])
            return (back[:, 0] + 1j * back[:, 1]) / sv
        return (Q @ (symbol * (Q.T @ w))) / sv

    def interpolation_matrix(self, points) -> sp.csr_matrix:
        """
        Sparse matrix evaluating the element interpolant at arbitrary radii.
        Profiles are even in r and vanish from R_max on.
        """
        y = np.abs(np.asarray(points, dtype=float))
        inside = np.flatnonzero(y < self.R_max)
        y = y[inside]
        h, p = self.element_width, self.degree
        e = np.minimum(np.floor(y / h).astype(int), self.elements - 1)
        t = 2 * (y - e * h) / h - 1
        values = np.where(
            (e == 0)[:, None],
            _basis(self._axis_coefficients, t),
            _basis(self._lobatto_coefficients, t),
        )
        rows = np.repeat(inside, p + 1)
        cols = self._connectivity[e].ravel()
        data = values.ravel()
        keep = cols < self.M
        return sp.coo_matrix(
            (data[keep], (rows[keep], cols[keep])), shape=(len(np.atleast_1d(points)), self.M)
        ).tocsr()

    @cached_property
    def _differentiation(self) -> tuple[np.ndarray, np.ndarray]:
        h = self.element_width
        axis = (2 / h) * _basis_derivative(self._axis_coefficients, self._axis_t)
        lobatto = (2 / h) * _basis_derivative(self._lobatto_coefficients, self._lobatto_t)
        return axis, lobatto


class RadialField:
    """Complex radial profile sampled at the nodes of a RadialGrid"""

    __slots__ = ("grid", "values")

    def __init__(self, grid: RadialGrid, values):
        values = np.asarray(values, dtype=complex)
        if values.shape != (grid.M,):
            raise DomainError(f"field has shape {values.shape}, grid expects ({grid.M},)")
        self.grid = grid
        self.values = values

    @classmethod
    def from_function(cls, grid: RadialGrid, func) -> "RadialField":
        return cls(grid, func(grid.nodes))

    @classmethod
    def zeros(cls, grid: RadialGrid) -> "RadialField":
        return cls(grid, np.zeros(grid.M))

    def with_values(self, values) -> "RadialField":
        return RadialField(self.grid, values)

    def is_finite(self) -> bool:
        return bool(np.all(np.isfinite(self.values)))

    @property
    def modulus(self) -> np.ndarray:
        return np.abs(self.values)

    def __mul__(self, scalar) -> "RadialField":
        return RadialField(self.grid, self.values * scalar)

    __rmul__ = __mul__

    def __add__(self, other: "RadialField") -> "RadialField":
        return RadialField(self.grid, self.values + other.values)

    def __sub__(self, other: "RadialField") -> "RadialField":
        return RadialField(self.grid, self.values - other.values)

    def __repr__(self):
        return f"RadialField({self.grid}, max|v|={np.max(np.abs(self.values)):.3e})"


def integrate(grid: RadialGrid, integrand) -> float:
    """Quadrature of a real radial integrand over the ball of radius R_max"""
    integrand = np.asarray(integrand)
    bad = np.flatnonzero(~np.isfinite(integrand))
    if bad.size:
        i = int(bad[0])
        raise NumericalError(
            f"non-finite integrand at node {i} (r = {grid.nodes[i]:.6g}): {integrand[i]}",
            payload={"node": i, "r": float(grid.nodes[i])},
        )
    return float(np.dot(grid.weights, np.real(integrand)))


def inner(u: RadialField, v: RadialField) -> complex:
    """Weighted L² product <u, v> = ∫ u v̄ dx"""
    return complex(np.dot(u.grid.weights, u.values * np.conj(v.values)))


def norm(v: RadialField) -> float:
    return math.sqrt(max(integrate(v.grid, np.abs(v.values) ** 2), 0.0))


def laplacian(v: RadialField) -> RadialField:
    return RadialField(v.grid, v.grid.laplacian_matrix @ v.values)


def bilaplacian(v: RadialField) -> RadialField:
    return laplacian(laplacian(v))


def grad_norm_sq(v: RadialField) -> float:
    """‖∇v‖² from the stiffness form; equals -<Δv, v> exactly"""
    grid = v.grid
    x = v.values
    return float(grid.sphere_area * np.real(np.vdot(x, grid.stiffness_matrix @ x)))


def radial_derivatives(v: RadialField) -> tuple[np.ndarray, np.ndarray]:
    """∂_r v and ∂_r² v at the nodes, differentiated per element and averaged on shared nodes"""
    grid = v.grid
    axis, lobatto = grid._differentiation
    extended = np.append(v.values, 0.0)
    local = extended[grid._connectivity]
    first = np.empty_like(local)
    second = np.empty_like(local)
    first[0] = axis @ local[0]
    second[0] = axis @ first[0]
    first[1:] = local[1:] @ lobatto.T
    second[1:] = first[1:] @ lobatto.T

    counts = np.zeros(grid.M + 1)
    np.add.at(counts, grid._connectivity.ravel(), 1.0)
    averaged = []
    for part in (first, second):
        total = np.zeros(grid.M + 1, dtype=complex)
        np.add.at(total, grid._connectivity.ravel(), part.ravel())
        averaged.append((total / counts)[: grid.M])
    return averaged[0], averaged[1]


def fractional_laplacian_power(v: RadialField, s: float) -> RadialField:
    """|∇|^s v = (-Δ)^{s/2} v through the spectral decomposition of the discrete Laplacian"""
    eigenvalues, _ = v.grid.spectrum
    return RadialField(v.grid, v.grid.apply_spectral(v.values, (-eigenvalues) ** (s / 2)))


def field_from_snapshot(snapshot: dict) -> RadialField:
    grid = RadialGrid(snapshot["N"], snapshot["R_max"], snapshot["M"])
    if not np.allclose(grid.nodes, snapshot["r"], rtol=1e-12, atol=0):
        raise DomainError("snapshot nodes do not match a spectral element grid with the declared R_max and M")
    return RadialField(grid, snapshot["values"])
