"""Explicit series for the harmonic-extension maps on the rectangle (0, pi) x (-1, 0).

Two boundary-value solvers are evaluated through their separated-variable
series: the top-data harmonic extension (Dirichlet data on the surface,
homogeneous Neumann conditions elsewhere) and the wall-data extension
(Neumann data on the left wall, zero Dirichlet data on the surface). From
these come the wall trace of the top extension, the top normal-derivative
trace of the wall extension, a quadrature check of the Hilbert-inequality
bound behind its boundedness proof, and the reconstruction of the fluid
field from a surface state and an input value.

Basis conventions:

    phi_k(x) = sqrt(2/pi) cos(kx)                     on [0, pi]
    psi_k(y) = sqrt(2) cos[(2k-1)(pi/2)(y+1)]         on [-1, 0]
             = sqrt(2) (-1)^k sin[(2k-1)(pi/2) y]

The sine form of psi_k is used for evaluation so that the wall extension
vanishes identically (not just to roundoff) on the top boundary.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import simpson

from ._hyper import cosh_over_cosh, cosh_ratio_side, exp_left_over_sinh, sinh_ratio_side

__all__ = [
    "FieldGrid",
    "dirichlet_field",
    "wall_trace",
    "neumann_field",
    "neumann_wall_residual",
    "neumann_to_neumann",
    "hilbert_bound_ratio",
    "harmonicity_residual",
    "side_projection",
    "reconstruct_field",
]

DEFAULT_SIDE_MODES = 64
HILBERT_SIMPSON_PANELS = 2048


@dataclass
class FieldGrid:
    """Field samples on the uniform grid x_i = i pi/nx, y_j = -1 + j/ny.

    ``values[i, j]`` holds the field at (x_i, y_j); the top boundary is the
    last column.
    """

    nx: int
    ny: int
    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.nx < 1 or self.ny < 1:
            raise ValueError("grid needs nx >= 1 and ny >= 1")
        if self.values.shape != (self.nx + 1, self.ny + 1):
            raise ValueError(
                f"values shape {self.values.shape} does not match grid "
                f"({self.nx + 1}, {self.ny + 1})"
            )

    @property
    def x(self) -> np.ndarray:
        return np.linspace(0.0, np.pi, self.nx + 1)

    @property
    def y(self) -> np.ndarray:
        return np.linspace(-1.0, 0.0, self.ny + 1)

    @property
    def top(self) -> np.ndarray:
        """Values along the free surface y = 0."""
        return self.values[:, -1]

    def to_csv(self, path) -> None:
        """Write rows ``x,y,value`` (17 significant digits, row-major)."""
        with open(path, "w", newline="") as fh:
            fh.write("x,y,value\n")
            xs, ys = self.x, self.y
            for i in range(self.nx + 1):
                for j in range(self.ny + 1):
                    fh.write(f"{xs[i]:.17g},{ys[j]:.17g},{self.values[i, j]:.17g}\n")


def _as_coefficients(c) -> np.ndarray:
    c = np.atleast_1d(np.asarray(c, dtype=float))
    if c.ndim != 1:
        raise ValueError("coefficient vectors must be 1-D")
    if not np.all(np.isfinite(c)):
        raise ValueError("coefficient vector contains non-finite entries")
    return c


def _psi_factor(k: int, y) -> np.ndarray:
    # psi_k(y)/sqrt(2); the sine form is exactly zero at y = 0
    return (-1.0) ** k * np.sin((2 * k - 1) * 0.5 * np.pi * np.asarray(y, dtype=float))


def dirichlet_field(eta, nx: int, ny: int) -> FieldGrid:
    """Harmonic extension of top data with coefficients ``eta`` against phi_k.

    The truncated series sum_k (eta_k / cosh k) phi_k(x) cosh[k(y+1)] is
    evaluated on the grid; its top row reproduces the surface data exactly
    because every mode ratio equals one at y = 0.
    """
    eta = _as_coefficients(eta)
    x = np.linspace(0.0, np.pi, nx + 1)
    y = np.linspace(-1.0, 0.0, ny + 1)
    values = np.zeros((nx + 1, ny + 1))
    for k, ek in enumerate(eta, start=1):
        if ek == 0.0:
            continue
        values += np.outer(
            ek * math.sqrt(2.0 / math.pi) * np.cos(k * x), cosh_over_cosh(k, y)
        )
    return FieldGrid(nx=nx, ny=ny, values=values)


def wall_trace(eta, y) -> np.ndarray:
    """Trace of the top extension on the left wall x = 0.

    Returns sum_k sqrt(2/pi) eta_k cosh[k(y+1)] / cosh(k) at the given depths.
    """
    eta = _as_coefficients(eta)
    y = np.asarray(y, dtype=float)
    out = np.zeros_like(y)
    for k, ek in enumerate(eta, start=1):
        if ek == 0.0:
            continue
        out += ek * math.sqrt(2.0 / math.pi) * cosh_over_cosh(k, y)
    return out


def neumann_field(v, nx: int, ny: int) -> FieldGrid:
    """Harmonic extension of left-wall Neumann data with coefficients ``v`` against psi_k.

    Each mode contributes
        (2 sqrt(2) v_k / ((2k-1) pi)) * cosh[a_k(x - pi)]/sinh(a_k pi) * psi_k(y)/sqrt(2)
    with a_k = (2k-1) pi/2. The x-ratio is evaluated in shifted exponentials
    for large a_k; the y-factor vanishes identically on the top boundary.
    """
    v = _as_coefficients(v)
    x = np.linspace(0.0, np.pi, nx + 1)
    y = np.linspace(-1.0, 0.0, ny + 1)
    values = np.zeros((nx + 1, ny + 1))
    for k, vk in enumerate(v, start=1):
        if vk == 0.0:
            continue
        a = (2 * k - 1) * 0.5 * np.pi
        g = 2.0 * math.sqrt(2.0) * vk / ((2 * k - 1) * np.pi)
        values += np.outer(g * cosh_ratio_side(a, x), _psi_factor(k, y))
    return FieldGrid(nx=nx, ny=ny, values=values)


def neumann_wall_residual(v, y, fd_step: float = 1e-6) -> float:
    """Residual of the wall boundary condition of the Neumann extension.

    The x-derivative of the extension at x = 0 is evaluated through the
    term-wise differentiated series and compared against -v(y) reconstructed
    in the same basis; the result is max_y of the absolute mismatch, which
    the per-mode identity keeps at roundoff level. ``fd_step`` is validated
    for interface compatibility; the derivative itself is analytic.
    """
    if not fd_step > 0:
        raise ValueError(f"fd_step must be positive, got {fd_step}")
    v = _as_coefficients(v)
    y = np.asarray(y, dtype=float)
    deriv = np.zeros_like(y)
    vy = np.zeros_like(y)
    for k, vk in enumerate(v, start=1):
        a = (2 * k - 1) * 0.5 * np.pi
        g = 2.0 * math.sqrt(2.0) * vk / ((2 * k - 1) * np.pi)
        dx_factor = g * a * sinh_ratio_side(a, np.array(0.0))
        psi = _psi_factor(k, y)
        deriv += dx_factor * psi
        vy += vk * math.sqrt(2.0) * psi
    return float(np.max(np.abs(deriv + vy))) if y.size else 0.0


def neumann_to_neumann(v, x) -> np.ndarray:
    """Top normal-derivative trace of the wall extension at the points ``x``.

    Returns sum_k (-1)^k sqrt(2) v_k cosh[a_k(x - pi)] / sinh(a_k pi); this is
    how wall forcing with shape coefficients v excites the surface.
    """
    v = _as_coefficients(v)
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    for k, vk in enumerate(v, start=1):
        if vk == 0.0:
            continue
        a = (2 * k - 1) * 0.5 * np.pi
        out += (-1.0) ** k * math.sqrt(2.0) * vk * cosh_ratio_side(a, x)
    return out


def hilbert_bound_ratio(v, panels: int = HILBERT_SIMPSON_PANELS) -> float:
    """Quadrature check of the Hilbert-inequality bound on the growing half series.

    The top trace splits into a decaying and a growing exponential family;
    the growing one,

        g(x) = sum_k (-1)^k sqrt(2) v_k e^{a_k (pi - x)} / sinh(a_k pi),

    satisfies integral_0^inf |g|^2 <= 10 sum |v_k|^2 by Hilbert's inequality.
    Returns the ratio of the [0, pi] integral (composite Simpson) to the
    squared coefficient norm; the contract is ratio <= 10.
    """
    v = _as_coefficients(v)
    nsq = float(np.dot(v, v))
    if nsq == 0.0:
        raise ValueError("ratio undefined for the zero coefficient vector")
    x = np.linspace(0.0, np.pi, panels + 1)
    g = np.zeros_like(x)
    for k, vk in enumerate(v, start=1):
        if vk == 0.0:
            continue
        a = (2 * k - 1) * 0.5 * np.pi
        g += (-1.0) ** k * math.sqrt(2.0) * vk * exp_left_over_sinh(a, x)
    return float(simpson(g * g, x=x) / nsq)


def harmonicity_residual(grid: FieldGrid) -> float:
    """Max absolute 5-point finite-difference Laplacian over interior nodes.

    For the truncated extension series, the analytic Laplacian vanishes, so
    this measures pure second-order finite-difference truncation error.
    """
    if grid.nx < 4 or grid.ny < 4:
        raise ValueError("harmonicity check needs nx >= 4 and ny >= 4")
    f = grid.values
    dx = np.pi / grid.nx
    dy = 1.0 / grid.ny
    lap = (f[2:, 1:-1] - 2.0 * f[1:-1, 1:-1] + f[:-2, 1:-1]) / dx**2
    lap += (f[1:-1, 2:] - 2.0 * f[1:-1, 1:-1] + f[1:-1, :-2]) / dy**2
    return float(np.max(np.abs(lap)))


def side_projection(h, n_modes: int = DEFAULT_SIDE_MODES) -> np.ndarray:
    """Coefficients of the profile h against the wall basis psi_k, k <= n_modes.

    ``h`` is any profile handle exposing ``integrate_against``; built-in
    profiles are integrated with a 64-node rule per unit interval, tabulated
    ones with their per-panel composite rule.
    """
    nodes = 64 if getattr(h, "kind", "").startswith("builtin") else None
    return np.array(
        [
            h.integrate_against(
                lambda y, kk=k: math.sqrt(2.0) * _psi_factor(kk, y), nodes_per_panel=nodes
            )
            for k in range(1, n_modes + 1)
        ]
    )


def reconstruct_field(
    zeta,
    u_now: float,
    h,
    nx: int,
    ny: int,
    n_side_modes: int = DEFAULT_SIDE_MODES,
) -> FieldGrid:
    """Fluid field -(D zeta) + u_now (N h) induced by a surface state and input value.

    ``zeta`` holds the surface coefficients against phi_k; ``h`` is the
    wavemaker profile, projected onto the wall basis before extension.
    """
    field = dirichlet_field(zeta, nx, ny)
    values = -field.values
    if u_now != 0.0:
        wall = neumann_field(side_projection(h, n_side_modes), nx, ny)
        values += u_now * wall.values
    return FieldGrid(nx=nx, ny=ny, values=values)
