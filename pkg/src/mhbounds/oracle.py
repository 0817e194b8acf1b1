"""Independent brute-force verifiers used by the test and acceptance suites.

These deliberately avoid the production code paths: closed-form element
matrices per triangle orientation, dense assembly and solves, log-grid
search for the majorant parameters, and quadrature references for the
exact per-mode costs.
"""

from __future__ import annotations

import numpy as np

from .timefourier import fourier_coeffs, gauss_panels


def element_matrices(h: float):
    """Closed-form P1 element matrices for the two triangle orientations.

    Returns (K_lower, K_upper, M) where lower/upper refer to the two halves
    of a grid cell split along the bottom-left -> top-right diagonal, in the
    local vertex order used by the mesh builder.
    """
    if h <= 0:
        raise ValueError("h must be positive")
    K_lower = np.array([[0.5, -0.5, 0.0], [-0.5, 1.0, -0.5], [0.0, -0.5, 0.5]])
    K_upper = np.array([[0.5, 0.0, -0.5], [0.0, 0.5, -0.5], [-0.5, -0.5, 1.0]])
    M = (h * h / 24.0) * (np.ones((3, 3)) + np.eye(3))
    return K_lower, K_upper, M


def assemble_dense(mesh, nu: float = 1.0, sigma: float = 1.0):
    """Dense interior stiffness/mass by plain loops over the element matrices."""
    K_lower, K_upper, Mh = element_matrices(mesh.h)
    n = mesh.num_nodes
    K = np.zeros((n, n))
    M = np.zeros((n, n))
    for t, tri in enumerate(mesh.triangles):
        Ke = K_lower if t % 2 == 0 else K_upper
        for i in range(3):
            for j in range(3):
                K[tri[i], tri[j]] += nu * Ke[i, j]
                M[tri[i], tri[j]] += sigma * Mh[i, j]
    idx = mesh.interior_nodes
    return K[np.ix_(idx, idx)], M[np.ix_(idx, idx)]


def dense_solve(A: np.ndarray, b: np.ndarray, cap: int = 4096) -> np.ndarray:
    """Dense direct solve with a residual check.

    Raises:
        ValueError: dimension exceeds the cap or the matrix is singular.
    """
    if A.shape[0] > cap:
        raise ValueError(f"dense oracle capped at {cap} unknowns")
    try:
        x = np.linalg.solve(A, b)
    except np.linalg.LinAlgError as exc:
        raise ValueError("singular system") from exc
    scale = np.linalg.norm(b)
    if scale > 0 and np.linalg.norm(A @ x - b) > 1e-12 * np.linalg.norm(A) * np.linalg.norm(x) + 1e-12 * scale:
        raise ValueError("dense solve residual too large")
    return x


def grid_search_alpha_beta(A, B, C, params, P: float = 0.0, points: int = 40):
    """Minimize the parameterized upper-bound form over a log-spaced grid."""
    from .bounds import majorant_form

    grid = np.logspace(-6.0, 6.0, points)
    best = (np.inf, None, None)
    for a in grid:
        for b in grid:
            val = majorant_form(A, B, C, a, b, params, P=P)
            if val < best[0]:
                best = (val, a, b)
    return best[1], best[2], best[0]


def scalar_mode_solve(
    problem: str,
    k: int,
    lam: float,
    omega: float,
    sigma: float,
    nu: float,
    kappa: float,
    data_c: float,
    data_s: float = 0.0,
):
    """Continuous mode solution when the data's spatial profile is a
    Dirichlet-Laplacian eigenfunction with eigenvalue kappa.

    All mode operators act within the span of the eigenfunction, so the
    coupled system collapses to 2 (mode 0) or 4 scalar unknowns
    (y_cos, y_sin, p_cos, p_sin).  For problem II, `data_c/s` is the
    coefficient of grad(eigenfunction) in the desired gradient.
    """
    lead = 1.0 if problem == "I" else kappa
    if k == 0:
        A = np.array([[lead, -nu * kappa], [-nu * kappa, -1.0 / lam]])
        rhs = np.array([lead * data_c, 0.0])
        a, b = np.linalg.solve(A, rhs)
        return a, 0.0, b, 0.0
    kws = k * omega * sigma
    A = np.array(
        [
            [lead, 0.0, -nu * kappa, kws],
            [0.0, lead, -kws, -nu * kappa],
            [-nu * kappa, -kws, -1.0 / lam, 0.0],
            [kws, -nu * kappa, 0.0, -1.0 / lam],
        ]
    )
    rhs = np.array([lead * data_c, lead * data_s, 0.0, 0.0])
    a_c, a_s, b_c, b_s = np.linalg.solve(A, rhs)
    return a_c, a_s, b_c, b_s


def time_mode_pair(f, omega: float, k: int, panels: int = 256, order: int = 12):
    """(cosine, sine) Fourier coefficient pair of a time factor."""
    coeffs = fourier_coeffs(f, omega, max(k, 1), panels=panels, order=order)
    return coeffs.mode(k)


def spacetime_cost(
    k: int,
    lam: float,
    omega: float,
    y_time,
    u_time,
    data_time,
    misfit_norm2: float,
    control_norm2: float,
    data_scale: float = 1.0,
    panels: int = 256,
    order: int = 12,
) -> float:
    """Exact per-mode cost of an analytic optimal pair, by time quadrature.

    The state, control and data share one spatial profile; `misfit_norm2`
    scales the squared misfit coefficient (for gradient tracking this is
    the squared norm of the profile's gradient and `data_scale` maps the
    data's time coefficients onto that gradient).
    """
    yc, ys = time_mode_pair(y_time, omega, k, panels, order)
    uc, us = time_mode_pair(u_time, omega, k, panels, order)
    dc, ds = time_mode_pair(data_time, omega, k, panels, order)
    misfit = (yc - data_scale * dc) ** 2 + (ys - data_scale * ds) ** 2
    energy = uc**2 + us**2
    return 0.5 * misfit * misfit_norm2 + 0.5 * lam * energy * control_norm2


def time_norm2(f, omega: float, panels: int = 256, order: int = 12) -> float:
    """Integral of f(t)^2 over one period."""
    t, w = gauss_panels(0.0, 2 * np.pi / omega, panels, order)
    return float(np.dot(w, f(t) ** 2))
