"""The six benchmark data sets and their reference solutions.

Cases 1-3 track a desired state (problem I), cases 4-6 a desired gradient
(problem II).  All data factorize as time_factor(t) * spatial profile;
cases 1/2/4/5 are analytic in time with the eigenfunction
sin(pi x) sin(pi y) in space, cases 3/6 carry indicator-function data with
closed-form Fourier coefficients (odd cosine modes only).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Optional

import numpy as np

from . import fluxrecon, oracle
from .bounds import ModeData
from .femcore import FemContext
from .timefourier import RemainderTerm, TimeSignalCoeffs, fourier_coeffs, remainder_parseval, remainder_from_tail

PI = np.pi
PI2 = PI * PI
PI4 = PI2 * PI2
KAPPA = 2.0 * PI2  # first Dirichlet-Laplacian eigenvalue on the unit square


def _sin_sin(x, y):
    return np.sin(PI * x) * np.sin(PI * y)


def _corner_box(x, y):
    return ((x >= 0.5) & (y >= 0.5)).astype(float)


def _grad_sin_sin_over_pi(x, y):
    return np.cos(PI * x) * np.sin(PI * y), np.sin(PI * x) * np.cos(PI * y)


def _corner_box_pair(x, y):
    v = _corner_box(x, y)
    return v, v


def _g1(t):
    s, c = np.sin(t), np.cos(t)
    return np.exp(t) * s * 0.1 * ((12 + 4 * PI4) * s * s - 6 * c * (c + s))


def _g2(t):
    return np.exp(t) * 0.2 * ((5 + 2 * PI4) * np.sin(t) - np.cos(t))


def _box_time(t):
    tau = np.mod(t, 1.0)
    return ((tau >= 0.25) & (tau <= 0.75)).astype(float)


def _g4(t):
    s, c = np.sin(t), np.cos(t)
    return np.exp(t) * s * (-3 * c * (c + s) + (10 * PI2 + 1 + 2 * PI4) * s * s) / (10 * PI)


def _g5(t):
    return -np.exp(t) * (0.1 * np.cos(t) - (PI2 + 0.2 * PI4) * np.sin(t)) / PI


def _y_cubic(t):
    return np.exp(t) * np.sin(t) ** 3


def _u_cubic(t):
    s, c = np.sin(t), np.cos(t)
    return np.exp(t) * ((1 + 2 * PI2) * s**3 + 3 * s * s * c)


def _y_lin(t):
    return np.exp(t) * np.sin(t)


def _u_lin(t):
    return np.exp(t) * ((1 + 2 * PI2) * np.sin(t) + np.cos(t))


def box_mode_coefficient(k: int) -> float:
    """Cosine coefficient of the on-off time factor (period 1, on [1/4, 3/4]).

    Vanishes exactly for even k >= 2; odd modes alternate +-2/(k pi).
    """
    if k == 0:
        return 0.5
    if k % 2 == 0:
        return 0.0
    return (np.sin(1.5 * k * PI) - np.sin(0.5 * k * PI)) / (k * PI)


@dataclass(frozen=True)
class ExampleCase:
    """One benchmark data set with its parameters and reference machinery."""

    ident: int
    problem: str
    lam: float
    omega: float
    n_default: int
    time_factor: Callable
    analytic_modes: bool  # closed-form time coefficients (indicator data)
    spatial_scalar: Optional[Callable] = None
    spatial_vector: Optional[Callable] = None
    spatial_norm2: float = 0.25
    eigen_kappa: Optional[float] = None
    data_scale: float = 1.0  # coefficient of grad(profile) per unit time coefficient
    exact_y_time: Optional[Callable] = None
    exact_u_time: Optional[Callable] = None
    sigma: float = 1.0
    nu: float = 1.0

    @property
    def period(self) -> float:
        return 2.0 * PI / self.omega

    def time_coeffs(self, k_max: int) -> TimeSignalCoeffs:
        if self.analytic_modes:
            cos = np.array([box_mode_coefficient(k) for k in range(1, k_max + 1)])
            return TimeSignalCoeffs(omega=self.omega, c0=0.5, cos=cos, sin=np.zeros(k_max))
        return _numeric_coeffs(self.ident, self.omega, k_max)

    def mode_pair(self, k: int) -> tuple[float, float]:
        return self.time_coeffs(max(k, 1)).mode(k)

    def remainder(self, n_modes: int) -> RemainderTerm:
        """Tail energy (T/2) sum_{k>N} ||data mode||^2."""
        if self.analytic_modes:
            # only odd cosine modes: sum_{odd k <= N} 1/k^2 against pi^2/8
            ks = np.arange(1, n_modes + 1)
            partial = float(np.sum(1.0 / ks[ks % 2 == 1] ** 2))
            tail = (4.0 / PI2) * (PI2 / 8.0 - partial)
            value = 0.5 * self.period * tail * self.spatial_norm2
            return remainder_from_tail(value, n_modes)
        tn2 = oracle.time_norm2(self.time_factor, self.omega, panels=512, order=12)
        coeffs = self.time_coeffs(n_modes)
        return remainder_parseval(tn2, coeffs, n_modes, self.spatial_norm2)

    @property
    def has_analytic_reference(self) -> bool:
        return self.exact_y_time is not None

    def reference_cost(self, k: int) -> float:
        """Exact per-mode optimal cost from the analytic solution."""
        if not self.has_analytic_reference:
            raise ValueError(f"case {self.ident} has no analytic reference")
        if self.problem == "I":
            misfit_norm2, scale = self.spatial_norm2, 1.0
        else:
            misfit_norm2, scale = self.eigen_kappa * 0.25, self.data_scale
        return oracle.spacetime_cost(
            k, self.lam, self.omega,
            self.exact_y_time, self.exact_u_time, self.time_factor,
            misfit_norm2, 0.25, data_scale=scale,
        )

    def exact_state_mode(self, k: int) -> tuple[float, float]:
        """Fourier pair of the exact state's time factor."""
        if not self.has_analytic_reference:
            raise ValueError(f"case {self.ident} has no analytic reference")
        return oracle.time_mode_pair(self.exact_y_time, self.omega, k)


@lru_cache(maxsize=None)
def _numeric_coeffs(ident: int, omega: float, k_max: int) -> TimeSignalCoeffs:
    factor = {1: _g1, 2: _g2, 4: _g4, 5: _g5}[ident]
    return fourier_coeffs(factor, omega, k_max, panels=256, order=12)


_CASE_SPECS = {
    1: dict(problem="I", lam=0.1, omega=1.0, n_default=8, time_factor=_g1,
            analytic_modes=False, spatial_scalar=_sin_sin, spatial_norm2=0.25,
            eigen_kappa=KAPPA, exact_y_time=_y_cubic, exact_u_time=_u_cubic),
    2: dict(problem="I", lam=0.1, omega=1.0, n_default=10, time_factor=_g2,
            analytic_modes=False, spatial_scalar=_sin_sin, spatial_norm2=0.25,
            eigen_kappa=KAPPA, exact_y_time=_y_lin, exact_u_time=_u_lin),
    3: dict(problem="I", lam=0.01, omega=2 * PI, n_default=11, time_factor=_box_time,
            analytic_modes=True, spatial_scalar=_corner_box, spatial_norm2=0.25),
    4: dict(problem="II", lam=0.1, omega=1.0, n_default=8, time_factor=_g4,
            analytic_modes=False, spatial_vector=_grad_sin_sin_over_pi,
            spatial_norm2=0.5, eigen_kappa=KAPPA, data_scale=1.0 / PI,
            exact_y_time=_y_cubic, exact_u_time=_u_cubic),
    5: dict(problem="II", lam=0.1, omega=1.0, n_default=10, time_factor=_g5,
            analytic_modes=False, spatial_vector=_grad_sin_sin_over_pi,
            spatial_norm2=0.5, eigen_kappa=KAPPA, data_scale=1.0 / PI,
            exact_y_time=_y_lin, exact_u_time=_u_lin),
    6: dict(problem="II", lam=0.01, omega=2 * PI, n_default=11, time_factor=_box_time,
            analytic_modes=True, spatial_vector=_corner_box_pair, spatial_norm2=0.5),
}


def make_case(ident: int, lam: float | None = None, omega: float | None = None) -> ExampleCase:
    """Benchmark case by id 1..6, optionally overriding lambda and omega."""
    if ident not in _CASE_SPECS:
        raise ValueError(f"unknown example id {ident}")
    spec = dict(_CASE_SPECS[ident])
    if lam is not None:
        spec["lam"] = lam
    if omega is not None:
        spec["omega"] = omega
    return ExampleCase(ident=ident, **spec)


def example_data(ident: int, k: int):
    """Mode-k data factors of a case: (spatial callable, (cos, sin) pair)."""
    case = make_case(ident)
    spatial = case.spatial_scalar if case.problem == "I" else case.spatial_vector
    return spatial, case.mode_pair(k)


class CaseBind:
    """A case attached to a discretization: right-hand sides, mode data
    samples, and analytic-reference error norms."""

    def __init__(self, case: ExampleCase, ctx: FemContext):
        self.case = case
        self.ctx = ctx
        mesh = ctx.mesh
        if case.analytic_modes and mesh.n % 2 == 1:
            raise ValueError("indicator data requires an even grid")
        if case.problem == "I":
            self.s_qp = ctx.data_at_qp(case.spatial_scalar)
            self.load_s = ctx.load_from_qp(self.s_qp)
        else:
            self.v_qp = ctx.vector_data_at_qp(case.spatial_vector)
            self.gload_v = ctx.gradient_load_from_qp(self.v_qp)
            if case.ident == 6:
                centers = mesh.nodes[mesh.triangles].mean(axis=1)
                vx, vy = case.spatial_vector(centers[:, 0], centers[:, 1])
                self.v_edge = fluxrecon.reconstruct_p0(
                    mesh, np.column_stack([vx, vy])
                ).coeffs
            else:
                self.v_edge = fluxrecon.reconstruct_from_callable(
                    mesh, case.spatial_vector
                ).coeffs
            # state profile quantities for the analytic error norms
            if case.has_analytic_reference:
                self.s_qp = ctx.data_at_qp(_sin_sin)
                self.load_s = ctx.load_from_qp(self.s_qp)

    def rhs(self, k: int):
        c, s = self.case.mode_pair(k)
        base = self.load_s if self.case.problem == "I" else self.gload_v
        if k == 0:
            return c * base, None
        return c * base, s * base

    def mode_data(self, k: int) -> ModeData:
        c, s = self.case.mode_pair(k)
        if self.case.problem == "I":
            return ModeData(
                k=k,
                y_qp_c=c * self.s_qp,
                y_qp_s=None if k == 0 else s * self.s_qp,
            )
        return ModeData(
            k=k,
            g_qp_c=c * self.v_qp,
            g_qp_s=None if k == 0 else s * self.v_qp,
            g_edge_c=c * self.v_edge,
            g_edge_s=None if k == 0 else s * self.v_edge,
        )

    def reference_cost(self, k: int) -> float:
        return self.case.reference_cost(k)

    def error_norms(self, k: int, sol) -> tuple[float, float]:
        """(||e||^2, ||grad e||^2) of the state mode against the exact one.

        Uses (grad S, grad v_h) = kappa (S, v_h) for the eigenfunction
        profile, so only the profile's load vector is needed.
        """
        case = self.case
        if not case.has_analytic_reference:
            raise ValueError("no analytic reference")
        kappa = case.eigen_kappa
        a_c, a_s = case.exact_state_mode(k)
        parts = [(a_c, sol.y_c)]
        if k > 0:
            parts.append((a_s, sol.y_s))
        l2 = h1 = 0.0
        for a, vec in parts:
            cross = float(self.load_s @ vec)
            l2 += a * a * 0.25 - 2 * a * cross + float(vec @ (self.ctx.M @ vec))
            h1 += a * a * kappa * 0.25 - 2 * a * kappa * cross + float(vec @ (self.ctx.K @ vec))
        return l2, h1
