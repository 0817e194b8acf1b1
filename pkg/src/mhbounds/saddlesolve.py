"""Preconditioned MinRes for the mode systems, with a sparse direct oracle.

The block-diagonal preconditioners are applied through exact sparse
factorizations of their diagonal blocks.  For problem II's Schur-complement
blocks containing M K^{-1} M, the inverse is applied either through an
equivalent augmented sparse factorization (default, exact) or through an
inner conjugate-gradient iteration with a spectrally equivalent
factorized preconditioner.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .systems import ModeMatrices, ModeSolution, ModeSystem, split_solution


@dataclass
class SolveStats:
    iterations: int
    relative_residual: float
    wall_time: float
    converged: bool
    breakdown: bool = False
    residuals: list = field(default_factory=list)

    def monotone(self) -> bool:
        r = self.residuals
        return all(r[i + 1] <= r[i] * (1 + 1e-12) for i in range(len(r) - 1))

    def trace_to_csv(self, path) -> None:
        """Per-iteration preconditioned residual norms (debug aid)."""
        with open(path, "w") as fh:
            fh.write("iteration,residual\n")
            for i, r in enumerate(self.residuals):
                fh.write(f"{i},{r!r}\n")


class BlockDiagPrecond:
    """Symmetric positive definite block-diagonal preconditioner.

    `solvers` is a list of (block_size, apply_inverse) pairs; `matvecs`
    optionally carries the forward block applications for spectrum probes.
    """

    def __init__(self, solvers, matvecs=None, family: str = "none"):
        self.solvers = solvers
        self.matvecs = matvecs
        self.family = family
        self.dim = sum(n for n, _ in solvers)

    def apply(self, r: np.ndarray) -> np.ndarray:
        out = np.empty_like(r)
        at = 0
        for n, solve in self.solvers:
            out[at : at + n] = solve(r[at : at + n])
            at += n
        return out

    def matvec(self, v: np.ndarray) -> np.ndarray:
        if self.matvecs is None:
            raise NotImplementedError("forward application not available")
        out = np.empty_like(v)
        at = 0
        for (n, _), mv in zip(self.solvers, self.matvecs):
            out[at : at + n] = mv(v[at : at + n])
            at += n
        return out


class IdentityPrecond:
    family = "none"

    def apply(self, r: np.ndarray) -> np.ndarray:
        return r

    def matvec(self, v: np.ndarray) -> np.ndarray:
        return v


def _factor(mat: sp.spmatrix):
    return spla.factorized(mat.tocsc())


def build_precond_I(mats: ModeMatrices, k: int, lam: float, omega: float) -> BlockDiagPrecond:
    """diag(D_k, D_k, D_k/lam, D_k/lam) with D_k = sqrt(lam) K_nu + k w sqrt(lam) M_sigma + M."""
    if lam <= 0:
        raise ValueError("lam must be positive")
    sq = np.sqrt(lam)
    D = (sq * mats.K_nu + k * omega * sq * mats.M_sigma + mats.M).tocsc()
    solve = _factor(D)
    n = D.shape[0]
    mv = D.dot
    if k == 0:
        solvers = [(n, solve), (n, lambda r: lam * solve(r))]
        matvecs = [mv, lambda v: mv(v) / lam]
    else:
        solvers = [
            (n, solve),
            (n, solve),
            (n, lambda r: lam * solve(r)),
            (n, lambda r: lam * solve(r)),
        ]
        matvecs = [mv, mv, lambda v: mv(v) / lam, lambda v: mv(v) / lam]
    return BlockDiagPrecond(solvers, matvecs, family="I")


class _AugmentedSchurSolve:
    """Exact inverse of B + c^2 * M A^{-1} M via one sparse factorization.

    Solving (B + c^2 M A^{-1} M) x = b is equivalent to the augmented
    symmetric system [[B, c M], [c M, -A]] (x, z) = (b, 0).
    """

    def __init__(self, B: sp.spmatrix, M: sp.spmatrix, A: sp.spmatrix, c: float):
        n = B.shape[0]
        aug = sp.bmat([[B, c * M], [c * M, -A]], format="csc")
        self._solve = _factor(aug)
        self._n = n

    def __call__(self, b: np.ndarray) -> np.ndarray:
        rhs = np.concatenate([b, np.zeros(self._n)])
        return self._solve(rhs)[: self._n]


class _InnerCgSchurSolve:
    """Inverse of B + c^2 M A^{-1} M by preconditioned conjugate gradients.

    Matvecs use a cached factorization of A; the CG preconditioner is a
    factorization of the spectrally equivalent B + c M.
    """

    def __init__(self, B, M, A, c: float, tol: float = 1e-12):
        self.B = B.tocsr()
        self.M = M.tocsr()
        self.c = c
        self.tol = tol
        self._A_solve = _factor(A)
        self._prec = _factor((B + abs(c) * M).tocsc())

    def _matvec(self, v):
        return self.B @ v + self.c**2 * (self.M @ self._A_solve(self.M @ v))

    def __call__(self, b: np.ndarray) -> np.ndarray:
        op = spla.LinearOperator(self.B.shape, matvec=self._matvec)
        prec = spla.LinearOperator(self.B.shape, matvec=self._prec)
        x, info = spla.cg(op, b, rtol=self.tol, atol=0.0, M=prec, maxiter=400)
        if info != 0:
            raise RuntimeError(f"inner CG did not converge (info={info})")
        return x


def build_precond_II(
    mats: ModeMatrices,
    k: int,
    lam: float,
    omega: float,
    family: int = 0,
    inner: str = "exact",
) -> BlockDiagPrecond:
    """Schur-complement preconditioners for problem II (constant sigma, nu).

    family 0: diag(K, K, S_k, S_k), S_k = nu K + M/lam + (k w sigma)^2 M K^{-1} M
    family 1: diag(R_k, R_k, M/lam, M/lam), R_k = K + (k w sigma)^2 lam M + nu^2 lam K M^{-1} K
    """
    K, M = mats.K, mats.M
    nu, sigma = mats.nu, mats.sigma
    n = K.shape[0]
    kws = k * omega * sigma
    schur_cls = _AugmentedSchurSolve if inner == "exact" else _InnerCgSchurSolve
    if family == 0:
        B = (nu * K + (1.0 / lam) * M).tocsr()
        K_solve = _factor(K)
        if k == 0:
            S_solve = _factor(B.tocsc())
            solvers = [(n, K_solve), (n, S_solve)]
            matvecs = [K.dot, B.dot]
        else:
            S_solve = schur_cls(B, M, K, kws)
            S_mv = lambda v: B @ v + kws**2 * (M @ K_solve(M @ v))
            solvers = [(n, K_solve), (n, K_solve), (n, S_solve), (n, S_solve)]
            matvecs = [K.dot, K.dot, S_mv, S_mv]
    elif family == 1:
        M_solve = _factor(M)
        if k == 0:
            R_solve = schur_cls(K, K, M, np.sqrt(lam) * nu)
            solvers = [(n, lambda r: lam * M_solve(r)), (n, R_solve)]
            matvecs = [lambda v: (M @ v) / lam,
                       lambda v: K @ v + lam * nu**2 * (K @ M_solve(K @ v))]
        else:
            B = (K + kws**2 * lam * M).tocsr()
            R_solve = schur_cls(B, K, M, np.sqrt(lam) * nu)
            R_mv = lambda v: B @ v + lam * nu**2 * (K @ M_solve(K @ v))
            solvers = [
                (n, R_solve),
                (n, R_solve),
                (n, lambda r: lam * M_solve(r)),
                (n, lambda r: lam * M_solve(r)),
            ]
            matvecs = [R_mv, R_mv, lambda v: (M @ v) / lam, lambda v: (M @ v) / lam]
    else:
        raise ValueError("family must be 0 or 1")
    return BlockDiagPrecond(solvers, matvecs, family=f"II-Schur{family}")


def minres(
    system: ModeSystem,
    precond=None,
    tol: float = 1e-8,
    maxiter: int = 200,
    fixed_iters: int | None = None,
) -> tuple[ModeSolution, SolveStats]:
    """Preconditioned minimal residual iteration.

    Stops when the preconditioned residual drops below tol * initial, after
    maxiter steps, or after exactly `fixed_iters` steps when given.  Lanczos
    breakdown with a nonconverged residual is reported in the stats.
    """
    A = system.matrix
    b = system.rhs
    x, stats = minres_raw(
        A, b, precond, tol=tol, maxiter=maxiter, fixed_iters=fixed_iters
    )
    return split_solution(system, x), stats


def minres_raw(A, b, precond=None, tol=1e-8, maxiter=200, fixed_iters=None):
    if precond is None:
        precond = IdentityPrecond()
    start = time.perf_counter()
    n = b.shape[0]
    x = np.zeros(n)
    if n == 0:
        return x, SolveStats(0, 0.0, 0.0, True, residuals=[0.0])

    limit = fixed_iters if fixed_iters is not None else maxiter
    eps = np.finfo(float).eps

    r2 = b.copy()
    y = precond.apply(r2)
    beta1_sq = float(np.dot(r2, y))
    if beta1_sq < 0:
        raise ValueError("preconditioner is not positive definite")
    beta1 = np.sqrt(beta1_sq)
    trace = [beta1]
    if beta1 == 0.0:
        return x, SolveStats(0, 0.0, time.perf_counter() - start, True, residuals=trace)

    oldb = 0.0
    beta = beta1
    dbar = epsln = 0.0
    phibar = beta1
    cs, sn = -1.0, 0.0
    w = np.zeros(n)
    w2 = np.zeros(n)
    r1 = r2.copy()
    breakdown = False
    itn = 0
    while itn < limit:
        itn += 1
        v = y / beta
        y = A @ v
        if itn >= 2:
            y -= (beta / oldb) * r1
        alfa = float(np.dot(v, y))
        y -= (alfa / beta) * r2
        r1 = r2
        r2 = y
        y = precond.apply(r2)
        oldb = beta
        beta_sq = float(np.dot(r2, y))
        if beta_sq < 0:
            raise ValueError("preconditioner is not positive definite")
        beta = np.sqrt(beta_sq)

        oldeps = epsln
        delta = cs * dbar + sn * alfa
        gbar = sn * dbar - cs * alfa
        epsln = sn * beta
        dbar = -cs * beta
        gamma = max(np.sqrt(gbar * gbar + beta * beta), eps)
        cs = gbar / gamma
        sn = beta / gamma
        phi = cs * phibar
        phibar = sn * phibar

        w1 = w2
        w2 = w
        w = (v - oldeps * w1 - delta * w2) / gamma
        x += phi * w
        trace.append(abs(phibar))

        if fixed_iters is None and abs(phibar) <= tol * beta1:
            break
        if beta <= eps * beta1:
            # Krylov space exhausted; converged if the residual is negligible
            breakdown = abs(phibar) > tol * beta1
            break

    relres = abs(phibar) / beta1
    converged = relres <= tol or (fixed_iters is not None and itn == fixed_iters)
    return x, SolveStats(
        iterations=itn,
        relative_residual=relres,
        wall_time=time.perf_counter() - start,
        converged=converged and not breakdown,
        breakdown=breakdown,
        residuals=trace,
    )


_direct_cache: dict[int, object] = {}


def direct_solve(system: ModeSystem, cache: bool = True) -> ModeSolution:
    """Sparse LU oracle; raises on singular systems or poor residuals."""
    key = id(system.matrix)
    solve = _direct_cache.get(key) if cache else None
    if solve is None:
        solve = spla.factorized(system.matrix.tocsc())
        if cache:
            _direct_cache[key] = solve
    x = solve(system.rhs)
    resid = np.linalg.norm(system.matrix @ x - system.rhs)
    scale = np.linalg.norm(system.rhs)
    if scale > 0 and resid > 1e-10 * scale:
        raise RuntimeError(f"direct solve residual {resid:.2e} exceeds tolerance")
    return split_solution(system, x)
