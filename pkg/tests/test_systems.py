import numpy as np
import pytest
import scipy.sparse.linalg as spla

from mhbounds import mesh as meshmod, oracle
from mhbounds.femcore import FemContext
from mhbounds.saddlesolve import direct_solve
from mhbounds.systems import build_matrices, build_mode_system

LAM, OMEGA = 0.1, 1.0


def _mats(ctx, sigma=1.0, nu=1.0):
    return build_matrices(ctx, sigma, nu)


def test_mode0_block_layout(ctx2):
    mats = _mats(ctx2)
    sys0 = build_mode_system("I", mats, 0, LAM, OMEGA, np.array([1.0]))
    dense = sys0.matrix.toarray()
    expect = np.array([[0.125, -4.0], [-4.0, -1.25]])
    assert np.abs(dense - expect).max() < 1e-14
    assert np.allclose(sys0.rhs, [1.0, 0.0])


def test_mode1_scalar_matrix_and_solve(ctx2):
    mats = _mats(ctx2)
    M, K = 0.125, 4.0
    sysk = build_mode_system("I", mats, 1, LAM, OMEGA, np.array([2.0]), np.array([-1.0]))
    expect = np.array(
        [
            [M, 0, -K, OMEGA * M],
            [0, M, -OMEGA * M, -K],
            [-K, -OMEGA * M, -M / LAM, 0],
            [OMEGA * M, -K, 0, -M / LAM],
        ]
    )
    assert np.abs(sysk.matrix.toarray() - expect).max() < 1e-14
    x = oracle.dense_solve(expect, sysk.rhs)
    sol = direct_solve(sysk, cache=False)
    got = np.array([sol.y_c[0], sol.y_s[0], sol.p_c[0], sol.p_s[0]])
    assert np.abs(got - x).max() < 1e-12


def test_mode1_problem_ii_scalar(ctx2):
    mats = _mats(ctx2)
    M, K = 0.125, 4.0
    sysk = build_mode_system("II", mats, 1, LAM, OMEGA, np.array([1.0]), np.array([0.5]))
    expect = np.array(
        [
            [K, 0, -K, OMEGA * M],
            [0, K, -OMEGA * M, -K],
            [-K, -OMEGA * M, -M / LAM, 0],
            [OMEGA * M, -K, 0, -M / LAM],
        ]
    )
    assert np.abs(sysk.matrix.toarray() - expect).max() < 1e-14
    x = oracle.dense_solve(expect, sysk.rhs)
    sol = direct_solve(sysk, cache=False)
    got = np.array([sol.y_c[0], sol.y_s[0], sol.p_c[0], sol.p_s[0]])
    assert np.abs(got - x).max() < 1e-12


def test_zero_data_zero_solution(ctx8):
    mats = _mats(ctx8)
    n = ctx8.K.shape[0]
    for problem in ("I", "II"):
        sysk = build_mode_system(problem, mats, 2, LAM, OMEGA, np.zeros(n), np.zeros(n))
        sol = direct_solve(sysk, cache=False)
        assert np.abs(sol.y_c).max() == 0.0
        assert np.abs(sol.p_s).max() == 0.0


def test_operator_symmetry(ctx8, rng):
    mats = _mats(ctx8, sigma=1.3, nu=0.7)
    n = ctx8.K.shape[0]
    for problem in ("I", "II"):
        sysk = build_mode_system(problem, mats, 3, 0.05, 2.0, np.zeros(n))
        A = sysk.matrix
        scale = abs(A).max()
        for _ in range(100):
            x = rng.standard_normal(A.shape[0])
            y = rng.standard_normal(A.shape[0])
            assert abs((A @ x) @ y - x @ (A @ y)) < 1e-13 * scale * np.linalg.norm(x) * np.linalg.norm(y)


def test_schur_elimination_mode0(ctx8, rng):
    # (M + lam K M^-1 K) y = rhs after eliminating the adjoint
    mats = _mats(ctx8)
    n = ctx8.K.shape[0]
    rhs = rng.standard_normal(n)
    sys0 = build_mode_system("I", mats, 0, LAM, OMEGA, rhs)
    sol = direct_solve(sys0, cache=False)
    Minv = spla.factorized(mats.M.tocsc())
    lhs = mats.M @ sol.y_c + LAM * (mats.K @ Minv(mats.K @ sol.y_c))
    assert np.linalg.norm(lhs - rhs) < 1e-9 * np.linalg.norm(rhs)


def test_weak_form_residual(ctx8, rng):
    mats = _mats(ctx8)
    n = ctx8.K.shape[0]
    sysk = build_mode_system("I", mats, 1, LAM, OMEGA, rng.standard_normal(n), rng.standard_normal(n))
    x = spla.spsolve(sysk.matrix.tocsc(), sysk.rhs)
    r = sysk.matrix @ x - sysk.rhs
    for _ in range(20):
        z = rng.standard_normal(len(r))
        assert abs(z @ r) < 1e-8 * np.linalg.norm(z) * np.linalg.norm(sysk.rhs)


def test_problem_ii_tracking_trend(ctx8, rng):
    # for data grad(w), the state tends to w in the energy seminorm as the
    # control penalty vanishes (monotone trend over a decade sweep)
    mats = _mats(ctx8)
    w = rng.standard_normal(ctx8.K.shape[0])
    rhs = mats.K @ w
    errs = []
    for lam in (100.0, 10.0, 1.0, 0.1):
        sys0 = build_mode_system("II", mats, 0, lam, OMEGA, rhs)
        sol = direct_solve(sys0, cache=False)
        e = sol.y_c - w
        errs.append(np.sqrt(e @ (mats.K @ e)))
    assert errs[3] < errs[2] < errs[1] < errs[0]


def test_invalid_inputs(ctx2):
    mats = _mats(ctx2)
    with pytest.raises(ValueError):
        build_mode_system("III", mats, 0, LAM, OMEGA, np.array([1.0]))
    with pytest.raises(ValueError):
        build_mode_system("I", mats, -1, LAM, OMEGA, np.array([1.0]))
    with pytest.raises(ValueError):
        build_matrices(ctx2, sigma=-1.0)
