import numpy as np
import pytest

from mhbounds import oracle
from mhbounds.cases import CaseBind, ExampleCase, box_mode_coefficient, example_data, make_case
from mhbounds.femcore import FemContext
from mhbounds import mesh as meshmod

PI = np.pi


@pytest.mark.parametrize(
    "ident,n_modes,expected",
    [
        (1, 3, 63694.86),
        (1, 8, 106.06),
        (2, 6, 44094.84),
        (2, 10, 10597.20),
        (5, 6, 4796.54),
        (5, 10, 1149.65),
    ],
)
def test_truncation_remainders(ident, n_modes, expected):
    rem = make_case(ident).remainder(n_modes)
    assert abs(rem.value - expected) < 1e-3 * expected


def test_indicator_case_remainder_closed_form():
    case = make_case(3)
    rem = case.remainder(4)
    ks = np.arange(5, 2_000_000, 2)
    brute = 0.5 * 1.0 * np.sum(4.0 / (PI**2 * ks.astype(float) ** 2)) * 0.25
    assert abs(rem.value - brute) < 1e-5 * brute  # brute truncation ~ 1/k_max


def test_indicator_coefficients():
    case = make_case(3)
    coeffs = case.time_coeffs(8)
    assert np.all(coeffs.sin == 0)
    assert coeffs.c0 == 0.5
    assert abs(coeffs.cos[0] + 2 / PI) < 1e-15
    for k in (2, 4, 6, 8):
        assert abs(coeffs.cos[k - 1]) < 1e-15
    assert abs(box_mode_coefficient(3) - 2 / (3 * PI)) < 1e-15


def test_gradient_case_components_match_indicator():
    spatial, pair = example_data(6, 2)
    assert pair == (0.0, 0.0)
    x = np.array([0.7, 0.2])
    y = np.array([0.8, 0.8])
    gx, gy = spatial(x, y)
    assert np.array_equal(gx, gy)
    assert gx[0] == 1.0 and gx[1] == 0.0


def test_exact_states_satisfy_control_relation():
    # u = dy/dt + 2 pi^2 y for states with the eigenfunction profile
    for ident in (1, 2, 4, 5):
        case = make_case(ident)
        t = np.linspace(0.1, 6.0, 40)
        h = 1e-6
        dy = (case.exact_y_time(t + h) - case.exact_y_time(t - h)) / (2 * h)
        u = dy + 2 * PI**2 * case.exact_y_time(t)
        assert np.abs(u - case.exact_u_time(t)).max() < 1e-4 * np.abs(u).max()


@pytest.mark.parametrize(
    "ident,k,expected",
    [
        (1, 0, 126764.9314),
        (1, 1, 479654.7307),
        (2, 0, 355658.3071),
        (4, 0, 9433.2976),
        (5, 0, 26382.6136),
    ],
)
def test_reference_costs_frozen(ident, k, expected):
    # frozen from the independent time-quadrature oracle
    assert abs(make_case(ident).reference_cost(k) - expected) < 1e-5 * expected


def test_reference_routes_agree():
    # exact-state projection versus the continuous mode solve from the data
    for ident in (1, 2, 4, 5):
        case = make_case(ident)
        kappa = case.eigen_kappa
        for k in (0, 1, 3):
            c, s = case.mode_pair(k)
            if case.problem == "I":
                a_c, a_s, b_c, b_s = oracle.scalar_mode_solve(
                    "I", k, case.lam, case.omega, 1.0, 1.0, kappa, c, s
                )
                misfit = ((a_c - c) ** 2 + (a_s - s) ** 2) * 0.25
            else:
                a_c, a_s, b_c, b_s = oracle.scalar_mode_solve(
                    "II", k, case.lam, case.omega, 1.0, 1.0, kappa, c / PI, s / PI
                )
                misfit = ((a_c - c / PI) ** 2 + (a_s - s / PI) ** 2) * (kappa * 0.25)
            via_solve = 0.5 * misfit + (b_c**2 + b_s**2) * 0.25 / (2 * case.lam)
            via_state = case.reference_cost(k)
            # the closed-form pair is admissible but its adjoint is not
            # time-periodic, so its cost sits a squared-distance above the
            # true optimum of the mode system
            assert via_solve <= via_state + 1e-9 * via_state
            tol = 1e-9 if ident in (1, 4) else 5e-4  # cases 2/5 are not time-periodic
            assert abs(via_solve - via_state) < tol * max(via_state, 1e-12)


def test_case_construction():
    with pytest.raises(ValueError):
        make_case(7)
    case = make_case(1, lam=1.0, omega=2.0)
    assert case.lam == 1.0 and case.omega == 2.0
    assert abs(case.period - PI) < 1e-15
    with pytest.raises(ValueError):
        make_case(3).reference_cost(0)


def test_bind_rejects_odd_grid_for_indicator_cases():
    ctx = FemContext(meshmod.build(3))
    with pytest.raises(ValueError):
        CaseBind(make_case(3), ctx)
    with pytest.raises(ValueError):
        CaseBind(make_case(6), ctx)


def test_error_norms_decrease(ctx8, ctx16):
    from mhbounds.saddlesolve import direct_solve
    from mhbounds.systems import build_matrices, build_mode_system

    case = make_case(1)
    errs = []
    for ctx in (ctx8, ctx16):
        mats = build_matrices(ctx)
        bind = CaseBind(case, ctx)
        rc, rs = bind.rhs(1)
        sysk = build_mode_system("I", mats, 1, case.lam, case.omega, rc, rs)
        sol = direct_solve(sysk, cache=False)
        l2, h1 = bind.error_norms(1, sol)
        assert l2 > 0 and h1 > 0
        errs.append((l2, h1))
    assert errs[1][0] < errs[0][0] / 8  # about fourth order in the squared L2 error
    assert errs[1][1] < errs[0][1] / 3  # about second order in the squared H1 error
