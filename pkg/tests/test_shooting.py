import math

import numpy as np
import pytest
from scipy.integrate import solve_ivp

from halfeig.errors import DegenerateZeroError, InputError, NumericalError
from halfeig.problems import NonlinearitySpec, constant_problem
from halfeig.scalars import phi_p, pi_p
from halfeig.shooting import Trajectory, integrate, warmup


def test_linear_eigenfunction_profile():
    # at lam = pi^2 the unit-slope solution is sin(pi x)/pi
    spec = constant_problem(2.0)
    traj = integrate(spec, math.pi ** 2, 1.0)
    assert traj.ok
    xq = np.linspace(0.0, 1.0, 101)
    u, du, _ = traj.sample(xq)
    assert np.max(np.abs(u - np.sin(math.pi * xq) / math.pi)) < 1e-10
    assert np.max(np.abs(du - np.cos(math.pi * xq))) < 1e-9
    assert abs(traj.miss) < 1e-10
    # the interior-max refinement is good to ~1e-7 relative, not more
    assert traj.sup_norm == pytest.approx(1.0 / math.pi, rel=1e-6)
    assert traj.c1_norm == pytest.approx(
        max(abs(math.sin(x) / math.pi) + abs(math.cos(x))
            for x in np.linspace(0, math.pi, 20001)), rel=1e-6)


def test_zeros_of_high_mode():
    spec = constant_problem(2.0)
    traj = integrate(spec, (5.0 * math.pi) ** 2, 1.0)
    z, dz = traj.zeros()
    assert z == pytest.approx([0.2, 0.4, 0.6, 0.8], abs=1e-11)
    # slopes alternate and keep unit magnitude
    assert dz == pytest.approx([-1.0, 1.0, -1.0, 1.0], rel=1e-9)
    assert traj.zero_count == 4
    assert traj.count_zeros() == 4


def test_against_scipy_dop853():
    # independent integrator on the same first-order system
    p = 3.0
    q = 1.5
    lam = 100.0
    alpha, beta = 2.0, -1.0

    def rhs(x, y):
        u, v = y
        du = phi_p(v, q)
        jump = alpha * phi_p(u, p) if u > 0 else beta * phi_p(-u, p)
        dv = -(lam * phi_p(u, p) + jump)
        return (du, dv)

    sol = solve_ivp(rhs, (0.0, 1.0), (0.0, 1.0), method="DOP853",
                    rtol=1e-12, atol=1e-14, dense_output=True)
    assert sol.success

    spec = constant_problem(p, alpha=alpha, beta=beta)
    traj = integrate(spec, lam, 1.0, rtol=1e-12, atol=1e-14)
    xq = np.linspace(0.0, 1.0, 257)
    u, _, v = traj.sample(xq)
    ref = sol.sol(xq)
    assert np.max(np.abs(u - ref[0])) < 1e-9
    assert np.max(np.abs(v - ref[1])) < 1e-9


def test_negative_launch_symmetry():
    # with zero jumping the equation is odd: u(-slope) = -u(slope)
    spec = constant_problem(2.5)
    up = integrate(spec, 40.0, 1.0)
    dn = integrate(spec, 40.0, -1.0)
    xq = np.linspace(0.0, 1.0, 64)
    assert np.max(np.abs(up.sample(xq)[0] + dn.sample(xq)[0])) < 1e-12


def test_scaled_homogeneity():
    spec = constant_problem(3.0)
    traj = integrate(spec, 50.0, 1.0)
    doubled = traj.scaled(2.0)
    xq = np.linspace(0.0, 1.0, 33)
    assert doubled.sample(xq)[0] == pytest.approx(2.0 * traj.sample(xq)[0], rel=1e-12)
    # v = phi_p(u') scales by 2^(p-1)
    assert doubled.sample(xq)[2] == pytest.approx(4.0 * traj.sample(xq)[2], rel=1e-12)
    assert doubled.sup_norm == pytest.approx(2.0 * traj.sup_norm, rel=1e-10)
    with pytest.raises(InputError):
        traj.scaled(-1.0)
    norm = traj.normalized()
    assert norm.sup_norm == pytest.approx(1.0, rel=1e-10)


def test_endpoint_and_miss():
    spec = constant_problem(2.0)
    traj = integrate(spec, 30.0, 2.0)
    u_end, v_end = traj.endpoint
    assert traj.miss == u_end
    assert traj.xs[0] == 0.0 and traj.xs[-1] == 1.0


def test_to_csv():
    traj = integrate(constant_problem(2.0), math.pi ** 2, 1.0)
    text = traj.to_csv(samples=11)
    lines = text.strip().splitlines()
    assert lines[0] == "x,u,du,v"
    assert len(lines) == 12
    first = lines[1].split(",")
    assert float(first[0]) == 0.0
    assert float(first[2]) == pytest.approx(1.0, abs=1e-12)


def test_step_budget():
    with pytest.raises(NumericalError, match="step_budget"):
        integrate(constant_problem(2.0), 1e6, 1.0, max_steps=10)
    # check=False hands back the partial trajectory instead
    traj = integrate(constant_problem(2.0), 1e6, 1.0, max_steps=10, check=False)
    assert not traj.ok


def test_degenerate_zero_detection():
    # a flat segment is indistinguishable from a double zero: build a fake
    # trajectory that touches zero with zero slope in the interior
    xs = np.linspace(0.0, 1.0, 5)
    u = np.array([0.0, 1.0, 0.0, -1.0, 0.0])
    v = np.array([1.0, 0.0, 0.0, 0.0, 1.0])
    Q = np.zeros((4, 2, 4))
    h = 0.25
    for i in range(4):
        Q[i, 0, 0] = (u[i + 1] - u[i]) / h
        Q[i, 1, 0] = (v[i + 1] - v[i]) / h
    traj = Trajectory(p=2.0, q=2.0, lam=1.0, x0=0.0, x1=1.0, slope0=1.0,
                      status="ok", xs=xs, ys=np.stack([u, v], axis=1), Q=Q)
    with pytest.raises(DegenerateZeroError):
        traj.count_zeros()


def test_zero_slope_rejected():
    with pytest.raises(InputError):
        integrate(constant_problem(2.0), 10.0, 0.0)


def test_oscillatory_term_uses_the_velocity_phase():
    # the perturbation must read its phase from (u^2 + u'^2)^(-1/2), not
    # from u alone: on the family solution rho*sin(x) with rho = 1 the
    # phase is constant and the equation closes with lam = 1 - sin(1)
    spec = constant_problem(2.0, length=math.pi,
                            f=NonlinearitySpec("oscillatory_C1", (1.0,)))
    lam = 1.0 - math.sin(1.0)
    traj = integrate(spec, lam, 1.0)
    xq = np.linspace(0.0, math.pi, 201)
    u = traj.sample(xq)[0]
    assert np.max(np.abs(u - np.sin(xq))) < 1e-9
    assert abs(traj.miss) < 1e-9


def test_warmup_idempotent():
    warmup()
    warmup()
