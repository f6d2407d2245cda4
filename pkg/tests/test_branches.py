import math

import numpy as np
import pytest

from halfeig.branches import bifurcation_csv, bifurcation_interval, \
    branch_csv, estimate_bifurcation_set, intervals_overlap_check, nodal_csv, \
    nodal_solutions_at_unity, oscillatory_family_problem, \
    oscillatory_family_residual, solve_at_amplitude, trace_branch
from halfeig.errors import InputError, NoCrossingError
from halfeig.problems import NonlinearitySpec, constant_problem

RATIONAL = NonlinearitySpec("rational", (1.0, 0.5, 2.0))


@pytest.fixture(scope="module")
def branch_r15():
    return trace_branch(constant_problem(2.0, f=RATIONAL, r=15.0), 1, +1,
                        1e-4, 1e4, 25)


def test_homogeneous_branch_is_flat():
    spec = constant_problem(2.0, f=NonlinearitySpec("homogeneous", (2.0,)))
    expected = math.pi ** 2 / 2.0
    for s in (1e-3, 1.0, 1e3):
        pt = solve_at_amplitude(spec, 1, +1, s, expected * 1.07)
        assert pt.lam == pytest.approx(expected, rel=1e-9)
        # s is the launch slope, so the profile is s*sin(pi x)/pi
        assert pt.sup_norm == pytest.approx(s / math.pi, rel=1e-6)


def test_solve_at_amplitude_point():
    spec = constant_problem(2.0, f=RATIONAL, r=15.0)
    pt = solve_at_amplitude(spec, 1, +1, 1.0, 0.7)
    # frozen regression value
    assert pt.lam == pytest.approx(0.68164200562187238, rel=1e-9)
    assert pt.zero_count == 0
    assert pt.residual <= 1e-8


def test_branch_endpoints(branch_r15):
    lo, hi = branch_r15.endpoints_estimate
    assert lo == pytest.approx(math.pi ** 2 / 15.0, rel=0.02)
    assert hi == pytest.approx(2.0 * math.pi ** 2 / 15.0, rel=0.02)
    assert len(branch_r15.points) == 25
    assert all(pt.zero_count == 0 for pt in branch_r15.points)
    # amplitude-lambda relation is monotone here
    lams = branch_r15.lambdas()
    assert all(b > a for a, b in zip(lams, lams[1:]))


def test_branch_second_class():
    br = trace_branch(constant_problem(2.0, f=RATIONAL, r=50.0), 2, -1,
                      1e-2, 1e2, 5)
    assert all(pt.zero_count == 1 for pt in br.points)
    lo, hi = br.endpoints_estimate
    assert lo == pytest.approx(4.0 * math.pi ** 2 / 50.0, rel=0.05)


def test_branch_requires_limit_ratios():
    osc = constant_problem(2.0, f=NonlinearitySpec("oscillatory_C1", (1.0,)))
    with pytest.raises(InputError):
        trace_branch(osc, 1, +1, 1e-2, 1e2, 5)
    with pytest.raises(InputError):
        trace_branch(constant_problem(2.0), 1, +1, 1e-2, 1e2, 5)


def test_nodal_solutions_crossing():
    spec = constant_problem(2.0, f=RATIONAL, r=15.0)
    sols = nodal_solutions_at_unity(spec, [1], nus=(1,))
    assert len(sols) == 1
    sol = sols[0]
    assert abs(sol.lam - 1.0) <= 1e-9
    assert sol.zero_count == 0
    assert sol.residual <= 1e-8
    assert sol.hypothesis_ok
    assert sol.s == pytest.approx(5.9109175826377145, rel=1e-6)


def test_nodal_solutions_no_crossing():
    spec = constant_problem(2.0, f=RATIONAL, r=3.0)
    with pytest.raises(NoCrossingError) as ei:
        nodal_solutions_at_unity(spec, [1], nus=(1,))
    assert ei.value.branch is not None
    assert len(ei.value.branch.points) > 0


def test_bifurcation_interval():
    lo, hi = bifurcation_interval(constant_problem(2.0), 1, 1.0)
    assert lo == pytest.approx(math.pi ** 2 - 1.0, rel=1e-9)
    assert hi == pytest.approx(math.pi ** 2 + 1.0, rel=1e-9)
    with pytest.raises(InputError):
        bifurcation_interval(constant_problem(2.0, alpha=1.0), 1, 1.0)


def test_overlap_threshold():
    rep = intervals_overlap_check(2.0, 24.0)
    assert rep.threshold == pytest.approx(5.0 * math.pi ** 2 / 2.0, rel=1e-12)
    assert not rep.overlap_guaranteed
    assert rep.consistent
    assert len(rep.intervals) == 5
    rep = intervals_overlap_check(2.0, 25.0)
    assert rep.overlap_guaranteed
    assert rep.first_pair_overlap
    assert rep.consistent


def test_estimates_stay_in_the_interval():
    ests = estimate_bifurcation_set(oscillatory_family_problem(), 1, +1,
                                    s_probe=np.array([1e-3, 2e-3]))
    assert ests
    for e in ests:
        assert -1e-6 <= e.lam <= 2.0 + 1e-6
        assert e.zero_count == 0
        assert e.in_interval


def test_estimate_requires_oscillatory_f():
    with pytest.raises(InputError):
        estimate_bifurcation_set(constant_problem(2.0, f=RATIONAL), 1)
    osc = NonlinearitySpec("oscillatory_C1", (1.0,))
    with pytest.raises(InputError):
        estimate_bifurcation_set(constant_problem(2.0, alpha=1.0, f=osc), 1)


def test_family_residuals():
    for rho in (0.5, -2.0, 1e-2):
        assert oscillatory_family_residual(rho) <= 1e-12
    spec = oscillatory_family_problem()
    assert spec.p == 2.0
    assert spec.length == pytest.approx(math.pi, rel=1e-15)
    assert spec.f.bound_M == 1.0


def test_csv_builders(branch_r15):
    text = branch_csv(branch_r15)
    lines = text.strip().splitlines()
    assert lines[0] == "s,lambda,sup_norm,c1_norm,zero_count,residual"
    assert len(lines) == 26
    cells = lines[1].split(",")
    assert float(cells[0]) == pytest.approx(1e-4)
    assert cells[4] == "0"

    spec = constant_problem(2.0, f=RATIONAL, r=15.0)
    sols = nodal_solutions_at_unity(spec, [1], nus=(1,))
    ntext = nodal_csv(sols)
    nlines = ntext.strip().splitlines()
    assert nlines[0] == "k,nu,s,lambda,zero_count,residual"
    assert nlines[1].startswith("1,+,")

    ests = estimate_bifurcation_set(oscillatory_family_problem(), 1, +1,
                                    s_probe=np.array([1e-3]))
    btext = bifurcation_csv(ests)
    blines = btext.strip().splitlines()
    assert blines[0] == "s,lambda_estimate,in_interval"
    assert all(ln.endswith(",true") or ln.endswith(",false")
               for ln in blines[1:])
