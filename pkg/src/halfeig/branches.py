"""Solution branches in the (lambda, amplitude) plane.

A branch of nodal class (k, nu) is parametrized by the initial slope
magnitude s: for each s the boundary miss is rooted in lambda, giving one
point (s, lambda(s)). Homogeneous problems give vertical branches; problems
with different limits at zero and infinity drift between the two rescaled
half-eigenvalues, which is what makes solutions at lambda = 1 appear; the
bounded oscillatory perturbation makes lambda(s) oscillate without leaving
its interval.
"""

from __future__ import annotations

import io
import logging
import math
from dataclasses import dataclass

import numpy as np

from .errors import ContinuationStalledError, InputError, NoCrossingError, \
    NoRootError, NumericalError, WrongNodalCountError
from .problems import NonlinearitySpec, ProblemSpec, constant_problem
from .shooting import Trajectory, integrate
from .spectrum import _window_min, eigenvalue, nodal_root

log = logging.getLogger(__name__)

LAM_REL_TOL = 1e-11
RESIDUAL_TOL = 1e-8
CROSSING_TOL = 1e-9
MAX_HALVINGS = 40
IN_INTERVAL_WIDENING = 1e-6


@dataclass(frozen=True)
class BranchPoint:
    """One solution on a branch: slope amplitude s, its lambda, and norms."""

    s: float
    lam: float
    sup_norm: float
    c1_norm: float
    zero_count: int
    residual: float
    trajectory: Trajectory

    def row(self) -> str:
        return (f"{format(self.s, '.17g')},{format(self.lam, '.17g')},"
                f"{format(self.sup_norm, '.17g')},{format(self.c1_norm, '.17g')},"
                f"{self.zero_count},{format(self.residual, '.17g')}")


@dataclass(frozen=True)
class Branch:
    k: int
    nu: int
    points: tuple[BranchPoint, ...]

    @property
    def endpoints_estimate(self) -> tuple[float, float]:
        return self.points[0].lam, self.points[-1].lam

    def lambdas(self) -> np.ndarray:
        return np.array([pt.lam for pt in self.points])

    def amplitudes(self) -> np.ndarray:
        return np.array([pt.s for pt in self.points])


def branch_csv(branch: Branch) -> str:
    buf = io.StringIO()
    buf.write("s,lambda,sup_norm,c1_norm,zero_count,residual\n")
    for pt in branch.points:
        buf.write(pt.row() + "\n")
    return buf.getvalue()


def _ratio_bounds(f: NonlinearitySpec) -> tuple[float, float]:
    """Bounds of f(s)/phi_p(s) over s != 0."""
    if f.kind == "homogeneous":
        c = f.params[0]
        return c, c
    if f.kind == "rational":
        f0, finf, _ = f.params
        return min(f0, finf), max(f0, finf)
    if f.kind == "oscillatory_C1":
        return -f.params[0], f.params[0]
    raise InputError(f"no ratio bounds for nonlinearity kind {f.kind!r}")


def _scan_window_lo(spec: ProblemSpec, k: int, nu: int) -> float:
    """A safe lower end for the lambda scan of the perturbed problem."""
    base = _window_min(spec, k, nu)
    if spec.f is None:
        return base
    rlo, rhi = _ratio_bounds(spec.f)
    if rlo <= 0.0:
        # the scaled main term can vanish; start at the bottom and let the
        # count scan walk up
        return min(0.0, base)
    scale = spec.r * (rhi if base >= 0.0 else rlo)
    return base / scale


def _make_point(s: float, lam: float, traj: Trajectory, k: int) -> BranchPoint:
    residual = abs(traj.miss) / traj.sup_norm
    if residual > RESIDUAL_TOL:
        raise NoRootError(f"branch point at s={s:.6g} has boundary residual "
                          f"{residual:.3e} above {RESIDUAL_TOL:g}")
    return BranchPoint(s=float(s), lam=float(lam), sup_norm=traj.sup_norm,
                       c1_norm=traj.c1_norm, zero_count=k - 1,
                       residual=residual, trajectory=traj)


def solve_at_amplitude(spec: ProblemSpec, k: int, nu: int, s: float,
                       lam_guess: float, rtol: float = 1e-10,
                       atol: float = 1e-12) -> BranchPoint:
    """Root the boundary miss in lambda at fixed slope amplitude s.

    Secant from lam_guess with a bracketed bisection fallback; the
    converged trajectory must carry exactly k-1 simple interior zeros,
    otherwise the root belongs to another nodal class and the caller
    should shrink its continuation step.
    """
    if s <= 0.0:
        raise InputError(f"amplitude must be positive, got {s}")
    slope0 = float(nu) * s

    def miss(lam: float) -> float:
        return integrate(spec, lam, slope0, rtol=rtol, atol=atol).miss

    scale = max(1.0, abs(lam_guess))
    x0 = float(lam_guess)
    x1 = x0 + 1e-4 * scale
    f0, f1 = miss(x0), miss(x1)
    lo = hi = None
    if (f0 < 0.0) != (f1 < 0.0):
        lo, hi, flo = (x0, x1, f0) if x0 < x1 else (x1, x0, f1)
    for _ in range(60):
        if f1 == 0.0:
            x0 = x1
            break
        if f1 == f0:
            break
        step = f1 * (x1 - x0) / (f1 - f0)
        x2 = x1 - step
        if abs(x2 - lam_guess) > 8.0 * scale:
            break
        x0, f0, x1 = x1, f1, x2
        f1 = miss(x1)
        if (f0 < 0.0) != (f1 < 0.0):
            lo, hi, flo = (x0, x1, f0) if x0 < x1 else (x1, x0, f1)
        if abs(x1 - x0) <= LAM_REL_TOL * max(1.0, abs(x1)):
            x0 = x1
            break
    else:
        x0 = x1

    converged = abs(miss(x0)) <= RESIDUAL_TOL  # cheap screen, refined below
    if not converged and lo is None:
        # expanding probe around the guess until the miss changes sign
        d = 1e-3 * scale
        fg = miss(lam_guess)
        for _ in range(50):
            for cand in (lam_guess - d, lam_guess + d):
                fc = miss(cand)
                if (fc < 0.0) != (fg < 0.0):
                    lo, hi = min(cand, lam_guess), max(cand, lam_guess)
                    flo = fc if cand < lam_guess else fg
                    break
            if lo is not None:
                break
            d *= 2.0
        if lo is None:
            raise NoRootError(f"no sign change of the boundary miss near "
                              f"lam={lam_guess:.9g} at s={s:.6g}")
    if not converged and lo is not None:
        while hi - lo > LAM_REL_TOL * max(1.0, abs(lo), abs(hi)):
            mid = 0.5 * (lo + hi)
            fm = miss(mid)
            if fm == 0.0:
                lo = hi = mid
                break
            if (fm < 0.0) == (flo < 0.0):
                lo, flo = mid, fm
            else:
                hi = mid
        x0 = 0.5 * (lo + hi)

    lam = x0
    traj = integrate(spec, lam, slope0, rtol=rtol, atol=atol)
    for _ in range(6):
        if abs(traj.miss) / traj.sup_norm <= 0.5 * RESIDUAL_TOL:
            break
        dlam = 1e-9 * max(1.0, abs(lam))
        slope = (miss(lam + dlam) - miss(lam - dlam)) / (2.0 * dlam)
        if slope == 0.0:
            break
        lam = lam - traj.miss / slope
        traj = integrate(spec, lam, slope0, rtol=rtol, atol=atol)

    count = traj.count_zeros()
    if count != k - 1:
        raise WrongNodalCountError(
            f"root at lam={lam:.9g}, s={s:.6g} has {count} interior zeros, "
            f"wanted {k - 1}", got=count, wanted=k - 1)
    return _make_point(s, lam, traj, k)


def trace_branch(spec: ProblemSpec, k: int, nu: int,
                 s_min: float, s_max: float, n_points: int,
                 rtol: float = 1e-10, atol: float = 1e-12) -> Branch:
    """Follow the (k, nu) branch over a geometric amplitude grid.

    The first point is located by a fresh lambda scan; later points reuse
    a linear-in-log-s predictor. A wrong nodal count at a target amplitude
    means the corrector jumped branches, so the step is halved in log s
    until the corrector lands back on the branch.
    """
    spec.require_valid()
    if spec.f is None:
        raise InputError("trace_branch needs a problem with f")
    if spec.f.f0 is None or spec.f.f_inf is None or spec.f.f0 <= 0.0 \
            or spec.f.f_inf <= 0.0:
        raise InputError("trace_branch needs finite positive limits of "
                         "f(s)/phi_p(s) at zero and infinity")
    if not (0.0 < s_min < s_max) or n_points < 2:
        raise InputError("need 0 < s_min < s_max and n_points >= 2")

    targets = list(np.geomspace(s_min, s_max, n_points))
    lam0, traj0 = nodal_root(spec, k, nu, float(nu) * s_min, rtol=rtol, atol=atol,
                             window_lo=_scan_window_lo(spec, k, nu))
    points = [_make_point(s_min, lam0, traj0, k)]

    halvings = 0
    idx = 1
    while idx < len(targets):
        target = targets[idx]
        prev = points[-1]
        if len(points) >= 2:
            a, b = points[-2], points[-1]
            t = (math.log(target) - math.log(b.s)) / (math.log(b.s) - math.log(a.s))
            guess = b.lam + t * (b.lam - a.lam)
        else:
            guess = prev.lam
        try:
            points.append(solve_at_amplitude(spec, k, nu, target, guess,
                                             rtol=rtol, atol=atol))
            idx += 1
        except (WrongNodalCountError, NoRootError) as exc:
            halvings += 1
            if halvings > MAX_HALVINGS:
                raise ContinuationStalledError(
                    f"branch (k={k}, nu={nu:+d}) stalled near s={prev.s:.6g}: {exc}")
            mid = math.sqrt(prev.s * target)
            if not mid > prev.s * (1.0 + 1e-12):
                raise ContinuationStalledError(
                    f"branch (k={k}, nu={nu:+d}) cannot advance past s={prev.s:.6g}")
            targets.insert(idx, mid)
    return Branch(k=k, nu=nu, points=tuple(points))


@dataclass(frozen=True)
class NodalSolution:
    """A solution of the lambda = 1 problem with prescribed nodal data."""

    k: int
    nu: int
    s: float
    lam: float
    zero_count: int
    residual: float
    trajectory: Trajectory
    hypothesis_ok: bool


def nodal_solutions_at_unity(spec: ProblemSpec, k_range,
                             nus: tuple[int, ...] = (1, -1),
                             s_min: float = 1e-4, s_max: float = 1e4,
                             n_points: int = 25,
                             rtol: float = 1e-10, atol: float = 1e-12
                             ) -> list[NodalSolution]:
    """Solutions of the fixed problem (lambda = 1) found as branch crossings.

    For each requested nodal class the branch is traced over the amplitude
    window and the crossing of lambda(s) with 1 is refined until
    |lambda - 1| <= 1e-9. The per-class window condition (r strictly
    between the half-eigenvalue rescaled by the two limits of f) is
    recorded on each solution; a branch that never crosses raises, with
    the traced branch attached for diagnosis.
    """
    spec.require_valid()
    if spec.f is None or spec.f.f0 is None or spec.f.f_inf is None:
        raise InputError("nodal_solutions_at_unity needs f with finite limits")
    ks = [int(k) for k in (k_range if np.iterable(k_range) else [k_range])]
    base = spec.without_perturbation()
    out: list[NodalSolution] = []
    for k in ks:
        for nu in nus:
            lam_k, _ = nodal_root(base, k, nu, float(nu), rtol=rtol, atol=atol)
            w = sorted((lam_k / spec.f.f0, lam_k / spec.f.f_inf))
            hyp_ok = w[0] < spec.r < w[1]
            branch = trace_branch(spec, k, nu, s_min, s_max, n_points,
                                  rtol=rtol, atol=atol)
            g = branch.lambdas() - 1.0
            idx = None
            for i in range(len(g) - 1):
                if g[i] == 0.0 or (g[i] < 0.0) != (g[i + 1] < 0.0):
                    idx = i
                    break
            if idx is None:
                raise NoCrossingError(
                    f"branch (k={k}, nu={nu:+d}) stays on one side of lambda=1 "
                    f"(range [{branch.lambdas().min():.6g}, "
                    f"{branch.lambdas().max():.6g}], r={spec.r:.6g}, "
                    f"window ({w[0]:.6g}, {w[1]:.6g}))", branch=branch)
            a, b = branch.points[idx], branch.points[idx + 1]
            pa, pb = a, b
            point = a if abs(a.lam - 1.0) < abs(b.lam - 1.0) else b
            for _ in range(80):
                if abs(point.lam - 1.0) <= CROSSING_TOL:
                    break
                ga, gb = pa.lam - 1.0, pb.lam - 1.0
                ls = (math.log(pa.s) * gb - math.log(pb.s) * ga) / (gb - ga)
                ls = min(max(ls, math.log(pa.s) + 1e-15), math.log(pb.s) - 1e-15)
                s_new = math.exp(ls)
                guess = pa.lam + (pb.lam - pa.lam) * (ls - math.log(pa.s)) \
                    / (math.log(pb.s) - math.log(pa.s))
                point = solve_at_amplitude(spec, k, nu, s_new, guess,
                                           rtol=rtol, atol=atol)
                if (point.lam - 1.0 < 0.0) == (ga < 0.0):
                    pa = point
                else:
                    pb = point
            else:
                raise NoRootError(f"crossing refinement for (k={k}, nu={nu:+d}) "
                                  f"did not reach |lambda-1| <= {CROSSING_TOL:g}")
            out.append(NodalSolution(
                k=k, nu=nu, s=point.s, lam=point.lam, zero_count=point.zero_count,
                residual=point.residual, trajectory=point.trajectory,
                hypothesis_ok=hyp_ok))
    return out


def nodal_csv(solutions: list[NodalSolution]) -> str:
    buf = io.StringIO()
    buf.write("k,nu,s,lambda,zero_count,residual\n")
    for sol in solutions:
        buf.write(f"{sol.k},{'+' if sol.nu > 0 else '-'},"
                  f"{format(sol.s, '.17g')},{format(sol.lam, '.17g')},"
                  f"{sol.zero_count},{format(sol.residual, '.17g')}\n")
    return buf.getvalue()


def bifurcation_interval(spec: ProblemSpec, k: int, M: float) -> tuple[float, float]:
    """The interval [lambda_k - M/a0, lambda_k + M/a0], a0 = min weight."""
    if M < 0.0:
        raise InputError(f"bound M must be nonnegative, got {M}")
    base = spec.without_perturbation()
    if not base.jumping_is_zero():
        raise InputError("bifurcation_interval is defined for problems with "
                         "zero jumping coefficients")
    lam_k = eigenvalue(base, k).lam
    d = M / spec.weight.min_value
    return lam_k - d, lam_k + d


@dataclass(frozen=True)
class OverlapReport:
    """Bifurcation-interval geometry for the unit-weight problem on (0, 1).

    overlap_guaranteed applies the sufficient condition M > (2^p + 1)
    pi_p^p / 2 under which the first two intervals provably intersect;
    adjacent_overlap holds the actual interval arithmetic for each
    consecutive pair, which can be true below that threshold.
    """

    p: float
    M: float
    k_max: int
    threshold: float
    overlap_guaranteed: bool
    intervals: tuple[tuple[float, float], ...]
    adjacent_overlap: tuple[bool, ...]

    @property
    def first_pair_overlap(self) -> bool:
        return self.adjacent_overlap[0]

    @property
    def consistent(self) -> bool:
        # the sufficient condition may never contradict the arithmetic
        return (not self.overlap_guaranteed) or self.first_pair_overlap


def intervals_overlap_check(p: float, M: float, k_max: int = 5) -> OverlapReport:
    from .scalars import pi_p
    from .spectrum import closed_form_lambda
    if M < 0.0 or k_max < 2:
        raise InputError("need M >= 0 and k_max >= 2")
    iv = []
    for k in range(1, k_max + 1):
        lam = closed_form_lambda(p, k)
        iv.append((lam - M, lam + M))
    adj = tuple(iv[i + 1][0] <= iv[i][1] for i in range(len(iv) - 1))
    threshold = (2.0 ** p + 1.0) * pi_p(p) ** p / 2.0
    return OverlapReport(p=float(p), M=float(M), k_max=int(k_max),
                         threshold=threshold, overlap_guaranteed=M > threshold,
                         intervals=tuple(iv), adjacent_overlap=adj)


@dataclass(frozen=True)
class BifurcationEstimate:
    s: float
    lam: float
    zero_count: int
    in_interval: bool

    def row(self) -> str:
        return (f"{format(self.s, '.17g')},{format(self.lam, '.17g')},"
                f"{str(self.in_interval).lower()}")


def bifurcation_csv(estimates: list[BifurcationEstimate]) -> str:
    buf = io.StringIO()
    buf.write("s,lambda_estimate,in_interval\n")
    for est in estimates:
        buf.write(est.row() + "\n")
    return buf.getvalue()


def estimate_bifurcation_set(spec: ProblemSpec, k: int, nu: int = 1,
                             s_probe=None, n_grid: int = 33,
                             rtol: float = 1e-8, atol: float = 1e-12
                             ) -> list[BifurcationEstimate]:
    """Probe small amplitudes of a bounded-perturbation problem for the
    lambdas carrying (k, nu) nodal solutions.

    Because the perturbation is bounded by M |phi_p(s)| but not higher
    order, lambda(s) need not converge as s -> 0; every root found at
    every small amplitude is an estimate of a bifurcation-set member, and
    with no higher-order term present they must all fall inside the
    interval of half-width M / min(weight) around the unperturbed
    eigenvalue. Each amplitude is scanned afresh over a padded window
    since lambda(s) may oscillate; probes that bracket no root are
    logged and skipped.

    Default probe amplitudes stay above 1e-4: the oscillatory phase along
    an off-eigenvalue trajectory winds about 1/(4 s) times, so the
    integration cost of one probe grows like 1/s.
    """
    spec.require_valid()
    if spec.f is None or spec.f.kind != "oscillatory_C1":
        raise InputError("estimate_bifurcation_set expects the bounded "
                         "oscillatory perturbation family")
    if not spec.without_perturbation().jumping_is_zero():
        raise InputError("estimate_bifurcation_set needs zero jumping "
                         "coefficients")
    M = spec.f.bound_M
    lam_k = eigenvalue(spec.without_perturbation(), k).lam
    d = M / spec.weight.min_value
    lo, hi = lam_k - d, lam_k + d
    pad = max(0.5 * d, 0.02 * abs(lam_k), 0.1)
    win_lo, win_hi = lo - pad, hi + pad

    if s_probe is None:
        s_probe = np.geomspace(1e-4, 1e-2, 24)
    estimates: list[BifurcationEstimate] = []
    for s in (float(v) for v in s_probe):
        slope0 = float(nu) * s
        grid = np.linspace(win_lo, win_hi, n_grid)
        misses = [integrate(spec, g, slope0, rtol=rtol, atol=atol).miss
                  for g in grid]
        found = 0
        for i in range(n_grid - 1):
            fa, fb = misses[i], misses[i + 1]
            if fa == 0.0:
                root = grid[i]
            elif (fa < 0.0) == (fb < 0.0):
                continue
            else:
                a, b = grid[i], grid[i + 1]
                while b - a > 1e-9 * max(1.0, abs(a), abs(b)):
                    m = 0.5 * (a + b)
                    fm = integrate(spec, m, slope0, rtol=rtol, atol=atol).miss
                    if fm == 0.0:
                        a = b = m
                        break
                    if (fm < 0.0) == (fa < 0.0):
                        a, fa = m, fm
                    else:
                        b = m
                root = 0.5 * (a + b)
            traj = integrate(spec, root, slope0)
            for _ in range(4):
                if abs(traj.miss) / traj.sup_norm <= 1e-10:
                    break
                dlam = 1e-9 * max(1.0, abs(root))
                fl = integrate(spec, root - dlam, slope0).miss
                fh = integrate(spec, root + dlam, slope0).miss
                if fh == fl:
                    break
                root -= traj.miss * (2.0 * dlam) / (fh - fl)
                traj = integrate(spec, root, slope0)
            try:
                count = traj.count_zeros()
            except NumericalError:
                continue
            if count != k - 1:
                continue
            found += 1
            estimates.append(BifurcationEstimate(
                s=s, lam=float(root), zero_count=count,
                in_interval=bool(lo - IN_INTERVAL_WIDENING <= root
                                 <= hi + IN_INTERVAL_WIDENING)))
        if not found:
            log.warning("no (k=%d, nu=%+d) root for probe amplitude %.3g "
                        "in (%.6g, %.6g)", k, nu, s, win_lo, win_hi)
    if not estimates:
        raise NoRootError(f"no nodal-class roots found at any probe amplitude "
                          f"in ({win_lo:.6g}, {win_hi:.6g})")
    if spec.g is None:
        outside = [e for e in estimates if not e.in_interval]
        if outside:
            worst = max(outside, key=lambda e: max(lo - e.lam, e.lam - hi))
            raise NumericalError(
                f"{len(outside)} estimate(s) escape [{lo:.9g}, {hi:.9g}] "
                f"widened by {IN_INTERVAL_WIDENING:g}; worst lam={worst.lam:.9g} "
                f"at s={worst.s:.3g}")
    return estimates


def oscillatory_family_problem(bound: float = 1.0) -> ProblemSpec:
    """The unit-weight problem on (0, pi) with the bounded oscillatory term.

    Its closed solution family (lambda(rho), rho sin x) with lambda(rho) =
    1 - sin(1/|rho|) sweeps every lambda in [0, 2] as rho -> 0, so the
    bifurcation interval of the first nodal class is filled solid.
    """
    return constant_problem(2.0, length=math.pi,
                            f=NonlinearitySpec("oscillatory_C1", (bound,)))


def oscillatory_family_residual(rho: float) -> float:
    """Max pointwise equation residual of the closed family member rho sin x.

    Uses the invariant u^2 + u'^2 = rho^2 of the family, so lambda =
    1 - sin(1/|rho|) must satisfy the equation identically.
    """
    if rho == 0.0:
        raise InputError("the family needs rho != 0")
    spec = oscillatory_family_problem()
    lam = 1.0 - math.sin(1.0 / abs(rho))
    xs = np.linspace(0.0, math.pi, 2001)
    worst = 0.0
    for x in xs:
        u = rho * math.sin(x)
        du = rho * math.cos(x)
        ddu = -rho * math.sin(x)
        worst = max(worst, abs(ddu + spec.rhs(lam, x, u, du)))
    return worst
