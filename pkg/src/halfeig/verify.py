"""Named verification suites.

Each suite runs a fixed battery of checks against independent expectations:
closed forms, the piecewise arch-count oracle, analytic integrals, or
structural invariants. Suites return a report; they never raise on a failed
check (setup errors still propagate). One suite is informational only: it
reports the measured split of the two first-index half-eigenvalues for
equal jumping coefficients instead of asserting the equality, which the
constant-coefficient arch computation contradicts.
"""

from __future__ import annotations

import json
import math
import time
from dataclasses import dataclass

import numpy as np

from .branches import estimate_bifurcation_set, intervals_overlap_check, \
    nodal_solutions_at_unity, oscillatory_family_problem, \
    oscillatory_family_residual, trace_branch
from .comparison import nonexistence_scan, picone_young_gap, sturm_verdict, \
    zero_divergence_probe
from .errors import HalfeigError, InputError, WindowError
from .problems import CoefficientFn, NonlinearitySpec, ProblemSpec, \
    constant_problem
from .scalars import fucik_arch_oracle, ArchEquation, pi_p
from .shooting import integrate
from .spectrum import closed_form_lambda, eigenvalue, half_eigenvalue

TOLERANCES = {
    "closed_form_rel": 1e-8,
    "identity_rel": 1e-9,
    "fucik_rel": 1e-7,
    "family_residual": 1e-12,
    "coverage_band": (0.05, 1.95),
    "interval_widening": 1e-6,
    "picone_floor": -1e-9,
    "picone_equality": 1e-10,
    "branch_endpoint_rel": 0.02,
    "crossing_residual": 1e-8,
    "min_miss_floor": 1e-3,
    "simple_zero_floor": 1e-6,
}


@dataclass(frozen=True)
class SuiteCase:
    name: str
    ok: bool
    worst: float | None = None
    detail: str = ""

    def line(self) -> str:
        out = f"{'pass' if self.ok else 'FAIL'} {self.name}"
        if self.worst is not None:
            out += f" [worst {self.worst:.3e}]"
        if self.detail:
            out += f" ({self.detail})"
        return out


@dataclass(frozen=True)
class SuiteReport:
    suite: str
    cases: tuple[SuiteCase, ...]
    asserting: bool = True
    elapsed: float = 0.0
    seed: int | None = None

    @property
    def n_cases(self) -> int:
        return len(self.cases)

    @property
    def n_pass(self) -> int:
        return sum(1 for c in self.cases if c.ok)

    @property
    def ok(self) -> bool:
        return (not self.asserting) or self.n_pass == self.n_cases

    @property
    def worst_error(self) -> float | None:
        vals = [c.worst for c in self.cases if c.worst is not None]
        return max(vals) if vals else None

    def to_json(self) -> str:
        return json.dumps({
            "suite": self.suite,
            "asserting": self.asserting,
            "n_cases": self.n_cases,
            "n_pass": self.n_pass,
            "ok": self.ok,
            "worst_error": self.worst_error,
            "seed": self.seed,
            "tolerances": {k: v for k, v in TOLERANCES.items()
                           if not isinstance(v, tuple)},
            "details": [c.line() for c in self.cases],
        }, indent=2) + "\n"


def _case(name: str, ok: bool, worst: float | None = None,
          detail: str = "") -> SuiteCase:
    return SuiteCase(name=name, ok=bool(ok), worst=worst, detail=detail)


# --- individual suites ------------------------------------------------------


def _suite_closed_form_spectrum(seed: int) -> list[SuiteCase]:
    tol = TOLERANCES["closed_form_rel"]
    cases = []
    for p in (1.5, 2.0, 3.0):
        spec = constant_problem(p)
        worst = 0.0
        for k in range(1, 6):
            ref = closed_form_lambda(p, k)
            got = eigenvalue(spec, k).lam
            worst = max(worst, abs(got - ref) / ref)
        cases.append(_case(f"p={p}: lambda_k matches (k*pi_p)^p for k<=5",
                           worst <= tol, worst))
    return cases


def _suite_reduction_identities(seed: int) -> list[SuiteCase]:
    tol = TOLERANCES["identity_rel"]
    cases = []
    for p in (2.0, 3.0):
        base = constant_problem(p)
        lam1 = eigenvalue(base, 1).lam
        got = half_eigenvalue(constant_problem(p, alpha=1.0, beta=0.0), 1, -1).lam
        err = abs(got - lam1) / lam1
        cases.append(_case(f"p={p}: beta=0 makes the first minus pair the "
                           f"plain eigenvalue", err <= tol, err))
        got = half_eigenvalue(constant_problem(p, alpha=0.0, beta=1.0), 1, +1).lam
        err = abs(got - lam1) / lam1
        cases.append(_case(f"p={p}: alpha=0 makes the first plus pair the "
                           f"plain eigenvalue", err <= tol, err))
        worst = 0.0
        for k in range(1, 6):
            ref = eigenvalue(base, k).lam
            for nu in (+1, -1):
                got = half_eigenvalue(base, k, nu).lam
                worst = max(worst, abs(got - ref) / ref)
        cases.append(_case(f"p={p}: zero jumping collapses both signs onto "
                           f"lambda_k for k<=5", worst <= tol, worst))
    # a variable-weight version of the first identity
    w = CoefficientFn("affine", (1.0, 1.0))
    zero = CoefficientFn.constant(0.0)
    two = CoefficientFn.constant(2.0)
    base = ProblemSpec(p=2.0, length=1.0, weight=w, alpha=zero, beta=zero)
    jump = ProblemSpec(p=2.0, length=1.0, weight=w, alpha=two, beta=zero)
    lam1 = eigenvalue(base, 1).lam
    got = half_eigenvalue(jump, 1, -1).lam
    err = abs(got - lam1) / lam1
    cases.append(_case("affine weight: beta=0 identity for the minus pair",
                       err <= tol, err))
    return cases


def _suite_fucik_oracle(seed: int) -> list[SuiteCase]:
    tol = TOLERANCES["fucik_rel"]
    cases = []
    for alpha, beta in ((1.0, 0.0), (2.0, 1.0), (0.5, -0.5)):
        for p in (2.0, 3.0):
            spec = constant_problem(p, alpha=alpha, beta=beta)
            worst = 0.0
            for k in (1, 2, 3):
                for nu in (+1, -1):
                    ref = fucik_arch_oracle(ArchEquation(
                        k=k, nu=nu, p=p, alpha=alpha, beta=beta))
                    got = half_eigenvalue(spec, k, nu).lam
                    worst = max(worst, abs(got - ref) / max(1.0, abs(ref)))
            cases.append(_case(
                f"alpha={alpha} beta={beta} p={p}: solver matches the "
                f"arch-count oracle (k<=3, both signs)", worst <= tol, worst))
    return cases


def _suite_oscillatory_family(seed: int) -> list[SuiteCase]:
    cases = []
    tol = TOLERANCES["family_residual"]
    worst = 0.0
    for rho in (1.0, -1.0, 1e-3, -1e-3, 2.0):
        worst = max(worst, oscillatory_family_residual(rho))
    cases.append(_case("closed family solves the equation to machine"
                       " precision", worst <= tol, worst))

    spec = oscillatory_family_problem()
    lo_band, hi_band = TOLERANCES["coverage_band"]
    wid = TOLERANCES["interval_widening"]
    # probe amplitudes chosen so the perturbation phase 1/s sweeps one full
    # turn: the estimates then sample the whole interval
    probes = 1.0 / np.linspace(100.0, 100.0 + 2.0 * math.pi, 48)
    ests = estimate_bifurcation_set(spec, 1, +1, s_probe=probes)
    lams = np.array([e.lam for e in ests])
    cases.append(_case(
        f"estimates fill the first interval (n={len(ests)}, "
        f"range [{lams.min():.4f}, {lams.max():.4f}])",
        lams.min() <= lo_band and lams.max() >= hi_band))
    inside = all(-wid <= v <= 2.0 + wid for v in lams)
    cases.append(_case("every estimate stays inside [0, 2] (widened 1e-6)",
                       inside, float(max(np.max(lams - 2.0), np.max(-lams), 0.0))))

    # containment for other exponents, bounds and nodal classes on (0, 1)
    for p in (2.0, 3.0):
        for M in (0.5, 1.0):
            for k in (1, 2):
                pspec = constant_problem(
                    p, f=NonlinearitySpec("oscillatory_C1", (M,)))
                lam_k = closed_form_lambda(p, k)
                try:
                    sub = estimate_bifurcation_set(
                        pspec, k, +1, s_probe=np.geomspace(2e-3, 2e-2, 6))
                    bad = [e for e in sub
                           if not (lam_k - M - wid <= e.lam <= lam_k + M + wid)]
                    worst_out = max((max(lam_k - M - e.lam, e.lam - lam_k - M)
                                     for e in sub), default=0.0)
                    cases.append(_case(
                        f"p={p} M={M} k={k}: {len(sub)} estimates inside "
                        f"[{lam_k - M:.4f}, {lam_k + M:.4f}]",
                        not bad, worst_out))
                except HalfeigError as exc:
                    cases.append(_case(f"p={p} M={M} k={k}: estimate run",
                                       False, detail=exc.oneline()))
    return cases


def _suite_branch_endpoints(seed: int) -> list[SuiteCase]:
    tol = TOLERANCES["branch_endpoint_rel"]
    cases = []
    f = NonlinearitySpec("rational", (1.0, 0.5, 2.0))
    spec = constant_problem(2.0, f=f, r=15.0)
    br = trace_branch(spec, 1, +1, 1e-4, 1e4, 25)
    lo_ref = math.pi ** 2 / 15.0
    hi_ref = 2.0 * math.pi ** 2 / 15.0
    lo, hi = br.endpoints_estimate
    e_lo = abs(lo - lo_ref) / lo_ref
    e_hi = abs(hi - hi_ref) / hi_ref
    cases.append(_case("small-amplitude endpoint near lambda_1/(r f0)",
                       e_lo <= tol, e_lo))
    cases.append(_case("large-amplitude endpoint near lambda_1/(r f_inf)",
                       e_hi <= tol, e_hi))

    sols = nodal_solutions_at_unity(spec, [1], nus=(1,))
    s1 = sols[0]
    cases.append(_case(
        "a positive solution of the fixed problem exists at r=15",
        s1.zero_count == 0 and s1.residual <= TOLERANCES["crossing_residual"]
        and abs(s1.lam - 1.0) <= 1e-9, abs(s1.lam - 1.0)))

    spec2 = constant_problem(2.0, f=f, r=50.0)
    sols2 = nodal_solutions_at_unity(spec2, [2], nus=(1,))
    s2 = sols2[0]
    cases.append(_case(
        "a one-node solution exists at r=50",
        s2.zero_count == 1 and s2.residual <= TOLERANCES["crossing_residual"]
        and abs(s2.lam - 1.0) <= 1e-9, abs(s2.lam - 1.0)))

    hom = constant_problem(2.0, f=NonlinearitySpec("homogeneous", (1.0,)))
    brh = trace_branch(hom, 1, +1, 1e-3, 1e3, 9)
    lams = brh.lambdas()
    dev = float(np.max(np.abs(lams - lams[0])) / lams[0])
    cases.append(_case("homogeneous f gives an amplitude-independent branch",
                       dev <= 1e-9, dev))
    return cases


def _suite_nodal_existence(seed: int) -> list[SuiteCase]:
    # both nodal classes k=1,2 solvable at the same r: needs the two windows
    # (lambda_k/f0, lambda_k/f_inf) to intersect, so the limit ratio must
    # exceed lambda_2/lambda_1 = 4; f_inf=0.2 gives ratio 5 and r=44 sits
    # inside both windows
    f = NonlinearitySpec("rational", (1.0, 0.2, 2.0))
    spec = constant_problem(2.0, f=f, r=44.0)
    cases = []
    sols = nodal_solutions_at_unity(spec, [1, 2], nus=(1, -1))
    for nu in (1, -1):
        mine = [s for s in sols if s.nu == nu]
        counts = sorted(s.zero_count for s in mine)
        worst = max((s.residual for s in mine), default=math.inf)
        cases.append(_case(
            f"nu={nu:+d}: two solutions with node counts 0 and 1",
            len(mine) == 2 and counts == [0, 1]
            and worst <= TOLERANCES["crossing_residual"], worst))
    hyp = all(s.hypothesis_ok for s in sols)
    cases.append(_case("r=44 satisfies the window condition for both classes",
                       hyp))
    return cases


def _suite_sturm(seed: int) -> list[SuiteCase]:
    rng = np.random.default_rng(seed)
    n = 100
    n_prop = 0
    bad: list[str] = []
    for i in range(n):
        p = float(rng.choice([2.0, 2.5, 3.0]))
        b1 = float(rng.uniform(5.0, 80.0))
        alpha = float(rng.uniform(-4.0, 4.0))
        beta = float(rng.uniform(-4.0, 4.0))
        nu = 1 if rng.random() < 0.5 else -1
        proportional_case = i % 5 == 0
        if proportional_case:
            if alpha > beta:
                alpha, beta = beta, alpha
            b2 = b1
            start = (0.0, float(nu) * float(rng.uniform(0.5, 3.0)))
        else:
            b2 = max(b1, b1 + alpha - beta) + float(rng.uniform(0.5, 40.0))
            if rng.random() < 0.3:
                start = (float(rng.uniform(0.1, 1.0)), float(nu))
            else:
                start = (0.0, float(nu))
        coef = b1 + alpha if nu > 0 else b1 - beta
        d = pi_p(p) * coef ** (-1.0 / p)
        c1 = CoefficientFn.constant
        v = sturm_verdict(c1(b1, d), c1(b2, d), c1(alpha, d), c1(beta, d),
                          p, (0.0, d), nu=nu, u2_start=start)
        if v.kind == "proportional":
            n_prop += 1
            if b2 != b1:
                bad.append(f"case {i}: proportional though b2 != b1")
        elif v.kind != "zero_found":
            bad.append(f"case {i}: {v.kind} ({v.detail})")
        elif proportional_case:
            bad.append(f"case {i}: expected proportional, got zero at {v.tau}")
    cases = [
        _case(f"{n} random arch comparisons end in a zero or proportionality",
              not bad, detail="; ".join(bad[:3])),
        _case(f"proportional verdicts ({n_prop}) occur only for b2 = b1",
              n_prop == sum(1 for i in range(n) if i % 5 == 0) and not bad),
    ]
    return cases


def _suite_picone(seed: int) -> list[SuiteCase]:
    floor = TOLERANCES["picone_floor"]
    eq_tol = TOLERANCES["picone_equality"]
    cases = []
    gaps = []

    spec2 = constant_problem(2.0)
    u1 = half_eigenvalue(spec2, 1, +1).trajectory
    for c, label in ((1.0, "identical"), (3.0, "triple")):
        g = picone_young_gap(u1, u1.scaled(c), 2.0)
        gaps.append(g)
        cases.append(_case(f"p=2 {label} pair has zero gap", abs(g) <= eq_tol,
                           abs(g)))

    # one-arch comparison with the analytic value 3/16 for unit slopes
    tr2 = integrate(spec2, 4.0 * math.pi ** 2, 1.0)
    tr1 = integrate(spec2, math.pi ** 2, 1.0)
    g = picone_young_gap(tr2, tr1, 2.0, interval=(0.0, 0.5))
    gaps.append(g)
    err = abs(g - 3.0 / 16.0)
    cases.append(_case("p=2 half-interval gap equals 3/16", err <= 1e-9, err))

    for p in (2.5, 3.0):
        spec = constant_problem(p)
        e1 = half_eigenvalue(spec, 1, +1)
        e2 = half_eigenvalue(spec, 2, +1)
        z = float(e2.trajectory.zeros()[0][0])
        g = picone_young_gap(e2.trajectory, e1.trajectory, p, interval=(0.0, z))
        gaps.append(g)
        cases.append(_case(f"p={p} distinct pair has strictly positive gap",
                           g > 1e-6, detail=f"gap {g:.6g}"))
        g = picone_young_gap(e1.trajectory, e1.trajectory.scaled(2.5), p)
        gaps.append(g)
        cases.append(_case(f"p={p} proportional pair has zero gap",
                           abs(g) <= eq_tol, abs(g)))

    worst_neg = min(gaps)
    cases.append(_case("no gap dips under the nonnegativity floor",
                       worst_neg >= floor, worst_neg))
    return cases


def _suite_zero_divergence(seed: int) -> list[SuiteCase]:
    cases = []
    spec = constant_problem(2.0)
    counts = zero_divergence_probe(spec, [(k * math.pi) ** 2 for k in range(1, 11)])
    cases.append(_case("p=2: count at the k-th eigenvalue is k-1 (k<=10)",
                       counts == list(range(10)),
                       detail=f"counts {counts}"))
    counts3 = zero_divergence_probe(constant_problem(3.0),
                                    list(np.geomspace(10.0, 3000.0, 12)))
    cases.append(_case("p=3: counts never decrease along a lambda grid",
                       all(b >= a for a, b in zip(counts3, counts3[1:])),
                       detail=f"counts {counts3}"))
    cj = zero_divergence_probe(constant_problem(2.0, alpha=5.0, beta=-3.0),
                               list(np.linspace(5.0, 300.0, 10)))
    cases.append(_case("jumping problem: counts never decrease",
                       all(b >= a for a, b in zip(cj, cj[1:])),
                       detail=f"counts {cj}"))
    return cases


def _suite_nonexistence(seed: int) -> list[SuiteCase]:
    floor = TOLERANCES["min_miss_floor"]
    cases = []
    mid = (math.pi ** 2 + 4.0 * math.pi ** 2) / 2.0
    rep = nonexistence_scan(
        constant_problem(2.0, f=NonlinearitySpec("homogeneous", (mid,))), 1)
    cases.append(_case(
        f"constant ratio midway between the first two eigenvalues: "
        f"min normalized miss {rep.min_miss:.4f} over {rep.n_slopes} slopes",
        rep.consistent and rep.min_miss >= floor and not rep.candidates))
    rep2 = nonexistence_scan(
        constant_problem(2.0, f=NonlinearitySpec("rational", (15.0, 20.0, 2.0))), 1)
    cases.append(_case(
        f"ratio window (15, 20) inside the first gap: min normalized miss "
        f"{rep2.min_miss:.4f}", rep2.consistent and rep2.min_miss >= floor
        and not rep2.candidates))
    try:
        nonexistence_scan(
            constant_problem(2.0, f=NonlinearitySpec("rational", (5.0, 20.0, 2.0))), 1)
        cases.append(_case("ratio dipping under the window is rejected", False))
    except WindowError:
        cases.append(_case("ratio dipping under the window is rejected", True))
    return cases


def _suite_intervals_overlap(seed: int) -> list[SuiteCase]:
    cases = []
    r24 = intervals_overlap_check(2.0, 24.0)
    r25 = intervals_overlap_check(2.0, 25.0)
    thr = r24.threshold
    cases.append(_case(
        f"M=24 < threshold {thr:.4f}: overlap not guaranteed (interval "
        f"arithmetic still shows {r24.first_pair_overlap})",
        not r24.overlap_guaranteed and r24.consistent))
    cases.append(_case(
        f"M=25 > threshold {thr:.4f}: overlap guaranteed and observed",
        r25.overlap_guaranteed and r25.first_pair_overlap))
    r1 = intervals_overlap_check(2.0, 1.0)
    cases.append(_case("M=1: no adjacent intervals touch",
                       not any(r1.adjacent_overlap)))
    r0 = intervals_overlap_check(2.0, 0.0)
    singletons = all(lo == hi for lo, hi in r0.intervals)
    cases.append(_case("M=0: intervals collapse to disjoint points",
                       singletons and not any(r0.adjacent_overlap)))
    return cases


def _suite_equal_jumping_report(seed: int) -> list[SuiteCase]:
    # informational: equal jumping coefficients do NOT merge the two signs
    # of the first pair; the arch computation puts them one unit either
    # side of the plain eigenvalue and the solver agrees
    spec = constant_problem(2.0, alpha=1.0, beta=1.0)
    plus = half_eigenvalue(spec, 1, +1).lam
    minus = half_eigenvalue(spec, 1, -1).lam
    ref_plus = math.pi ** 2 - 1.0
    ref_minus = math.pi ** 2 + 1.0
    e_plus = abs(plus - ref_plus)
    e_minus = abs(minus - ref_minus)
    return [
        _case(f"measured first plus value {plus:.9f} (oracle {ref_plus:.9f})",
              e_plus <= 1e-7, e_plus),
        _case(f"measured first minus value {minus:.9f} (oracle {ref_minus:.9f})",
              e_minus <= 1e-7, e_minus),
        _case(f"the two signs differ by {minus - plus:.9f}: the equal-"
              f"coefficient merge claim fails at k=1", True,
              detail="informational"),
    ]


SUITES = {
    "closed-form-spectrum": (_suite_closed_form_spectrum, True),
    "reduction-identities": (_suite_reduction_identities, True),
    "fucik-oracle": (_suite_fucik_oracle, True),
    "oscillatory-family": (_suite_oscillatory_family, True),
    "branch-endpoints": (_suite_branch_endpoints, True),
    "nodal-existence": (_suite_nodal_existence, True),
    "sturm": (_suite_sturm, True),
    "picone": (_suite_picone, True),
    "zero-divergence": (_suite_zero_divergence, True),
    "nonexistence": (_suite_nonexistence, True),
    "intervals-overlap": (_suite_intervals_overlap, True),
    "equal-jumping-report": (_suite_equal_jumping_report, False),
}


def run_suite(name: str, seed: int = 42) -> SuiteReport:
    if name not in SUITES:
        raise InputError(f"unknown suite {name!r}; choose from "
                         f"{', '.join(sorted(SUITES))}")
    fn, asserting = SUITES[name]
    t0 = time.perf_counter()
    cases = fn(seed)
    return SuiteReport(suite=name, cases=tuple(cases), asserting=asserting,
                       elapsed=time.perf_counter() - t0, seed=seed)
