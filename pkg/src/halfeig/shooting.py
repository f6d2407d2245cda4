"""Initial value shooting for the planar system u' = phi_inv(v), v' = -rhs.

integrate() marches the compiled stepper and wraps the result in a
Trajectory, which owns the dense interpolant: zeros, norms, endpoint data
and resampling all come off that interpolant rather than the raw nodes.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from . import _kernels as k
from .errors import DegenerateZeroError, InputError, NumericalError, StepFailureError
from .problems import ProblemSpec
from .scalars import phi_p

RTOL = 1e-10
ATOL = 1e-12
MAX_STEPS = 4_000_000
ZERO_XTOL = 1e-12
END_MARGIN_REL = 1e-9      # zeros this close to either end are boundary, not interior
SIMPLE_ZERO_FLOOR = 1e-6   # |u'(z)| below this fraction of max|u'| is degenerate

_STATUS = {k.OK: "ok", k.STEP_UNDERFLOW: "step_failure",
           k.MAX_STEPS: "step_budget_exhausted", k.NONFINITE: "overflow"}

_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass
class Trajectory:
    """One integrated solution with its dense interpolant."""

    p: float
    q: float
    lam: float
    x0: float
    x1: float
    slope0: float
    status: str
    xs: np.ndarray            # accepted nodes, length n+1
    ys: np.ndarray            # (n+1, 2) values of (u, v)
    Q: np.ndarray             # (n, 2, 4) dense quartic coefficients
    _zeros: tuple | None = field(default=None, repr=False)

    @property
    def ok(self) -> bool:
        return self.status == "ok"

    @property
    def n_steps(self) -> int:
        return len(self.xs) - 1

    def require_ok(self) -> None:
        if not self.ok:
            if self.status == "step_failure":
                raise StepFailureError(
                    f"step underflow at x={self.xs[-1]:.6g} (lam={self.lam:.6g})")
            raise NumericalError(f"integration failed: {self.status} (lam={self.lam:.6g})")

    # -- dense evaluation ---------------------------------------------------

    def sample(self, x) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """(u, du, v) at the query points, off the per-step interpolant."""
        xq = np.atleast_1d(np.asarray(x, dtype=float))
        idx = np.clip(np.searchsorted(self.xs, xq, side="right") - 1, 0, self.n_steps - 1)
        h = self.xs[idx + 1] - self.xs[idx]
        t = (xq - self.xs[idx]) / h
        u = self.ys[idx, 0] + h * t * (self.Q[idx, 0, 0] + t * (self.Q[idx, 0, 1]
            + t * (self.Q[idx, 0, 2] + t * self.Q[idx, 0, 3])))
        v = self.ys[idx, 1] + h * t * (self.Q[idx, 1, 0] + t * (self.Q[idx, 1, 1]
            + t * (self.Q[idx, 1, 2] + t * self.Q[idx, 1, 3])))
        du = np.sign(v) * np.abs(v) ** (self.q - 1.0)
        return u, du, v

    @property
    def endpoint(self) -> tuple[float, float]:
        """(u, u') at the right end."""
        u, v = self.ys[-1]
        return float(u), phi_p(v, self.q)

    @property
    def miss(self) -> float:
        return float(self.ys[-1, 0])

    # -- zeros ---------------------------------------------------------------

    def zeros(self) -> tuple[np.ndarray, np.ndarray]:
        """Interior zeros of u and u' there, located on the interpolant."""
        if self._zeros is None:
            span = self.x1 - self.x0
            m, zs, vz = k.find_zeros(self.n_steps, self.xs, self.ys, self.Q,
                                     self.x0 + END_MARGIN_REL * span,
                                     self.x1 - END_MARGIN_REL * span, ZERO_XTOL)
            zs = zs[:m].copy()
            dz = np.sign(vz[:m]) * np.abs(vz[:m]) ** (self.q - 1.0)
            self._zeros = (zs, dz)
        return self._zeros

    @property
    def zero_count(self) -> int:
        return len(self.zeros()[0])

    def count_zeros(self) -> int:
        """Interior zero count, refusing to count any non-simple zero."""
        zs, dz = self.zeros()
        if len(zs):
            floor = SIMPLE_ZERO_FLOOR * self.max_slope
            worst = float(np.min(np.abs(dz)))
            if worst < floor:
                raise DegenerateZeroError(
                    f"zero with |u'|={worst:.3e} under floor {floor:.3e} at lam={self.lam:.9g}")
        return len(zs)

    # -- norms ----------------------------------------------------------------

    @cached_property
    def _coarse(self):
        # 17 samples per step of |u| and |u| + |u'|, vectorized
        t = np.linspace(0.0, 1.0, 17)
        h = (self.xs[1:] - self.xs[:-1])[:, None]
        u0 = self.ys[:-1, 0][:, None]
        v0 = self.ys[:-1, 1][:, None]
        qu = self.Q[:, 0, :]
        qv = self.Q[:, 1, :]
        u = u0 + h * t * (qu[:, [0]] + t * (qu[:, [1]] + t * (qu[:, [2]] + t * qu[:, [3]])))
        v = v0 + h * t * (qv[:, [0]] + t * (qv[:, [1]] + t * (qv[:, [2]] + t * qv[:, [3]])))
        du = np.abs(v) ** (self.q - 1.0)
        return t, np.abs(u), np.abs(u) + du, du

    def _refine(self, values: np.ndarray, absu_only: bool) -> float:
        # golden search around the best coarse samples of a per-step objective
        t, absu, c1v, _ = self._coarse
        grid = absu if absu_only else c1v
        best = float(values.max())
        flat = np.argwhere(grid >= best * (1.0 - 1e-3))
        seen = set()
        out = best
        for i, j in flat[:64]:
            if i in seen:
                continue
            seen.add(i)
            lo = t[max(j - 1, 0)]
            hi = t[min(j + 1, len(t) - 1)]
            g = self._step_objective(int(i), absu_only)
            a, b = lo, hi
            c = b - _GOLDEN * (b - a)
            d = a + _GOLDEN * (b - a)
            fc, fd = g(c), g(d)
            for _ in range(80):
                if b - a < 1e-14:
                    break
                if fc > fd:
                    b, d, fd = d, c, fc
                    c = b - _GOLDEN * (b - a)
                    fc = g(c)
                else:
                    a, c, fc = c, d, fd
                    d = a + _GOLDEN * (b - a)
                    fd = g(d)
            out = max(out, fc, fd, g(lo), g(hi))
        return out

    def _step_objective(self, i: int, absu_only: bool):
        h = self.xs[i + 1] - self.xs[i]
        u0, v0 = self.ys[i]
        qu = self.Q[i, 0]
        qv = self.Q[i, 1]
        qm1 = self.q - 1.0

        def g(t: float) -> float:
            u = u0 + h * t * (qu[0] + t * (qu[1] + t * (qu[2] + t * qu[3])))
            if absu_only:
                return abs(u)
            v = v0 + h * t * (qv[0] + t * (qv[1] + t * (qv[2] + t * qv[3])))
            return abs(u) + abs(v) ** qm1

        return g

    @cached_property
    def sup_norm(self) -> float:
        _, absu, _, _ = self._coarse
        return self._refine(absu, absu_only=True)

    @cached_property
    def c1_norm(self) -> float:
        """max of |u| + |u'| over the domain."""
        _, _, c1v, _ = self._coarse
        return self._refine(c1v, absu_only=False)

    @cached_property
    def max_slope(self) -> float:
        _, _, _, du = self._coarse
        return float(du.max())

    # -- transforms -----------------------------------------------------------

    def scaled(self, c: float) -> "Trajectory":
        """The trajectory of c*u, exact by homogeneity (only for scale c > 0)."""
        if not c > 0.0:
            raise InputError("scale must be positive")
        cv = c ** (self.p - 1.0)
        ys = self.ys.copy()
        ys[:, 0] *= c
        ys[:, 1] *= cv
        Q = self.Q.copy()
        Q[:, 0, :] *= c
        Q[:, 1, :] *= cv
        return Trajectory(p=self.p, q=self.q, lam=self.lam, x0=self.x0, x1=self.x1,
                          slope0=c * self.slope0, status=self.status, xs=self.xs,
                          ys=ys, Q=Q)

    def normalized(self) -> "Trajectory":
        return self.scaled(1.0 / self.sup_norm)

    # -- export ---------------------------------------------------------------

    def to_csv(self, samples: int = 1001) -> str:
        xq = np.linspace(self.x0, self.x1, samples)
        u, du, v = self.sample(xq)
        buf = io.StringIO()
        buf.write("x,u,du,v\n")
        for row in zip(xq, u, du, v):
            buf.write(",".join(format(val, ".17g") for val in row) + "\n")
        return buf.getvalue()


def integrate(spec: ProblemSpec, lam: float, slope0: float,
              rtol: float = RTOL, atol: float = ATOL,
              max_steps: int = MAX_STEPS, check: bool = True) -> Trajectory:
    """Shoot from u(0)=0 with u'(0)=slope0 across (0, length)."""
    if slope0 == 0.0:
        raise InputError("slope0 must be nonzero (the zero solution is not a trajectory)")
    kinds, wpar, apar, bpar, fpar, gpar = spec.packed()
    v0 = phi_p(slope0, spec.p)
    status, n, xs, ys, Q = k.integrate(
        spec.p, spec.q, float(lam), spec.r, kinds, wpar, apar, bpar, fpar, gpar,
        0.0, spec.length, 0.0, v0, rtol, atol, max_steps)
    traj = Trajectory(p=spec.p, q=spec.q, lam=float(lam), x0=0.0, x1=spec.length,
                      slope0=float(slope0), status=_STATUS[status],
                      xs=xs[: n + 1].copy(), ys=ys[: n + 1].copy(), Q=Q[:n].copy())
    if check:
        traj.require_ok()
    return traj


def integrate_raw(p: float, lam: float, kinds, wpar, apar, bpar, fpar, gpar,
                  x0: float, x1: float, u0: float, du0: float, r: float = 1.0,
                  rtol: float = RTOL, atol: float = ATOL,
                  max_steps: int = MAX_STEPS, check: bool = True) -> Trajectory:
    """Shoot an arbitrary packed problem from arbitrary initial data."""
    if not x1 > x0:
        raise InputError("need x1 > x0")
    q = p / (p - 1.0)
    v0 = phi_p(du0, p)
    status, n, xs, ys, Q = k.integrate(
        p, q, float(lam), float(r), kinds, wpar, apar, bpar, fpar, gpar,
        float(x0), float(x1), float(u0), v0, rtol, atol, max_steps)
    traj = Trajectory(p=p, q=q, lam=float(lam), x0=float(x0), x1=float(x1),
                      slope0=float(du0), status=_STATUS[status],
                      xs=xs[: n + 1].copy(), ys=ys[: n + 1].copy(), Q=Q[:n].copy())
    if check:
        traj.require_ok()
    return traj


def warmup() -> None:
    """Force the jit kernels to compile on a tiny problem."""
    from .problems import constant_problem
    spec = constant_problem(p=2.0, length=0.25, weight=1.0)
    t = integrate(spec, 1.0, 1.0, rtol=1e-6, atol=1e-9)
    t.zeros()
    t.sup_norm
