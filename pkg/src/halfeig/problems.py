"""Problem data: coefficients, nonlinearities, and the assembled BVP.

A ProblemSpec is a frozen value object. Solvers take it together with a
spectral parameter; nothing in here integrates anything.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from functools import cached_property

import numpy as np

from . import _kernels as k
from .errors import InputError
from .scalars import _check_p, conjugate

BOUND_SAMPLES = 10001

_COEF_KINDS = {
    "constant": k.K_CONST,
    "affine": k.K_AFFINE,
    "polynomial": k.K_POLY,
    "piecewise_linear_samples": k.K_PWL,
}

_F_KINDS = {
    "homogeneous": k.F_HOMOGENEOUS,
    "rational": k.F_RATIONAL,
    "oscillatory_C1": k.F_OSCILLATORY,
    "higher_order_C2": k.F_POWER,
}


@dataclass(frozen=True)
class CoefficientFn:
    """A coefficient x -> value on [0, length].

    kinds:
      constant                  params (c,)
      affine                    params (c0, c1): c0 + c1*x
      polynomial                params (c0, ..., cn): sum ci * x^i
      piecewise_linear_samples  params = values at uniformly spaced nodes
    """

    kind: str
    params: tuple[float, ...]
    length: float = 1.0

    def __post_init__(self):
        if self.kind not in _COEF_KINDS:
            raise InputError(f"unknown coefficient kind {self.kind!r}")
        if not (math.isfinite(self.length) and self.length > 0.0):
            raise InputError(f"coefficient domain length must be positive, got {self.length}")
        pars = tuple(float(v) for v in self.params)
        if not pars or not all(math.isfinite(v) for v in pars):
            raise InputError(f"bad params for coefficient {self.kind}: {self.params!r}")
        need = {"constant": 1, "affine": 2}.get(self.kind)
        if need is not None and len(pars) != need:
            raise InputError(f"{self.kind} takes {need} params, got {len(pars)}")
        if self.kind == "piecewise_linear_samples" and len(pars) < 2:
            raise InputError("piecewise_linear_samples needs at least 2 values")
        object.__setattr__(self, "params", pars)

    @classmethod
    def constant(cls, c: float, length: float = 1.0) -> "CoefficientFn":
        return cls("constant", (c,), length)

    def __call__(self, x):
        xs = np.asarray(x, dtype=float)
        if self.kind == "constant":
            out = np.full_like(xs, self.params[0])
        elif self.kind == "affine":
            out = self.params[0] + self.params[1] * xs
        elif self.kind == "polynomial":
            out = np.polynomial.polynomial.polyval(xs, np.array(self.params))
        else:
            nodes = np.linspace(0.0, self.length, len(self.params))
            out = np.interp(xs, nodes, np.array(self.params))
        return float(out) if np.isscalar(x) else out

    @cached_property
    def _bounds(self) -> tuple[float, float]:
        vals = self(np.linspace(0.0, self.length, BOUND_SAMPLES))
        return float(vals.min()), float(vals.max())

    @property
    def min_value(self) -> float:
        return self._bounds[0]

    @property
    def max_value(self) -> float:
        return self._bounds[1]

    @property
    def is_zero(self) -> bool:
        return self.min_value == 0.0 and self.max_value == 0.0

    def packed(self) -> tuple[int, np.ndarray]:
        if self.kind == "piecewise_linear_samples":
            par = np.array((self.length,) + self.params)
        else:
            par = np.array(self.params)
        return _COEF_KINDS[self.kind], par


@dataclass(frozen=True)
class NonlinearitySpec:
    """An autonomous nonlinearity s -> f(s), tied to the exponent p at call time.

    kinds:
      homogeneous      params (c,):            c * phi_p(s)
      rational         params (f0, finf, th):  phi_p(s)*(f0 + finf*|s|^th)/(1+|s|^th)
      oscillatory_C1   params (M,):            M * phi_p(s) * sin(1/|s|), 0 at 0
      higher_order_C2  params (c, sigma):      c * |s|^(p-1+sigma) * sign(s)

    The oscillatory family is special: along a trajectory its phase is read
    off the invariant (u^2 + u'^2)^(-1/2), so evaluated pointwise with
    derivative 0 it reduces to the displayed formula, while the ODE sees a
    perturbation that stays coherent instead of averaging itself away. Its
    pointwise bound |f(s)| <= M*|phi_p(s)| holds either way.
    """

    kind: str
    params: tuple[float, ...]

    def __post_init__(self):
        if self.kind not in _F_KINDS:
            raise InputError(f"unknown nonlinearity kind {self.kind!r}")
        pars = tuple(float(v) for v in self.params)
        need = {"homogeneous": 1, "rational": 3, "oscillatory_C1": 1, "higher_order_C2": 2}
        if len(pars) != need[self.kind] or not all(math.isfinite(v) for v in pars):
            raise InputError(f"bad params for nonlinearity {self.kind}: {self.params!r}")
        object.__setattr__(self, "params", pars)

    @property
    def f0(self) -> float | None:
        """Limit of f(s)/phi_p(s) as s -> 0, when finite."""
        if self.kind == "homogeneous":
            return self.params[0]
        if self.kind == "rational":
            return self.params[0]
        if self.kind == "higher_order_C2":
            return 0.0
        return None

    @property
    def f_inf(self) -> float | None:
        """Limit of f(s)/phi_p(s) as |s| -> infinity, when finite."""
        if self.kind == "homogeneous":
            return self.params[0]
        if self.kind == "rational":
            return self.params[1]
        return None

    @property
    def bound_M(self) -> float | None:
        """M with |f(s)| <= M*|phi_p(s)| for the oscillatory family."""
        return self.params[0] if self.kind == "oscillatory_C1" else None

    def __call__(self, s, p: float, ds=0.0):
        _check_p(p)
        code, par = self.packed()
        if np.isscalar(s):
            return k.f_eval(code, par, float(p), float(s), float(ds))
        ss = np.asarray(s, dtype=float)
        dd = np.broadcast_to(np.asarray(ds, dtype=float), ss.shape)
        return np.array([k.f_eval(code, par, float(p), float(a), float(b))
                         for a, b in zip(ss.ravel(), dd.ravel())]).reshape(ss.shape)

    def packed(self) -> tuple[int, np.ndarray]:
        return _F_KINDS[self.kind], np.array(self.params)


_NULL_PAR = np.zeros(1)


@dataclass(frozen=True)
class ProblemSpec:
    """One boundary value problem on (0, length) with Dirichlet ends.

    The sign convention: a solution solves

        (phi_p(u'))' + [main term] + alpha*phi_p(u+) + beta*phi_p(u-) = 0

    where u+ = max(u, 0), u- = -min(u, 0), and the main term is
    lam*weight*phi_p(u) without f, or lam*r*weight*f(u) when f is present.
    A perturbing g (and the oscillatory f) add on top of the plain main term.
    """

    p: float
    length: float
    weight: CoefficientFn
    alpha: CoefficientFn
    beta: CoefficientFn
    f: NonlinearitySpec | None = None
    g: NonlinearitySpec | None = None
    r: float = 1.0

    @property
    def q(self) -> float:
        return conjugate(self.p)

    def validate(self) -> "ValidationReport":
        checks = []

        def chk(name, ok, detail=""):
            checks.append(ValidationCheck(name, bool(ok), detail))

        chk("p_gt_1", isinstance(self.p, (int, float)) and math.isfinite(self.p) and self.p > 1.0,
            f"p={self.p}")
        chk("length_positive", math.isfinite(self.length) and self.length > 0.0,
            f"length={self.length}")
        chk("r_positive", math.isfinite(self.r) and self.r > 0.0, f"r={self.r}")
        for name, coef in (("weight", self.weight), ("alpha", self.alpha), ("beta", self.beta)):
            chk(f"{name}_domain", abs(coef.length - self.length) <= 1e-12 * max(1.0, self.length),
                f"{name}.length={coef.length} vs {self.length}")
        chk("weight_positive", self.weight.min_value > 0.0,
            f"min={self.weight.min_value}")
        if self.f is not None:
            chk("f_kind", self.f.kind in ("homogeneous", "rational", "oscillatory_C1"),
                self.f.kind)
            if self.f.kind == "homogeneous":
                chk("f_scale_positive", self.f.params[0] > 0.0, str(self.f.params))
            if self.f.kind == "rational":
                f0, finf, th = self.f.params
                chk("f_limits_positive", f0 > 0.0 and finf > 0.0 and th > 0.0,
                    f"f0={f0} finf={finf} theta={th}")
            if self.f.kind == "oscillatory_C1":
                M = self.f.params[0]
                chk("f_bound_nonnegative", M >= 0.0, f"M={M}")
                if self.p > 1.0 and M >= 0.0:
                    rng = np.random.default_rng(0)
                    s = np.concatenate([
                        10.0 ** rng.uniform(-8, 4, 5000),
                        -(10.0 ** rng.uniform(-8, 4, 5000)),
                    ])
                    fv = self.f(s, self.p)
                    bound = M * np.abs(s) ** (self.p - 1.0)
                    chk("f_pointwise_bound", np.all(np.abs(fv) <= bound * (1 + 1e-12) + 1e-300),
                        "sampled |f(s)| <= M|phi_p(s)|")
        if self.g is not None:
            chk("g_kind", self.g.kind == "higher_order_C2", self.g.kind)
            if self.g.kind == "higher_order_C2":
                chk("g_order_positive", self.g.params[1] > 0.0, f"sigma={self.g.params[1]}")
        return ValidationReport(tuple(checks))

    def require_valid(self) -> None:
        rep = self.validate()
        if not rep.ok:
            raise InputError("invalid problem: " + "; ".join(
                f"{c.name} ({c.detail})" for c in rep.checks if not c.ok))

    def rhs(self, lam: float, x: float, u: float, du: float = 0.0) -> float:
        """Full right-hand side at one point, derivative passed explicitly."""
        kinds, wpar, apar, bpar, fpar, gpar = self.packed()
        from .scalars import phi_p
        v = phi_p(du, self.p)
        return k.rhs_full(float(x), float(u), v, self.p, self.q, float(lam), self.r,
                          kinds, wpar, apar, bpar, fpar, gpar)

    def packed(self):
        wk, wpar = self.weight.packed()
        ak, apar = self.alpha.packed()
        bk, bpar = self.beta.packed()
        if self.f is not None:
            fk, fpar = self.f.packed()
        else:
            fk, fpar = k.F_NONE, _NULL_PAR
        if self.g is not None:
            gk, gpar = self.g.packed()
        else:
            gk, gpar = k.F_NONE, _NULL_PAR
        kinds = np.array([wk, ak, bk, fk, gk], dtype=np.int64)
        return kinds, wpar, apar, bpar, fpar, gpar

    def without_perturbation(self) -> "ProblemSpec":
        """The same problem with f and g stripped."""
        return replace(self, f=None, g=None)

    def jumping_is_zero(self) -> bool:
        return self.alpha.is_zero and self.beta.is_zero


@dataclass(frozen=True)
class ValidationCheck:
    name: str
    ok: bool
    detail: str = ""


@dataclass(frozen=True)
class ValidationReport:
    checks: tuple[ValidationCheck, ...]

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.checks)

    def lines(self) -> list[str]:
        return [f"{'pass' if c.ok else 'FAIL'} {c.name}" + (f" [{c.detail}]" if c.detail else "")
                for c in self.checks]


def constant_problem(p: float, length: float = 1.0, weight: float = 1.0,
                     alpha: float = 0.0, beta: float = 0.0,
                     f: NonlinearitySpec | None = None,
                     g: NonlinearitySpec | None = None, r: float = 1.0) -> ProblemSpec:
    """Convenience builder for constant-coefficient problems."""
    return ProblemSpec(
        p=float(p), length=float(length),
        weight=CoefficientFn.constant(weight, length),
        alpha=CoefficientFn.constant(alpha, length),
        beta=CoefficientFn.constant(beta, length),
        f=f, g=g, r=float(r))


# ---------------------------------------------------------------------------
# problem files: flat "key = value" text with dotted keys for the nested parts

_SCALAR_KEYS = ("p", "domain_length", "r")
_SECTION_KEYS = ("weight", "alpha", "beta", "f")
_ALLOWED_KEYS = set(_SCALAR_KEYS) | {
    f"{s}.{leaf}" for s in _SECTION_KEYS for leaf in ("kind", "params")}


def parse_problem(text: str, where: str = "<problem>") -> ProblemSpec:
    """Parse problem text: one `key = value` per line, `#` comments.

    Keys are p, domain_length, r, and kind/params under weight, alpha,
    beta, and f (written as e.g. `weight.kind`). Unknown keys are an error,
    as are duplicates and missing required fields. f and r are optional.
    """
    found: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise InputError(f"{where}:{lineno}: expected 'key = value', got {raw.strip()!r}")
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if key not in _ALLOWED_KEYS:
            raise InputError(f"{where}:{lineno}: unknown key {key!r}")
        if key in found:
            raise InputError(f"{where}:{lineno}: duplicate key {key!r}")
        if not value:
            raise InputError(f"{where}:{lineno}: empty value for {key!r}")
        found[key] = value

    def need(key: str) -> str:
        if key not in found:
            raise InputError(f"{where}: missing required key {key!r}")
        return found[key]

    def as_float(key: str, value: str) -> float:
        try:
            return float(value)
        except ValueError:
            raise InputError(f"{where}: key {key!r} needs a real number, got {value!r}") from None

    def as_floats(key: str, value: str) -> tuple[float, ...]:
        parts = [t for t in value.replace(",", " ").split() if t]
        try:
            return tuple(float(t) for t in parts)
        except ValueError:
            raise InputError(f"{where}: key {key!r} needs a list of reals, got {value!r}") from None

    p = as_float("p", need("p"))
    length = as_float("domain_length", need("domain_length"))
    r = as_float("r", found["r"]) if "r" in found else 1.0

    def coef(section: str) -> CoefficientFn:
        kind = need(f"{section}.kind")
        params = as_floats(f"{section}.params", need(f"{section}.params"))
        return CoefficientFn(kind, params, length)

    f_spec = None
    if "f.kind" in found or "f.params" in found:
        f_spec = NonlinearitySpec(need("f.kind"), as_floats("f.params", need("f.params")))

    spec = ProblemSpec(p=p, length=length, weight=coef("weight"),
                       alpha=coef("alpha"), beta=coef("beta"), f=f_spec, r=r)
    spec.require_valid()
    return spec


def load_problem(path) -> ProblemSpec:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_problem(fh.read(), where=str(path))
