"""Scalar kernels: odd powers, conjugate exponents, arch-length algebra.

The arch-length oracle predicts half-eigenvalues of constant-coefficient
problems from counting arches, which gives the rest of the package an
independent target to converge to.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .errors import InputError, NoBracketError

LAMBDA_CEILING = 1e12
WINDOW_EPS = 1e-9


def _check_p(p: float) -> None:
    if not (isinstance(p, (int, float)) and math.isfinite(p) and p > 1.0):
        raise InputError(f"exponent p must be a finite real > 1, got {p!r}")


def phi_p(s: float, p: float) -> float:
    """Odd power |s|^(p-2)*s, with phi_p(0) = 0 taken by continuity."""
    _check_p(p)
    if s == 0.0:
        return 0.0
    out = math.exp((p - 1.0) * math.log(abs(s)))
    return out if s > 0.0 else -out


def conjugate(p: float) -> float:
    _check_p(p)
    return p / (p - 1.0)


def phi_p_inv(v: float, p: float) -> float:
    """Inverse of phi_p, which is the odd power for the conjugate exponent."""
    return phi_p(v, conjugate(p))


def pi_p(p: float) -> float:
    """Half-period of the generalized sine: 2*pi*(p-1)^(1/p) / (p*sin(pi/p))."""
    _check_p(p)
    return 2.0 * math.pi * (p - 1.0) ** (1.0 / p) / (p * math.sin(math.pi / p))


@dataclass(frozen=True)
class Exponent:
    """An exponent p > 1 together with its conjugate q = p/(p-1)."""

    p: float
    q: float = field(init=False)

    def __post_init__(self):
        _check_p(self.p)
        object.__setattr__(self, "q", conjugate(self.p))
        if abs(1.0 / self.p + 1.0 / self.q - 1.0) > 1e-14:
            raise InputError(f"conjugate pair check failed for p={self.p}")


def bisect_then_secant(g, lo: float, hi: float, rel: float = 1e-12,
                       polish: int = 3) -> float:
    """House root finder: bracketed bisection, then a few secant steps.

    Bisection runs until the bracket is below `rel` relative width, which
    never lies about the root's location; the secant polish just sharpens
    the last few digits and is clamped to the bracket.
    """
    fa = g(lo)
    fb = g(hi)
    if fa == 0.0:
        return lo
    if fb == 0.0:
        return hi
    if (fa < 0.0) == (fb < 0.0):
        raise NoBracketError(f"no sign change on [{lo}, {hi}]")
    while hi - lo > rel * max(1.0, abs(lo), abs(hi)):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        fm = g(mid)
        if fm == 0.0:
            return mid
        if (fm < 0.0) == (fa < 0.0):
            lo, fa = mid, fm
        else:
            hi, fb = mid, fm
    x0, f0 = lo, fa
    x1, f1 = hi, fb
    for _ in range(polish):
        if f1 == f0:
            break
        x2 = x1 - f1 * (x1 - x0) / (f1 - f0)
        if not (lo <= x2 <= hi):
            x2 = 0.5 * (lo + hi)
        x0, f0 = x1, f1
        x1 = x2
        f1 = g(x1)
        if f1 == 0.0:
            break
    return x1


@dataclass(frozen=True)
class ArchEquation:
    """Arch-count data for a constant-coefficient nodal solution.

    A solution with k-1 interior zeros is a chain of k arches of alternating
    sign, the first one signed `nu`. On a positive arch the equation runs at
    frequency weight*lam + alpha, on a negative arch at weight*lam - beta,
    so each arch contributes a closed-form length.
    """

    k: int
    nu: int
    p: float
    alpha: float
    beta: float
    length: float = 1.0
    weight: float = 1.0

    def __post_init__(self):
        _check_p(self.p)
        if self.k < 1 or self.nu not in (-1, 1):
            raise InputError(f"need k >= 1 and nu in {{-1,+1}}, got k={self.k} nu={self.nu}")
        if not (self.length > 0.0 and self.weight > 0.0):
            raise InputError("length and weight must be positive")

    @property
    def arch_counts(self) -> tuple[int, int]:
        """(positive arches, negative arches); they differ by at most one."""
        major = (self.k + 1) // 2
        minor = self.k // 2
        return (major, minor) if self.nu > 0 else (minor, major)

    def window_min(self) -> float:
        """Lower end of the lambda window keeping every arch frequency positive."""
        m_pos, m_neg = self.arch_counts
        lo = -math.inf
        if m_pos > 0:
            lo = max(lo, -self.alpha / self.weight)
        if m_neg > 0:
            lo = max(lo, self.beta / self.weight)
        return lo

    def total_length(self, lam: float) -> float:
        """Sum of arch lengths at this lambda; strictly decreasing in lambda."""
        m_pos, m_neg = self.arch_counts
        pp = pi_p(self.p)
        total = 0.0
        if m_pos > 0:
            base = self.weight * lam + self.alpha
            if base <= 0.0:
                return math.inf
            total += m_pos * pp * base ** (-1.0 / self.p)
        if m_neg > 0:
            base = self.weight * lam - self.beta
            if base <= 0.0:
                return math.inf
            total += m_neg * pp * base ** (-1.0 / self.p)
        return total


def fucik_arch_oracle(eq: ArchEquation) -> float:
    """Unique lambda at which the k arches tile [0, length] exactly.

    Solves total_length(lam) = length by bracketing on
    (window_min + eps, 1e12) and handing off to the house root finder.
    """
    wmin = eq.window_min()
    lo = wmin + WINDOW_EPS
    g = lambda lam: eq.total_length(lam) - eq.length
    glo = g(lo)
    if not glo > 0.0:
        raise NoBracketError(
            f"arch sum already below target at window edge lam={lo}; "
            f"degenerate arch frequencies")
    hi = max(1.0, 2.0 * abs(lo), lo + 1.0)
    while g(hi) >= 0.0:
        lo = hi
        hi *= 4.0
        if hi > LAMBDA_CEILING:
            raise NoBracketError(f"no root below lambda ceiling {LAMBDA_CEILING}")
    return bisect_then_secant(g, lo, hi)
