"""
Non-vanishing certificates.

A certificate evaluates a sufficient inequality for non-vanishing, records
every intermediate quantity, and passes only when each inequality holds with
a relative margin above the error budget.  Region integrals compare the
gauge mass of the kernel over the strip above height 1/N with the mass below
it, next to the analytic lower and upper bounds used to prove the
non-vanishing criterion.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Callable

import numpy as np
from scipy import special as sps

from .kernel import KernelSpec, kernel_eval
from .metaplectic import HalfIntegerWeight
from .quadrature import integrate
from .series import DomainError
from .special import gamma_median, log_gamma, upper_incomplete_gamma

CERTIFIED = "certified-nonvanishing"
PRECONDITION_FAILED = "precondition-failed"
INEQUALITY_FAILED = "inequality-failed"
INCONCLUSIVE = "inconclusive-margin"


# --------------------------------------------------------------------------
# gauges


@dataclass(frozen=True)
class Gauge:
    """z -> f(|z|) for a concave nondecreasing f with f(0) = 0."""

    kind: str
    param: float = 1.0
    func: Callable | None = field(default=None, compare=False)

    def __post_init__(self):
        if self.kind == "power" and not 0 < self.param <= 1:
            raise ValueError("power gauge needs 0 < alpha <= 1")
        if self.kind == "clamp" and not self.param > 0:
            raise ValueError("clamp gauge needs c > 0")
        if self.kind == "custom" and self.func is None:
            raise ValueError("custom gauge needs a function")
        if self.kind not in ("absolute", "power", "clamp", "custom"):
            raise ValueError(f"unknown gauge kind {self.kind!r}")

    @classmethod
    def parse(cls, text: str) -> "Gauge":
        """``abs``, ``pow:alpha`` or ``clamp:c``."""
        kind, _, arg = text.strip().partition(":")
        if kind == "abs":
            return cls("absolute")
        if kind == "pow":
            return cls("power", float(arg))
        if kind == "clamp":
            return cls("clamp", float(arg))
        raise ValueError(f"unknown gauge {text!r}")

    def f(self, r):
        r = np.asarray(r, dtype=float)
        if self.kind == "absolute":
            return r
        if self.kind == "power":
            return r ** self.param
        if self.kind == "clamp":
            return np.minimum(r, self.param)
        return np.asarray(self.func(r), dtype=float)

    def __call__(self, z):
        return self.f(np.abs(z))

    @property
    def label(self) -> str:
        return {"absolute": "abs", "power": f"pow:{self.param:g}", "clamp": f"clamp:{self.param:g}"}.get(
            self.kind, "custom")


@dataclass(frozen=True)
class GaugeCheck:
    passed: bool
    failed_property: str | None = None
    counterexample: tuple | None = None


def gauge_properties_check(g: Gauge, samples: int = 1000, seed: int = 0, scale: float = 10.0) -> GaugeCheck:
    """Sampled checks of f(0) = 0, monotonicity, midpoint concavity and subadditivity."""
    if samples < 100:
        raise ValueError("use at least 100 samples")
    if abs(float(g.f(0.0))) > 0:
        return GaugeCheck(False, "f(0) = 0", (0.0,))
    rng = np.random.default_rng(seed)
    x = rng.exponential(scale, samples)
    y = rng.exponential(scale, samples)
    fx, fy = g.f(x), g.f(y)
    tol = 1e-12 * (1 + np.abs(fx) + np.abs(fy))
    lo, hi = np.minimum(x, y), np.maximum(x, y)
    bad = np.flatnonzero(g.f(lo) > g.f(hi) + tol)
    if bad.size:
        return GaugeCheck(False, "nondecreasing", (float(lo[bad[0]]), float(hi[bad[0]])))
    bad = np.flatnonzero(g.f(0.5 * (x + y)) < 0.5 * (fx + fy) - tol)
    if bad.size:
        return GaugeCheck(False, "concave", (float(x[bad[0]]), float(y[bad[0]])))
    bad = np.flatnonzero(g.f(x + y) > fx + fy + tol)
    if bad.size:
        return GaugeCheck(False, "subadditive", (float(x[bad[0]]), float(y[bad[0]])))
    return GaugeCheck(True)


# --------------------------------------------------------------------------
# region integrals


@dataclass(frozen=True)
class Region:
    h: float
    N: float

    def __post_init__(self):
        if not self.h * self.N >= 1 - 1e-12:
            raise ValueError("need h N >= 1")


@dataclass(frozen=True)
class RegionIntegrals:
    I_S: float
    I_Sc: float
    lower_halving: float
    lower_incomplete: float
    upper_strip: float
    error_S: float
    error_Sc: float


def lower_bound_halving(m: float, h: float) -> float:
    """(h / 2 pi)^(m/2) pi Gamma(m/2 - 1)."""
    return math.exp((m / 2) * math.log(h / (2 * math.pi)) + log_gamma(m / 2 - 1)) * math.pi


def lower_bound_incomplete(m: float, h: float, N: float) -> float:
    """h (h / 2 pi)^(m/2 - 1) Gamma(m/2 - 1, 2 pi / (N h))."""
    return h * (h / (2 * math.pi)) ** (m / 2 - 1) * upper_incomplete_gamma(m / 2 - 1, 2 * math.pi / (N * h))


def upper_bound_strip(m: float, h: float, N: float, s: complex) -> float:
    """exp(pi |Im s| / 2) / 2 (h/pi)^sigma Gamma((sigma+1)/2) Gamma((sigma-1)/2) N^(sigma - m/2) / (m/2 - sigma)."""
    s = complex(s)
    sig = s.real
    log_val = (0.5 * math.pi * abs(s.imag) - math.log(2) + sig * math.log(h / math.pi)
               + log_gamma((sig + 1) / 2) + log_gamma((sig - 1) / 2) + (sig - m / 2) * math.log(N))
    return math.exp(log_val) / (m / 2 - sig)


def _x_trapezoid(fun, ys: np.ndarray, h: float, rel_tol: float) -> np.ndarray:
    """Periodic trapezoid in x over one period for each y, doubling nodes until stable."""
    M = 32
    x = h * np.arange(M) / M
    prev = fun(x[None, :] + 1j * ys[:, None]).mean(axis=1) * h
    while M < 1 << 16:
        xm = h * (np.arange(M) + 0.5) / M
        mid = fun(xm[None, :] + 1j * ys[:, None]).mean(axis=1) * h
        cur = 0.5 * (prev + mid)
        M *= 2
        if np.all(np.abs(cur - prev) <= rel_tol * np.abs(cur) + 1e-300):
            return cur
        prev = cur
    return prev


def region_integrals(m, h: float, N: float, s: complex, gauge: Gauge = Gauge("absolute"),
                     rel_tol: float = 1e-9) -> RegionIntegrals:
    """Gauge integrals of F(., s) y^(m/2) against dx dy / y^2 above and below y = 1/N.

    The upper part uses the periodic trapezoid rule in x.  Below 1/N the mass
    concentrates in peaks of width y around x = 0 mod h, so x = y sinh(v) is
    substituted on [-h/2, h/2], and y = e^(-u)/N maps the y-range to u >= 0.
    The part of the lower strip below y_cut is bounded by the analytic strip
    bound and added to the error.
    """
    m = HalfIntegerWeight.parse(m).value if not isinstance(m, float) else m
    s = complex(s)
    sig = s.real
    if not 1 < sig < m / 2:
        raise DomainError(f"need 1 < Re(s) < m/2, got Re(s) = {sig}")
    Region(h, N)
    spec = KernelSpec(s, h, "auto")

    def weight(z):
        return gauge(kernel_eval(spec, z) * z.imag ** (m / 2)) * z.imag ** (-2.0)

    def upper_integrand(y):
        return _x_trapezoid(weight, np.asarray(y, float), h, 1e-2 * rel_tol)

    rS = integrate(upper_integrand, 1.0 / N, math.inf, rel_tol=rel_tol, abs_tol=0.0)

    def inner(y):
        vmax = math.asinh(0.5 * h / y)

        def f(v):
            x = y * np.sinh(v)
            return weight(x + 1j * y) * y * np.cosh(v)
        return integrate(f, -vmax, vmax, rel_tol=1e-2 * rel_tol, abs_tol=0.0, initial_intervals=4).value

    ub_unit = upper_bound_strip(m, h, 1.0, s)          # bound with (1/N)^(m/2 - sigma) replaced by 1
    # y_cut with the analytic bound of the strip below it at most rel_tol * (bound of the whole strip)
    expo = m / 2 - sig
    y_cut = (1.0 / N) * rel_tol ** (1.0 / expo) if gauge.kind == "absolute" else (1.0 / N) * 1e-12
    u_max = math.log(1.0 / (N * y_cut))

    def lower_integrand(u):
        u = np.asarray(u, float)
        ys = np.exp(-u) / N
        return np.array([inner(y) for y in ys]) * ys

    rSc = integrate(lower_integrand, 0.0, u_max, rel_tol=rel_tol, abs_tol=0.0, initial_intervals=8)
    cut_bound = ub_unit * y_cut ** expo if gauge.kind == "absolute" else math.nan
    return RegionIntegrals(
        I_S=float(rS.value), I_Sc=float(rSc.value),
        lower_halving=lower_bound_halving(m, h), lower_incomplete=lower_bound_incomplete(m, h, N),
        upper_strip=upper_bound_strip(m, h, N, s),
        error_S=float(rS.error), error_Sc=float(rSc.error) + cut_bound)


# --------------------------------------------------------------------------
# reports


@dataclass
class Check:
    name: str
    lhs: float
    rhs: float
    relation: str
    passed: bool
    margin: float


@dataclass
class CertificateReport:
    kind: str
    inputs: dict
    checks: list
    intermediates: dict
    verdict: str
    error_budget: float
    diagnostics: list = field(default_factory=list)

    @property
    def certified(self) -> bool:
        return self.verdict == CERTIFIED

    def to_dict(self) -> dict:
        return asdict(self)


def _check(name: str, lhs: float, rhs: float, relation: str) -> Check:
    """relation '<=' or '>='; margin is the relative slack, positive when the check holds."""
    scale = max(abs(lhs), abs(rhs), 1e-300)
    slack = (rhs - lhs) if relation == "<=" else (lhs - rhs)
    return Check(name, float(lhs), float(rhs), relation, bool(slack >= 0), float(slack / scale))


def _verdict(checks: list, budget: float) -> str:
    pre, ineq = checks[0], checks[1:]
    if not pre.passed:
        return PRECONDITION_FAILED
    if not all(c.passed for c in ineq):
        return INEQUALITY_FAILED
    if any(c.margin <= budget for c in checks):
        return INCONCLUSIVE
    return CERTIFIED


def _fmt(x) -> str:
    x = complex(x)
    return f"{x.real:g}" if x.imag == 0 else f"{x.real:g}{x.imag:+g}i"


def strip_gamma_lhs(m: float, Nh: float, s: complex) -> float:
    """exp(pi|t|/2) G((sig+1)/2) G((sig-1)/2) 2^(m/2-1) / G(m/2-1) (pi/(Nh))^(m/2-sig) / (m/2-sig)."""
    s = complex(s)
    sig = s.real
    log_val = (0.5 * math.pi * abs(s.imag) + log_gamma((sig + 1) / 2) + log_gamma((sig - 1) / 2)
               + (m / 2 - 1) * math.log(2) - log_gamma(m / 2 - 1) + (m / 2 - sig) * math.log(math.pi / Nh))
    return math.exp(log_val) / (m / 2 - sig)


def certify_strip(m, h: float, N: float, s: complex, error_budget: float = 1e-9) -> CertificateReport:
    """Check m >= 4 pi/(N h) + 8/3 and the gamma inequality with right side pi."""
    w = HalfIntegerWeight.parse(m)
    mv = w.value
    s = complex(s)
    sig = s.real
    if mv < 2.5:
        raise DomainError("need m >= 5/2")
    if not 1 < sig < mv / 2:
        raise DomainError(f"need 1 < Re(s) < m/2 = {mv / 2}, got {sig}")
    Nh = N * h
    threshold = 4 * math.pi / Nh + 8.0 / 3.0
    lhs = strip_gamma_lhs(mv, Nh, s)
    lhs0 = strip_gamma_lhs(mv, Nh, sig)
    checks = [_check("m >= 4pi/(Nh) + 8/3", mv, threshold, ">="),
              _check("gamma inequality <= pi", lhs, math.pi, "<=")]
    med = gamma_median(mv / 2 - 1)
    x0 = 2 * math.pi / Nh
    diagnostics = [
        asdict(_check("2pi/(Nh) <= m/2 - 4/3", x0, mv / 2 - 4.0 / 3.0, "<=")),
        asdict(_check("m/2 - 4/3 < median of Gamma(m/2 - 1, 1)", mv / 2 - 4.0 / 3.0, med.median, "<=")),
    ]
    im_thr = (2 / math.pi) * math.log(math.pi / lhs0) if lhs0 < math.pi else None
    inter = {
        "gamma((sigma+1)/2)": float(sps.gamma((sig + 1) / 2)),
        "gamma((sigma-1)/2)": float(sps.gamma((sig - 1) / 2)),
        "gamma(m/2-1)": float(sps.gamma(mv / 2 - 1)),
        "exp(pi|Im s|/2)": math.exp(0.5 * math.pi * abs(s.imag)),
        "threshold_m": threshold,
        "lhs_at_real_part": lhs0,
        "max_abs_im_s_passing": im_thr,
        "median_gamma(m/2-1)": med.median,
        "incomplete_gamma(m/2-1, 2pi/(Nh))": upper_incomplete_gamma(mv / 2 - 1, x0),
        "bound_lower_halving": lower_bound_halving(mv, h),
        "bound_lower_incomplete": lower_bound_incomplete(mv, h, N),
        "bound_upper_strip": upper_bound_strip(mv, h, N, s),
    }
    inputs = {"m": str(w), "h": h, "N": N, "s": _fmt(s), "gauge": "abs"}
    return CertificateReport("strip", inputs, checks, inter, _verdict(checks, error_budget), error_budget,
                             diagnostics)


def reflected_branches(m: float, sig: float, t: float) -> tuple:
    b1 = 4.0 / (m - 8.0 / 3.0)
    d = sig - m / 2
    log_x = (0.5 * math.pi * abs(t) + log_gamma((m - sig + 1) / 2) + log_gamma((m - sig - 1) / 2)
             + (m / 2 - 1) * math.log(2) - math.log(math.pi) - log_gamma(m / 2 - 1) - math.log(d))
    b2 = math.exp(log_x / d)
    return b1, b2


def certify_reflected(m, h: float, N: float, s: complex, error_budget: float = 1e-9) -> CertificateReport:
    """N h / pi >= max(4/(m - 8/3), X^(1/(Re s - m/2))), which gives L(s, Psi_{m - conj(s)}) > 0."""
    w = HalfIntegerWeight.parse(m)
    mv = w.value
    if w.two_m < 9:
        raise DomainError("need m in 9/2 + Z_{>=0}")
    s = complex(s)
    sig = s.real
    if not mv / 2 < sig < mv - 1:
        raise DomainError(f"need m/2 < Re(s) < m - 1, got {sig}")
    lhs = N * h / math.pi
    b1, b2 = reflected_branches(mv, sig, s.imag)
    checks = [_check("Nh/pi >= 4/(m - 8/3)", lhs, b1, ">="),
              _check("Nh/pi >= gamma branch", lhs, b2, ">=")]
    inter = {"branch_precondition": b1, "branch_gamma": b2,
             "binding_branch": "precondition" if b1 >= b2 else "gamma",
             "reflected_s": _fmt(mv - s.conjugate())}
    inputs = {"m": str(w), "h": h, "N": N, "s": _fmt(s), "gauge": "abs"}
    return CertificateReport("reflected", inputs, checks, inter, _verdict(checks, error_budget), error_budget)


# --------------------------------------------------------------------------
# m0 scan


@dataclass(frozen=True)
class RectangleSpec:
    """[m/2 + eps, m/2 + nu] x [-eta_height, eta_height]."""

    eps: float
    nu: float
    eta_height: float

    def __post_init__(self):
        if not self.eps > 0.5:
            raise ValueError("need eps > 1/2")
        if not self.nu > self.eps:
            raise ValueError("need nu > eps")
        if not self.eta_height > 0:
            raise ValueError("need eta_height > 0")


@dataclass
class M0Result:
    m0: Fraction
    threshold: float
    m: np.ndarray
    R: np.ndarray
    passed: np.ndarray
    iterations: int

    @property
    def trace(self) -> list:
        return list(zip(self.m.tolist(), self.R.tolist(), self.passed.tolist()))


def log_R(m, eps: float) -> np.ndarray:
    """log of Gamma(m/4 + (1-eps)/2) Gamma(m/4 - (1+eps)/2) 2^(m/2-2) / (sqrt(pi) Gamma(m/2 - 1))."""
    m = np.asarray(m, dtype=float)
    a1 = m / 4 + (1 - eps) / 2
    a2 = m / 4 - (1 + eps) / 2
    ok = (a1 > 0) & (a2 > 0) & (m / 2 - 1 > 0)
    with np.errstate(invalid="ignore"):
        val = (sps.gammaln(a1) + sps.gammaln(a2) + (m / 2 - 2) * math.log(2)
               - 0.5 * math.log(math.pi) - sps.gammaln(m / 2 - 1))
    return np.where(ok, val, np.inf)


def log_R_duplication(m, eps: float) -> np.ndarray:
    """The same quantity written as Gamma(..) Gamma(..) / (Gamma(m/4 - 1/2) Gamma(m/4))."""
    m = np.asarray(m, dtype=float)
    return (sps.gammaln(m / 4 + (1 - eps) / 2) + sps.gammaln(m / 4 - (1 + eps) / 2)
            - sps.gammaln(m / 4 - 0.5) - sps.gammaln(m / 4))


def find_m0_rectangle(rect: RectangleSpec, max_iter: int = 10_000_000, chunk: int = 4096,
                        extra: int = 200) -> M0Result:
    """Least m in 9/2 + Z_{>=0} meeting m > 2nu+2, m >= 8/3+4pi, m >= 2nu+10 and T >= R(m).

    T = (eps/2) exp(-pi eta/2) pi^(1/2 - nu).  The trace continues ``extra``
    steps past m0 so monotonicity of R beyond m0 can be inspected.
    """
    eps, nu, eta = rect.eps, rect.nu, rect.eta_height
    log_T = math.log(eps / 2) - 0.5 * math.pi * eta + (0.5 - nu) * math.log(math.pi)
    ms, Rs, oks = [], [], []
    start = 0
    found = None
    while start < max_iter:
        k = np.arange(start, min(start + chunk, max_iter))
        m = 4.5 + k
        lr = log_R(m, eps)
        ok = (m > 2 * nu + 2) & (m >= 8 / 3 + 4 * math.pi) & (m >= 2 * nu + 10) & (lr <= log_T)
        ms.append(m)
        Rs.append(np.exp(lr))
        oks.append(ok)
        if found is None and ok.any():
            found = int(k[np.argmax(ok)])
        start += len(k)
        if found is not None and start > found + extra:
            break
    if found is None:
        raise RuntimeError(f"no m0 found within {max_iter} candidates")
    m = np.concatenate(ms)[: found + extra + 1]
    R = np.concatenate(Rs)[: found + extra + 1]
    ok = np.concatenate(oks)[: found + extra + 1]
    return M0Result(Fraction(9, 2) + found, math.exp(log_T), m, R, ok, found + 1)


def find_m0_sharp(rect: RectangleSpec, grid: int = 21, Nh: float = 1.0, m_max: float = 1e6) -> Fraction:
    """Heuristic: least m from which the reflected-region condition holds on a grid over the rectangle.

    A grid is not a proof over the continuum; the value is indicative only.
    Because h N >= 1 for every admissible group, Nh = 1 is the worst case.
    """
    sig_off = np.linspace(rect.eps, rect.nu, grid)
    ts = np.linspace(-rect.eta_height, rect.eta_height, grid)

    def holds(mv):
        if not mv > 2 * rect.nu + 2:
            return False
        return all(Nh / math.pi >= max(reflected_branches(mv, mv / 2 + a, t)) for a in sig_off for t in ts)

    k = 0
    while 4.5 + k <= m_max:
        if holds(4.5 + k):
            return Fraction(9, 2) + k
        k += 1
    raise RuntimeError("no m found below m_max")
