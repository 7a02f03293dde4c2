"""
Poincare series over Gamma_infinity \\ Gamma, Fourier coefficients, Petersson
pairings through the coefficient formula and the two forms of the L-function.

A coset with bottom row (c, d), c > 0, contributes

    conj(psi(d)) phi(gamma z) j(gamma, z)^(-2m),
    gamma z = a/c - 1 / (c (cz + d)),   a = d^(-1) mod c,

and the identity coset contributes phi(z).  Rows are summed over a window of
d centred at -c Re(z); both the omitted d-tail and the omitted rows c are
bounded analytically and the bound is returned with every value.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy import special as sps

from .groups import GroupInvariants, eps_d, kronecker_shimura, power_tail
from .kernel import KernelSpec, kernel_eval, kernel_sup_bound
from .quadrature import integrate
from .special import cauchy_power_integral, gamma_complex, log_gamma

_CHUNK = 1 << 21            # complex entries per vectorised block
_MAX_WINDOW = 20000


class DomainError(ValueError):
    pass


@dataclass(frozen=True)
class TruncationBudget:
    c_bound: float = 1600.0
    n_terms: int = 200
    target_abs_error: float = 1e-8

    def __post_init__(self):
        if not (self.c_bound >= 0 and self.n_terms > 0 and self.target_abs_error > 0):
            raise ValueError("budget fields must be positive")


# --------------------------------------------------------------------------
# seeds


@dataclass(frozen=True)
class ExpSource:
    """phi(z) = exp(2 pi i n z / h)."""

    n: int = 1

    def __call__(self, w, h: float):
        return np.exp(2j * math.pi * self.n * w / h)

    def check(self, m: float):
        if self.n < 1:
            raise DomainError("n must be a positive integer")

    def term_model(self, c: float, y: float, m: float) -> list:
        """Pairs (coef, p): |term| <= sum coef |cz + d|^(-p)."""
        return [(1.0, m)]

    def row_powers(self, y: float, m: float) -> list:
        """Pairs (coef, p): full row sum at c is at most sum coef c^p."""
        B = cauchy_power_integral(m / 2.0)
        return [(y ** (1.0 - m) * B, 1.0 - m), (y ** (-m), -m)]

    def row_powers_valid_from(self, y: float) -> float:
        return 0.0


@dataclass(frozen=True)
class KernelSource:
    """phi(z) = F(z, s)."""

    s: complex

    def __call__(self, w, h: float):
        return kernel_eval(KernelSpec(self.s, h, "auto"), w)

    def check(self, m: float):
        sig = complex(self.s).real
        if not (sig < m / 2 - 1 or 1 < sig < m / 2):
            raise DomainError(f"Re(s) = {sig} lies outside Re(s) < m/2 - 1 or 1 < Re(s) < m/2")
        if not sig > 1:
            raise DomainError("kernel seeds are evaluated only for Re(s) > 1, where the "
                              "Lipschitz bound on F near the real axis is available")

    def _amp(self):
        s = complex(self.s)
        return abs(gamma_complex(s)) * (2 * math.pi) ** (-s.real) * math.exp(0.5 * math.pi * abs(s.imag))

    def term_model(self, c: float, y: float, m: float) -> list:
        sig = complex(self.s).real
        if c * y >= 2.0:
            return [(kernel_sup_bound(self.s, c), m)]
        # |F(w)| <= amp (Im w^(-sigma) + 2 zeta(sigma, 1/2)), Im w = y / |cz + d|^2
        amp = self._amp()
        return [(amp * y ** (-sig), m - 2 * sig), (amp * 2 * float(sps.zeta(sig, 0.5)), m)]

    def row_powers(self, y: float, m: float) -> list:
        sig = complex(self.s).real
        amp = self._amp()
        B = cauchy_power_integral(m / 2.0)
        z2 = 2 * float(sps.zeta(sig, 0.5))
        base = [(y ** (1.0 - m) * B, 1.0 - m), (y ** (-m), -m)]
        out = []
        for coef, p in base:
            out.append((amp * 2.0 ** sig * coef, p + sig))
            out.append((amp * z2 * coef, p))
        return out

    def row_powers_valid_from(self, y: float) -> float:
        return 2.0 / y


def _window_tail(model: list, D: float) -> float:
    tot = 0.0
    for coef, p in model:
        if p <= 1:
            return math.inf
        tot += coef * 2.0 * (D ** (1.0 - p) / (p - 1.0) + D ** (-p))
    return tot


def _c_tail(source, y: float, m: float, level: int, K: int) -> float:
    """Bound for all rows c = k * level with k > K."""
    if (K + 1) * level < source.row_powers_valid_from(y):
        return math.inf
    return sum(power_tail(coef * level ** p, p, K) for coef, p in source.row_powers(y, m))


# --------------------------------------------------------------------------
# evaluation


@dataclass
class PoincareValue:
    value: np.ndarray | complex
    tail_estimate: np.ndarray | float
    vanished_by_central_character: bool = False
    rows: int = 0
    terms: int = 0
    c_max: int = 0
    note: str = ""


_INV_CACHE: dict = {}


def _inverse_table(c: int) -> np.ndarray:
    tab = _INV_CACHE.get(c)
    if tab is None:
        r = np.arange(c, dtype=np.int64)
        tab = np.zeros(c, dtype=np.int64)
        for v in r[np.gcd(r, c) == 1].tolist():
            tab[v] = pow(v, -1, c)
        if len(_INV_CACHE) < 4096:
            _INV_CACHE[c] = tab
    return tab


def _row_sum(group: GroupInvariants, source, z: np.ndarray, c: int, D: int) -> tuple:
    """Sum of all coset terms with lower-left entry c and |d + c Re z| <= D, per point."""
    spec = group.spec
    two_m = spec.weight.two_m
    h = group.h
    inv = _inverse_table(c)
    out = np.zeros(z.shape, dtype=complex)
    k = np.arange(-D, D + 1, dtype=np.int64)
    step = max(1, _CHUNK // len(k))
    count = 0
    for lo in range(0, len(z), step):
        zz = z[lo:lo + step]
        d0 = np.round(-c * zz.real).astype(np.int64)
        d = d0[:, None] + k[None, :]
        mask = np.gcd(d, c) == 1
        pt, _ = np.nonzero(mask)
        dm = d[mask]
        zm = zz[pt]
        czd = c * zm + dm
        w = inv[np.mod(dm, c)] / c - 1.0 / (c * czd)
        # j^(-2m) = eps_d^(2m) (c|d) sqrt(cz + d)^(-2m)
        mult = (eps_d(dm) ** two_m) * kronecker_shimura(c, dm) * np.sqrt(czd + 0j) ** (-two_m)
        terms = np.conj(spec.character(dm)) * mult * source(w, h)
        re = np.bincount(pt, weights=terms.real, minlength=len(zz))
        im = np.bincount(pt, weights=terms.imag, minlength=len(zz))
        out[lo:lo + step] = re + 1j * im
        count += len(dm)
    return out, count


def plan_rows(group: GroupInvariants, source, y_min: float, budget: TruncationBudget) -> tuple:
    """Rows to sum (number K of multiples of the level), their windows and the tail bounds."""
    spec = group.spec
    m = spec.m
    L = spec.level
    K_cap = int(math.floor(budget.c_bound / L)) if budget.c_bound >= L else 0
    target = budget.target_abs_error
    K = 0
    c_tail = _c_tail(source, y_min, m, L, 0)
    while K < K_cap and c_tail > 0.5 * target:
        K += 1
        c_tail = _c_tail(source, y_min, m, L, K)
    row_tol = 0.5 * target / max(K, 1)
    windows = []
    d_tail = 0.0
    for k in range(1, K + 1):
        c = k * L
        model = source.term_model(c, y_min, m)
        D = 1
        while _window_tail(model, D) > row_tol and D < _MAX_WINDOW:
            D = int(math.ceil(D * 1.25)) + 1
        windows.append((c, D))
        d_tail += _window_tail(model, D)
    return windows, c_tail, d_tail


def poincare_eval(group: GroupInvariants, source, z, budget: TruncationBudget = TruncationBudget(),
                  threads: int = 1) -> PoincareValue:
    """Evaluate P(phi)(z) = sum over cosets of conj(chi) (phi |_m gamma)(z); vectorised over z.

    Rows are planned up front from the analytic bounds, optionally computed
    in a thread pool, and reduced sequentially in row order so the result
    does not depend on ``threads``.
    """
    z = np.asarray(z, dtype=complex)
    if np.any(z.imag <= 0):
        raise ValueError("z must lie in the upper half-plane")
    spec = group.spec
    source.check(spec.m)
    if isinstance(source, KernelSource) and group.h != 1.0:
        raise DomainError("kernel seeds assume cusp width 1")
    flat = z.ravel()
    if not group.central_compatible:
        zero = np.zeros(z.shape, dtype=complex)
        return PoincareValue(zero if z.ndim else 0j, np.zeros(z.shape) if z.ndim else 0.0, True,
                             note="character differs from chi_m on the centre: the series vanishes")
    y_min = float(flat.imag.min())
    windows, c_tail, d_tail = plan_rows(group, source, y_min, budget)
    total = np.asarray(source(flat, group.h), dtype=complex).copy()

    def work(cD):
        return _row_sum(group, source, flat, cD[0], cD[1])

    if threads and threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(work, windows))
    else:
        results = [work(cD) for cD in windows]
    n_terms = 1
    for row, cnt in results:
        total += row
        n_terms += cnt
    tail = c_tail + d_tail
    value = total.reshape(z.shape)
    c_max = windows[-1][0] if windows else 0
    note = f"{len(windows)} rows up to c = {c_max}; c-tail {c_tail:.2e}, d-tail {d_tail:.2e}"
    if z.ndim == 0:
        value = complex(value)
    return PoincareValue(value, tail if z.ndim == 0 else np.full(z.shape, tail), False,
                         len(windows), n_terms, c_max, note)


# --------------------------------------------------------------------------
# Fourier data


def default_y0(h: float, K: int) -> float:
    """Sampling height balancing aliasing (small y0) against amplification exp(2 pi K y0 / h)."""
    return h * min(0.5, 12.0 / (2 * math.pi * K))


def fourier_coefficients(f, h: float, y0: float, K: int, M: int | None = None) -> np.ndarray:
    """a_1..a_K of a holomorphic h-periodic f, by the trapezoid rule on the line Im z = y0."""
    if not y0 > 0:
        raise ValueError("y0 must be positive")
    M = max(8 * K, 64) if M is None else int(M)
    if M < 8 * K:
        raise ValueError("need at least 8K nodes")
    x = h * np.arange(M) / M
    vals = np.asarray(f(x + 1j * y0), dtype=complex)
    c = np.fft.fft(vals) / M
    n = np.arange(1, K + 1)
    return c[1:K + 1] * np.exp(2 * math.pi * n * y0 / h)


@dataclass
class FourierSeries:
    """A truncated cusp-form expansion sum_{n <= K} a_n exp(2 pi i n z / h)."""

    m: float
    h: float
    coeffs: np.ndarray
    growth_exponent: float | None = None
    coeff_errors: np.ndarray | None = None

    def __post_init__(self):
        self.coeffs = np.asarray(self.coeffs, dtype=complex)
        if self.coeffs.ndim != 1 or len(self.coeffs) < 1:
            raise ValueError("need at least one coefficient")
        if self.growth_exponent is None:
            self.growth_exponent = self.m / 2.0
        if self.coeff_errors is None:
            self.coeff_errors = np.zeros(len(self.coeffs))

    @property
    def K(self) -> int:
        return len(self.coeffs)

    @property
    def n(self) -> np.ndarray:
        return np.arange(1, self.K + 1)

    @property
    def growth_constant(self) -> float:
        """C with |a_n| <= C n^g on the known range (used as the tail model)."""
        return float(np.max(np.abs(self.coeffs) * self.n ** (-self.growth_exponent)))

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        out = (self.coeffs * np.exp(2j * math.pi * np.multiply.outer(z, self.n) / self.h)).sum(axis=-1)
        return out if out.ndim else complex(out)

    def scaled(self, factor) -> "FourierSeries":
        return FourierSeries(self.m, self.h, factor * self.coeffs, self.growth_exponent,
                             abs(factor) * self.coeff_errors)


def poincare_coefficients(group: GroupInvariants, source, K: int, budget: TruncationBudget = TruncationBudget(),
                          y0: float | None = None, threads: int = 1) -> FourierSeries:
    """Fourier coefficients of a Poincare series, with error bars from the truncation bound."""
    h = group.h
    y0 = default_y0(h, K) if y0 is None else y0
    M = max(8 * K, 64)
    x = h * np.arange(M) / M
    pv = poincare_eval(group, source, x + 1j * y0, budget, threads)
    c = np.fft.fft(pv.value) / M
    n = np.arange(1, K + 1)
    amp = np.exp(2 * math.pi * n * y0 / h)
    tail = float(np.max(pv.tail_estimate)) if np.size(pv.tail_estimate) else 0.0
    return FourierSeries(group.spec.m, h, c[1:K + 1] * amp, group.spec.m / 2.0, tail * amp)


# --------------------------------------------------------------------------
# L-values


@dataclass(frozen=True)
class LValue:
    value: complex
    error_estimate: float
    method: str


def _check_lvalue_domain(m: float, s: complex, unfolded: bool):
    sig = complex(s).real
    if unfolded:
        if not (m / 2 < sig < m - 1 or sig > m / 2 + 1):
            raise DomainError(f"Re(s) = {sig} outside m/2 < Re(s) < m-1 and Re(s) > m/2+1")
    elif not sig > m / 2 + 1:
        raise DomainError(f"Re(s) = {sig} outside the half-plane of absolute convergence Re(s) > m/2+1")


def lvalue_dirichlet(series: FourierSeries, s: complex) -> LValue:
    """sum_{n <= K} a_n n^(-s), with the tail C sum_{n > K} n^(g - Re s) bounded by an integral."""
    s = complex(s)
    _check_lvalue_domain(series.m, s, unfolded=False)
    n = series.n
    val = complex(np.sum(series.coeffs * np.exp(-s * np.log(n))))
    g = series.growth_exponent
    sig = s.real
    if sig - g - 1 > 0:
        tail = series.growth_constant * series.K ** (g - sig + 1) / (sig - g - 1)
    else:
        tail = math.inf
    coeff_err = float(np.sum(series.coeff_errors * n ** (-sig)))
    return LValue(val, tail + coeff_err, "dirichlet")


def lvalue_unfolded(series: FourierSeries, s: complex, group: GroupInvariants | None = None,
                    tol: float = 1e-13) -> LValue:
    """(4 pi)^(m-1) / (h^m Gamma(m-1)) * int_0^inf g(y) y^(m-2) dy,
    g(y) = h sum_n a_n n^(m-1-s) exp(-4 pi n y / h).

    g is the exact x-integral over one period of f conj(F(., m - conj(s))) y^m.
    """
    s = complex(s)
    m, h = series.m, series.h
    _check_lvalue_domain(m, s, unfolded=True)
    n = series.n.astype(float)
    w = series.coeffs * np.exp((m - 1 - s) * np.log(n))
    lam = 4 * math.pi * n / h

    def integrand(y):
        y = np.asarray(y, dtype=float)
        # terms with lam * y beyond the double range underflow to zero
        e = np.exp(-np.outer(y, lam))
        return h * (e @ w) * y ** (m - 2)

    split = h / (4 * math.pi)
    scale = abs(h * np.sum(np.abs(w)) * split ** (m - 1))
    r1 = integrate(integrand, 0.0, split, abs_tol=tol * scale, rel_tol=tol)
    r2 = integrate(integrand, split, math.inf, abs_tol=tol * scale, rel_tol=tol)
    pref = math.exp((m - 1) * math.log(4 * math.pi) - m * math.log(h) - log_gamma(m - 1.0))
    val = pref * (r1.value + r2.value)
    err = pref * (r1.error + r2.error)
    err += float(np.sum(series.coeff_errors * n ** (-s.real)))
    return LValue(complex(val), float(err), "unfolded")


def petersson_vs_coefficient(series: FourierSeries, n: int, group: GroupInvariants) -> complex:
    """<f, psi_n> = h^m Gamma(m-1) / (eps_Gamma (4 pi n)^(m-1)) a_n(f)."""
    if not 1 <= n <= series.K:
        raise IndexError(f"n = {n} outside 1..{series.K}")
    m, h = series.m, series.h
    pref = math.exp(m * math.log(h) + log_gamma(m - 1.0) - (m - 1) * math.log(4 * math.pi * n))
    return complex(pref / group.epsilon_gamma * series.coeffs[n - 1])


def double_series_majorant(series: FourierSeries) -> float:
    """sum |a_n| n^(1 - m/2) h^(m/2) (2 pi)^(1 - m/2) Gamma(m/2 - 1)."""
    m, h = series.m, series.h
    if not m > 2:
        raise DomainError("the majorant needs m > 2")
    n = series.n
    return float(np.sum(np.abs(series.coeffs) * n ** (1 - m / 2))
                 * h ** (m / 2) * (2 * math.pi) ** (1 - m / 2) * math.exp(log_gamma(m / 2 - 1)))


def double_series_box_integral(series: FourierSeries, y_lo: float, y_hi: float) -> float:
    """Integral over [0, h] x [y_lo, y_hi] of sum_n |a_n exp(2 pi i n z/h)| y^(m/2) y^(-2)."""
    m, h = series.m, series.h
    n = series.n
    a = np.abs(series.coeffs)

    def f(y):
        return h * (np.exp(-2 * math.pi * np.outer(y, n) / h) @ a) * y ** (m / 2 - 2)
    return float(integrate(f, y_lo, y_hi, rel_tol=1e-12, abs_tol=0.0).value)
