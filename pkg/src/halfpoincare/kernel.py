"""
The kernel F(z, s) = sum_{n >= 1} n^(s-1) exp(2 pi i n z / h).

Two evaluation paths are provided.  The direct path sums the q-series and is
efficient when Im(z)/h is not small.  The Lipschitz path uses

    F(z, s) = Gamma(s) (2 pi)^(-s) exp(i pi s / 2) sum_{n in Z} (z/h + n)^(-s),

valid for Re(s) > 1 with the branch arg in (0, pi), and handles points close
to the real axis.  Its two-sided tail is summed by Euler-Maclaurin.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special as sps

from .special import gamma_complex

PATHS = ("direct", "lipschitz", "auto")
_AUTO_SWITCH = 0.3          # Im(z)/h at or above which the direct sum is used
_EM_TERMS = 6
_B2K = sps.bernoulli(2 * _EM_TERMS)[2::2]
_EM_COEF = np.array([b / math.factorial(2 * k) for k, b in enumerate(_B2K, 1)])


@dataclass(frozen=True)
class KernelSpec:
    s: complex
    h: float = 1.0
    path: str = "auto"

    def __post_init__(self):
        object.__setattr__(self, "s", complex(self.s))
        if self.path not in PATHS:
            raise ValueError(f"path must be one of {PATHS}")
        if not self.h > 0:
            raise ValueError("h must be positive")
        if self.path == "lipschitz" and not self.s.real > 1:
            raise ValueError("the Lipschitz path needs Re(s) > 1")


@dataclass(frozen=True)
class KernelValue:
    value: np.ndarray | complex
    error: np.ndarray | float


def _check_z(z):
    z = np.asarray(z, dtype=complex)
    if np.any(z.imag <= 0):
        raise ValueError("z must lie in the upper half-plane")
    return z


def kernel_direct(s: complex, h: float, z, tol: float = 1e-16, max_terms: int = 10_000_000):
    """Sum n^(s-1) q^n, q = exp(2 pi i z / h), in blocks until the ratio tail bound is below tol."""
    z = _check_z(z)
    flat = z.ravel()
    s = complex(s)
    r = np.exp(-2.0 * math.pi * flat.imag / h)         # |q|
    total = np.zeros(flat.shape, dtype=complex)
    abs_total = np.zeros(flat.shape)
    err = np.full(flat.shape, np.inf)
    active = np.ones(flat.shape, dtype=bool)
    block = 64
    start = 1
    pw = s.real - 1.0
    while np.any(active) and start <= max_terms:
        n = np.arange(start, start + block, dtype=float)
        za = flat[active]
        terms = np.exp((s - 1.0) * np.log(n)[None, :] + 2j * math.pi * np.multiply.outer(za, n) / h)
        total[active] += terms.sum(axis=1)
        abs_total[active] += np.abs(terms).sum(axis=1)
        nl = start + block - 1
        # terms beyond nl: ratio of consecutive magnitudes is at most rho
        ra = r[active]
        rho = ((nl + 2.0) / (nl + 1.0)) ** max(pw, 0.0) * ra
        nxt = (nl + 1.0) ** pw * ra ** (nl + 1)
        bound = np.where(rho < 1, nxt / np.where(rho < 1, 1 - rho, 1), np.inf)
        e = err[active]
        e[:] = bound
        err[active] = e
        done = bound <= tol * np.maximum(np.abs(total[active]), 1e-300)
        idx = np.flatnonzero(active)
        active[idx[done]] = False
        start += block
        block = min(block * 2, 4096)
    out = total.reshape(z.shape)
    # truncation bound plus floating-point accumulation
    err = (err + 1e-15 * abs_total).reshape(z.shape)
    return (out, err) if out.ndim else (complex(out), float(err))


def _rising(s, j):
    out = 1.0 + 0j
    for k in range(j):
        out *= s + k
    return out


def lipschitz_sum(s: complex, u):
    """sum over n in Z of (u + n)^(-s) for Im(u) > 0 and Re(s) > 1, with an error estimate."""
    s = complex(s)
    u = np.asarray(u, dtype=complex)
    u = u - np.round(u.real)
    n0 = int(max(20, math.ceil(2 * abs(s) + 10)))
    n = np.arange(-n0, n0 + 1, dtype=float)
    direct = np.exp(-s * np.log(np.add.outer(u, n))).sum(axis=-1)
    wp = u + n0          # positive side, f(t) = (u + t)^(-s)
    wm = u - n0          # negative side, g(t) = (u - t)^(-s)
    lp, lm = np.log(wp), np.log(wm)
    tail = (np.exp((1 - s) * lp) - np.exp((1 - s) * lm)) / (s - 1)
    tail -= 0.5 * (np.exp(-s * lp) + np.exp(-s * lm))
    last = 0.0
    for k, coef in enumerate(_EM_COEF, 1):
        j = 2 * k - 1
        rj = _rising(s, j)
        # f^(j)(n0) = (-1)^j (s)_j (u + n0)^(-s-j);  g^(j)(n0) = (s)_j (u - n0)^(-s-j)
        dp = -rj * np.exp((-s - j) * lp)
        dm = rj * np.exp((-s - j) * lm)
        last = coef * (dp + dm)
        tail -= last
    total = direct + tail
    return total, np.abs(last) + 1e-16 * np.abs(total)


def kernel_lipschitz(s: complex, h: float, z):
    z = _check_z(z)
    s = complex(s)
    if not s.real > 1:
        raise ValueError("the Lipschitz path needs Re(s) > 1")
    pref = gamma_complex(s) * (2 * math.pi) ** (-s) * np.exp(0.5j * math.pi * s)
    total, err = lipschitz_sum(s, z / h)
    out, err = pref * total, abs(pref) * err
    return (out, err) if np.ndim(out) else (complex(out), float(err))


def kernel_eval(spec: KernelSpec, z, with_error: bool = False):
    """F(z, s) along the path in ``spec``; ``auto`` picks per point by Im(z)/h."""
    z = _check_z(z)
    if spec.path == "direct":
        out, err = kernel_direct(spec.s, spec.h, z)
    elif spec.path == "lipschitz":
        out, err = kernel_lipschitz(spec.s, spec.h, z)
    else:
        near = z.imag / spec.h < _AUTO_SWITCH
        if np.any(near) and not spec.s.real > 1:
            # the summation formula is unavailable; fall back to the q-series
            near = np.zeros_like(near)
        out = np.zeros(z.shape, dtype=complex)
        err = np.zeros(z.shape)
        if np.any(~near):
            out[~near], err[~near] = kernel_direct(spec.s, spec.h, z[~near])
        if np.any(near):
            out[near], err[near] = kernel_lipschitz(spec.s, spec.h, z[near])
        if out.ndim == 0:
            out, err = complex(out), float(err)
    return (out, err) if with_error else out


def kernel_closed_form(s: int, h: float, z):
    """Closed forms for s = 1, 2, 3 (polylogarithms of nonpositive order)."""
    q = np.exp(2j * math.pi * np.asarray(z, dtype=complex) / h)
    if s == 1:
        return q / (1 - q)
    if s == 2:
        return q / (1 - q) ** 2
    if s == 3:
        return q * (1 + q) / (1 - q) ** 3
    raise ValueError("closed forms only for s in {1, 2, 3}")


def kernel_sup_bound(s: complex, c: float) -> float:
    """Bound for |F(w, s)| (h = 1) when the distance from Re(w) to Z is at least 1/(2c).

    sum_n |u + n|^(-sigma) <= (2c)^sigma + 2 zeta(sigma, 1/2) and the branch
    factors contribute at most exp(pi |Im s| / 2).
    """
    s = complex(s)
    sig = s.real
    amp = abs(gamma_complex(s)) * (2 * math.pi) ** (-sig) * math.exp(0.5 * math.pi * abs(s.imag))
    return amp * ((2.0 * c) ** sig + 2.0 * float(sps.zeta(sig, 0.5)))
