"""
Arithmetic in the metaplectic double cover of SL2(R).

An element is a real unimodular matrix together with a holomorphic square
root eta of z -> cz + d on the upper half-plane.  Since eta is determined by
its value at i, elements are stored as ``(a, b, c, d, eta(i))``; at any other
point eta(z) = sign * sqrt(cz + d) with the principal square root and
``sign = eta(i) / sqrt(ci + d)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

import numpy as np

FOUR_PI = 4.0 * math.pi
_TOL = 1e-12


def principal_sqrt(z):
    """Square root with argument in (-pi/2, pi/2]; works on scalars and arrays.

    A negative zero imaginary part is normalised first, so ``-1`` maps to
    ``+i`` whatever the sign of its zero.
    """
    w = np.sqrt(np.asarray(z, dtype=complex) + 0j)
    return w if w.ndim else complex(w)


@dataclass(frozen=True)
class HalfIntegerWeight:
    """Weight m = numerator / 2 with an odd positive numerator."""

    numerator: int

    def __post_init__(self):
        if not isinstance(self.numerator, (int, np.integer)) or self.numerator <= 0 or self.numerator % 2 == 0:
            raise ValueError(f"2m must be an odd positive integer, got {self.numerator!r}")

    @classmethod
    def parse(cls, text) -> "HalfIntegerWeight":
        """Accept ``"13/2"``, ``Fraction(13, 2)`` or ``6.5``."""
        if isinstance(text, HalfIntegerWeight):
            return text
        frac = Fraction(str(text).strip()) if not isinstance(text, Fraction) else text
        twice = 2 * frac
        if twice.denominator != 1:
            raise ValueError(f"weight {text!r} is not a half-integer")
        return cls(int(twice.numerator))

    @property
    def two_m(self) -> int:
        return int(self.numerator)

    @property
    def value(self) -> float:
        return self.numerator / 2.0

    def __str__(self):
        return f"{self.numerator}/2"


@dataclass(frozen=True)
class IwasawaCoordinates:
    x: float
    y: float
    t: float

    def __post_init__(self):
        if not self.y > 0:
            raise ValueError("y must be positive")


@dataclass(frozen=True)
class MetaplecticElement:
    a: float
    b: float
    c: float
    d: float
    eta_at_i: complex

    def __post_init__(self):
        a, b, c, d = (float(v) for v in (self.a, self.b, self.c, self.d))
        scale = max(1.0, abs(a * d) + abs(b * c))
        if abs(a * d - b * c - 1.0) > _TOL * scale:
            raise ValueError(f"determinant {a * d - b * c!r} is not 1")
        base = complex(c * 1j + d)
        eta = complex(self.eta_at_i)
        if abs(eta * eta - base) > _TOL * max(1.0, abs(base)):
            raise ValueError("eta(i)^2 must equal ci + d")
        object.__setattr__(self, "eta_at_i", eta)

    @property
    def matrix(self) -> np.ndarray:
        return np.array([[self.a, self.b], [self.c, self.d]], dtype=float)

    @property
    def sign(self) -> int:
        """+1 or -1: which of the two square roots of cz + d this element carries."""
        ratio = self.eta_at_i / principal_sqrt(complex(self.c * 1j + self.d))
        return 1 if ratio.real > 0 else -1

    def eta(self, z):
        """The automorphy factor eta(z), a square root of cz + d."""
        return self.sign * principal_sqrt(self.c * np.asarray(z, dtype=complex) + self.d)

    def __mul__(self, other: "MetaplecticElement") -> "MetaplecticElement":
        return multiply(self, other)

    def __repr__(self):
        return (f"MetaplecticElement([[{self.a:.6g}, {self.b:.6g}], [{self.c:.6g}, {self.d:.6g}]], "
                f"eta(i)={self.eta_at_i:.6g})")


def element(a, b, c, d, sign: int = 1) -> MetaplecticElement:
    """Element over the given matrix carrying ``sign * principal_sqrt(cz + d)``."""
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    return MetaplecticElement(a, b, c, d, sign * principal_sqrt(complex(c * 1j + d)))


def identity() -> MetaplecticElement:
    return MetaplecticElement(1.0, 0.0, 0.0, 1.0, 1.0)


def n_x(x: float) -> MetaplecticElement:
    return MetaplecticElement(1.0, float(x), 0.0, 1.0, 1.0)


def a_y(y: float) -> MetaplecticElement:
    if not y > 0:
        raise ValueError("y must be positive")
    r = math.sqrt(y)
    return MetaplecticElement(r, 0.0, 0.0, 1.0 / r, y ** -0.25)


def kappa(t: float) -> MetaplecticElement:
    """Rotation by t, with eta(i) = exp(it/2)."""
    return MetaplecticElement(math.cos(t), -math.sin(t), math.sin(t), math.cos(t), complex(np.exp(0.5j * t)))


def central(k: int) -> MetaplecticElement:
    """kappa(k*pi); these four elements (k mod 4) make up the centre of the cover."""
    k = int(k) % 4
    mat = 1.0 if k % 2 == 0 else -1.0
    eta = (1.0, 1j, -1.0, -1j)[k]
    return MetaplecticElement(mat, 0.0, 0.0, mat, eta)


def multiply(s1: MetaplecticElement, s2: MetaplecticElement) -> MetaplecticElement:
    g = s1.matrix @ s2.matrix
    eta = complex(s1.eta(act(s2, 1j))) * s2.eta_at_i
    return MetaplecticElement(g[0, 0], g[0, 1], g[1, 0], g[1, 1], eta)


def inverse(s: MetaplecticElement) -> MetaplecticElement:
    a, b, c, d = s.a, s.b, s.c, s.d
    # eta_s(g^{-1}.i) * eta_inv(i) = 1
    w = (d * 1j - b) / (-c * 1j + a)
    return MetaplecticElement(d, -b, -c, a, 1.0 / complex(s.eta(w)))


def act(s: MetaplecticElement, z):
    """Linear fractional action on the upper half-plane."""
    z = np.asarray(z, dtype=complex)
    if np.any(z.imag <= 0):
        raise ValueError("points must lie in the upper half-plane")
    w = (s.a * z + s.b) / (s.c * z + s.d)
    return w if w.ndim else complex(w)


def from_iwasawa(coords: IwasawaCoordinates) -> MetaplecticElement:
    return n_x(coords.x) * a_y(coords.y) * kappa(coords.t)


def iwasawa(s: MetaplecticElement) -> IwasawaCoordinates:
    """Coordinates (x, y, t) with s = n_x a_y kappa_t and t in [0, 4*pi).

    From s.i = x + iy and eta_s(i) = y^{-1/4} exp(it/2) the angle is twice the
    argument of eta_s(i).
    """
    w = act(s, 1j)
    t = (2.0 * np.angle(s.eta_at_i)) % FOUR_PI
    return IwasawaCoordinates(w.real, w.imag, float(t))


def im_transform(s: MetaplecticElement, z):
    """Im(g.z) computed as Im(z) / |cz + d|^2."""
    z = np.asarray(z, dtype=complex)
    return z.imag / np.abs(s.c * z + s.d) ** 2


def slash(f: Callable, m: HalfIntegerWeight, s: MetaplecticElement) -> Callable:
    """The weight-m right action: z -> f(s.z) * eta_s(z)^(-2m).

    The power is an integer power of the square-root value, so the branch
    carried by ``s`` is never re-chosen.
    """
    m = HalfIntegerWeight.parse(m)

    def slashed(z):
        z = np.asarray(z, dtype=complex)
        return f(act(s, z)) * np.asarray(s.eta(z)) ** (-m.two_m)

    return slashed


def lift_value(f: Callable, m: HalfIntegerWeight, s: MetaplecticElement) -> complex:
    """F_f(s) = (f |_m s)(i)."""
    return complex(slash(f, m, s)(1j))


def classical_lift(f: Callable, m: HalfIntegerWeight, coords: IwasawaCoordinates) -> complex:
    """F_f(n_x a_y kappa_t) = f(x + iy) y^(m/2) exp(-imt)."""
    m = HalfIntegerWeight.parse(m)
    z = coords.x + 1j * coords.y
    return complex(f(z)) * coords.y ** (m.value / 2.0) * complex(np.exp(-1j * m.value * coords.t))


def chi_m(m: HalfIntegerWeight, t: float) -> complex:
    """Character of the rotation subgroup: kappa_t -> exp(-imt)."""
    m = HalfIntegerWeight.parse(m)
    return complex(np.exp(-1j * m.value * t))


def random_element(rng: np.random.Generator, spread: float = 2.0) -> MetaplecticElement:
    """A random element built from random Iwasawa coordinates (for tests and demos)."""
    x = rng.uniform(-spread, spread)
    y = math.exp(rng.uniform(-spread / 2, spread / 2))
    t = rng.uniform(0.0, FOUR_PI)
    return from_iwasawa(IwasawaCoordinates(x, y, t))


def is_close(s1: MetaplecticElement, s2: MetaplecticElement, tol: float = 1e-10) -> bool:
    """Entrywise comparison of matrices and eta(i), relative for large entries."""
    pairs = [(s1.a, s2.a), (s1.b, s2.b), (s1.c, s2.c), (s1.d, s2.d), (s1.eta_at_i, s2.eta_at_i)]
    return all(abs(u - v) <= tol * max(1.0, abs(u), abs(v)) for u, v in pairs)
