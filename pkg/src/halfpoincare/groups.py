"""
Congruence groups in the metaplectic cover: the full preimage of Gamma_0(L)
(L divisible by 4) with the character built from a Dirichlet character and
the theta multiplier.

For gamma = [[a, b], [c, d]] in Gamma_0(4) the theta multiplier is

    j(gamma, z) = eps_d^{-1} (c|d) sqrt(cz + d),

with eps_d = 1 or i as d = 1 or 3 mod 4 and (c|d) the Jacobi symbol extended
to negative d by (c|d) = (c/|d|), negated when c and d are both negative.
It satisfies theta(gamma z) = j(gamma, z) theta(z) and is a cocycle, but
j^2 = (-1|d)(cz + d), so it is not itself a metaplectic element when
d = 3 mod 4.  ``theta_lift`` returns the metaplectic element carrying
(c|d) sqrt(cz + d) = eps_d j, and the group character absorbs the quotient:

    chi(sigma) = psi(d) (j(g_sigma, z) / eta_sigma(z))^(2m).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .metaplectic import HalfIntegerWeight, MetaplecticElement, central, principal_sqrt

# --------------------------------------------------------------------------
# symbols


def jacobi(a, n):
    """Vectorised Jacobi symbol (a/n) for odd positive n."""
    a = np.asarray(a, dtype=np.int64)
    n = np.asarray(n, dtype=np.int64)
    a, n = np.broadcast_arrays(a, n)
    scalar = a.ndim == 0
    a, n = np.atleast_1d(a), np.atleast_1d(n)
    if np.any(n <= 0) or np.any(n % 2 == 0):
        raise ValueError("the Jacobi symbol needs odd positive n")
    a = np.mod(a, n)
    n = n.copy()
    result = np.ones(a.shape, dtype=np.int64)
    active = a != 0
    while np.any(active):
        # strip factors of two
        while True:
            even = active & (a % 2 == 0)
            if not np.any(even):
                break
            a[even] //= 2
            flip = even & ((n % 8 == 3) | (n % 8 == 5))
            result[flip] = -result[flip]
        # quadratic reciprocity and reduction
        swap_sign = active & (a % 4 == 3) & (n % 4 == 3)
        result[swap_sign] = -result[swap_sign]
        a_new = np.where(active, n, a)
        n_new = np.where(active, a, n)
        a = np.where(active, np.mod(a_new, np.where(n_new == 0, 1, n_new)), a)
        n = n_new
        active = a != 0
    out = np.where(n == 1, result, 0)
    return int(out[0]) if scalar else out


def kronecker_shimura(c, d):
    """The symbol (c|d) for odd d used by the theta multiplier.

    (c|d) = (c/|d|), times -1 when c < 0 and d < 0; in particular
    (0|1) = (0|-1) = 1.
    """
    c = np.asarray(c, dtype=np.int64)
    d = np.asarray(d, dtype=np.int64)
    if np.any(d % 2 == 0):
        raise ValueError("d must be odd")
    val = jacobi(c, np.abs(d))
    val = np.where((c < 0) & (d < 0), -val, val)
    return val if np.ndim(val) else int(val)


def eps_d(d):
    """1 for d = 1 mod 4 and i for d = 3 mod 4."""
    d = np.asarray(d, dtype=np.int64)
    if np.any(d % 2 == 0):
        raise ValueError("d must be odd")
    out = np.where(d % 4 == 1, 1.0 + 0j, 1j)
    return out if out.ndim else complex(out)


def theta_multiplier(c, d, z):
    """j(gamma, z) = eps_d^{-1} (c|d) sqrt(cz + d); broadcasts over c, d, z."""
    c = np.asarray(c, dtype=np.int64)
    d = np.asarray(d, dtype=np.int64)
    z = np.asarray(z, dtype=complex)
    out = kronecker_shimura(c, d) / eps_d(d) * principal_sqrt(c * z + d)
    return out if np.ndim(out) else complex(out)


def theta_function(z, terms: int = 60):
    """theta(z) = sum over n in Z of exp(2 pi i n^2 z)."""
    z = np.asarray(z, dtype=complex)
    n = np.arange(1, terms + 1)
    out = 1.0 + 2.0 * np.exp(2j * np.pi * np.multiply.outer(z, n * n)).sum(axis=-1)
    return out if np.ndim(out) else complex(out)


# --------------------------------------------------------------------------
# characters


@dataclass(frozen=True)
class DirichletCharacter:
    """A Dirichlet character modulo ``modulus`` given by its table of values."""

    modulus: int
    values: tuple
    label: str = "table"

    def __post_init__(self):
        q = self.modulus
        vals = np.asarray(self.values, dtype=complex)
        if vals.shape != (q,):
            raise ValueError(f"character table must have {q} entries")
        units = np.array([math.gcd(r, q) == 1 for r in range(q)])
        if np.any(np.abs(vals[~units]) > 0):
            raise ValueError("character must vanish off the units")
        if np.any(np.abs(np.abs(vals[units]) - 1) > 1e-12):
            raise ValueError("character values on units must have modulus 1")
        if abs(vals[1 % q] - 1) > 1e-12:
            raise ValueError("character must send 1 to 1")
        r = np.arange(q)
        prod = vals[(r[:, None] * r[None, :]) % q]
        if np.any(np.abs(prod - vals[:, None] * vals[None, :]) > 1e-12):
            raise ValueError("character table is not multiplicative")
        object.__setattr__(self, "values", tuple(complex(v) for v in vals))

    @classmethod
    def trivial(cls, modulus: int) -> "DirichletCharacter":
        return cls(modulus, tuple(1.0 if math.gcd(r, modulus) == 1 else 0.0 for r in range(modulus)), "trivial")

    @classmethod
    def kronecker(cls, disc: int, modulus: int) -> "DirichletCharacter":
        """r -> (disc / r) on odd residues; must be periodic modulo ``modulus``."""
        vals = []
        for r in range(modulus):
            if math.gcd(r, modulus) != 1:
                vals.append(0.0)
                continue
            v = {int(jacobi(disc, r + k * modulus)) for k in range(1, 4)}
            if len(v) != 1:
                raise ValueError(f"(D/.) with D={disc} is not periodic modulo {modulus}")
            vals.append(float(v.pop()))
        return cls(modulus, tuple(vals), f"kronecker:{disc}")

    @classmethod
    def parse(cls, label: str, modulus: int) -> "DirichletCharacter":
        """``trivial``, ``kronecker:D`` or ``table:v0,v1,...`` (values on residues 0..q-1)."""
        label = label.strip()
        if label == "trivial":
            return cls.trivial(modulus)
        kind, _, arg = label.partition(":")
        if kind == "kronecker":
            return cls.kronecker(int(arg), modulus)
        if kind == "table":
            vals = tuple(complex(v.strip().replace("i", "j")) for v in arg.split(","))
            return cls(modulus, vals, label)
        raise ValueError(f"unknown character label {label!r}")

    def __call__(self, d):
        idx = np.mod(np.asarray(d, dtype=np.int64), self.modulus)
        out = np.asarray(self.values)[idx]
        return out if out.ndim else complex(out)

    @property
    def is_even(self) -> bool:
        return abs(self(-1) - 1) < 1e-12


# --------------------------------------------------------------------------
# groups


@dataclass(frozen=True)
class GroupSpec:
    level: int
    weight: HalfIntegerWeight
    character: DirichletCharacter = None

    def __post_init__(self):
        if self.level <= 0 or self.level % 4:
            raise ValueError(f"level must be a positive multiple of 4, got {self.level}")
        object.__setattr__(self, "weight", HalfIntegerWeight.parse(self.weight))
        chi = self.character
        if chi is None:
            chi = DirichletCharacter.trivial(self.level)
        elif isinstance(chi, str):
            chi = DirichletCharacter.parse(chi, self.level)
        if chi.modulus != self.level:
            raise ValueError("character modulus must equal the level")
        object.__setattr__(self, "character", chi)

    @property
    def m(self) -> float:
        return self.weight.value


@dataclass(frozen=True)
class GroupInvariants:
    spec: GroupSpec
    h: float
    N: float
    epsilon_gamma: int
    center_elements: tuple
    central_compatible: bool
    cusp_compatible: bool

    @property
    def hN(self) -> float:
        return self.h * self.N

    @property
    def vanishes_identically(self) -> bool:
        """True when the central character test forces every Poincare series to vanish."""
        return not self.central_compatible


class IncompatibleCharacter(ValueError):
    pass


def in_gamma0(level: int, a, b, c, d) -> bool:
    ints = all(float(v) == round(float(v)) for v in (a, b, c, d))
    if not ints:
        return False
    a, b, c, d = (int(round(float(v))) for v in (a, b, c, d))
    return a * d - b * c == 1 and c % level == 0


def in_group(spec: GroupSpec, s: MetaplecticElement) -> bool:
    """Membership in the full preimage of Gamma_0(level)."""
    return in_gamma0(spec.level, s.a, s.b, s.c, s.d)


def theta_lift(gamma, level: int = 4) -> MetaplecticElement:
    """The metaplectic element (gamma, (c|d) sqrt(cz + d)) over gamma in Gamma_0(level)."""
    (a, b), (c, d) = np.asarray(gamma).tolist()
    if not in_gamma0(level, a, b, c, d):
        raise ValueError(f"{gamma!r} is not in Gamma_0({level})")
    a, b, c, d = (int(round(v)) for v in (a, b, c, d))
    eta_i = kronecker_shimura(c, d) * principal_sqrt(complex(c * 1j + d))
    return MetaplecticElement(a, b, c, d, eta_i)


def _multiplier_ratio(s: MetaplecticElement) -> complex:
    """j(g, z) / eta_s(z), a constant fourth root of unity."""
    c, d = int(round(s.c)), int(round(s.d))
    r = theta_multiplier(c, d, 1j) / s.eta_at_i
    return complex(np.round(r.real) + 1j * np.round(r.imag))


def character_value(spec: GroupSpec, s: MetaplecticElement) -> complex:
    """chi(s) = psi(d) (j(g_s, z) / eta_s(z))^(2m)."""
    if not in_group(spec, s):
        raise ValueError("element is not in the group")
    d = int(round(s.d))
    return complex(spec.character(d)) * _multiplier_ratio(s) ** spec.weight.two_m


def character_of_theta_lift(spec: GroupSpec, c, d):
    """chi(theta_lift(gamma)) = psi(d) eps_d^(-2m), vectorised over bottom rows."""
    return spec.character(d) * eps_d(d) ** (-spec.weight.two_m)


def build_group(spec: GroupSpec, strict: bool = True) -> GroupInvariants:
    """Width h, minimal |c| and centre of the group, with the character checks.

    With ``strict`` a character failing the translation condition
    eta_gamma^(-2m) = chi(gamma) on the stabiliser of infinity is rejected;
    otherwise the failure is only recorded.
    """
    level = spec.level
    # cusp width: least b > 0 with [[1, b], [0, 1]] in the group (also with -I)
    h = next(b for b in range(1, level + 1) if in_gamma0(level, 1, b, 0, 1))
    # minimal positive lower-left entry over the group
    N = next(c for c in range(1, level + 1)
             if any(math.gcd(c, d) == 1 and c % level == 0 for d in range(1, c + 1)))
    centre = tuple(central(k) for k in range(4) if in_group(spec, central(k)))
    m = spec.weight

    def chi_m(s):
        # exp(-imt) at the rotation angle of a central element
        k = next(k for k in range(4) if abs(central(k).eta_at_i - s.eta_at_i) < 1e-12)
        return complex(np.exp(-1j * m.value * k * math.pi))

    central_ok = all(abs(character_value(spec, s) - chi_m(s)) < 1e-12 for s in centre)
    # stabiliser of infinity is generated by the translation and the centre
    gens = [MetaplecticElement(1, h, 0, 1, 1.0)] + list(centre)
    cusp_ok = all(abs(character_value(spec, g) - g.eta_at_i ** (-m.two_m)) < 1e-12 for g in gens)
    if strict and not cusp_ok:
        raise IncompatibleCharacter(
            f"character {spec.character.label} violates eta^(-2m) = chi on the stabiliser of infinity")
    return GroupInvariants(spec, float(h), float(N), len(centre), centre, central_ok, cusp_ok)


# --------------------------------------------------------------------------
# cosets


def complete_row(c: int, d: int) -> tuple:
    """An integer matrix [[a, b], [c, d]] of determinant 1 (needs gcd(c, d) = 1)."""
    if c == 0:
        if abs(d) != 1:
            raise ValueError("row (0, d) needs d = +-1")
        return (d, 0, 0, d)
    a = pow(d, -1, abs(c))
    # a d - b c = 1
    b, rem = divmod(a * d - 1, c)
    assert rem == 0
    return (a, b, c, d)


def coprime_rows(c: int, d_lo: int, d_hi: int) -> np.ndarray:
    """All d in [d_lo, d_hi] with gcd(c, d) = 1."""
    d = np.arange(d_lo, d_hi + 1, dtype=np.int64)
    return d[np.gcd(d, c) == 1]


def row_tail_bound(c, y, D, m: float):
    """Bound for the sum over |d + cx| > D of |cz + d|^(-m), for every x."""
    c = np.asarray(c, dtype=float)
    D = np.asarray(D, dtype=float)
    # |cz + d|^2 >= (d + cx)^2 + (cy)^2 >= (d + cx)^2; integral comparison from D
    return 2.0 * (D ** (1.0 - m) / (m - 1.0) + D ** (-m))


def row_sum_bound(c, y, m: float, cauchy_const: float):
    """Bound for the full sum over d of |cz + d|^(-m) (any x)."""
    cy = np.asarray(c, dtype=float) * y
    return cy ** (1.0 - m) * cauchy_const + cy ** (-m)


def power_tail(coef: float, p: float, K: int) -> float:
    """Bound for the sum over integers k > K of coef * k^p (p < -1), by integral comparison."""
    if p >= -1:
        return math.inf
    if K < 1:
        return coef * (1.0 + 1.0 / (-p - 1.0))
    return coef * K ** (p + 1.0) / (-p - 1.0)


@dataclass
class CosetList:
    """Representatives of Gamma_infinity \\ Gamma: the identity plus rows (c, d), c > 0."""

    c: np.ndarray
    d: np.ndarray
    c_bound: float
    d_bound: dict
    tail_estimate: float
    completeness_note: str
    level: int = 4
    _reps: list = field(default=None, repr=False)

    def __len__(self):
        return 1 + len(self.c)

    @property
    def reps(self) -> list:
        if self._reps is None:
            out = [MetaplecticElement(1, 0, 0, 1, 1.0)]
            for c, d in zip(self.c.tolist(), self.d.tolist()):
                out.append(theta_lift(np.array(complete_row(c, d)).reshape(2, 2), self.level))
            self._reps = out
        return self._reps


def enumerate_cosets(spec: GroupSpec, c_bound: float, d_bound=None, tol: float = 1e-8) -> CosetList:
    """Bottom rows (c, d) with 0 < c <= c_bound, level | c, gcd(c, d) = 1, |d| <= d_bound(c).

    ``d_bound`` may be an int, a callable of c, or None; in the last case it is
    chosen so that the omitted d-tail of the weight-m sum at z = i is below
    ``tol`` per row.  The reported tail estimate (at z = i, bounded seed)
    covers omitted d and all rows with c > c_bound.
    """
    from .special import cauchy_power_integral

    if c_bound < 0:
        raise ValueError("c_bound must be nonnegative")
    m = spec.m
    level = spec.level
    cs = np.arange(level, int(math.floor(c_bound)) + 1, level)
    rows_c, rows_d, bounds = [], [], {}
    tail = 0.0
    for c in cs.tolist():
        if d_bound is None:
            D = int(math.ceil((tol * (m - 1.0) / 4.0) ** (1.0 / (1.0 - m))))
        elif callable(d_bound):
            D = int(d_bound(c))
        else:
            D = int(d_bound)
        d = coprime_rows(c, -D, D)
        rows_c.append(np.full(len(d), c, dtype=np.int64))
        rows_d.append(d)
        bounds[c] = D
        tail += float(row_tail_bound(c, 1.0, max(D, 1), m))
    # rows beyond c_bound: sum over k > K of row_sum_bound(k level), by integral comparison
    B = cauchy_power_integral(m / 2.0)
    tail += power_tail(level ** (1.0 - m) * B, 1.0 - m, len(cs)) + power_tail(level ** (-m), -m, len(cs))
    c_arr = np.concatenate(rows_c) if rows_c else np.zeros(0, dtype=np.int64)
    d_arr = np.concatenate(rows_d) if rows_d else np.zeros(0, dtype=np.int64)
    note = (f"identity coset plus {len(c_arr)} rows with c <= {c_bound:g}; "
            f"tail estimate {tail:.3e} at z = i for a seed bounded by 1")
    return CosetList(c_arr, d_arr, float(c_bound), bounds, tail, note, level)
