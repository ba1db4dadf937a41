"""Limit moments, characteristic function and Gaussian expectation laws.

The normalized traces of even powers of any scaled collective spin component
converge to the moments (2l)! / (2^{3l} l!), i.e. the moments of a centered
Gaussian with standard deviation 1/2.  Mixed moments of two distinct
components factorize in the limit.  This module provides the closed forms
together with the real and complex Gaussian expectation functionals.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Mapping, Sequence, Tuple, Union

from scipy import integrate

from .rationals import ComplexRational

#: default absolute tolerance for adaptive quadrature
DEFAULT_QUAD_TOL = 1e-12
#: quadrature window, in standard deviations, with negligible tail mass
_TAIL_SIGMAS = 8


class QuadratureError(Exception):
    """Raised when adaptive quadrature cannot reach the requested tolerance."""

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


def limit_moment(ell: int) -> Fraction:
    """Limit of the 2*ell-th normalized trace moment: (2l)! / (2^{3l} l!)."""
    if ell < 0:
        raise ValueError("ell must be >= 0")
    return Fraction(math.factorial(2 * ell), 2 ** (3 * ell) * math.factorial(ell))


def mixed_limit_moment(m: int, ell: int) -> Fraction:
    """Limit of the mixed even moment; factorizes into single moments."""
    if m < 0 or ell < 0:
        raise ValueError("orders must be >= 0")
    return Fraction(
        math.factorial(2 * m) * math.factorial(2 * ell),
        2 ** (3 * (m + ell)) * math.factorial(m) * math.factorial(ell),
    )


def characteristic_function(t: float) -> float:
    """Characteristic function exp(-t^2 / 8) of the limiting law."""
    if not math.isfinite(t):
        raise ValueError("t must be finite")
    return math.exp(-t * t / 8.0)


@dataclass(frozen=True)
class GaussianLaw:
    """The limiting real law: zero mean, standard deviation 1/2."""

    mean: Fraction = Fraction(0)
    standard_deviation: Fraction = Fraction(1, 2)

    def density(self, eta: float) -> float:
        return math.sqrt(2.0 / math.pi) * math.exp(-2.0 * eta * eta)


@dataclass(frozen=True)
class ComplexGaussianLaw:
    """The limiting law on the complex plane, density (2/pi) exp(-2|z|^2)."""

    def density(self, z: complex) -> float:
        return (2.0 / math.pi) * math.exp(-2.0 * abs(z) ** 2)


Integrand = Union[Callable[[float], float], Sequence]


def _poly_moment(coeffs: Sequence) -> Fraction:
    """Exact expectation of a polynomial given by its coefficient sequence."""
    total = Fraction(0)
    for k, c in enumerate(coeffs):
        c = Fraction(c)
        if not c or k % 2 == 1:
            continue
        m = k // 2
        # <eta^{2m}> = (2m-1)!! / 4^m
        total += c * Fraction(
            math.factorial(2 * m), 2 ** (2 * m) * 2**m * math.factorial(m)
        )
    return total


def gaussian_expectation(f: Integrand, tol: float = DEFAULT_QUAD_TOL):
    """Expectation of f under the sigma = 1/2 centered Gaussian.

    Polynomials (given as a coefficient sequence, lowest power first) are
    evaluated exactly; callables go through adaptive quadrature on a
    truncated window whose tail mass is far below ``tol``.
    """
    if not callable(f):
        return _poly_moment(f)
    law = GaussianLaw()
    half_width = float(_TAIL_SIGMAS) * 0.5
    val, err = integrate.quad(
        lambda eta: f(eta) * law.density(eta),
        -half_width,
        half_width,
        epsabs=tol / 10,
        epsrel=tol / 10,
        limit=200,
    )
    if err > tol:
        raise QuadratureError(
            f"quadrature residual {err:.3e} exceeds tolerance {tol:.3e}",
            residual=err,
        )
    return val


SymbolLike = Mapping[Tuple[int, int], object]


def complex_gaussian_expectation(g, tol: float = DEFAULT_QUAD_TOL):
    """Expectation of g(z*, z) under the density (2/pi) exp(-2|z|^2).

    Monomial maps {(m, n): coeff} are exact: the phase integral kills every
    m != n term and the radial integral gives m! / 2^m.  Callables
    g(zstar, z) integrate numerically over the plane in polar coordinates.
    """
    if not callable(g):
        total = ComplexRational(0)
        for (m, n), coeff in g.items():
            if m != n:
                continue  # phase integral vanishes identically
            total = total + ComplexRational.coerce(coeff) * Fraction(
                math.factorial(m), 2**m
            )
        return total
    max_r = float(_TAIL_SIGMAS) * 0.5

    def real_part(r, phi):
        z = complex(r * math.cos(phi), r * math.sin(phi))
        return (2.0 / math.pi) * g(z.conjugate(), z).real * math.exp(-2.0 * r * r) * r

    def imag_part(r, phi):
        z = complex(r * math.cos(phi), r * math.sin(phi))
        return (2.0 / math.pi) * g(z.conjugate(), z).imag * math.exp(-2.0 * r * r) * r

    out = []
    for part in (real_part, imag_part):
        val, err = integrate.dblquad(
            part, 0.0, 2.0 * math.pi, 0.0, max_r,
            epsabs=tol / 10, epsrel=tol / 10,
        )
        if err > tol:
            raise QuadratureError(
                f"quadrature residual {err:.3e} exceeds tolerance {tol:.3e}",
                residual=err,
            )
        out.append(val)
    return complex(out[0], out[1])
