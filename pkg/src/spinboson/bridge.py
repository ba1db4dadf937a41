"""End-to-end verification of the bosonization theorem.

Connects the three representations of the same limit: exact spin traces at
finite N, thermal-oscillator expectations at x = 1/3, and the complex
Gaussian integral.  Also quantifies the one piece of information the symbol
map deliberately discards, namely the O(1/N) difference between spin words
with the same letter content but different orderings.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence

import numpy as np

from . import spin_core, thermal
from .boson import BosonSymbol, NormalForm, normal_order_symbol
from .rationals import ComplexRational
from .spin_core import MINUS, PLUS, Z, SpinPolynomial

MAX_ORDERING_LETTERS = 10


@dataclass
class ConvergenceReport:
    """Spin-side values against the fixed boson-side target."""

    n_values: List[int]
    spin_values: List[float]
    boson_value: float
    abs_errors: List[float] = field(default_factory=list)
    fitted_rate: Optional[float] = None
    spin_decimals: List[str] = field(default_factory=list)

    def __post_init__(self):
        if not self.abs_errors:
            self.abs_errors = [
                abs(v - self.boson_value) for v in self.spin_values
            ]
        if self.fitted_rate is None:
            self.fitted_rate = fit_decay_rate(self.n_values, self.abs_errors)

    def to_json(self) -> str:
        return json.dumps(
            {
                "N_values": self.n_values,
                "spin_values": self.spin_values,
                "spin_decimals": self.spin_decimals,
                "boson_value": self.boson_value,
                "abs_errors": self.abs_errors,
                "fitted_rate": self.fitted_rate,
            }
        )

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf)
        writer.writerow(["N", "spin_value", "boson_value", "abs_error"])
        for n, v, e in zip(self.n_values, self.spin_values, self.abs_errors):
            writer.writerow([n, repr(v), repr(self.boson_value), repr(e)])
        return buf.getvalue()


def fit_decay_rate(n_values: Sequence[int], errors: Sequence[float]):
    """Least-squares slope of log-error against log-N, sign flipped.

    Returns None when fewer than two errors are nonzero; a vanishing error
    means the finite-N value is already exact.
    """
    pts = [(n, e) for n, e in zip(n_values, errors) if e > 0]
    if len(pts) < 2:
        return None
    xs = np.log([p[0] for p in pts])
    ys = np.log([p[1] for p in pts])
    slope = np.polyfit(xs, ys, 1)[0]
    return float(-slope)


def boson_image(poly: SpinPolynomial) -> NormalForm:
    """Normal-ordered image of a raising/lowering polynomial.

    Each word maps to the commuting symbol z*^(#plus) z^(#minus); ordering
    information is discarded (it is O(1/N)) and the symbol is then re-typed
    with creation operators on the left.
    """
    sym_terms: Dict = {}
    for word, coeff in poly.terms.items():
        if Z in word:
            raise ValueError(
                "words containing Sz have no raising/lowering image; "
                "use position_sector for functions of Sz"
            )
        key = (word.count(PLUS), word.count(MINUS))
        sym_terms[key] = sym_terms.get(key, ComplexRational(0)) + coeff
    return normal_order_symbol(BosonSymbol(sym_terms))


def verify_theorem(
    poly: SpinPolynomial,
    n_values: Sequence[int],
    digits: int = 12,
) -> ConvergenceReport:
    """Spin traces against the x = 1/3 thermal expectation of the image."""
    n_values = list(n_values)
    if n_values != sorted(n_values):
        raise ValueError("N values must be ascending")
    form = boson_image(poly)
    boson = thermal.thermal_expect(thermal.THEOREM_STATE, form)
    if not boson.is_real:
        raise ValueError(f"boson-side value {boson} is not real")
    spin_vals = []
    decimals = []
    for n in n_values:
        res = spin_core.normalized_trace(n, poly, digits=digits)
        spin_vals.append(res.real())
        decimals.append(res.decimal)
    return ConvergenceReport(
        n_values=n_values,
        spin_values=spin_vals,
        boson_value=float(boson.re),
        spin_decimals=decimals,
    )


def _distinct_orderings(word):
    """Distinct permutations of a letter multiset, generated recursively."""
    counts: Dict[str, int] = {}
    for ch in word:
        counts[ch] = counts.get(ch, 0) + 1
    out: List[tuple] = []
    prefix: List[str] = []

    def rec():
        if len(prefix) == len(word):
            out.append(tuple(prefix))
            return
        for ch in sorted(counts):
            if counts[ch]:
                counts[ch] -= 1
                prefix.append(ch)
                rec()
                prefix.pop()
                counts[ch] += 1

    rec()
    return out


def ordering_sensitivity(poly: SpinPolynomial, N: int) -> float:
    """Largest trace spread among reorderings of any term's letters.

    Measures the part of the spin polynomial that the commuting symbol map
    cannot see; the theorem guarantees it vanishes as N grows.
    """
    worst = 0.0
    for word, coeff in poly.terms.items():
        if len(word) > MAX_ORDERING_LETTERS:
            raise spin_core.ResourceLimitError(
                f"word of length {len(word)} exceeds the ordering cap "
                f"{MAX_ORDERING_LETTERS}"
            )
        values = []
        for variant in _distinct_orderings(word):
            res = spin_core.normalized_trace(
                N, SpinPolynomial({variant: coeff})
            )
            values.append(res.approx())
        if values:
            spread = max(
                abs(v1 - v2) for v1 in values for v2 in values
            )
            worst = max(worst, spread)
    return worst


def position_sector(
    f_coeffs: Sequence,
    n_values: Sequence[int],
    digits: int = 12,
) -> ConvergenceReport:
    """Traces of f(Sz/sqrt(N)) against the ground-oscillator expectation.

    ``f_coeffs`` are polynomial coefficients, lowest power first.
    """
    n_values = list(n_values)
    if n_values != sorted(n_values):
        raise ValueError("N values must be ascending")
    poly = SpinPolynomial.zero()
    for k, c in enumerate(f_coeffs):
        poly = poly + SpinPolynomial.from_word((Z,) * k, c)
    boson = thermal.ground_position_expectation(
        [Fraction(c) for c in f_coeffs]
    )
    spin_vals = []
    decimals = []
    for n in n_values:
        res = spin_core.normalized_trace(n, poly, digits=digits)
        spin_vals.append(res.real())
        decimals.append(res.decimal)
    return ConvergenceReport(
        n_values=n_values,
        spin_values=spin_vals,
        boson_value=float(boson),
        spin_decimals=decimals,
    )
