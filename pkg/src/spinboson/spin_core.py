"""Exact traces of polynomials in scaled collective spin operators.

For N spin-1/2 sites the collective operators S_+, S_-, S_z act block
diagonally on total-spin sectors j, each occurring with the Catalan-triangle
multiplicity d(N, j).  Every operator letter carries an implicit 1/sqrt(N),
so the normalized trace of a word of length L is

    2^{-N} N^{-L/2} sum_j d(N, j) tr_j(word).

The per-sector trace is evaluated symbolically: a word traces a closed walk
on the magnetic quantum numbers, every ladder edge is crossed an even number
of times, and the diagonal matrix element is therefore a polynomial in
j(j+1) and m with rational coefficients.  Summing that polynomial over m
(Faulhaber sums) gives a single polynomial in 2j per word, so the full trace
costs O(N) exact operations regardless of how large N is.  A dense
tensor-product oracle over the 2^N space provides an independent check for
small N.
"""

from __future__ import annotations

import decimal
import math
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Dict, Iterator, Sequence, Tuple

import numpy as np
import scipy.sparse as sp

from .rationals import ComplexRational

PLUS = "+"
MINUS = "-"
Z = "z"
LETTERS = (PLUS, MINUS, Z)

#: A word is a finite tuple of letters, applied right-to-left like a product.
SpinWord = Tuple[str, ...]

DEFAULT_ORACLE_CAP = 14
#: budget on (sector dimension) x (total word degree) for a single trace
DEFAULT_MAX_CELLS = 10**8


class ResourceLimitError(Exception):
    """Raised when a computation would exceed its configured budget."""


def _check_word(word: Sequence[str]) -> SpinWord:
    w = tuple(word)
    for ch in w:
        if ch not in LETTERS:
            raise ValueError(f"unknown spin letter {ch!r}")
    return w


def word_adjoint(word: SpinWord) -> SpinWord:
    """Reverse the word and swap raising/lowering letters."""
    swap = {PLUS: MINUS, MINUS: PLUS, Z: Z}
    return tuple(swap[ch] for ch in reversed(word))


class SpinPolynomial:
    """Exact linear combination of words over {S+, S-, Sz}.

    Each letter carries an implicit 1/sqrt(N) scaling that is applied when a
    trace is taken.  Coefficients are Gaussian rationals; zero coefficients
    are never stored.
    """

    __slots__ = ("terms",)

    def __init__(self, terms: Dict[SpinWord, ComplexRational] | None = None):
        clean: Dict[SpinWord, ComplexRational] = {}
        for word, coeff in (terms or {}).items():
            c = ComplexRational.coerce(coeff)
            if c:
                clean[_check_word(word)] = c
        self.terms = clean

    # -- constructors -------------------------------------------------------

    @classmethod
    def identity(cls) -> "SpinPolynomial":
        return cls({(): ComplexRational(1)})

    @classmethod
    def zero(cls) -> "SpinPolynomial":
        return cls({})

    @classmethod
    def from_word(cls, word: Sequence[str], coeff=1) -> "SpinPolynomial":
        return cls({tuple(word): ComplexRational.coerce(coeff)})

    @classmethod
    def s_plus(cls) -> "SpinPolynomial":
        return cls.from_word((PLUS,))

    @classmethod
    def s_minus(cls) -> "SpinPolynomial":
        return cls.from_word((MINUS,))

    @classmethod
    def s_z(cls) -> "SpinPolynomial":
        return cls.from_word((Z,))

    @classmethod
    def s_x(cls) -> "SpinPolynomial":
        half = ComplexRational(Fraction(1, 2))
        return cls({(PLUS,): half, (MINUS,): half})

    @classmethod
    def s_y(cls) -> "SpinPolynomial":
        # Sy = (S+ - S-) / (2i)
        c = ComplexRational(0, Fraction(-1, 2))
        return cls({(PLUS,): c, (MINUS,): -c})

    # -- algebra ------------------------------------------------------------

    def __add__(self, other: "SpinPolynomial") -> "SpinPolynomial":
        out = dict(self.terms)
        for word, c in other.terms.items():
            out[word] = out.get(word, ComplexRational(0)) + c
        return SpinPolynomial(out)

    def __sub__(self, other: "SpinPolynomial") -> "SpinPolynomial":
        return self + (-other)

    def __neg__(self) -> "SpinPolynomial":
        return SpinPolynomial({w: -c for w, c in self.terms.items()})

    def __mul__(self, other) -> "SpinPolynomial":
        if not isinstance(other, SpinPolynomial):
            return self.scale(other)
        out: Dict[SpinWord, ComplexRational] = {}
        for w1, c1 in self.terms.items():
            for w2, c2 in other.terms.items():
                w = w1 + w2
                out[w] = out.get(w, ComplexRational(0)) + c1 * c2
        return SpinPolynomial(out)

    def __rmul__(self, other) -> "SpinPolynomial":
        return self.scale(other)

    def scale(self, scalar) -> "SpinPolynomial":
        c = ComplexRational.coerce(scalar)
        return SpinPolynomial({w: c * v for w, v in self.terms.items()})

    def __pow__(self, n: int) -> "SpinPolynomial":
        if n < 0:
            raise ValueError("negative powers are not defined")
        out = SpinPolynomial.identity()
        for _ in range(n):
            out = out * self
        return out

    def adjoint(self) -> "SpinPolynomial":
        return SpinPolynomial(
            {word_adjoint(w): c.conjugate() for w, c in self.terms.items()}
        )

    def degree(self) -> int:
        return max((len(w) for w in self.terms), default=0)

    def __eq__(self, other):
        return isinstance(other, SpinPolynomial) and self.terms == other.terms

    def __repr__(self):
        if not self.terms:
            return "SpinPolynomial(0)"
        parts = []
        for w in sorted(self.terms, key=lambda w: (len(w), w)):
            name = "".join("S" + ch for ch in w) or "1"
            parts.append(f"({self.terms[w]})*{name}")
        return "SpinPolynomial(" + " + ".join(parts) + ")"


# ---------------------------------------------------------------------------
# Irrep bookkeeping
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class IrrepSpec:
    """A total-spin sector: twice_j, its dimension and multiplicity d(N, j)."""

    twice_j: int
    dimension: int
    multiplicity: int


def irrep_multiplicity(N: int, twice_j: int) -> int:
    """Multiplicity d(N, j) = C(N, N/2 - j) - C(N, N/2 - j - 1)."""
    if N < 1:
        raise ValueError("N must be >= 1")
    if twice_j < 0 or twice_j > N or (N - twice_j) % 2 != 0:
        raise ValueError(
            f"twice_j={twice_j} invalid for N={N}: need 0 <= twice_j <= N "
            f"and twice_j congruent to N mod 2"
        )
    k = (N - twice_j) // 2
    lower = math.comb(N, k - 1) if k >= 1 else 0
    return math.comb(N, k) - lower


def irrep_sectors(N: int) -> Iterator[IrrepSpec]:
    """All sectors for N sites, smallest j first."""
    for twice_j in range(N % 2, N + 1, 2):
        yield IrrepSpec(twice_j, twice_j + 1, irrep_multiplicity(N, twice_j))


# ---------------------------------------------------------------------------
# Ladder action on a single sector
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Amplitude:
    """An exact amplitude coeff * sqrt(radicand) with integer radicand."""

    coeff: Fraction
    radicand: int = 1

    @property
    def is_rational(self) -> bool:
        return self.radicand == 1 or self.coeff == 0

    def as_fraction(self) -> Fraction:
        if not self.is_rational:
            raise ValueError(f"{self} is irrational")
        return self.coeff if self.coeff else Fraction(0)

    def __float__(self):
        return float(self.coeff) * math.sqrt(self.radicand)

    def __str__(self):
        if self.is_rational:
            return str(self.as_fraction())
        return f"{self.coeff}*sqrt({self.radicand})"


def _reduce_radical(coeff: Fraction, radicand: Fraction) -> Amplitude:
    # normalize p/q under the root to an integer radicand, then strip squares
    p, q = radicand.numerator, radicand.denominator
    coeff = coeff / q
    rad = p * q
    r = math.isqrt(rad)
    if r * r == rad:
        return Amplitude(coeff * r, 1)
    square = 1
    d = 2
    rest = rad
    while d * d <= rest:
        while rest % (d * d) == 0:
            rest //= d * d
            square *= d
        d += 1
    return Amplitude(coeff * square, rest)


def apply_word_in_irrep(
    word: Sequence[str], twice_j: int, m_index: int
) -> Dict[int, Amplitude]:
    """Apply a word to basis vector |j, m> with m = -j + m_index.

    Letters act right-to-left.  Returns a sparse map from basis index to the
    exact amplitude of the image (at most one entry, since ladder letters map
    basis vectors to basis vectors).
    """
    word = _check_word(word)
    if twice_j < 0:
        raise ValueError("twice_j must be >= 0")
    dim = twice_j + 1
    if not 0 <= m_index < dim:
        raise ValueError(f"m_index {m_index} outside sector of dimension {dim}")

    tj = twice_j
    tm = -tj + 2 * m_index
    a = tj * (tj + 2)
    coeff = Fraction(1)
    radicand = Fraction(1)
    for ch in reversed(word):
        if ch == Z:
            coeff *= Fraction(tm, 2)
        elif ch == PLUS:
            f = Fraction(a - tm * (tm + 2), 4)  # j(j+1) - m(m+1)
            if f == 0:
                return {}
            radicand *= f
            tm += 2
        else:
            f = Fraction(a - tm * (tm - 2), 4)  # j(j+1) - m(m-1)
            if f == 0:
                return {}
            radicand *= f
            tm -= 2
        if coeff == 0:
            return {}
    amp = _reduce_radical(coeff, radicand)
    if amp.coeff == 0:
        return {}
    return {(tm + tj) // 2: amp}


# ---------------------------------------------------------------------------
# Symbolic per-word trace machinery
#
# Variables: a = 2j(2j+2) (so j(j+1) = a/4) and u = 2m.  A word's diagonal
# matrix element is a polynomial in (a, u); the sector trace follows from
# power sums of u over -2j..2j, which are themselves polynomials in 2j.
# ---------------------------------------------------------------------------

_Poly2 = Dict[Tuple[int, int], Fraction]


def _p2_mul(p: _Poly2, q: _Poly2) -> _Poly2:
    out: _Poly2 = {}
    for (ka, ku), c in p.items():
        for (la, lu), d in q.items():
            key = (ka + la, ku + lu)
            out[key] = out.get(key, Fraction(0)) + c * d
    return {k: c for k, c in out.items() if c}


def _edge_factor(e: int) -> _Poly2:
    # squared ladder amplitude across the edge whose lower end is u + e:
    # (a - (u+e)(u+e+2)) / 4
    return {
        (1, 0): Fraction(1, 4),
        (0, 2): Fraction(-1, 4),
        (0, 1): Fraction(-(2 * e + 2), 4),
        (0, 0): Fraction(-e * (e + 2), 4),
    }


def _z_factor(d: int) -> _Poly2:
    # eigenvalue of Sz at offset d: (u + d) / 2
    return {(0, 1): Fraction(1, 2), (0, 0): Fraction(d, 2)}


def _word_diag_poly(word: SpinWord) -> _Poly2 | None:
    """Diagonal matrix element of a word as a polynomial in (a, u).

    Returns None when the word changes m, i.e. the diagonal vanishes
    identically.  Ladder radicals cancel in matched edge pairs, so the result
    is an honest rational polynomial; sector-boundary truncation is automatic
    because the edge factor vanishes at m = +-j.
    """
    d = 0
    edges: Counter = Counter()
    poly: _Poly2 = {(0, 0): Fraction(1)}
    for ch in reversed(word):
        if ch == PLUS:
            edges[d] += 1
            d += 2
        elif ch == MINUS:
            edges[d - 2] += 1
            d -= 2
        else:
            poly = _p2_mul(poly, _z_factor(d))
    if d != 0:
        return None
    for e, cnt in edges.items():
        # closed walk on a line: every edge is crossed an even number of times
        factor = _edge_factor(e)
        for _ in range(cnt // 2):
            poly = _p2_mul(poly, factor)
    return poly


@lru_cache(maxsize=None)
def _faulhaber(r: int) -> Tuple[Fraction, ...]:
    """Coefficients of sum_{i=1}^{n} i^r as a polynomial in n."""
    coeffs = [Fraction(math.comb(r + 1, t)) for t in range(r + 2)]
    coeffs[0] -= 1
    for s in range(r):
        for t, c in enumerate(_faulhaber(s)):
            coeffs[t] -= math.comb(r + 1, s) * c
    return tuple(c / (r + 1) for c in coeffs)


@lru_cache(maxsize=None)
def _power_sum_poly(k: int) -> Tuple[Fraction, ...]:
    """Coefficients of sum_{u=-tj..tj step 2} u^k as a polynomial in tj."""
    out = [Fraction(0)] * (k + 2)
    for r in range(k + 1):
        fr = list(_faulhaber(r))
        if r == 0:
            fr[0] += 1  # include the i = 0 term
        pre = Fraction(math.comb(k, r) * 2**r * (-1) ** (k - r))
        for t, c in enumerate(fr):
            out[k - r + t] += pre * c
    while len(out) > 1 and out[-1] == 0:
        out.pop()
    return tuple(out)


def _p1_mul(p: Sequence[Fraction], q: Sequence[Fraction]) -> list:
    out = [Fraction(0)] * (len(p) + len(q) - 1)
    for i, x in enumerate(p):
        for j, y in enumerate(q):
            out[i + j] += x * y
    return out


def _p1_add_into(acc: list, term: Sequence[Fraction], scale: Fraction) -> list:
    if len(term) > len(acc):
        acc = acc + [Fraction(0)] * (len(term) - len(acc))
    for i, c in enumerate(term):
        acc[i] += scale * c
    return acc


def _sector_trace_poly(diag: _Poly2) -> list:
    """Per-sector trace of a word as a polynomial in tj = 2j."""
    out = [Fraction(0)]
    for (ka, ku), c in diag.items():
        a_poly = [Fraction(1)]
        for _ in range(ka):  # a = tj^2 + 2 tj
            a_poly = _p1_mul(a_poly, [Fraction(0), Fraction(2), Fraction(1)])
        term = _p1_mul(a_poly, list(_power_sum_poly(ku)))
        out = _p1_add_into(out, term, c)
    return out


def _p1_eval(coeffs: Sequence[Fraction], x) :
    v = Fraction(0)
    for c in reversed(coeffs):
        v = v * x + c
    return v


# ---------------------------------------------------------------------------
# Normalized trace
# ---------------------------------------------------------------------------


@dataclass
class TraceResult:
    """Exact value of a normalized trace, rendered to a decimal string.

    The exact value is ``exact + sqrt_n * sqrt(N)``; the radical part is only
    nonzero for polynomials containing odd-length words with nonvanishing
    trace, where the per-letter 1/sqrt(N) scaling leaves a stray sqrt(N).
    """

    n: int
    exact: ComplexRational
    sqrt_n: ComplexRational = field(default_factory=ComplexRational)
    decimal: str = ""
    float_path: bool = False

    def approx(self) -> complex:
        v = complex(self.exact) + complex(self.sqrt_n) * math.sqrt(self.n)
        return v

    def real(self) -> float:
        v = self.approx()
        if abs(v.imag) > 1e-12 * max(1.0, abs(v.real)):
            raise ValueError(f"trace value {v} is not real")
        return v.real


def _render_decimal(result_n: int, exact: ComplexRational,
                    sqrt_n: ComplexRational, digits: int) -> str:
    ctx = decimal.Context(prec=digits + 10, rounding=decimal.ROUND_HALF_EVEN)
    out_ctx = decimal.Context(prec=digits, rounding=decimal.ROUND_HALF_EVEN)

    def frac(f: Fraction):
        return ctx.divide(decimal.Decimal(f.numerator), decimal.Decimal(f.denominator))

    root = ctx.sqrt(decimal.Decimal(result_n)) if sqrt_n else decimal.Decimal(0)
    re = out_ctx.plus(frac(exact.re) + frac(sqrt_n.re) * root)
    im = out_ctx.plus(frac(exact.im) + frac(sqrt_n.im) * root)
    if im == 0:
        return str(re)
    sign = "+" if im >= 0 else "-"
    return f"{re}{sign}{abs(im)}i"


def _trace_word_sums(N: int, poly: SpinPolynomial):
    """Group words by length and return {L: summed trace polynomial in tj}."""
    grouped: Dict[int, Dict[str, list]] = {}
    for word, coeff in poly.terms.items():
        diag = _word_diag_poly(word)
        if diag is None:
            continue
        tr_poly = _sector_trace_poly(diag)
        L = len(word)
        bucket = grouped.setdefault(L, {"re": [Fraction(0)], "im": [Fraction(0)]})
        bucket["re"] = _p1_add_into(bucket["re"], tr_poly, coeff.re)
        bucket["im"] = _p1_add_into(bucket["im"], tr_poly, coeff.im)
    return grouped


def normalized_trace(
    N: int,
    poly: SpinPolynomial,
    digits: int = 12,
    use_float: bool = False,
    max_cells: int = DEFAULT_MAX_CELLS,
) -> TraceResult:
    """Exact 2^{-N} trace of a polynomial with 1/sqrt(N) per letter.

    Set ``use_float`` to evaluate the sector sum in binary64 with compensated
    summation instead of exact rationals; the result is then labeled with
    ``float_path=True`` and ``exact`` holds the rounded value.
    """
    if N < 1:
        raise ValueError("N must be >= 1")
    if (N + 1) * max(1, poly.degree()) > max_cells:
        raise ResourceLimitError(
            f"sector dimension {N + 1} x degree {poly.degree()} exceeds "
            f"budget {max_cells}"
        )
    grouped = _trace_word_sums(N, poly)
    if use_float:
        return _normalized_trace_float(N, grouped, digits)

    exact = ComplexRational(0)
    sqrt_n = ComplexRational(0)
    pow2 = 2**N
    for L, bucket in grouped.items():
        tot_re = Fraction(0)
        tot_im = Fraction(0)
        re_poly, im_poly = bucket["re"], bucket["im"]
        for sector in irrep_sectors(N):
            tj = sector.twice_j
            d = sector.multiplicity
            if any(re_poly):
                tot_re += d * _p1_eval(re_poly, tj)
            if any(im_poly):
                tot_im += d * _p1_eval(im_poly, tj)
        val = ComplexRational(Fraction(tot_re, pow2), Fraction(tot_im, pow2))
        if L % 2 == 0:
            exact = exact + val * Fraction(1, N ** (L // 2))
        else:
            sqrt_n = sqrt_n + val * Fraction(1, N ** ((L + 1) // 2))
    return TraceResult(
        n=N,
        exact=exact,
        sqrt_n=sqrt_n,
        decimal=_render_decimal(N, exact, sqrt_n, digits),
    )


def _normalized_trace_float(N: int, grouped, digits: int) -> TraceResult:
    ln2 = math.log(2.0)
    # scaled multiplicity d(N, j) / 2^N via log-gamma, safe for any N
    def log_mult(tj):
        k = (N - tj) // 2
        lc = math.lgamma(N + 1) - math.lgamma(k + 1) - math.lgamma(N - k + 1)
        if k >= 1:
            lc1 = math.lgamma(N + 1) - math.lgamma(k) - math.lgamma(N - k + 2)
            # d = C(N,k) - C(N,k-1); combine in linear space relative to lc
            return lc + math.log1p(-math.exp(lc1 - lc))
        return lc

    total = complex(0.0)
    for L, bucket in grouped.items():
        re_poly = [float(c) for c in bucket["re"]]
        im_poly = [float(c) for c in bucket["im"]]
        acc = complex(0.0)
        comp = complex(0.0)  # Kahan compensation
        for tj in range(N % 2, N + 1, 2):
            w = math.exp(log_mult(tj) - N * ln2)
            term = w * complex(
                _p1_eval_float(re_poly, tj), _p1_eval_float(im_poly, tj)
            )
            y = term - comp
            t = acc + y
            comp = (t - acc) - y
            acc = t
        scale = N ** (-(L / 2.0))
        total += acc * scale
    exact = ComplexRational(Fraction(total.real), Fraction(total.imag))
    return TraceResult(
        n=N,
        exact=exact,
        decimal=_render_decimal(N, exact, ComplexRational(0), digits) + " (float)",
        float_path=True,
    )


def _p1_eval_float(coeffs, x):
    v = 0.0
    for c in reversed(coeffs):
        v = v * x + c
    return v


# ---------------------------------------------------------------------------
# Dense tensor-product oracle
# ---------------------------------------------------------------------------


@lru_cache(maxsize=16)
def _collective_ops(N: int):
    """Sparse integer collective operators S+, S-, 2*Sz on the 2^N space."""
    sp_site = sp.csr_matrix(np.array([[0, 1], [0, 0]], dtype=np.int64))
    sm_site = sp_site.T.tocsr()
    sz2_site = sp.csr_matrix(np.array([[1, 0], [0, -1]], dtype=np.int64))
    eye = sp.identity(2, dtype=np.int64, format="csr")

    def collective(site_op):
        total = sp.csr_matrix((2**N, 2**N), dtype=np.int64)
        for k in range(N):
            mat = site_op if k == 0 else eye
            for i in range(1, N):
                mat = sp.kron(mat, site_op if i == k else eye, format="csr")
            total = total + mat
        return total.tocsr()

    return {PLUS: collective(sp_site), MINUS: collective(sm_site),
            Z: collective(sz2_site)}


def dense_oracle_trace(
    N: int,
    poly: SpinPolynomial,
    digits: int = 12,
    cap: int = DEFAULT_ORACLE_CAP,
) -> TraceResult:
    """Independent trace via explicit tensor products of Pauli operators.

    Builds the collective operators on the full 2^N space with integer
    entries (2*Sz keeps everything integral), multiplies out each word and
    reads the exact trace.  Refuses N above ``cap``.
    """
    if N < 1:
        raise ValueError("N must be >= 1")
    if N > cap:
        raise ResourceLimitError(
            f"dense oracle supports N <= {cap}; got N={N}. Raise the cap "
            f"explicitly if you can afford the 2^N x 2^N construction."
        )
    ops = _collective_ops(N)
    exact = ComplexRational(0)
    sqrt_n = ComplexRational(0)
    pow2 = 2**N
    for word, coeff in poly.terms.items():
        L = len(word)
        if L == 0:
            tr = pow2
        else:
            mats = [ops[ch] for ch in word]
            prod = mats[0]
            for m in mats[1:-1]:
                prod = prod @ m
            if len(mats) > 1:
                tr = int(prod.multiply(mats[-1].T).sum())
            else:
                tr = int(prod.diagonal().sum())
        val = coeff * Fraction(tr, 2 ** word.count(Z) * pow2)
        if L % 2 == 0:
            exact = exact + val * Fraction(1, N ** (L // 2))
        else:
            sqrt_n = sqrt_n + val * Fraction(1, N ** ((L + 1) // 2))
    return TraceResult(
        n=N,
        exact=exact,
        sqrt_n=sqrt_n,
        decimal=_render_decimal(N, exact, sqrt_n, digits),
    )
