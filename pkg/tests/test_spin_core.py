import random
from fractions import Fraction

import pytest

from spinboson.rationals import ComplexRational
from spinboson.spin_core import (
    MINUS,
    PLUS,
    Z,
    ResourceLimitError,
    SpinPolynomial,
    apply_word_in_irrep,
    dense_oracle_trace,
    irrep_multiplicity,
    irrep_sectors,
    normalized_trace,
    word_adjoint,
)


def test_multiplicity_examples():
    assert irrep_multiplicity(1, 1) == 1
    assert irrep_multiplicity(2, 0) == 1
    assert irrep_multiplicity(2, 2) == 1
    # derived by brute-force diagonalization of S^2, Sz on (C^2)^{x4}
    assert irrep_multiplicity(4, 0) == 2
    assert irrep_multiplicity(4, 2) == 3
    assert irrep_multiplicity(4, 4) == 1


@pytest.mark.parametrize("N", [1, 2, 3, 10, 33, 64])
def test_multiplicity_sum_rule(N):
    assert sum(s.multiplicity * s.dimension for s in irrep_sectors(N)) == 2**N


@pytest.mark.parametrize(
    "N, twice_j", [(2, 1), (2, 3), (2, -2), (0, 0), (3, 0)]
)
def test_multiplicity_domain_errors(N, twice_j):
    with pytest.raises(ValueError):
        irrep_multiplicity(N, twice_j)


def test_apply_word_examples():
    # Sz |1/2, 1/2> = +1/2 |1/2, 1/2>
    out = apply_word_in_irrep((Z,), 1, 1)
    assert list(out) == [1]
    assert out[1].as_fraction() == Fraction(1, 2)
    # S+ S- |1, 0> = 2 |1, 0>
    out = apply_word_in_irrep((PLUS, MINUS), 2, 1)
    assert out[1].as_fraction() == 2
    # S- S+ annihilates the highest weight state
    assert apply_word_in_irrep((MINUS, PLUS), 2, 2) == {}


def test_apply_word_irrational_amplitude():
    # single S- from |1, 0>: amplitude sqrt(2)
    out = apply_word_in_irrep((MINUS,), 2, 1)
    amp = out[0]
    assert not amp.is_rational
    assert float(amp) == pytest.approx(2**0.5)
    with pytest.raises(ValueError):
        amp.as_fraction()


def test_trace_identity_and_empty():
    assert normalized_trace(7, SpinPolynomial.identity()).exact == 1
    res = normalized_trace(7, SpinPolynomial.zero())
    assert res.exact == 0 and res.sqrt_n == 0


def test_trace_sx_squared_exact_quarter():
    sx = SpinPolynomial.s_x()
    for N in (2, 8, 33):
        assert normalized_trace(N, sx**2).exact == Fraction(1, 4)


def test_trace_single_ladder_letter_vanishes():
    assert normalized_trace(1, SpinPolynomial.s_plus()).exact == 0


@pytest.mark.parametrize("alpha", ["x", "y", "z"])
@pytest.mark.parametrize("ell", [0, 1, 2])
def test_odd_moments_vanish(alpha, ell):
    op = getattr(SpinPolynomial, f"s_{alpha}")()
    for N in (2, 5, 12):
        res = normalized_trace(N, op ** (2 * ell + 1))
        assert res.exact == 0 and res.sqrt_n == 0


def _random_poly(rng, max_degree=6, max_terms=3):
    terms = {}
    for _ in range(rng.randint(1, max_terms)):
        length = rng.randint(0, max_degree)
        word = tuple(rng.choice((PLUS, MINUS, Z)) for _ in range(length))
        coeff = ComplexRational(
            Fraction(rng.randint(-4, 4), rng.randint(1, 5)),
            Fraction(rng.randint(-2, 2), rng.randint(1, 3)),
        )
        terms[word] = coeff
    return SpinPolynomial(terms)


def test_oracle_equivalence_spot_checks():
    rng = random.Random(7)
    for _ in range(15):
        N = rng.randint(2, 8)
        poly = _random_poly(rng)
        engine = normalized_trace(N, poly)
        dense = dense_oracle_trace(N, poly)
        assert engine.exact == dense.exact
        assert engine.sqrt_n == dense.sqrt_n


def test_hermiticity_of_word_plus_adjoint():
    rng = random.Random(3)
    for _ in range(20):
        word = tuple(
            rng.choice((PLUS, MINUS, Z)) for _ in range(rng.randint(1, 6))
        )
        poly = SpinPolynomial.from_word(word) + SpinPolynomial.from_word(
            word_adjoint(word)
        )
        res = normalized_trace(9, poly)
        assert res.exact.is_real and res.sqrt_n.is_real


def test_moment_convergence_bounded_by_c_over_n():
    sx = SpinPolynomial.s_x()
    from spinboson.moments import limit_moment

    for ell in (1, 2, 3):
        target = limit_moment(ell)
        errs = [
            abs(normalized_trace(N, sx ** (2 * ell)).exact.re - target)
            for N in (64, 128, 256, 512, 1024)
        ]
        if all(e == 0 for e in errs):
            continue  # exact at every N (the ell = 1 case)
        assert all(a > b for a, b in zip(errs, errs[1:]))
        # error is O(1/N): N * err must stay bounded by its supremum C
        c = max(e * N for N, e in zip((64, 128, 256, 512, 1024), errs))
        assert c <= 2 * errs[0] * 64
        for N, e in zip((64, 128, 256, 512, 1024), errs):
            assert e <= c / N


def test_dense_oracle_cap():
    with pytest.raises(ResourceLimitError):
        dense_oracle_trace(15, SpinPolynomial.identity())


def test_trace_budget():
    with pytest.raises(ResourceLimitError):
        normalized_trace(10**6, SpinPolynomial.s_x() ** 2, max_cells=10**4)


def test_float_path_is_labeled_and_close():
    poly = SpinPolynomial.s_x() ** 4
    exact = normalized_trace(200, poly)
    approx = normalized_trace(200, poly, use_float=True)
    assert approx.float_path and "(float)" in approx.decimal
    assert float(approx.exact.re) == pytest.approx(float(exact.exact.re), rel=1e-12)


def test_decimal_rendering_faithful():
    res = normalized_trace(8, SpinPolynomial.s_x() ** 2, digits=5)
    assert res.decimal == "0.25"
    res = normalized_trace(2000, SpinPolynomial.s_x() ** 4, digits=6)
    # exact value 2999/16000 = 0.1874375, round-half-even to six figures
    assert res.exact.re == Fraction(2999, 16000)
    assert res.decimal == "0.187438"


def test_odd_word_sqrt_part_against_oracle():
    # tr(Sz S+ S-) is nonzero; the scaling leaves a 1/sqrt(N) radical
    poly = SpinPolynomial.from_word((Z, PLUS, MINUS))
    for N in (2, 4, 6):
        engine = normalized_trace(N, poly)
        dense = dense_oracle_trace(N, poly)
        assert engine.exact == dense.exact == ComplexRational(0)
        assert engine.sqrt_n == dense.sqrt_n
        assert engine.sqrt_n != 0
