from itertools import islice

import pytest
from hypothesis import given
from hypothesis import strategies as st

from hqcf.algebra import CFWord, PolyT, parse_poly
from hqcf.words import (
    MAX_LETTER_DEGREE, DivisibilityError, WordError, drop_take, exp_value, gamma, lambda_word, mahlergen_stream, omega,
    omega_p, omega_stream, reverse_neg,
)

from strategies import prime_and, words

PR = [(3, 3), (5, 5), (7, 7), (3, 9), (2, 4), (2, 8)]


def W(text, p):
    return CFWord(parse_poly(s, p) for s in text.split(","))


def mono(c, e, p):
    return PolyT.monomial(c, e, p)


def test_exponent_sequences():
    assert [exp_value("lambda", 3, k) for k in (1, 2, 3)] == [3, 7, 19]
    assert [exp_value("omega", 3, k) for k in (1, 2, 3)] == [1, 1, 1]
    assert [exp_value("omega", 5, k) for k in (1, 2, 3)] == [3, 13, 63]
    with pytest.raises(OverflowError):
        exp_value("omega", 9, 40)
    with pytest.raises(WordError):
        exp_value("omega", 2, 1)


def test_gamma_small():
    p, r = 3, 3
    T = PolyT.T(p)
    assert gamma(1, p, r) == CFWord([-T, mono(1, r, p), T])
    assert gamma(2, p, r) == W("T,T^3,-T,T^7,T,-T^3,-T", p)


@pytest.mark.parametrize("p, r", PR)
def test_gamma_structure(p, r):
    T = PolyT.T(p)
    # letters of Gamma_k reach degree about r^k, so stay below the dense-storage cap
    k_max = max(k for k in range(1, 13) if r ** (k + 1) <= MAX_LETTER_DEGREE)
    for k in range(1, k_max + 1):
        g = gamma(k, p, r)
        assert len(g) == 2 ** (k + 1) - 1
        assert all(a.residue_at_zero() == 0 and a.degree >= 1 for a in g)
        # Gamma_k is built from Gamma_{k-1}, so letter 2i-1 is (-1)^(i+k-1) T
        assert all(g[2 * i - 2] == (T if (i + k - 1) % 2 == 0 else -T) for i in range(1, 2 ** k + 1))
        if k % 2 == 1 and k > 1:
            assert g[0] == -T


def test_lambda_small():
    p, r = 5, 5
    T = PolyT.T(p)
    assert lambda_word(1, p, r) == CFWord([T + 1, T - 1])
    assert lambda_word(2, p, r) == CFWord([T, 1 - mono(1, r, p), -T])
    assert lambda_word(3, p, r) == CFWord([T + 1, T - 1, -mono(1, r * r - 2, p), -T, mono(1, r, p), T])


@pytest.mark.parametrize("p, r", PR)
def test_length_laws(p, r):
    for k in range(3, 9):
        assert len(lambda_word(k, p, r)) == len(lambda_word(k - 2, p, r)) + 2 ** (k - 1)
    for k in range(2, 7):
        assert len(omega(k, p, r)) == 2 * len(omega(k - 1, p, r)) + 2 * len(lambda_word(k - 1, p, r)) + 1


def test_omega_two():
    p, r = 5, 5
    T = PolyT.T(p)
    w2 = exp_value("omega", r, 2)
    expected = CFWord([-mono(1, r - 2, p), T + 1, T - 1, -mono(1, w2, p), -T + 1, -T - 1, mono(1, r - 2, p)])
    assert omega(2, p, r) == expected


def test_omega_two_signs_collapse_in_characteristic_two():
    assert omega(2, 2, 4) == W("T^2,T+1,T+1,T^6,T+1,T+1,T^2", 2)


@pytest.mark.parametrize("p, r", PR)
def test_omega_prefix_and_boundaries(p, r):
    T = PolyT.T(p)
    head = CFWord([-mono(1, r - 2, p), T + 1, T - 1])
    tail = CFWord([-T + 1, -T - 1, mono(1, r - 2, p)])
    for k in range(1, 7):
        cur, nxt = omega(k, p, r), omega(k + 1, p, r)
        assert nxt[:len(cur)] == cur and len(nxt) > len(cur)
        assert all(a.degree >= 1 for a in cur)
        if k > 1:
            assert cur[:3] == head and cur[-3:] == tail


@pytest.mark.parametrize("p, r", [(3, 3), (5, 5), (3, 9)])
def test_omega_p_generalizes_omega(p, r):
    P = -mono(1, r - 2, p)
    for k in range(1, 6):
        assert omega_p(P, k, r) == omega(k, p, r)


def test_omega_p_requires_multiple_of_T():
    with pytest.raises(WordError):
        omega_p(parse_poly("T+1", 3), 2, 3)
    with pytest.raises(WordError):
        omega_p(PolyT.zero(3), 2, 3)


def test_omega_p_middle_letter():
    p, r = 5, 5
    P = parse_poly("T^2+T", p)
    w = omega_p(P, 2, r)
    assert w.to_json() == ["T^2+T", "T+1", "T+4", "T^8+T^3", "4*T+1", "4*T+4", "T^3"]


@pytest.mark.parametrize("p, r", PR)
def test_omega_stream(p, r):
    got = CFWord(islice(omega_stream(p, r), len(omega(5, p, r))))
    assert got == omega(5, p, r)


def test_omega_stream_with_P():
    P = parse_poly("2*T^3+T", 3)
    n = len(omega_p(P, 4, 3))
    assert CFWord(islice(omega_stream(3, 3, P), n)) == omega_p(P, 4, 3)


@given(prime_and(words))
def test_reverse_neg_is_an_involution(case):
    _, w = case
    assert reverse_neg(reverse_neg(w)) == w


@given(prime_and(words))
def test_reverse_neg_is_reversal_in_characteristic_two(case):
    p, w = case
    if p == 2:
        assert reverse_neg(w) == w.reversed()
    else:
        assert reverse_neg(w)[0] == -w[-1]


def test_reverse_neg_example():
    assert reverse_neg(W("T+1,T-1", 3)) == W("-T+1,-T-1", 3)


def test_drop_take():
    p, r = 5, 5
    w2 = omega(2, p, r)
    assert drop_take(w2, 3, 1) == w2[3:6]
    assert drop_take(w2, 0, 0) == w2
    assert drop_take(gamma(2, p, r), 1, 0) == gamma(2, p, r)[1:]
    with pytest.raises(WordError):
        drop_take(w2, 5, 3)


def test_words_need_r_above_two():
    with pytest.raises(WordError):
        omega(2, 2, 2)
    with pytest.raises(Exception):
        gamma(2, 3, 6)


def test_mahlergen_first_block():
    p, r = 3, 3
    T = PolyT.T(p)
    got = CFWord(islice(mahlergen_stream([T], r), 5))
    assert got == CFWord([T, -T, -T, -mono(1, 3, p), T])


@pytest.mark.parametrize("seed", ["T", "T^2,T+1,T^3", "2*T,T^2+1,T^2+T", "T^3+T,T+2,T,T+1"])
def test_mahlergen_block_shape(seed):
    p, r = 3, 3
    T = PolyT.T(p)
    s = W(seed, p)
    ell = len(s)
    try:
        a = [None] + list(islice(mahlergen_stream(s, r), ell + 40))
    except DivisibilityError:
        assert ell % 2 == 0
        return
    for k in range(10):
        assert a[ell + 4 * k + 2] == -T and a[ell + 4 * k + 4] == T
        assert a[ell + 4 * k + 1] == -a[2 * k + 1].frobenius(r).shift(-2)
        assert a[ell + 4 * k + 3] == a[2 * k + 2].frobenius(r)


def test_mahlergen_even_seed_divisibility_is_checked():
    # a_3 = a_2^r is consumed at k = 1; with a_2 = T + 1 it is not divisible by T
    s = W("T,T+1", 3)
    with pytest.raises(DivisibilityError):
        list(islice(mahlergen_stream(s, 3), 20))


def test_mahlergen_seed_validation():
    with pytest.raises(DivisibilityError):
        next(mahlergen_stream(W("T+1", 3), 3))
    with pytest.raises(WordError):
        next(mahlergen_stream(CFWord(), 3))


def test_gamma_length_to_depth_twelve():
    assert [len(gamma(k, 3, 3)) for k in range(1, 13)] == [2 ** (k + 1) - 1 for k in range(1, 13)]


def test_oversized_letters_are_refused():
    with pytest.raises(OverflowError):
        gamma(12, 2, 8)
