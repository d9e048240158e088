import math
import random
from fractions import Fraction
from itertools import product

import pytest

from heckelab.exactlin import (
    INF,
    IntMatrix,
    IntPolynomial,
    berkowitz,
    charpoly,
    det,
    frac_inverse,
    frac_matmul,
    frac_rref,
    frac_solve,
    gcdex,
    hnf,
    int_kernel_mod_p,
    is_prime,
    newton_polygon,
    smith_normal_form,
    snf_divisors,
    valuation,
)

RNG = random.Random(20240611)


def rand_matrix(rows, cols, lo=-9, hi=9):
    return IntMatrix([[RNG.randint(lo, hi) for _ in range(cols)] for _ in range(rows)])


# --- oracles -------------------------------------------------------------


def charpoly_cofactor(m: IntMatrix) -> IntPolynomial:
    """det(xI - M) by cofactor expansion over Z[x] (polynomial entries)."""

    def poly_mul(a, b):
        out = [0] * (len(a) + len(b) - 1)
        for i, x in enumerate(a):
            for j, y in enumerate(b):
                out[i + j] += x * y
        return out

    def poly_add(a, b):
        n = max(len(a), len(b))
        a = a + [0] * (n - len(a))
        b = b + [0] * (n - len(b))
        return [x + y for x, y in zip(a, b)]

    def det_poly(mat):
        n = len(mat)
        if n == 1:
            return mat[0][0]
        acc = [0]
        for j in range(n):
            minor = [row[:j] + row[j + 1 :] for row in mat[1:]]
            term = poly_mul(mat[0][j], det_poly(minor))
            if j % 2:
                term = [-t for t in term]
            acc = poly_add(acc, term)
        return acc

    n = m.rows
    entries = [
        [([-m[i, j], 1] if i == j else [-m[i, j]]) for j in range(n)]
        for i in range(n)
    ]
    return IntPolynomial(det_poly(entries))


def in_row_span(vec, rows) -> bool:
    """Integer membership in the row span of *independent* rows.

    Independence makes the rational solution unique, so integrality of
    that solution decides membership.
    """
    m = len(rows)
    cols = list(zip(*rows))
    a = [[Fraction(x) for x in col] for col in cols]  # cols x m system
    try:
        x = frac_solve(a, [Fraction(v) for v in vec])
    except ValueError:
        return False
    prod = [sum(x[j] * rows[j][i] for j in range(m)) for i in range(len(vec))]
    return prod == [Fraction(v) for v in vec] and all(xi.denominator == 1 for xi in x)


def det_int(rows) -> int:
    """Cofactor-expansion determinant (oracle, independent of exactlin)."""
    n = len(rows)
    if n == 1:
        return rows[0][0]
    acc = 0
    for j in range(n):
        minor = [row[:j] + row[j + 1 :] for row in rows[1:]]
        term = rows[0][j] * det_int(minor)
        acc += -term if j % 2 else term
    return acc


def lattice_covolume(rows) -> tuple[int, int]:
    """(rank, gcd of all rank-sized minors) of the generated row lattice."""
    from itertools import combinations

    _, piv = frac_rref([[Fraction(x) for x in r] for r in rows])
    rank = len(piv)
    if rank == 0:
        return 0, 0
    g = 0
    n = len(rows[0])
    for ri in combinations(range(len(rows)), rank):
        for ci in combinations(range(n), rank):
            sub = [[rows[i][j] for j in ci] for i in ri]
            g = math.gcd(g, abs(det_int(sub)))
    return rank, g


def same_row_lattice(gen_rows, hnf_rows) -> bool:
    """gen_rows and the (independent) nonzero hnf_rows span the same lattice."""
    basis = [r for r in hnf_rows if any(r)]
    contained = all(in_row_span(r, basis) for r in gen_rows if any(r))
    return contained and lattice_covolume(gen_rows) == lattice_covolume(basis)


def snf_divisors_bruteforce_2x2(m: IntMatrix) -> list[int]:
    """Minimise |entries| over small unimodular row/col operations (2x2 only)."""
    # d1 = gcd of all entries; d1*d2 = |det|; exhaustive over gcds is enough
    a, b, c, d = m[0, 0], m[0, 1], m[1, 0], m[1, 1]
    g = math.gcd(math.gcd(abs(a), abs(b)), math.gcd(abs(c), abs(d)))
    dd = abs(a * d - b * c)
    if g == 0:
        return [0, 0]
    if dd == 0:
        return [g, 0]
    return [g, dd // g]


# --- hnf -----------------------------------------------------------------


def test_hnf_identity():
    h, rank = hnf(IntMatrix.identity(2))
    assert h == IntMatrix.identity(2)
    assert rank == 2


def test_hnf_spec_example():
    h, rank = hnf(IntMatrix([[2, 4], [1, 1]]))
    assert h == IntMatrix([[1, 1], [0, 2]])
    assert rank == 2
    # derived check: same lattice, same |det|
    assert same_row_lattice([[2, 4], [1, 1]], [[1, 1], [0, 2]])
    assert abs(det(IntMatrix([[2, 4], [1, 1]]))) == 1 * 2


def test_hnf_zero():
    z = IntMatrix.zeros(2, 3)
    h, rank = hnf(z)
    assert h == z
    assert rank == 0


@pytest.mark.parametrize("trial", range(30))
def test_hnf_preserves_lattice_and_is_idempotent(trial):
    m = rand_matrix(RNG.randint(1, 4), RNG.randint(1, 4))
    h, rank = hnf(m)
    assert same_row_lattice(m.tolist(), h.tolist())
    h2, rank2 = hnf(h)
    assert h2 == h and rank2 == rank


def test_hnf_det_product_of_pivots():
    for _ in range(20):
        m = rand_matrix(3, 3)
        if det(m) == 0:
            continue
        h, rank = hnf(m)
        assert rank == 3
        pivots = []
        for i in range(3):
            row = [x for x in h.row(i) if x != 0]
            pivots.append(row[0])
        assert abs(det(m)) == math.prod(pivots)


# --- snf -----------------------------------------------------------------


def test_snf_spec_examples():
    assert snf_divisors(IntMatrix([[2, 0], [0, 3]])) == [1, 6]
    assert snf_divisors(IntMatrix.identity(4)) == [1, 1, 1, 1]
    assert snf_divisors(IntMatrix.zeros(2, 2)) == [0, 0]


@pytest.mark.parametrize("trial", range(25))
def test_snf_transforms_and_divisibility(trial):
    m = rand_matrix(RNG.randint(1, 4), RNG.randint(1, 4))
    u, d, v = smith_normal_form(m)
    assert u @ m @ v == d
    assert abs(det(u)) == 1 and abs(det(v)) == 1
    divs = [d[i, i] for i in range(min(m.rows, m.cols))]
    for i in range(m.rows):
        for j in range(m.cols):
            if i != j:
                assert d[i, j] == 0
    for a, b in zip(divs, divs[1:]):
        if a == 0:
            assert b == 0
        else:
            assert b % a == 0
    assert all(x >= 0 for x in divs)


@pytest.mark.parametrize("trial", range(25))
def test_snf_2x2_against_bruteforce(trial):
    m = rand_matrix(2, 2, -6, 6)
    assert snf_divisors(m) == snf_divisors_bruteforce_2x2(m)


def test_snf_matches_sympy_on_random_inputs():
    sympy = pytest.importorskip("sympy")
    from sympy.matrices.normalforms import smith_normal_form as sympy_snf

    for _ in range(10):
        rows = [[RNG.randint(-9, 9) for _ in range(3)] for _ in range(3)]
        m = IntMatrix(rows)
        ours = [x for x in snf_divisors(m) if x != 0]
        theirs = sympy_snf(sympy.Matrix(rows), domain=sympy.ZZ)
        theirs = [abs(int(theirs[i, i])) for i in range(3) if theirs[i, i] != 0]
        assert ours == sorted(theirs, key=abs) or sorted(ours) == sorted(theirs)


def test_hnf_snf_det_identity():
    for _ in range(15):
        m = rand_matrix(3, 3)
        dd = det(m)
        if dd == 0:
            continue
        assert abs(dd) == math.prod(snf_divisors(m))


# --- charpoly ------------------------------------------------------------


def test_charpoly_1x1():
    assert charpoly(IntMatrix([[-24]])) == IntPolynomial([24, 1])


def test_charpoly_diagonal():
    a, b = 3, -5
    p = charpoly(IntMatrix([[a, 0], [0, b]]))
    assert p == IntPolynomial([a * b, -(a + b), 1])


@pytest.mark.parametrize("n", [2, 3, 4])
def test_charpoly_against_cofactor_oracle(n):
    for _ in range(12):
        m = rand_matrix(n, n)
        assert charpoly(m) == charpoly_cofactor(m)


@pytest.mark.parametrize("n", [1, 2, 3, 4, 5, 6])
def test_cayley_hamilton(n):
    m = rand_matrix(n, n, -5, 5)
    assert charpoly(m).at_matrix(m).is_zero()


def test_charpoly_rejects_nonsquare():
    with pytest.raises(ValueError):
        charpoly(IntMatrix.zeros(2, 3))


def test_berkowitz_over_fractions():
    rows = [[Fraction(1, 2), Fraction(1)], [Fraction(0), Fraction(3, 2)]]
    desc = berkowitz(rows)
    assert desc == [1, Fraction(-2), Fraction(3, 4)]


def test_det_matches_charpoly_constant():
    for _ in range(15):
        m = rand_matrix(4, 4)
        p = charpoly(m)
        const = p.coeffs[0] if p.coeffs else 0
        assert det(m) == (-1) ** 4 * const


# --- newton polygon ------------------------------------------------------


def test_newton_polygon_square_of_prime():
    for p in (2, 3, 7):
        np_ = newton_polygon(IntPolynomial([-p * p, 0, 1]), p)
        assert np_.slopes == (Fraction(1), Fraction(1))


def test_newton_polygon_spec_hull():
    p = 3
    f = IntPolynomial([-(p**3), -p, 1])  # x^2 - p x - p^3
    np_ = newton_polygon(f, p)
    assert sorted(np_.slopes, reverse=True) == [Fraction(2), Fraction(1)]
    assert np_.vertices == ((0, 3), (1, 1), (2, 0))


def test_newton_polygon_pure_power():
    np_ = newton_polygon(IntPolynomial([0, 0, 0, 1]), 5)
    assert np_.slopes == (INF, INF, INF)
    assert np_.min_slope is INF


def test_newton_polygon_rejects_bad_input():
    with pytest.raises(ValueError):
        newton_polygon(IntPolynomial([1, 2]), 4)
    with pytest.raises(ValueError):
        newton_polygon(IntPolynomial([2, 2]), 3)
    with pytest.raises(ValueError):
        newton_polygon(IntPolynomial([]), 3)


def test_newton_polygon_slope_sum_is_constant_valuation():
    for _ in range(20):
        p = RNG.choice([2, 3, 5])
        coeffs = [RNG.randint(-40, 40) for _ in range(RNG.randint(1, 5))] + [1]
        if coeffs[0] == 0:
            coeffs[0] = 1 + p
        f = IntPolynomial(coeffs)
        np_ = newton_polygon(f, p)
        assert sum(np_.finite_slopes()) == valuation(coeffs[0], p)


def test_newton_polygon_multiplicative_slopes():
    # slopes of f*g = union of slopes of f and g (both monic)
    for _ in range(15):
        p = RNG.choice([2, 3, 5])
        f = IntPolynomial([RNG.randint(-30, 30) for _ in range(RNG.randint(1, 3))] + [1])
        g = IntPolynomial([RNG.randint(-30, 30) for _ in range(RNG.randint(1, 3))] + [1])
        fg = f * g
        key = lambda s: (s is INF, s)
        merged = sorted(
            list(newton_polygon(f, p).slopes) + list(newton_polygon(g, p).slopes),
            key=key,
        )
        assert sorted(newton_polygon(fg, p).slopes, key=key) == merged


# --- valuation -----------------------------------------------------------


def test_valuation_examples():
    assert valuation(-27, 3) == 3
    assert valuation(83041344, 2) == 6  # derived: repeated division
    assert valuation(1, 7) == 0
    assert valuation(0, 5) is INF


def test_valuation_by_repeated_division_oracle():
    for _ in range(30):
        p = RNG.choice([2, 3, 5, 7])
        n = RNG.randint(1, 10**6)
        e, m = 0, n
        while m % p == 0:
            m //= p
            e += 1
        assert valuation(n, p) == e


def test_valuation_rejects_composite():
    with pytest.raises(ValueError):
        valuation(10, 6)


# --- polynomial utilities ------------------------------------------------


def test_polynomial_shift():
    f = IntPolynomial([1, 2, 1])  # (x+1)^2
    g = f.shift(-1)  # x^2
    assert g == IntPolynomial([0, 0, 1])
    for _ in range(10):
        f = IntPolynomial([RNG.randint(-9, 9) for _ in range(5)])
        c = RNG.randint(-4, 4)
        x = RNG.randint(-5, 5)
        assert f.shift(c)(x) == f(x + c)


def test_polynomial_arithmetic():
    f = IntPolynomial([1, 1])
    g = IntPolynomial([-1, 1])
    assert f * g == IntPolynomial([-1, 0, 1])
    assert f + g == IntPolynomial([0, 2])
    assert (f - f).is_zero


def test_polynomial_json_roundtrip():
    f = IntPolynomial([-(10**30), 0, 7, 1])
    assert IntPolynomial.from_coeffs_str(f.coeffs_str()) == f


# --- matrix basics -------------------------------------------------------


def test_matrix_immutability_and_cap():
    m = IntMatrix([[1, 2], [3, 4]])
    with pytest.raises(AttributeError):
        m.rows = 5
    from heckelab import exactlin

    old = exactlin.set_dim_cap(4)
    try:
        with pytest.raises(ValueError):
            IntMatrix.zeros(5, 1)
    finally:
        exactlin.set_dim_cap(old)


def test_matrix_ops():
    a = IntMatrix([[1, 2], [3, 4]])
    b = IntMatrix([[0, 1], [1, 0]])
    assert a @ b == IntMatrix([[2, 1], [4, 3]])
    assert a + b == IntMatrix([[1, 3], [4, 4]])
    assert 2 * a == IntMatrix([[2, 4], [6, 8]])
    assert a.pow(2) == a @ a
    assert a.transpose() == IntMatrix([[1, 3], [2, 4]])
    assert a.mod(2) == IntMatrix([[1, 0], [1, 0]])
    assert IntMatrix.from_entries_str(a.entries_str()) == a


def test_is_prime():
    primes = [p for p in range(60) if is_prime(p)]
    assert primes == [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59]


# --- rational helpers ----------------------------------------------------


def test_frac_solve_and_inverse():
    a = [[Fraction(2), Fraction(1)], [Fraction(1), Fraction(1)]]
    x = frac_solve(a, [Fraction(3), Fraction(2)])
    assert x == [Fraction(1), Fraction(1)]
    inv = frac_inverse(a)
    assert frac_matmul(a, inv) == [
        [Fraction(1), Fraction(0)],
        [Fraction(0), Fraction(1)],
    ]
    with pytest.raises(ValueError):
        frac_solve([[Fraction(1), Fraction(1)], [Fraction(1), Fraction(1)]],
                   [Fraction(0), Fraction(1)])


def test_frac_rref_rank_nullity():
    rows = [[Fraction(x) for x in row] for row in [[1, 2, 3], [2, 4, 6], [0, 1, 1]]]
    red, piv = frac_rref(rows)
    assert len(piv) == 2


def test_int_kernel_mod_p():
    rows = [[1, 1, 0], [0, 0, 1]]
    basis = int_kernel_mod_p(rows, 5)
    assert len(basis) == 1
    v = basis[0]
    for row in rows:
        assert sum(r * x for r, x in zip(row, v)) % 5 == 0


def test_gcdex():
    for _ in range(50):
        a, b = RNG.randint(-99, 99), RNG.randint(-99, 99)
        g, x, y = gcdex(a, b)
        assert g == math.gcd(a, b)
        assert a * x + b * y == g
