"""Exact integer/rational linear algebra and polynomial kernels.

Everything in this module is arbitrary precision: matrices hold Python
ints, rational work uses fractions.Fraction, and valuations of zero are
the distinct INF sentinel rather than a number.  No floats anywhere.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import total_ordering

# Matrices larger than this are refused outright (desk-scale guardrail).
DIM_CAP = 512


def set_dim_cap(cap: int) -> int:
    """Set the matrix dimension guardrail, returning the previous value."""
    global DIM_CAP
    if cap < 1:
        raise ValueError("dimension cap must be positive")
    old, DIM_CAP = DIM_CAP, cap
    return old


@total_ordering
class _PosInfinity:
    """Positive infinity for valuations and Newton-polygon slopes.

    Compares above every int/Fraction; equal only to itself.
    """

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __eq__(self, other):
        return other is self

    def __lt__(self, other):
        return False

    def __gt__(self, other):
        if other is self:
            return False
        if isinstance(other, (int, Fraction)):
            return True
        return NotImplemented

    def __hash__(self):
        return hash("heckelab-positive-infinity")

    def __add__(self, other):
        return self

    __radd__ = __add__

    def __repr__(self):
        return "+inf"


INF = _PosInfinity()


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0:
        return False
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def valuation(n: int, p: int):
    """Largest e with p^e | n; the INF sentinel for n = 0."""
    if not is_prime(p):
        raise ValueError(f"valuation needs a prime, got {p}")
    if n == 0:
        return INF
    e = 0
    n = abs(n)
    while n % p == 0:
        n //= p
        e += 1
    return e


def gcdex(a: int, b: int) -> tuple[int, int, int]:
    """Return (g, x, y) with g = gcd(a, b) >= 0 and a*x + b*y = g."""
    x0, x1, y0, y1 = 1, 0, 0, 1
    while b:
        q, r = divmod(a, b)
        a, b = b, r
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        a, x0, y0 = -a, -x0, -y0
    return a, x0, y0


class IntMatrix:
    """Immutable dense matrix of arbitrary-precision integers."""

    __slots__ = ("rows", "cols", "_e")

    def __init__(self, entries):
        rows = tuple(tuple(int(x) for x in row) for row in entries)
        if not rows or not rows[0]:
            raise ValueError("matrix must have at least one row and column")
        ncols = len(rows[0])
        if any(len(r) != ncols for r in rows):
            raise ValueError("ragged rows")
        if len(rows) > DIM_CAP or ncols > DIM_CAP:
            raise ValueError(
                f"matrix dimensions {len(rows)}x{ncols} exceed cap {DIM_CAP}"
            )
        object.__setattr__(self, "rows", len(rows))
        object.__setattr__(self, "cols", ncols)
        object.__setattr__(self, "_e", rows)

    def __setattr__(self, name, value):
        raise AttributeError("IntMatrix is immutable")

    @classmethod
    def identity(cls, n: int) -> "IntMatrix":
        return cls([[1 if i == j else 0 for j in range(n)] for i in range(n)])

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "IntMatrix":
        return cls([[0] * cols for _ in range(rows)])

    @property
    def is_square(self) -> bool:
        return self.rows == self.cols

    def __getitem__(self, ij):
        i, j = ij
        return self._e[i][j]

    def row(self, i: int) -> tuple[int, ...]:
        return self._e[i]

    def tolist(self) -> list[list[int]]:
        return [list(r) for r in self._e]

    def transpose(self) -> "IntMatrix":
        return IntMatrix(list(zip(*self._e)))

    def __add__(self, other):
        if self.rows != other.rows or self.cols != other.cols:
            raise ValueError("shape mismatch")
        return IntMatrix(
            [
                [a + b for a, b in zip(ra, rb)]
                for ra, rb in zip(self._e, other._e)
            ]
        )

    def __sub__(self, other):
        return self + (-other)

    def __neg__(self):
        return IntMatrix([[-a for a in r] for r in self._e])

    def __mul__(self, scalar):
        if not isinstance(scalar, int):
            return NotImplemented
        return IntMatrix([[scalar * a for a in r] for r in self._e])

    __rmul__ = __mul__

    def __matmul__(self, other: "IntMatrix") -> "IntMatrix":
        if self.cols != other.rows:
            raise ValueError("shape mismatch")
        bt = list(zip(*other._e))
        return IntMatrix(
            [[sum(a * b for a, b in zip(row, col)) for col in bt] for row in self._e]
        )

    def pow(self, n: int) -> "IntMatrix":
        if not self.is_square or n < 0:
            raise ValueError("pow needs a square matrix and n >= 0")
        result = IntMatrix.identity(self.rows)
        base = self
        while n:
            if n & 1:
                result = result @ base
            base = base @ base if n > 1 else base
            n >>= 1
        return result

    def mod(self, m: int) -> "IntMatrix":
        return IntMatrix([[a % m for a in r] for r in self._e])

    def trace(self) -> int:
        if not self.is_square:
            raise ValueError("trace of non-square matrix")
        return sum(self._e[i][i] for i in range(self.rows))

    def is_zero(self) -> bool:
        return all(a == 0 for r in self._e for a in r)

    def __eq__(self, other):
        return isinstance(other, IntMatrix) and self._e == other._e

    def __hash__(self):
        return hash(self._e)

    def __repr__(self):
        return f"IntMatrix({self.rows}x{self.cols}, {list(map(list, self._e))!r})"

    def entries_str(self) -> list[list[str]]:
        return [[str(a) for a in r] for r in self._e]

    @classmethod
    def from_entries_str(cls, entries) -> "IntMatrix":
        return cls([[int(a) for a in r] for r in entries])


class IntPolynomial:
    """Integer polynomial, coefficients stored in ascending degree."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs):
        cs = [int(c) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        object.__setattr__(self, "coeffs", tuple(cs))

    def __setattr__(self, name, value):
        raise AttributeError("IntPolynomial is immutable")

    @property
    def degree(self) -> int:
        # -1 for the zero polynomial
        return len(self.coeffs) - 1

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def is_monic(self) -> bool:
        return bool(self.coeffs) and self.coeffs[-1] == 1

    def __call__(self, x: int) -> int:
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def at_matrix(self, m: IntMatrix) -> IntMatrix:
        if not m.is_square:
            raise ValueError("need a square matrix")
        acc = IntMatrix.zeros(m.rows, m.cols)
        for c in reversed(self.coeffs):
            acc = acc @ m + c * IntMatrix.identity(m.rows)
        return acc

    def shift(self, c: int) -> "IntPolynomial":
        """Return the polynomial x -> f(x + c)."""
        n = self.degree
        if n < 0:
            return self
        out = [0] * (n + 1)
        for i, fi in enumerate(self.coeffs):
            if fi == 0:
                continue
            pw = 1
            for j in range(i, -1, -1):
                out[j] += fi * math.comb(i, j) * pw
                pw *= c
        return IntPolynomial(out)

    def __mul__(self, other):
        if isinstance(other, int):
            return IntPolynomial([other * c for c in self.coeffs])
        out = [0] * (len(self.coeffs) + len(other.coeffs))
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    out[i + j] += a * b
        return IntPolynomial(out)

    __rmul__ = __mul__

    def __add__(self, other):
        n = max(len(self.coeffs), len(other.coeffs))
        a = list(self.coeffs) + [0] * (n - len(self.coeffs))
        b = list(other.coeffs) + [0] * (n - len(other.coeffs))
        return IntPolynomial([x + y for x, y in zip(a, b)])

    def __sub__(self, other):
        return self + (-1 * other)

    def __eq__(self, other):
        return isinstance(other, IntPolynomial) and self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def __repr__(self):
        return f"IntPolynomial({list(self.coeffs)!r})"

    def coeffs_str(self) -> list[str]:
        return [str(c) for c in self.coeffs]

    @classmethod
    def from_coeffs_str(cls, coeffs) -> "IntPolynomial":
        return cls([int(c) for c in coeffs])


class NewtonPolygon:
    """Lower convex hull of p-adic coefficient valuations of a polynomial.

    Slopes use the root-valuation convention: a segment from (i1, v1) to
    (i2, v2) contributes the value (v1 - v2)/(i2 - i1) with multiplicity
    i2 - i1, so the multiset of slopes is the multiset of p-adic
    valuations of the roots.  Roots of valuation +inf (zero roots) appear
    as INF entries.
    """

    __slots__ = ("p", "vertices", "slopes")

    def __init__(self, p, vertices, slopes):
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "vertices", tuple(vertices))
        object.__setattr__(self, "slopes", tuple(slopes))

    def __setattr__(self, name, value):
        raise AttributeError("NewtonPolygon is immutable")

    @property
    def min_slope(self):
        finite = [s for s in self.slopes if s is not INF]
        return min(finite) if finite else INF

    def finite_slopes(self) -> list[Fraction]:
        return [s for s in self.slopes if s is not INF]

    def __eq__(self, other):
        return (
            isinstance(other, NewtonPolygon)
            and self.p == other.p
            and self.vertices == other.vertices
        )

    def __repr__(self):
        return f"NewtonPolygon(p={self.p}, vertices={list(self.vertices)})"


def newton_polygon(f: IntPolynomial, p: int) -> NewtonPolygon:
    """Newton polygon of a monic nonzero integer polynomial at p."""
    if not is_prime(p):
        raise ValueError(f"newton_polygon needs a prime, got {p}")
    if f.is_zero:
        raise ValueError("newton_polygon of the zero polynomial")
    if not f.is_monic:
        raise ValueError("newton_polygon needs a monic polynomial")
    deg = f.degree
    points = [
        (i, valuation(c, p)) for i, c in enumerate(f.coeffs) if c != 0
    ]
    # monic => (deg, 0) is always present
    # lower convex hull, monotone chain over points sorted by abscissa
    hull: list[tuple[int, int]] = []
    for pt in points:
        while len(hull) >= 2:
            (x1, y1), (x2, y2) = hull[-2], hull[-1]
            # pop while the middle point lies on or above the new chord
            if (y2 - y1) * (pt[0] - x1) >= (pt[1] - y1) * (x2 - x1):
                hull.pop()
            else:
                break
        hull.append(pt)
    slopes: list = []
    first_index = hull[0][0]
    slopes.extend([INF] * first_index)
    for (x1, y1), (x2, y2) in zip(hull, hull[1:]):
        s = Fraction(y1 - y2, x2 - x1)
        slopes.extend([s] * (x2 - x1))
    assert len(slopes) == deg
    return NewtonPolygon(p, hull, slopes)


# ---------------------------------------------------------------------------
# Hermite and Smith normal forms
# ---------------------------------------------------------------------------


def _hnf_rows(rows: list[list[int]]) -> tuple[list[list[int]], int]:
    """In-place row Hermite normal form; returns (rows, rank).

    Canonical form: positive pivots, entries above each pivot reduced
    into [0, pivot), zero rows swapped to the bottom.
    """
    m = len(rows)
    n = len(rows[0]) if m else 0
    r = 0
    for c in range(n):
        if r == m:
            break
        for i in range(r + 1, m):
            a, b = rows[r][c], rows[i][c]
            if b == 0:
                continue
            if a == 0:
                rows[r], rows[i] = rows[i], rows[r]
                continue
            if b % a == 0:
                q = b // a
                rows[i] = [x - q * y for x, y in zip(rows[i], rows[r])]
                continue
            g, x, y = gcdex(a, b)
            u, v = -(b // g), a // g
            top = [x * s + y * t for s, t in zip(rows[r], rows[i])]
            bot = [u * s + v * t for s, t in zip(rows[r], rows[i])]
            rows[r], rows[i] = top, bot
        if rows[r][c] == 0:
            continue
        if rows[r][c] < 0:
            rows[r] = [-x for x in rows[r]]
        piv = rows[r][c]
        for i in range(r):
            q = rows[i][c] // piv
            if q:
                rows[i] = [x - q * y for x, y in zip(rows[i], rows[r])]
        r += 1
    return rows, r


def hnf(m: IntMatrix) -> tuple[IntMatrix, int]:
    """Row Hermite normal form of m and its rank.

    The row span is preserved; the result has positive pivots with the
    entries above each pivot reduced, so equal row spans give equal HNFs.
    """
    rows, rank = _hnf_rows(m.tolist())
    return IntMatrix(rows), rank


def smith_normal_form(m: IntMatrix) -> tuple[IntMatrix, IntMatrix, IntMatrix]:
    """Return unimodular (U, D, V) with U @ m @ V = D diagonal.

    Diagonal entries are nonnegative and satisfy d1 | d2 | ... with any
    zeros at the end.
    """
    a = m.tolist()
    nr, nc = m.rows, m.cols
    u = [[1 if i == j else 0 for j in range(nr)] for i in range(nr)]
    v = [[1 if i == j else 0 for j in range(nc)] for i in range(nc)]

    def row_op(i, q, j):  # row_i -= q * row_j
        a[i] = [x - q * y for x, y in zip(a[i], a[j])]
        u[i] = [x - q * y for x, y in zip(u[i], u[j])]

    def col_op(i, q, j):  # col_i -= q * col_j
        for row in (a, v):
            for rr in row:
                rr[i] -= q * rr[j]

    def col_swap(i, j):
        for rr in a:
            rr[i], rr[j] = rr[j], rr[i]
        for rr in v:
            rr[i], rr[j] = rr[j], rr[i]

    for t in range(min(nr, nc)):
        while True:
            # locate the smallest nonzero entry of the trailing block
            best = None
            for i in range(t, nr):
                for j in range(t, nc):
                    if a[i][j] != 0 and (best is None or abs(a[i][j]) < abs(a[best[0]][best[1]])):
                        best = (i, j)
            if best is None:
                break
            bi, bj = best
            if bi != t:
                a[t], a[bi] = a[bi], a[t]
                u[t], u[bi] = u[bi], u[t]
            if bj != t:
                col_swap(t, bj)
            piv = a[t][t]
            dirty = False
            for i in range(t + 1, nr):
                if a[i][t]:
                    row_op(i, a[i][t] // piv, t)
                    dirty = dirty or a[i][t] != 0
            for j in range(t + 1, nc):
                if a[t][j]:
                    col_op(j, a[t][j] // piv, t)
                    dirty = dirty or a[t][j] != 0
            if dirty:
                continue
            # enforce divisibility of the trailing block by the pivot
            fix = None
            for i in range(t + 1, nr):
                for j in range(t + 1, nc):
                    if a[i][j] % piv != 0:
                        fix = i
                        break
                if fix is not None:
                    break
            if fix is None:
                break
            a[t] = [x + y for x, y in zip(a[t], a[fix])]
            u[t] = [x + y for x, y in zip(u[t], u[fix])]
        if a[t][t] < 0:
            a[t] = [-x for x in a[t]]
            u[t] = [-x for x in u[t]]
    return IntMatrix(u), IntMatrix(a), IntMatrix(v)


def snf_divisors(m: IntMatrix) -> list[int]:
    """Elementary divisors d1 | d2 | ... of m, zeros for rank deficiency."""
    _, d, _ = smith_normal_form(m)
    return [d[i, i] for i in range(min(m.rows, m.cols))]


# ---------------------------------------------------------------------------
# Determinant and characteristic polynomial (division-free)
# ---------------------------------------------------------------------------


def det(m: IntMatrix) -> int:
    """Determinant by fraction-free (Bareiss) elimination."""
    if not m.is_square:
        raise ValueError("determinant of non-square matrix")
    a = m.tolist()
    n = m.rows
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k] != 0:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
            a[i][k] = 0
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


def berkowitz(rows) -> list:
    """Characteristic polynomial of a square matrix, descending coeffs.

    Division-free, so it works verbatim over int or Fraction entries and
    on singular matrices.  Returns [1, c_{n-1}, ..., c_0] for
    det(xI - M).
    """
    n = len(rows)
    poly = [1]
    for r in range(n):
        arr = rows[r][r]
        rrow = rows[r][:r]
        scol = [rows[i][r] for i in range(r)]
        col = [1, -arr]
        q = scol
        for _ in range(r - 1):
            col.append(-sum(x * y for x, y in zip(rrow, q)))
            q = [sum(rows[i][j] * q[j] for j in range(r)) for i in range(r)]
        if r >= 1:
            col.append(-sum(x * y for x, y in zip(rrow, q)))
        new = [0] * (r + 2)
        for i, ci in enumerate(col):
            if ci == 0:
                continue
            for j, pj in enumerate(poly):
                if i + j <= r + 1:
                    new[i + j] += ci * pj
        poly = new
    return poly


def charpoly(m: IntMatrix) -> IntPolynomial:
    """Monic charpoly det(xI - m), by a division-free recurrence."""
    if not m.is_square:
        raise ValueError("charpoly of non-square matrix")
    desc = berkowitz(m.tolist())
    return IntPolynomial(list(reversed(desc)))


# ---------------------------------------------------------------------------
# Rational (Fraction) helpers shared by modsym and hecke_order
# ---------------------------------------------------------------------------


def frac_rref(rows: list[list[Fraction]]) -> tuple[list[list[Fraction]], list[int]]:
    """Reduced row echelon form over Q; returns (rref, pivot columns)."""
    a = [[Fraction(x) for x in row] for row in rows]
    m = len(a)
    n = len(a[0]) if m else 0
    piv_cols: list[int] = []
    r = 0
    for c in range(n):
        piv = next((i for i in range(r, m) if a[i][c] != 0), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        inv = 1 / a[r][c]
        a[r] = [x * inv for x in a[r]]
        for i in range(m):
            if i != r and a[i][c] != 0:
                f = a[i][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[r])]
        piv_cols.append(c)
        r += 1
        if r == m:
            break
    return a, piv_cols


def frac_solve(a: list[list[Fraction]], b: list[Fraction]) -> list[Fraction]:
    """Solve a @ x = b exactly; raises ValueError if inconsistent.

    Free variables (if any) are set to zero.
    """
    m = len(a)
    n = len(a[0]) if m else 0
    aug = [list(map(Fraction, a[i])) + [Fraction(b[i])] for i in range(m)]
    red, piv = frac_rref(aug)
    x = [Fraction(0)] * n
    for r, c in enumerate(piv):
        if c == n:
            raise ValueError("inconsistent linear system")
        x[c] = red[r][n] - sum(red[r][j] * x[j] for j in range(c + 1, n))
        # rref already has zeros elsewhere in pivot rows; the sum only
        # picks up free columns
    return x


def frac_matmul(a, b):
    bt = list(zip(*b))
    return [
        [sum(x * y for x, y in zip(row, col)) for col in bt] for row in a
    ]


def frac_inverse(a: list[list[Fraction]]) -> list[list[Fraction]]:
    n = len(a)
    aug = [
        [Fraction(a[i][j]) for j in range(n)]
        + [Fraction(1 if i == j else 0) for j in range(n)]
        for i in range(n)
    ]
    red, piv = frac_rref(aug)
    if piv != list(range(n)):
        raise ValueError("matrix is singular")
    return [row[n:] for row in red]


def int_inverse_unimodular(m: IntMatrix) -> IntMatrix:
    """Exact inverse of a unimodular integer matrix."""
    n = m.rows
    a = [[Fraction(m[i, j]) for j in range(n)] for i in range(n)]
    cols = [frac_solve(a, [Fraction(1 if i == j else 0) for i in range(n)]) for j in range(n)]
    out = [[cols[j][i] for j in range(n)] for i in range(n)]
    if any(x.denominator != 1 for row in out for x in row):
        raise ValueError("matrix is not unimodular")
    return IntMatrix([[int(x) for x in row] for row in out])


def int_kernel_mod_p(rows: list[list[int]], p: int) -> list[list[int]]:
    """Basis of the right nullspace of a matrix over F_p."""
    a = [[x % p for x in row] for row in rows]
    m = len(a)
    n = len(a[0]) if m else 0
    piv_cols: list[int] = []
    r = 0
    for c in range(n):
        piv = next((i for i in range(r, m) if a[i][c] % p != 0), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        inv = pow(a[r][c], -1, p)
        a[r] = [(x * inv) % p for x in a[r]]
        for i in range(m):
            if i != r and a[i][c] % p != 0:
                f = a[i][c] % p
                a[i] = [(x - f * y) % p for x, y in zip(a[i], a[r])]
        piv_cols.append(c)
        r += 1
        if r == m:
            break
    basis = []
    piv_set = set(piv_cols)
    for free in range(n):
        if free in piv_set:
            continue
        vec = [0] * n
        vec[free] = 1
        for rr, c in enumerate(piv_cols):
            vec[c] = (-a[rr][free]) % p
        basis.append(vec)
    return basis
