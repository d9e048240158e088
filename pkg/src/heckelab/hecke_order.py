"""Commutative orders over Z generated by commuting integer matrices.

An order is carried as a lattice inside the vectorised matrix space
Q^(d*d): a canonical HNF basis over a common denominator, re-based so
the first basis element is the identity, together with integer
structure constants.  This houses the Hecke algebra of a weight, its
trace-pairing discriminant, and the radical/multiplier normalisation
loop that yields the p-maximal overorder and the index valuation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .exactlin import (
    IntMatrix,
    _hnf_rows,
    det,
    frac_inverse,
    int_inverse_unimodular,
    int_kernel_mod_p,
    is_prime,
    smith_normal_form,
    valuation,
)
from .qexp import dim_cusp, hecke_matrices, sturm_bound


def _vec(m: IntMatrix) -> list[int]:
    return [x for row in m.tolist() for x in row]


def _unvec(v, d: int) -> IntMatrix:
    return IntMatrix([list(v[i * d : (i + 1) * d]) for i in range(d)])


def _solve_in_echelon(hrows, target) -> list[Fraction]:
    """Solve z @ hrows = target for the echelon (HNF) rows, exactly."""
    t = [Fraction(x) for x in target]
    z = []
    for row in hrows:
        piv = next((j for j, x in enumerate(row) if x != 0), None)
        if piv is None:
            z.append(Fraction(0))
            continue
        c = t[piv] / row[piv]
        z.append(c)
        if c:
            t = [tv - c * rv for tv, rv in zip(t, row)]
    if any(t):
        raise ValueError("vector is not in the lattice span")
    return z


class ZOrder:
    """Finite commutative ring over Z inside M_d(Q), unit included."""

    __slots__ = ("d", "rank", "den", "hrows", "basis_rows", "sc", "_reg_traces")

    def __init__(self, d: int, vec_rows, den: int):
        hrows, den = _canonical_lattice(vec_rows, den)
        rank = len(hrows)
        object.__setattr__(self, "d", d)
        object.__setattr__(self, "rank", rank)
        object.__setattr__(self, "den", den)
        object.__setattr__(self, "hrows", tuple(tuple(r) for r in hrows))
        basis_rows = _rebase_identity(hrows, den, d)
        object.__setattr__(self, "basis_rows", tuple(tuple(r) for r in basis_rows))
        sc = _structure_constants(basis_rows, hrows, den, d)
        object.__setattr__(self, "sc", sc)
        object.__setattr__(
            self,
            "_reg_traces",
            tuple(sum(sc[s][j][j] for j in range(rank)) for s in range(rank)),
        )

    def __setattr__(self, name, value):
        raise AttributeError("ZOrder is immutable")

    def basis_matrix(self, i: int) -> tuple[IntMatrix, int]:
        """Basis element i as (numerator matrix, denominator)."""
        return _unvec(self.basis_rows[i], self.d), self.den

    def multiply_coords(self, x, y) -> list[int]:
        """Coordinates of the product of two elements given by coordinates."""
        r = self.rank
        out = [0] * r
        for i, xi in enumerate(x):
            if xi:
                ci = self.sc[i]
                for j, yj in enumerate(y):
                    if yj:
                        f = xi * yj
                        row = ci[j]
                        for s in range(r):
                            out[s] += f * row[s]
        return out

    def __eq__(self, other):
        return (
            isinstance(other, ZOrder)
            and self.d == other.d
            and self.den == other.den
            and self.hrows == other.hrows
        )

    def __hash__(self):
        return hash((self.d, self.den, self.hrows))

    def __repr__(self):
        return f"ZOrder(rank={self.rank}, ambient={self.d}x{self.d}, den={self.den})"


def _canonical_lattice(vec_rows, den: int):
    rows = [list(r) for r in vec_rows]
    rows, rank = _hnf_rows(rows)
    rows = rows[:rank]
    g = den
    for r in rows:
        for x in r:
            g = math.gcd(g, x)
            if g == 1:
                break
        if g == 1:
            break
    if g > 1:
        rows = [[x // g for x in r] for r in rows]
        den //= g
    return rows, den


def _rebase_identity(hrows, den: int, d: int):
    """Unimodular change of basis making row 0 equal den * vec(identity)."""
    ident = _vec(IntMatrix.identity(d))
    target = [den * x for x in ident]
    z = _solve_in_echelon(hrows, target)
    if any(c.denominator != 1 for c in z):
        raise ValueError("identity matrix is not in the lattice")
    x = [int(c) for c in z]
    r = len(hrows)
    _, dmat, v = smith_normal_form(IntMatrix([x]))
    if dmat[0, 0] != 1:
        raise ValueError("identity is divisible inside the lattice")
    xv = [sum(x[i] * v[i, j] for i in range(r)) for j in range(r)]
    if xv[0] == -1:
        v = -1 * v
    m = int_inverse_unimodular(v)
    new_rows = [
        [sum(m[i, j] * hrows[j][t] for j in range(r)) for t in range(len(hrows[0]))]
        for i in range(r)
    ]
    assert new_rows[0] == target
    return new_rows


def _structure_constants(basis_rows, hrows, den: int, d: int):
    r = len(basis_rows)
    mats = [_unvec(row, d) for row in basis_rows]
    # coordinates with respect to basis_rows = (coords w.r.t. hrows) @ V,
    # where basis = M @ hrows; so z @ hrows = y @ basis means y = z @ M^-1
    minv_rows = []
    for row in basis_rows:
        minv_rows.append(_solve_in_echelon(hrows, row))
    minv = [[int(c) for c in row] for row in minv_rows]  # basis = minv @ hrows
    minv_inv = int_inverse_unimodular(IntMatrix(minv))
    sc = []
    for i in range(r):
        sci = []
        for j in range(r):
            if j < i:
                sci.append(sc[j][i])
                continue
            prod = mats[i] @ mats[j]
            if mats[j] @ mats[i] != prod:
                raise ValueError("basis elements do not commute")
            target = [Fraction(x, den) for x in _vec(prod)]
            z = _solve_in_echelon(hrows, target)
            y = [
                sum(z[t] * minv_inv[t, s] for t in range(r)) for s in range(r)
            ]
            if any(c.denominator != 1 for c in y):
                raise ValueError("lattice is not closed under multiplication")
            sci.append(tuple(int(c) for c in y))
        sc.append(tuple(sci))
    return tuple(sc)


def order_from_generators(gens: list[IntMatrix]) -> ZOrder:
    """Z-module closure of the ring generated by commuting integer matrices.

    Iterates {current basis} x {generators} through vectorisation + HNF
    until the lattice stabilises; the identity is always included.
    """
    if not gens:
        raise ValueError("need at least one generator (or use the identity)")
    d = gens[0].rows
    for g in gens:
        if not g.is_square or g.rows != d:
            raise ValueError("generators must be square of equal size")
    for i in range(len(gens)):
        for j in range(i + 1, len(gens)):
            if gens[i] @ gens[j] != gens[j] @ gens[i]:
                raise ValueError(f"generators {i} and {j} do not commute")
    rows = [_vec(IntMatrix.identity(d))] + [_vec(g) for g in gens]
    rows, _ = _canonical_lattice(rows, 1)
    while True:
        products = []
        for row in rows:
            m = _unvec(row, d)
            for g in gens:
                products.append(_vec(m @ g))
        new_rows, _ = _canonical_lattice([list(r) for r in rows] + products, 1)
        if new_rows == rows:
            break
        rows = new_rows
    return ZOrder(d, rows, 1)


def trace_gram(order: ZOrder) -> IntMatrix:
    """Gram matrix of the trace pairing in the regular representation.

    Traces are taken on the rank-r regular representation built from the
    structure constants, not on the ambient d x d matrices.
    """
    r = order.rank
    tr = order._reg_traces
    gram = [[0] * r for _ in range(r)]
    for i in range(r):
        for j in range(i, r):
            val = sum(order.sc[i][j][s] * tr[s] for s in range(r))
            gram[i][j] = val
            gram[j][i] = val
    return IntMatrix(gram)


def discriminant(order: ZOrder) -> int:
    """Determinant of the trace Gram matrix; zero flags a non-reduced order."""
    return det(trace_gram(order))


def p_radical(order: ZOrder, p: int) -> IntMatrix:
    """Radical of order/p, lifted to a sublattice between p*order and order.

    Returns HNF rows of coordinates with respect to the order's basis.
    Computed as the kernel of the e-fold Frobenius x -> x^(p^e) on the
    basis of order/p, with p^e >= rank.
    """
    if not is_prime(p):
        raise ValueError(f"need a prime, got {p}")
    r = order.rank

    def mul_mod(x, y):
        return [c % p for c in order.multiply_coords(x, y)]

    def pow_mod(x, n):
        result = [1] + [0] * (r - 1)
        base = list(x)
        while n:
            if n & 1:
                result = mul_mod(result, base)
            n >>= 1
            if n:
                base = mul_mod(base, base)
        return result

    frob_cols = []
    for i in range(r):
        e_i = [1 if s == i else 0 for s in range(r)]
        frob_cols.append(pow_mod(e_i, p))
    f = [[frob_cols[j][i] % p for j in range(r)] for i in range(r)]
    e = 1
    while p**e < r:
        e += 1
    fe = f
    for _ in range(e - 1):
        fe = [
            [sum(fe[i][t] * f[t][j] for t in range(r)) % p for j in range(r)]
            for i in range(r)
        ]
    kernel = int_kernel_mod_p(fe, p)
    rows = [[p if s == i else 0 for s in range(r)] for i in range(r)]
    rows.extend([list(v) for v in kernel])
    rows, rank = _hnf_rows(rows)
    assert rank == r
    return IntMatrix(rows[:r])


def ring_of_multipliers(order: ZOrder, sublattice: IntMatrix) -> ZOrder:
    """The order {x in order (x) Q : x * sublattice <= sublattice}.

    The sublattice is given by coordinate rows with respect to the
    order's basis.  Integrality conditions are solved through the Smith
    form of the stacked constraint matrix.
    """
    r = order.rank
    rt = [[Fraction(sublattice[j, i]) for j in range(r)] for i in range(r)]
    rt_inv = frac_inverse(rt)
    blocks = []
    for vrow in range(r):
        v = sublattice.row(vrow)
        a = [
            [
                sum(v[t] * order.sc[i][t][s] for t in range(r))
                for i in range(r)
            ]
            for s in range(r)
        ]
        for s in range(r):
            blocks.append(
                [
                    sum(rt_inv[s][u] * a[u][i] for u in range(r))
                    for i in range(r)
                ]
            )
    q = 1
    for row in blocks:
        for x in row:
            q = q * x.denominator // math.gcd(q, x.denominator)
    mprime = IntMatrix([[int(x * q) for x in row] for row in blocks])
    _, dmat, v = smith_normal_form(mprime)
    dvals = [dmat[i, i] for i in range(r)]
    if any(x == 0 for x in dvals):
        raise RuntimeError("internal error: multiplier constraints are rank-deficient")
    lcm_d = 1
    for x in dvals:
        lcm_d = lcm_d * x // math.gcd(lcm_d, x)
    # xi^(i) = (q / d_i) * V column i, over the common denominator lcm_d / ...
    new_rows = []
    for i in range(r):
        scale = q * (lcm_d // dvals[i])
        xi = [scale * v[s, i] for s in range(r)]
        amb = [
            sum(xi[s] * order.basis_rows[s][t] for s in range(r))
            for t in range(len(order.basis_rows[0]))
        ]
        new_rows.append(amb)
    return ZOrder(order.d, new_rows, order.den * q * lcm_d)


def order_index(finer: ZOrder, coarser: ZOrder) -> int:
    """Index [finer : coarser] for orders spanning the same algebra."""
    if finer.rank != coarser.rank or finer.d != coarser.d:
        raise ValueError("orders are not comparable")
    coeffs = []
    for row in coarser.hrows:
        target = [Fraction(x * finer.den, coarser.den) for x in row]
        coeffs.append(_solve_in_echelon(finer.hrows, target))
    if any(c.denominator != 1 for row in coeffs for c in row):
        raise ValueError("first order does not contain the second")
    r = finer.rank
    idx = det(IntMatrix([[int(c) for c in row] for row in coeffs]))
    return abs(idx)


def p_maximal_order(order: ZOrder, p: int) -> ZOrder:
    """Iterate multipliers of the p-radical until the fixed point."""
    disc = discriminant(order)
    if disc == 0:
        raise ValueError("order is not reduced (zero discriminant)")
    limit = valuation(disc, p) // 2 + 2
    current = order
    for _ in range(limit + 1):
        bigger = ring_of_multipliers(current, p_radical(current, p))
        if bigger == current:
            return current
        step = order_index(bigger, current)
        if step == 1 or p ** valuation(step, p) != step:
            raise RuntimeError("internal error: multiplier step index is not a p-power")
        current = bigger
    raise RuntimeError("internal error: p-maximalisation did not terminate")


@dataclass(frozen=True)
class OrderReport:
    """Valuation bookkeeping for one (weight, prime) Hecke order."""

    weight: int
    p: int
    rank: int
    v_p_disc: int
    v_p_disc_max: int
    v_p_index: int

    def csv_row(self) -> str:
        return (
            f"{self.weight},{self.p},{self.rank},"
            f"{self.v_p_disc},{self.v_p_disc_max},{self.v_p_index}"
        )

    def to_json_dict(self) -> dict:
        return {
            "weight": self.weight,
            "p": self.p,
            "rank": self.rank,
            "v_disc": self.v_p_disc,
            "v_disc_max": self.v_p_disc_max,
            "v_index": self.v_p_index,
        }


def hecke_order(k: int) -> ZOrder:
    """The Hecke algebra of weight k, generated by T_1..T_sturm_bound(k)."""
    d = dim_cusp(k)
    if d == 0:
        raise ValueError(f"no cusp forms in weight {k}")
    bound = sturm_bound(k)
    mats = hecke_matrices(k, range(1, bound + 1))
    return order_from_generators([mats[n].mat for n in range(1, bound + 1)])


def index_valuation(k: int, p: int) -> OrderReport:
    """Build the weight-k Hecke order, p-maximalise, report valuations."""
    if not is_prime(p):
        raise ValueError(f"need a prime, got {p}")
    order = hecke_order(k)
    disc = discriminant(order)
    if disc == 0:
        raise RuntimeError("internal error: Hecke order is not reduced")
    v_disc = valuation(disc, p)
    maximal = p_maximal_order(order, p)
    disc_max = discriminant(maximal)
    v_max = valuation(disc_max, p)
    if (v_disc - v_max) % 2 != 0:
        raise RuntimeError("internal error: discriminant-index parity violated")
    idx = order_index(maximal, order)
    if disc != idx * idx * disc_max:
        raise RuntimeError("internal error: discriminant-index identity violated")
    return OrderReport(
        weight=k,
        p=p,
        rank=order.rank,
        v_p_disc=v_disc,
        v_p_disc_max=v_max,
        v_p_index=(v_disc - v_max) // 2,
    )
