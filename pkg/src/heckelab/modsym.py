"""Manin-symbol model of level-1 modular symbols, plus full-level curve data.

The symbol space of weight w is presented by the monomial generators
X^i Y^(w-2-i) (0 <= i <= w-2) modulo the two-term and three-term Manin
relations.  Quotients are taken over exact rationals or modulo a prime
power, the latter via integer Smith reduction of the relation matrix.

The second half of the module carries the combinatorial invariants of
the full-level curves X(N)/Y(N) (genus, components, cusps, H^1
dimension) and the Hecke action on cusp divisors.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .exactlin import (
    IntMatrix,
    IntPolynomial,
    berkowitz,
    frac_rref,
    frac_solve,
    int_inverse_unimodular,
    is_prime,
    smith_normal_form,
)
from .qexp import dim_cusp

_SIGMA = (0, -1, 1, 0)
_TAU = (0, -1, 1, -1)
_TAU2 = (-1, 1, -1, 0)


def _poly_action(i: int, w2: int, g: tuple[int, int, int, int]) -> list[int]:
    """Coefficients over X^t Y^(w2-t) of (aX+bY)^i (cX+dY)^(w2-i)."""
    a, b, c, d = g
    first = [
        math.comb(i, j) * a**j * b ** (i - j) for j in range(i + 1)
    ]  # X^j coefficient
    second = [
        math.comb(w2 - i, m) * c**m * d ** (w2 - i - m) for m in range(w2 - i + 1)
    ]
    out = [0] * (w2 + 1)
    for j, fj in enumerate(first):
        if fj:
            for m, sm in enumerate(second):
                if sm:
                    out[j + m] += fj * sm
    return out


def _relation_rows(w: int) -> list[list[int]]:
    w2 = w - 2
    n = w2 + 1
    rows = []
    for i in range(n):
        row = [0] * n
        row[i] += 1
        for t, c in enumerate(_poly_action(i, w2, _SIGMA)):
            row[t] += c
        rows.append(row)
    for i in range(n):
        row = [0] * n
        row[i] += 1
        for g in (_TAU, _TAU2):
            for t, c in enumerate(_poly_action(i, w2, g)):
                row[t] += c
        rows.append(row)
    return rows


@dataclass(frozen=True)
class ManinSymbolSpace:
    """Level-1 symbol space: generators, relations, and a chosen quotient basis.

    For the exact-rational modulus the quotient basis is the set of free
    (non-pivot) generators of the row-reduced relation matrix, and
    ``reduce_rows`` maps generator-coordinate vectors to quotient
    coordinates.  For a prime-power modulus the quotient is presented by
    the Smith transform of the relation matrix: slot j has modulus
    ``moduli[j]`` and representative row ``vinv.row(retained[j])``.
    """

    weight: int
    modulus: object  # "exact" or a prime power int
    gen_count: int
    relation_matrix: IntMatrix
    dimension: int
    free: tuple[int, ...] = ()
    reduce_rows: tuple = ()
    p: int = 0
    m: int = 0
    v: IntMatrix | None = None
    vinv: IntMatrix | None = None
    divisors: tuple[int, ...] = ()
    retained: tuple[int, ...] = ()
    moduli: tuple[int, ...] = ()

    @property
    def is_exact(self) -> bool:
        return self.modulus == "exact"


def _prime_power(n: int) -> tuple[int, int]:
    if n < 2:
        raise ValueError(f"modulus must be a prime power >= 2, got {n}")
    for p in range(2, n + 1):
        if n % p == 0:
            m = 0
            while n % p == 0:
                n //= p
                m += 1
            if n != 1:
                raise ValueError("modulus must be a power of a single prime")
            return p, m
    raise AssertionError


@lru_cache(maxsize=None)
def manin_space(w: int, modulus="exact") -> ManinSymbolSpace:
    """Assemble the weight-w presentation and compute its quotient."""
    if w % 2 != 0 or w < 2:
        raise ValueError(f"weight must be even and >= 2, got {w}")
    rows = _relation_rows(w)
    rel = IntMatrix(rows)
    n = w - 1
    if modulus == "exact":
        red, piv = frac_rref([[Fraction(x) for x in r] for r in rows])
        free = tuple(j for j in range(n) if j not in piv)
        dim = len(free)
        reduce_rows = []
        for s, fcol in enumerate(free):
            rrow = [Fraction(0)] * n
            rrow[fcol] = Fraction(1)
            for r, pcol in enumerate(piv):
                rrow[pcol] = -red[r][fcol]
            reduce_rows.append(tuple(rrow))
        return ManinSymbolSpace(
            weight=w,
            modulus="exact",
            gen_count=n,
            relation_matrix=rel,
            dimension=dim,
            free=free,
            reduce_rows=tuple(reduce_rows),
        )
    p, m = _prime_power(int(modulus))
    _, d, v = smith_normal_form(rel)
    divisors = tuple(d[i, i] if i < min(rel.rows, n) else 0 for i in range(n))
    pm = p**m
    moduli_all = [pm if dv == 0 else math.gcd(dv, pm) for dv in divisors]
    retained = tuple(j for j in range(n) if moduli_all[j] > 1)
    vinv = int_inverse_unimodular(v)
    return ManinSymbolSpace(
        weight=w,
        modulus=pm,
        gen_count=n,
        relation_matrix=rel,
        dimension=len(retained),
        p=p,
        m=m,
        v=v,
        vinv=vinv,
        divisors=divisors,
        retained=retained,
        moduli=tuple(moduli_all[j] for j in retained),
    )


def _merel_set(n: int):
    """Matrix family of determinant n driving the Hecke action on symbols."""
    for a in range(1, n + 1):
        for d in range((n + a - 1) // a, n + 2 - a):
            bc = a * d - n
            if bc == 0:
                for b in range(a):
                    yield (a, b, 0, d)
                for c in range(1, d):
                    yield (a, 0, c, d)
            else:
                for b in range((bc - 1) // (d - 1) + 1, a):
                    if bc % b == 0:
                        yield (a, b, bc // b, d)


@lru_cache(maxsize=None)
def _hecke_on_generators(w: int, ell: int) -> tuple[tuple[int, ...], ...]:
    """Row i = image of generator i under T_ell, in generator coordinates."""
    w2 = w - 2
    n = w2 + 1
    rows = [[0] * n for _ in range(n)]
    for g in _merel_set(ell):
        for i in range(n):
            for t, c in enumerate(_poly_action(i, w2, g)):
                rows[i][t] += c
    return tuple(tuple(r) for r in rows)


def hecke_on_modsym(space: ManinSymbolSpace, ell: int):
    """Matrix of T_ell on the quotient basis.

    Exact modulus: returns a list of Fraction rows, column j = image of
    basis vector j.  Prime-power modulus: returns an IntMatrix whose
    column j is the image of slot j, with row s canonical mod
    ``space.moduli[s]``.
    """
    if not is_prime(ell):
        raise ValueError(f"Hecke index must be prime here, got {ell}")
    act = _hecke_on_generators(space.weight, ell)
    n = space.gen_count
    if space.is_exact:
        dim = space.dimension
        cols = []
        for j in space.free:
            img = act[j]
            cols.append(
                [
                    sum(space.reduce_rows[s][g] * img[g] for g in range(n))
                    for s in range(dim)
                ]
            )
        return [[cols[j][s] for j in range(dim)] for s in range(dim)]
    v, vinv = space.v, space.vinv
    pm = space.modulus
    cols = []
    for j in space.retained:
        rep = vinv.row(j)
        img = [sum(rep[i] * act[i][t] for i in range(n)) for t in range(n)]
        coords = [sum(img[t] * v[t, s] for t in range(n)) for s in range(n)]
        cols.append(
            [coords[space.retained[s]] % space.moduli[s] for s in range(space.dimension)]
        )
    return IntMatrix(
        [[cols[j][s] for j in range(space.dimension)] for s in range(space.dimension)]
    )


@dataclass(frozen=True)
class CuspidalSubspace:
    """Kernel of the boundary map inside an exact quotient space."""

    space: ManinSymbolSpace
    dimension: int
    basis: tuple[tuple[int, ...], ...]  # integer vectors in quotient coordinates


def _boundary_functional(space: ManinSymbolSpace) -> list[int]:
    """Boundary of generator i: P_i(1,0) - P_i(0,1) on the single cusp class."""
    w2 = space.weight - 2
    lam = [0] * space.gen_count
    lam[w2] += 1
    lam[0] -= 1
    rel = space.relation_matrix
    for r in range(rel.rows):
        if sum(rel[r, j] * lam[j] for j in range(space.gen_count)) != 0:
            raise RuntimeError("internal error: boundary does not kill relations")
    return lam


def cuspidal_subspace(space: ManinSymbolSpace) -> CuspidalSubspace:
    """Kernel of the boundary map; dimension 2*dim_cusp(w) for w >= 4."""
    if not space.is_exact:
        raise ValueError("cuspidal subspace requires the exact-rational modulus")
    if space.weight < 4:
        raise ValueError("boundary map degenerates at weight 2 and level 1")
    lam = _boundary_functional(space)
    lam_q = [lam[j] for j in space.free]
    nz = [s for s, x in enumerate(lam_q) if x != 0]
    if not nz:
        raise RuntimeError("internal error: boundary vanishes on the quotient")
    s0 = nz[0]
    basis = []
    for s in range(space.dimension):
        if s == s0:
            continue
        vec = [0] * space.dimension
        vec[s] = lam_q[s0]
        vec[s0] = -lam_q[s]
        g = math.gcd(*[abs(x) for x in vec]) or 1
        basis.append(tuple(x // g for x in vec))
    return CuspidalSubspace(space=space, dimension=len(basis), basis=tuple(basis))


def hecke_on_cuspidal(sub: CuspidalSubspace, ell: int) -> list[list[Fraction]]:
    """Matrix of T_ell restricted to the cuspidal subspace."""
    full = hecke_on_modsym(sub.space, ell)
    dim = sub.space.dimension
    bcols = [[Fraction(v[s]) for v in sub.basis] for s in range(dim)]  # dim x d
    out_cols = []
    for v in sub.basis:
        img = [sum(full[s][t] * v[t] for t in range(dim)) for s in range(dim)]
        out_cols.append(frac_solve(bcols, img))
    d = len(sub.basis)
    return [[out_cols[j][s] for j in range(d)] for s in range(d)]


def cuspidal_charpoly(sub: CuspidalSubspace, ell: int) -> IntPolynomial:
    """Characteristic polynomial of T_ell on the cuspidal subspace."""
    mat = hecke_on_cuspidal(sub, ell)
    desc = berkowitz(mat)
    coeffs = list(reversed(desc))
    if any(isinstance(c, Fraction) and c.denominator != 1 for c in coeffs):
        raise RuntimeError("internal error: cuspidal charpoly is not integral")
    return IntPolynomial([int(c) for c in coeffs])


def full_charpoly(space: ManinSymbolSpace, ell: int) -> IntPolynomial:
    """Characteristic polynomial of T_ell on the whole exact quotient."""
    if not space.is_exact:
        raise ValueError("full charpoly requires the exact-rational modulus")
    mat = hecke_on_modsym(space, ell)
    coeffs = list(reversed(berkowitz(mat)))
    if any(isinstance(c, Fraction) and c.denominator != 1 for c in coeffs):
        raise RuntimeError("internal error: symbol charpoly is not integral")
    return IntPolynomial([int(c) for c in coeffs])


# ---------------------------------------------------------------------------
# Full-level curve invariants and the cusp action
# ---------------------------------------------------------------------------


def euler_phi(n: int) -> int:
    out = n
    m = n
    p = 2
    while p * p <= m:
        if m % p == 0:
            out -= out // p
            while m % p == 0:
                m //= p
        p += 1
    if m > 1:
        out -= out // m
    return out


def _degree(n: int) -> int:
    """Degree d = (N^3/2) prod_{p|N} (1 - p^-2) of one component of X(N)."""
    if n < 3:
        raise ValueError(f"the full-level formulas need N >= 3, got {n}")
    d = Fraction(n**3, 2)
    m = n
    p = 2
    while p * p <= m:
        if m % p == 0:
            d *= 1 - Fraction(1, p * p)
            while m % p == 0:
                m //= p
        p += 1
    if m > 1:
        d *= 1 - Fraction(1, m * m)
    assert d.denominator == 1
    return int(d)


def genus_x(n: int) -> int:
    """Genus of one connected component of the full level-N curve."""
    d = _degree(n)
    g = 1 + Fraction(d * (n - 6), 12 * n)
    assert g.denominator == 1
    return int(g)


def components(n: int) -> int:
    """Number of connected components (one per Weil-pairing value)."""
    if n < 3:
        raise ValueError(f"the full-level formulas need N >= 3, got {n}")
    return euler_phi(n)


def cusp_count(n: int) -> int:
    """Cusps on one component of the full level-N curve."""
    d = _degree(n)
    assert d % n == 0
    return d // n


def h1_dim_y(n: int) -> int:
    """dim H^1 of one component of the open curve: 2g + cusps - 1."""
    return 2 * genus_x(n) + cusp_count(n) - 1


@dataclass(frozen=True)
class CuspSet:
    """Cusp classes of one component: primitive (a : c) mod N, modulo +-1."""

    level: int
    classes: tuple[tuple[int, int], ...]

    @property
    def size(self) -> int:
        return len(self.classes)

    def index(self, a: int, c: int) -> int:
        return self.classes.index(_canonical_cusp(a, c, self.level))


def _canonical_cusp(a: int, c: int, n: int) -> tuple[int, int]:
    a %= n
    c %= n
    return min((a, c), ((-a) % n, (-c) % n))


@lru_cache(maxsize=None)
def cusp_set(n: int) -> CuspSet:
    if n < 3:
        raise ValueError(f"cusp classes need N >= 3, got {n}")
    seen = set()
    for a in range(n):
        for c in range(n):
            if math.gcd(math.gcd(a, c), n) == 1:
                seen.add(_canonical_cusp(a, c, n))
    return CuspSet(level=n, classes=tuple(sorted(seen)))


def cusp_hecke_matrix(n: int, ell: int) -> IntMatrix:
    """T_ell on the free module on cusp classes; every row sums to ell + 1.

    The ell+1 degeneracy branches collapse on the boundary into two
    orbits: the quotient-by-mu_ell branch (multiplicity 1) and the
    ramified system of the remaining ell subgroups (multiplicity ell).
    After transporting labels back from the Weil-pairing component the
    image lands on, the orbits hit the classes of v and of
    v * diag(ell, ell^-1) respectively; both images are automatically
    primitive.  For ell = +-1 mod N the twist is +-identity, so the
    whole matrix is the scalar 1 + ell.
    """
    if not is_prime(ell):
        raise ValueError(f"need a prime, got {ell}")
    if n % ell == 0:
        raise ValueError(f"prime {ell} must not divide the level {n}")
    cusps = cusp_set(n)
    size = cusps.size
    inv = pow(ell, -1, n)
    rows = [[0] * size for _ in range(size)]
    for src, (a, c) in enumerate(cusps.classes):
        if math.gcd(math.gcd(a * ell, c * inv), n) != 1:
            raise RuntimeError("internal error: cusp image is not primitive")
        rows[src][cusps.index(a, c)] += 1
        rows[src][cusps.index(a * ell, c * inv)] += ell
    return IntMatrix(rows)
