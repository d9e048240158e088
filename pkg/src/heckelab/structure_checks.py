"""Finite group-theoretic and DVR facts verified by enumeration.

Covers the congruence-kernel structure ker(SL2(Z/N^2) -> SL2(Z/N)), the
wild-ramification prime bound d*e + 1, and the existence test for
elements of exact order p in GL_n over an unramified DVR, certified by
an explicit cyclotomic-companion witness.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .exactlin import IntMatrix, is_prime

KERNEL_CAP = 6

# traceless generators of M_2(Z/N)^0
_TRACELESS = ((1, 0, 0, -1), (0, 1, 0, 0), (0, 0, 1, 0))


@dataclass(frozen=True)
class KernelStructure:
    """Structure of the kernel of reduction SL2(Z/N^2) -> SL2(Z/N)."""

    modulus: int
    order: int
    is_abelian: bool
    exponent: int
    invariant_factors: tuple[int, ...]

    def to_json_dict(self) -> dict:
        return {
            "modulus": self.modulus,
            "order": self.order,
            "abelian": self.is_abelian,
            "exponent": self.exponent,
            "invariant_factors": list(self.invariant_factors),
        }


def _mul(a, b, m):
    return (
        (a[0] * b[0] + a[1] * b[2]) % m,
        (a[0] * b[1] + a[1] * b[3]) % m,
        (a[2] * b[0] + a[3] * b[2]) % m,
        (a[2] * b[1] + a[3] * b[3]) % m,
    )


def _element_order(g, ident, m):
    order = 1
    x = g
    while x != ident:
        x = _mul(x, g, m)
        order += 1
    return order


def _primary_partition(element_orders, p: int) -> list[int]:
    """Cyclic factors p^a (descending) of the p-part of an abelian group.

    Recovered from the torsion counts c_j = #{x : x^(p^j) = 1}: the
    number of cyclic factors of order >= p^j is log_p(c_j / c_{j-1}).
    """
    num_ge: list[int] = []
    prev = 1
    j = 1
    while True:
        pj = p**j
        c = sum(1 for o in element_orders if pj % o == 0)
        if c == prev:
            break
        if c % prev != 0:
            raise RuntimeError("internal error: torsion counts are not p-power ratios")
        ratio, e = c // prev, 0
        while ratio > 1:
            if ratio % p != 0:
                raise RuntimeError("internal error: torsion ratio is not a p-power")
            ratio //= p
            e += 1
        num_ge.append(e)
        prev = c
        j += 1
    out = []
    for idx, n_ge in enumerate(num_ge, start=1):
        n_next = num_ge[idx] if idx < len(num_ge) else 0
        out.extend([p**idx] * (n_ge - n_next))
    return sorted(out, reverse=True)


def sl2_kernel_structure(n: int, cap: int = KERNEL_CAP) -> KernelStructure:
    """Enumerate ker(SL2(Z/N^2) -> SL2(Z/N)) by closure from I + N*E.

    E ranges over the traceless generators; the group is checked for
    abelianness, its exponent is the lcm of element orders, and the
    invariant factors are recovered from torsion counts prime by prime.
    """
    if n < 2:
        raise ValueError(f"need N >= 2, got {n}")
    if n > cap:
        raise ValueError(f"N = {n} exceeds the enumeration cap {cap}")
    m = n * n
    ident = (1 % m, 0, 0, 1 % m)
    gens = []
    for e in _TRACELESS:
        g = tuple((i + n * x) % m for i, x in zip(ident, e))
        gens.append(g)
    for g in gens:
        det = (g[0] * g[3] - g[1] * g[2]) % m
        if det != 1 % m:
            raise RuntimeError("internal error: generator is not in SL2")
    seen = {ident}
    frontier = [ident]
    while frontier:
        nxt = []
        for x in frontier:
            for g in gens:
                y = _mul(x, g, m)
                if y not in seen:
                    seen.add(y)
                    nxt.append(y)
        frontier = nxt
    order = len(seen)
    abelian = all(_mul(a, b, m) == _mul(b, a, m) for a in gens for b in gens)
    element_orders = [_element_order(x, ident, m) for x in seen]
    exponent = 1
    for o in element_orders:
        exponent = exponent * o // math.gcd(exponent, o)
    # invariant factors via primary decomposition
    primaries: list[list[int]] = []
    e = exponent
    p = 2
    while e > 1:
        if e % p == 0:
            primaries.append(_primary_partition(element_orders, p))
            while e % p == 0:
                e //= p
        p += 1
    width = max((len(f) for f in primaries), default=0)
    invariant = []
    for i in range(width):
        d = 1
        for f in primaries:
            if i < len(f):
                d *= f[i]
        invariant.append(d)
    invariant.sort()
    prod = 1
    for d in invariant:
        prod *= d
    if prod != order:
        raise RuntimeError("internal error: invariant factors do not multiply to the order")
    return KernelStructure(
        modulus=n,
        order=order,
        is_abelian=abelian,
        exponent=exponent,
        invariant_factors=tuple(invariant),
    )


def wild_bound(d: int, e: int) -> int:
    """Bound d*e + 1: wild primes for d-dimensional representations with
    ramification index e satisfy p <= this value."""
    if d < 1 or e < 1:
        raise ValueError("dimension and ramification index must be >= 1")
    return d * e + 1


@dataclass(frozen=True)
class ExactOrderResult:
    """Existence verdict for elements of exact order p in GL_n(O), e = 1."""

    dimension: int
    p: int
    exists: bool
    witness: IntMatrix | None
    reason: str

    def __bool__(self) -> bool:
        return self.exists

    def to_json_dict(self) -> dict:
        return {
            "dimension": self.dimension,
            "p": self.p,
            "exists": self.exists,
            "witness": self.witness.entries_str() if self.witness else None,
            "reason": self.reason,
        }


def exists_exact_order_p(n: int, p: int) -> ExactOrderResult:
    """True iff p - 1 <= n, certified by a cyclotomic companion witness.

    The witness is the companion matrix of 1 + x + ... + x^(p-1),
    embedded block-diagonally, and is verified to have exact order p by
    repeated exact multiplication.
    """
    if n < 1:
        raise ValueError("dimension must be >= 1")
    if not is_prime(p):
        raise ValueError(f"need a prime, got {p}")
    if p - 1 > n:
        return ExactOrderResult(
            dimension=n,
            p=p,
            exists=False,
            witness=None,
            reason=(
                f"an element of exact order {p} needs dimension >= {p - 1} "
                f"(degree of the {p}-th cyclotomic polynomial), but n = {n}"
            ),
        )
    deg = p - 1
    rows = [[0] * n for _ in range(n)]
    for i in range(1, deg):
        rows[i][i - 1] = 1
    for i in range(deg):
        rows[i][deg - 1] = -1
    for i in range(deg, n):
        rows[i][i] = 1
    witness = IntMatrix(rows)
    power = witness
    for _ in range(p - 1):
        if power == IntMatrix.identity(n):
            raise RuntimeError("internal error: witness order is less than p")
        power = power @ witness
    if power != IntMatrix.identity(n):
        raise RuntimeError("internal error: witness does not have order p")
    return ExactOrderResult(
        dimension=n,
        p=p,
        exists=True,
        witness=witness,
        reason=f"companion matrix of the {p}-th cyclotomic polynomial, verified",
    )
