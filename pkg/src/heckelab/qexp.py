"""Level-1 modular forms as truncated integer q-expansions.

Provides the Eisenstein generators E4, E6, the discriminant form, the
Miller (echelon) basis of cusp forms, and exact Hecke operator matrices
on that basis.  Every operation computes the precision it needs and
fails loudly instead of silently truncating.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

from .exactlin import IntMatrix


class QExpansion:
    """Truncated integer power series sum a_n q^n with a modular weight."""

    __slots__ = ("weight", "prec", "coeffs")

    def __init__(self, weight: int, coeffs):
        cs = tuple(int(c) for c in coeffs)
        if not cs:
            raise ValueError("need at least one coefficient")
        object.__setattr__(self, "weight", int(weight))
        object.__setattr__(self, "prec", len(cs))
        object.__setattr__(self, "coeffs", cs)

    def __setattr__(self, name, value):
        raise AttributeError("QExpansion is immutable")

    def __getitem__(self, n: int) -> int:
        if not 0 <= n < self.prec:
            raise IndexError(
                f"coefficient a_{n} not available at precision {self.prec}"
            )
        return self.coeffs[n]

    def truncate(self, prec: int) -> "QExpansion":
        if prec > self.prec:
            raise ValueError(f"cannot extend precision {self.prec} to {prec}")
        return QExpansion(self.weight, self.coeffs[:prec])

    def __add__(self, other: "QExpansion") -> "QExpansion":
        if self.weight != other.weight:
            raise ValueError("cannot add expansions of different weights")
        p = min(self.prec, other.prec)
        return QExpansion(
            self.weight, [a + b for a, b in zip(self.coeffs[:p], other.coeffs[:p])]
        )

    def __sub__(self, other: "QExpansion") -> "QExpansion":
        return self + (-1) * other

    def __mul__(self, other):
        if isinstance(other, int):
            return QExpansion(self.weight, [other * c for c in self.coeffs])
        p = min(self.prec, other.prec)
        out = [0] * p
        for i, ai in enumerate(self.coeffs[:p]):
            if ai:
                lim = p - i
                for j, bj in enumerate(other.coeffs[:lim]):
                    if bj:
                        out[i + j] += ai * bj
        return QExpansion(self.weight + other.weight, out)

    __rmul__ = __mul__

    def pow(self, n: int) -> "QExpansion":
        if n < 0:
            raise ValueError("negative powers not supported")
        result = QExpansion(0, [1] + [0] * (self.prec - 1))
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def __eq__(self, other):
        return (
            isinstance(other, QExpansion)
            and self.weight == other.weight
            and self.coeffs == other.coeffs
        )

    def __repr__(self):
        head = ", ".join(str(c) for c in self.coeffs[:6])
        tail = ", ..." if self.prec > 6 else ""
        return f"QExpansion(weight={self.weight}, prec={self.prec}, [{head}{tail}])"

    def to_json_dict(self) -> dict:
        return {
            "weight": self.weight,
            "prec": self.prec,
            "coeffs": [str(c) for c in self.coeffs],
        }

    @classmethod
    def from_json_dict(cls, d: dict) -> "QExpansion":
        f = cls(d["weight"], [int(c) for c in d["coeffs"]])
        if f.prec != d["prec"]:
            raise ValueError("precision field disagrees with coefficient count")
        return f


@dataclass(frozen=True)
class MillerBasis:
    """Echelon basis of cusp forms: a_j(f_i) = delta_ij for 1 <= i,j <= dim."""

    weight: int
    dim: int
    prec: int
    forms: tuple[QExpansion, ...]


@dataclass(frozen=True)
class HeckeMatrix:
    """Exact matrix of T_n on the Miller basis; column j is the image of f_{j+1}."""

    weight: int
    n: int
    mat: IntMatrix

    @property
    def dim(self) -> int:
        return self.mat.rows

    def to_json_dict(self) -> dict:
        return {
            "weight": self.weight,
            "n": self.n,
            "dim": self.dim,
            "entries": self.mat.entries_str(),
        }

    @classmethod
    def from_json_dict(cls, d: dict) -> "HeckeMatrix":
        mat = IntMatrix.from_entries_str(d["entries"])
        if mat.rows != d["dim"]:
            raise ValueError("dim field disagrees with matrix shape")
        return cls(weight=d["weight"], n=d["n"], mat=mat)


def _sigma_series(power: int, prec: int) -> list[int]:
    """[0, sigma_power(1), ..., sigma_power(prec-1)] by a divisor sieve."""
    out = [0] * prec
    for d in range(1, prec):
        dp = d**power
        for m in range(d, prec, d):
            out[m] += dp
    return out


@lru_cache(maxsize=None)
def eisenstein(k: int, prec: int) -> QExpansion:
    """E4 = 1 + 240 sum sigma_3(n) q^n or E6 = 1 - 504 sum sigma_5(n) q^n."""
    if prec < 1:
        raise ValueError("precision must be at least 1")
    if k == 4:
        coeffs = [240 * s for s in _sigma_series(3, prec)]
    elif k == 6:
        coeffs = [-504 * s for s in _sigma_series(5, prec)]
    else:
        raise ValueError(f"only weights 4 and 6 are supported, got {k}")
    coeffs[0] = 1
    return QExpansion(k, coeffs)


@lru_cache(maxsize=None)
def delta(prec: int) -> QExpansion:
    """The normalised weight-12 cusp form (E4^3 - E6^2)/1728."""
    if prec < 2:
        raise ValueError("precision must be at least 2")
    e4 = eisenstein(4, prec)
    e6 = eisenstein(6, prec)
    num = e4.pow(3) - e6 * e6
    coeffs = []
    for c in num.coeffs:
        q, r = divmod(c, 1728)
        if r:
            raise RuntimeError("internal consistency failure: E4^3 - E6^2 not divisible by 1728")
        coeffs.append(q)
    return QExpansion(12, coeffs)


@lru_cache(maxsize=None)
def delta_eta(prec: int) -> QExpansion:
    """Independent route to the same form: q * prod(1 - q^n)^24.

    The product is expanded by the pentagonal number theorem, so this
    shares no code with the Eisenstein construction.
    """
    if prec < 2:
        raise ValueError("precision must be at least 2")
    euler = [0] * prec
    euler[0] = 1
    m = 1
    while True:
        p1 = m * (3 * m - 1) // 2
        p2 = m * (3 * m + 1) // 2
        if p1 >= prec and p2 >= prec:
            break
        sign = -1 if m % 2 else 1
        if p1 < prec:
            euler[p1] = sign
        if p2 < prec:
            euler[p2] = sign
        m += 1
    pw = QExpansion(0, euler).pow(24)
    return QExpansion(12, (0,) + pw.coeffs[: prec - 1])


def dim_cusp(k: int) -> int:
    """Dimension of the space of level-1 cusp forms of even weight k."""
    if k % 2 != 0:
        raise ValueError(f"weight must be even, got {k}")
    if k < 0:
        raise ValueError(f"weight must be nonnegative, got {k}")
    if k < 12:
        return 0
    return k // 12 - 1 if k % 12 == 2 else k // 12


def sturm_bound(k: int) -> int:
    """Number of initial Hecke operators needed to generate the algebra."""
    if k % 2 != 0 or k < 12:
        raise ValueError(f"need even weight >= 12, got {k}")
    return k // 12


@lru_cache(maxsize=None)
def miller_basis(k: int, prec: int) -> MillerBasis:
    """Integral echelon basis of weight-k cusp forms to the given precision.

    Built from the monomial ladder delta^i * E6^eps * E4^a (eps fixed by
    k mod 4), then reduced to a_j(f_i) = delta_ij.  All pivots are 1, so
    the reduction stays in integers by construction.
    """
    d = dim_cusp(k)
    if prec < d + 1:
        raise ValueError(f"precision {prec} too small, need at least {d + 1}")
    if d == 0:
        return MillerBasis(weight=k, dim=0, prec=prec, forms=())
    eps = 0 if k % 4 == 0 else 1
    dl = delta(prec)
    e4cube = eisenstein(4, prec).pow(3)
    e6 = eisenstein(6, prec)

    # exponents a_i = (k - 12 i - 6 eps) / 4 for i = 1..d, descending by 3
    exps = [(k - 12 * i - 6 * eps) // 4 for i in range(1, d + 1)]
    if exps[-1] < 0 or (k - 12 - 6 * eps) % 4 != 0:
        raise RuntimeError("internal error: monomial ladder bookkeeping failed")
    e4pows: dict[int, QExpansion] = {exps[-1]: eisenstein(4, prec).pow(exps[-1])}
    for a in sorted(set(exps)):
        if a not in e4pows:
            e4pows[a] = e4pows[a - 3] * e4cube

    rows: list[list[int]] = []
    dpow = dl
    for i in range(1, d + 1):
        mono = dpow * e4pows[exps[i - 1]]
        if eps:
            mono = mono * e6
        rows.append(list(mono.coeffs))
        if i < d:
            dpow = dpow * dl
    for i in range(d):
        if rows[i][i + 1] != 1 or any(rows[i][j] != 0 for j in range(i + 1)):
            raise RuntimeError("internal error: ladder is not unitriangular")
    for j in range(1, d + 1):
        pivot = rows[j - 1]
        for i in range(j - 1):
            c = rows[i][j]
            if c:
                rows[i] = [x - c * y for x, y in zip(rows[i], pivot)]
    forms = tuple(QExpansion(k, r) for r in rows)
    return MillerBasis(weight=k, dim=d, prec=prec, forms=forms)


def _divisors(n: int) -> list[int]:
    out = []
    for t in range(1, int(math.isqrt(n)) + 1):
        if n % t == 0:
            out.append(t)
            if t * t != n:
                out.append(n // t)
    return sorted(out)


def hecke_apply(f: QExpansion, n: int, out_prec: int | None = None) -> QExpansion:
    """Apply T_n: a_m(T_n f) = sum over t | gcd(n, m) of t^(k-1) a_{nm/t^2}(f)."""
    if n < 1:
        raise ValueError("Hecke index must be positive")
    if out_prec is None:
        out_prec = f.prec // n
    if n * out_prec > f.prec:
        raise ValueError(
            f"insufficient precision: T_{n} at output precision {out_prec} "
            f"needs input precision {n * out_prec}, have {f.prec}"
        )
    if out_prec < 1:
        raise ValueError(f"insufficient precision: T_{n} needs input precision >= {n}")
    k = f.weight
    out = []
    for m in range(out_prec):
        g = n if m == 0 else math.gcd(n, m)
        out.append(sum(t ** (k - 1) * f.coeffs[n * m // (t * t)] for t in _divisors(g)))
    return QExpansion(k, out)


def _hecke_entries(basis: MillerBasis, n: int) -> IntMatrix:
    d = basis.dim
    k = basis.weight
    cols = []
    for f in basis.forms:
        tf = hecke_apply(f, n, out_prec=d + 1)
        cols.append([tf.coeffs[m] for m in range(1, d + 1)])
    # column j holds the image of f_{j+1}; transpose to row-major entries
    return IntMatrix([[cols[j][i] for j in range(d)] for i in range(d)])


def hecke_matrix(k: int, n: int) -> HeckeMatrix:
    """Matrix of T_n on the Miller basis of weight-k cusp forms."""
    d = dim_cusp(k)
    if d == 0:
        raise ValueError(f"no cusp forms in weight {k}")
    if n < 1:
        raise ValueError("Hecke index must be positive")
    basis = miller_basis(k, n * (d + 1))
    return HeckeMatrix(weight=k, n=n, mat=_hecke_entries(basis, n))


def hecke_matrices(k: int, ns) -> dict[int, HeckeMatrix]:
    """Matrices of several T_n at once, sharing one basis computation."""
    ns = sorted(set(int(n) for n in ns))
    if not ns:
        return {}
    d = dim_cusp(k)
    if d == 0:
        raise ValueError(f"no cusp forms in weight {k}")
    if ns[0] < 1:
        raise ValueError("Hecke index must be positive")
    basis = miller_basis(k, ns[-1] * (d + 1))
    return {n: HeckeMatrix(weight=k, n=n, mat=_hecke_entries(basis, n)) for n in ns}


def newform_coefficients(k: int, nmax: int) -> dict[int, int]:
    """a_1..a_nmax of the unique normalised eigenform, for weights with dim 1."""
    if dim_cusp(k) != 1:
        raise ValueError(f"weight {k} does not have a one-dimensional cusp space")
    basis = miller_basis(k, nmax + 1)
    f = basis.forms[0]
    return {n: f.coeffs[n] for n in range(1, nmax + 1)}
