"""Configuration complexes, the Grassmannian bicomplex and decorated flags.

Everything here is exact over Q.  A configuration is a tuple of vectors in
Q^q; chains are finite Z-combinations of GL_q-orbits, each orbit keyed by a
canonical representative (the first q vectors moved to the standard basis).

Bicomplex: f forgets a vector, p projects along one.  With the alternating
sums f = sum (-1)^s f_s and p = sum (-1)^s p_s the two already anticommute,
so the total differential is f + sign * p with a constant sign.  The default
sign -1 makes the plain sum of projections c_m a chain map.
"""
from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Mapping, Sequence

from .bloch import WedgeOfUnits, cross_ratio, delta

__all__ = [
    "GenericityError", "rank", "det", "solve",
    "Configuration", "Chain", "forget_differential", "project_differential",
    "bigrassmannian_differential", "random_configuration",
    "HypersimplexID", "hypersimplicial_decomposition", "hypersimplex_count",
    "boundary", "hypersimplex_vertices", "facet_pairing_check",
    "DecoratedFlag", "DecoratedFlagTuple", "compositions", "pi_a", "c_m",
    "flag_differential", "random_flag_tuple", "chain_map_residual",
    "l2_units", "l1_point", "bloch_projection", "conic_parameters",
    "five_term_relations",
    "plucker_check", "bloch_chain_check",
]

Vector = tuple


class GenericityError(ValueError):
    pass


# ---------------------------------------------------------------- exact linear algebra

def _echelon(rows: Sequence[Sequence]) -> tuple[list[list[Fraction]], list[int], int]:
    """Row echelon form; returns (rows, pivot columns, sign of the row swaps)."""
    a = [[Fraction(x) for x in r] for r in rows]
    pivots: list[int] = []
    sign = 1
    r = 0
    ncols = len(a[0]) if a else 0
    for c in range(ncols):
        k = next((i for i in range(r, len(a)) if a[i][c] != 0), None)
        if k is None:
            continue
        if k != r:
            a[r], a[k] = a[k], a[r]
            sign = -sign
        for i in range(r + 1, len(a)):
            if a[i][c]:
                t = a[i][c] / a[r][c]
                a[i] = [x - t * y for x, y in zip(a[i], a[r])]
        pivots.append(c)
        r += 1
        if r == len(a):
            break
    return a, pivots, sign


def rank(vectors: Sequence[Sequence]) -> int:
    if not vectors:
        return 0
    return len(_echelon(vectors)[1])


def det(columns: Sequence[Sequence]) -> Fraction:
    n = len(columns)
    if n == 0:
        return Fraction(1)
    rows = [[columns[j][i] for j in range(n)] for i in range(n)]
    a, piv, sign = _echelon(rows)
    if len(piv) < n:
        return Fraction(0)
    return sign * math.prod((a[i][i] for i in range(n)), start=Fraction(1))


def solve(columns: Sequence[Sequence], rhs: Sequence) -> list[Fraction]:
    """Coordinates x with sum x_j columns[j] = rhs (columns a basis)."""
    n = len(columns)
    aug = [[Fraction(columns[j][i]) for j in range(n)] + [Fraction(rhs[i])] for i in range(len(rhs))]
    a, piv, _ = _echelon(aug)
    if len(piv) < n or (piv and piv[-1] == n):
        raise GenericityError("not a basis or inconsistent system")
    x = [Fraction(0)] * n
    for i in reversed(range(n)):
        x[i] = (a[i][n] - sum(a[i][j] * x[j] for j in range(i + 1, n))) / a[i][i]
    return x


# ---------------------------------------------------------------- configurations

def _vector(v) -> Vector:
    return tuple(Fraction(x) for x in v)


@dataclass(frozen=True)
class Configuration:
    """m vectors in Q^q, every <= q of them linearly independent."""
    vectors: tuple
    dim: int

    def __post_init__(self):
        vs = tuple(_vector(v) for v in self.vectors)
        object.__setattr__(self, "vectors", vs)
        if any(len(v) != self.dim for v in vs):
            raise ValueError("vectors must have length dim")
        if not self.is_generic():
            raise GenericityError("configuration is not generic")

    @classmethod
    def of(cls, vectors: Iterable[Sequence]) -> "Configuration":
        vs = [tuple(v) for v in vectors]
        return cls(tuple(vs), len(vs[0]))

    @property
    def size(self) -> int:
        return len(self.vectors)

    def is_generic(self) -> bool:
        m, q = self.size, self.dim
        if m <= q:
            return rank(self.vectors) == m
        return all(det([self.vectors[i] for i in c]) != 0 for c in itertools.combinations(range(m), q))

    def canonical(self) -> "Configuration":
        """Representative of the GL_q-orbit: the first q vectors become the standard basis."""
        m, q = self.size, self.dim
        basis = [tuple(Fraction(int(i == j)) for i in range(q)) for j in range(q)]
        if m <= q:
            return Configuration(tuple(basis[:m]), q)
        head = self.vectors[:q]
        rest = [tuple(solve(head, v)) for v in self.vectors[q:]]
        return Configuration(tuple(basis) + tuple(rest), q)

    def same_orbit(self, other: "Configuration") -> bool:
        return self.dim == other.dim and self.size == other.size and self.canonical() == other.canonical()

    def face(self, i: int) -> "Configuration":
        """Forget the i-th vector."""
        return Configuration(self.vectors[:i] + self.vectors[i + 1:], self.dim)

    def project(self, j: int) -> "Configuration":
        """Images of the other vectors in Q^q / (l_j), coordinates along the
        standard basis vectors other than the first coordinate where l_j is nonzero."""
        if self.dim < 2:
            raise ValueError("cannot project a line configuration")
        lj = self.vectors[j]
        out = [_quotient(lj, v) for s, v in enumerate(self.vectors) if s != j]
        return Configuration(tuple(out), self.dim - 1)

    def to_json(self) -> list:
        return [[str(x) for x in v] for v in self.vectors]

    @classmethod
    def from_json(cls, data: Sequence[Sequence[str]]) -> "Configuration":
        return cls.of([[Fraction(x) for x in v] for v in data])


class Chain:
    """Finite Z-combination of configuration orbits."""

    def __init__(self, terms: Mapping | None = None):
        self.terms: dict = {}
        for c, v in (terms or {}).items():
            self.add(c, v)

    def add(self, conf: Configuration, coeff: int = 1) -> "Chain":
        key = conf.canonical()
        v = self.terms.get(key, 0) + coeff
        if v:
            self.terms[key] = v
        else:
            self.terms.pop(key, None)
        return self

    @classmethod
    def single(cls, conf: Configuration, coeff: int = 1) -> "Chain":
        return cls().add(conf, coeff)

    def __add__(self, other: "Chain") -> "Chain":
        out = Chain(self.terms)
        for c, v in other.terms.items():
            out.add(c, v)
        return out

    def scale(self, k: int) -> "Chain":
        return Chain({c: k * v for c, v in self.terms.items()})

    def __sub__(self, other: "Chain") -> "Chain":
        return self + other.scale(-1)

    def __eq__(self, other) -> bool:
        return isinstance(other, Chain) and self.terms == other.terms

    def is_zero(self) -> bool:
        return not self.terms

    def restrict(self, keep) -> "Chain":
        return Chain({c: v for c, v in self.terms.items() if keep(c)})

    def bidegrees(self) -> set:
        return {(c.size, c.dim) for c in self.terms}

    def __len__(self):
        return len(self.terms)

    def __repr__(self):
        return f"Chain({len(self.terms)} terms, bidegrees={sorted(self.bidegrees())})"


def forget_differential(x: Chain) -> Chain:
    out = Chain()
    for c, v in x.terms.items():
        for s in range(c.size):
            out.add(c.face(s), (-1) ** s * v)
    return out


def project_differential(x: Chain) -> Chain:
    out = Chain()
    for c, v in x.terms.items():
        if c.dim < 2:
            continue
        for s in range(c.size):
            out.add(c.project(s), (-1) ** s * v)
    return out


def _in_bigrassmannian(c: Configuration) -> bool:
    return 1 <= c.dim <= c.size - 1


def bigrassmannian_differential(x: Chain, p_sign: int = -1) -> Chain:
    """Total differential f + p_sign * p on BC_m = sum_{q=1}^{m-1} C_m(q)."""
    out = forget_differential(x) + project_differential(x).scale(p_sign)
    return out.restrict(_in_bigrassmannian)


def random_configuration(m: int, q: int, rng: random.Random, bound: int = 9) -> Configuration:
    while True:
        vs = [tuple(Fraction(rng.randint(-bound, bound)) for _ in range(q)) for _ in range(m)]
        try:
            return Configuration(tuple(vs), q)
        except GenericityError:
            continue


# ---------------------------------------------------------------- hypersimplices

@dataclass(frozen=True)
class HypersimplexID:
    """Hypersimplex Delta^{p,q} of the N-decomposition with lowest vertex a."""
    p: int
    q: int
    a: tuple

    @property
    def m(self) -> int:
        return len(self.a) - 1


def compositions(total: int, parts: int) -> Iterator[tuple]:
    """All tuples of `parts` nonnegative integers summing to `total`, lexicographic."""
    if parts == 0:
        if total == 0:
            yield ()
        return
    if parts == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in compositions(total - first, parts - 1):
            yield (first,) + rest


def hypersimplicial_decomposition(m: int, N: int) -> list[HypersimplexID]:
    out = []
    for q in range(m):
        p = m - 1 - q
        if N - q - 1 < 0:
            continue
        out.extend(HypersimplexID(p, q, a) for a in compositions(N - q - 1, m + 1))
    return out


def hypersimplex_count(m: int, N: int, q: int) -> int:
    return math.comb(m + N - q - 1, m) if N - q - 1 >= 0 else 0


def hypersimplex_vertices(h: HypersimplexID) -> frozenset:
    out = set()
    for ones in itertools.combinations(range(h.m + 1), h.q + 1):
        out.add(tuple(a + (i in ones) for i, a in enumerate(h.a)))
    return frozenset(out)


def boundary(h: HypersimplexID) -> tuple[list, list]:
    """Codimension one faces (sign, facet vertex set, neighbour id).

    b-list: the m+1 faces x_i = a_i of type (p-1, q), sign (-1)^i;
    c-list: the m+1 faces x_i = a_i + 1 of type (p, q-1), sign -(-1)^i.
    A face list is empty when its type has a negative index.
    """
    verts = hypersimplex_vertices(h)
    b, c = [], []
    if h.p >= 1:
        for i in range(h.m + 1):
            face = frozenset(v for v in verts if v[i] == h.a[i])
            b.append(((-1) ** i, face, i))
    if h.q >= 1:
        for i in range(h.m + 1):
            face = frozenset(v for v in verts if v[i] == h.a[i] + 1)
            nb = HypersimplexID(h.p + 1, h.q - 1, tuple(x + (j == i) for j, x in enumerate(h.a)))
            c.append((-(-1) ** i, face, nb))
    return b, c


def facet_pairing_check(m: int, N: int) -> bool:
    """Interior facets cancel in pairs; what remains is sum_i (-1)^i (decomposition of face x_i = 0)."""
    total: dict = {}
    for h in hypersimplicial_decomposition(m, N):
        b, c = boundary(h)
        for sign, face, _ in b + c:
            total[face] = total.get(face, 0) + sign
    total = {f: v for f, v in total.items() if v}
    expected: dict = {}
    if m >= 1:
        for i in range(m + 1):
            for g in hypersimplicial_decomposition(m - 1, N):
                face = frozenset(v[:i] + (0,) + v[i:] for v in hypersimplex_vertices(g))
                expected[face] = expected.get(face, 0) + (-1) ** i
    expected = {f: v for f, v in expected.items() if v}
    return total == expected


# ---------------------------------------------------------------- decorated flags

@dataclass(frozen=True)
class DecoratedFlag:
    """Full flag F_k = span(f_1..f_k) in Q^N with decorations f_k (lifts stored)."""
    vectors: tuple

    def __post_init__(self):
        vs = tuple(_vector(v) for v in self.vectors)
        object.__setattr__(self, "vectors", vs)
        if rank(vs) != len(vs) or any(len(v) != len(vs) for v in vs):
            raise GenericityError("decorations must form a basis")

    @property
    def N(self) -> int:
        return len(self.vectors)

    def subspace(self, k: int) -> tuple:
        return self.vectors[:k]


@dataclass(frozen=True)
class DecoratedFlagTuple:
    flags: tuple

    def __post_init__(self):
        if len({f.N for f in self.flags}) > 1:
            raise ValueError("flags must live in the same space")
        if not self.is_generic():
            raise GenericityError("flag tuple is not generic")

    @property
    def N(self) -> int:
        return self.flags[0].N

    @property
    def m(self) -> int:
        return len(self.flags) - 1

    def is_generic(self) -> bool:
        N = self.N
        for a in compositions(N, len(self.flags)):
            span = [v for f, k in zip(self.flags, a) for v in f.subspace(k)]
            if det(span) == 0:
                return False
        return True

    def face(self, i: int) -> "DecoratedFlagTuple":
        return DecoratedFlagTuple(self.flags[:i] + self.flags[i + 1:])

    def to_json(self) -> list:
        return [[[str(x) for x in v] for v in f.vectors] for f in self.flags]

    @classmethod
    def from_json(cls, data) -> "DecoratedFlagTuple":
        return cls(tuple(DecoratedFlag(tuple(tuple(Fraction(x) for x in v) for v in f)) for f in data))


def _complement(span: Sequence[Vector], N: int) -> list[int]:
    """Lexicographically first standard basis vectors completing span to Q^N."""
    chosen: list[int] = []
    cur = list(span)
    for k in range(N):
        e = tuple(Fraction(int(i == k)) for i in range(N))
        if rank(cur + [e]) > len(cur):
            cur.append(e)
            chosen.append(k)
    return chosen


def pi_a(flags: DecoratedFlagTuple, a: Sequence[int], complement: Sequence[Sequence] | None = None) -> Configuration:
    """Next decoration vectors in V / (F_{0,a_0} + .. + F_{m,a_m}), as a configuration in Q^{q+1}.

    Quotient coordinates are taken along `complement` (default: the
    lexicographically first standard basis vectors that complete the subspace).
    """
    N = flags.N
    if len(a) != len(flags.flags) or any(x < 0 for x in a) or sum(a) > N - 1:
        raise ValueError("a must be a composition of N - (q+1) with q >= 0")
    span = [v for f, k in zip(flags.flags, a) for v in f.subspace(k)]
    if complement is None:
        complement = [tuple(Fraction(int(i == k)) for i in range(N)) for k in _complement(span, N)]
    basis = span + [_vector(v) for v in complement]
    if len(basis) != N or rank(basis) != N:
        raise GenericityError("complement does not complete the subspace")
    out = []
    for f, k in zip(flags.flags, a):
        coords = solve(basis, f.vectors[k])
        out.append(tuple(coords[len(span):]))
    return Configuration(tuple(out), N - len(span))


def c_m(flags: DecoratedFlagTuple) -> Chain:
    """Sum of pi_a over all hypersimplices Delta^{p,q}_a of the N-decomposition of Delta^m."""
    out = Chain()
    for h in hypersimplicial_decomposition(flags.m, flags.N):
        out.add(pi_a(flags, h.a))
    return out


def flag_differential(flags: DecoratedFlagTuple) -> list[tuple[int, DecoratedFlagTuple]]:
    return [((-1) ** i, flags.face(i)) for i in range(len(flags.flags))]


def random_flag_tuple(count: int, N: int, rng: random.Random, bound: int = 6) -> DecoratedFlagTuple:
    while True:
        try:
            flags = []
            for _ in range(count):
                vs = tuple(tuple(Fraction(rng.randint(-bound, bound)) for _ in range(N)) for _ in range(N))
                flags.append(DecoratedFlag(vs))
            return DecoratedFlagTuple(tuple(flags))
        except GenericityError:
            continue


def chain_map_residual(flags: DecoratedFlagTuple, p_sign: int = -1) -> Chain:
    """d(c_m(F)) - c_{m-1}(dF); the zero chain when c is a chain map."""
    lhs = bigrassmannian_differential(c_m(flags), p_sign)
    rhs = Chain()
    for s, face in flag_differential(flags):
        rhs = rhs + c_m(face).scale(s)
    return lhs - rhs.restrict(_in_bigrassmannian)


# ---------------------------------------------------------------- weight two: to the Bloch complex

def _minor(u, v) -> Fraction:
    return u[0] * v[1] - u[1] * v[0]


def l2_units(conf: Configuration, torsion: bool = True) -> WedgeOfUnits:
    """D12 ^ D23 + D23 ^ D13 + D13 ^ D12 for three vectors in Q^2."""
    if conf.dim != 2 or conf.size != 3:
        raise ValueError("l2 takes three vectors in dimension two")
    s1, s2, s3 = conf.vectors
    d12, d23, d13 = _minor(s1, s2), _minor(s2, s3), _minor(s1, s3)
    out = WedgeOfUnits.pair(d12, d23) + WedgeOfUnits.pair(d23, d13) + WedgeOfUnits.pair(d13, d12)
    return out if torsion else _drop_torsion(out)


def _drop_torsion(w: WedgeOfUnits) -> WedgeOfUnits:
    return WedgeOfUnits({k: v for k, v in w.terms.items() if -1 not in k})


def l1_point(conf: Configuration) -> Fraction:
    if conf.dim != 2 or conf.size != 4:
        raise ValueError("l1 takes four vectors in dimension two")
    return cross_ratio(*conf.vectors)


def bloch_projection(x: Chain, torsion: bool = True) -> tuple[dict, WedgeOfUnits]:
    """(B_2-part, Lambda^2-part): l_1 on C_4(2), -l_2 on C_3(2), every other bidegree to zero.

    The Plucker relation reads (1-r) ^ r = -sum_i (-1)^i l_2(faces), so with
    delta {x} = (1-x) ^ x the square commutes for -l_2.
    """
    points: dict = {}
    units = WedgeOfUnits()
    for c, v in x.terms.items():
        if c.dim != 2:
            continue
        if c.size == 4:
            r = l1_point(c)
            points[r] = points.get(r, 0) + v
        elif c.size == 3:
            units = units + l2_units(c, torsion).scale(-v)
    return {k: v for k, v in points.items() if v}, units


def _quotient(lj: Vector, v: Vector) -> Vector:
    k = next(i for i, x in enumerate(lj) if x != 0)
    t = v[k] / lj[k]
    w = tuple(a - t * b for a, b in zip(v, lj))
    return w[:k] + w[k + 1:]


def _kernel_vector(rows: Sequence[Sequence]) -> list[Fraction]:
    a, piv, _ = _echelon(rows)
    ncols = len(rows[0])
    free = next(c for c in range(ncols) if c not in piv)
    x = [Fraction(0)] * ncols
    x[free] = Fraction(1)
    for i in reversed(range(len(piv))):
        c = piv[i]
        x[c] = -sum(a[i][j] * x[j] for j in range(c + 1, ncols)) / a[i][c]
    return x


def conic_parameters(conf: Configuration) -> Configuration:
    """Five generic points of P^2 as five points of the conic through them,
    parametrized by lines through the first point (the tangent for the point itself)."""
    if conf.dim != 3 or conf.size != 5:
        raise ValueError("five vectors in dimension three needed")
    mons = [(0, 0), (1, 1), (2, 2), (0, 1), (0, 2), (1, 2)]
    rows = [[v[i] * v[j] for i, j in mons] for v in conf.vectors]
    coef = _kernel_vector(rows)
    x0 = conf.vectors[0]
    grad = [Fraction(0)] * 3
    for c, (i, j) in zip(coef, mons):
        grad[i] += c * x0[j]
        grad[j] += c * x0[i]
    # a vector of the tangent plane not proportional to x0
    cands = [tuple(Fraction(x) for x in e) for e in ((grad[1], -grad[0], 0), (grad[2], 0, -grad[0]), (0, grad[2], -grad[1]))]
    tangent = next(t for t in cands if rank([t, x0]) == 2)
    pts = [_quotient(x0, tangent)] + [_quotient(x0, v) for v in conf.vectors[1:]]
    return Configuration(tuple(pts), 2)


def five_term_relations(x: Chain) -> dict:
    """The explicit five-term element that l_1 of d x must equal.

    C_5(2) terms give the five-term relation of their points; C_5(3) terms,
    through p, the five-term relation of their conic parameters.
    """
    from .bloch import five_term
    out: dict = {}

    def acc(points, k):
        for r, c in five_term(*points).items():
            out[r] = out.get(r, 0) + k * c

    for c, v in x.terms.items():
        if c.size != 5:
            continue
        if c.dim == 2:
            acc(c.vectors, v)
        elif c.dim == 3:
            acc(conic_parameters(c).vectors, v)
    return out


def plucker_check(conf: Configuration, torsion: bool = True, sign: int = -1) -> bool:
    """(1-r) ^ r = sign * (l2(s2,s3,s4) - l2(s1,s3,s4) + l2(s1,s2,s4) - l2(s1,s2,s3))."""
    r = l1_point(conf)
    lhs = WedgeOfUnits.pair(1 - r, r)
    rhs = WedgeOfUnits()
    for i in range(4):
        rhs = rhs + l2_units(conf.face(i), torsion).scale(sign * (-1) ** i)
    if not torsion:
        lhs = _drop_torsion(lhs)
    return (lhs + rhs.scale(-1)).is_zero()


def bloch_chain_check(x: Chain, p_sign: int = -1, torsion: bool = False) -> dict:
    """Compare the Bloch image of d x with delta of the Bloch image of x.

    Exact in Lambda^2 Q* (x) Z[1/2]: l_2 o p on C_4(3) is 2-torsion, so the
    default drops pairs with -1.
    units: Lambda^2 end, exact.  relation: on the B_2 end the image of d x
    equals the explicit five-term element (with sign -p_sign on conic terms),
    exact.  relation_delta: delta of that B_2 image vanishes, exact.
    """
    dx = bigrassmannian_differential(x, p_sign)
    pts_x, _ = bloch_projection(x, torsion)
    pts_dx, units_dx = bloch_projection(dx, torsion)
    d_pts = delta(pts_x)
    if not torsion:
        d_pts = _drop_torsion(d_pts)
    units_ok = (units_dx + d_pts.scale(-1)).is_zero()
    expected: dict = {}
    for conf, v in x.terms.items():
        if conf.size == 5 and conf.dim in (2, 3):
            k = v if conf.dim == 2 else p_sign * v
            for r, c in five_term_relations(Chain.single(conf)).items():
                expected[r] = expected.get(r, 0) + k * c
    expected = {r: c for r, c in expected.items() if c}
    rel_delta = delta(pts_dx)
    if not torsion:
        rel_delta = _drop_torsion(rel_delta)
    return {"units": units_ok, "relation": pts_dx == expected, "relation_delta": rel_delta.is_zero()}
