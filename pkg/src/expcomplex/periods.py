"""Period matrices of framed Hodge-Tate structures and their big periods.

Matrix entries are Laurent polynomials over Q in named generators (`Poly`).
A generator stands for a transcendental quantity (a polylogarithm value, a
random complex number, ...) whose numeric value lives in the matrix's
valuation `env`; the generator "T" is 2 pi i.  Computing with polynomials
keeps every algebraic identity exact: tensors in C (x)_Q C are expanded over
monomials, which we treat as Q-linearly independent.
"""
from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Mapping, Sequence

import numpy as np

from .multival import TWO_PI_I, BranchState, extend
from .wedge import (Atom, FormalSum, Lin, ShapeError, exp_lin, one, symbol,
                    two_pi_i)

__all__ = [
    "Poly", "PeriodMatrix", "FramedMatrix", "PolyTensor",
    "period_tensor", "big_period_prime", "big_period", "coproduct",
    "cobar_d", "P_n_k", "P_n_k_family", "griffiths_check", "de1_check", "omega_compose_check",
    "lie_l", "expand_products", "combination_period", "lie_period",
    "polylog_matrix", "dilog_matrix", "anti_transpose", "log_series_check",
    "random_period_matrix", "period_chain_residual", "rational_splitting", "splitting_invariance", "multiplicativity",
]

TWOPI_GEN = "T"


# ---------------------------------------------------------------- polynomials

def _mono_mul(a: tuple, b: tuple) -> tuple:
    if not a:
        return b
    if not b:
        return a
    d = dict(a)
    for g, e in b:
        d[g] = d.get(g, 0) + e
    return tuple(sorted((g, e) for g, e in d.items() if e))


def _mono_str(m: tuple) -> str:
    if not m:
        return "1"
    return "·".join(g if e == 1 else f"{g}^{e}" for g, e in m)


def _mono_value(m: tuple, env: Mapping[str, complex]) -> complex:
    v = 1 + 0j
    for g, e in m:
        v *= (TWO_PI_I if g == TWOPI_GEN else env[g]) ** e
    return v


class Poly:
    """Laurent polynomial over Q; immutable."""
    __slots__ = ("terms",)

    def __init__(self, terms: Mapping[tuple, Fraction] | None = None):
        self.terms = {m: Fraction(c) for m, c in (terms or {}).items() if c}

    @classmethod
    def const(cls, c) -> "Poly":
        return cls({(): Fraction(c)})

    @classmethod
    def gen(cls, name: str, power: int = 1) -> "Poly":
        return cls({((name, power),): Fraction(1)} if power else {(): Fraction(1)})

    @staticmethod
    def coerce(x) -> "Poly":
        if isinstance(x, Poly):
            return x
        if isinstance(x, (int, Fraction)):
            return Poly.const(x)
        if isinstance(x, str):
            return Poly.const(Fraction(x))
        raise TypeError(f"cannot make a polynomial from {x!r}")

    def __add__(self, other):
        other = Poly.coerce(other)
        d = dict(self.terms)
        for m, c in other.terms.items():
            d[m] = d.get(m, 0) + c
        return Poly(d)

    __radd__ = __add__

    def __neg__(self):
        return Poly({m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-Poly.coerce(other))

    def __rsub__(self, other):
        return Poly.coerce(other) - self

    def __mul__(self, other):
        other = Poly.coerce(other)
        d: dict = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = _mono_mul(m1, m2)
                d[m] = d.get(m, 0) + c1 * c2
        return Poly(d)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        out = Poly.const(1)
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, other):
        try:
            return self.terms == Poly.coerce(other).terms
        except TypeError:
            return NotImplemented

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def is_zero(self) -> bool:
        return not self.terms

    def is_const(self) -> bool:
        return all(m == () for m in self.terms)

    def value(self, env: Mapping[str, complex]) -> complex:
        return sum((float(c) * _mono_value(m, env) for m, c in self.terms.items()), 0j)

    def generators(self) -> set:
        return {g for m in self.terms for g, _ in m}

    def __repr__(self):
        if not self.terms:
            return "0"
        return " + ".join(f"{c}·{_mono_str(m)}" if m else f"{c}" for m, c in sorted(self.terms.items()))


def _monomial_atom(m: tuple, env: Mapping[str, complex]) -> Atom:
    if not m:
        return one()
    if m == ((TWOPI_GEN, 1),):
        return two_pi_i(1)
    return symbol(_mono_str(m), _mono_value(m, env))


# ---------------------------------------------------------------- matrices

class PeriodMatrix:
    """Unipotent lower-triangular period matrix with weight labels.

    weights[i] <= 0 are nonincreasing even integers (index i spans a copy of
    Q(-weights[i]/2)); entries within one weight block form the identity.
    """

    def __init__(self, entries, weights: Sequence[int], env: Mapping[str, complex] | None = None,
                 name: str = "M", factors: tuple | None = None):
        rows = [[Poly.coerce(x) for x in row] for row in entries]
        r = len(rows)
        if any(len(row) != r for row in rows):
            raise ShapeError("period matrix must be square")
        if len(weights) != r:
            raise ShapeError("one weight label per index")
        if any(w > 0 or w % 2 for w in weights) or any(a < b for a, b in zip(weights, weights[1:])):
            raise ShapeError("weights must be nonincreasing even integers <= 0")
        for i in range(r):
            for j in range(r):
                e = rows[i][j]
                if i == j and e != 1:
                    raise ShapeError("diagonal must be 1")
                if j > i and not e.is_zero():
                    raise ShapeError("matrix must be lower triangular")
                if i != j and weights[i] == weights[j] and not e.is_zero():
                    raise ShapeError("weight blocks must be identity blocks")
        self.entries = tuple(tuple(row) for row in rows)
        self.weights = tuple(weights)
        self.env = dict(env or {})
        self.name = name
        self.factors = factors
        missing = set().union(*(e.generators() for row in rows for e in row)) - set(self.env) - {TWOPI_GEN}
        if missing:
            raise ShapeError(f"no numeric value for generators {sorted(missing)}")
        self._inv = None

    @property
    def size(self) -> int:
        return len(self.entries)

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i][j]

    def inverse(self) -> "PeriodMatrix":
        if self._inv is None:
            r = self.size
            inv = [[Poly.const(int(i == j)) for j in range(r)] for i in range(r)]
            for i in range(r):
                for j in range(i):
                    acc = Poly()
                    for k in range(j, i):
                        if not self.entries[i][k].is_zero() and not inv[k][j].is_zero():
                            acc = acc + self.entries[i][k] * inv[k][j]
                    inv[i][j] = -acc
            self._inv = PeriodMatrix(inv, self.weights, self.env, self.name + "⁻¹")
        return self._inv

    def matmul(self, other: "PeriodMatrix", name: str | None = None) -> "PeriodMatrix":
        if self.weights != other.weights:
            raise ShapeError("weight labels differ")
        r = self.size
        out = [[sum((self.entries[i][k] * other.entries[k][j] for k in range(j, i + 1)), Poly())
                for j in range(r)] for i in range(r)]
        return PeriodMatrix(out, self.weights, {**self.env, **other.env}, name or f"{self.name}·{other.name}")

    def kron(self, other: "PeriodMatrix") -> "PeriodMatrix":
        """Tensor product, with indices ordered so weights stay nonincreasing."""
        pairs = sorted(itertools.product(range(self.size), range(other.size)),
                       key=lambda p: (-(self.weights[p[0]] + other.weights[p[1]]), p))
        entries = [[self.entries[a][b] * other.entries[a2][b2] for (b, b2) in pairs] for (a, a2) in pairs]
        weights = [self.weights[a] + other.weights[a2] for a, a2 in pairs]
        return PeriodMatrix(entries, weights, {**self.env, **other.env}, f"({self.name}⊗{other.name})",
                            factors=(self, other, tuple(pairs)))

    def numeric(self) -> np.ndarray:
        return np.array([[e.value(self.env) for e in row] for row in self.entries], dtype=complex)

    def to_json(self) -> dict:
        def enc(e: Poly):
            if e.is_const():
                return str(e.terms.get((), Fraction(0)))
            v = e.value(self.env)
            return [v.real, v.imag]
        return {"weights": list(self.weights), "entries": [[enc(e) for e in row] for row in self.entries]}

    @classmethod
    def from_json(cls, d: dict, name: str = "M") -> "PeriodMatrix":
        env, rows = {}, []
        for i, row in enumerate(d["entries"]):
            out = []
            for j, e in enumerate(row):
                if isinstance(e, (str, int)):
                    out.append(Poly.const(Fraction(e)))
                else:
                    if isinstance(e, dict):
                        g, v = e["germ"], complex(*e["value"])
                    else:
                        g, v = f"{name}_{i}_{j}", complex(*e)
                    env[g] = v
                    out.append(Poly.gen(g))
            rows.append(out)
        return cls(rows, d["weights"], env, name)

    def __repr__(self):
        return f"PeriodMatrix({self.name}, weights={self.weights})"


def anti_transpose(M: PeriodMatrix) -> PeriodMatrix:
    """M'[i][j] = M[r-1-j][r-1-i], with weights relabelled so M' is again lower triangular."""
    r = M.size
    top = M.weights[-1]
    weights = [top - M.weights[r - 1 - i] for i in range(r)]
    entries = [[M.entries[r - 1 - j][r - 1 - i] for j in range(r)] for i in range(r)]
    return PeriodMatrix(entries, weights, M.env, M.name + "ᵗ")


@dataclass(frozen=True)
class FramedMatrix:
    """A framing of a period matrix: the row index of f^n and the column index of v_0."""
    matrix: PeriodMatrix = field(compare=False, hash=False)
    row: int
    col: int
    mid: int = field(init=False, default=0)

    def __post_init__(self):
        object.__setattr__(self, "mid", id(self.matrix))
        if not (0 <= self.col <= self.row < self.matrix.size):
            raise ShapeError("frame indices out of range")

    @property
    def weight(self) -> int:
        return (self.matrix.weights[self.col] - self.matrix.weights[self.row]) // 2

    def period(self) -> Poly:
        return self.matrix[self.row, self.col]

    def sort_key(self):
        return (self.matrix.name, self.mid, self.row, self.col)

    def __repr__(self):
        return f"⟨{self.row}|{self.matrix.name}|{self.col}⟩"


def top_frame(M: PeriodMatrix) -> FramedMatrix:
    return FramedMatrix(M, M.size - 1, 0)


# ---------------------------------------------------------------- tensors over monomials

class PolyTensor:
    """Element of the k-fold tensor power of Q[generators], keyed by monomial tuples."""
    __slots__ = ("arity", "terms")

    def __init__(self, arity: int, terms: Mapping[tuple, Fraction] | None = None):
        self.arity = arity
        self.terms = {k: Fraction(c) for k, c in (terms or {}).items() if c}

    @classmethod
    def from_polys(cls, *polys: Poly, coeff=1) -> "PolyTensor":
        d: dict = {}
        for combo in itertools.product(*(p.terms.items() for p in polys)):
            key = tuple(m for m, _ in combo)
            c = Fraction(coeff)
            for _, ci in combo:
                c *= ci
            d[key] = d.get(key, 0) + c
        return cls(len(polys), d)

    def __add__(self, other: "PolyTensor") -> "PolyTensor":
        if self.arity != other.arity:
            raise ShapeError("arity mismatch")
        d = dict(self.terms)
        for k, c in other.terms.items():
            d[k] = d.get(k, 0) + c
        return PolyTensor(self.arity, d)

    def scale(self, q) -> "PolyTensor":
        return PolyTensor(self.arity, {k: c * Fraction(q) for k, c in self.terms.items()})

    def __neg__(self):
        return self.scale(-1)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other: "PolyTensor") -> "PolyTensor":
        """Slotwise product in the tensor-power algebra."""
        if self.arity != other.arity:
            raise ShapeError("arity mismatch")
        d: dict = {}
        for k1, c1 in self.terms.items():
            for k2, c2 in other.terms.items():
                k = tuple(_mono_mul(a, b) for a, b in zip(k1, k2))
                d[k] = d.get(k, 0) + c1 * c2
        return PolyTensor(self.arity, d)

    def concat(self, other: "PolyTensor") -> "PolyTensor":
        """(a_0 x .. x a_k) * (b_0 x .. x b_l) = a_0 x .. x a_k b_0 x .. x b_l."""
        d: dict = {}
        for k1, c1 in self.terms.items():
            for k2, c2 in other.terms.items():
                k = k1[:-1] + (_mono_mul(k1[-1], k2[0]),) + k2[1:]
                d[k] = d.get(k, 0) + c1 * c2
        return PolyTensor(self.arity + other.arity - 1, d)

    def swap(self) -> "PolyTensor":
        return PolyTensor(self.arity, {k[::-1]: c for k, c in self.terms.items()})

    def is_zero(self) -> bool:
        return not self.terms

    def value(self, env) -> np.ndarray:
        """Numeric image under the multiplication map (for spot checks)."""
        return sum(float(c) * math.prod(_mono_value(m, env) for m in k) for k, c in self.terms.items())

    def formal(self, env: Mapping[str, complex], symmetry: str = "tensor", twist: int = 0) -> FormalSum:
        rows = [(c, [_monomial_atom(m, env) for m in k]) for k, c in self.terms.items()]
        if not rows:
            return FormalSum.zero(self.arity, symmetry, twist)
        return FormalSum.build(symmetry, twist, rows, self.arity)

    def __eq__(self, other):
        return isinstance(other, PolyTensor) and self.arity == other.arity and self.terms == other.terms

    def __repr__(self):
        if not self.terms:
            return "0"
        return " + ".join(f"{c}·" + "⊗".join(_mono_str(m) for m in k) for k, c in sorted(self.terms.items()))


# ---------------------------------------------------------------- big period

def period_tensor(F: FramedMatrix) -> PolyTensor:
    """sum_k <f|M|v_k> (x) <f^k|M^-1|v_0> over all indices k, exactly."""
    M, inv = F.matrix, F.matrix.inverse()
    out = PolyTensor(2)
    for k in range(F.col, F.row + 1):
        a, b = M[F.row, k], inv[k, F.col]
        if not a.is_zero() and not b.is_zero():
            out = out + PolyTensor.from_polys(a, b)
    return out


def big_period_prime(F: FramedMatrix) -> FormalSum:
    """P'(F) in C (x)_Q C; monomials become exact symbol atoms."""
    return period_tensor(F).formal(F.matrix.env)


def _exp_slots(t: PolyTensor, k: int, env, twist: int) -> FormalSum:
    """exp(2 pi i .) on the first k slots and 2 pi i . on the last one."""
    T = ((TWOPI_GEN, 1),)
    rows = []
    for key, c in t.terms.items():
        slots = [exp_lin(Lin([(1, _monomial_atom(_mono_mul(m, T), env))])) for m in key[:k]]
        slots.append(_monomial_atom(_mono_mul(key[k], T), env))
        rows.append((c, slots))
    if not rows:
        return FormalSum.zero(k + 1, "tensor", twist)
    return FormalSum.build("tensor", twist, rows, k + 1)


def big_period(F: FramedMatrix) -> FormalSum:
    """P(F) = exp(2 pi i a) (x) 2 pi i b, twist n-2: an element of O* (x) O(n-2)."""
    return _exp_slots(period_tensor(F), 1, F.matrix.env, F.weight - 2)


# ---------------------------------------------------------------- coproduct and cobar complex

Word = tuple  # of FramedMatrix
Chain = dict  # Word -> Fraction


def coproduct(F: FramedMatrix) -> list[tuple[FramedMatrix, FramedMatrix]]:
    """Reduced coproduct in coordinate bases: (f, i) (x) (i, v) over strictly intermediate weights."""
    w = F.matrix.weights
    return [(FramedMatrix(F.matrix, F.row, i), FramedMatrix(F.matrix, i, F.col))
            for i in range(F.col, F.row + 1) if w[F.row] < w[i] < w[F.col]]


def _add(chain: Chain, word: Word, c) -> None:
    key = tuple(word)
    v = chain.get(key, 0) + c
    if v:
        chain[key] = v
    else:
        chain.pop(key, None)


def cobar_d(chain: Chain | Word) -> Chain:
    """D(a_1 .. a_k) = sum_i (-1)^i a_1 .. D'(a_i) .. a_k."""
    if isinstance(chain, tuple):
        chain = {chain: Fraction(1)}
    out: Chain = {}
    for word, c in chain.items():
        for i, a in enumerate(word, start=1):
            for left, right in coproduct(a):
                _add(out, word[:i - 1] + (left, right) + word[i:], c * (-1) ** i)
    return out


def P_n_k(word: Word, n: int | None = None) -> FormalSum:
    """The map on k-fold words: Exp on the first k slots of P'(H_1)*..*P'(H_k), 2 pi i on the last.

    Lands in (O*)^k (x) O with twist n-k-1; for k = n the last slot is the
    constant 2 pi i, which cancels the twist -1, giving the units
    exp(2 pi i p(H_1)) (x) .. (x) exp(2 pi i p(H_n)).
    """
    k = len(word)
    weight = sum(F.weight for F in word)
    if n is None:
        n = weight
    if weight != n or any(F.weight <= 0 for F in word):
        raise ShapeError(f"word of weight {weight} does not fit weight {n}")
    env: dict = {}
    for F in word:
        env.update(F.matrix.env)
    t = period_tensor(word[0])
    for F in word[1:]:
        t = t.concat(period_tensor(F))
    out = _exp_slots(t, k, env, n - k - 1)
    if k < n:
        return out
    rows = []
    for c, sl in out.normalize().terms:
        last = sl[-1]
        if last.kind != "twopi":
            raise ShapeError("top-degree word left a non-constant last slot")
        rows.append((c, sl[:-1]))
    return FormalSum.build("tensor", 0, rows, k) if rows else FormalSum.zero(k, "tensor", 0)


def P_n_k_chain(chain: Chain, n: int) -> FormalSum:
    total = None
    for word, c in chain.items():
        s = P_n_k(word, n).scale(c)
        total = s if total is None else total + s
    return total


def P_n_k_family(make_word: Callable[[complex], Word], n: int) -> Callable[[np.ndarray], FormalSum]:
    """Parametrized P_n^k over the real coordinates (x, y) of z = x + iy."""
    return lambda p: P_n_k(make_word(complex(p[0], p[1])), n)


# ---------------------------------------------------------------- Lie map

def _frame_chains(F: FramedMatrix, p: int):
    """Index chains row = i_0 > i_1 > .. > i_p = col with strictly increasing weights."""
    w = F.matrix.weights
    mids = [i for i in range(F.col + 1, F.row) if w[F.row] < w[i] < w[F.col]]
    for combo in itertools.combinations(mids, p - 1):
        chain = (F.row,) + tuple(sorted(combo, reverse=True)) + (F.col,)
        if all(w[a] < w[b] for a, b in zip(chain, chain[1:])):
            yield chain


def lie_l(F: FramedMatrix) -> Chain:
    """l(F) = sum_{p>=1} (-1)^p / p  mu^(p) D'^(p) (F), using reduced coproducts.

    Products are commutative, so a term is a sorted tuple of frames.  The sum
    stops at p = weight: a p-fold reduced coproduct needs p positive weights.
    """
    out: Chain = {}
    for p in range(1, F.weight + 1):
        for chain in _frame_chains(F, p):
            factors = sorted((FramedMatrix(F.matrix, a, b) for a, b in zip(chain, chain[1:])),
                             key=FramedMatrix.sort_key)
            _add(out, tuple(factors), Fraction((-1) ** p, p))
    return out


def expand_products(chain: Chain) -> Chain:
    """Rewrite frames of tensor-product matrices as products of frames of the factors."""
    out: Chain = {}
    for word, c in chain.items():
        pieces: list = []
        zero = False
        for F in word:
            fac = F.matrix.factors
            if fac is None:
                pieces.append(F)
                continue
            A, B, pairs = fac
            (a, a2), (b, b2) = pairs[F.row], pairs[F.col]
            for G, r, s in ((A, a, b), (B, a2, b2)):
                if r == s:
                    continue
                if r < s or G.weights[r] == G.weights[s]:
                    zero = True
                    break
                pieces.append(FramedMatrix(G, r, s))
        if not zero:
            _add(out, tuple(sorted(pieces, key=FramedMatrix.sort_key)), c)
    return out


def combination_period(chain: Chain) -> Poly:
    total = Poly()
    for word, c in chain.items():
        term = Poly.const(c)
        for F in word:
            term = term * F.period()
        total = total + term
    return total


def lie_period(F: FramedMatrix) -> PolyTensor:
    """P' o l: products of frames go to products in the tensor-square algebra."""
    total = PolyTensor(2)
    for word, c in lie_l(F).items():
        term = PolyTensor.from_polys(Poly.const(1), Poly.const(1))
        for G in word:
            term = term * period_tensor(G)
        total = total + term.scale(c)
    return total


def log_series_check(order: int = 10) -> bool:
    """S(x)(e^x - 1) = x through the given order, with S = sum_p (-1)^(p-1)/p (e^x-1)^(p-1)."""
    N = order + 1
    em1 = [Fraction(0)] + [Fraction(1, math.factorial(j)) for j in range(1, N + 1)]

    def mul(a, b):
        c = [Fraction(0)] * (N + 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b[:N + 1 - i]):
                    c[i + j] += x * y
        return c

    S = [Fraction(0)] * (N + 1)
    power = [Fraction(1)] + [Fraction(0)] * N
    for p in range(1, N + 2):
        S = [s + Fraction((-1) ** (p - 1), p) * q for s, q in zip(S, power)]
        power = mul(power, em1)
    prod = mul(S, em1)
    return prod[:N + 1] == [Fraction(0), Fraction(1)] + [Fraction(0)] * (N - 1)


# ---------------------------------------------------------------- polylog matrix

def polylog_matrix(n: int, state: BranchState | None = None, env: Mapping[str, complex] | None = None) -> PeriodMatrix:
    """Normalized period matrix of Li_n: first column -Li_k/(2 pi i)^k, then log^j z / (j! (2 pi i)^j)."""
    if state is not None:
        if state.depth < n:
            raise ShapeError("branch state too shallow")
        env = {"log": state.log_z, **{f"Li{k}": state.Li(k) for k in range(1, n + 1)}}
    if env is None:
        raise ShapeError("need a branch state or a valuation")
    rows = []
    for i in range(n + 1):
        row = []
        for j in range(n + 1):
            if j > i:
                row.append(Poly())
            elif j == i:
                row.append(Poly.const(1))
            elif j == 0:
                row.append(-Poly.gen(f"Li{i}") * Poly.gen(TWOPI_GEN, -i))
            else:
                s = i - j
                row.append(Fraction(1, math.factorial(s)) * Poly.gen("log", s) * Poly.gen(TWOPI_GEN, -s))
        rows.append(row)
    return PeriodMatrix(rows, [-2 * i for i in range(n + 1)], env, f"Li{n}")


def dilog_matrix(state: BranchState) -> PeriodMatrix:
    return polylog_matrix(2, state)


def _polylog_numeric(n: int, state: BranchState) -> np.ndarray:
    return polylog_matrix(n, state).numeric()


# ---------------------------------------------------------------- Griffiths transversality

def _jet(variation: Callable[[complex], np.ndarray], z: complex, h: float):
    """Matrix and its complex derivative by a Richardson-improved central difference."""
    f = variation
    d1 = (f(z + h) - f(z - h)) / (2 * h)
    d2 = (f(z + h / 2) - f(z - h / 2)) / h
    return f(z), (4 * d2 - d1) / 3


def griffiths_check(variation: Callable[[complex], np.ndarray], weights: Sequence[int],
                    samples: Iterable[complex], side: str = "right", h: float = 1e-4) -> float:
    """Largest entry of the connection form at weight distance > 1.

    side="left" uses M^-1 dM, side="right" uses dM M^-1.
    """
    worst = 0.0
    w = list(weights)
    for z in samples:
        M, dM = _jet(variation, z, h)
        Minv = np.linalg.inv(M)
        A = Minv @ dM if side == "left" else dM @ Minv
        for i in range(len(w)):
            for j in range(len(w)):
                if (w[j] - w[i]) // 2 > 1:
                    worst = max(worst, abs(A[i, j]))
    return worst


def de1_check(variation: Callable[[complex], np.ndarray], weights: Sequence[int],
              samples: Iterable[complex], form: str = "right", h: float = 1e-4) -> float:
    """Residual of the top-entry differential equation.

    form="right":   d M[f][v] = sum_i dM[f][i] M[i][v]
    form="literal": d M[f][v] = sum_i M[f][i] dM[i][v]
    with i running over the block next to f (weight one above).
    """
    w = list(weights)
    f, v = len(w) - 1, 0
    nxt = [i for i in range(len(w)) if w[i] == w[f] + 2]
    worst = 0.0
    for z in samples:
        M, dM = _jet(variation, z, h)
        if form == "right":
            rhs = sum(dM[f, i] * M[i, v] for i in nxt)
        else:
            rhs = sum(M[f, i] * dM[i, v] for i in nxt)
        worst = max(worst, abs(dM[f, v] - rhs))
    return worst


def polylog_variation(n: int, state: BranchState, transpose: bool = False) -> Callable[[complex], np.ndarray]:
    """z near state.z -> numeric polylog matrix on the branch continued from the state."""
    def f(z: complex) -> np.ndarray:
        M = polylog_matrix(n, extend(state, [z]))
        return (anti_transpose(M) if transpose else M).numeric()
    return f


def omega_compose_check(make_word: Callable[[complex], Word], n: int, samples: Iterable[complex],
                        h: float = 1e-4) -> float:
    """max |Omega^(k) o P_n^k| over sample points, for words of length k < n."""
    from .wedge import omega_tensor
    worst = 0.0
    for z in samples:
        k = len(make_word(z))
        if k >= n:
            raise ShapeError("the composition vanishes only below top degree")
        form = omega_tensor(P_n_k_family(make_word, n), n, k, h)
        p = np.array([z.real, z.imag])
        vecs = [np.array([1.0, 0.0]), np.array([0.0, 1.0])]
        for combo in itertools.combinations(vecs, k):
            worst = max(worst, abs(form(p, list(combo))))
    return worst


# ---------------------------------------------------------------- random structures

def _random_weights(size: int, rng: random.Random) -> list[int]:
    w, cur = [0], 0
    for _ in range(size - 1):
        cur -= 2 * rng.choice((0, 1, 1, 1))
        w.append(cur)
    return w


def random_period_matrix(size: int, rng: random.Random, name: str = "M") -> PeriodMatrix:
    """Unipotent matrix with an independent generator in every off-block slot."""
    w = _random_weights(size, rng)
    env, rows = {}, []
    for i in range(size):
        row = []
        for j in range(size):
            if i == j:
                row.append(Poly.const(1))
            elif j < i and w[i] != w[j]:
                g = f"{name}{i}{j}"
                env[g] = complex(rng.uniform(-1, 1), rng.uniform(-1, 1))
                row.append(Poly.gen(g))
            else:
                row.append(Poly())
        rows.append(row)
    return PeriodMatrix(rows, w, env, name)


def rational_splitting(weights: Sequence[int], rng: random.Random, bound: int = 5) -> PeriodMatrix:
    """Random rational change of splitting compatible with the weight filtration."""
    r = len(weights)
    rows = [[Poly.const(int(i == j)) if (i == j or j > i or weights[i] == weights[j])
             else Poly.const(Fraction(rng.randint(-bound, bound), rng.randint(1, bound)))
             for j in range(r)] for i in range(r)]
    return PeriodMatrix(rows, weights, {}, "S")


def splitting_invariance(M: PeriodMatrix, rng: random.Random) -> bool:
    """P' of the top frame is unchanged by M -> M S for rational S."""
    S = rational_splitting(M.weights, rng)
    return period_tensor(top_frame(M.matmul(S))) == period_tensor(top_frame(M))


def multiplicativity(M: PeriodMatrix, N: PeriodMatrix) -> bool:
    """P' of the tensor product is the product of the P' in C (x) C."""
    return period_tensor(top_frame(M.kron(N))) == period_tensor(top_frame(M)) * period_tensor(top_frame(N))


def period_chain_residual(F: FramedMatrix) -> int:
    """Surviving normal-form terms of P(D w) - (-1)^(k+1) d P(w), summed over all words below F."""
    from .wedge import exp_differential
    n = F.weight
    words: Chain = {(F,): 1}
    bad = 0
    for k in range(1, n):
        for w in words:
            lhs = P_n_k_chain(cobar_d(w), n)
            rhs = exp_differential(P_n_k(w, n), n, k + 1).scale((-1) ** (k + 1))
            bad += len((lhs - rhs).normalize())
        nxt: Chain = {}
        for w in words:
            for w2 in cobar_d(w):
                nxt[w2] = 1
        words = nxt
    return bad
