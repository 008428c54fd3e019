"""The Bloch complex, five-term relations and polylogarithmic ladder maps.

Exact side: points of P^1(Q), cross-ratios, and Lambda^2 Q* kept as exponent
vectors over -1 and the primes.

Analytic side: p_2 on branch-tracked points, and the maps l_n^k (n <= 4)
from B_m (x) Lambda^{n-m} C* into the Lie-exponential complexes.  The ladder
maps are built from polynomial slots in the generators

    Li2..Li4 (Li_k(x)),  l1x (log(1-x) = -Li_1(x)),  lx (log x),
    ly1, ly2 (log y_j),  T (2 pi i)

so that the square identities are exact polynomial identities; numbers only
enter when the maps are evaluated or exponentiated.
"""
from __future__ import annotations

import cmath
import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

import mpmath
import numpy as np

from .multival import TWO_PI_I, BranchState, beta, extend
from .periods import Poly, _monomial_atom
from .wedge import (FormalSum, Lin, ShapeError, exp_atom, exp_lin, germ, normalize,
                    omega_wedge, two_pi_i, unit)

__all__ = [
    "WedgeOfUnits", "factor_rational", "delta", "cross_ratio", "five_term",
    "BlochPoint", "p2", "p2_sum", "five_term_points",
    "PolyWedge", "L_poly", "ladder", "ladder_env", "ladder_delta", "ladder_square",
    "ladder_omega_residual", "monodromy_substitution", "branch_shift", "monodromy_of_L",
    "L2_bold", "l_n_top", "L3_bold", "l3_2", "L4_bold", "l4_2", "l4_3",
    "unit_residual", "RDeligneCochain", "r_deligne_map", "r_deligne_residual",
]


# ---------------------------------------------------------------- exact Lambda^2 Q*

def factor_rational(q) -> dict:
    """Exponent vector of a nonzero rational over -1 (mod 2) and the primes."""
    q = Fraction(q)
    if q == 0:
        raise ValueError("0 is not a unit")
    out: dict = {}
    if q < 0:
        out[-1] = 1
        q = -q
    for n, sign in ((q.numerator, 1), (q.denominator, -1)):
        p = 2
        while p * p <= n:
            while n % p == 0:
                out[p] = out.get(p, 0) + sign
                n //= p
            p += 1
        if n > 1:
            out[n] = out.get(n, 0) + sign
    return {k: v for k, v in out.items() if v}


class WedgeOfUnits:
    """Element of Lambda^2 Q*: integer coefficients on pairs a < b of generators.

    Pairs involving -1 are 2-torsion and are kept mod 2; (-1)^(-1) is zero.
    """

    def __init__(self, terms: Mapping[tuple, int] | None = None):
        self.terms: dict = {}
        for k, v in (terms or {}).items():
            self._acc(k, v)

    def _acc(self, pair, v):
        a, b = pair
        if a == b:
            return
        if a > b:
            a, b, v = b, a, -v
        v = self.terms.get((a, b), 0) + v
        if a == -1:
            v %= 2
        if v:
            self.terms[(a, b)] = v
        else:
            self.terms.pop((a, b), None)

    @classmethod
    def pair(cls, u, v) -> "WedgeOfUnits":
        fu, fv = factor_rational(u), factor_rational(v)
        out = cls()
        for a, x in fu.items():
            for b, y in fv.items():
                out._acc((a, b), x * y)
        return out

    def __add__(self, other: "WedgeOfUnits") -> "WedgeOfUnits":
        out = WedgeOfUnits(self.terms)
        for k, v in other.terms.items():
            out._acc(k, v)
        return out

    def scale(self, c: int) -> "WedgeOfUnits":
        out = WedgeOfUnits()
        for k, v in self.terms.items():
            out._acc(k, v * c)
        return out

    def is_zero(self) -> bool:
        return not self.terms

    def __repr__(self):
        return " + ".join(f"{v}·({a}∧{b})" for (a, b), v in sorted(self.terms.items())) or "0"


def delta(points: Mapping) -> WedgeOfUnits:
    """delta: sum c {x}_2 -> sum c (1-x) ^ x."""
    out = WedgeOfUnits()
    for x, c in points.items():
        x = Fraction(x)
        if x in (0, 1):
            continue
        out = out + WedgeOfUnits.pair(1 - x, x).scale(c)
    return out


def _vec(p):
    if isinstance(p, (tuple, list)):
        return tuple(p)
    if p is None or p == "inf":
        return (Fraction(1), Fraction(0))
    return (Fraction(p) if not isinstance(p, complex) else p, Fraction(1))


def _det(a, b):
    return a[0] * b[1] - a[1] * b[0]


def cross_ratio(s1, s2, s3, s4):
    """r = D(s1,s4) D(s2,s3) / (D(s1,s3) D(s2,s4)) for vectors in F^2."""
    s1, s2, s3, s4 = (_vec(s) for s in (s1, s2, s3, s4))
    d13, d24 = _det(s1, s3), _det(s2, s4)
    if d13 == 0 or d24 == 0 or _det(s1, s4) == 0 or _det(s2, s3) == 0:
        raise ValueError("degenerate configuration: proportional vectors")
    return _det(s1, s4) * _det(s2, s3) / (d13 * d24)


def five_term(*points) -> dict:
    """sum_i (-1)^i {r(x_0, .., ^x_i, .., x_4)}_2 for five distinct points of P^1."""
    if len(points) != 5:
        raise ValueError("five points needed")
    vs = [_vec(p) for p in points]
    for a, b in itertools.combinations(vs, 2):
        if _det(a, b) == 0:
            raise ValueError("points must be distinct")
    out: dict = {}
    for i in range(5):
        r = cross_ratio(*(vs[:i] + vs[i + 1:]))
        out[r] = out.get(r, 0) + (-1) ** i
    return {k: v for k, v in out.items() if v}


# ---------------------------------------------------------------- p_2

@dataclass(frozen=True)
class BlochPoint:
    """A point x with chosen branches: log x and log(1-x) as linear slots, Li_2(x) on that branch."""
    x: complex
    log_x: Lin
    log_1mx: Lin
    li2: complex

    @classmethod
    def from_state(cls, s: BranchState) -> "BlochPoint":
        lx = Lin([(1, germ(cmath.log(s.z), "log x"))])
        l1 = Lin([(1, germ(cmath.log(1 - s.z), "log(1-x)"))])
        if s.w0:
            lx = lx + Lin([(s.w0, two_pi_i(1))])
        if s.w1:
            l1 = l1 + Lin([(s.w1, two_pi_i(1))])
        return cls(s.z, lx, l1, s.Li(2))


def p2(pt: BlochPoint) -> FormalSum:
    """1/2 log(1-x) ^ log x + 2 pi i ^ (1/2 pi i) L_2(x), with the (2 pi i)^2/24 summand exact."""
    lx, l1 = pt.log_x.value, pt.log_1mx.value
    body = (pt.li2 + 0.5 * l1 * lx) / TWO_PI_I
    inner = Lin([(1, germ(body, "L2/2πi")), (Fraction(1, 24), two_pi_i(1))])
    return (FormalSum.build("wedge", 0, [(Fraction(1, 2), [pt.log_1mx, pt.log_x])], 2)
            + FormalSum.build("wedge", 0, [(1, [two_pi_i(1), inner])], 2))


def p2_sum(points: Sequence[tuple]) -> FormalSum:
    out = FormalSum.zero(2)
    for c, pt in points:
        out = out + p2(pt).scale(c)
    return out


def five_term_points(ts: Sequence[float]) -> list[tuple[int, BlochPoint]]:
    """Five-term element for real t_0 < .. < t_4 as branch-explicit points.

    Every minor D_jk = t_k - t_j is positive, so log r and log(1-r) are exact
    integer combinations of the atoms log D_jk and all cross-ratios lie in (0,1).
    """
    ts = list(ts)
    if any(a >= b for a, b in zip(ts, ts[1:])):
        raise ValueError("points must be strictly increasing")
    logd = {(j, k): germ(math.log(ts[k] - ts[j]), f"logΔ{j}{k}") for j in range(5) for k in range(j + 1, 5)}

    def L(pairs):
        return Lin([(s, logd[p]) for s, p in pairs])

    out = []
    for i in range(5):
        a, b, c, d = [j for j in range(5) if j != i]
        x = (ts[d] - ts[a]) * (ts[c] - ts[b]) / ((ts[c] - ts[a]) * (ts[d] - ts[b]))
        lx = L([(1, (a, d)), (1, (b, c)), (-1, (a, c)), (-1, (b, d))])
        l1 = L([(1, (a, b)), (1, (c, d)), (-1, (a, c)), (-1, (b, d))])
        li2 = complex(mpmath.polylog(2, x))
        out.append(((-1) ** i, BlochPoint(complex(x), lx, l1, li2)))
    return out


# ---------------------------------------------------------------- polynomial wedges

T = Poly.gen("T")
T_INV = Poly.gen("T", -1)


class PolyWedge:
    """Sum of coeff * (p_1 ^ .. ^ p_k) with polynomial slots, times (2 pi i)^twist."""

    def __init__(self, terms, twist: int = 0, arity: int | None = None):
        self.terms = [(Fraction(c), tuple(Poly.coerce(s) for s in sl)) for c, sl in terms]
        self.twist = twist
        self.arity = arity if arity is not None else (len(self.terms[0][1]) if self.terms else 0)

    @classmethod
    def w(cls, *slots, coeff=1, twist: int = 0) -> "PolyWedge":
        return cls([(coeff, slots)], twist, len(slots))

    def __add__(self, other: "PolyWedge") -> "PolyWedge":
        if (self.arity, self.twist) != (other.arity, other.twist):
            raise ShapeError("arity or twist mismatch")
        return PolyWedge(self.terms + other.terms, self.twist, self.arity)

    def __sub__(self, other):
        return self + other.scale(-1)

    def scale(self, q) -> "PolyWedge":
        return PolyWedge([(c * Fraction(q), sl) for c, sl in self.terms], self.twist, self.arity)

    def with_twist(self, twist: int) -> "PolyWedge":
        return PolyWedge(self.terms, twist, self.arity)

    def star(self, other: "PolyWedge") -> "PolyWedge":
        """(a_0..a_k)*(b_0..b_l) = sum (-1)^(k-j+i) a_0..^a_i..a_k ^ a_i b_j/(2 pi i) ^ b_0..^b_j..b_l."""
        out = []
        k, l = self.arity - 1, other.arity - 1
        for ca, A in self.terms:
            for cb, B in other.terms:
                for i in range(k + 1):
                    for j in range(l + 1):
                        out.append((ca * cb * (-1) ** (k - j + i),
                                    A[:i] + A[i + 1:] + (A[i] * B[j] * T_INV,) + B[:j] + B[j + 1:]))
        return PolyWedge(out, self.twist + other.twist, k + l + 1)

    def d(self) -> "PolyWedge":
        """Lie-exponential differential below top degree: 2 pi i ^ (.), twist - 1."""
        return PolyWedge([(c, (T,) + sl) for c, sl in self.terms], self.twist - 1, self.arity + 1)

    def substitute(self, mapping: Mapping[str, Poly]) -> "PolyWedge":
        return PolyWedge([(c, tuple(_subst(s, mapping) for s in sl)) for c, sl in self.terms],
                         self.twist, self.arity)

    def formal(self, env: Mapping[str, complex]) -> FormalSum:
        rows = [(c, [Lin([(cc, _monomial_atom(m, env)) for m, cc in p.terms.items()]) for p in sl])
                for c, sl in self.terms]
        if not rows:
            return FormalSum.zero(self.arity, "wedge", self.twist)
        return FormalSum.build("wedge", self.twist, rows, self.arity)

    def exp(self, env: Mapping[str, complex]) -> FormalSum:
        """wedge^k exp at the top degree (twist 0)."""
        if self.twist != 0:
            raise ShapeError("exp only at twist 0")
        f = self.formal(env)
        rows = [(c, [exp_atom(a) for a in sl]) for c, sl in f.terms]
        return FormalSum.build("wedge", 0, rows, self.arity) if rows else FormalSum.zero(self.arity)

    def residual_against(self, other: "PolyWedge", env) -> int:
        """Number of surviving normal-form terms in self - other (0 means equal)."""
        return len(normalize(self.formal(env) - other.formal(env)))


def _subst(p: Poly, mapping: Mapping[str, Poly]) -> Poly:
    out = Poly()
    for m, c in p.terms.items():
        t = Poly.const(c)
        for g, e in m:
            if g in mapping:
                if e < 0:
                    raise ShapeError(f"cannot substitute into negative power of {g}")
                t = t * mapping[g] ** e
            else:
                t = t * Poly.gen(g, e)
        out = out + t
    return out


def L_poly(k: int) -> Poly:
    """L_k = sum_j beta_j Li_{k-j}(x) log^j x as a polynomial."""
    return sum((beta(j) * _li(k - j) * Poly.gen("lx", j) for j in range(k)), Poly())


def _li(m: int) -> Poly:
    # Li_1 is carried as -log(1-x) so that exp of the slot is the unit 1-x
    return -Poly.gen("l1x") if m == 1 else Poly.gen(f"Li{m}")


LX = Poly.gen("lx")


def _y(j: int) -> Poly:
    return Poly.gen(f"ly{j}")


W = PolyWedge.w
HALF = Fraction(1, 2)


def L2_bold() -> PolyWedge:
    """{x}_2 -> 2 * 2 pi i ^ (1/2 pi i) L_2(x) - L_1(x) ^ log x."""
    return W(T, L_poly(2) * T_INV, coeff=2) + W(L_poly(1), LX, coeff=-1)


def l_n_top(m: int) -> PolyWedge:
    """{x}_2 (x) y_1 ^ .. ^ y_m -> 1/2 L2_bold(x) * (2 pi i ^ log y_1 ^ .. ^ log y_m)."""
    return L2_bold().scale(HALF).star(W(T, *(_y(j) for j in range(1, m + 1))))


def l3_2() -> PolyWedge:
    return l_n_top(1)


def l4_3() -> PolyWedge:
    return l_n_top(2)


def L3_bold() -> PolyWedge:
    """{x}_3 -> -6 (2 pi i ^ L_3/(2 pi i)^2 - 1/2 L_2/(2 pi i) ^ log x - 1/12 (L_1 ^ log x) * log x), twist 1."""
    body = (W(T, L_poly(3) * T_INV ** 2) + W(L_poly(2) * T_INV, LX, coeff=-HALF)
            + W(L_poly(1), LX).star(W(LX)).scale(Fraction(-1, 12)))
    return body.scale(-6).with_twist(1)


def l4_2() -> PolyWedge:
    """{x}_3 (x) y -> element of Lambda^3 C(1)."""
    y = _y(1)
    inner = (W(L_poly(3) * T_INV ** 2, y, coeff=-12)
             + W(L_poly(2) * T_INV, LX).star(W(y)).scale(-2)
             + W(L_poly(1) * LX * T_INV, LX * y * T_INV, coeff=-HALF)
             + W(L_poly(1) * y * T_INV, LX * LX * T_INV, coeff=-HALF))
    out = PolyWedge([(c, (T,) + sl) for c, sl in inner.terms], 1, 3)
    out = out + W(L_poly(2) * T_INV, LX, y, coeff=4, twist=1)
    return out + W(L_poly(1), LX).star(W(LX, y)).scale(HALF).with_twist(1)


def L4_bold() -> PolyWedge:
    """{x}_4 -> 24 (2 pi i ^ L_4/(2 pi i)^3 - 1/2 L_3/(2 pi i)^2 ^ log x
    - 1/12 (L_2/(2 pi i) ^ log x) * log x - 1/24 (L_1 log x/2 pi i) ^ (log^2 x/2 pi i)), twist 2."""
    body = (W(T, L_poly(4) * T_INV ** 3) + W(L_poly(3) * T_INV ** 2, LX, coeff=-HALF)
            + W(L_poly(2) * T_INV, LX).star(W(LX)).scale(Fraction(-1, 12))
            + W(L_poly(1) * LX * T_INV, LX * LX * T_INV, coeff=Fraction(-1, 24)))
    return body.scale(24).with_twist(2)


def ladder(n: int, k: int) -> PolyWedge | None:
    """l_n^k on {x}_{n-k+1} (x) y_1 ^ .. ^ y_{k-1}; None for the identity l_n^n."""
    if not 2 <= n <= 4 or not 1 <= k <= n:
        raise ShapeError("ladder maps are implemented for 2 <= n <= 4, 1 <= k <= n")
    if k == n:
        return None
    if k == n - 1:
        return l_n_top(n - 2)
    return {(3, 1): L3_bold, (4, 1): L4_bold, (4, 2): l4_2}[(n, k)]()


def ladder_env(state: BranchState, ys: Sequence[complex] = (), log_ys: Sequence[complex] | None = None) -> dict:
    env = {"lx": state.log_z, "l1x": state.log_1mz, **{f"Li{k}": state.Li(k) for k in range(2, state.depth + 1)}}
    logs = list(log_ys) if log_ys is not None else [cmath.log(y) for y in ys]
    env.update({f"ly{j}": v for j, v in enumerate(logs, start=1)})
    return env


def ladder_delta(n: int, k: int) -> PolyWedge:
    """l_n^{k+1}(delta w) for the generator w of the source of l_n^k (k+1 < n).

    delta({x}_m (x) y_1 ^ .. ^ y_r) = {x}_{m-1} (x) x ^ y_1 ^ .. ^ y_r, so the
    slots of l_n^{k+1} are renamed: its first y becomes x, the rest shift down.
    """
    nxt = ladder(n, k + 1)
    first = {"ly1": LX, **{f"ly{j}": Poly.gen(f"_y{j - 1}") for j in range(2, k + 1)}}
    back = {f"_y{j}": _y(j) for j in range(1, k)}
    return nxt.substitute(first).substitute(back)


def unit_residual(s: FormalSum) -> float:
    """0 when the unit wedge normalizes to empty; else the largest |coeff * prod log|u||."""
    nf = normalize(s)
    if not nf.terms:
        return 0.0
    return max(abs(float(c)) * math.prod(abs(cmath.log(complex(a.value))) or 1.0 for a in sl)
               for c, sl in nf.terms)


def ladder_square(n: int, k: int, state: BranchState, ys: Sequence[complex]) -> float:
    """Residual of l_n^{k+1}(delta w) = d l_n^k(w); the top square compares units exactly."""
    lk = ladder(n, k)
    if lk is None:
        raise ShapeError("no square to the right of l_n^n")
    if k + 1 < n:
        env = ladder_env(state, ys)
        return float(lk.d().residual_against(ladder_delta(n, k), env))
    # top square: wedge^n exp(l_n^{n-1}({x}_2 (x) y)) = (1-x) ^ x ^ y_1 ^ ..
    env = ladder_env(state, ys)
    lhs = lk.exp(env)
    rhs = FormalSum.wedge(unit(1 - state.z), unit(state.z), *(unit(y) for y in ys))
    return unit_residual(lhs - rhs)


def monodromy_substitution(loop: str, depth: int = 5) -> dict:
    """Action of a loop around 0 or 1 on the generators, as a substitution."""
    if loop == "g0":
        return {"lx": LX + T}
    if loop == "g1":
        out = {f"Li{m}": Poly.gen(f"Li{m}") - T * Poly.gen("lx", m - 1) * Fraction(1, math.factorial(m - 1))
               for m in range(2, depth + 1)}
        out["l1x"] = Poly.gen("l1x") + T
        return out
    raise ValueError(f"unknown loop {loop}")


def monodromy_of_L(loop: str, n: int) -> Poly:
    """(1/2 pi i)(T - Id) applied to L_n, as an exact polynomial."""
    L = L_poly(n)
    return (_subst(L, monodromy_substitution(loop, max(n, 2))) - L) * T_INV


def branch_shift(j: int, shift: int = 1) -> dict:
    return {f"ly{j}": _y(j) + T * shift}


def _family(pw: PolyWedge, state: BranchState, n_y: int):
    def fam(p):
        x = complex(p[0], p[1])
        s = extend(state, [x]) if x != state.z else state
        logs = [cmath.log(complex(p[2 + 2 * j], p[3 + 2 * j])) for j in range(n_y)]
        return pw.formal(ladder_env(s, log_ys=logs))
    return fam


def ladder_omega_residual(n: int, k: int, state: BranchState, ys: Sequence[complex] = (),
                          trials: int = 3, h: float = 1e-4, seed: int = 0) -> float:
    """max |omega o l_n^k| at the point, on random tangent vectors (finite differences)."""
    pw = ladder(n, k)
    n_y = len(ys)
    fam = _family(pw, state, n_y)
    form = omega_wedge(fam, n, k, h)
    p = np.array([state.z.real, state.z.imag] + [c for y in ys for c in (y.real, y.imag)])
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(trials):
        vecs = [rng.standard_normal(len(p)) for _ in range(k)]
        worst = max(worst, abs(form(p, vecs)))
    return worst


# backwards-friendly evaluated forms of the named maps

def _eval(pw: PolyWedge, state: BranchState, ys=()) -> FormalSum:
    return pw.formal(ladder_env(state, ys))


# ---------------------------------------------------------------- regulator to the Deligne complex

@dataclass(frozen=True)
class RDeligneCochain:
    """Cochain of the weight-2 Lie-exponential Deligne complex.

    degree 0: o1 (an O(1) value); degree 1: (lam in Lambda^2 O, o in O);
    degree 2: (units in Lambda^2 O*, form in Omega^1).
    """
    degree: int
    lam: FormalSum | None = None
    o: complex = 0
    units: FormalSum | None = None


def r_deligne_map(degree: int, element) -> RDeligneCochain:
    """Components (2 p_2, Id, 0): degree 1 takes [(coeff, BlochPoint)], degree 2 a unit wedge.

    p_2 exponentiates to 1/2 (1-x) ^ x, so the Bloch differential
    {x}_2 -> (1-x) ^ x is matched by 2 p_2.
    """
    if degree == 1:
        if not element:
            return RDeligneCochain(1, FormalSum.zero(2), 0)
        return RDeligneCochain(1, p2_sum(element).scale(2), 0)
    if degree == 2:
        return RDeligneCochain(2, None, 0, element)
    raise ShapeError("the Bloch complex lives in degrees 1 and 2")


def _bloch_delta_units(points) -> FormalSum:
    out = FormalSum.zero(2)
    # units written through the point's own log slots, so that multiplicative
    # relations among the x's are visible to the normal form
    for c, pt in points:
        out = out + FormalSum.build("wedge", 0, [(c, [exp_lin(pt.log_1mx), exp_lin(pt.log_x)])], 2)
    return out


def r_deligne_residual(make_points, t0: complex, h: float = 1e-4) -> dict:
    """Chain-map defects of r_D at a one-parameter family t -> [(coeff, BlochPoint)].

    units: wedge^2 exp(2 p_2(b)) against delta(b); form: |omega(2 p_2(b))| by finite differences.
    """
    pts = make_points(t0)
    lam = r_deligne_map(1, pts).lam
    rows = [(c, [exp_atom(a) for a in sl]) for c, sl in lam.terms]
    expd = FormalSum.build("wedge", 0, rows, 2) if rows else FormalSum.zero(2)
    units = unit_residual(expd - _bloch_delta_units(pts))

    def fam(p):
        return r_deligne_map(1, make_points(complex(p[0], p[1]))).lam

    form = omega_wedge(fam, 2, 1, h)
    p = np.array([t0.real, t0.imag])
    om = max(abs(form(p, [v])) for v in (np.array([1.0, 0.0]), np.array([0.0, 1.0])))
    return {"units": units, "omega": om}
