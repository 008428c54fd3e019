"""The map to smooth real forms and its canonical null-homotopy.

Cochains of the Lie-exponential complex are sampled: a degree-k element is a
combination of (2 pi i)^(n-k-1) f_0 ^ .. ^ f_k with smooth complex test
functions f_i on R^d.  phi = pi_n o omega sends it to an R(n-1)-valued k-form;
s lowers the form degree by one and satisfies s o delta + d o s = phi.

Conventions: pi_n(a + ib) = a for odd n and ib for even n; Im(x + iy) = iy;
phi is pi_n o omega / n!, with omega normalized as in `wedge.omega_wedge`:
(k!/n!) sum_j (-1)^j f_j df_0 ^ .. ^df_j^ .. ^ df_k, and dlog ^ .. ^ dlog on
units.  With this scale phi is a chain map and s is a homotopy for it.
"""
from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .multival import TWO_PI_I
from .wedge import FormSample, ShapeError, _perm_sign, exterior_derivative, omega_wedge

__all__ = [
    "pi_n_project", "TestFunction", "LieCochain", "delta", "phi", "phi_units",
    "phi_family", "r_tilde", "s", "homotopy_residual", "homotopy_check",
    "basic_identity_residual", "chain_square_residual", "primitive_residual",
    "random_polynomial", "random_corpus_function", "random_cochain",
]


def pi_n_project(v: complex, n: int) -> complex:
    """C -> R(n-1): real part for odd n, i times the imaginary part for even n."""
    v = complex(v)
    return complex(v.real, 0.0) if n % 2 else complex(0.0, v.imag)


# ---------------------------------------------------------------- test functions

@dataclass(frozen=True)
class TestFunction:
    """Smooth complex function on R^d with an optional exact gradient."""
    value: Callable[[np.ndarray], complex]
    grad: Callable[[np.ndarray], np.ndarray] | None = None
    name: str = ""

    def __call__(self, p) -> complex:
        return complex(self.value(np.asarray(p, dtype=float)))

    def gradient(self, p, h: float = 1e-4) -> np.ndarray:
        p = np.asarray(p, dtype=float)
        if self.grad is not None:
            return np.asarray(self.grad(p), dtype=complex)
        out = np.zeros(len(p), dtype=complex)
        for i in range(len(p)):
            e = np.zeros(len(p))
            e[i] = 1.0
            d1 = (self.value(p + h * e) - self.value(p - h * e)) / (2 * h)
            d2 = (self.value(p + 0.5 * h * e) - self.value(p - 0.5 * h * e)) / h
            out[i] = (4 * d2 - d1) / 3
        return out

    @classmethod
    def constant(cls, c: complex, name: str | None = None) -> "TestFunction":
        c = complex(c)
        return cls(lambda p: c, lambda p: np.zeros(len(p), dtype=complex), name or f"{c}")


TWO_PI_I_FN = TestFunction.constant(TWO_PI_I, "2πi")


def random_polynomial(dim: int, rng: random.Random, degree: int = 3, max_vars: int = 3) -> TestFunction:
    """Complex polynomial of total degree <= degree in at most max_vars of the coordinates."""
    vars_ = rng.sample(range(dim), min(max_vars, dim))
    monos = [m for m in itertools.product(range(degree + 1), repeat=len(vars_)) if sum(m) <= degree]
    coef = {m: complex(rng.uniform(-1, 1), rng.uniform(-1, 1)) for m in monos if rng.random() < 0.6 or sum(m) <= 1}

    def val(p):
        x = p[vars_]
        return sum(c * np.prod(x ** np.array(m)) for m, c in coef.items())

    def grad(p):
        x = p[vars_]
        g = np.zeros(dim, dtype=complex)
        for m, c in coef.items():
            for a, v in enumerate(vars_):
                if m[a]:
                    mm = np.array(m)
                    mm[a] -= 1
                    g[v] += c * m[a] * np.prod(x ** mm)
        return g

    return TestFunction(val, grad, f"poly{vars_}")


def random_corpus_function(dim: int, rng: random.Random) -> TestFunction:
    """Polynomial, exp of a polynomial, or log of a polynomial kept in Re > 0 on [-1,1]^d."""
    kind = rng.choice(["poly", "poly", "exp", "log"])
    base = random_polynomial(dim, rng, degree=2 if kind != "poly" else 3)
    if kind == "poly":
        return base
    if kind == "exp":
        small = TestFunction(lambda p: 0.3 * base(p), lambda p: 0.3 * base.gradient(p))
        return TestFunction(lambda p: np.exp(small(p)), lambda p: np.exp(small(p)) * small.gradient(p), "exp")
    # log(4 + u) with |u| small on the box: no branch crossing
    shift = 4.0 + 0j

    def val(p):
        return np.log(shift + 0.25 * base(p))

    def grad(p):
        return 0.25 * base.gradient(p) / (shift + 0.25 * base(p))

    return TestFunction(val, grad, "log")


# ---------------------------------------------------------------- cochains

@dataclass
class LieCochain:
    """sum c (2 pi i)^(n - arity) f_1 ^ .. ^ f_arity; top=True marks the units exp(f_i) in degree n."""
    n: int
    arity: int
    terms: list = field(default_factory=list)
    top: bool = False

    def __post_init__(self):
        if not 1 <= self.arity <= self.n:
            raise ShapeError("arity must be in 1..n")
        for _, fs in self.terms:
            if len(fs) != self.arity:
                raise ShapeError("slot count differs from arity")

    @property
    def twist(self) -> int:
        return self.n - self.arity


def delta(x: LieCochain) -> LieCochain:
    """2 pi i ^ (.) below the top arity; wedge^n exp at arity n (kept as the logs f_i)."""
    if x.top:
        raise ShapeError("no differential out of the top degree")
    if x.arity == x.n:
        return LieCochain(x.n, x.n, list(x.terms), top=True)
    return LieCochain(x.n, x.arity + 1, [(c, [TWO_PI_I_FN] + list(fs)) for c, fs in x.terms])


def random_cochain(n: int, arity: int, dim: int, rng: random.Random, n_terms: int = 2) -> LieCochain:
    return LieCochain(n, arity, [(rng.choice([1, -1, 2]), [random_corpus_function(dim, rng) for _ in range(arity)])
                                 for _ in range(n_terms)])


def _jets(fs, p):
    vals = [f(p) for f in fs]
    grads = [f.gradient(p) for f in fs]
    return vals, grads


def _det_of(rows: list[np.ndarray], vs) -> complex:
    if not rows:
        return 1.0
    m = np.array([[np.dot(r, v) for v in vs] for r in rows], dtype=complex)
    return complex(np.linalg.det(m))


def phi(x: LieCochain) -> FormSample:
    """pi_n of omega / n!: a cochain of arity k+1 goes to a k-form; top units to an n-form."""
    n = x.n
    if x.top:
        return phi_units(x)
    k = x.arity - 1
    tw = TWO_PI_I ** x.twist * math.factorial(k) / math.factorial(n)

    def fn(p, vs):
        total = 0j
        for c, fs in x.terms:
            vals, grads = _jets(fs, p)
            for j in range(k + 1):
                rows = [grads[i] for i in range(k + 1) if i != j]
                total += c * (-1) ** j * vals[j] * _det_of(rows, vs)
        return pi_n_project(tw * total, n)

    return FormSample(k, fn)


def phi_units(x: LieCochain) -> FormSample:
    """exp(f_1) ^ .. ^ exp(f_n) -> pi_n(df_1 ^ .. ^ df_n)."""
    n = x.n

    def fn(p, vs):
        total = 0j
        for c, fs in x.terms:
            _, grads = _jets(fs, p)
            total += c * _det_of(grads, vs)
        return pi_n_project(total, n)

    return FormSample(n, fn)


def phi_family(family, n: int, m: int, h: float = 1e-4) -> FormSample:
    """pi_n o omega / n! on a parametrized formal cochain (e.g. a ladder or period map)."""
    om = omega_wedge(family, n, m, h)
    return FormSample(m, lambda p, vs: pi_n_project(om.fn(p, vs), n) / math.factorial(n))


def _re_im_grads(grads):
    return [g.real.astype(complex) for g in grads], [1j * g.imag for g in grads]


def r_tilde(fs: Sequence[TestFunction]) -> FormSample:
    """Alt_k sum_j c_{j,k} Re f_1 dRe f_2 ^ .. ^ dRe f_{2j+1} ^ dIm f_{2j+2} ^ .. ^ dIm f_k,
    c_{j,k} = 1 / ((2j+1)! (k-2j-1)!): a (k-1)-form with d r~ = pi_k(df_1 ^ .. ^ df_k)."""
    k = len(fs)
    coeffs = [(j, 1.0 / (math.factorial(2 * j + 1) * math.factorial(k - 2 * j - 1))) for j in range((k + 1) // 2)]

    def fn(p, vs):
        vals, grads = _jets(fs, p)
        dre, dim = _re_im_grads(grads)
        total = 0j
        for perm in itertools.permutations(range(k)):
            sign, _ = _perm_sign(list(perm))
            for j, c in coeffs:
                rows = [dre[perm[a]] for a in range(1, 2 * j + 1)] + [dim[perm[a]] for a in range(2 * j + 1, k)]
                total += sign * c * vals[perm[0]].real * _det_of(rows, vs)
        return total

    return FormSample(k - 1, fn)


def _alt_im_r(fs: Sequence[TestFunction]) -> FormSample:
    """Alt_{a}(Im f_0 . r~(f_1 .. f_{a-1})) = (a-1)! sum_i (-1)^i Im f_i r~(f without i)."""
    a = len(fs)
    parts = [(i, r_tilde([f for j, f in enumerate(fs) if j != i])) for i in range(a)]

    def fn(p, vs):
        total = 0j
        for i, r in parts:
            total += (-1) ** i * 1j * fs[i](p).imag * r.fn(p, vs)
        return math.factorial(a - 1) * total

    return FormSample(a - 2, fn)


def s(x: LieCochain) -> FormSample:
    """The homotopy: arity k+1 goes to a (k-1)-form; the top units (as logs) to an (n-1)-form."""
    n = x.n
    if x.top:
        # on units exp(f_1) ^ .. ^ exp(f_n): r~(f_1 ^ .. ^ f_n), the k = n case of s(2 pi i ^ .) = k!/n! r~
        rs = [(c, r_tilde(fs)) for c, fs in x.terms]
        return FormSample(n - 1, lambda p, vs: sum(c * r.fn(p, vs) for c, r in rs))
    if x.arity == 1:
        raise ShapeError("s vanishes on the bottom degree (no (-1)-forms)")
    tw = TWO_PI_I ** x.twist / math.factorial(n)
    parts = [(c, _alt_im_r(fs)) for c, fs in x.terms]
    return FormSample(x.arity - 2, lambda p, vs: tw * sum(c * q.fn(p, vs) for c, q in parts))


# ---------------------------------------------------------------- checks

def _rand_vectors(k: int, dim: int, rng: random.Random) -> list[np.ndarray]:
    return [np.array([rng.uniform(-1, 1) for _ in range(dim)]) for _ in range(k)]


def _rand_point(dim: int, rng: random.Random) -> np.ndarray:
    return np.array([rng.uniform(-0.8, 0.8) for _ in range(dim)])


def homotopy_residual(x: LieCochain, p, vs, h: float = 1e-4) -> float:
    """|s(delta x) + d s(x) - phi(x)| for x of arity k+1, 1 <= k <= n-1 (d s omitted at k = 0)."""
    k = x.arity - 1
    lhs = s(delta(x)).fn(p, vs)
    if k >= 1:
        lhs += exterior_derivative(s(x), h).fn(p, vs)
    rhs = phi(x).fn(p, vs)
    return abs(lhs - rhs)


def homotopy_check(n: int, samples: int = 100, h: float = 1e-4, seed: int = 0, dim: int | None = None) -> float:
    """Max homotopy residual over random cochains of arity 2..n at random points and vectors."""
    rng = random.Random(seed)
    dim = dim or max(n, 2)
    worst = 0.0
    for t in range(samples):
        for arity in range(2, n + 1):
            x = random_cochain(n, arity, dim, rng)
            p = _rand_point(dim, rng)
            vs = _rand_vectors(arity - 1, dim, rng)
            worst = max(worst, homotopy_residual(x, p, vs, h))
    return worst


def basic_identity_residual(fs: Sequence[TestFunction], p, vs, h: float = 1e-4) -> float:
    """d(sum_i (-1)^(i-1) Im f_i r~(f without i)) + k r~(f) - pi_k(sum_i (-1)^(i-1) f_i df..^df_i..)."""
    k = len(fs)
    if k < 2:
        raise ShapeError("the basic identity needs k >= 2")
    parts = [(i, r_tilde([f for j, f in enumerate(fs) if j != i])) for i in range(k)]
    inner = FormSample(k - 2, lambda q, ws: sum((-1) ** i * 1j * fs[i](q).imag * r.fn(q, ws) for i, r in parts))
    lhs = exterior_derivative(inner, h).fn(p, vs) + k * r_tilde(fs).fn(p, vs)
    vals, grads = _jets(fs, p)
    rhs = sum((-1) ** i * vals[i] * _det_of([grads[j] for j in range(k) if j != i], vs) for i in range(k))
    return abs(lhs - pi_n_project(rhs, k))


def chain_square_residual(x: LieCochain, p, vs, h: float = 1e-4) -> float:
    """|d phi(x) - phi(delta x)|."""
    return abs(exterior_derivative(phi(x), h).fn(p, vs) - phi(delta(x)).fn(p, vs))


def primitive_residual(fs: Sequence[TestFunction], p, vs, h: float = 1e-4) -> float:
    """|d r~(f) - pi_k(df_1 ^ .. ^ df_k)|."""
    k = len(fs)
    _, grads = _jets(fs, p)
    return abs(exterior_derivative(r_tilde(fs), h).fn(p, vs) - pi_n_project(_det_of(grads, vs), k))
