"""Branch-tracked logarithm and polylogarithms.

Values of log z, log(1-z) and Li_1..Li_N are carried along piecewise linear
paths starting at a real base point a in (0, 1).  Each segment is handled by
one vector-valued Gauss-Kronrod integral: writing L = log(q/p),

    Li_m(q) = sum_{j<m-1} Li_{m-j}(p) L^j / j!
              + int_p^q Li_1(u) log(q/u)^{m-2} / (m-2)! du/u

which follows from dLi_m = Li_{m-1} dlog t by swapping the nested integrals.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field, replace
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

import mpmath
import numpy as np
from scipy.integrate import quad_vec

TWO_PI_I = 2j * math.pi
PATH_MARGIN = 0.05
SERIES_RADIUS = 0.25
QUAD_RTOL = 1e-12


class PathError(ValueError):
    """Raised when a path comes too close to 0 or 1."""


class QuadratureError(RuntimeError):
    pass


# ---------------------------------------------------------------- Bernoulli

@lru_cache(maxsize=None)
def bernoulli_numbers(K: int) -> tuple[Fraction, ...]:
    """B_0..B_K with B_1 = -1/2 (generating function t/(e^t - 1))."""
    B = [Fraction(1)]
    for m in range(1, K + 1):
        s = sum(math.comb(m + 1, j) * B[j] for j in range(m))
        B.append(-s / (m + 1))
    return tuple(B)


def beta(k: int) -> Fraction:
    return bernoulli_numbers(k)[k] / math.factorial(k)


@dataclass(frozen=True)
class BernoulliTable:
    betas: tuple[Fraction, ...]

    @classmethod
    def standard(cls, K: int = 16) -> "BernoulliTable":
        return cls(tuple(beta(k) for k in range(K + 1)))

    @property
    def order(self) -> int:
        return len(self.betas) - 1

    def bernoulli(self, k: int) -> Fraction:
        return self.betas[k] * math.factorial(k)

    def series_defect(self) -> list[Fraction]:
        """Coefficients of (sum beta_k t^k)(e^t - 1) - t up to t^(order+1)."""
        K = self.order
        expm1 = [Fraction(0)] + [Fraction(1, math.factorial(j)) for j in range(1, K + 2)]
        out = []
        for d in range(K + 2):
            c = sum(self.betas[k] * expm1[d - k] for k in range(min(d, K) + 1))
            out.append(c - (1 if d == 1 else 0))
        return out

    def verify(self) -> bool:
        return all(c == 0 for c in self.series_defect())


def bernoulli_identity_terms(n: int, table: BernoulliTable | None = None):
    """Return (lhs, rhs) of sum_{k<n} B_k/(k!(n-k-1)!) = (-1)^(n-1) B_{n-1}/(n-1)!.

    The sign factor only matters for n = 2, where B_1 = -1/2 enters.
    """
    t = table or BernoulliTable.standard(max(n, 2))
    lhs = sum(t.betas[k] / math.factorial(n - k - 1) for k in range(n))
    rhs = (-1) ** (n - 1) * t.betas[n - 1]
    return Fraction(lhs), Fraction(rhs)


# ---------------------------------------------------------------- paths

def _dist_to_segment(c: complex, p: complex, q: complex) -> float:
    d = q - p
    if d == 0:
        return abs(c - p)
    s = ((c - p) * d.conjugate()).real / abs(d) ** 2
    s = min(1.0, max(0.0, s))
    return abs(c - (p + s * d))


@dataclass(frozen=True)
class PathSpec:
    base: float
    waypoints: tuple[complex, ...] = ()
    margin: float = PATH_MARGIN

    def __post_init__(self):
        if not 0 < self.base < 1:
            raise PathError(f"base point {self.base} not in (0, 1)")
        object.__setattr__(self, "waypoints", tuple(complex(w) for w in self.waypoints))
        pts = self.points
        for c in (0.0, 1.0):
            if abs(pts[0] - c) < self.margin:
                raise PathError(f"base point within {self.margin} of {c}")
        for p, q in zip(pts, pts[1:]):
            for c in (0.0, 1.0):
                if _dist_to_segment(c, p, q) < self.margin:
                    raise PathError(f"segment {p}->{q} passes within {self.margin} of {c}")

    @property
    def points(self) -> tuple[complex, ...]:
        return (complex(self.base),) + self.waypoints

    @classmethod
    def straight(cls, base: float, z: complex, margin: float = PATH_MARGIN) -> "PathSpec":
        return cls(base, (complex(z),), margin)

    def reversed(self) -> tuple[complex, ...]:
        return tuple(reversed(self.points))

    def to_json(self, depth: int) -> dict:
        return {"base": [self.base, 0.0],
                "waypoints": [[w.real, w.imag] for w in self.waypoints],
                "depth": depth}

    @classmethod
    def from_json(cls, d: dict) -> tuple["PathSpec", int]:
        base = d["base"]
        base = base[0] if isinstance(base, (list, tuple)) else base
        wps = tuple(complex(x, y) for x, y in d.get("waypoints", []))
        return cls(float(base), wps, d.get("margin", PATH_MARGIN)), int(d.get("depth", 2))


# ---------------------------------------------------------------- branch state

@dataclass(frozen=True)
class BranchState:
    z: complex
    log_z: complex
    log_1mz: complex
    li: tuple[complex, ...]  # li[m-1] = Li_m
    path: tuple[complex, ...] = field(default=(), compare=False)
    margin: float = field(default=PATH_MARGIN, compare=False)

    @property
    def depth(self) -> int:
        return len(self.li)

    def Li(self, m: int) -> complex:
        if m < 1 or m > self.depth:
            raise ValueError(f"depth {self.depth} state has no Li_{m}")
        return self.li[m - 1]

    @property
    def w0(self) -> int:
        return round((self.log_z.imag - cmath.phase(self.z)) / (2 * math.pi))

    @property
    def w1(self) -> int:
        return round((self.log_1mz.imag - cmath.phase(1 - self.z)) / (2 * math.pi))

    def distance(self, other: "BranchState") -> float:
        vals = [self.log_z - other.log_z, self.log_1mz - other.log_1mz]
        vals += [a - b for a, b in zip(self.li, other.li)]
        return max(abs(v) for v in vals)

    def to_json(self) -> dict:
        c = lambda v: [float(v.real), float(v.imag)]
        return {"z": c(self.z), "log_z": c(self.log_z), "log_1mz": c(self.log_1mz),
                "Li": [c(v) for v in self.li], "w0": self.w0, "w1": self.w1}


def _li_series(m: int, a: float, tol: float = 1e-17) -> float:
    s, k = 0.0, 1
    while True:
        t = a ** k / k ** m
        s += t
        if abs(t) < tol * max(abs(s), 1e-300):
            return s
        k += 1


def initial_state(base: float, depth: int, margin: float = PATH_MARGIN) -> BranchState:
    """Principal values at the real base point; log is the tangential-base-point log."""
    if base <= SERIES_RADIUS:
        li = tuple(complex(_li_series(m, base)) for m in range(1, depth + 1))
    else:
        li = tuple(complex(mpmath.polylog(m, base)) for m in range(1, depth + 1))
    return BranchState(complex(base), complex(math.log(base)), complex(math.log1p(-base)),
                       li, (complex(base),), margin)


def _segment(state: BranchState, q: complex) -> BranchState:
    p, N = state.z, state.depth
    if q == p:
        return state
    for c in (0.0, 1.0):
        if _dist_to_segment(c, p, q) < state.margin:
            raise PathError(f"segment {p}->{q} passes within {state.margin} of {c}")
    L = cmath.log(q / p)
    log1 = cmath.log((1 - q) / (1 - p))
    li1_p = state.li[0]
    dq = q - p
    new = [li1_p - log1]
    if N >= 2:
        facts = np.array([math.factorial(m - 2) for m in range(2, N + 1)], dtype=float)
        powers = np.arange(N - 1)

        def integrand(s):
            u = p + s * dq
            li1 = li1_p - cmath.log((1 - u) / (1 - p))
            lq = cmath.log(q / u)
            return (li1 / u * dq) * (lq ** powers) / facts

        integral, err = quad_vec(integrand, 0.0, 1.0, epsrel=QUAD_RTOL, epsabs=1e-15, norm="max")
        if not np.all(np.isfinite(integral)) or err > 1e-8:
            raise QuadratureError(f"quadrature did not converge on {p}->{q} (err {err})")
        for m in range(2, N + 1):
            acc = integral[m - 2]
            for j in range(m - 1):
                acc += state.li[m - j - 1] * L ** j / math.factorial(j)
            new.append(complex(acc))
    return BranchState(q, state.log_z + L, state.log_1mz + log1, tuple(new),
                       state.path + (q,), state.margin)


def _split(p: complex, q: complex, max_len: float = 0.25) -> list[complex]:
    n = max(1, math.ceil(abs(q - p) / max_len))
    return [p + (q - p) * (i / n) for i in range(1, n + 1)]


def extend(state: BranchState, waypoints: Sequence[complex]) -> BranchState:
    """Continue an existing state through further waypoints."""
    for w in waypoints:
        for q in _split(state.z, complex(w)):
            state = _segment(state, q)
    # keep the user-level path rather than the subdivided one
    return state


def continue_along(path: PathSpec, depth: int) -> BranchState:
    st = initial_state(path.base, depth, path.margin)
    end = extend(st, path.waypoints)
    return replace(end, path=path.points)


# ---------------------------------------------------------------- L_n and variants

def L_n(state: BranchState, n: int, table: BernoulliTable | None = None) -> complex:
    """sum_{k<n} beta_k Li_{n-k}(z) log^k z on the state's branch."""
    if n > state.depth:
        raise ValueError(f"need depth >= {n}, state has {state.depth}")
    b = (table or BernoulliTable.standard(n)).betas
    return sum(float(b[k]) * state.Li(n - k) * state.log_z ** k for k in range(n))


def L2_bloch(state: BranchState) -> complex:
    """Li_2 + (1/2) log(1-z) log z + (2 pi i)^2 / 24, the dilogarithm used by p2."""
    return state.Li(2) + 0.5 * state.log_1mz * state.log_z + TWO_PI_I ** 2 / 24


def L2_bloch_part(state: BranchState) -> complex:
    """L2_bloch without its constant (2 pi i)^2/24."""
    return state.Li(2) + 0.5 * state.log_1mz * state.log_z


# ---------------------------------------------------------------- monodromy

LOOPS = ("g0", "g1")


def monodromy(state: BranchState, loop: str) -> BranchState:
    """Closed-form action of the loop (conjugated by the state's path).

    g0: log z -> log z + 2 pi i, polylogs unchanged.
    g1: Li_m -> Li_m - 2 pi i log^{m-1} z / (m-1)!, log(1-z) -> log(1-z) + 2 pi i.
    """
    if loop == "g0":
        return replace(state, log_z=state.log_z + TWO_PI_I)
    if loop == "g1":
        li = tuple(v - TWO_PI_I * state.log_z ** (m - 1) / math.factorial(m - 1)
                   for m, v in enumerate(state.li, start=1))
        return replace(state, log_1mz=state.log_1mz + TWO_PI_I, li=li)
    raise ValueError(f"unknown loop {loop!r}")


def loop_waypoints(base: float, loop: str, points: int = 24) -> list[complex]:
    """Counterclockwise polygonal circle through the base point around 0 or 1."""
    if loop == "g0":
        c, r, t0 = 0.0, base, 0.0
    elif loop == "g1":
        c, r, t0 = 1.0, 1.0 - base, math.pi
    else:
        raise ValueError(f"unknown loop {loop!r}")
    return [c + r * cmath.exp(1j * (t0 + 2 * math.pi * k / points)) for k in range(1, points + 1)]


def numeric_monodromy(state: BranchState, loop: str, points: int = 24) -> BranchState:
    """Continue back along the stored path, around the loop, and forward again."""
    back = list(reversed(state.path[:-1]))
    st = extend(state, back)
    base = st.z.real
    st = extend(st, loop_waypoints(base, loop, points))
    st = extend(st, state.path[1:])
    return replace(st, path=state.path)


def monodromy_defect(state: BranchState, loop: str, n: int) -> complex:
    """(1/2 pi i)(T - Id) applied to L_n, via the closed form."""
    return (L_n(monodromy(state, loop), n) - L_n(state, n)) / TWO_PI_I


# ---------------------------------------------------------------- single-valued version

def pi_n(v: complex, n: int) -> complex:
    """Projection C -> R(n-1): real part for odd n, i * imaginary part for even n."""
    v = complex(v)
    return complex(v.real, 0.0) if n % 2 else complex(0.0, v.imag)


def zagier_single_valued(state: BranchState, n: int) -> complex:
    """pi_n(sum_k 2^k beta_k Li_{n-k}(z) log^k |z|), single valued in z.

    The weights 2^k are required; with plain beta_k the value changes
    under the loop around 1 (see tests).
    """
    if state.z in (0, 1):
        raise ValueError("z must avoid 0 and 1")
    lg = math.log(abs(state.z))
    s = sum(float(2 ** k * beta(k)) * state.Li(n - k) * lg ** k for k in range(n))
    return pi_n(s, n)


def polylog_at_one(m: int) -> float:
    """Li_m(1) = int_0^1 Li_{m-1}(t) dt/t as a single Gauss-Kronrod integral.

    Uses Li_m(1) = int_0^1 -log(1-t) log(1/t)^{m-2}/(m-2)! dt/t, m >= 2.
    """
    from scipy.integrate import quad

    if m < 2:
        raise ValueError("Li_1 diverges at 1")
    f = lambda t: -math.log1p(-t) * math.log(1 / t) ** (m - 2) / math.factorial(m - 2) / t
    val, err = quad(f, 0.0, 1.0, epsabs=1e-14, epsrel=1e-13, limit=200)
    return val


def log_monodromy(state: BranchState, loop: str, n: int) -> complex:
    """(1/2 pi i) log T applied to L_n, in closed form.

    For the loop around 0 this is d/d(log z) at fixed Li's; around 1 the
    operator T - Id squares to zero, so log T = T - Id.
    """
    if loop == "g1":
        return monodromy_defect(state, "g1", n)
    b = BernoulliTable.standard(n).betas
    return sum(k * float(b[k]) * state.Li(n - k) * state.log_z ** (k - 1) for k in range(1, n))


def numeric_log_monodromy(state: BranchState, loop: str, n: int, points: int = 24) -> complex:
    """log T from repeated numeric loops: sum_j (-1)^(j+1)/j (T - 1)^j, exact since (T-1)^n = 0 on L_n."""
    vals = [L_n(state, n)]
    st = state
    for _ in range(n):
        st = numeric_monodromy(st, loop, points)
        vals.append(L_n(st, n))
    total = 0j
    for j in range(1, n + 1):
        diff = sum((-1) ** (j - i) * math.comb(j, i) * vals[i] for i in range(j + 1))
        total += (-1) ** (j + 1) / j * diff
    return total / TWO_PI_I
