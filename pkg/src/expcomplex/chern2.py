"""Cech cocycle for the second Chern class of a rank two bundle.

Input: a cover nerve and the pairings Delta(s_i, s_j) = <vol, s_i ^ s_j> of
local sections, all evaluated at one point (the pipeline is pointwise).
Output: the cochain (C3, C3~, C4, C4~, C5~) with values in the Bloch and
weight two Lie-exponential complexes, plus an audit of every branch choice.

Every logarithm is written exactly as a Q-combination of the symbols
log Delta_ij (principal branch, i < j) plus an integer multiple of 2 pi i.
The integers are fixed by comparing with principal values, so the wedge
identities below are exact normal-form identities.  Cech coboundaries use
sum_{t >= 0} (-1)^t over the faces.
"""
from __future__ import annotations

import cmath
import itertools
import json
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

import mpmath

from .bloch import WedgeOfUnits
from .multival import TWO_PI_I
from .wedge import FormalSum, Lin, exp_lin, normalize, symbol, two_pi_i, germ

__all__ = [
    "PairingError", "PluckerError", "RecognitionError", "Nerve", "SectionData",
    "log_delta", "build_C3", "build_C4", "build_Ctilde3", "correction_log_F",
    "build_Ctilde4", "build_Ctilde5", "recognize_rational", "Chern2Cochain",
    "assemble_class", "rebranch_coboundary_check", "random_section_data",
    "sorted_section_data",
]

DENOMINATOR_BOUND = 10 ** 4
RECOGNITION_TOL = 1e-7


class PairingError(ValueError):
    pass


class PluckerError(ValueError):
    pass


class RecognitionError(ValueError):
    pass


# ---------------------------------------------------------------- nerve and sections

@dataclass(frozen=True)
class Nerve:
    """Abstract simplicial complex on chart indices; simplices are sorted tuples, closed under faces."""
    simplices: frozenset

    @classmethod
    def from_maximal(cls, maximal: Iterable[Sequence[int]]) -> "Nerve":
        out = set()
        for s in maximal:
            s = tuple(sorted(s))
            for k in range(1, len(s) + 1):
                out.update(itertools.combinations(s, k))
        return cls(frozenset(out))

    @classmethod
    def simplex_boundary(cls, n: int) -> "Nerve":
        """Nerve of the boundary of the n-simplex: all proper subsets of {0..n}."""
        return cls.from_maximal(itertools.combinations(range(n + 1), n))

    @classmethod
    def full_simplex(cls, n: int) -> "Nerve":
        return cls.from_maximal([range(n + 1)])

    def of_size(self, k: int) -> list[tuple]:
        return sorted(s for s in self.simplices if len(s) == k)

    @property
    def charts(self) -> list[int]:
        return sorted({i for s in self.simplices for i in s})


def _faces(s: tuple) -> list[tuple[int, tuple]]:
    return [((-1) ** t, s[:t] + s[t + 1:]) for t in range(len(s))]


@dataclass
class SectionData:
    """Delta(s_i, s_j) for i < j (antisymmetric extension), exact Fractions or complex numbers."""
    deltas: dict
    plucker_tol: float = 1e-9

    @classmethod
    def from_vectors(cls, vectors: Mapping[int, Sequence], volume=1) -> "SectionData":
        d = {}
        for i, j in itertools.combinations(sorted(vectors), 2):
            u, v = vectors[i], vectors[j]
            d[(i, j)] = volume * (u[0] * v[1] - u[1] * v[0])
        return cls(d)

    def delta(self, i: int, j: int):
        if i < j:
            return self.deltas[(i, j)]
        return -self.deltas[(j, i)]

    @property
    def exact(self) -> bool:
        return all(isinstance(v, (int, Fraction)) for v in self.deltas.values())

    def plucker_residual(self, quad: tuple) -> float:
        i, j, k, l = quad
        d = self.delta
        lhs = d(i, k) * d(j, l)
        rhs = d(i, j) * d(k, l) + d(i, l) * d(j, k)
        scale = max(1.0, abs(complex(lhs)))
        return abs(complex(lhs - rhs)) / scale

    def cross_ratio(self, quad: tuple):
        i, j, k, l = quad
        d = self.delta
        return d(i, l) * d(j, k) / (d(i, k) * d(j, l))

    def to_json(self) -> dict:
        def enc(v):
            if isinstance(v, (int, Fraction)):
                return str(Fraction(v))
            v = complex(v)
            return [v.real, v.imag]
        return {"delta": {f"{i},{j}": {"value": enc(v)} for (i, j), v in sorted(self.deltas.items())}}

    @classmethod
    def from_json(cls, data: Mapping) -> "SectionData":
        d = {}
        for key, entry in data["delta"].items():
            i, j = (int(x) for x in key.split(","))
            v = entry["value"] if isinstance(entry, Mapping) else entry
            v = Fraction(v) if isinstance(v, str) else complex(v[0], v[1])
            if i > j:
                i, j, v = j, i, -v
            d[(i, j)] = v
        return cls(d)


def random_section_data(charts: int, rng: random.Random, bound: int = 9) -> SectionData:
    """Generic rational sections in Q^2 (pairwise nonproportional)."""
    while True:
        vs = {i: (Fraction(rng.randint(-bound, bound)), Fraction(rng.randint(-bound, bound))) for i in range(charts)}
        data = SectionData.from_vectors(vs)
        if all(v != 0 for v in data.deltas.values()):
            return data


def sorted_section_data(ts: Sequence) -> SectionData:
    """Sections (1, t_i) with increasing t_i: every Delta positive, every cross-ratio in (0,1)."""
    return SectionData.from_vectors({i: (Fraction(1), Fraction(t)) for i, t in enumerate(ts)})


# ---------------------------------------------------------------- logarithms

def _atom(data: SectionData, i: int, j: int):
    v = complex(data.deltas[(i, j)])
    return symbol(f"logΔ{i}{j}", cmath.log(v))


def log_delta(data: SectionData, i: int, j: int, shift: int = 0) -> Lin:
    """Branch of log Delta(s_i, s_j): principal log Delta_{min,max} + (i pi if reversed) + shift 2 pi i."""
    a, b = min(i, j), max(i, j)
    out = Lin([(1, _atom(data, a, b))])
    if i > j:
        # log(-x) = log x + i pi (principal) unless that leaves the strip
        v = complex(data.deltas[(a, b)])
        half = Fraction(1, 2) if v.imag < 0 or (v.imag == 0 and v.real > 0) else Fraction(-1, 2)
        out = out + Lin([(half, two_pi_i(1))])
    if shift:
        out = out + Lin([(shift, two_pi_i(1))])
    return out


def _principal_offset(lin: Lin, target: complex) -> int:
    k = (cmath.log(target) - lin.value) / TWO_PI_I
    n = round(k.real)
    if abs(k - n) > 1e-8:
        raise PluckerError(f"log combination misses the target by {abs(k - n)} periods")
    return n


# ---------------------------------------------------------------- the cochain pieces

def build_C3(data: SectionData, triple: tuple) -> FormalSum:
    """l_2 of the three sections as units: D12 ^ D23 + D23 ^ D13 + D13 ^ D12."""
    i, j, k = triple
    lins = {p: log_delta(data, *p) for p in ((i, j), (j, k), (i, k))}
    rows = [(1, [exp_lin(lins[(i, j)]), exp_lin(lins[(j, k)])]),
            (1, [exp_lin(lins[(j, k)]), exp_lin(lins[(i, k)])]),
            (1, [exp_lin(lins[(i, k)]), exp_lin(lins[(i, j)])])]
    return FormalSum.build("wedge", 0, rows, 2)


def build_Ctilde3(data: SectionData, triple: tuple, shifts: Mapping | None = None) -> FormalSum:
    """log D12 ^ log D23 + log D23 ^ log D13 + log D13 ^ log D12 with recorded branches."""
    i, j, k = triple
    shifts = shifts or {}

    def lg(p):
        return log_delta(data, *p, shift=shifts.get((triple, p), 0))

    a, b, c = lg((i, j)), lg((j, k)), lg((i, k))
    return FormalSum.build("wedge", 0, [(1, [a, b]), (1, [b, c]), (1, [c, a])], 2)


@dataclass
class BlochEntry:
    """C4 on a 4-simplex: the point r with exact log r and log(1-r) on their principal branches."""
    quad: tuple
    r: object
    log_r: Lin
    log_1mr: Lin
    offsets: tuple


def build_C4(data: SectionData, quad: tuple) -> BlochEntry:
    i, j, k, l = quad
    res = data.plucker_residual(quad)
    if res > data.plucker_tol:
        raise PluckerError(f"Plucker identity fails on {quad} (residual {res:.3g})")
    r = data.cross_ratio(quad)
    lg = lambda a, b: Lin([(1, _atom(data, min(a, b), max(a, b)))])
    base_r = lg(i, l) + lg(j, k) - lg(i, k) - lg(j, l)
    base_1mr = lg(i, j) + lg(k, l) - lg(i, k) - lg(j, l)
    k1 = _principal_offset(base_r, complex(r))
    k2 = _principal_offset(base_1mr, complex(1 - r))
    return BlochEntry(quad, r, base_r + Lin([(k1, two_pi_i(1))]), base_1mr + Lin([(k2, two_pi_i(1))]), (k1, k2))


def cech(values: Mapping[tuple, FormalSum], simplex: tuple) -> FormalSum:
    out = None
    for sign, face in _faces(simplex):
        term = values[face].scale(sign)
        out = term if out is None else out + term
    return out


def correction_log_F(relation: FormalSum) -> Lin:
    """log F with relation = 2 pi i ^ log F, read off the exact normal form.

    Every term must pair with 2 pi i; anything else means the multiplicative
    relation was not witnessed termwise.
    """
    nf = normalize(relation, recognize=False)
    out = Lin()
    for c, (a, b) in nf.terms:
        if a.kind == "twopi":
            out = out + Lin([(c * a.q, b)])
        elif b.kind == "twopi":
            out = out + Lin([(-c * b.q, a)])
        else:
            raise PairingError(f"term {a!r} ^ {b!r} does not pair with 2 pi i")
    return out


def _L2(entry: BlochEntry) -> complex:
    r = complex(entry.r)
    li2 = complex(mpmath.polylog(2, r))
    return li2 + 0.5 * entry.log_1mr.value * entry.log_r.value + TWO_PI_I ** 2 / 24


def _p2_doubled(entry: BlochEntry) -> FormalSum:
    """log(1-r) ^ log r + 2 pi i ^ (2/2 pi i) L_2(r): the image of {r}_2 under the regulator map."""
    inner = Lin([(2, germ(_L2(entry) / TWO_PI_I, "L2/2πi"))])
    return (FormalSum.build("wedge", 0, [(1, [entry.log_1mr, entry.log_r])], 2)
            + FormalSum.build("wedge", 0, [(1, [two_pi_i(1), inner])], 2))


def build_Ctilde4(data: SectionData, quad: tuple, c3t: Mapping[tuple, FormalSum], entry: BlochEntry | None = None):
    """(C4~ as a linear slot, log F): 2 pi i ^ C4~ = delta C3~ + log(1-r) ^ log r + 2 pi i ^ (2/2 pi i) L_2(r)."""
    entry = entry or build_C4(data, quad)
    rel = cech(c3t, quad) + FormalSum.build("wedge", 0, [(1, [entry.log_1mr, entry.log_r])], 2)
    logF = correction_log_F(rel)
    c4t = Lin([(2, germ(_L2(entry) / TWO_PI_I, "L2/2πi"))]) + logF
    return c4t, logF


def recognize_rational(x: complex, bound: int = DENOMINATOR_BOUND, tol: float = RECOGNITION_TOL) -> tuple[Fraction, float]:
    q = Fraction(x.real).limit_denominator(bound)
    res = abs(x - float(q))
    if res > tol:
        raise RecognitionError(f"{x} is not within {tol} of a rational with denominator <= {bound} (residual {res:.3g})")
    return q, res


def build_Ctilde5(quint: tuple, c4t: Mapping[tuple, Lin]) -> tuple[Fraction, float, complex]:
    """C5~ = sum_t (-1)^t C4~(faces); returns (C5~ / 2 pi i as a rational, residual, raw value)."""
    val = sum(sign * c4t[face].value for sign, face in _faces(quint))
    q, res = recognize_rational(val / TWO_PI_I)
    return q, res, val


# ---------------------------------------------------------------- assembly

@dataclass
class Chern2Cochain:
    nerve: Nerve
    data: SectionData
    shifts: dict
    c3: dict = field(default_factory=dict)
    c3_tilde: dict = field(default_factory=dict)
    c4: dict = field(default_factory=dict)
    c4_tilde: dict = field(default_factory=dict)
    log_F: dict = field(default_factory=dict)
    c5_tilde: dict = field(default_factory=dict)
    residuals: dict = field(default_factory=dict)
    audit: list = field(default_factory=list)

    def report(self) -> dict:
        return {
            "charts": self.nerve.charts,
            "C5_over_2pii": {",".join(map(str, s)): str(q) for s, (q, _, _) in self.c5_tilde.items()},
            "max_denominator": max((q.denominator for q, _, _ in self.c5_tilde.values()), default=1),
            "residuals": self.residuals,
            "cocycle_residual": max(self.residuals.values(), default=0.0),
            "audit": self.audit,
        }

    def dumps(self) -> str:
        return json.dumps(self.report(), indent=2, default=str)


def _unit_residual(s: FormalSum) -> float:
    nf = normalize(s, recognize=False)
    return float(sum(abs(float(c)) for c, _ in nf.terms))


def assemble_class(nerve: Nerve, data: SectionData, shifts: Mapping | None = None) -> Chern2Cochain:
    """Build all pieces and check every slot of the cocycle condition.

    residuals: exp_c3 (wedge^2 exp C3~ vs C3), eqtme (units), eqtme_exact
    (exact Lambda^2 Q* when the data is rational, 0/1), plucker, c4_slot
    (2 pi i ^ C4~ vs delta C3~ + regulator of C4), c5_recognition, c5_cocycle.
    """
    shifts = dict(shifts or {})
    out = Chern2Cochain(nerve, data, shifts)
    res = {"exp_c3": 0.0, "eqtme": 0.0, "plucker": 0.0, "c4_slot": 0.0, "c5_recognition": 0.0, "c5_cocycle": 0.0}
    if data.exact:
        res["eqtme_exact"] = 0.0

    for t in nerve.of_size(3):
        out.c3[t] = build_C3(data, t)
        out.c3_tilde[t] = build_Ctilde3(data, t, shifts)
        rows = [(c, [exp_lin(a), exp_lin(b)]) for c, (a, b) in _lin_rows(out.c3_tilde[t])]
        res["exp_c3"] = max(res["exp_c3"], _unit_residual(FormalSum.build("wedge", 0, rows, 2) - out.c3[t]))
        for p in itertools.combinations(t, 2):
            out.audit.append({"simplex": list(t), "pair": list(p), "log_principal": _cpx(log_delta(data, *p).value),
                              "shift_2pii": shifts.get((t, p), 0)})

    for q in nerve.of_size(4):
        res["plucker"] = max(res["plucker"], data.plucker_residual(q))
        entry = build_C4(data, q)
        out.c4[q] = entry
        # EQTME in units: delta_cech C3 + (1-r) ^ r
        eq = cech(out.c3, q) + FormalSum.build("wedge", 0, [(1, [exp_lin(entry.log_1mr), exp_lin(entry.log_r)])], 2)
        res["eqtme"] = max(res["eqtme"], _unit_residual(eq))
        if data.exact:
            w = WedgeOfUnits.pair(1 - entry.r, entry.r)
            for sign, face in _faces(q):
                w = w + _l2_exact(data, face).scale(sign)
            res["eqtme_exact"] = max(res["eqtme_exact"], float(not w.is_zero()))
        c4t, logF = build_Ctilde4(data, q, out.c3_tilde, entry)
        out.c4_tilde[q] = c4t
        out.log_F[q] = logF
        slot = (cech(out.c3_tilde, q) + _p2_doubled(entry)
                - FormalSum.build("wedge", 0, [(1, [two_pi_i(1), c4t])], 2))
        res["c4_slot"] = max(res["c4_slot"], slot.residual())
        out.audit.append({"simplex": list(q), "cross_ratio": _cpx(entry.r), "log_r_offset": entry.offsets[0],
                          "log_1mr_offset": entry.offsets[1], "log_F": _cpx(logF.value),
                          "log_F_terms": [[str(c), a.tag or repr(a)] for c, a in logF]})

    for s in nerve.of_size(5):
        qv, r, raw = build_Ctilde5(s, out.c4_tilde)
        out.c5_tilde[s] = (qv, r, raw)
        res["c5_recognition"] = max(res["c5_recognition"], r)
    for s in nerve.of_size(6):
        tot = sum(sign * out.c5_tilde[face][0] for sign, face in _faces(s))
        res["c5_cocycle"] = max(res["c5_cocycle"], abs(float(tot)))
    out.residuals = res
    return out


def _l2_exact(data: SectionData, triple: tuple) -> WedgeOfUnits:
    i, j, k = triple
    d12, d23, d13 = data.delta(i, j), data.delta(j, k), data.delta(i, k)
    return WedgeOfUnits.pair(d12, d23) + WedgeOfUnits.pair(d23, d13) + WedgeOfUnits.pair(d13, d12)


def _lin_rows(s: FormalSum):
    return [(c, (Lin([(1, a)]) if not isinstance(a, Lin) else a, Lin([(1, b)]) if not isinstance(b, Lin) else b))
            for c, (a, b) in s.terms]


def _cpx(v) -> list:
    v = complex(v)
    return [v.real, v.imag]


def rebranch_coboundary_check(nerve: Nerve, data: SectionData, shifts: Mapping) -> dict:
    """Re-branching logs in C3~ changes the cochain by the coboundary of b,
    where C3~' - C3~ = 2 pi i ^ b on triples: then C4~' - C4~ = delta b and C5~' = C5~."""
    base = assemble_class(nerve, data)
    new = assemble_class(nerve, data, shifts)
    b = {}
    for t in nerve.of_size(3):
        b[t] = correction_log_F(new.c3_tilde[t] - base.c3_tilde[t])
    c4_res = 0.0
    for q in nerve.of_size(4):
        db = Lin()
        for sign, face in _faces(q):
            db = db + b[face] * sign
        c4_res = max(c4_res, abs((new.c4_tilde[q] - base.c4_tilde[q] - db).value))
    c5_res = max((abs(float(new.c5_tilde[s][0] - base.c5_tilde[s][0])) for s in nerve.of_size(5)), default=0.0)
    return {"c4": c4_res, "c5": c5_res}
