"""Graded tensor and wedge algebra over Q with complex-valued atoms.

A slot holds an Atom: an exact multiple of 2 pi i, an exact rational, an
additive germ (a complex number in O), or a unit (a complex number in O*).
Exact atoms are rescaled into the coefficient, so 2 pi i and 1 are the only
exact basis atoms and the torsion rule 2 pi i ^ q 2 pi i = 0 is automatic.
Germs are compared by value (see `ATOM_TOL`).
"""
from __future__ import annotations

import bisect
import itertools
import json
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Sequence, Union

import numpy as np

TWO_PI_I = 2j * math.pi
ATOM_TOL = 1e-9
QUANT_DIGITS = 12
RECOGNIZE_MAX_DEN = 120

__all__ = [
    "Atom", "Lin", "FormalSum", "AtomCollisionError", "ShapeError",
    "two_pi_i", "one", "rational", "germ", "unit", "symbol", "root_of_unity", "as_lin",
    "normalize", "star_product", "exp_atom", "exp_lin",
    "exp_differential", "lie_exp_differential",
    "FormSample", "exterior_derivative", "omega_tensor", "omega_wedge",
    "ConeCochain", "cone_differential", "reduced_cone_differential", "deligne_arrows",
]


class AtomCollisionError(ValueError):
    """Two germs are within tolerance of distinct representatives."""


class ShapeError(ValueError):
    pass


# ---------------------------------------------------------------- atoms

@dataclass(frozen=True)
class Atom:
    kind: str  # twopi | rational | germ | unit | symbol
    value: complex
    q: Fraction | None = None
    tag: str | None = None
    branch: str | None = None

    def key(self) -> tuple:
        if self.kind == "twopi":
            return (0,)
        if self.kind == "rational":
            return (1,)
        if self.kind == "unit" and self.q is not None:
            return (2, self.q)
        if self.kind == "symbol":
            return (5, self.tag)
        v = complex(self.value)
        code = 3 if self.kind == "germ" else 4
        return (code, round(v.real, QUANT_DIGITS), round(v.imag, QUANT_DIGITS))

    @property
    def exact(self) -> bool:
        return self.kind in ("twopi", "rational")

    def to_json(self) -> dict:
        d = {"kind": self.kind, "value": [float(complex(self.value).real), float(complex(self.value).imag)]}
        if self.q is not None:
            d["q"] = str(self.q)
        if self.tag:
            d["tag"] = self.tag
        if self.branch:
            d["branch"] = self.branch
        return d

    @classmethod
    def from_json(cls, d: dict) -> "Atom":
        q = Fraction(d["q"]) if "q" in d else None
        return cls(d["kind"], complex(*d["value"]), q, d.get("tag"), d.get("branch"))

    def __repr__(self):
        if self.kind == "twopi":
            return "2πi" if self.q == 1 else f"{self.q}·2πi"
        if self.kind == "rational":
            return f"{self.q}"
        name = self.tag or f"{complex(self.value):.6g}"
        return f"[{name}]" if self.kind == "unit" else name


def two_pi_i(q=1) -> Atom:
    q = Fraction(q)
    return Atom("twopi", complex(q) * TWO_PI_I, q)


def rational(q) -> Atom:
    q = Fraction(q)
    return Atom("rational", complex(q), q)


def one() -> Atom:
    return rational(1)


def germ(value, tag: str | None = None, branch: str | None = None) -> Atom:
    return Atom("germ", complex(value), None, tag, branch)


def unit(value, tag: str | None = None) -> Atom:
    value = complex(value)
    if value == 0:
        raise ValueError("0 is not a unit")
    return Atom("unit", value, None, tag)


def symbol(name: str, value) -> Atom:
    """An exact basis element (e.g. a monomial in algebraically independent
    functions); compared by name, never merged by value."""
    return Atom("symbol", complex(value), None, name)


def root_of_unity(q) -> Atom:
    """exp(2 pi i q): torsion in O* tensor Q."""
    q = Fraction(q)
    return Atom("unit", complex(np.exp(TWO_PI_I * float(q))), q, f"exp(2πi·{q})")


# ---------------------------------------------------------------- linear slots

class Lin(tuple):
    """A Q-linear combination of atoms used as one slot; expanded multilinearly."""

    def __new__(cls, pairs: Iterable = ()):
        return super().__new__(cls, tuple((Fraction(c), a) for c, a in pairs if c != 0))

    def __add__(self, other):
        return Lin(tuple(self) + tuple(as_lin(other)))

    __radd__ = __add__

    def __neg__(self):
        return Lin((-c, a) for c, a in self)

    def __sub__(self, other):
        return self + (-as_lin(other))

    def __rsub__(self, other):
        return as_lin(other) + (-self)

    def __mul__(self, q):
        return Lin((c * Fraction(q), a) for c, a in self)

    __rmul__ = __mul__

    @property
    def value(self) -> complex:
        return sum((float(c) * complex(a.value) for c, a in self), 0j)


SlotLike = Union[Atom, Lin, complex, float, int]


def as_lin(x: SlotLike) -> Lin:
    if isinstance(x, Lin):
        return x
    if isinstance(x, Atom):
        return Lin([(1, x)])
    if isinstance(x, (Fraction, int)):
        return Lin([(1, rational(x))])
    return Lin([(1, germ(x))])


# ---------------------------------------------------------------- formal sums

Term = tuple  # (Fraction, tuple[Atom, ...])


@dataclass(frozen=True)
class FormalSum:
    arity: int
    symmetry: str = "wedge"  # wedge | tensor
    twist: int = 0
    terms: tuple = ()

    def __post_init__(self):
        if self.symmetry not in ("wedge", "tensor"):
            raise ShapeError(f"unknown symmetry {self.symmetry}")
        for c, slots in self.terms:
            if len(slots) != self.arity:
                raise ShapeError(f"term of length {len(slots)} in arity-{self.arity} sum")

    @classmethod
    def build(cls, symmetry: str, twist: int, rows: Iterable, arity: int | None = None) -> "FormalSum":
        """rows: iterable of (coeff, [slot, ...]); slots may be Lin combinations."""
        terms = []
        for coeff, slots in rows:
            lins = [as_lin(s) for s in slots]
            if arity is None:
                arity = len(lins)
            for combo in itertools.product(*lins):
                c = Fraction(coeff)
                for ci, _ in combo:
                    c *= ci
                if c:
                    terms.append((c, tuple(a for _, a in combo)))
        if arity is None:
            raise ShapeError("cannot infer arity of an empty sum")
        return cls(arity, symmetry, twist, tuple(terms))

    @classmethod
    def wedge(cls, *slots: SlotLike, coeff=1, twist: int = 0) -> "FormalSum":
        return cls.build("wedge", twist, [(coeff, slots)], len(slots))

    @classmethod
    def tensor(cls, *slots: SlotLike, coeff=1, twist: int = 0) -> "FormalSum":
        return cls.build("tensor", twist, [(coeff, slots)], len(slots))

    @classmethod
    def zero(cls, arity: int, symmetry: str = "wedge", twist: int = 0) -> "FormalSum":
        return cls(arity, symmetry, twist, ())

    def _check(self, other: "FormalSum"):
        if (self.arity, self.symmetry, self.twist) != (other.arity, other.symmetry, other.twist):
            raise ShapeError(f"shape mismatch {self.shape} vs {other.shape}")

    @property
    def shape(self):
        return (self.arity, self.symmetry, self.twist)

    def __add__(self, other: "FormalSum") -> "FormalSum":
        self._check(other)
        return FormalSum(self.arity, self.symmetry, self.twist, self.terms + other.terms)

    def __neg__(self) -> "FormalSum":
        return self.scale(-1)

    def __sub__(self, other: "FormalSum") -> "FormalSum":
        return self + (-other)

    def scale(self, q) -> "FormalSum":
        q = Fraction(q)
        return FormalSum(self.arity, self.symmetry, self.twist,
                         tuple((c * q, s) for c, s in self.terms if c * q))

    __rmul__ = lambda self, q: self.scale(q)

    def with_twist(self, twist: int) -> "FormalSum":
        return FormalSum(self.arity, self.symmetry, twist, self.terms)

    def normalize(self, atom_tol: float = ATOM_TOL, recognize: bool = True) -> "FormalSum":
        return normalize(self, atom_tol, recognize)

    def is_zero(self, atom_tol: float = ATOM_TOL) -> bool:
        return not normalize(self, atom_tol).terms

    def residual(self, atom_tol: float = ATOM_TOL) -> float:
        """0 when the normal form is empty, else the largest leftover term size."""
        nf = normalize(self, atom_tol)
        if not nf.terms:
            return 0.0
        return max(abs(float(c)) * math.prod(max(abs(complex(a.value)), 1e-300) for a in s)
                   for c, s in nf.terms)

    def numeric(self) -> "FormalSum":
        """Replace symbol atoms by germs carrying their values."""
        terms = tuple((c, tuple(Atom("germ", a.value, None, a.tag) if a.kind == "symbol" else a for a in sl))
                      for c, sl in self.terms)
        return FormalSum(self.arity, self.symmetry, self.twist, terms)

    def __len__(self):
        return len(self.terms)

    def __iter__(self):
        return iter(self.terms)

    def __repr__(self):
        if not self.terms:
            return "0"
        op = " ∧ " if self.symmetry == "wedge" else " ⊗ "
        parts = [f"{c}·({op.join(map(repr, s))})" for c, s in self.terms]
        tw = f" (twist {self.twist})" if self.twist else ""
        return " + ".join(parts) + tw

    # serialization
    def to_json(self) -> dict:
        return {"arity": self.arity, "symmetry": self.symmetry, "twist": self.twist,
                "terms": [{"coeff": str(c), "slots": [a.to_json() for a in s]} for c, s in self.terms]}

    def dumps(self) -> str:
        return json.dumps(self.to_json())

    @classmethod
    def from_json(cls, d: dict) -> "FormalSum":
        terms = tuple((Fraction(t["coeff"]), tuple(Atom.from_json(a) for a in t["slots"])) for t in d["terms"])
        return cls(d["arity"], d["symmetry"], d["twist"], terms)


# ---------------------------------------------------------------- normal form

def _cluster(values: Sequence[complex], tol: float, relative: bool) -> list[complex]:
    """Map each value to a representative within tol; ambiguous merges raise."""
    reps: list[complex] = []
    index: list[tuple[float, int]] = []
    out = []
    for v in values:
        scale = max(1.0, abs(v)) if relative else 1.0
        t = tol * scale
        lo = bisect.bisect_left(index, (v.real - t, -1))
        hits = []
        for j in range(lo, len(index)):
            re, k = index[j]
            if re > v.real + t:
                break
            if abs(reps[k] - v) <= t:
                hits.append(k)
        if not hits:
            reps.append(v)
            bisect.insort(index, (v.real, len(reps) - 1))
            out.append(v)
            continue
        if len(hits) > 1:
            a, b = (reps[k] for k in hits[:2])
            if abs(a - b) > t:
                raise AtomCollisionError(f"value {v} is within {t:g} of distinct atoms {a} and {b}")
        out.append(reps[hits[0]])
    return out


_TWOPI = two_pi_i(1)
_ONE = rational(1)


def _perm_sign(keys: list) -> tuple[int, list[int]]:
    order = sorted(range(len(keys)), key=lambda i: keys[i])
    sign, seen = 1, [False] * len(order)
    for i in range(len(order)):
        if seen[i]:
            continue
        j, length = i, 0
        while not seen[j]:
            seen[j] = True
            j = order[j]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign, order


def _recognize(v: complex, tol: float) -> Fraction | None:
    x = v / TWO_PI_I
    if abs(x.imag) > tol:
        return None
    q = Fraction(x.real).limit_denominator(RECOGNIZE_MAX_DEN)
    if abs(float(q) - x.real) <= tol:
        return q
    return None


def normalize(s: FormalSum, atom_tol: float = ATOM_TOL, recognize: bool = True) -> FormalSum:
    """Unique normal form of a formal sum (idempotent, Q-linear).

    Steps: rescale exact atoms into coefficients; drop torsion units and zero
    germs; merge germs within atom_tol; sort wedge slots; merge terms; collapse
    terms whose only non-exact slot is one additive germ (linearity in that
    slot); optionally recognize collapsed germs equal to rational multiples of
    2 pi i, so torsion such as 2 pi i ^ (2 pi i / 24) vanishes.
    """
    raw = []
    for c, slots in s.terms:
        c = Fraction(c)
        new = []
        for a in slots:
            if a.exact:
                c *= a.q
                new.append(_TWOPI if a.kind == "twopi" else _ONE)
            elif a.kind == "unit":
                if a.q is not None or abs(a.value - 1) <= atom_tol:
                    c = Fraction(0)
                new.append(a)
            else:
                if a.kind == "germ" and abs(a.value) <= atom_tol:
                    c = Fraction(0)
                new.append(a)
            if c == 0:
                break
        if c:
            raw.append([c, new])

    # canonical representatives for germs and units
    for kind, relative in (("germ", False), ("unit", True)):
        pos = [(i, j) for i, (_, sl) in enumerate(raw) for j, a in enumerate(sl) if a.kind == kind]
        if not pos:
            continue
        reps = _cluster([complex(raw[i][1][j].value) for i, j in pos], atom_tol, relative)
        first: dict[complex, Atom] = {}
        for (i, j), r in zip(pos, reps):
            a = raw[i][1][j]
            if r not in first:
                first[r] = Atom(kind, r, None, a.tag, a.branch)
            raw[i][1][j] = first[r]

    merged = _merge(raw, s.symmetry)
    collapsed = _collapse(merged, s.symmetry, atom_tol, recognize)
    if collapsed is not merged:
        merged = _merge([[c, list(sl)] for sl, c in collapsed.items()], s.symmetry)
    terms = tuple(sorted(((c, sl) for sl, c in merged.items()), key=lambda t: [a.key() for a in t[1]]))
    return FormalSum(s.arity, s.symmetry, s.twist, terms)


def _merge(raw, symmetry) -> dict:
    acc: dict[tuple, Fraction] = {}
    for c, sl in raw:
        if symmetry == "wedge":
            keys = [a.key() for a in sl]
            if len(set(keys)) < len(keys):
                continue
            sign, order = _perm_sign(keys)
            sl = [sl[i] for i in order]
            c = c * sign
        t = tuple(sl)
        acc[t] = acc.get(t, Fraction(0)) + c
    return {k: v for k, v in acc.items() if v}


def _collapse(merged: dict, symmetry: str, tol: float, recognize: bool):
    groups: dict[tuple, list] = {}
    for sl, c in merged.items():
        g = [j for j, a in enumerate(sl) if a.kind == "germ"]
        if len(g) == 1 and all(a.exact for j, a in enumerate(sl) if j != g[0]):
            tmpl = tuple(None if j == g[0] else a for j, a in enumerate(sl))
            groups.setdefault(tmpl, []).append((sl, c))
    if not groups:
        return merged
    out = {sl: c for sl, c in merged.items()}
    for tmpl, members in groups.items():
        for sl, _ in members:
            del out[sl]
        total = sum(float(c) * complex(sl[tmpl.index(None)].value) for sl, c in members)
        scale = max([1.0] + [abs(float(c)) * abs(sl[tmpl.index(None)].value) for sl, c in members])
        if abs(total) <= tol * scale:
            continue
        j = tmpl.index(None)
        q = _recognize(total, tol * scale) if recognize else None
        if q is not None:
            new = tuple(_TWOPI if i == j else a for i, a in enumerate(tmpl))
            coeff = q
        else:
            if len(members) == 1:
                src = members[0][0][j]
                tag = src.tag if members[0][1] == 1 else None
                branch = src.branch
            else:
                tag, branch = None, None
            new = tuple(Atom("germ", total, None, tag, branch) if i == j else a for i, a in enumerate(tmpl))
            coeff = Fraction(1)
        out[new] = out.get(new, Fraction(0)) + coeff
    return {k: v for k, v in out.items() if v}


# ---------------------------------------------------------------- star product

def _atom_product(a: Atom, b: Atom) -> tuple[Fraction, Atom]:
    """a*b := ab/(2 pi i) on additive atoms, returned as (coeff, atom)."""
    if a.kind == "unit" or b.kind == "unit":
        raise ShapeError("star product is defined on additive slots only")
    if a.kind == "twopi":
        if b.exact:
            return a.q * b.q, (_TWOPI if b.kind == "twopi" else _ONE)
        return a.q, b
    if b.kind == "twopi":
        c, x = _atom_product(b, a)
        return c, x
    if a.kind == "rational" and b.kind == "rational":
        return a.q * b.q, Atom("germ", 1 / TWO_PI_I, None, "1/2πi")
    if a.kind == "rational":
        return a.q, Atom("germ", complex(b.value) / TWO_PI_I, None, None)
    if b.kind == "rational":
        return b.q, Atom("germ", complex(a.value) / TWO_PI_I, None, None)
    tag = f"{a.tag}·{b.tag}/2πi" if a.tag and b.tag else None
    return Fraction(1), Atom("germ", complex(a.value) * complex(b.value) / TWO_PI_I, None, tag)


def star_product(u: FormalSum, v: FormalSum) -> FormalSum:
    """(a_0..a_k)*(b_0..b_l) = sum (-1)^(k-j+i) a_0..^a_i..a_k ^ a_i b_j ^ b_0..^b_j..b_l."""
    if u.symmetry != "wedge" or v.symmetry != "wedge":
        raise ShapeError("star product needs wedge sums")
    k, l = u.arity - 1, v.arity - 1
    rows = []
    for ca, A in u.terms:
        for cb, B in v.terms:
            for i in range(k + 1):
                for j in range(l + 1):
                    c, ab = _atom_product(A[i], B[j])
                    slots = A[:i] + A[i + 1:] + (ab,) + B[:j] + B[j + 1:]
                    rows.append((ca * cb * c * (-1) ** (k - j + i), slots))
    return FormalSum.build("wedge", u.twist + v.twist, rows, k + l + 1)


# ---------------------------------------------------------------- differentials

def exp_atom(a: Atom) -> Atom:
    if a.kind == "twopi":
        return root_of_unity(a.q)
    if a.kind == "rational":
        return unit(np.exp(float(a.q)), f"e^{a.q}")
    if a.kind in ("germ", "symbol"):
        return unit(np.exp(complex(a.value)), f"exp({a.tag})" if a.tag else None)
    raise ShapeError("exp of a unit slot")


def exp_lin(x: Lin) -> Lin:
    return Lin((c, exp_atom(a)) for c, a in x)


def _exp_slot_terms(s: FormalSum, position: int) -> list:
    rows = []
    for c, slots in s.terms:
        rows.append((c, slots[:position] + (exp_atom(slots[position]),) + slots[position + 1:]))
    return rows


def _check_degree(x: FormalSum, n: int, k: int, symmetry: str):
    if x.symmetry != symmetry:
        raise ShapeError(f"expected {symmetry} sum")
    if not 1 <= k <= n:
        raise ShapeError(f"degree {k} outside 1..{n}")
    if x.arity != k or x.twist != n - k:
        raise ShapeError(f"degree-{k} cochain of weight {n} needs arity {k}, twist {n - k}; got {x.shape}")
    for _, slots in x.terms:
        kinds = [a.kind == "unit" for a in slots]
        want = [True] * (k - 1) + [False] if symmetry == "tensor" else [False] * k
        if kinds != want:
            raise ShapeError(f"slot kinds {kinds} do not fit degree {k}")


def exp_differential(x: FormalSum, n: int, k: int) -> FormalSum:
    """Differential of the exponential complex on a degree-k cochain (k slots).

    a_1 x .. x a_{k-1} x b x (2 pi i)^(n-k)  ->  a_1 x .. x exp(b) x 2 pi i x (2 pi i)^(n-k-1).
    """
    _check_degree(x, n, k, "tensor")
    rows = _exp_slot_terms(x, k - 1)
    if k < n:
        rows = [(c, sl + (_TWOPI,)) for c, sl in rows]
        return FormalSum.build("tensor", n - k - 1, rows, k + 1)
    return FormalSum.build("tensor", 0, rows, k)


def lie_exp_differential(x: FormalSum, n: int, k: int) -> FormalSum:
    """Differential of the Lie-exponential complex on Lambda^k O (n-k twist)."""
    if x.symmetry != "wedge" or x.arity != k or x.twist != n - k or not 1 <= k <= n:
        raise ShapeError(f"degree-{k} cochain of weight {n} needs wedge arity {k}, twist {n - k}; got {x.shape}")
    if k < n:
        rows = [(c, (_TWOPI,) + sl) for c, sl in x.terms]
        return FormalSum.build("wedge", n - k - 1, rows, k + 1)
    rows = [(c, tuple(exp_atom(a) for a in sl)) for c, sl in x.terms]
    return FormalSum.build("wedge", 0, rows, k)


# ---------------------------------------------------------------- sampled forms

Vector = np.ndarray


@dataclass(frozen=True)
class FormSample:
    """A k-form on a real parameter domain, evaluated on k tangent vectors."""
    degree: int
    fn: Callable[[np.ndarray, Sequence[Vector]], complex]

    def __call__(self, point, vectors: Sequence[Vector] = ()) -> complex:
        if len(vectors) != self.degree:
            raise ShapeError(f"{self.degree}-form evaluated on {len(vectors)} vectors")
        return complex(self.fn(np.asarray(point, dtype=float), [np.asarray(v, dtype=float) for v in vectors]))

    def __add__(self, other: "FormSample") -> "FormSample":
        if other.degree != self.degree:
            raise ShapeError("degree mismatch")
        return FormSample(self.degree, lambda p, vs: self.fn(p, vs) + other.fn(p, vs))

    def __neg__(self):
        return self.scale(-1)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c) -> "FormSample":
        return FormSample(self.degree, lambda p, vs: c * self.fn(p, vs))

    @classmethod
    def zero(cls, degree: int) -> "FormSample":
        return cls(degree, lambda p, vs: 0j)

    @classmethod
    def function(cls, f: Callable[[np.ndarray], complex]) -> "FormSample":
        return cls(0, lambda p, vs: f(p))


def directional_derivative(f: Callable[[np.ndarray], complex], p, v, h: float = 1e-4) -> complex:
    """Central difference with one Richardson step (error O(h^4))."""
    p = np.asarray(p, dtype=float)
    v = np.asarray(v, dtype=float)
    d1 = (f(p + h * v) - f(p - h * v)) / (2 * h)
    d2 = (f(p + 0.5 * h * v) - f(p - 0.5 * h * v)) / h
    return (4 * d2 - d1) / 3


def exterior_derivative(form: FormSample, h: float = 1e-4) -> FormSample:
    """d w (v_0..v_k) = sum_i (-1)^i D_{v_i} w(v_0..^v_i..v_k) for constant vector fields."""
    k = form.degree

    def fn(p, vs):
        total = 0j
        for i in range(k + 1):
            rest = list(vs[:i]) + list(vs[i + 1:])
            total += (-1) ** i * directional_derivative(lambda x: form.fn(x, rest), p, vs[i], h)
        return total

    return FormSample(k + 1, fn)


def wedge_forms(a: FormSample, b: FormSample) -> FormSample:
    """Exterior product via the shuffle formula."""
    k, l = a.degree, b.degree

    def fn(p, vs):
        total = 0j
        for idx in itertools.combinations(range(k + l), k):
            rest = [i for i in range(k + l) if i not in idx]
            sign, _ = _perm_sign(list(idx) + rest)
            total += sign * a.fn(p, [vs[i] for i in idx]) * b.fn(p, [vs[i] for i in rest])
        return total

    return FormSample(k + l, fn)


Family = Callable[[np.ndarray], FormalSum]


def _slot_jets(family: Family, p, vectors, h: float):
    """Slot values at p and their directional derivatives, term by term."""
    base = family(p)
    vals = [[complex(a.value) for a in sl] for _, sl in base.terms]
    ders = []
    for v in vectors:
        fs = [family(p + s * h * v) for s in (1, -1, 0.5, -0.5)]
        for f in fs:
            if len(f.terms) != len(base.terms):
                raise ShapeError("family changes term structure near the sample point")
        d = []
        for t in range(len(base.terms)):
            row = []
            for j in range(base.arity):
                a, b, c, e = (complex(f.terms[t][1][j].value) for f in fs)
                row.append((4 * (c - e) / h - (a - b) / (2 * h)) / 3)
            d.append(row)
        ders.append(d)
    return base, vals, ders


def omega_tensor(family: Family, n: int, m: int, h: float = 1e-4) -> FormSample:
    """The map from the exponential complex to forms, on a parametrized cochain.

    (2 pi i)^(n-m-1) f_1 x .. x f_m x g  ->  (2 pi i)^(n-m-1) (-1)^m g dlog f_1 ^ .. ^ dlog f_m,
    and f_1 x .. x f_n -> (-1)^n dlog f_1 ^ .. ^ dlog f_n.
    """
    if not 0 <= m <= n:
        raise ShapeError("m outside 0..n")

    def fn(p, vs):
        base, vals, ders = _slot_jets(family, p, vs, h)
        if m < n:
            _check_degree(base, n, m + 1, "tensor")
        elif base.arity != n or base.twist != 0:
            raise ShapeError("top degree needs n unit slots")
        tw = TWO_PI_I ** base.twist
        total = 0j
        for t, (c, sl) in enumerate(base.terms):
            mat = np.array([[ders[j][t][i] / vals[t][i] for j in range(m)] for i in range(m)], dtype=complex)
            det = np.linalg.det(mat) if m else 1.0
            g = vals[t][m] if m < n else 1.0
            total += float(c) * tw * (-1) ** m * g * det
        return total

    return FormSample(m, fn)


def omega_wedge(family: Family, n: int, m: int, h: float = 1e-4) -> FormSample:
    """The map from the Lie-exponential complex to forms.

    (2 pi i)^(n-m-1) f_0 ^ .. ^ f_m -> (2 pi i)^(n-m-1) m! sum_j (-1)^j f_j df_0 ^ .. ^df_j^ .. ^ df_m,
    and f_1 ^ .. ^ f_n (units) -> n! dlog f_1 ^ .. ^ dlog f_n.
    For n = 2, m = 1 this is f ^ g -> f dg - g df; the other common
    normalization (1/2)(f dg - g df) is `scale(1/2)` of this.
    """
    if not 0 <= m <= n:
        raise ShapeError("m outside 0..n")

    def fn(p, vs):
        base, vals, ders = _slot_jets(family, p, vs, h)
        total = 0j
        if m < n:
            if base.arity != m + 1 or base.twist != n - m - 1:
                raise ShapeError(f"expected arity {m + 1}, twist {n - m - 1}; got {base.shape}")
            tw = TWO_PI_I ** base.twist * math.factorial(m)
            for t, (c, sl) in enumerate(base.terms):
                for j in range(m + 1):
                    rows = [i for i in range(m + 1) if i != j]
                    mat = np.array([[ders[a][t][i] for a in range(m)] for i in rows], dtype=complex)
                    det = np.linalg.det(mat) if m else 1.0
                    total += float(c) * tw * (-1) ** j * vals[t][j] * det
        else:
            if base.arity != n or base.twist != 0:
                raise ShapeError("top degree needs n unit slots")
            for t, (c, sl) in enumerate(base.terms):
                mat = np.array([[ders[a][t][i] / vals[t][i] for a in range(n)] for i in range(n)], dtype=complex)
                total += float(c) * math.factorial(n) * np.linalg.det(mat)
        return total

    return FormSample(m, fn)


def omega_tensor_signed(family: Family, n: int, m: int, h: float = 1e-4) -> FormSample:
    """omega_tensor times (-1)^(m(m+1)/2): the sign twist that makes it commute with d."""
    return omega_tensor(family, n, m, h).scale((-1) ** (m * (m + 1) // 2))


# ---------------------------------------------------------------- cone

@dataclass(frozen=True)
class ConeCochain:
    """Degree-p cochain of Cone(Q_E(n) + F^n -> forms)[-1]: (a, b, c).

    a: family of degree-p exponential cochains (p+1 slots), b: a p-form in F^n
    (None unless p >= n), c: a (p-1)-form.
    """
    degree: int
    a: Family | None = None
    b: FormSample | None = None
    c: FormSample | None = None


def cone_differential(x: ConeCochain, n: int, h: float = 1e-4) -> ConeCochain:
    """d(a, b, c) = (d a, d b, Omega(a) - b - d c)."""
    p = x.degree
    if x.b is not None and x.b.degree != p:
        raise ShapeError("b has the wrong degree")
    if x.c is not None and x.c.degree != p - 1:
        raise ShapeError("c has the wrong degree")
    if x.b is not None and p < n:
        raise ShapeError("b must lie in F^n")
    a_next = None
    if x.a is not None and p < n:
        fam = x.a
        a_next = lambda t: exp_differential(fam(t), n, p + 1)
    b_next = exterior_derivative(x.b, h) if x.b is not None else None
    c_next = FormSample.zero(p)
    if x.a is not None and p <= n:
        c_next = c_next + omega_tensor_signed(x.a, n, p, h)
    if x.b is not None:
        c_next = c_next - x.b
    if x.c is not None:
        c_next = c_next - exterior_derivative(x.c, h)
    if b_next is None and p + 1 >= n:
        b_next = FormSample.zero(p + 1)
    return ConeCochain(p + 1, a_next, b_next, c_next)


def reduced_cone_differential(x: ConeCochain, n: int, h: float = 1e-4) -> ConeCochain:
    """The quotient model: (a, [c]) -> (d a, [Omega(a) - d c]) with forms of degree >= n set to 0."""
    p = x.degree
    a_next = None
    if x.a is not None and p < n:
        fam = x.a
        a_next = lambda t: exp_differential(fam(t), n, p + 1)
    if p >= n:
        c_next = FormSample.zero(p)
    else:
        c_next = FormSample.zero(p)
        if x.a is not None:
            c_next = c_next + omega_tensor_signed(x.a, n, p, h)
        if x.c is not None:
            c_next = c_next - exterior_derivative(x.c, h)
    return ConeCochain(p + 1, a_next, None, c_next)


def deligne_arrows(n: int, top: int | None = None) -> list[tuple[str, str, str]]:
    """Arrows of the bicomplex whose total complex is the exponential Deligne complex."""
    top = n + 1 if top is None else top

    def E(k):
        if k == 0:
            return f"O({n - 1})"
        units = "⊗".join(["O*"] * k)
        if k == n:
            return units
        return f"{units}⊗O({n - k - 1})" if n - k - 1 else f"{units}⊗O"

    arrows = []
    for k in range(n):
        arrows.append((E(k), E(k + 1), "d_E"))
    for k in range(n + 1):
        arrows.append((E(k), f"Omega^{k}", f"Omega_{n}^({k})"))
    for k in range(n, top + 1):
        arrows.append((f"F^{n}:Omega^{k}", f"Omega^{k}", "="))
        if k < top:
            arrows.append((f"F^{n}:Omega^{k}", f"F^{n}:Omega^{k + 1}", "d"))
    for k in range(top):
        arrows.append((f"Omega^{k}", f"Omega^{k + 1}", "d"))
    return arrows
