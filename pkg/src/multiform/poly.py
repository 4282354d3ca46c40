"""Sparse exact polynomial arithmetic over Z, Q and Z/n with graded variables.

Monomials are packed into a single Python integer, one 8-bit field per
variable plus two bookkeeping fields (total degree and geometric degree)
that accumulate automatically under addition of packed monomials.  The top
bit of every field is a guard bit, so exponents are limited to 0..127 and
monomial product, quotient and divisibility all run in O(1) big-int ops:

    product        m1 + m2
    divisibility   ((m2 | guards) - m1) & guards == guards
    quotient       m2 - m1

Polynomials are dicts {packed monomial: coefficient} wrapped in a thin
class; values are treated as immutable once constructed.  Coefficients are
plain ints (Z), fractions.Fraction (Q) or ints reduced mod n (Z/n).

Rings flagged with eager_epsilon keep the exponent of the epsilon variable
reduced mod 2 at all times (epsilon^2 = 1); rings used for ideal
computations leave epsilon alone and adjoin the relation instead.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Iterator

_FIELD = 8
_MASK = 0x7F


class CoefficientRing:
    """One of Z, Q or Z/n.  Use the module constants ZZ, QQ or Zmod(n)."""

    __slots__ = ("kind", "modulus")

    def __init__(self, kind: str, modulus: int | None = None):
        if kind not in ("Z", "Q", "Zn"):
            raise ValueError(f"unknown coefficient ring kind {kind!r}")
        if kind == "Zn":
            if not isinstance(modulus, int) or modulus < 2:
                raise ValueError("Zn needs an integer modulus >= 2")
        elif modulus is not None:
            raise ValueError("modulus only makes sense for Zn")
        self.kind = kind
        self.modulus = modulus

    @property
    def is_field(self) -> bool:
        if self.kind == "Q":
            return True
        if self.kind == "Zn":
            return _is_prime(self.modulus)
        return False

    def normalize(self, c):
        if self.kind == "Z":
            if isinstance(c, Fraction):
                if c.denominator != 1:
                    raise ValueError(f"{c} is not an integer coefficient")
                return int(c)
            return int(c)
        if self.kind == "Q":
            return Fraction(c)
        return int(c) % self.modulus

    def fmt(self, c) -> str:
        if self.kind == "Q":
            c = Fraction(c)
            if c.denominator == 1:
                return str(c.numerator)
            return f"{c.numerator}/{c.denominator}"
        return str(c)

    def __eq__(self, other):
        return (
            isinstance(other, CoefficientRing)
            and self.kind == other.kind
            and self.modulus == other.modulus
        )

    def __hash__(self):
        return hash((self.kind, self.modulus))

    def __repr__(self):
        return {"Z": "ZZ", "Q": "QQ"}.get(self.kind, f"Zmod({self.modulus})")


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


ZZ = CoefficientRing("Z")
QQ = CoefficientRing("Q")


def Zmod(n: int) -> CoefficientRing:
    return CoefficientRing("Zn", n)


# Variable kinds.  Grades: epsilon and the 2-inverter are grade 0, a ternary
# coefficient a^l_{ijk} has grade i+j+k-l, a 2-valued coefficient a^l_{ij}
# has grade i+j-l, geometric variables have grade +1 and the t marker -1 so
# that graded laws have balanced terms.
KIND_EPSILON = "epsilon"
KIND_FTL = "ftl-coeff"
KIND_2FGL = "twofgl-coeff"
KIND_GEOM = "geometric"
KIND_T = "t-marker"
KIND_INVERTER = "aux-inverter"
KIND_USER = "user"


@dataclass(frozen=True)
class Variable:
    name: str
    kind: str = KIND_USER
    grade: int = 0
    index: tuple = ()

    def __post_init__(self):
        if not re.fullmatch(r"[A-Za-z][A-Za-z0-9_]*", self.name):
            raise ValueError(f"bad variable name {self.name!r}")
        if self.kind == KIND_FTL:
            l, i, j, k = self.index
            expected = i + j + k - l
            if self.grade != expected:
                raise ValueError(f"{self.name}: grade {self.grade} != {expected}")
        if self.kind == KIND_2FGL:
            l, i, j = self.index
            if self.grade != i + j - l:
                raise ValueError(f"{self.name}: bad grade")

    def __repr__(self):
        return self.name


def epsilon_var() -> Variable:
    return Variable("e", KIND_EPSILON, 0)


def inverter_var() -> Variable:
    return Variable("alpha", KIND_INVERTER, 0)


def geom_var(name: str) -> Variable:
    return Variable(name, KIND_GEOM, 1)


def t_var() -> Variable:
    return Variable("t", KIND_T, -1)


def ftl_coeff_var(l: int, i: int, j: int, k: int) -> Variable:
    if not (i >= j >= k >= 0):
        raise ValueError("orbit index must be weakly decreasing")
    if max(i, j, k) > 9:
        name = f"a{l}_{i}_{j}_{k}"
    else:
        name = f"a{l}_{i}{j}{k}"
    return Variable(name, KIND_FTL, i + j + k - l, (l, i, j, k))


def twofgl_coeff_var(l: int, i: int, j: int) -> Variable:
    if not (i >= j >= 0):
        raise ValueError("orbit index must be weakly decreasing")
    name = f"a{l}_{i}{j}" if max(i, j) <= 9 else f"a{l}_{i}_{j}"
    return Variable(name, KIND_2FGL, i + j - l, (l, i, j))


@dataclass(frozen=True)
class MonomialOrder:
    """degrevlex (default), lex, or block (degrevlex inside each block)."""

    kind: str = "degrevlex"
    blocks: tuple[tuple[int, ...], ...] = ()

    def __post_init__(self):
        if self.kind not in ("degrevlex", "lex", "block"):
            raise ValueError(f"unknown order {self.kind!r}")
        if self.kind == "block" and not self.blocks:
            raise ValueError("block order needs blocks")


DEGREVLEX = MonomialOrder("degrevlex")
LEX = MonomialOrder("lex")


class PolyRing:
    """A polynomial ring with a fixed variable tuple in priority order.

    vars[0] is the highest-priority variable for the monomial order.  At
    most one variable of kind epsilon and one t marker are allowed.
    """

    def __init__(
        self,
        variables: Iterable[Variable],
        coeff: CoefficientRing = ZZ,
        order: MonomialOrder = DEGREVLEX,
        eager_epsilon: bool = True,
    ):
        self.vars = tuple(variables)
        self.coeff = coeff
        self.order = order
        self.eager_epsilon = eager_epsilon
        n = len(self.vars)
        self.nvars = n
        names = [v.name for v in self.vars]
        if len(set(names)) != n:
            raise ValueError("duplicate variable names")
        self._index = {v.name: i for i, v in enumerate(self.vars)}
        for i, v in enumerate(self.vars):
            self._index[v] = i
        self._gdeg_shift = _FIELD * n
        self._deg_shift = _FIELD * (n + 1)
        self._guard = 0
        for i in range(n + 2):
            self._guard |= 0x80 << (_FIELD * i)
        # unit monomial per variable: exponent 1 plus bookkeeping increments
        deg_unit = 1 << self._deg_shift
        gdeg_unit = 1 << self._gdeg_shift
        self._unit = []
        for i, v in enumerate(self.vars):
            u = (1 << (_FIELD * i)) + deg_unit
            if v.kind == KIND_GEOM:
                u += gdeg_unit
            self._unit.append(u)
        eps = [i for i, v in enumerate(self.vars) if v.kind == KIND_EPSILON]
        if len(eps) > 1:
            raise ValueError("at most one epsilon variable")
        self._eps_i = eps[0] if eps else None
        if eps and eager_epsilon:
            sh = _FIELD * eps[0]
            self._eps2_bit = 2 << sh
            self._eps_fix = (2 << sh) + (2 << self._deg_shift)
        else:
            self._eps2_bit = 0
            self._eps_fix = 0
        ts = [i for i, v in enumerate(self.vars) if v.kind == KIND_T]
        if len(ts) > 1:
            raise ValueError("at most one t marker")
        self._t_shift = _FIELD * ts[0] if ts else None
        self._grades = tuple(v.grade for v in self.vars)
        self._graded_idx = tuple(
            (i, v.grade) for i, v in enumerate(self.vars) if v.grade
        )
        if order.kind == "block":
            seen = sorted(i for b in order.blocks for i in b)
            if seen != list(range(n)):
                raise ValueError("blocks must partition the variables")
        self._key_cache: dict[int, tuple] = {}
        self.zero = Polynomial(self, {}, _own=True)
        self.one = Polynomial(self, {0: self.coeff.normalize(1)}, _own=True)

    # -- variables -----------------------------------------------------

    def var_index(self, v) -> int:
        try:
            return self._index[v]
        except KeyError:
            raise KeyError(f"no variable {v!r} in ring") from None

    def var(self, v, exp: int = 1) -> "Polynomial":
        m = self.pack({self.var_index(v): exp})
        return Polynomial(self, {m: self.coeff.normalize(1)}, _own=True)

    def has_var(self, name: str) -> bool:
        return name in self._index

    def vars_of_kind(self, kind: str) -> tuple[Variable, ...]:
        return tuple(v for v in self.vars if v.kind == kind)

    # -- packed monomials ----------------------------------------------

    def pack(self, exps: dict[int, int]) -> int:
        m = 0
        for i, e in exps.items():
            if e < 0:
                raise ValueError("negative exponent")
            if self.eager_epsilon and i == self._eps_i:
                e &= 1
            if e > _MASK:
                raise OverflowError("exponent > 127")
            m += e * self._unit[i]
        if m & self._guard:
            raise OverflowError("total degree > 127")
        return m

    def mono_exp(self, m: int, i: int) -> int:
        return (m >> (_FIELD * i)) & _MASK

    def mono_unpack(self, m: int) -> tuple[int, ...]:
        return tuple((m >> (_FIELD * i)) & _MASK for i in range(self.nvars))

    def mono_deg(self, m: int) -> int:
        return (m >> self._deg_shift) & _MASK

    def mono_gdeg(self, m: int) -> int:
        return (m >> self._gdeg_shift) & _MASK

    def mono_grade(self, m: int) -> int:
        return sum((m >> (_FIELD * i) & _MASK) * g for i, g in self._graded_idx)

    def mono_mul(self, m1: int, m2: int) -> int:
        m = m1 + m2
        if m & self._guard:
            raise OverflowError("monomial overflow")
        if m & self._eps2_bit:
            m -= self._eps_fix
        return m

    def mono_divides(self, d: int, m: int) -> bool:
        return ((m | self._guard) - d) & self._guard == self._guard

    def mono_div(self, m: int, d: int) -> int:
        q = m - d
        if ((m | self._guard) - d) & self._guard != self._guard:
            raise ValueError("monomial not divisible")
        return q

    def mono_lcm(self, m1: int, m2: int) -> int:
        e1, e2 = self.mono_unpack(m1), self.mono_unpack(m2)
        return self.pack({i: max(a, b) for i, (a, b) in enumerate(zip(e1, e2))})

    def mono_gcd(self, m1: int, m2: int) -> int:
        e1, e2 = self.mono_unpack(m1), self.mono_unpack(m2)
        return self.pack({i: min(a, b) for i, (a, b) in enumerate(zip(e1, e2))})

    def mono_str(self, m: int) -> str:
        parts = []
        for i, v in enumerate(self.vars):
            e = self.mono_exp(m, i)
            if e == 1:
                parts.append(v.name)
            elif e:
                parts.append(f"{v.name}^{e}")
        return "*".join(parts) if parts else "1"

    # -- monomial order -------------------------------------------------

    def sort_key(self, m: int, order: MonomialOrder | None = None):
        order = order or self.order
        exps = self.mono_unpack(m)
        if order.kind == "degrevlex":
            return (self.mono_deg(m), tuple(-e for e in reversed(exps)))
        if order.kind == "lex":
            return exps
        key: list = []
        for blk in order.blocks:
            key.append(sum(exps[i] for i in blk))
            key.extend(-exps[i] for i in reversed(blk))
        return tuple(key)

    def sort_key_cached(self, m: int):
        k = self._key_cache.get(m)
        if k is None:
            k = self.sort_key(m)
            self._key_cache[m] = k
        return k

    # -- construction ----------------------------------------------------

    def poly(self, terms: dict[int, object], _own: bool = False) -> "Polynomial":
        return Polynomial(self, terms, _own=_own)

    def constant(self, c) -> "Polynomial":
        c = self.coeff.normalize(c)
        return Polynomial(self, {0: c} if c else {}, _own=True)

    def from_terms(self, terms: Iterable[tuple[dict, object]]) -> "Polynomial":
        acc: dict[int, object] = {}
        for mono, c in terms:
            m = self.pack({self.var_index(v): e for v, e in mono.items()})
            c = self.coeff.normalize(c)
            acc[m] = acc.get(m, 0) + c
        return Polynomial(self, _strip(acc, self.coeff.modulus), _own=True)

    # -- core dict kernels -----------------------------------------------

    def _dict_add(self, A: dict, B: dict, scale=1) -> dict:
        out = dict(A)
        get = out.get
        if scale == 1:
            for m, c in B.items():
                v = get(m)
                out[m] = c if v is None else v + c
        else:
            for m, c in B.items():
                v = get(m)
                out[m] = scale * c if v is None else v + scale * c
        return _strip(out, self.coeff.modulus)

    def _dict_mul(self, A: dict, B: dict, gcap=None, wcap=None) -> dict:
        if len(A) > len(B):
            A, B = B, A
        out: dict[int, object] = {}
        get = out.get
        guard = self._guard
        e2 = self._eps2_bit
        efix = self._eps_fix
        gsh = self._gdeg_shift
        tsh = self._t_shift
        for m1, c1 in A.items():
            for m2, c2 in B.items():
                m = m1 + m2
                if m & guard:
                    raise OverflowError("monomial overflow in product")
                if m & e2:
                    m -= efix
                if gcap is not None and ((m >> gsh) & _MASK) > gcap:
                    continue
                if wcap is not None and ((m >> gsh) & _MASK) - (
                    (m >> tsh) & _MASK
                ) > wcap:
                    continue
                c = c1 * c2
                v = get(m)
                out[m] = c if v is None else v + c
        return _strip(out, self.coeff.modulus)

    # -- conversion -------------------------------------------------------

    def convert(
        self, p: "Polynomial", rename: dict[str, str] | None = None
    ) -> "Polynomial":
        """Re-express p in this ring, matching variables by name.

        A variable of p that is absent here must not occur with positive
        exponent.  rename maps source names to target names.
        """
        if p.ring is self and not rename:
            return p
        src = p.ring
        rename = rename or {}
        trans: list[int | None] = []
        for v in src.vars:
            name = rename.get(v.name, v.name)
            trans.append(self._index.get(name))
        out: dict[int, object] = {}
        for m, c in p.terms.items():
            mm = 0
            for i in range(src.nvars):
                e = (m >> (_FIELD * i)) & _MASK
                if not e:
                    continue
                j = trans[i]
                if j is None:
                    raise ValueError(
                        f"variable {src.vars[i].name} does not exist in target ring"
                    )
                if self.eager_epsilon and j == self._eps_i:
                    e &= 1
                mm += e * self._unit[j]
            if mm & self._guard:
                raise OverflowError("monomial overflow in conversion")
            c = self.coeff.normalize(c)
            v = out.get(mm)
            out[mm] = c if v is None else v + c
        return Polynomial(self, _strip(out, self.coeff.modulus), _own=True)

    # -- parsing -----------------------------------------------------------

    def parse(self, text: str) -> "Polynomial":
        return _parse(self, text)

    def __repr__(self):
        return f"PolyRing({', '.join(v.name for v in self.vars)}; {self.coeff!r})"


def _strip(d: dict, mod: int | None) -> dict:
    if mod is None:
        return {m: c for m, c in d.items() if c}
    return {m: cm for m, c in d.items() if (cm := c % mod)}


class Polynomial:
    """Immutable-by-convention sparse polynomial tied to a PolyRing."""

    __slots__ = ("ring", "terms")

    def __init__(self, ring: PolyRing, terms: dict, _own: bool = False):
        self.ring = ring
        if _own:
            self.terms = terms
        else:
            norm = ring.coeff.normalize
            acc: dict[int, object] = {}
            for m, c in terms.items():
                acc[m] = acc.get(m, 0) + norm(c)
            self.terms = _strip(acc, ring.coeff.modulus)

    # -- basics ---------------------------------------------------------

    def __bool__(self):
        return bool(self.terms)

    def __len__(self):
        return len(self.terms)

    def __eq__(self, other):
        if isinstance(other, Polynomial):
            return self.ring is other.ring and self.terms == other.terms
        if isinstance(other, (int, Fraction)):
            return self == self.ring.constant(other)
        return NotImplemented

    __hash__ = None  # mutable dict inside; not hashable

    def items(self):
        return self.terms.items()

    @property
    def is_zero(self) -> bool:
        return not self.terms

    def constant_coeff(self):
        return self.terms.get(0, 0)

    def coeff_of(self, mono: dict) -> object:
        m = self.ring.pack({self.ring.var_index(v): e for v, e in mono.items()})
        return self.terms.get(m, 0)

    # -- arithmetic -------------------------------------------------------

    def __add__(self, other):
        other = self._coerce(other)
        return Polynomial(
            self.ring, self.ring._dict_add(self.terms, other.terms), _own=True
        )

    __radd__ = __add__

    def __sub__(self, other):
        other = self._coerce(other)
        return Polynomial(
            self.ring, self.ring._dict_add(self.terms, other.terms, -1), _own=True
        )

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __neg__(self):
        return Polynomial(self.ring, {m: -c for m, c in self.terms.items()}, _own=True)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            c = self.ring.coeff.normalize(other)
            if not c:
                return self.ring.zero
            d = {m: cc * c for m, cc in self.terms.items()}
            return Polynomial(self.ring, _strip(d, self.ring.coeff.modulus), _own=True)
        other = self._coerce(other)
        return Polynomial(
            self.ring, self.ring._dict_mul(self.terms, other.terms), _own=True
        )

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative power")
        result = self.ring.one
        base = self
        while n:
            if n & 1:
                result = result * base
            base_needed = n > 1
            n >>= 1
            if base_needed and n:
                base = base * base
        return result

    def _coerce(self, other) -> "Polynomial":
        if isinstance(other, Polynomial):
            if other.ring is not self.ring:
                raise ValueError("polynomials from different rings")
            return other
        if isinstance(other, (int, Fraction)):
            return self.ring.constant(other)
        raise TypeError(f"cannot combine Polynomial with {type(other)}")

    # -- structure ----------------------------------------------------------

    def leading(self, order: MonomialOrder | None = None) -> tuple[int, object]:
        if not self.terms:
            raise ValueError("zero polynomial has no leading term")
        key = self.ring.sort_key if order else self.ring.sort_key_cached
        if order:
            m = max(self.terms, key=lambda mm: key(mm, order))
        else:
            m = max(self.terms, key=key)
        return m, self.terms[m]

    def total_degree(self) -> int:
        if not self.terms:
            return 0
        deg = self.ring.mono_deg
        return max(deg(m) for m in self.terms)

    def geom_degree(self) -> int:
        if not self.terms:
            return 0
        g = self.ring.mono_gdeg
        return max(g(m) for m in self.terms)

    def degree_in(self, v) -> int:
        i = self.ring.var_index(v)
        if not self.terms:
            return 0
        return max(self.ring.mono_exp(m, i) for m in self.terms)

    def truncate_geom(self, D: int) -> "Polynomial":
        g = self.ring.mono_gdeg
        d = {m: c for m, c in self.terms.items() if g(m) <= D}
        return Polynomial(self.ring, d, _own=True)

    def coefficient_of(self, v, k: int) -> "Polynomial":
        """Coefficient of v^k, with v stripped from the surviving terms."""
        i = self.ring.var_index(v)
        unit = self.ring._unit[i]
        shift = k * unit
        d = {
            m - shift: c
            for m, c in self.terms.items()
            if self.ring.mono_exp(m, i) == k
        }
        return Polynomial(self.ring, d, _own=True)

    def grade(self) -> int:
        """Common grade of all terms; raises if not homogeneous."""
        if not self.terms:
            return 0
        grades = {self.ring.mono_grade(m) for m in self.terms}
        if len(grades) != 1:
            raise ValueError(f"polynomial is not graded (grades {sorted(grades)})")
        return grades.pop()

    def is_graded(self) -> bool:
        try:
            self.grade()
            return True
        except ValueError:
            return False

    def reduce_epsilon(self) -> "Polynomial":
        """Reduce epsilon exponents mod 2 (epsilon^2 = 1)."""
        ring = self.ring
        i = ring._eps_i
        if i is None:
            return self
        unit = ring._unit[i]
        out: dict[int, object] = {}
        get = out.get
        for m, c in self.terms.items():
            e = (m >> (_FIELD * i)) & _MASK
            if e > 1:
                m = m - (e - (e & 1)) * unit
            v = get(m)
            out[m] = c if v is None else v + c
        return Polynomial(ring, _strip(out, ring.coeff.modulus), _own=True)

    def subs(self, mapping: dict) -> "Polynomial":
        """Evaluate variables at ring elements or scalars (same ring)."""
        ring = self.ring
        images: dict[int, Polynomial] = {}
        for v, val in mapping.items():
            i = ring.var_index(v)
            if not isinstance(val, Polynomial):
                val = ring.constant(val)
            elif val.ring is not ring:
                raise ValueError("substitution value from a different ring")
            images[i] = val
        if not images:
            return self
        powers: dict[tuple[int, int], Polynomial] = {}

        def power(i, e):
            p = powers.get((i, e))
            if p is None:
                p = images[i] ** e
                powers[(i, e)] = p
            return p

        result = ring.zero
        for m, c in self.terms.items():
            kept = m
            factors = []
            for i in images:
                e = (m >> (_FIELD * i)) & _MASK
                if e:
                    kept -= e * ring._unit[i]
                    factors.append(power(i, e))
            term = Polynomial(ring, {kept: c}, _own=True)
            for f in factors:
                term = term * f
            result = result + term
        return result

    def map_coeffs(self, fn) -> "Polynomial":
        d = {m: fn(c) for m, c in self.terms.items()}
        return Polynomial(self.ring, _strip(d, self.ring.coeff.modulus), _own=True)

    # -- canonical text -----------------------------------------------------

    def text(self) -> str:
        if not self.terms:
            return "0"
        ring = self.ring
        fmt = ring.coeff.fmt
        monos = sorted(self.terms, key=ring.sort_key, reverse=True)
        pieces: list[str] = []
        for m in monos:
            cs = fmt(self.terms[m])
            neg = cs.startswith("-")
            if neg:
                cs = cs[1:]
            ms = ring.mono_str(m)
            if ms == "1":
                body = cs
            elif cs == "1":
                body = ms
            else:
                body = f"{cs}*{ms}"
            if not pieces:
                pieces.append(f"-{body}" if neg else body)
            else:
                pieces.append(f" - {body}" if neg else f" + {body}")
        return "".join(pieces)

    __str__ = text

    def __repr__(self):
        return f"<{self.text()}>"


_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z][A-Za-z0-9_]*)|(\^)|(\*)|(\+)|(-)|(/))")


def _parse(ring: PolyRing, text: str) -> Polynomial:
    pos = 0
    n = len(text)
    tokens: list[tuple[str, str]] = []
    while pos < n:
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            if text[pos:].strip() == "":
                break
            raise ValueError(f"cannot tokenize {text[pos:pos+12]!r}")
        pos = m.end()
        if m.group(1):
            tokens.append(("int", m.group(1)))
        elif m.group(2):
            tokens.append(("name", m.group(2)))
        else:
            tokens.append(("op", m.group(0).strip()))
    acc: dict[int, object] = {}
    i = 0
    first = True

    def peek():
        return tokens[i] if i < len(tokens) else (None, None)

    while i < len(tokens):
        sign = 1
        kind, val = peek()
        if kind == "op" and val in "+-":
            if val == "-":
                sign = -1
            i += 1
            while True:
                kind, val = peek()
                if kind == "op" and val in "+-":
                    if val == "-":
                        sign = -sign
                    i += 1
                else:
                    break
        elif not first:
            raise ValueError("expected + or - between terms")
        first = False
        coeff: object = 1
        mono: dict[int, int] = {}
        saw_factor = False
        while True:
            kind, val = peek()
            if kind == "int":
                i += 1
                num = int(val)
                kind2, val2 = peek()
                if kind2 == "op" and val2 == "/":
                    i += 1
                    kind3, val3 = peek()
                    if kind3 != "int":
                        raise ValueError("expected denominator")
                    i += 1
                    coeff = coeff * Fraction(num, int(val3))
                else:
                    coeff = coeff * num
            elif kind == "name":
                i += 1
                if not ring.has_var(val):
                    raise ValueError(f"unknown variable {val!r}")
                e = 1
                kind2, val2 = peek()
                if kind2 == "op" and val2 == "^":
                    i += 1
                    kind3, val3 = peek()
                    if kind3 != "int":
                        raise ValueError("expected exponent")
                    i += 1
                    e = int(val3)
                vi = ring.var_index(val)
                mono[vi] = mono.get(vi, 0) + e
            else:
                raise ValueError(f"unexpected token {val!r}" if val else "unexpected end")
            saw_factor = True
            kind, val = peek()
            if kind == "op" and val == "*":
                i += 1
                continue
            break
        if not saw_factor:
            raise ValueError("empty term")
        m = ring.pack(mono)
        c = ring.coeff.normalize(sign * coeff)
        acc[m] = acc.get(m, 0) + c
    return Polynomial(ring, _strip(acc, ring.coeff.modulus), _own=True)
