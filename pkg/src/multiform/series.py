"""Multivalued formal series and substitution.

An (n,d)-series is F_t(x_1..x_d) = 1 + F_1 t + ... + F_n t^n with an
implicit leading 1 that is never stored; only F_1..F_n are kept, truncated
at a common total-degree cutoff D in the geometric variables.

Substitution at slot i introduces one factor of F per formal root of the
inner series G, so the product has t-degree n*m.  The root variables are
never materialised: the factor is split by the power of the substituted
slot, the product over the m copies is assembled per weakly decreasing
exponent multiset (whose coefficient in the monomial-symmetric basis is a
plain product), the monomial-symmetric polynomials are rewritten in
elementary symmetric variables through a cached integer table, and e_l is
replaced by G_l.  This is equivalent to expanding the product in root
variables and rewriting the t-coefficients via to_elementary, but runs in
time proportional to the surviving terms.

Products accept two sound pruning caps: the geometric cutoff D (degrees
only grow) and an optional cap on gdeg - tdeg, used by relation generation
where only bounded grades are kept.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations_with_replacement

from .poly import (
    KIND_GEOM,
    KIND_T,
    Polynomial,
    PolyRing,
    Variable,
    ZZ,
    t_var,
)
from .symfun import orbit_in_elementary

_MASK = 0x7F


def series_ring(coeff_vars, geom_names, coeff=ZZ, order=None) -> PolyRing:
    """Ring [coefficient vars..., geometric vars..., t] for series work."""
    gvars = [Variable(n, KIND_GEOM, 1) for n in geom_names]
    kwargs = {"coeff": coeff, "eager_epsilon": True}
    if order is not None:
        kwargs["order"] = order
    return PolyRing(list(coeff_vars) + gvars + [t_var()], **kwargs)


def extend_geom(ring: PolyRing, names) -> PolyRing:
    """Ring with extra geometric variables inserted before the t marker."""
    missing = [n for n in names if not ring.has_var(n)]
    if not missing:
        return ring
    vars_ = [v for v in ring.vars if v.kind != KIND_T]
    vars_ += [Variable(n, KIND_GEOM, 1) for n in missing]
    vars_ += [v for v in ring.vars if v.kind == KIND_T]
    return PolyRing(vars_, coeff=ring.coeff, order=ring.order,
                    eager_epsilon=ring.eager_epsilon)


class MSeries:
    """(n,d)-series: components F_1..F_n over fixed geometric slot variables."""

    __slots__ = ("ring", "gvars", "components", "trunc")

    def __init__(self, ring: PolyRing, gvars, components, trunc: int,
                 validate: bool = True):
        self.ring = ring
        self.gvars = tuple(ring.vars[ring.var_index(v)] for v in gvars)
        if ring._t_shift is None:
            raise ValueError("series ring needs a t marker variable")
        comps = []
        for c in components:
            if c.ring is not ring:
                raise ValueError("component from a different ring")
            comps.append(c.truncate_geom(trunc))
        self.components = tuple(comps)
        self.trunc = trunc
        if validate:
            self._check_vars()

    def _check_vars(self):
        ring = self.ring
        allowed = {ring.var_index(v) for v in self.gvars}
        geom_idx = [
            i for i, v in enumerate(ring.vars)
            if (v.kind == KIND_GEOM and i not in allowed) or v.kind == KIND_T
        ]
        for comp in self.components:
            for m in comp.terms:
                for i in geom_idx:
                    if ring.mono_exp(m, i):
                        raise ValueError(
                            f"component uses variable {ring.vars[i].name} "
                            "outside the declared slots"
                        )

    # -- basics -----------------------------------------------------------

    @property
    def n(self) -> int:
        return len(self.components)

    @property
    def d(self) -> int:
        return len(self.gvars)

    def component(self, l: int) -> Polynomial:
        """F_l, 1-based; F_0 is the implicit 1."""
        if l == 0:
            return self.ring.one
        return self.components[l - 1]

    def __eq__(self, other):
        return (
            isinstance(other, MSeries)
            and self.ring is other.ring
            and self.gvars == other.gvars
            and self.trunc == other.trunc
            and self.components == other.components
        )

    __hash__ = None

    def __repr__(self):
        body = ", ".join(f"t^{l}: {c.text()}" for l, c in enumerate(self.components, 1))
        return f"MSeries({self.n},{self.d}; D={self.trunc}; 1 + {body})"

    def _binop(self, other, scale):
        if (
            self.ring is not other.ring
            or self.gvars != other.gvars
            or self.n != other.n
        ):
            raise ValueError("series are not compatible")
        if self.trunc != other.trunc:
            raise ValueError("truncation context mismatch")
        comps = [a + scale * b for a, b in zip(self.components, other.components)]
        return MSeries(self.ring, self.gvars, comps, self.trunc, validate=False)

    def __add__(self, other):
        return self._binop(other, 1)

    def __sub__(self, other):
        return self._binop(other, -1)

    def relabel(self, new_gvars) -> "MSeries":
        """Same series on different slot variables (within the same ring)."""
        new = [self.ring.vars[self.ring.var_index(v)] for v in new_gvars]
        if len(new) != self.d:
            raise ValueError("slot count mismatch")
        rename = {old.name: nv.name for old, nv in zip(self.gvars, new)}
        if all(o == n for o, n in rename.items()):
            return self
        comps = [self.ring.convert(c, rename=rename) for c in self.components]
        return MSeries(self.ring, new, comps, self.trunc)

    def convert(self, ring: PolyRing) -> "MSeries":
        comps = [ring.convert(c) for c in self.components]
        return MSeries(ring, [v.name for v in self.gvars], comps, self.trunc)

    def scale_t(self, factor) -> "MSeries":
        """Series in (factor * t): component l is multiplied by factor^l."""
        if not isinstance(factor, Polynomial):
            factor = self.ring.constant(factor)
        comps = []
        f = self.ring.one
        for c in self.components:
            f = f * factor
            comps.append(c * f)
        return MSeries(self.ring, self.gvars, comps, self.trunc, validate=False)

    def plug(self, values: dict) -> list[Polynomial]:
        """Components with slot variables evaluated at ring elements."""
        mapping = {}
        for v, val in values.items():
            mapping[self.ring.vars[self.ring.var_index(v)]] = val
        return [c.subs(mapping).truncate_geom(self.trunc) for c in self.components]

    # -- series-level notions ----------------------------------------------

    def buchstaber_form(self) -> tuple[Polynomial, ...]:
        """Coefficients of t^n, t^(n-1), .., t^0 in t^n - F_1 t^(n-1) + ...

        Entry 0 is the leading 1; entry l is (-1)^l F_l.
        """
        out = [self.ring.one]
        sign = 1
        for c in self.components:
            sign = -sign
            out.append(sign * c)
        return tuple(out)

    def degree_valuation(self) -> tuple[int, int]:
        """(sup, inf) of |alpha| - l over stored nonzero terms.

        The implicit leading 1 is excluded; a series with all components
        zero has no degree and raises.
        """
        ring = self.ring
        best = None
        worst = None
        for l, c in enumerate(self.components, start=1):
            for m in c.terms:
                w = ring.mono_gdeg(m) - l
                if best is None or w > best:
                    best = w
                if worst is None or w < worst:
                    worst = w
        if best is None:
            raise ValueError("zero series has no degree")
        return best, worst

    def is_composable(self) -> bool:
        """True iff every component vanishes at x = 0 (geometric degree > 0)."""
        g = self.ring.mono_gdeg
        return all(
            all(g(m) > 0 for m in c.terms) for c in self.components
        )

    def is_graded(self) -> bool:
        """Coefficient of x^alpha in F_l is homogeneous of grade |alpha| - l."""
        ring = self.ring
        for l, c in enumerate(self.components, start=1):
            for m in c.terms:
                gd = ring.mono_gdeg(m)
                agrade = ring.mono_grade(m) - gd
                if agrade != gd - l:
                    return False
        return True


@dataclass
class SeriesMorphism:
    """theta: source -> target, a one-variable series with theta(0) = 0."""

    source: MSeries
    target: MSeries
    theta: Polynomial
    var: object  # the variable theta is expressed in


def substitute(F: MSeries, slot: int, G: MSeries, *,
               allow_constant_terms: bool = False,
               wcap: int | None = None) -> MSeries:
    """Substitute the m-valued series G into slot `slot` (1-based) of F.

    Returns the (n*m, d+r-1)-series F_t(x_1,..,G,..,x_d).  G must be
    composable unless allow_constant_terms is set, in which case all
    components must be exact polynomials (the caller asserts this; the
    result is then exact as well).
    """
    comps = []
    gvars, n_out = _subst_prepare(F, slot, G, allow_constant_terms)
    for l, flat in substitute_stream(F, slot, G,
                                     allow_constant_terms=allow_constant_terms,
                                     wcap=wcap):
        comps.append(flat)
    return MSeries(F.ring, gvars, comps, F.trunc, validate=False)


def _subst_prepare(F, slot, G, allow_constant_terms):
    if G.ring is not F.ring:
        raise ValueError("series must live in the same ring")
    if F.trunc != G.trunc:
        raise ValueError("truncation context mismatch")
    if not 1 <= slot <= F.d:
        raise ValueError(f"slot {slot} out of range 1..{F.d}")
    if not allow_constant_terms and not G.is_composable():
        raise ValueError("inner series is not composable")
    svar = F.gvars[slot - 1]
    rest = F.gvars[: slot - 1] + F.gvars[slot:]
    if svar in G.gvars or set(rest) & set(G.gvars):
        raise ValueError("slot variables of inner and outer series collide")
    gvars = F.gvars[: slot - 1] + G.gvars + F.gvars[slot:]
    return gvars, F.n * G.n


def substitute_stream(F: MSeries, slot: int, G: MSeries, *,
                      allow_constant_terms: bool = False,
                      wcap: int | None = None):
    """Yield (l, component) for l = 1..n*m without materialising the series.

    Components are produced t-slice by t-slice so peak memory stays at one
    slice plus the shared power cache.
    """
    _subst_prepare(F, slot, G, allow_constant_terms)
    ring = F.ring
    D = F.trunc
    mod = ring.coeff.modulus
    m_roots = G.n
    si = ring.var_index(F.gvars[slot - 1])
    sunit = ring._unit[si]
    tsh = ring._t_shift
    tunit = ring._unit[tsh // 8]
    gsh = ring._gdeg_shift

    def w_of(mono):
        return ((mono >> gsh) & _MASK) - ((mono >> tsh) & _MASK)

    # split 1 + sum F_l t^l by the power of the substituted slot variable
    H: dict[int, dict] = {0: {0: ring.coeff.normalize(1)}}
    for l, comp in enumerate(F.components, start=1):
        tl = l * tunit
        for mm, c in comp.terms.items():
            p = ring.mono_exp(mm, si)
            H.setdefault(p, {})[mm - p * sunit + tl] = c
    minw = {p: min(w_of(mm) for mm in d) for p, d in H.items()} if wcap is not None else {}

    # coefficient of the monomial-symmetric basis element m_lambda in the
    # m-fold product is just the product of the matching slot coefficients
    Qacc: dict[tuple, dict] = {}
    avail = sorted(H, reverse=True)
    for lam in combinations_with_replacement(avail, m_roots):
        P = None
        remaining = sum(minw[p] for p in lam) if wcap is not None else 0
        for p in lam:
            if wcap is not None:
                remaining -= minw[p]
            cap = None if wcap is None else wcap - remaining
            P = H[p] if P is None else ring._dict_mul(P, H[p], gcap=D, wcap=cap)
            if not P:
                break
        if not P:
            continue
        for beta, c in orbit_in_elementary(m_roots, lam):
            acc = Qacc.get(beta)
            if acc is None:
                Qacc[beta] = dict(P) if c == 1 else {m: c * v for m, v in P.items()}
            else:
                if c == 1:
                    for m, v in P.items():
                        acc[m] = acc.get(m, 0) + v
                else:
                    for m, v in P.items():
                        acc[m] = acc.get(m, 0) + c * v
    for beta in list(Qacc):
        d = {m: c for m, c in Qacc[beta].items() if (c % mod if mod else c)}
        if mod:
            d = {m: c % mod for m, c in d.items()}
        if d:
            Qacc[beta] = d
        else:
            del Qacc[beta]

    # powers of the inner components, grown one factor at a time
    min_q = 0
    if wcap is not None and Qacc:
        min_q = min(min(w_of(m) for m in d) for d in Qacc.values())
    gpow_cap = None if wcap is None else wcap - min_q
    powers: dict[tuple, dict] = {(0,) * m_roots: {0: ring.coeff.normalize(1)}}

    def gpow(beta: tuple) -> dict:
        d = powers.get(beta)
        if d is not None:
            return d
        j = max(i for i, b in enumerate(beta) if b)
        pred = beta[:j] + (beta[j] - 1,) + beta[j + 1:]
        d = ring._dict_mul(gpow(pred), G.components[j].terms,
                           gcap=D, wcap=gpow_cap)
        powers[beta] = d
        return d

    # assemble per t-slice; the t power comes only from the outer factors
    slices: dict[tuple, dict[int, dict]] = {}
    for beta, q in Qacc.items():
        per: dict[int, dict] = {}
        for m, c in q.items():
            l = (m >> tsh) & _MASK
            per.setdefault(l, {})[m] = c
        slices[beta] = per

    n_out = F.n * m_roots
    for l in range(n_out + 1):
        acc: dict[int, object] = {}
        for beta, per in slices.items():
            q = per.get(l)
            if not q:
                continue
            part = ring._dict_mul(q, gpow(beta), gcap=D, wcap=wcap)
            if not acc:
                acc = part
            else:
                get = acc.get
                for m, c in part.items():
                    v = get(m)
                    acc[m] = c if v is None else v + c
        acc = {m: c for m, c in acc.items() if (c % mod if mod else c)}
        if mod:
            acc = {m: c % mod for m, c in acc.items()}
        if l == 0:
            if acc != {0: ring.coeff.normalize(1)}:
                raise AssertionError("constant t-slice of substitution is not 1")
            continue
        tl = l * tunit
        comp = {m - tl: c for m, c in acc.items()}
        yield l, Polynomial(ring, comp, _own=True)


def verify_morphism(theta: Polynomial, F: MSeries, G: MSeries,
                    var=None) -> list[Polynomial]:
    """Residual components of prod_i (1 + theta(F-root_i) t) - G_t(theta(x)).

    A zero list means theta is a morphism from F to G up to the truncation.
    theta is a one-variable polynomial in `var` (auto-detected if the ring
    has a spare geometric variable) with zero constant term.
    """
    ring = F.ring
    if G.ring is not ring:
        raise ValueError("series must live in the same ring")
    if F.n != G.n or F.d != G.d:
        raise ValueError("series shapes differ")
    if theta.ring is not ring:
        raise ValueError("theta must live in the series ring")
    if var is None:
        occ = [v for v in ring.vars_of_kind(KIND_GEOM) if theta.degree_in(v)]
        if len(occ) != 1:
            raise ValueError("cannot infer the variable of theta")
        var = occ[0]
    else:
        var = ring.vars[ring.var_index(var)]
    used = set(F.gvars) | set(G.gvars)
    if var in used:
        # move theta to a variable the substitution machinery may consume
        spare = [v for v in ring.vars_of_kind(KIND_GEOM) if v not in used]
        if spare:
            fresh = spare[0]
        else:
            name = "w"
            while ring.has_var(name):
                name += "_"
            ext = extend_geom(ring, [name])
            theta = ext.convert(theta)
            F = F.convert(ext)
            G = G.convert(ext)
            ring = ext
            fresh = ring.vars[ring.var_index(name)]
        theta = ring.convert(theta, rename={var.name: fresh.name})
        var = fresh
    for m in theta.terms:
        if ring.mono_gdeg(m) == 0:
            raise ValueError("theta must have zero constant term")
    outer = MSeries(ring, (var,), [theta], F.trunc)
    lhs = substitute(outer, 1, F)
    mapping = {g: theta.subs({var: ring.var(g)}) for g in G.gvars}
    rhs = G.plug(mapping)
    return [a - b for a, b in zip(lhs.components, rhs)]
