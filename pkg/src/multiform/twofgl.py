"""Two-valued formal group laws.

A 2-valued law is a (2,2)-series F_t(x,y) = 1 + F_1 t + F_2 t^2 subject to a
neutral element axiom, symmetry in (x,y), and associativity of the composed
(4,3)-series F_t(F_t(x,y),z).  Two flavours of the neutral axiom are in use:

* minus-one: F_t(x,0) = (1 + xt)^2, the classical axiom;
* refined:   F_t(x,0) = (1 + xt)(1 - e*xt) over a Z[e]/(e^2-1)-algebra,
  together with the twist rule F_t(-e*x, y) = F_{-e*t}(x, y).

The xy-coefficient of F_2, generically called gamma, singles out the split
families: gamma = -2 is type I (the laws produced by the norm functor on
one-valued laws), gamma = +2 is type II.  On symbolic coefficient rings the
classification is literal: gamma -+ 2 must be zero after reducing e^2 to 1,
otherwise the law counts as "other".

compute_B0 presents the subring of degree-0 coefficients of the universal
2-valued law.  Generators a^l_ij have degree i+j-l; the neutral axiom fixes
every a^l_i0, and the degree-0 slice of associativity cuts the rest down to
Z[gamma]/(gamma+2)(gamma-2)^2, or in the refined variant to
Z_e[a]/<(1+e)a, (a-(1-e))^2(a+(1-e))>.

The functor C sends F to the ternary series F_t(F_t(x,y),z).  A law that only
satisfies the axioms modulo an ideal of its coefficient ring (the universal
degree-0 laws do) is verified modulo that ideal: residual coefficients are
reduced by a Groebner basis before being reported.
"""

from __future__ import annotations

from dataclasses import dataclass

from .groebner import Budget, GBStats, buchberger, incremental_gb, reduce as gb_reduce
from .poly import (
    KIND_GEOM,
    KIND_T,
    KIND_USER,
    PolyRing,
    Polynomial,
    Variable,
    ZZ,
    epsilon_var,
    twofgl_coeff_var,
)
from .series import MSeries, series_ring, substitute
from .symfun import monomial_symmetric, swap_variables

TYPE_I = "I"
TYPE_II = "II"
TYPE_OTHER = "other"

MODES = ("minus-one", "refined")


def gamma_of(F: MSeries) -> Polynomial:
    """The xy-coefficient of the second component."""
    if F.n != 2 or F.d != 2:
        raise ValueError("gamma is defined for (2,2)-series")
    x, y = F.gvars
    return F.component(2).coefficient_of(x, 1).coefficient_of(y, 1)


def classify_type(F: MSeries) -> str:
    g = gamma_of(F).reduce_epsilon()
    if not (g + F.ring.constant(2)):
        return TYPE_I
    if not (g - F.ring.constant(2)):
        return TYPE_II
    return TYPE_OTHER


@dataclass
class TwoFGLReport:
    """Per-axiom residuals of a (2,2)-series; all zero means the law passes."""

    mode: str
    law_type: str
    residuals: dict[str, list[Polynomial]]
    modulo: tuple[Polynomial, ...] = ()

    @property
    def passed(self) -> bool:
        return all(not r for rs in self.residuals.values() for r in rs)

    def failing(self) -> list[str]:
        return [ax for ax, rs in self.residuals.items() if any(rs)]

    def lines(self) -> list[str]:
        out = []
        for ax, rs in self.residuals.items():
            bad = [f"t^{l}: {r.text()}" for l, r in enumerate(rs, 1) if r]
            status = "ok" if not bad else "FAIL " + "; ".join(bad)
            out.append(f"{ax}: {status}")
        out.append(f"type: {self.law_type}")
        return out


def _fresh(name: str, taken) -> str:
    while name in taken:
        name += "_"
    return name


def reduce_mod(polys, modulo):
    """Normal forms of polys against ideal generators in the coefficient vars.

    Groebner reduction needs honest exponents, so everything moves to a
    non-eager copy of the ring where e^2 - 1 joins the generators explicitly.
    """
    polys = list(polys)
    if not polys:
        return polys
    ring = polys[0].ring
    shadow = PolyRing(list(ring.vars), coeff=ring.coeff, order=ring.order,
                      eager_epsilon=False)
    gens = [shadow.convert(g) for g in modulo]
    if shadow._eps_i is not None:
        gens.append(shadow.var("e", 2) - 1)
    gb = buchberger(gens)
    return [gb_reduce(shadow.convert(p), gb) for p in polys]


def _coeff_vars(ring: PolyRing):
    return [v for v in ring.vars if v.kind not in (KIND_GEOM, KIND_T)]


def _assoc_residuals(F: MSeries, wcap: int | None = None) -> list[Polynomial]:
    """Components of F_t(F_t(x,y),z) - F_t(x,F_t(y,z)) in a scratch ring."""
    ring = F.ring
    xn, yn = (v.name for v in F.gvars)
    taken = {v.name for v in ring.vars}
    zn = _fresh("z", taken)
    taken.add(zn)
    wn = _fresh("w", taken)
    ext = series_ring(_coeff_vars(ring), [xn, yn, zn, wn], ring.coeff)
    Fo = F.convert(ext)
    allow = not Fo.is_composable()
    lhs = substitute(Fo.relabel((wn, zn)), 1, Fo,
                     allow_constant_terms=allow, wcap=wcap)
    rhs = substitute(Fo.relabel((xn, wn)), 2, Fo.relabel((yn, zn)),
                     allow_constant_terms=allow, wcap=wcap)
    diff = lhs - rhs
    return list(diff.components)


def verify_2fgl(F: MSeries, mode: str = "minus-one", modulo=()) -> TwoFGLReport:
    """Check the 2-valued group axioms, reporting residuals per axiom.

    modulo: ideal generators in the coefficient variables; residuals are
    reduced by their Groebner basis before being reported, for laws that
    only close modulo relations.
    """
    if mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}")
    if F.n != 2 or F.d != 2:
        raise ValueError("expected a (2,2)-series")
    ring = F.ring
    x, y = F.gvars
    xp = ring.var(x)
    eps = None
    if mode == "refined":
        if not ring.has_var("e"):
            raise ValueError("refined mode needs an epsilon variable in the ring")
        eps = ring.var("e")

    at_zero = [c.subs({y: ring.zero}) for c in F.components]
    if mode == "minus-one":
        targets = [2 * xp, xp * xp]
    else:
        targets = [(1 - eps) * xp, -eps * xp * xp]
    neutral = [a - b for a, b in zip(at_zero, targets)]

    symmetry = [swap_variables(c, x, y) - c for c in F.components]
    assoc = _assoc_residuals(F)

    residuals = {
        "neutral": neutral,
        "symmetry": symmetry,
        "associativity": assoc,
    }
    if mode == "refined":
        twisted = [c.subs({x: -eps * xp}) for c in F.components]
        scaled = F.scale_t(-eps)
        residuals["epsilon-linearity"] = [
            a - b for a, b in zip(twisted, scaled.components)
        ]

    modulo = tuple(modulo)
    if modulo:
        for rs in residuals.values():
            rs[:] = reduce_mod(rs, modulo)

    return TwoFGLReport(
        mode=mode,
        law_type=classify_type(F),
        residuals=residuals,
        modulo=modulo,
    )


class TwoFGL:
    """A verified 2-valued law: the series plus its type marker.

    modulo carries the coefficient-ring relations the law needs to close;
    construction raises if any axiom residual survives reduction.
    """

    def __init__(self, series: MSeries, mode: str = "minus-one", modulo=()):
        report = verify_2fgl(series, mode, modulo)
        if not report.passed:
            raise ValueError(
                "not a 2-valued formal group law; failing axioms: "
                + ", ".join(report.failing())
            )
        self.series = series
        self.mode = mode
        self.modulo = tuple(modulo)
        self.report = report
        self.law_type = report.law_type

    def __repr__(self):
        return f"TwoFGL(type {self.law_type}, {self.series!r})"


def functor_C(F, mode: str = "minus-one", modulo=()) -> MSeries:
    """The ternary series C_t(F)(x,y,z) = F_t(F_t(x,y),z) of a 2-valued law.

    In minus-one mode the input must be of type I (those are the laws whose
    C-image satisfies all five ternary axioms); refined mode drops the type
    gate, and the weak neutral axiom of the output is the caller's problem.
    Input truncation D in (x,y) yields output truncation D in (x,y,z).
    """
    if isinstance(F, TwoFGL):
        mode = F.mode
        modulo = F.modulo
        report, series = F.report, F.series
    else:
        series = F
        report = verify_2fgl(F, mode, modulo)
    if not report.passed:
        raise ValueError(
            "functor C needs a 2-valued formal group law; failing axioms: "
            + ", ".join(report.failing())
        )
    if mode == "minus-one" and report.law_type != TYPE_I:
        raise ValueError(f"functor C needs a type-I law, got type {report.law_type}")

    ring = series.ring
    xn, yn = (v.name for v in series.gvars)
    taken = {v.name for v in ring.vars}
    zn = _fresh("z", taken)
    taken.add(zn)
    wn = _fresh("w", taken)
    ext = series_ring(_coeff_vars(ring), [xn, yn, zn, wn], ring.coeff)
    Fo = series.convert(ext)
    allow = not Fo.is_composable()
    out = substitute(Fo.relabel((wn, zn)), 1, Fo, allow_constant_terms=allow)
    final = series_ring(_coeff_vars(ring), [xn, yn, zn], ring.coeff)
    return out.convert(final)


# -- universal degree-0 computation ---------------------------------------

B0_WINDOW = 4  # geometric degree reach of the (4,3) associativity output


def _b0_vars(refined: bool):
    avars = [
        twofgl_coeff_var(l, i, j)
        for l in (1, 2)
        for i in range(B0_WINDOW + 1)
        for j in range(i + 1)
        if i + j <= B0_WINDOW
    ]
    avars.sort(key=lambda v: (-v.grade, v.index))
    extra = [epsilon_var()] if refined else []
    return avars, extra


def _universal_series(refined: bool):
    avars, extra = _b0_vars(refined)
    SR = series_ring(avars + extra, ["x", "y"], ZZ)
    comps = []
    for l in (1, 2):
        c = SR.zero
        for v in avars:
            if v.index[0] != l:
                continue
            _, i, j = v.index
            c = c + SR.var(v) * monomial_symmetric(SR, ("x", "y"), (i, j))
        comps.append(c)
    F = MSeries(SR, ("x", "y"), comps, trunc=B0_WINDOW)
    return F, avars, SR


def _coefficient_relations(polys, rel_ring: PolyRing, max_grade=None):
    """Split polynomials into geometric-coefficient relations.

    Each item is (weight, poly) where poly is the coefficient of one
    geometric monomial of t-slice l, moved to the relation ring; weight is
    its degree |alpha| - l.  Items arrive sorted by weight, then exponents.
    """
    out = []
    for l, comp in polys:
        ring = comp.ring
        gidx = [i for i, v in enumerate(ring.vars) if v.kind == KIND_GEOM]
        buckets: dict[tuple, dict] = {}
        for m, c in comp.terms.items():
            exps = tuple(ring.mono_exp(m, i) for i in gidx)
            w = sum(exps) - l
            if max_grade is not None and w > max_grade:
                continue
            mm = m
            for i, e in zip(gidx, exps):
                if e:
                    mm -= e * ring._unit[i]
            buckets.setdefault((w, exps), {}).setdefault(mm, 0)
            buckets[(w, exps)][mm] += c
        for (w, exps), terms in sorted(buckets.items()):
            p = rel_ring.convert(Polynomial(ring, terms))
            if p:
                out.append((w, p))
    out.sort(key=lambda t: t[0])
    return out


@dataclass
class B0Result:
    """Presentation of the degree-0 coefficient subring of the universal law."""

    mode: str
    ring: PolyRing
    gamma: Variable
    fixed: dict
    free: tuple
    relations: list
    stats: GBStats
    complete: bool = True


def compute_B0(mode: str = "integral", budget: Budget | None = None) -> B0Result:
    """Degree-0 subring of the universal 2-valued law, by Groebner elimination.

    mode "integral" uses the classical neutral axiom over Z; mode "refined"
    works over Z_e with the split neutral axiom and epsilon-linearity.
    fixed returns every neutrally-determined coefficient in the degree
    window; free and relations describe the surviving degree-0 generators.
    """
    if mode not in ("integral", "refined"):
        raise ValueError(f"unknown mode {mode!r}")
    refined = mode == "refined"
    budget = budget or Budget()
    F, avars, SR = _universal_series(refined)
    x, y = F.gvars
    xp = SR.var(x)

    rel_vars = list(avars) + ([epsilon_var()] if refined else [])
    relR = PolyRing(rel_vars, coeff=ZZ, eager_epsilon=False)
    seed = (relR.var("e", 2) - 1,) if refined else ()

    if refined:
        eps = SR.var("e")
        targets = [(1 - eps) * xp, -eps * xp * xp]
    else:
        targets = [2 * xp, xp * xp]
    at_zero = [c.subs({y: SR.zero}) for c in F.components]
    neutral = [(l, a - b) for l, (a, b) in enumerate(zip(at_zero, targets), 1)]
    low_rels = _coefficient_relations(neutral, relR)
    if refined:
        # epsilon-linearity holds in every degree, but only its degree-<=0
        # slice belongs to the presentation of the degree-0 subring
        twisted = [c.subs({x: -eps * xp}) for c in F.components]
        scaled = F.scale_t(-eps)
        lin = [
            (l, a - b) for l, (a, b) in enumerate(zip(twisted, scaled.components), 1)
        ]
        low_rels += _coefficient_relations(lin, relR, max_grade=0)

    state = incremental_gb(iter(low_rels), relR, pool=avars,
                           seed=seed, budget=budget)

    # plug the neutrally fixed values back into the law, then the remaining
    # variables all have degree >= 0 and the degree-0 associativity slice
    # is complete within the window
    plug = {SR.vars[SR.var_index(v)]: SR.convert(val) for v, val in state.fixed.items()}
    comps = [c.subs(plug) for c in F.components]
    Fn = MSeries(SR, (x, y), comps, trunc=B0_WINDOW)
    assoc = _assoc_residuals(Fn, wcap=0)
    assoc_rels = _coefficient_relations(
        list(enumerate(assoc, 1)), relR, max_grade=0
    )

    state = incremental_gb(iter(assoc_rels), relR, budget=budget, resume=state)

    gamma = twofgl_coeff_var(2, 1, 1)
    seed_texts = {s.text() for s in state.seed}
    relations = [p for p in state.basis if p.text() not in seed_texts]
    free = tuple(v for v in state.pool if v.grade <= 0)
    return B0Result(
        mode=mode,
        ring=relR,
        gamma=gamma,
        fixed=dict(state.fixed),
        free=free,
        relations=relations,
        stats=state.stats,
        complete=state.complete,
    )


# -- named laws ------------------------------------------------------------

def elementary_I(D: int = 6, coeff=ZZ) -> TwoFGL:
    """1 + 2(x+y)t + (x-y)^2 t^2, the type-I law with additive roots x+-y."""
    R = series_ring([], ["x", "y"], coeff)
    x, y = R.var("x"), R.var("y")
    F = MSeries(R, ("x", "y"), [2 * (x + y), (x - y) * (x - y)], trunc=D)
    return TwoFGL(F, mode="minus-one")


def universal_deg0(D: int = 4) -> TwoFGL:
    """1 + 2(x+y)t + (x^2 + gamma xy + y^2)t^2 over Z[gamma]/(gamma+2)(gamma-2)^2."""
    g = Variable("gamma", KIND_USER, 0)
    R = series_ring([g], ["x", "y"], ZZ)
    x, y, gp = R.var("x"), R.var("y"), R.var(g)
    comps = [2 * (x + y), x * x + gp * x * y + y * y]
    F = MSeries(R, ("x", "y"), comps, trunc=D)
    rel = (gp + 2) * (gp - 2) * (gp - 2)
    return TwoFGL(F, mode="minus-one", modulo=(rel,))


def universal_deg0_eps(D: int = 4) -> TwoFGL:
    """1 + (1-e)(x+y)t + (-e(x^2+y^2) + axy)t^2 over Z_e[a] mod its ideal."""
    a = Variable("a", KIND_USER, 0)
    R = series_ring([a, epsilon_var()], ["x", "y"], ZZ)
    x, y, ap, e = R.var("x"), R.var("y"), R.var(a), R.var("e")
    comps = [(1 - e) * (x + y), -e * (x * x + y * y) + ap * x * y]
    F = MSeries(R, ("x", "y"), comps, trunc=D)
    ideal = (
        (1 + e) * ap,
        (ap - (1 - e)) * (ap - (1 - e)) * (ap + (1 - e)),
    )
    return TwoFGL(F, mode="refined", modulo=ideal)


NAMED_LAWS = {
    "elementary-I": elementary_I,
    "universal-2fgl-deg0": universal_deg0,
    "universal-2fgl-deg0-eps": universal_deg0_eps,
}
