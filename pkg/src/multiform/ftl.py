"""Formal ternary laws: the five-axiom verifier and the example laws.

A formal ternary law is a (4,3)-series F_t(x,y,z) = 1 + F_1 t + ... + F_4 t^4
over a Z[e]/(e^2-1)-algebra satisfying

1. neutral element:   F_t(x,0,0) = (1+xt)^2 (1-e*xt)^2;
2. symmetry:          F_t is fixed by permutations of (x,y,z);
3. associativity:     F_t(F_t(x,y,z),u,v) = F_t(x,F_t(y,z,u),v) as
                      (16,5)-series;
4. epsilon-linearity: F_t(-e*x,y,z) = F_{-e*t}(x,y,z);
5. weak neutral:      F_4(x,x,0) = 0.

The verifier reports one residual list per axiom plus an informational
F_3(x,x,0) value (a stronger neutral condition that holds for the known
geometric examples but is not an axiom).  Associativity dominates the cost,
so its sixteen component residuals are produced t-degree by t-degree and
the check aborts at the first nonzero one.

Built-in laws: `chow` (integral, the oriented specialization e = -1), `hmw`
(Milnor-Witt motivic cohomology), `ko` (Hermitian K-theory, coefficients in
Z_e[tau, u] where u stands for the inverse of the periodicity class gamma
and gamma itself never occurs), and `witt` (ko at e = 1, tau = 0).  Grades
tau: -1 and u: +2 make the ko law graded in the sense of MSeries.is_graded.

check_W_multiplicative_vs_KO replays the comparison of the ko law with the
image of the multiplicative one-valued law x+y-axy under W = C(N(-)): after
e -> -1, tau -> 2/a^2, u -> a^4 (every tau comes paired with u, so the
substitution is polynomial) both sides agree coefficient for coefficient.
"""

from __future__ import annotations

from dataclasses import dataclass

from .fgl import FGL, functor_N
from .poly import (
    KIND_GEOM,
    KIND_T,
    KIND_USER,
    PolyRing,
    Polynomial,
    Variable,
    ZZ,
    epsilon_var,
    geom_var,
)
from .series import MSeries, series_ring, substitute_stream
from .symfun import monomial_symmetric, swap_variables
from .twofgl import functor_C, reduce_mod, verify_2fgl

AXIOMS_FTL = (
    "neutral",
    "symmetry",
    "associativity",
    "epsilon-linearity",
    "weak-neutral",
)


@dataclass
class FTLReport:
    """Residuals per axiom; strong_neutral is F_3(x,x,0), informational only."""

    residuals: dict[str, list[Polynomial]]
    strong_neutral: Polynomial
    D: int
    aborted_at: int | None = None

    @property
    def passed(self) -> bool:
        return self.aborted_at is None and all(
            not r for rs in self.residuals.values() for r in rs
        )

    @property
    def strong_neutral_holds(self) -> bool:
        return not self.strong_neutral

    def failing(self) -> list[str]:
        out = [ax for ax, rs in self.residuals.items() if any(rs)]
        if self.aborted_at is not None and "associativity" not in out:
            out.append("associativity")
        return out

    def lines(self) -> list[str]:
        out = []
        for ax, rs in self.residuals.items():
            bad = [f"t^{l}: {r.text()}" for l, r in enumerate(rs, 1) if r]
            status = "ok" if not bad else "FAIL " + "; ".join(bad)
            if ax == "associativity" and self.aborted_at is not None:
                status += f" (stopped at t^{self.aborted_at})"
            out.append(f"{ax}: {status}")
        flag = "holds" if self.strong_neutral_holds else (
            f"fails: {self.strong_neutral.text()}"
        )
        out.append(f"strong neutral F3(x,x,0) [informational]: {flag}")
        return out


def _epsilon_of(ring: PolyRing, epsilon: int | None) -> Polynomial:
    if ring.has_var("e"):
        if epsilon is not None:
            raise ValueError("the ring already carries its own epsilon variable")
        return ring.var("e")
    if epsilon not in (1, -1):
        raise ValueError("a ring without epsilon needs an explicit sign (+1 or -1)")
    return ring.constant(epsilon)


def _coeff_vars(ring: PolyRing):
    return [v for v in ring.vars if v.kind not in (KIND_GEOM, KIND_T)]


def verify_ftl(F: MSeries, epsilon: int | None = None, modulo=(),
               abort_early: bool = True) -> FTLReport:
    """Check the five ternary-law axioms up to the series truncation.

    epsilon: numeric sign for rings without an e variable (the Chow law
    lives over plain Z with epsilon acting as -1).  modulo: coefficient-ring
    relations the law needs to close (the ko law needs (1+e)tau = 0);
    residuals are reduced by their Groebner basis before being judged.
    """
    if F.n != 4 or F.d != 3:
        raise ValueError("expected a (4,3)-series")
    ring = F.ring
    x, y, z = F.gvars
    eps = _epsilon_of(ring, epsilon)
    xp = ring.var(x)
    tp = ring.var("t")
    modulo = tuple(modulo)

    def cut(rs):
        return reduce_mod(rs, modulo) if modulo else rs

    one = ring.one
    split = (one + xp * tp) * (one + xp * tp)
    split = split * (one - eps * xp * tp) * (one - eps * xp * tp)
    at_zero = [c.subs({y: ring.zero, z: ring.zero}) for c in F.components]
    neutral = [
        a - split.coefficient_of("t", l) for l, a in enumerate(at_zero, 1)
    ]

    symmetry = [swap_variables(c, x, y) - c for c in F.components]
    symmetry += [swap_variables(c, y, z) - c for c in F.components]

    twisted = [c.subs({x: -eps * xp}) for c in F.components]
    scaled = F.scale_t(-eps)
    linearity = [a - b for a, b in zip(twisted, scaled.components)]

    weak = [F.component(4).subs({y: xp, z: ring.zero})]
    strong = F.component(3).subs({y: xp, z: ring.zero})
    if modulo:
        strong = cut([strong])[0]

    assoc, aborted = _assoc_residuals_43(F, abort_early, reduce=cut)

    residuals = {
        "neutral": cut(neutral),
        "symmetry": cut(symmetry),
        "associativity": assoc,
        "epsilon-linearity": cut(linearity),
        "weak-neutral": cut(weak),
    }
    return FTLReport(residuals=residuals, strong_neutral=strong,
                     D=F.trunc, aborted_at=aborted)


def _fresh(name: str, taken) -> str:
    while name in taken:
        name += "_"
    return name


def _assoc_residuals_43(F: MSeries, abort_early: bool,
                        wcap: int | None = None, reduce=None):
    """Residual components of the (16,5) associativity equality.

    Both sides stream t-slice by t-slice; with abort_early the comparison
    stops at the first slice that is nonzero (after the optional reduction).
    """
    ring = F.ring
    names = [v.name for v in F.gvars]
    taken = set(v.name for v in ring.vars)
    for nm in ("u", "v", "w"):
        fresh = _fresh(nm, taken)
        taken.add(fresh)
        names.append(fresh)
    xn, yn, zn, un, vn, wn = names
    ext = series_ring(_coeff_vars(ring), names, ring.coeff)
    Fo = F.convert(ext)
    allow = not Fo.is_composable()
    left = substitute_stream(Fo.relabel((wn, un, vn)), 1, Fo,
                             allow_constant_terms=allow, wcap=wcap)
    right = substitute_stream(Fo.relabel((xn, wn, vn)), 2,
                              Fo.relabel((yn, zn, un)),
                              allow_constant_terms=allow, wcap=wcap)
    residuals = []
    aborted = None
    for (l, a), (_, b) in zip(left, right):
        d = a - b
        if d and reduce is not None:
            d = reduce([d])[0]
        residuals.append(d)
        if d and abort_early:
            aborted = l
            break
    return residuals, aborted


class FTL:
    """A verified formal ternary law with a provenance tag.

    modulo carries coefficient-ring relations the law relies on.
    """

    def __init__(self, series: MSeries, tag: str = "",
                 epsilon: int | None = None, modulo=(),
                 verify: bool = True):
        self.series = series
        self.tag = tag
        self.epsilon = epsilon
        self.modulo = tuple(modulo)
        self.D = series.trunc
        self.report = None
        if verify:
            self.report = verify_ftl(series, epsilon, self.modulo)
            if not self.report.passed:
                raise ValueError(
                    f"law {tag or '<unnamed>'} fails: "
                    + ", ".join(self.report.failing())
                )

    def __repr__(self):
        return f"FTL({self.tag or 'unnamed'}, D={self.D})"


def ftl_degree(F) -> tuple[int, int]:
    """(sup, inf) of |alpha| - l over the nonzero terms of the law."""
    series = F.series if isinstance(F, FTL) else F
    return series.degree_valuation()


def epsilon_specialize(F, sign: int) -> MSeries:
    """The series with e replaced by +1 or -1, over the e-free ring."""
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    series = F.series if isinstance(F, FTL) else F
    ring = series.ring
    if not ring.has_var("e"):
        return series
    val = ring.constant(sign)
    comps = [c.subs({"e": val}) for c in series.components]
    keep = [v for v in _coeff_vars(ring) if v.name != "e"]
    target = series_ring(keep, [v.name for v in series.gvars], ring.coeff)
    return MSeries(target, [v.name for v in series.gvars],
                   [target.convert(c) for c in comps], series.trunc)


# -- the example laws -------------------------------------------------------

def _sigma(ring: PolyRing, orbit) -> Polynomial:
    return monomial_symmetric(ring, ("x", "y", "z"), orbit)


def chow(D: int = 8) -> FTL:
    """The ternary law of Chow groups (epsilon acts as -1)."""
    R = series_ring([], ["x", "y", "z"], ZZ)
    s = lambda o: _sigma(R, o)
    comps = [
        4 * s((1, 0, 0)),
        6 * s((2, 0, 0)) + 4 * s((1, 1, 0)),
        4 * s((3, 0, 0)) - 4 * s((2, 1, 0)) + 40 * s((1, 1, 1)),
        s((4, 0, 0)) - 4 * s((3, 1, 0)) + 6 * s((2, 2, 0)) + 4 * s((2, 1, 1)),
    ]
    return FTL(MSeries(R, ("x", "y", "z"), comps, trunc=D),
               tag="chow", epsilon=-1)


def hmw(D: int = 8) -> FTL:
    """The ternary law of Milnor-Witt motivic cohomology."""
    R = series_ring([epsilon_var()], ["x", "y", "z"], ZZ)
    e = R.var("e")
    s = lambda o: _sigma(R, o)
    comps = [
        2 * (1 - e) * s((1, 0, 0)),
        2 * (1 - 2 * e) * s((2, 0, 0)) + 2 * (1 - e) * s((1, 1, 0)),
        2 * (1 - e) * s((3, 0, 0)) - 2 * (1 - e) * s((2, 1, 0))
        + 8 * (2 - 3 * e) * s((1, 1, 1)),
        s((4, 0, 0)) - 2 * (1 - e) * s((3, 1, 0))
        + 2 * (1 - 2 * e) * s((2, 2, 0)) + 2 * (1 - e) * s((2, 1, 1)),
    ]
    return FTL(MSeries(R, ("x", "y", "z"), comps, trunc=D), tag="hmw")


def ko_context() -> PolyRing:
    """Coefficient ring Z_e[tau, u] of the Hermitian K-theory law.

    u stands for the inverse of the periodicity class; the class itself
    never occurs, so an honest polynomial variable does the job.  The
    grades tau: -1, u: +2 make the law graded.  Over the free ring the law
    does not close: epsilon-linearity forces (1+e)tau = 0 (tau sits on
    parity-mismatched coefficients and the periodicity class is invertible)
    and associativity forces tau^2 u = 2(1-e); ko() declares both as its
    modulo ideal.
    """
    tau = Variable("tau", KIND_USER, -1)
    u = Variable("u", KIND_USER, 2)
    return series_ring([tau, u, epsilon_var()], ["x", "y", "z"], ZZ)


def ko(D: int = 8) -> FTL:
    """The ternary law of Hermitian K-theory over ko_context()."""
    R = ko_context()
    tau, u, e = R.var("tau"), R.var("u"), R.var("e")
    tg = tau * u  # tau * gamma^{-1}, the only way tau ever occurs
    s = lambda o: _sigma(R, o)
    comps = [
        2 * (1 - e) * s((1, 0, 0)) + tg * s((1, 1, 0)) + u * s((1, 1, 1)),
        2 * (1 - 2 * e) * s((2, 0, 0)) + 2 * (1 - e) * s((1, 1, 0))
        + 2 * tg * s((2, 1, 0)) - 3 * tg * s((1, 1, 1)) + u * s((2, 2, 0)),
        2 * (1 - e) * s((3, 0, 0)) - 2 * (1 - e) * s((2, 1, 0))
        + 8 * (2 - 3 * e) * s((1, 1, 1)) + tg * s((3, 1, 0))
        - 2 * tg * s((2, 2, 0)) + 3 * tg * s((2, 1, 1)) + u * s((3, 1, 1)),
        s((4, 0, 0)) - 2 * (1 - e) * s((3, 1, 0))
        + 2 * (1 - 2 * e) * s((2, 2, 0)) + 2 * (1 - e) * s((2, 1, 1))
        - tg * s((3, 1, 1)) + 2 * tg * s((2, 2, 1)) + u * s((2, 2, 2)),
    ]
    return FTL(MSeries(R, ("x", "y", "z"), comps, trunc=D), tag="ko",
               modulo=((1 + e) * tau, tau * tau * u - 2 + 2 * e))


def witt(D: int = 8) -> FTL:
    """The ko law at e = 1, tau = 0: Witt-cohomology coefficients, u kept."""
    base = ko(D).series
    ring = base.ring
    spec = [c.subs({"e": ring.one, "tau": ring.zero}) for c in base.components]
    u = Variable("u", KIND_USER, 2)
    R = series_ring([u], ["x", "y", "z"], ZZ)
    comps = [R.convert(c) for c in spec]
    return FTL(MSeries(R, ("x", "y", "z"), comps, trunc=D),
               tag="witt", epsilon=1)


NAMED_LAWS = {
    "chow": chow,
    "hmw": hmw,
    "ko": ko,
    "witt": witt,
}


# -- comparison with W = C(N(-)) -------------------------------------------

@dataclass
class WComparison:
    """Outcome of replaying the multiplicative-law comparison."""

    equal_minus: bool
    equal_plus: bool
    equal_additive: bool
    diffs: dict[str, list[Polynomial]]

    @property
    def ok(self) -> bool:
        return self.equal_minus and self.equal_plus and self.equal_additive


def _W_of_fgl(F: FGL) -> MSeries:
    """C(N(F)): input precision 2D gives a ternary series of precision D."""
    NF = functor_N(F)
    return functor_C(NF, mode="minus-one")


def _ko_polynomialized(D: int, target: PolyRing) -> list[Polynomial]:
    """ko components at e = -1 with tau^p u^q replaced by 2^p a^(4q - 2p).

    Every tau in the law is paired with at least one u, so the image of
    tau -> 2/a^2, u -> a^4 is polynomial.
    """
    S = epsilon_specialize(ko(D).series, -1)
    ring = S.ring
    it, iu = ring.var_index("tau"), ring.var_index("u")
    ia = target.var_index("a")
    out = []
    for comp in S.components:
        terms: dict[int, object] = {}
        for m, c in comp.terms.items():
            p = ring.mono_exp(m, it)
            q = ring.mono_exp(m, iu)
            if q < p:
                raise ValueError("a tau without matching u; not polynomial")
            mm = m - p * ring._unit[it] - q * ring._unit[iu]
            moved = target.convert(Polynomial(ring, {mm: c}))
            (mono, coeff), = moved.terms.items()
            mono += (4 * q - 2 * p) * target._unit[ia]
            terms[mono] = terms.get(mono, 0) + coeff * 2 ** p
        out.append(Polynomial(target, {m: c for m, c in terms.items() if c}))
    return out


def check_W_multiplicative_vs_KO(D: int = 6) -> WComparison:
    """Compare W(x+y-axy) with the ko law under tau -> 2/a^2, u -> a^4.

    Also checks the opposite sign x+y+axy (same image) and the additive
    limit a = 0 against the Chow law.
    """
    a = Variable("a", KIND_USER, 0)
    target = series_ring([a], ["x", "y", "z"], ZZ)
    ko_comps = [c.truncate_geom(D) for c in _ko_polynomialized(D, target)]

    diffs: dict[str, list[Polynomial]] = {}

    def w_components(sign: int) -> list[Polynomial]:
        R = PolyRing([a, geom_var("x"), geom_var("y")], coeff=ZZ)
        x, y, ap = R.var("x"), R.var("y"), R.var(a)
        F = FGL(x + y + sign * ap * x * y, D=2 * D)
        W = _W_of_fgl(F)
        rename = {v.name: nm for v, nm in zip(W.gvars, ("x", "y", "z"))}
        return [
            target.convert(c, rename=rename).truncate_geom(D)
            for c in W.components
        ]

    wm = w_components(-1)
    diffs["multiplicative-minus"] = [u - v for u, v in zip(wm, ko_comps)]
    wp = w_components(+1)
    diffs["multiplicative-plus"] = [u - v for u, v in zip(wp, ko_comps)]

    zero_a = {a: target.zero}
    ko_add = [c.subs(zero_a) for c in ko_comps]
    ch = chow(D).series
    ch_comps = [
        target.convert(c, rename=None).truncate_geom(D) for c in ch.components
    ]
    add_diffs = [u.subs(zero_a) - v for u, v in zip(wm, ch_comps)]
    add_diffs += [u - v for u, v in zip(ko_add, ch_comps)]
    diffs["additive-vs-chow"] = add_diffs

    return WComparison(
        equal_minus=not any(diffs["multiplicative-minus"]),
        equal_plus=not any(diffs["multiplicative-plus"]),
        equal_additive=not any(diffs["additive-vs-chow"]),
        diffs=diffs,
    )
