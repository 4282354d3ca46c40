"""Relation streams presenting windowed coefficient rings of generic laws.

A degree window keeps the coefficient symbols a^l_{ijk} (one per weakly
decreasing exponent orbit, 1 <= l <= 4 for ternary laws, l <= 2 for
2-valued ones) whose grade i+j+k-l lies between d_min and d_max, and
declares every other coefficient zero.  Symmetry of the resulting
generic series is structural, each symbol multiplying one monomial
symmetric polynomial; the remaining axioms become polynomial relations
among the symbols, every one homogeneous for the coefficient grading.

generate_relations streams the relations in resolution-friendly order:
neutral element first (it pins the a^l_{i00} column), then epsilon
linearity, then weak neutral element, then associativity one (monomial,
t-power) coefficient at a time capped at grade d_max, and finally the
context relations e^2 - 1 (epsilon kept symbolic) and 2*alpha - 1 (to
invert 2).  Within each phase relations come smallest grade first, then
by geometric monomial, then by t-power, so equal options give
byte-identical streams.

Associativity of an (n,d)-series law is an identity of (n^2, 2d-1)-series,
so its t-powers reach n^2 and a relation of grade at most d_max only
draws on geometric monomials of total degree at most d_max + n^2; the
expansion is truncated there.  Specializing epsilon to -1 or +1 happens
before expansion: relations that die under the specialization (all of
epsilon-linearity at -1, for instance) are simply never emitted.
"""

from __future__ import annotations

from dataclasses import dataclass

from .poly import (
    KIND_GEOM,
    KIND_T,
    PolyRing,
    Polynomial,
    Variable,
    ZZ,
    epsilon_var,
    ftl_coeff_var,
    inverter_var,
    twofgl_coeff_var,
)
from .series import MSeries, series_ring, substitute_stream
from .symfun import monomial_symmetric

ARITIES = ("ftl", "twofgl")
EPSILON_MODES = ("free", "+1", "-1")
PHASES = ("neutral", "linearity", "weak-neutral", "associativity", "context")


@dataclass(frozen=True)
class DegreeWindow:
    """Closed grade interval [d_min, d_max] selecting active coefficients."""

    d_min: int
    d_max: int

    def __post_init__(self):
        if self.d_min < -4:
            raise ValueError("no coefficient has grade below -4")
        if self.d_max < self.d_min:
            raise ValueError("empty degree window")

    def __contains__(self, grade: int) -> bool:
        return self.d_min <= grade <= self.d_max


def _law_shape(arity: str) -> tuple[int, tuple[str, ...]]:
    if arity == "ftl":
        return 4, ("x", "y", "z")
    if arity == "twofgl":
        return 2, ("x", "y")
    raise ValueError(f"unknown arity {arity!r}; expected one of {ARITIES}")


def enumerate_coefficients(w: DegreeWindow, arity: str = "ftl") -> list[Variable]:
    """Active orbit coefficients, largest grade first, then (l, i, j, k)."""
    n, _ = _law_shape(arity)
    out = []
    for l in range(1, n + 1):
        top = w.d_max + l
        for i in range(top + 1):
            for j in range(min(i, top - i) + 1):
                if arity == "twofgl":
                    if i + j - l in w:
                        out.append(twofgl_coeff_var(l, i, j))
                    continue
                for k in range(min(j, top - i - j) + 1):
                    if i + j + k - l in w:
                        out.append(ftl_coeff_var(l, i, j, k))
    out.sort(key=lambda v: (-v.grade, v.index))
    return out


def build_generic_law(w: DegreeWindow, arity: str = "ftl", coeff=ZZ) -> MSeries:
    """The in-window generic law F_t = 1 + sum_l sum_orbits a m_orbit t^l.

    Lives in a series ring over the active coefficients plus a free
    epsilon; truncation d_max + n^2 leaves room for the associativity
    expansion.  The series is graded by construction: a coefficient's
    grade cancels the monomial degree minus the t-power next to it.
    """
    n, names = _law_shape(arity)
    avars = enumerate_coefficients(w, arity)
    SR = series_ring(list(avars) + [epsilon_var()], list(names), coeff)
    gvars = [SR.vars[SR.var_index(nm)] for nm in names]
    comps = [SR.zero for _ in range(n)]
    for v in avars:
        l, orbit = v.index[0], v.index[1:]
        comps[l - 1] = comps[l - 1] + SR.var(v) * monomial_symmetric(
            SR, gvars, orbit
        )
    return MSeries(SR, names, comps, trunc=w.d_max + n * n, validate=False)


def relation_ring(w: DegreeWindow, arity: str = "ftl", *,
                  epsilon: str = "free", invert2: bool = False,
                  coeff=ZZ) -> PolyRing:
    """Plain ring hosting the emitted relations.

    The variable sequence feeds the monomial order: active coefficients
    by descending grade then index, epsilon, then the 2-inverter alpha.
    Epsilon folding stays off; the e^2 - 1 context relation does that
    job on the basis side.
    """
    if epsilon not in EPSILON_MODES:
        raise ValueError(f"epsilon mode {epsilon!r}; expected {EPSILON_MODES}")
    vars_ = list(enumerate_coefficients(w, arity))
    if epsilon == "free":
        vars_.append(epsilon_var())
    if invert2:
        vars_.append(inverter_var())
    return PolyRing(vars_, coeff=coeff, eager_epsilon=False)


def context_relations(rel_ring: PolyRing, *, epsilon: str = "free",
                      invert2: bool = False) -> list[tuple[str, Polynomial]]:
    out = []
    if epsilon == "free":
        e = rel_ring.var("e")
        out.append(("context", e * e - 1))
    if invert2:
        out.append(("context", 2 * rel_ring.var("alpha") - 1))
    return out


def _eps_of(ring: PolyRing, mode: str) -> Polynomial:
    if mode == "free":
        return ring.var("e")
    return ring.constant(1 if mode == "+1" else -1)


def _neutral_slices(F: MSeries, eps: Polynomial):
    ring = F.ring
    x, t = ring.var(F.gvars[0]), ring.var("t")
    rest = {v: ring.zero for v in F.gvars[1:]}
    half = (1 + x * t) * (1 - eps * x * t)
    target = half * half if F.n == 4 else half
    for l in range(1, F.n + 1):
        yield l, F.component(l).subs(rest) - target.coefficient_of("t", l)


def _linearity_slices(F: MSeries, eps: Polynomial):
    xv = F.gvars[0]
    mx = -eps * F.ring.var(xv)
    scaled = F.scale_t(-eps)
    for l in range(1, F.n + 1):
        yield l, F.component(l).subs({xv: mx}) - scaled.component(l)


def _weak_neutral_slices(F: MSeries):
    ring = F.ring
    x, y, z = F.gvars
    yield 4, F.component(4).subs({y: ring.var(x), z: ring.zero})


def _fresh(name: str, taken) -> str:
    while name in taken:
        name += "_"
    return name


def _assoc_slices(F: MSeries):
    """Stream (l, difference of the two association orders) slices."""
    ring = F.ring
    names = [v.name for v in F.gvars]
    taken = {v.name for v in ring.vars}
    extras = []
    for nm in ("u", "v")[: F.d - 1]:
        nm = _fresh(nm, taken)
        taken.add(nm)
        extras.append(nm)
    wn = _fresh("w", taken)
    coeff_vars = [v for v in ring.vars if v.kind not in (KIND_GEOM, KIND_T)]
    ext = series_ring(coeff_vars, names + extras + [wn], ring.coeff)
    Fo = F.convert(ext)
    left = substitute_stream(Fo.relabel((wn, *extras)), 1, Fo,
                             allow_constant_terms=True)
    right = substitute_stream(
        Fo.relabel((names[0], wn, *extras[1:])), 2,
        Fo.relabel((*names[1:], extras[0])),
        allow_constant_terms=True,
    )
    for (l, a), (_, b) in zip(left, right):
        yield l, a - b


def _extract(slices, rel_ring: PolyRing, tag: str, max_grade=None):
    """Per-(monomial, t-power) coefficient relations, canonically ordered.

    The grade of a slice term is its geometric degree minus the t-power;
    for graded input laws that equals the grade of the coefficient
    polynomial attached to it, so filtering by it is exact.
    """
    items = []
    for l, comp in slices:
        if not comp:
            continue
        ring = comp.ring
        gidx = [i for i, v in enumerate(ring.vars) if v.kind == KIND_GEOM]
        units = [ring._unit[i] for i in gidx]
        buckets: dict[tuple, dict] = {}
        for m, c in comp.terms.items():
            exps = tuple(ring.mono_exp(m, i) for i in gidx)
            if max_grade is not None and sum(exps) - l > max_grade:
                continue
            mm = m
            for u, e in zip(units, exps):
                if e:
                    mm -= e * u
            b = buckets.setdefault(exps, {})
            b[mm] = b.get(mm, 0) + c
        for exps, terms in buckets.items():
            p = rel_ring.convert(Polynomial(ring, terms))
            if p:
                key = (sum(exps) - l,
                       (sum(exps), tuple(-e for e in reversed(exps))), l)
                items.append((key, p))
    items.sort(key=lambda kp: kp[0])
    return [(tag, p) for _, p in items]


def generate_relations(w: DegreeWindow, arity: str = "ftl", *,
                       epsilon: str = "free", invert2: bool = False,
                       law: MSeries | None = None,
                       rel_ring: PolyRing | None = None,
                       phases=PHASES):
    """Stream (axiom-tag, relation) pairs for the windowed generic law.

    law defaults to build_generic_law(w, arity); passing a partially
    plugged variant (known coefficient values substituted in) generates
    the remaining relations directly in the smaller ring, which is how
    the heavy associativity phase is normally run.  All relations are
    polynomials of rel_ring.
    """
    if epsilon not in EPSILON_MODES:
        raise ValueError(f"epsilon mode {epsilon!r}; expected {EPSILON_MODES}")
    for ph in phases:
        if ph not in PHASES:
            raise ValueError(f"unknown phase {ph!r}")
    F = law if law is not None else build_generic_law(w, arity)
    R = rel_ring if rel_ring is not None else relation_ring(
        w, arity, epsilon=epsilon, invert2=invert2)
    eps = _eps_of(F.ring, epsilon)
    if "neutral" in phases:
        yield from _extract(_neutral_slices(F, eps), R, "neutral")
    if "linearity" in phases:
        yield from _extract(_linearity_slices(F, eps), R, "linearity")
    if "weak-neutral" in phases and F.n == 4:
        yield from _extract(_weak_neutral_slices(F), R, "weak-neutral")
    if "associativity" in phases:
        yield from _extract(_assoc_slices(F), R, "associativity",
                            max_grade=w.d_max)
    if "context" in phases:
        yield from context_relations(R, epsilon=epsilon, invert2=invert2)


def grade_of(p: Polynomial) -> int:
    """The single grading degree of a homogeneous relation."""
    grades = {p.ring.mono_grade(m) for m in p.terms}
    if not grades:
        raise ValueError("the zero polynomial has no grade")
    if len(grades) > 1:
        raise ValueError(f"not homogeneous: grades {sorted(grades)}")
    return grades.pop()


def dump_relations(rels, out) -> int:
    """Write one `axiom:grade:polynomial` line per relation; return count."""
    n = 0
    for tag, p in rels:
        out.write(f"{tag}:{grade_of(p)}:{p.text()}\n")
        n += 1
    return n
