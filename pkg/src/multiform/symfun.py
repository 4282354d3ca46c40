"""Symmetric-function utilities: orbit sums and elementary rewriting.

An orbit index is a weakly decreasing exponent tuple; the associated
monomial symmetric polynomial is the sum over the distinct permuted
monomials.  to_elementary rewrites a symmetric polynomial as a polynomial
in fresh variables e_1..e_r (e_l of grade l) by repeatedly stripping the
lexicographically leading term, one homogeneous component at a time.
"""

from __future__ import annotations

from functools import lru_cache
from itertools import combinations, permutations

from .poly import KIND_GEOM, KIND_USER, Polynomial, PolyRing, Variable, ZZ

OrbitIndex = tuple[int, ...]


def orbit_exponents(orbit: OrbitIndex, width: int) -> list[tuple[int, ...]]:
    """Distinct permutations of orbit padded with zeros to width."""
    if any(a < b for a, b in zip(orbit, orbit[1:])):
        raise ValueError(f"orbit index must be weakly decreasing, got {orbit}")
    if len(orbit) > width:
        raise ValueError("orbit longer than variable tuple")
    padded = tuple(orbit) + (0,) * (width - len(orbit))
    return sorted(set(permutations(padded)), reverse=True)


def monomial_symmetric(ring: PolyRing, variables, orbit: OrbitIndex) -> Polynomial:
    """Sum of the distinct monomials in the permutation orbit of `orbit`."""
    idx = [ring.var_index(v) for v in variables]
    one = ring.coeff.normalize(1)
    terms = {}
    for exps in orbit_exponents(tuple(orbit), len(idx)):
        m = ring.pack({i: e for i, e in zip(idx, exps) if e})
        terms[m] = one
    return Polynomial(ring, terms, _own=True)


def elementary_symmetric(ring: PolyRing, variables, l: int) -> Polynomial:
    """e_l of the given variables (e_0 = 1)."""
    idx = [ring.var_index(v) for v in variables]
    if l < 0 or l > len(idx):
        return ring.zero
    one = ring.coeff.normalize(1)
    terms = {}
    for comb in combinations(idx, l):
        terms[ring.pack({i: 1 for i in comb})] = one
    return Polynomial(ring, terms, _own=True)


def swap_variables(p: Polynomial, v1, v2) -> Polynomial:
    """p with two variables of the same kind exchanged."""
    ring = p.ring
    i, j = ring.var_index(v1), ring.var_index(v2)
    ui, uj = ring._unit[i], ring._unit[j]
    out = {}
    for m, c in p.terms.items():
        ei = ring.mono_exp(m, i)
        ej = ring.mono_exp(m, j)
        if ei != ej:
            m = m + (ei - ej) * (uj - ui)
        out[m] = c
    return Polynomial(ring, out, _own=True)


def check_symmetric(p: Polynomial, variables) -> bool:
    """True iff p is invariant under all adjacent transpositions."""
    variables = list(variables)
    for a, b in zip(variables, variables[1:]):
        if swap_variables(p, a, b) != p:
            return False
    return True


def to_elementary(
    p: Polynomial,
    variables,
    target: PolyRing | None = None,
    evar_prefix: str = "e",
) -> Polynomial:
    """Rewrite a symmetric polynomial in elementary symmetric variables.

    Variables of p outside `variables` ride along as coefficients.  The
    result lives in `target` if given (which must contain the non-y
    variables of p plus e-variables named e1..er), else in a freshly built
    ring with e-variables appended after the remaining variables.
    """
    ring = p.ring
    yvars = [ring.vars[ring.var_index(v)] for v in variables]
    if not check_symmetric(p, yvars):
        raise ValueError("polynomial is not symmetric in the given variables")
    r = len(yvars)
    yidx = [ring.var_index(v) for v in yvars]
    yset = set(yidx)
    if target is None:
        rest = [v for i, v in enumerate(ring.vars) if i not in yset]
        evars = [
            Variable(f"{evar_prefix}{l}", KIND_USER, grade=l) for l in range(1, r + 1)
        ]
        target = PolyRing(
            rest + evars, coeff=ring.coeff, order=ring.order,
            eager_epsilon=ring.eager_epsilon,
        )
    eidx = [target.var_index(f"{evar_prefix}{l}") for l in range(1, r + 1)]

    elem = [None] + [elementary_symmetric(ring, yvars, l) for l in range(1, r + 1)]
    # translation of non-y variables into the target ring, by position
    trans = {}
    for i in range(ring.nvars):
        if i not in yset:
            trans[i] = target.var_index(ring.vars[i].name)

    work = dict(p.terms)
    out: dict[int, object] = {}
    mod = ring.coeff.modulus

    def ypart(m):
        return tuple(ring.mono_exp(m, i) for i in yidx)

    while work:
        lam = max(ypart(m) for m in work)
        if any(a < b for a, b in zip(lam, lam[1:])):
            raise ValueError("leading exponent not weakly decreasing; not symmetric")
        # coefficient polynomial of the leading y-exponent
        cdict = {}
        for m, c in work.items():
            if ypart(m) == lam:
                mm = m
                for i, e in zip(yidx, lam):
                    if e:
                        mm -= e * ring._unit[i]
                cdict[mm] = c
        # e-monomial with exponents given by the staircase of lam
        steps = [lam[i] - (lam[i + 1] if i + 1 < r else 0) for i in range(r)]
        emono = target.pack({eidx[i]: b for i, b in enumerate(steps) if b})
        for m, c in cdict.items():
            mm = 0
            for i in range(ring.nvars):
                e = ring.mono_exp(m, i)
                if e:
                    mm += e * target._unit[trans[i]]
            mm += emono
            out[mm] = out.get(mm, 0) + c
        # subtract c * prod e_i(y)^steps from the work polynomial
        expansion = ring.one
        for i, b in enumerate(steps):
            if b:
                expansion = expansion * elem[i + 1] ** b
        sub = ring._dict_mul(cdict, expansion.terms)
        work = ring._dict_add(work, sub, -1)
    out = {m: c for m, c in out.items() if (c % mod if mod else c)}
    return Polynomial(target, out, _own=True)


@lru_cache(maxsize=None)
def orbit_in_elementary(nroots: int, orbit: OrbitIndex) -> tuple[tuple[tuple[int, ...], int], ...]:
    """m_orbit(y_1..y_m) expressed in e_1..e_m, as ((e-exponents), coeff) pairs.

    Ring-independent integer table used by series substitution; cached.
    """
    ys = [Variable(f"y{i}", KIND_GEOM, 1) for i in range(1, nroots + 1)]
    ring = PolyRing(ys, ZZ)
    msym = monomial_symmetric(ring, ys, orbit)
    q = to_elementary(msym, ys)
    tring = q.ring
    eidx = [tring.var_index(f"e{l}") for l in range(1, nroots + 1)]
    rows = []
    for m, c in q.terms.items():
        beta = tuple(tring.mono_exp(m, i) for i in eidx)
        rows.append((beta, int(c)))
    rows.sort()
    return tuple(rows)
