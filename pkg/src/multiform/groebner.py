"""Groebner bases over Q, Z/p (reduced) and Z, Z/n (strong).

Over a field this is plain Buchberger with the coprime-lead-monomial
criterion.  Over Z every pair contributes an S-polynomial and, when neither
leading coefficient divides the other, a G-polynomial (the Bezout
combination of the leading coefficients at the lcm monomial); reduction of
a term requires the leading monomial to divide it and performs Euclidean
division on the coefficient, so normal forms leave remainders smaller than
every applicable leading coefficient.  Over Z/n with n composite,
annihilator multiples n/gcd(lc, n) * f are enqueued as well.

No pair-skipping criteria are applied outside the field case: the product
criterion in its field form is not valid over a PID, and the instances
here are small enough that correctness wins.  One cheaper measure keeps
bases lean instead: whenever a new row's lead term exactly divides an
older row's lead term, the older row is replaced by its normal form on
the spot.  Replacement, unlike dropping, preserves completeness mid-run;
retired leads stop breeding pairs.

The incremental driver folds a relation stream into the basis, skipping
relations that pre-reduce to zero, and eliminates trivial relations
(unit * variable - value with the value free of active variables): the
variable is fixed, substituted everywhere and removed from the active
pool.  Each processed pair costs one unit of the step budget
(FTL_STEP_BUDGET, default 10^7); exhaustion aborts with the partial state
flagged incomplete.
"""

from __future__ import annotations

import heapq
import os
from dataclasses import dataclass, field as dfield
from fractions import Fraction
from math import gcd

from .poly import KIND_EPSILON, KIND_FTL, KIND_INVERTER, KIND_2FGL, Polynomial, PolyRing

DEFAULT_BUDGET = 10_000_000

_MASK = 0x7F


def _invkey(k):
    """Componentwise negation of a sort key, for use in a min-heap."""
    return tuple(_invkey(x) for x in k) if isinstance(k, tuple) else -k


class BudgetExhausted(RuntimeError):
    pass


class Budget:
    """Shared counter of pair reductions across one logical run."""

    def __init__(self, limit: int | None = None):
        if limit is None:
            limit = int(os.environ.get("FTL_STEP_BUDGET", DEFAULT_BUDGET))
        self.limit = limit
        self.used = 0

    def spend(self):
        self.used += 1
        if self.used > self.limit:
            raise BudgetExhausted(f"step budget of {self.limit} exhausted")


@dataclass
class GBStats:
    steps: int = 0
    skipped: int = 0
    max_basis: int = 0
    pair_reductions: int = 0


@dataclass
class GBState:
    ring: PolyRing
    basis: list
    fixed: dict
    pool: tuple
    stats: GBStats
    complete: bool = True
    seed: tuple = ()


@dataclass
class RunResult:
    fixed: dict
    free: tuple
    relations: list
    stats: GBStats
    complete: bool = True


def _xgcd(a: int, b: int) -> tuple[int, int, int]:
    x0, x1, y0, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    return a, x0, y0


def _modinv(a: int, n: int) -> int:
    g, x, _ = _xgcd(a % n, n)
    if g != 1:
        raise ValueError("not invertible")
    return x % n


def _unit_to_canonical(lc: int, n: int) -> int:
    """Unit u of Z/n with u*lc = gcd(lc, n) mod n."""
    d = gcd(lc, n)
    nd = n // d
    u0 = _modinv((lc // d) % nd, nd) if nd > 1 else 1
    for k in range(d):
        u = u0 + k * nd
        if gcd(u, n) == 1:
            return u % n
    raise AssertionError("no unit lift found")


class _Engine:
    """Shared Buchberger machinery operating on raw term dicts."""

    def __init__(self, ring: PolyRing, budget: Budget | None = None,
                 stats: GBStats | None = None):
        if ring.eager_epsilon and ring._eps_i is not None:
            raise ValueError(
                "eager-epsilon rings cannot host Groebner reduction; "
                "use a plain ring with an explicit e^2 - 1 relation"
            )
        self.ring = ring
        self.coeff = ring.coeff
        self.kind = ring.coeff.kind
        self.field = ring.coeff.is_field
        self.mod = ring.coeff.modulus
        self.budget = budget or Budget()
        self.stats = stats or GBStats()
        self.rows: list[dict] = []
        self.lms: list[int] = []
        self.lcs: list = []
        self.pairs: list = []
        self._seq = 0
        self._ikey: dict[int, tuple] = {}

    # -- normalization ---------------------------------------------------

    def _normalize(self, terms: dict) -> dict:
        lm = max(terms, key=self.ring.sort_key_cached)
        lc = terms[lm]
        if self.kind == "Z":
            if lc < 0:
                terms = {m: -c for m, c in terms.items()}
        elif self.kind == "Q":
            if lc != 1:
                inv = Fraction(1) / lc
                terms = {m: c * inv for m, c in terms.items()}
        else:
            n = self.mod
            if self.field:
                if lc != 1:
                    inv = _modinv(lc, n)
                    terms = {m: (c * inv) % n for m, c in terms.items()}
                    terms = {m: c for m, c in terms.items() if c}
            else:
                u = _unit_to_canonical(lc, n)
                if u != 1:
                    terms = {m: (c * u) % n for m, c in terms.items()}
                    terms = {m: c for m, c in terms.items() if c}
        return terms

    # -- reduction ---------------------------------------------------------

    def normal_form(self, terms: dict, skip: int = -1) -> dict:
        ring = self.ring
        key = ring.sort_key_cached
        guard = ring._guard
        rows, lms, lcs = self.rows, self.lms, self.lcs
        nrows = len(rows)
        work = dict(terms)
        out: dict[int, object] = {}
        mod = self.mod
        # monomials are consumed largest first; reducing m only spawns
        # terms strictly below m, so a heap with lazy deletion visits
        # each monomial once instead of rescanning the whole dict
        ikc = self._ikey
        heap = []
        for m in work:
            ik = ikc.get(m)
            if ik is None:
                ikc[m] = ik = _invkey(key(m))
            heap.append((ik, m))
        heapq.heapify(heap)
        pop, push = heapq.heappop, heapq.heappush
        while heap:
            m = pop(heap)[1]
            c = work.pop(m, 0)
            if mod and c:
                c %= mod
            if not c:
                continue
            progress = True
            while progress and c:
                progress = False
                for i in range(nrows):
                    if i == skip or lcs[i] is None:
                        continue
                    lm = lms[i]
                    if ((m | guard) - lm) & guard != guard:
                        continue
                    lc = lcs[i]
                    if self.kind == "Z":
                        q, r = divmod(c, lc)
                        if not q:
                            continue
                        c = r
                    elif self.kind == "Q":
                        q = c / lc
                        c = 0
                    else:
                        n = self.mod
                        d = gcd(lc, n)
                        r = c % d
                        if r == c:
                            continue
                        q = (((c - r) // d) * _modinv(lc // d, n // d)) % n
                        c = r
                    delta = m - lm
                    row = rows[i]
                    get = work.get
                    for mm, cc in row.items():
                        if mm == lm:
                            continue
                        w = mm + delta
                        if w & guard:
                            raise OverflowError("monomial overflow in reduction")
                        v = get(w)
                        if v is None:
                            work[w] = -q * cc
                            ik = ikc.get(w)
                            if ik is None:
                                ikc[w] = ik = _invkey(key(w))
                            push(heap, (ik, w))
                        else:
                            work[w] = v - q * cc
                    progress = True
                    if not c:
                        break
            if c:
                out[m] = c
        return out

    # -- pair management ----------------------------------------------------

    def _insert(self, terms: dict) -> int:
        terms = self._normalize(terms)
        if not terms:
            return -1
        idx = len(self.rows)
        lm = max(terms, key=self.ring.sort_key_cached)
        self.rows.append(terms)
        self.lms.append(lm)
        self.lcs.append(terms[lm])
        for j in range(idx):
            if self.lcs[j] is None:
                continue
            self._push_pairs(j, idx, self.lms[j], lm)
        if self.kind == "Zn" and not self.field:
            lc = terms[lm]
            ann = self.mod // gcd(lc, self.mod)
            if 1 < ann < self.mod:
                self._push(lm, (2, idx, -1))
        if len(self.rows) > self.stats.max_basis:
            self.stats.max_basis = len(self.rows)
        return idx

    def add(self, terms: dict) -> int:
        idx = self._insert(terms)
        if idx < 0:
            return idx
        # A new lead term can supersede older rows.  Every active row whose
        # lead term the newcomer divides exactly is replaced by its normal
        # form: dropping outright is only safe on a finished basis, but
        # replacement preserves the ideal at any point and keeps stale
        # leads from breeding pairs.
        guard = self.ring._guard
        pending = [idx]
        while pending:
            j = pending.pop()
            lcj = self.lcs[j]
            if lcj is None:
                continue
            lmj = self.lms[j]
            for i in range(len(self.rows)):
                lci = self.lcs[i]
                if lci is None or i == j:
                    continue
                if ((self.lms[i] | guard) - lmj) & guard != guard:
                    continue
                if self.kind == "Z":
                    if lci % lcj:
                        continue
                elif not self.field:
                    if lci % gcd(lcj, self.mod):
                        continue
                old = self.rows[i]
                self.lcs[i] = None
                nf = self.normal_form(old)
                if nf:
                    k = self._insert(nf)
                    if k >= 0:
                        pending.append(k)
        return idx

    def _push_pairs(self, i: int, j: int, lmi: int, lmj: int):
        L = self.ring.mono_lcm(lmi, lmj)
        if self.field:
            if L == lmi + lmj:  # coprime lead monomials
                return
            self._push(L, (0, i, j))
            return
        self._push(L, (0, i, j))
        lci, lcj = self.lcs[i], self.rows[j][lmj]
        if self.kind == "Z":
            if lci % lcj and lcj % lci:
                self._push(L, (1, i, j))
        else:
            if lci != lcj:
                self._push(L, (1, i, j))

    def _push(self, L: int, task):
        self._seq += 1
        heapq.heappush(self.pairs, (self.ring.sort_key_cached(L), self._seq, L, task))

    def _mul_shift(self, terms: dict, delta: int, scale) -> dict:
        guard = self.ring._guard
        out = {}
        for m, c in terms.items():
            w = m + delta
            if w & guard:
                raise OverflowError("monomial overflow")
            out[w] = c * scale
        return out

    def _combine(self, A: dict, B: dict) -> dict:
        out = dict(A)
        get = out.get
        for m, c in B.items():
            v = get(m)
            out[m] = c if v is None else v + c
        mod = self.mod
        if mod:
            return {m: cm for m, c in out.items() if (cm := c % mod)}
        return {m: c for m, c in out.items() if c}

    def run(self):
        """Process pending pairs until the Buchberger criterion holds."""
        while self.pairs:
            _, _, L, task = heapq.heappop(self.pairs)
            kind, i, j = task
            if self.lcs[i] is None or (j >= 0 and self.lcs[j] is None):
                continue
            self.budget.spend()
            self.stats.pair_reductions += 1
            if kind == 2:
                lc = self.lcs[i]
                ann = self.mod // gcd(lc, self.mod)
                cand = self._mul_shift(self.rows[i], 0, ann)
                cand = {m: c % self.mod for m, c in cand.items()}
                cand = {m: c for m, c in cand.items() if c}
            else:
                lmi, lmj = self.lms[i], self.lms[j]
                lci, lcj = self.lcs[i], self.lcs[j]
                di, dj = L - lmi, L - lmj
                if kind == 0:
                    if self.field:
                        si, sj = 1, -1  # rows are monic
                    else:
                        l = lci // gcd(lci, lcj) * lcj
                        si, sj = l // lci, -(l // lcj)
                    cand = self._combine(
                        self._mul_shift(self.rows[i], di, si),
                        self._mul_shift(self.rows[j], dj, sj),
                    )
                else:
                    d, u, v = _xgcd(lci, lcj)
                    cand = self._combine(
                        self._mul_shift(self.rows[i], di, u),
                        self._mul_shift(self.rows[j], dj, v),
                    )
            if not cand:
                continue
            nf = self.normal_form(cand)
            if nf:
                self.add(nf)

    # -- cleanup -------------------------------------------------------------

    def _lead_reducible(self, i: int) -> bool:
        guard = self.ring._guard
        m, c = self.lms[i], self.lcs[i]
        for j in range(len(self.rows)):
            if j == i or self.lcs[j] is None:
                continue
            lm = self.lms[j]
            if ((m | guard) - lm) & guard != guard:
                continue
            lc = self.lcs[j]
            if self.kind == "Q":
                return True
            if self.kind == "Z":
                if c % lc == 0:
                    return True
            else:
                if c % gcd(lc, self.mod) == 0:
                    return True
        return False

    def interreduce(self):
        changed = True
        while changed:
            changed = False
            order = sorted(
                (k for k in range(len(self.rows)) if self.lcs[k] is not None),
                key=lambda k: self.ring.sort_key_cached(self.lms[k]),
                reverse=True,
            )
            for i in order:
                if self._lead_reducible(i):
                    self.lcs[i] = None
                    changed = True
            for i in range(len(self.rows)):
                if self.lcs[i] is None:
                    continue
                nf = self.normal_form(self.rows[i], skip=i)
                if nf != self.rows[i]:
                    changed = True
                    if nf:
                        nf = self._normalize(nf)
                        self.rows[i] = nf
                        self.lms[i] = max(nf, key=self.ring.sort_key_cached)
                        self.lcs[i] = nf[self.lms[i]]
                    else:
                        self.lcs[i] = None

    def polynomials(self) -> list[Polynomial]:
        out = [
            Polynomial(self.ring, dict(self.rows[i]), _own=True)
            for i in range(len(self.rows))
            if self.lcs[i] is not None
        ]
        out.sort(key=lambda p: self.ring.sort_key_cached(p.leading()[0]))
        return out


# -- public operations ---------------------------------------------------


def reduce(p: Polynomial, basis, budget: Budget | None = None) -> Polynomial:
    """Full normal form of p modulo the basis (term by term)."""
    basis = [g for g in basis if g]
    if not basis or not p:
        return p
    eng = _Engine(p.ring, budget=budget)
    for g in basis:
        terms = eng._normalize(g.terms)
        eng.rows.append(terms)
        lm = max(terms, key=p.ring.sort_key_cached)
        eng.lms.append(lm)
        eng.lcs.append(terms[lm])
    return Polynomial(p.ring, eng.normal_form(p.terms), _own=True)


def buchberger(gens, budget: Budget | None = None,
               stats: GBStats | None = None) -> list[Polynomial]:
    """Groebner basis: reduced over a field, strong and minimal over Z, Z/n."""
    gens = [g for g in gens if g]
    if not gens:
        return []
    ring = gens[0].ring
    eng = _Engine(ring, budget=budget, stats=stats)
    for g in gens:
        if g.ring is not ring:
            raise ValueError("generators from different rings")
        eng.add(dict(g.terms))
    eng.run()
    eng.interreduce()
    return eng.polynomials()


def ideal_equal(A, B, budget: Budget | None = None) -> bool:
    """Mutual containment via reduction to zero against either basis."""
    A = [g for g in A if g]
    B = [g for g in B if g]
    if not A or not B:
        return not A and not B
    ga = buchberger(A, budget=budget)
    gb = buchberger(B, budget=budget)
    return all(not reduce(p, ga, budget=budget) for p in B) and all(
        not reduce(p, gb, budget=budget) for p in A
    )


def _trivial_relation(ring: PolyRing, terms: dict, lm: int, lc, pool_idx) -> tuple | None:
    """Detect unit * eps^d * v - value with the value free of pool variables."""
    if lc != 1 and lc != -1:
        return None
    eps_i = ring._eps_i
    target = None
    exps = ring.mono_unpack(lm)
    for i, e in enumerate(exps):
        if not e:
            continue
        if i == eps_i:
            if e > 1:
                return None
            continue
        if i in pool_idx and e == 1 and target is None:
            target = i
        else:
            return None
    if target is None:
        return None
    # remaining terms may only involve epsilon
    for m in terms:
        if m == lm:
            continue
        for i, e in enumerate(ring.mono_unpack(m)):
            if e and i != eps_i:
                return None
            if i == eps_i and e > 1:
                return None
    tail = {m: c for m, c in terms.items() if m != lm}
    value = Polynomial(ring, {m: -c * lc for m, c in tail.items()}, _own=True)
    if eps_i is not None and exps[eps_i]:
        value = (value * ring.var(ring.vars[eps_i])).reduce_epsilon()
    return target, value


def incremental_gb(stream, ring: PolyRing, pool=None, *,
                   prereduce: bool = True, seed=(),
                   budget: Budget | None = None,
                   resume: GBState | None = None) -> GBState:
    """Fold a relation stream into a Groebner state, fixing trivial variables.

    pool is the set of coefficient variables eligible for elimination
    (defaults to all ternary/2-valued coefficient variables of the ring).
    Pass a previous GBState as resume to continue folding into it.
    Returns a GBState; complete=False if the step budget ran out.
    """
    if pool is None:
        pool = resume.pool if resume else [
            v for v in ring.vars if v.kind in (KIND_FTL, KIND_2FGL)
        ]
    pool = [ring.vars[ring.var_index(v)] for v in pool]
    pool_idx = {ring.var_index(v) for v in pool}
    budget = budget or Budget()
    stats = GBStats(**vars(resume.stats)) if resume else GBStats()
    eng = _Engine(ring, budget=budget, stats=stats)
    fixed: dict = {}
    subs_map: dict = {}
    if resume:
        if resume.ring is not ring:
            raise ValueError("resume state belongs to a different ring")
        for g in resume.basis:
            eng.add(dict(g.terms))
        eng.run()
        fixed.update(resume.fixed)
        subs_map.update(resume.fixed)
        pool_idx -= {ring.var_index(v) for v in resume.fixed}
    seed = tuple(seed)
    carried = resume.seed if resume else ()
    complete = True

    def eliminate():
        nonlocal eng
        while True:
            found = None
            for i in range(len(eng.rows)):
                if eng.lcs[i] is None:
                    continue
                hit = _trivial_relation(ring, eng.rows[i], eng.lms[i],
                                        eng.lcs[i], pool_idx)
                if hit is not None:
                    found = (i, *hit)
                    break
            if found is None:
                return
            i, vi, value = found
            var = ring.vars[vi]
            fixed[var] = value
            subs_map[var] = value
            pool_idx.discard(vi)
            # substitute into rows mentioning the variable and rebuild;
            # untouched rows (the context relations in particular) are
            # kept verbatim so eps^2 - 1 survives its own reduction
            polys = []
            for k in range(len(eng.rows)):
                if eng.lcs[k] is None or k == i:
                    continue
                terms = eng.rows[k]
                p = Polynomial(ring, dict(terms), _own=True)
                if any(ring.mono_exp(m, vi) for m in terms):
                    p = p.subs({var: value}).reduce_epsilon()
                if p:
                    polys.append(p)
            new_eng = _Engine(ring, budget=budget, stats=stats)
            for p in polys:
                new_eng.add(dict(p.terms))
            new_eng.run()
            new_eng.interreduce()
            eng = new_eng

    def fold(rel: Polynomial):
        if subs_map:
            needed = False
            for m in rel.terms:
                for vi in tuple(subs_map):
                    if ring.mono_exp(m, ring.var_index(vi)):
                        needed = True
                        break
                if needed:
                    break
            if needed:
                rel = rel.subs(subs_map).reduce_epsilon()
        if not rel:
            return
        nf = eng.normal_form(rel.terms) if (prereduce and eng.rows) else dict(rel.terms)
        if not nf:
            stats.skipped += 1
            return
        stats.steps += 1
        eng.add(nf)
        eng.run()
        eng.interreduce()
        eliminate()

    try:
        for r in seed:
            fold(r)
        for item in stream:
            rel = item[1] if isinstance(item, tuple) else item
            fold(rel)
        eng.run()
        eng.interreduce()
        eliminate()
    except BudgetExhausted:
        complete = False
    return GBState(
        ring=ring,
        basis=eng.polynomials(),
        fixed=fixed,
        pool=tuple(v for v in pool if ring.var_index(v) in pool_idx),
        stats=stats,
        complete=complete,
        seed=carried + seed,
    )


def run_result(state: GBState) -> RunResult:
    """Condense a GBState: context seed relations are reported separately."""
    seed_texts = {s.text() for s in state.seed}
    relations = [p for p in state.basis if p.text() not in seed_texts]
    return RunResult(
        fixed=dict(state.fixed),
        free=state.pool,
        relations=relations,
        stats=state.stats,
        complete=state.complete,
    )
