"""One-dimensional commutative formal group laws and the two-valued functors.

An FGL here is a bivariate polynomial F(x, y) = x + y + higher, truncated at
total degree D, symmetric, unital (F(x, 0) = x) and associative up to D.
Coefficients may be symbolic: the ring simply carries extra grade-0
variables.

The two constructions into 2-valued territory are sigma, the squaring
functor F |-> (1 + F t)^2, and N, which sends F to the type-I series
defined by

    Fbar_t(-x xbar, -y ybar) = (1 - F(x,y) F(xbar,ybar) t)(1 - F(xbar,y) F(x,ybar) t)

where xbar is the formal inverse.  Since -x xbar = x^2 + higher, N consumes
input precision 2D to produce output precision D in the new variables.
"""

from __future__ import annotations

from .poly import KIND_GEOM, KIND_USER, PolyRing, Polynomial, Variable, ZZ, geom_var
from .series import MSeries, SeriesMorphism, series_ring
from .symfun import swap_variables, to_elementary


class FGL:
    """A truncated formal group law F(x, y) over its coefficient ring.

    verify=True checks the linear part, unitality, symmetry and
    associativity up to D on construction.  Pass verify=False for series
    that are only group laws modulo relations (the free universal series,
    for instance); the cheap shape checks still run.
    """

    def __init__(self, F: Polynomial, D: int, gvars=None, verify: bool = True):
        ring = F.ring
        if gvars is None:
            gvars = ring.vars_of_kind(KIND_GEOM)
        gvars = tuple(ring.vars[ring.var_index(v)] for v in gvars)
        if len(gvars) != 2:
            raise ValueError("a formal group law needs exactly two variables")
        self.ring = ring
        self.x, self.y = gvars
        self.D = D
        self.F = F.truncate_geom(D)
        self._shape_checks()
        self.verified = False
        if verify:
            res = self.associativity_residual()
            if res:
                raise ValueError(
                    f"not associative up to degree {D}: residual {res.text()}"
                )
            self.verified = True

    def _shape_checks(self):
        x, y, F = self.x, self.y, self.F
        ring = self.ring
        lin = Polynomial(
            ring,
            {m: c for m, c in F.terms.items() if ring.mono_gdeg(m) <= 1},
            _own=True,
        )
        if lin != ring.var(x) + ring.var(y):
            raise ValueError("series must be x + y modulo degree 2")
        if F.subs({y: ring.zero}) != ring.var(x):
            raise ValueError("series must satisfy F(x, 0) = x")
        if swap_variables(F, x, y) != F:
            raise ValueError("series must be symmetric")

    def associativity_residual(self) -> Polynomial:
        """F(F(x,y),z) - F(x,F(y,z)) truncated at D, in an extended ring."""
        ring = self.ring
        zname = "z"
        while ring.has_var(zname):
            zname += "_"
        ext = PolyRing(
            list(ring.vars) + [geom_var(zname)],
            coeff=ring.coeff,
            order=ring.order,
            eager_epsilon=ring.eager_epsilon,
        )
        x, y, z = self.x.name, self.y.name, zname
        Fc = ext.convert(self.F)
        F_yz = ext.convert(self.F, rename={x: y, y: z})
        lhs = Fc.subs({x: Fc, y: ext.var(z)}).truncate_geom(self.D)
        rhs = Fc.subs({y: F_yz}).truncate_geom(self.D)
        return lhs - rhs

    def coefficient_vars(self) -> tuple[Variable, ...]:
        return tuple(v for v in self.ring.vars if v.kind != KIND_GEOM)

    def __repr__(self):
        return f"FGL({self.F.text()}; D={self.D})"


# -- named laws ------------------------------------------------------------


def additive(D: int = 8, coeff=ZZ) -> FGL:
    ring = PolyRing([geom_var("x"), geom_var("y")], coeff=coeff)
    return FGL(ring.parse("x + y"), D)


def multiplicative(a="a", D: int = 8, coeff=ZZ) -> FGL:
    """x + y - a x y.  a may be a symbol name or a numeric value."""
    if isinstance(a, str):
        avar = Variable(a, KIND_USER, 0)
        ring = PolyRing([avar, geom_var("x"), geom_var("y")], coeff=coeff)
        F = ring.parse(f"x + y - {a}*x*y")
    else:
        ring = PolyRing([geom_var("x"), geom_var("y")], coeff=coeff)
        F = ring.parse("x + y") - ring.constant(a) * ring.parse("x*y")
    return FGL(F, D)


def universal(D: int = 6, coeff=ZZ) -> FGL:
    """Generic symmetric series x + y + sum a_ij x^i y^j with free a_ij.

    Coefficients are independent symbols (a_ij = a_ji folded to i >= j);
    no associativity is imposed, so the instance reports verified=False.
    """
    coeffs = []
    for i in range(1, D):
        for j in range(1, i + 1):
            if i + j <= D:
                coeffs.append(Variable(f"a{i}{j}", KIND_USER, 0, (i, j)))
    ring = PolyRing(coeffs + [geom_var("x"), geom_var("y")], coeff=coeff)
    x, y = ring.var("x"), ring.var("y")
    F = x + y
    for v in coeffs:
        i, j = v.index
        term = ring.var("x", i) * ring.var("y", j)
        if i != j:
            term = term + ring.var("x", j) * ring.var("y", i)
        F = F + ring.var(v) * term
    return FGL(F, D, verify=False)


# -- inverse machinery -------------------------------------------------------


def formal_inverse(F: FGL) -> Polynomial:
    """The series xbar with F(x, xbar) = 0 up to D, solved order by order."""
    ring, x, y = F.ring, F.x, F.y
    xb = -ring.var(x)
    for n in range(2, F.D + 1):
        resid = F.F.subs({y: xb}).truncate_geom(n)
        cn = resid.coefficient_of(x, n)
        if cn:
            xb = xb - cn * ring.var(x, n)
    return xb


def g_series(F: FGL, sname: str = "s") -> Polynomial:
    """The series G with x + xbar = G(x xbar), from Lemma "inverseseries".

    Writing F = e1 + sum c_kl e1^k e2^l in the elementary symmetric
    polynomials of (x, y), the defining relation F(x, xbar) = 0 turns into
    the fixed-point scheme G_0 = 0, G_n = -sum c_kl G_{n-1}^k s^l truncated
    at s^n, which stabilises at order n after n steps.
    """
    ring, x, y = F.ring, F.x, F.y
    dec = to_elementary(F.F, (x, y))
    tr = dec.ring
    e1, e2 = tr.var_index("e1"), tr.var_index("e2")

    svar = geom_var(sname)
    rest = [v for v in F.ring.vars if v.kind != KIND_GEOM]
    sring = PolyRing(rest + [svar], coeff=ring.coeff, order=ring.order,
                     eager_epsilon=ring.eager_epsilon)
    # coefficients c_kl as polynomials of the s-ring
    ckl: dict[tuple[int, int], Polynomial] = {}
    for m, c in dec.terms.items():
        k, l = tr.mono_exp(m, e1), tr.mono_exp(m, e2)
        mm = m - k * tr._unit[e1] - l * tr._unit[e2]
        rest_poly = sring.convert(Polynomial(tr, {mm: c}, _own=True))
        ckl[(k, l)] = ckl.get((k, l), sring.zero) + rest_poly
    if (1, 0) not in ckl or ckl[(1, 0)] != sring.one:
        raise AssertionError("series has no unit linear part")
    del ckl[(1, 0)]

    N = F.D
    G = sring.zero
    s = sring.var(svar)
    for n in range(1, N + 1):
        nxt = sring.zero
        for (k, l), c in ckl.items():
            if k == 0 and l == 0:
                continue
            term = c * sring.var(svar, l) if l else c
            if k:
                term = term * G ** k
            nxt = nxt - term
        G = nxt.truncate_geom(n)
    return G


def phi_preimage(S: Polynomial, F: FGL, target_names=None) -> Polynomial:
    """Solve T(-x xbar, -y ybar) = S up to F.D; raises if S is not in the image.

    Every geometric variable v of S's ring is treated as an argument and
    mapped to a fresh variable (default: the uppercased name).  Since
    -v vbar = v^2 + higher, T is determined to total degree F.D // 2 and the
    solve is triangular by total degree; a residual that later subtractions
    can no longer reach means S is outside the image of v |-> -v vbar.
    """
    ring = S.ring
    if ring is not F.ring:
        raise ValueError("series must live in the group law's ring")
    gvars = ring.vars_of_kind(KIND_GEOM)
    if target_names is None:
        target_names = tuple(v.name.upper() for v in gvars)
    if len(target_names) != len(gvars):
        raise ValueError("one target name per geometric variable")
    if len(set(target_names)) != len(target_names):
        raise ValueError("target names collide")

    xb = formal_inverse(F)
    w = {}
    for v in gvars:
        vb = ring.convert(xb, rename={F.x.name: v.name})
        w[v] = (-(ring.var(v) * vb)).truncate_geom(F.D)

    rest = [v for v in ring.vars if v.kind != KIND_GEOM]
    tvars = [geom_var(nm) for nm in target_names]
    tring = PolyRing(rest + tvars, coeff=ring.coeff, order=ring.order,
                     eager_epsilon=ring.eager_epsilon)

    Dout = F.D // 2
    residual = S.truncate_geom(F.D)
    T = tring.zero
    for h in range(0, Dout + 1):
        for split in _compositions(h, len(gvars)):
            cpoly = residual.coefficient_of(gvars[0], 2 * split[0])
            for v, p in zip(gvars[1:], split[1:]):
                cpoly = cpoly.coefficient_of(v, 2 * p)
            if not cpoly:
                continue
            prod = cpoly
            for v, p in zip(gvars, split):
                if p:
                    prod = (prod * w[v] ** p).truncate_geom(F.D)
            residual = residual - prod
            tterm = tring.convert(cpoly)
            for nm, p in zip(target_names, split):
                if p:
                    tterm = tterm * tring.var(nm, p)
            T = T + tterm
        # anything at or below the frontier is now unreachable
        cut = 2 * h + 1
        for m in residual.terms:
            if ring.mono_gdeg(m) <= cut:
                raise ValueError("not in image")
    if residual:
        raise ValueError("not in image")
    return T


def _compositions(total: int, parts: int):
    """All tuples of `parts` nonnegative ints summing to total, lex order."""
    if parts == 1:
        yield (total,)
        return
    for first in range(total, -1, -1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


# -- functors ----------------------------------------------------------------


def functor_sigma(F: FGL) -> MSeries:
    """(1 + F t)^2 as a split 2-valued series with double root F."""
    rest = [v for v in F.ring.vars if v.kind != KIND_GEOM]
    SR = series_ring(rest, [F.x.name, F.y.name], coeff=F.ring.coeff,
                     order=None)
    Fc = SR.convert(F.F)
    comps = [Fc + Fc, (Fc * Fc).truncate_geom(F.D)]
    gv = tuple(SR.vars[SR.var_index(nm)] for nm in (F.x.name, F.y.name))
    return MSeries(SR, gv, comps, F.D)


def functor_N(F: FGL, target_names=("X", "Y")) -> MSeries:
    """The type-I 2-valued series with roots -F(x,y)F(xbar,ybar), -F(xbar,y)F(x,ybar).

    Output precision is F.D // 2 in the new variables.
    """
    ring, x, y = F.ring, F.x, F.y
    D = F.D
    xb = formal_inverse(F)
    yb = ring.convert(xb, rename={x.name: y.name})
    A = F.F
    B = F.F.subs({x: xb, y: yb}).truncate_geom(D)
    C = F.F.subs({x: xb}).truncate_geom(D)
    E = F.F.subs({y: yb}).truncate_geom(D)
    P1 = -((A * B).truncate_geom(D) + (C * E).truncate_geom(D))
    P2 = ((A * B).truncate_geom(D) * (C * E).truncate_geom(D)).truncate_geom(D)
    T1 = phi_preimage(P1, F, target_names)
    T2 = phi_preimage(P2, F, target_names)

    rest = [v for v in ring.vars if v.kind != KIND_GEOM]
    SR = series_ring(rest, list(target_names), coeff=ring.coeff, order=None)
    gv = tuple(SR.vars[SR.var_index(nm)] for nm in target_names)
    Dout = D // 2
    comps = [SR.convert(T1).truncate_geom(Dout), SR.convert(T2).truncate_geom(Dout)]
    return MSeries(SR, gv, comps, Dout)


def morphism_residual(theta: Polynomial, F: FGL, G: FGL) -> Polynomial:
    """theta(F(x,y)) - G(theta(x), theta(y)) truncated at min(F.D, G.D)."""
    if theta.ring is not F.ring or G.ring is not F.ring:
        raise ValueError("theta, F and G must share one ring")
    D = min(F.D, G.D)
    x, y = F.x, F.y
    tF = _compose_univariate(theta, x, F.F, D)
    tx = theta
    ty = F.ring.convert(theta, rename={x.name: y.name})
    GF = _eval_capped(G.F, {x: tx, y: ty}, D)
    return tF - GF


def functor_phi_morphism(theta: Polynomial, F: FGL, G: FGL,
                         target_names=("X", "Y")) -> SeriesMorphism:
    """Transport a morphism theta: F -> G to phi(theta): N(F) -> N(G).

    phi is the unique series with phi(-x xbar_F) = -theta(x) theta(xbar_F),
    found by the one-variable preimage solve.
    """
    res = morphism_residual(theta, F, G)
    if res:
        raise ValueError(f"theta is not a morphism: residual {res.text()}")
    ring, x = F.ring, F.x
    xb = formal_inverse(F)
    theta_bar = _compose_univariate(theta, x, xb, F.D)
    R = (-(theta * theta_bar)).truncate_geom(F.D)
    T = phi_preimage(R, F, target_names)
    NF = functor_N(F, target_names)
    NG = functor_N(G, target_names).convert(NF.ring)
    phi = NF.ring.convert(T)
    var = NF.gvars[0]
    return SeriesMorphism(source=NF, target=NG, theta=phi, var=var)


def _compose_univariate(outer: Polynomial, var, inner: Polynomial,
                        D: int) -> Polynomial:
    """outer(inner) where outer is a series in `var`, truncated at D."""
    ring = outer.ring
    i = ring.var_index(var)
    deg = max((ring.mono_exp(m, i) for m in outer.terms), default=0)
    out = outer.coefficient_of(var, 0)
    power = ring.one
    for k in range(1, deg + 1):
        power = (power * inner).truncate_geom(D)
        ck = outer.coefficient_of(var, k)
        if ck:
            out = out + ck * power
    return out.truncate_geom(D)


def _eval_capped(p: Polynomial, mapping: dict, D: int) -> Polynomial:
    """Like subs, but every intermediate product is cut at geometric degree D.

    Sound because geometric degree never decreases under multiplication, so
    dropped terms can only feed terms that would be dropped as well.
    """
    ring = p.ring
    images = {}
    for v, val in mapping.items():
        images[ring.var_index(v)] = val.truncate_geom(D)
    caches = {i: {1: val} for i, val in images.items()}

    def power(i, e):
        c = caches[i]
        if e not in c:
            c[e] = (power(i, e - 1) * c[1]).truncate_geom(D)
        return c[e]

    result = ring.zero
    for m, c in p.terms.items():
        keep = m
        factor = None
        for i in images:
            e = ring.mono_exp(m, i)
            if e:
                keep -= e * ring._unit[i]
                pw = power(i, e)
                factor = pw if factor is None else (factor * pw).truncate_geom(D)
        base = Polynomial(ring, {keep: c}, _own=True)
        term = base if factor is None else (base * factor).truncate_geom(D)
        result = result + term
    return result.truncate_geom(D)
