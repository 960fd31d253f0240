"""Internal exact solver: finite solution sets of polynomial systems over a
triangular context, reported as verified univariate-representation data.

Pipeline per system: factor-split (sympy-backed) -> separating linear form ->
iterated resultant cascade keeping one coordinate at a time -> squarefree
eliminant -> Thom-encoded candidate roots -> linear coordinate relations from
subresultant chains -> exact membership verification of every candidate.
Verification makes the cascade heuristics harmless: only true solutions are
returned.  Completeness holds for zero-dimensional systems because resultants
vanish on every projection of a common zero.
"""

from __future__ import annotations

from dataclasses import dataclass

import sympy

from .errors import ResourceBudgetError, SeparationError
from .infring import QQ, InfElem
from .mpoly import ERING, QRING, MPoly, resultant, subresultant_prs, subst_rational
from .realroots import (
    TriangularContext,
    _from_upoly,
    _to_upoly,
    signs_at_encodings,
    sturm_chain,
    thom_encodings,
    uderiv,
    utrim,
)


@dataclass
class Budget:
    max_sylvester: int = 40
    max_degree: int = 700
    max_branches: int = 256
    max_candidates: int = 4000
    retries: int = 8

    def check_matrix(self, size, what):
        if size > self.max_sylvester:
            raise ResourceBudgetError(f"{what}: Sylvester matrix {size}x{size} exceeds budget {self.max_sylvester}")

    def check_degree(self, deg, what):
        if deg > self.max_degree:
            raise ResourceBudgetError(f"{what}: degree {deg} exceeds budget {self.max_degree}")


DEFAULT_BUDGET = Budget()


@dataclass
class RawSolution:
    """One verified solution: root of (eliminant, signs) in the fresh
    variable uvar; coordinate i of the point is coords[i]/denom at the
    root."""

    context: TriangularContext
    uvar: str
    eliminant: MPoly
    signs: tuple
    denom: MPoly
    coords: tuple
    xvars: tuple


# ---------------------------------------------------------------------------
# sympy bridge (factorization only)


def _eta_name(idx):
    from .infring import _index_name

    return _index_name(idx)


def _to_sympy(p):
    syms = {}

    def sym(name):
        if name not in syms:
            syms[name] = sympy.Symbol(name)
        return syms[name]

    expr = sympy.Integer(0)
    for m, c in p.terms.items():
        if p.ring is QRING:
            base = sympy.Rational(int(c.numerator), int(c.denominator))
            extra = sympy.Integer(1)
        else:
            extra = sympy.Integer(0)
            for em, q in c.terms.items():
                t = sympy.Rational(int(q.numerator), int(q.denominator))
                for idx, e in em:
                    t *= sym(_eta_name(idx)) ** e
                extra += t
            base = sympy.Integer(1)
        mono = sympy.Integer(1)
        for i, e in enumerate(m):
            if e:
                mono *= sym(p.vars[i]) ** e
        expr += base * extra * mono
    return expr, syms


def _from_sympy(expr, variables, ring, eta_names):
    poly = sympy.Poly(sympy.expand(expr), *[sympy.Symbol(v) for v in variables] or [sympy.Symbol("_d")])
    out = {}
    gens = [str(g) for g in poly.gens]
    for mono, coeff in poly.terms():
        exps = [0] * len(variables)
        cf = QQ(int(sympy.Rational(coeff).p), int(sympy.Rational(coeff).q))
        for g, e in zip(gens, mono):
            if e:
                exps[variables.index(g)] = e
        key = tuple(exps)
        c = cf if ring is QRING else InfElem.const(cf)
        out[key] = ring.add(out.get(key, ring.zero), c)
    return MPoly(ring, variables, out)


def factor_mpoly(p, budget=DEFAULT_BUDGET):
    """Irreducible factors of p over the rationals (eta symbols treated as
    extra variables); returns a list of (factor, multiplicity).  Falls back
    to [(p, 1)] when over budget."""
    if len(p.terms) > 400 or p.total_degree() > 80:
        return [(p, 1)]
    expr, syms = _to_sympy(p)
    try:
        _const, factors = sympy.factor_list(expr)
    except Exception:
        return [(p, 1)]
    if not factors:
        return []
    eta_names = {}
    out = []
    for f, mult in factors:
        fvars = sorted(str(s) for s in f.free_symbols)
        target_vars = list(p.vars)
        eta_in_f = [v for v in fvars if v not in target_vars]
        if p.ring is ERING:
            mp = _from_sympy_with_eta(f, p.vars, eta_in_f)
        else:
            if eta_in_f:
                return [(p, 1)]
            mp = _from_sympy(f, p.vars, p.ring, eta_names)
        out.append((mp, int(mult)))
    return out


def _eta_index_by_name(name):
    from .infring import _KIND_LETTER, _KIND_RANK

    letter_to_kind = {v: k for k, v in _KIND_LETTER.items()}
    if name[0] in letter_to_kind and name[1:].isdigit():
        level = int(name[1:])
        if level >= 1:
            return 4 * (level - 1) + _KIND_RANK[letter_to_kind[name[0]]]
        if name[0] == "e" and level == 0:
            return 0
    if name.startswith("inf") and name[3:].isdigit():
        return int(name[3:])
    raise KeyError(name)


def _from_sympy_with_eta(f, variables, eta_in_f):
    poly = sympy.Poly(sympy.expand(f), *[sympy.Symbol(v) for v in list(variables) + eta_in_f])
    out = {}
    for mono, coeff in poly.terms():
        exps = list(mono[: len(variables)])
        eta_part = mono[len(variables):]
        cf = QQ(int(sympy.Rational(coeff).p), int(sympy.Rational(coeff).q))
        em = tuple(
            sorted((_eta_index_by_name(nm), e) for nm, e in zip(eta_in_f, eta_part) if e)
        )
        c = InfElem({em: cf})
        key = tuple(exps)
        out[key] = out.get(key, InfElem()) + c
    return MPoly(ERING, variables, out)


# ---------------------------------------------------------------------------
# branch splitting


def split_branches(system, budget=DEFAULT_BUDGET):
    """Split Z(p1,...,pm) into a union of factor-systems; each branch picks
    one irreducible factor per polynomial."""
    factored = []
    for p in system:
        fs = [f for f, _m in factor_mpoly(p, budget)]
        fs = [f for f in fs if not f.is_const()]
        if not fs:
            return []  # a nonzero constant: empty variety
        factored.append(fs)
    total = 1
    for fs in factored:
        total *= len(fs)
    if total > budget.max_branches:
        return [list(system)]
    branches = [[]]
    for fs in factored:
        branches = [br + [f] for br in branches for f in fs]
    seen = set()
    out = []
    for br in branches:
        key = frozenset(_fingerprint(f) for f in br)
        if key not in seen:
            seen.add(key)
            dedup = []
            for f in br:
                if all(not (f == g) for g in dedup):
                    dedup.append(f)
            out.append(dedup)
    return out


def _fingerprint(p):
    from .realroots import _mpoly_key

    used = tuple(sorted(p.used_vars()))
    return (used, _mpoly_key(p.with_vars(used) if used else p))


# ---------------------------------------------------------------------------
# resultant cascade


def _sqfree_in_var(p, var):
    """Exact squarefree part of p with respect to var (polynomial level)."""
    d = p.deriv(var)
    if d.is_zero():
        return p
    g = _poly_gcd(p, d, var)
    if g is None or g.degree(var) == 0:
        return p
    q = _exact_div_or_none(p, g)
    return q if q is not None else p


def _pair_eliminate(polys, var, budget, what, route=0):
    """Eliminate var from a list of polynomials by consecutive-pair
    resultants; polynomials not involving var pass through.

    A single polynomial carrying var is paired with its own var-derivative:
    over a finite real zero set every solution's fiber root is a multiple
    root (a simple root would sweep out a curve), so the discriminant locus
    covers all true projections."""
    touch = [p for p in polys if p.degree(var) > 0]
    passthrough = [p for p in polys if p.degree(var) == 0]
    if not touch:
        return passthrough
    out = list(passthrough)
    if len(touch) == 1:
        p = _sqfree_in_var(touch[0], var)
        if p.degree(var) == 0:
            out.append(p)
            return out
        if p.degree(var) >= 1:
            dp = p.deriv(var)
            if not dp.is_zero() and dp.degree(var) >= 0 and p.degree(var) >= 1:
                if dp.degree(var) == 0 and dp.is_const():
                    # linear in var with constant slope: fiber is a single
                    # simple root; finite-zero-set inputs are constrained by
                    # the passthrough polynomials alone
                    return out
                size = p.degree(var) + max(dp.degree(var), 1)
                budget.check_matrix(size, what)
                r = resultant(p, dp, var) if dp.degree(var) > 0 else dp ** p.degree(var)
                budget.check_degree(r.total_degree(), what)
                if not r.is_zero():
                    out.append(r)
        return out
    touch.sort(key=lambda p: (p.degree(var), p.total_degree()))
    base = touch[route % len(touch)] if len(touch) > 1 else touch[0]
    for q in touch:
        if q is base:
            continue
        size = base.degree(var) + q.degree(var)
        budget.check_matrix(size, what)
        r = resultant(base, q, var)
        budget.check_degree(r.total_degree(), what)
        if r.is_zero():
            g = _poly_gcd(base, q, var)
            if g is not None and g.degree(var) > 0:
                raise _CommonFactor(g, base, q)
        out.append(r)
    return out


class _CommonFactor(Exception):
    def __init__(self, gcd, a, b):
        self.gcd = gcd
        self.a = a
        self.b = b


def _poly_gcd(a, b, var):
    """gcd of a and b (sympy-backed for primitivity; PRS fallback)."""
    try:
        ea, _ = _to_sympy(a)
        eb, _ = _to_sympy(b)
        g = sympy.gcd(ea, eb)
        if g == 1:
            return None
        variables = tuple(dict.fromkeys(list(a.vars) + list(b.vars)))
        eta = [str(s) for s in g.free_symbols if str(s) not in variables]
        if a.ring is ERING:
            return _from_sympy_with_eta(g, variables, eta)
        if eta:
            return None
        return _from_sympy(g, variables, a.ring, {})
    except Exception:
        prs = subresultant_prs(a, b, var)
        for g in reversed(prs):
            if not g.is_zero():
                return g
        return None


def eliminate_to(system, keep, xvars, budget=DEFAULT_BUDGET, what="eliminate", route=0):
    """Iterated-resultant elimination of every variable in xvars except those
    in keep; returns the surviving polynomials (a superset-defining family:
    every solution projection is a common zero)."""
    polys = [p for p in system if not p.is_zero()]
    order = [v for v in xvars if v not in keep]
    # heuristic: eliminate lowest-degree variables first
    order.sort(key=lambda v: max((p.degree(v) for p in polys), default=0))
    for v in order:
        try:
            polys = _pair_eliminate(polys, v, budget, what, route)
        except _CommonFactor as cf:
            sub1 = [p for p in polys if not (p == cf.a) and not (p == cf.b)] + [cf.gcd]
            out1 = eliminate_to(sub1, keep, xvars, budget, what, route)
            try:
                co_a = _exact_div_or_none(cf.a, cf.gcd)
                co_b = _exact_div_or_none(cf.b, cf.gcd)
            except Exception:
                co_a = co_b = None
            if co_a is None or co_b is None:
                return out1
            sub2 = [p for p in polys if not (p == cf.a) and not (p == cf.b)] + [co_a, co_b]
            out2 = eliminate_to(sub2, keep, xvars, budget, what, route)
            return out1 + out2
        polys = [p for p in polys if not p.is_zero()]
        if not polys:
            return []
    return polys


def _exact_div_or_none(a, b):
    from .mpoly import _exact_poly_div

    try:
        return _exact_poly_div(a, b)
    except Exception:
        return None


# ---------------------------------------------------------------------------
# squarefree part over a context


def squarefree_upoly(ops, A):
    """Positive multiple of the squarefree part of A at the context point."""
    A = utrim(ops, A)
    if len(A) <= 2:
        return A
    chain = sturm_chain(ops, A, uderiv(ops, A))
    g = chain[-1]
    if len(g) == 1:
        return A
    # positive-scaled pseudo-quotient of A by g
    n, m = len(A) - 1, len(g) - 1
    lc = g[-1]
    r = list(A)
    q = [ops.zero] * (n - m + 1)
    steps = 0
    for i in range(n, m - 1, -1):
        coef = r[i]
        r = [ops.mul(lc, x) for x in r]
        q = [ops.mul(lc, x) for x in q]
        steps += 1
        q[i - m] = ops.add(q[i - m], coef)
        if not ops.is_lit_zero(coef):
            for j in range(m + 1):
                r[i - m + j] = ops.sub(r[i - m + j], ops.mul(coef, g[j]))
        r[i] = ops.zero
    if steps % 2 == 1:
        q = [ops.mul(lc, x) for x in q]
    q = ops.content_strip(q)
    return utrim(ops, q)


# ---------------------------------------------------------------------------
# the solver


def solve_system(system, xvars, context=None, budget=DEFAULT_BUDGET, seed=0, uvar=None):
    """All solutions of a finite zero set, as verified RawSolutions.

    For positive-dimensional inputs the returned points are still true
    solutions (everything is verified), but only finitely many candidates are
    produced; zero-dimensionality is the caller's precondition for
    completeness."""
    xvars = tuple(xvars)
    if context is None:
        ring = system[0].ring if system else QRING
        context = TriangularContext(ring)
    ring = context.ring
    system = [p for p in system if not p.is_zero()]
    for p in system:
        pu = p.used_vars()
        if not (pu & set(xvars)) and pu <= set(context.tvars):
            if context.sign_mpoly(p if not pu else p.with_vars(tuple(context.tvars))) != 0:
                return []
    system = [p for p in system if set(p.used_vars()) & set(xvars)]
    if not system:
        raise ValueError("system does not constrain the variables")
    uvar = uvar or _fresh_var("U", system, context)
    out = []
    for branch in split_branches(system, budget):
        out.extend(_solve_branch(branch, xvars, context, budget, seed, uvar))
    return _dedupe_solutions(out, context)


def _fresh_var(base, system, context):
    used = set(context.tvars)
    for p in system:
        used |= set(p.vars)
    i = 0
    while f"{base}{i}" in used:
        i += 1
    return f"{base}{i}"


def _dedupe_solutions(sols, context):
    seen = set()
    out = []
    for s in sols:
        key = (
            tuple(sorted((str(v), hash(c)) for v, c in zip(s.xvars, s.coords))),
            hash(s.eliminant),
            s.signs,
            hash(s.denom),
        )
        if key not in seen:
            seen.add(key)
            out.append(s)
    return out


def _solve_branch(system, xvars, context, budget, seed, uvar):
    kept = []
    for p in system:
        pu = p.used_vars()
        if not (pu & set(xvars)):
            if pu <= set(context.tvars):
                if context.sign_mpoly(p if not pu else p.with_vars(tuple(context.tvars))) != 0:
                    return []
                continue
            raise ValueError(f"polynomial involves unknown variables {pu - set(xvars) - set(context.tvars)}")
        kept.append(p)
    system = kept
    used = set()
    for p in system:
        used |= p.used_vars()
    active = [v for v in xvars if v in used]
    if not active:
        return []
    missing = [v for v in xvars if v not in used]
    if missing:
        # a branch of a finite zero set never leaves a coordinate free; such
        # branches are empty and contribute nothing
        return []
    if len(active) == 1:
        return _solve_univariate(system, active[0], xvars, context, budget, uvar)
    last_err = None
    prev_count = None
    prev_sols = None
    for attempt in range(budget.retries):
        c = seed + attempt + 1
        try:
            sols = _solve_branch_with_form(system, active, xvars, context, budget, c, uvar,
                                           route=attempt)
        except ResourceBudgetError:
            raise
        except (ArithmeticError, ValueError, ZeroDivisionError) as e:
            last_err = e
            prev_count = None
            continue
        if prev_count is not None and prev_count == len(sols):
            # two independent separating forms agree on the solution count
            return sols
        prev_count, prev_sols = len(sols), sols
    if prev_sols is not None:
        raise SeparationError(
            f"separating form not certified after {budget.retries} tries (counts disagree)")
    raise SeparationError(
        f"separating form exhausted after {budget.retries} tries: {last_err}")


def _solve_univariate(system, var, xvars, context, budget, uvar):
    ops = context.ops()
    ups = [utrim(ops, _to_upoly(p, var, context)) for p in system]
    ups = [u for u in ups if len(u) > 1 or ops.ctx_sign(u[0]) != 0]
    for u in ups:
        if len(u) == 1:
            return []
    if not ups:
        return []
    base = min(ups, key=len)
    fam = [u for u in ups if u is not base]
    rows = signs_at_encodings(_from_upoly(base, var, context), [_from_upoly(u, var, context) for u in fam], var, context)
    out = []
    for enc, fam_signs in rows:
        if any(s != 0 for s in fam_signs):
            continue
        f = enc.poly.subst({var: MPoly.var(enc.poly.ring, (uvar,), uvar)})
        ring = context.ring
        variables = tuple(context.tvars) + (uvar,)
        one = MPoly.const(ring, variables, 1)
        coords = tuple(MPoly.var(ring, variables, uvar) if v == var else MPoly.zero(ring, variables) for v in xvars)
        out.append(RawSolution(context, uvar, f.with_vars(variables), enc.signs, one, coords, tuple(xvars)))
    return out


def _linear_form(ring, variables, active, c, uvar):
    u = MPoly.var(ring, variables, uvar)
    acc = MPoly.zero(ring, variables)
    mult = 1
    for v in active:
        acc = acc + MPoly.var(ring, variables, v).scale(QQ(mult))
        mult *= c
    return u - acc


def _groebner_shape(full, active, context, uvar, budget):
    """Lex Groebner shape extraction: the eliminant in uvar and, per active
    variable, a relation linear in it over uvar.  Returns (eliminant,
    {var: [relation]}), "empty" for the unit ideal, or None when the basis
    is not in shape position / out of budget."""
    import sympy

    nterms = sum(len(p.terms) for p in full)
    if nterms > 4000 or len(active) + context.nlevels > 9:
        return None
    gens_names = list(active) + list(context.tvars) + [uvar]
    exprs = []
    eta_names = set()
    for p in full:
        e, _ = _to_sympy(p)
        exprs.append(e)
        for s in e.free_symbols:
            if str(s) not in gens_names:
                eta_names.add(str(s))
    for _v, lp, _s in context.levels:
        e, _ = _to_sympy(lp)
        exprs.append(e)
        for s in e.free_symbols:
            if str(s) not in gens_names:
                eta_names.add(str(s))
    gens = [sympy.Symbol(n) for n in gens_names]
    dom = None
    if eta_names:
        dom = sympy.QQ.frac_field(*[sympy.Symbol(n) for n in sorted(eta_names)])

    def run(extra):
        try:
            kw = {"order": "grevlex"}
            if dom is not None:
                kw["domain"] = dom
            gb = sympy.groebner(exprs + extra, *gens, **kw)
            if 1 in gb or sympy.Integer(1) in list(gb.exprs):
                return ["__unit__"]
            if not gb.is_zero_dimensional:
                return None
            try:
                gb = gb.fglm("lex")
            except Exception:
                kw["order"] = "lex"
                gb = sympy.groebner(exprs + extra, *gens, **kw)
        except Exception:
            return None
        return [sympy.together(g.as_expr() if hasattr(g, "as_expr") else g) for g in gb.exprs]

    ring = context.ring

    def back(expr, variables):
        expr = sympy.fraction(sympy.together(expr))[0]
        fvars = sorted(str(s) for s in expr.free_symbols)
        eta = [v for v in fvars if v not in variables]
        if ring is ERING:
            return _from_sympy_with_eta(sympy.expand(expr), variables, eta)
        if eta:
            return None
        return _from_sympy(sympy.expand(expr), variables, ring, {})

    def extract(basis):
        if any(g == 1 or g == -1 or (isinstance(g, str) and g == "__unit__") for g in basis):
            return "empty"
        f = None
        f_expr = None
        for g in basis:
            support = {str(s) for s in g.free_symbols} & set(gens_names)
            if support <= {uvar}:
                cand = back(g, tuple(context.tvars) + (uvar,))
                if cand is not None and cand.degree(uvar) > 0:
                    if f is None or cand.degree(uvar) < f.degree(uvar):
                        f = cand
                        f_expr = g
        if f is None:
            return None
        relations = {}
        for v in active:
            best = None
            for g in basis:
                support = {str(s) for s in g.free_symbols} & set(gens_names)
                if v in support and support <= {v, uvar}:
                    p = sympy.Poly(g, sympy.Symbol(v))
                    if p.degree() == 1:
                        cand = back(g, tuple(context.tvars) + (uvar, v))
                        if cand is not None and cand.degree(v) == 1:
                            best = cand
                            break
            if best is None:
                return ("noshape", f_expr)
            relations[v] = [best]
        return f, relations

    basis = run([])
    if basis is None:
        return None
    got = extract(basis)
    if got == "empty" or (got is not None and not isinstance(got[0], str)):
        return got
    if got is None:
        return None
    # not in shape position: radicalize once through the squarefree
    # univariate eliminant, then retry; a remaining failure means the
    # separating form candidate must be rejected (fast retry with next c)
    _tag, f_expr = got
    uv = sympy.Symbol(uvar)
    try:
        pf = sympy.Poly(sympy.fraction(sympy.together(f_expr))[0], uv)
        g = pf.gcd(pf.diff(uv))
        fsq = pf.quo(g)
        basis2 = run([fsq.as_expr()])
    except Exception:
        basis2 = None
    if basis2 is not None:
        got2 = extract(basis2)
        if got2 == "empty" or (got2 is not None and not isinstance(got2[0], str)):
            return got2
    raise ArithmeticError("lex basis not in shape position (separating form rejected)")


def _solve_branch_with_form(system, active, xvars, context, budget, c, uvar, route=0):
    ring = context.ring
    variables = tuple(dict.fromkeys(sum((list(p.vars) for p in system), list(context.tvars) + [uvar] + list(active))))
    sys_al = [p.with_vars(variables) for p in system]
    L = _linear_form(ring, variables, active, c, uvar)
    full = sys_al + [L]

    shape = _groebner_shape(full, active, context, uvar, budget)
    if shape == "empty":
        return []
    if shape is not None:
        A_shape, shape_rel = shape
        return _assemble_from_relations(system, active, xvars, context, budget,
                                        c, uvar, A_shape, shape_rel, variables)

    # eliminant in uvar alone
    elim_u = eliminate_to(full, {uvar}, active, budget, "eliminant", route)
    elim_u = [p for p in elim_u if not p.is_zero() and p.degree(uvar) > 0]
    if not elim_u:
        return []
    A = min(elim_u, key=lambda p: p.degree(uvar))
    budget.check_degree(A.degree(uvar), "eliminant")
    f = _squarefree_eliminant(A, uvar, context)
    if f is None:
        return []

    # linear coordinate relations per variable; the first variable of the
    # separating form is recovered from the form itself afterwards
    relations = {}
    for v in active[1:]:
        rel = []
        polys_v = []
        for rt in range(min(3, max(1, len(active)))):
            got = eliminate_to(full, {uvar, v}, active, budget, f"coordinate {v}",
                               route + rt)
            for p in got:
                if p.is_zero() or p.degree(v) == 0:
                    continue
                p = reduce_mod_f(p, f, uvar, context)
                if not p.is_zero() and p.degree(v) > 0 and all(not (p == q) for q in polys_v):
                    polys_v.append(p)
            if any(p.degree(v) == 1 for p in polys_v):
                break
        polys_v.sort(key=lambda p: (p.degree(v), p.total_degree()))
        for p in polys_v:
            if p.degree(v) == 1:
                rel.append(p)
        if not rel:
            pairs = [(polys_v[i], polys_v[j]) for i in range(len(polys_v))
                     for j in range(i + 1, len(polys_v))]
            if len(polys_v) == 1:
                pairs = [(polys_v[0], polys_v[0].deriv(v))]
            for a, b in pairs:
                if b.is_zero():
                    continue
                da, db = a.degree(v), b.degree(v)
                try:
                    if da >= 2 and db >= 2:
                        from .fastres import subresultant1_interp

                        s1 = subresultant1_interp(a, b, v)
                        if not s1.is_zero() and s1.degree(v) == 1:
                            rel.append(s1)
                    else:
                        for g in subresultant_prs(a, b, v):
                            if not g.is_zero() and g.degree(v) == 1:
                                rel.append(g)
                except ResourceBudgetError:
                    raise
                except Exception:
                    continue
                if rel:
                    break
        if not rel:
            return _tower_assemble(system, active, xvars, context, budget, c, uvar,
                                   f, sys_al, full, variables)
        relations[v] = rel
    return _assemble_from_relations(system, active, xvars, context, budget, c, uvar,
                                    f, relations, variables)


def _squarefree_eliminant(A, uvar, context):
    ops = context.ops()
    f_up = squarefree_upoly(ops, _to_upoly(A, uvar, context))
    if len(f_up) == 1:
        return None
    return _from_upoly(f_up, uvar, context)


def _assemble_from_relations(system, active, xvars, context, budget, c, uvar,
                             A_or_f, relations, variables, already_squarefree=False):
    ring = context.ring
    f = A_or_f if already_squarefree else _squarefree_eliminant(A_or_f, uvar, context)
    if f is None:
        return []
    encs = thom_encodings(f, uvar, context)
    if not encs:
        return []
    if len(encs) > budget.max_candidates:
        raise ResourceBudgetError("candidate explosion")
    derive_first = active[0] not in relations
    out = []
    for enc in encs:
        ctx_plus = context.extend(uvar, f, enc.signs)
        assignment = {}
        ok = True
        for v in active:
            if derive_first and v == active[0]:
                continue
            got = None
            for g in relations[v]:
                a = reduce_mod_f(g.coeff_of(v, 1), f, uvar, context)
                b = reduce_mod_f(g.coeff_of(v, 0), f, uvar, context)
                if ctx_plus.sign_mpoly(_strip_to_ctx(a, ctx_plus)) != 0:
                    got = (a, b)
                    break
            if got is None:
                ok = False
                break
            assignment[v] = got
        if not ok:
            raise ArithmeticError("no usable coordinate relation at a candidate root")
        if derive_first:
            # first form variable: x0 = U - sum c^j x_j over the others
            first = active[0]
            Dall = MPoly.const(ring, variables, 1)
            for w in active[1:]:
                Dall = Dall * assignment[w][0].with_vars(variables)
            Dall = reduce_mod_f(Dall, f, uvar, context)
            num = MPoly.var(ring, variables, uvar) * Dall
            mult = 1
            for w in active[1:]:
                mult *= c
                prod = assignment[w][1].with_vars(variables)
                for l in active[1:]:
                    if l != w:
                        prod = prod * assignment[l][0].with_vars(variables)
                num = num + prod.scale(QQ(mult))
            num = reduce_mod_f(num, f, uvar, context)
            assignment[first] = (Dall, -num)
        denom = MPoly.const(ring, (uvar,), 1).with_vars(tuple(context.tvars) + (uvar,))
        for v in active:
            denom = denom * _strip_to_ctx(assignment[v][0], ctx_plus)
        denom = reduce_mod_f(denom, f, uvar, context)
        coords = []
        for v in xvars:
            a, b = assignment[v]
            av = _strip_to_ctx(a, ctx_plus)
            bv = _strip_to_ctx(b, ctx_plus)
            num = -bv
            for w in active:
                if w != v:
                    num = num * _strip_to_ctx(assignment[w][0], ctx_plus)
            coords.append(reduce_mod_f(num, f, uvar, context))
        # verify membership exactly
        if _verify_point(system, xvars, denom, coords, ctx_plus, uvar):
            out.append(RawSolution(context, uvar, f, enc.signs, denom, tuple(coords), tuple(xvars)))
    return out


def _tower_assemble(system, active, xvars, context, budget, c, uvar, f, sys_al, full, variables):
    """Fallback solution assembly: fix the eliminant root, then each
    coordinate as a Thom root of its bivariate eliminant, pruning by exact
    sign tests; verified towers are converted to genuine rational-coordinate
    representations by collapsing levels through pair sampling.

    Sound for any input (everything is verified); needed when extraneous
    cascade branches prevent linear coordinate relations (e.g. coordinates
    constant on the true solutions but not on the junk)."""
    from .realroots import thom_encodings as _thom

    ops = context.ops()
    gs = {}
    for v in active:
        got = eliminate_to(full, {uvar, v}, active, budget, f"tower coordinate {v}")
        cands = [reduce_mod_f(p, f, uvar, context) for p in got
                 if not p.is_zero() and p.degree(v) > 0]
        cands = [p for p in cands if not p.is_zero() and p.degree(v) > 0]
        if not cands:
            raise ArithmeticError(f"no bivariate eliminant for {v}")
        gs[v] = min(cands, key=lambda p: (p.degree(v), p.total_degree()))
    f_loc = f.with_vars(tuple(context.tvars) + (uvar,))
    encs = _thom(f_loc, uvar, context)
    out = []
    ctx_tvars = set(context.tvars)
    for enc in encs:
        ctx1 = context.extend(uvar, f_loc, enc.signs)
        stack = [ctx1]
        covered = [uvar]
        ok_stack = True
        for v in active:
            new_stack = []
            gv = gs[v]
            for tw in stack:
                gal = gv.with_vars(tuple(dict.fromkeys(list(tw.tvars) + [v])))
                try:
                    cands = _thom(gal, v, tw)
                except Exception:
                    continue
                for ce in cands:
                    tw2 = tw.extend(v, ce.poly, ce.signs)
                    good = True
                    cov = set(covered) | {v} | ctx_tvars
                    for p in sys_al:
                        if set(p.used_vars()) <= cov:
                            if tw2.sign_mpoly(p.with_vars(tuple(tw2.tvars))) != 0:
                                good = False
                                break
                    if good:
                        new_stack.append(tw2)
            covered.append(v)
            stack = new_stack
            if not stack:
                ok_stack = False
                break
        if not ok_stack:
            continue
        for tw in stack:
            out.append(_tower_to_solution(tw, context, active, xvars))
    return [s for s in out if s is not None]


_TOWER_DEPTH = [0]


def _tower_to_solution(tw, context, active, xvars):
    """Collapse a solution tower onto the original context, producing a
    RawSolution with rational-function coordinates."""
    from .points import RealUnivRep, _collapse_last_level

    if _TOWER_DEPTH[0] > 24:
        raise ResourceBudgetError("tower collapse recursion too deep")
    _TOWER_DEPTH[0] += 1
    try:
        var_last, poly_last, signs_last = tw.levels[-1]
        parent = tw.prefix(tw.nlevels - 1)
        ring = context.ring
        fvars = tuple(tw.tvars)
        one = MPoly.const(ring, fvars, 1)
        F = [one]
        for v in xvars:
            F.append(MPoly.var(ring, fvars, v) if v in fvars else MPoly.zero(ring, fvars))
        u = RealUnivRep(parent, var_last, poly_last.with_vars(fvars), signs_last,
                        tuple(F), tuple(xvars))
        while u.base.nlevels > context.nlevels:
            u = _collapse_last_level(u)
        return RawSolution(context, u.uvar, u.f, u.sigma, u.F[0], tuple(u.F[1:]),
                           tuple(xvars))
    except (ArithmeticError, ValueError, ZeroDivisionError):
        return None
    finally:
        _TOWER_DEPTH[0] -= 1


def _dense_in(p, var):
    """Dense rational coefficient list of a univariate rational MPoly."""
    d = p.degree(var)
    out = []
    for e in range(d + 1):
        c = p.coeff_of(var, e)
        out.append(c.const_value() if not c.is_zero() else QQ(0))
    return out


def _mod_dense(num, den):
    """num mod den over QQ (dense lists, den trimmed, lc != 0)."""
    num = list(num)
    dn = len(den) - 1
    lc = den[-1]
    for i in range(len(num) - 1, dn - 1, -1):
        c = num[i] / lc
        if c != 0:
            for j in range(dn + 1):
                num[i - dn + j] -= c * den[j]
        num[i] = QQ(0)
    while len(num) > 1 and num[-1] == 0:
        num.pop()
    return num


def reduce_mod_f(p, f, uvar, context):
    """p reduced modulo f in uvar, coefficient-wise over the other variables.

    Over a level-free rational context this is exact field reduction (values
    at roots of f unchanged); over towers p is returned unreduced (the
    scaling bookkeeping is not worth it at current scales)."""
    if context.nlevels > 0 or p.ring is not QRING or f.ring is not QRING:
        return p
    if p.degree(uvar) < f.degree(uvar):
        return p
    fd = _dense_in(f, uvar) if set(f.used_vars()) <= {uvar} else None
    if fd is None or len(fd) < 2:
        return p
    other = [v for v in p.vars if v != uvar and p.degree(v) > 0]
    if not other:
        return MPoly.from_univariate(
            [MPoly.const(QRING, p.vars, c) for c in _mod_dense(_dense_in(p, uvar), fd)], uvar
        ).with_vars(p.vars)
    if len(other) > 1:
        return p
    v = other[0]
    rows = []
    for e in range(p.degree(v) + 1):
        ce = p.coeff_of(v, e)
        dense = []
        for k in range(ce.degree(uvar) + 1):
            cc = ce.coeff_of(uvar, k)
            dense.append(cc.const_value() if not cc.is_zero() else QQ(0))
        rows.append(_mod_dense(dense, fd))
    out = MPoly.zero(QRING, p.vars)
    for e, dense in enumerate(rows):
        for k, c in enumerate(dense):
            if c != 0:
                out = out + MPoly(QRING, p.vars,
                                  {tuple(k if w == uvar else (e if w == v else 0)
                                         for w in p.vars): c})
    return out


def _strip_to_ctx(p, ctx_plus):
    return p.with_vars(tuple(ctx_plus.tvars))


def _verify_point(system, xvars, denom, coords, ctx_plus, uvar):
    for p in system:
        num = subst_rational(p, [v for v in xvars if v in p.vars],
                             (denom, [coords[xvars.index(v)] for v in xvars if v in p.vars]))
        numv = num.with_vars(tuple(ctx_plus.tvars))
        if ctx_plus.sign_mpoly(numv) != 0:
            return False
    return True
