"""The central Divide step: from one node's basic set, the deformed system,
its critical data, the distinguished points, the fiber coordinates, the fiber
anchors, and the chart children."""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations

from .critloci import GoodRankMatrix, charts, crit_minor_system, crit_system, sweep_poly
from .errors import ResourceBudgetError, SeparationError
from .infring import InfElem, gamma as gamma_sym
from .mpoly import ERING, QRING, MPoly, subst_rational
from .optimsub import PseudoCriticalRequest, closest_pairs, closest_point, pseudo_critical_values
from .points import (
    RealUnivRep,
    coordinate_encoding_cached,
    dedupe_points,
    project_rur,
    rur_from_raw,
    rur_sign,
    sample_components,
)
from .realroots import TriangularContext, compare_roots
from .solve import DEFAULT_BUDGET, solve_system


@dataclass
class DivideInput:
    s: tuple
    base: TriangularContext
    P: list
    Q: list
    A: list
    xvars: tuple  # free variables X_{Fix+1..k}
    kprime: int
    budget: object = None
    seed: int = 0

    def __post_init__(self):
        if self.budget is None:
            self.budget = DEFAULT_BUDGET
        t = len(self.s)
        if len(self.Q) != t - sum(1 for b in self.s if b == 1):
            raise ValueError("card(Q) must equal level - card(fix(s))")


@dataclass
class DivideOutput:
    Ptilde: list
    Qtilde: list
    Atilde: list
    N: list
    B: dict  # N-index -> list of fiber anchors over the extended context
    charts: list  # (ChartIndex, P0, Q0, A_alpha)
    G: MPoly
    new_level: int
    M_tilde: list = field(default_factory=list)
    D0: list = field(default_factory=list)
    M0: list = field(default_factory=list)


def _bas_member(u, Qs):
    return all(rur_sign(u, q) >= 0 for q in Qs)


def divide(inp: DivideInput) -> DivideOutput:
    """Algorithm Divide, steps 1-8; errors carry the node path."""
    try:
        return _divide(inp)
    except (ResourceBudgetError, SeparationError, ArithmeticError, ValueError) as e:
        raise ResourceBudgetError(str(e), node_path="".join(str(b) for b in inp.s)) from e


def _divide(inp: DivideInput) -> DivideOutput:
    t = len(inp.s)
    level = t + 1
    k_free = len(inp.xvars)
    p = inp.kprime // (2 ** t)
    ell = p // 2
    d = max((pol.total_degree_in(inp.xvars) for pol in list(inp.P) + list(inp.Q)), default=1)
    d = max(d, 1)
    G = sweep_poly(d, k_free, inp.xvars)
    from .critloci import tilde_system

    Ptilde, Qtilde = tilde_system(inp.P, inp.Q, p, level, inp.xvars, d=d)
    e_base = _to_ering_ctx(inp.base)

    # Step 2: the finite G-critical set of Bas(P~, Q~), by subsets of Q~
    M_tilde = []
    for qsize in range(len(Qtilde) + 1):
        for qsel in combinations(range(len(Qtilde)), qsize):
            fam = list(Ptilde) + [Qtilde[i] for i in qsel]
            if not fam:
                continue
            system = crit_minor_system(fam, G.to_ering(), 0, inp.xvars)
            try:
                pts = [rur_from_raw(s) for s in
                       solve_system(system, inp.xvars, context=e_base,
                                    budget=inp.budget, seed=inp.seed)]
            except SeparationError:
                pts = sample_components(system, context=e_base, xvars=inp.xvars,
                                        budget=inp.budget, seed=inp.seed)
            M_tilde.extend(pts)
    M_tilde = [u for u in dedupe_points(M_tilde) if _bas_member(u, Qtilde)]

    # Step 3: pseudo-critical values of {F} u Q~ in the (X, lambda) variables;
    # F is the product over subsets Q~' of the sums of squares of CritEq_ell
    F_prod = None
    run = 0
    for qsize in range(len(Qtilde) + 1):
        for qsel in combinations(range(len(Qtilde)), qsize):
            fam = list(Ptilde) + [Qtilde[i] for i in qsel]
            eqs, _lam_vars = crit_system(fam, G.to_ering(), ell, inp.xvars,
                                         lambda_prefix=f"lm{run}_")
            run += 1
            ssq = None
            for e in eqs:
                ssq = e * e if ssq is None else ssq + e * e
            F_prod = ssq if F_prod is None else F_prod * ssq
    D0 = []
    if F_prod is not None:
        pc_vars = tuple(inp.xvars) + tuple(v for v in F_prod.vars
                                           if v not in inp.xvars and v not in inp.base.tvars)
        # B = H_{card(Q)+1, k-Fix+card(P~)+card(Q~)+2}: rows for the family
        # {F} u Q~, one column per variable of the Lagrangian space plus one
        req = PseudoCriticalRequest([F_prod] + list(Qtilde), G.to_ering(), pc_vars,
                                    base=e_base,
                                    B=GoodRankMatrix(len(inp.Q) + 1, len(pc_vars)),
                                    budget=inp.budget, seed=inp.seed)
        D0 = pseudo_critical_values(req)

    # Step 4: samples of the G = c slices for c in D0
    M0 = []
    for enc in D0:
        zname = _fresh_name("Zc", inp)
        lvl_poly = enc.poly.subst({enc.var: MPoly.var(enc.poly.ring, (zname,), zname)})
        ctx_c = e_base.extend(zname, lvl_poly, enc.signs)
        zval = MPoly.var(ERING, (zname,), zname)
        system = list(Ptilde) + [G.to_ering() - zval]
        try:
            pts = sample_components(system, context=ctx_c, xvars=inp.xvars,
                                    budget=inp.budget, seed=inp.seed)
        except (SeparationError, ResourceBudgetError):
            pts = []
        for u in pts:
            if _bas_member(u, Qtilde):
                M0.append(_collapse_to(u, e_base.nlevels))
    M0 = dedupe_points(M0)

    # Step 5: A~ and the fiber coordinates N
    Atilde = []
    for u in inp.A:
        ue = _rur_to_ering(u, e_base)
        Atilde.extend(closest_point(Ptilde, Qtilde, ue, base=e_base,
                                    budget=inp.budget, seed=inp.seed))
    Atilde.extend(closest_pairs(Ptilde, Qtilde, Ptilde, Qtilde, base=e_base,
                                xvars=inp.xvars, budget=inp.budget, seed=inp.seed))
    Atilde = [u for u in dedupe_points(Atilde) if _bas_member(u, Qtilde)]

    N = []
    for u in M_tilde + M0 + Atilde:
        w = project_rur(u, ell)
        if all(not _points_equal_proj(w, v) for v in N):
            N.append(w)

    # Step 6: fiber anchors B(u) for each w in N
    B = {}
    for idx, w in enumerate(N):
        fiber_pts = []
        block = list(inp.xvars[:ell])
        rest = list(inp.xvars[ell:])
        for qsize in range(len(Qtilde) + 1):
            for qsel in combinations(range(len(Qtilde)), qsize):
                fam = list(Ptilde) + [Qtilde[i] for i in qsel]
                if not fam:
                    continue
                system = crit_minor_system(fam, G.to_ering(), ell, inp.xvars)
                sub = [_subst_block(pp, block, w) for pp in system]
                sub = [pp for pp in sub if not pp.is_zero()]
                ctx_w = _fiber_context(w, e_base)
                try:
                    sols = solve_system(sub, rest, context=ctx_w,
                                        budget=inp.budget, seed=inp.seed)
                    pts = [rur_from_raw(sv) for sv in sols]
                except (SeparationError, ResourceBudgetError):
                    try:
                        pts = sample_components(sub, context=ctx_w, xvars=rest,
                                                budget=inp.budget, seed=inp.seed)
                    except (SeparationError, ResourceBudgetError):
                        pts = []
                for u2 in pts:
                    if all(rur_sign(u2, _subst_block(q, block, w)) >= 0 for q in Qtilde):
                        fiber_pts.append(u2)
        B[idx] = dedupe_points(fiber_pts)

    # Steps 7-8: charts and their anchor sets
    chs = charts(Ptilde, Qtilde, ell, G, level, inp.xvars)
    all_B = [u for pts in B.values() for u in pts]
    chart_out = []
    for alpha, P0, Q0 in chs:
        A_alpha = []
        for idx, w in enumerate(N):
            for u2 in B[idx]:
                lifted = _lift_fiber_point(u2, w, inp.xvars, ell, e_base)
                if lifted is not None:
                    A_alpha.extend(closest_point(P0, Q0, lifted, base=e_base,
                                                 budget=inp.budget, seed=inp.seed))
        for beta, P0b, Q0b in chs:
            if beta is alpha:
                continue
            A_alpha.extend(closest_pairs(P0, Q0, P0b, Q0b, base=e_base,
                                         xvars=inp.xvars, budget=inp.budget,
                                         seed=inp.seed))
        A_alpha = [u for u in dedupe_points(A_alpha) if _bas_member(u, Q0)]
        chart_out.append((alpha, P0, Q0, A_alpha))

    return DivideOutput(Ptilde, Qtilde, Atilde, N, B, chart_out, G, level,
                        M_tilde, D0, M0)


def _to_ering_ctx(ctx):
    if ctx.ring is ERING:
        return ctx
    out = TriangularContext(ERING)
    for v, p, s in ctx.levels:
        out = out.extend(v, p.to_ering(), s)
    return out


def _rur_to_ering(u, e_base):
    if u.f.ring is ERING:
        return u if u.base.ring is ERING else RealUnivRep(e_base, u.uvar, u.f, u.sigma, u.F, u.xvars)
    return RealUnivRep(e_base if u.base.ring is not ERING else u.base, u.uvar,
                       u.f.to_ering(), u.sigma, tuple(g.to_ering() for g in u.F), u.xvars)


def _collapse_to(u, nlevels):
    from .points import _collapse_last_level

    while u.base.nlevels > nlevels:
        u = _collapse_last_level(u)
    return u


def _points_equal_proj(a, b):
    from .points import points_equal

    try:
        return points_equal(a, b)
    except (ValueError, ArithmeticError):
        return False


def _fresh_name(basename, inp):
    used = set(inp.base.tvars) | set(inp.xvars)
    i = 0
    while f"{basename}{i}" in used:
        i += 1
    return f"{basename}{i}"


def _subst_block(poly, block, w):
    """Substitute the fiber coordinates (rational functions of w's root,
    renamed onto the fiber tower variable) for the block variables."""
    pb = [v for v in block if v in poly.vars and poly.degree(v) > 0]
    if not pb:
        return poly
    tvar = _fiber_var(w)
    ren = {w.uvar: MPoly.var(w.f.ring, (tvar,), tvar)}
    denom = w.F[0].subst(ren)
    reps = [w.F[1 + list(w.xvars).index(v)].subst(ren) for v in pb]
    return subst_rational(poly, pb, (denom, reps))


def _fiber_var(w):
    return f"Tf_{w.uvar}"


def _fiber_context(w, e_base):
    tvar = _fiber_var(w)
    ren = {w.uvar: MPoly.var(w.f.ring, (tvar,), tvar)}
    lvl = w.f.subst(ren)
    return e_base.extend(tvar, lvl, w.sigma)


def _lift_fiber_point(u2, w, xvars, ell, e_base):
    """A fiber point (over the w-extended context) re-expressed as a point of
    the full space over the base: the first ell coordinates come from w, the
    rest from u2, paired through the shared fiber root."""
    from .points import _collapse_last_level

    ctx_w = u2.base
    tvar = ctx_w.tvars[-1] if ctx_w.nlevels > e_base.nlevels else None
    if tvar is None:
        return None
    ring = u2.f.ring
    variables = tuple(dict.fromkeys(list(u2.f.vars) + [tvar]))
    ren = {w.uvar: MPoly.var(ring, (tvar,), tvar)}
    w_den = w.F[0].subst(ren).with_vars(variables)
    w_coords = [w.F[1 + i].subst(ren).with_vars(variables) for i in range(ell)]
    u_den = u2.F[0].with_vars(variables)
    F = [w_den * u_den]
    for i in range(ell):
        F.append(w_coords[i] * u_den)
    for g in u2.F[1:]:
        F.append(w_den * g.with_vars(variables))
    lifted = RealUnivRep(ctx_w, u2.uvar, u2.f, u2.sigma, tuple(F), tuple(xvars))
    return _collapse_to(lifted, e_base.nlevels)
