"""Curve-segment extraction on (<= 1)-dimensional basic sets: parametrized
decomposition along the first free coordinate, sign subdivision, exact
endpoints through a transient innermost infinitesimal, and limits."""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations

import functools

from .errors import ResourceBudgetError, SeparationError
from .infring import QQ, InfElem, extra_symbol
from .mpoly import ERING, QRING, MPoly, resultant, subst_rational
from .points import (
    RealUnivRep,
    _ext_context_for,
    _linear_sign_at,
    dedupe_points,
    limit_point,
    max_symbol_index,
    rational_between,
    rur_from_raw,
    rur_sign,
    sample_components,
)
from .realroots import (
    ThomEncoding,
    TriangularContext,
    _from_upoly,
    _to_upoly,
    compare_roots,
    signs_at_encodings,
    thom_encodings,
    utrim,
)
from .solve import DEFAULT_BUDGET, _groebner_shape, reduce_mod_f, solve_system


@dataclass(eq=False)
class CurveSegmentRep:
    """One open arc: for every parameter x in (lo, hi) the fiber polynomial
    f(x, U) has a real root with Thom signs rho, and the point is
    (x, coords_1/coords_0, ...) evaluated there."""

    context: TriangularContext
    param_var: str
    uvar: str
    f: MPoly
    rho: tuple
    coords: tuple  # (denominator, numerator per non-parameter coordinate)
    xvars: tuple  # all free coordinates, parameter first
    lo: ThomEncoding = None
    hi: ThomEncoding = None
    lo_point: RealUnivRep = None
    hi_point: RealUnivRep = None

    def __repr__(self):
        return f"Segment({self.param_var} in ({self.lo is not None}, {self.hi is not None}); rho={self.rho})"


@dataclass
class CurvePiece:
    """Decomposition result for one leaf basic set."""

    segments: list
    vertices: list  # RURs (isolated points and all endpoint targets)


def _merge_vars(*seqs):
    out = []
    for s in seqs:
        for v in s:
            if v not in out:
                out.append(v)
    return tuple(out)


def curve_segments(P, Q, context, xvars, anchors=(), budget=DEFAULT_BUDGET, seed=0):
    """Decompose Bas(P(theta,.), Q(theta,.)), strongly of dimension <= 1,
    into curve segments and vertices over the parameter xvars[0].

    Every piece (one per subset Q' of Q promoted to equations) is subdivided
    at the union of all pieces' critical parameter values so endpoints can be
    glued exactly.  anchors are points (RURs over context) whose parameter
    values also become segment boundaries."""
    xvars = tuple(xvars)
    if len(xvars) > 3:
        raise ResourceBudgetError(
            f"curve extraction with {len(xvars) - 1} fiber variables exceeds the supported range")
    from .solve import split_branches

    pieces = []
    point_sets = []
    for qsize in range(len(Q) + 1):
        for qsel in combinations(range(len(Q)), qsize):
            V0 = list(P) + [Q[i] for i in qsel]
            rest = [Q[i] for i in range(len(Q)) if i not in qsel]
            if not V0:
                continue
            for V in split_branches(V0, budget):
                if len(xvars) == 1:
                    point_sets.append(_points_only(V, rest, context, xvars, budget, seed))
                    continue
                param = _parametrize_fiber(V, context, xvars, budget, seed)
                if param is None:
                    point_sets.append(_finite_fallback(V, rest, context, xvars, budget, seed))
                    continue
                f, coords, uvar, must_vanish = param
                crit = _critical_parameters(f, coords, must_vanish, rest, anchors,
                                            context, xvars, uvar, budget)
                pieces.append((V, rest, f, coords, uvar, must_vanish, crit))
    cross = []
    for i in range(len(pieces)):
        for j in range(i + 1, len(pieces)):
            fi, ui = pieces[i][2], pieces[i][4]
            fj, uj = pieces[j][2], pieces[j][4]
            if fi == fj and ui == uj:
                continue
            fj_r = fj if uj == ui else fj.subst({uj: MPoly.var(fj.ring, (ui,), ui)})
            if fi == fj_r:
                continue
            r = _resultant_safe(fi, fj_r, ui, budget)
            x = xvars[0]
            if r is not None and not r.is_zero() and r.degree(x) > 0:
                rp = r.with_vars(_merge_vars(context.tvars, (x,)))
                try:
                    cross.extend(thom_encodings(rp, x, context))
                except (ValueError, ArithmeticError):
                    pass
    all_crit = _sorted_unique_encodings([e for pc in pieces for e in pc[6]] + cross)
    segments = []
    vertices = []
    for ps in point_sets:
        vertices.extend(ps.vertices)
    for (V, rest, f, coords, uvar, must_vanish, _own) in pieces:
        for enc in all_crit:
            vertices.extend(_fiber_points(V, rest, enc, context, xvars, budget, seed))
        for i in range(len(all_crit) - 1):
            sample = _sample_between(all_crit[i], all_crit[i + 1])
            segments.extend(_segments_on_interval(f, coords, must_vanish, rest,
                                                  all_crit[i], all_crit[i + 1],
                                                  sample, context, xvars, uvar,
                                                  budget, seed))
    return CurvePiece(segments, dedupe_points(vertices))


def _points_only(V, signs_family, context, xvars, budget, seed):
    pts = []
    try:
        sols = solve_system(V, xvars, context=context, budget=budget, seed=seed)
    except (SeparationError, ResourceBudgetError):
        sols = []
    for s in sols:
        u = rur_from_raw(s)
        if all(rur_sign(u, q) >= 0 for q in signs_family):
            pts.append(u)
    return CurvePiece([], pts)


def _finite_fallback(V, signs_family, context, xvars, budget, seed):
    try:
        pts = sample_components(V, context=context, xvars=xvars, budget=budget, seed=seed)
    except (SeparationError, ResourceBudgetError):
        pts = []
    pts = [u for u in pts if all(rur_sign(u, q) >= 0 for q in signs_family)]
    return CurvePiece([], pts)


def _parametrize_fiber(V, context, xvars, budget, seed):
    """Shape parametrization of the fiber over the function field of the
    parameter: f(x, U) plus rational coordinate functions for the fiber
    variables.  Returns None when the fiber ideal is the unit ideal."""
    x = xvars[0]
    fibers = tuple(xvars[1:])
    ring = V[0].ring
    uvar = "Uc_"
    if len(fibers) == 1:
        z = fibers[0]
        f = None
        for p in V:
            if p.degree(z) > 0:
                f = p if f is None or p.degree(z) < f.degree(z) else f
        if f is None:
            return None
        fu = f.subst({z: MPoly.var(ring, (uvar,), uvar)})
        variables = _merge_vars(context.tvars, (x, uvar))
        one = MPoly.const(ring, variables, 1)
        coords = (one, MPoly.var(ring, variables, uvar))
        must_vanish = [p for p in V if not (p == f)]
        return fu.with_vars(_merge_vars(fu.vars, variables)), coords, uvar, must_vanish
    # two fiber variables: separating form over the parameter field
    func_ctx = _parameter_context(context, x, ring)
    for c in (1, 2, 3, 5, 7, 11, 13, 17):
        shape = _shape_over_parameter(V, fibers, func_ctx, context, x, uvar, c, budget)
        if shape == "empty":
            return None
        if shape is not None:
            f, coords, uv = shape
            return f, coords, uv, list(V)
    raise SeparationError("no separating form for the fiber parametrization")


def _parameter_context(context, x, ring):
    return (context, x, ring)


def _shape_over_parameter(V, fibers, func_ctx, context, x, uvar, c, budget):
    """Groebner shape basis over QQ(eta..., x)."""
    import sympy

    context_, xv, ring = func_ctx
    exprs = []
    par_names = set()
    from .solve import _to_sympy

    for p in V:
        e, _ = _to_sympy(p)
        exprs.append(e)
        for s in e.free_symbols:
            if str(s) not in fibers:
                par_names.add(str(s))
    for _v, lp, _s in context.levels:
        e, _ = _to_sympy(lp)
        exprs.append(e)
        for s in e.free_symbols:
            if str(s) not in fibers:
                par_names.add(str(s))
    u = sympy.Symbol(uvar)
    lin = u - sympy.Symbol(fibers[0]) - c * sympy.Symbol(fibers[1])
    exprs.append(lin)
    gens = [sympy.Symbol(v) for v in fibers] + [u]
    try:
        dom = sympy.QQ.frac_field(*[sympy.Symbol(n) for n in sorted(par_names)]) if par_names else sympy.QQ
        gb = sympy.groebner(exprs, *gens, order="grevlex", domain=dom)
        if 1 in gb:
            return "empty"
        if not gb.is_zero_dimensional:
            return None
        gb = gb.fglm("lex")
    except Exception:
        return None
    basis = [sympy.together(g.as_expr()) for g in gb.exprs]
    variables = _merge_vars(context.tvars, (x, uvar))

    def back(expr, extra=()):
        expr = sympy.fraction(sympy.together(expr))[0]
        target = _merge_vars(variables, extra)
        fvars = sorted(str(s) for s in expr.free_symbols)
        eta = [v for v in fvars if v not in target]
        from .solve import _from_sympy, _from_sympy_with_eta

        if ring is ERING:
            return _from_sympy_with_eta(sympy.expand(expr), target, eta)
        if eta:
            return None
        return _from_sympy(sympy.expand(expr), target, ring, {})

    f = None
    for g in basis:
        supp = {str(s) for s in g.free_symbols} & (set(fibers) | {uvar})
        if supp <= {uvar}:
            cand = back(g)
            if cand is not None and cand.degree(uvar) > 0:
                if f is None or cand.degree(uvar) < f.degree(uvar):
                    f = cand
    if f is None:
        return None
    rels = {}
    for v in fibers:
        got = None
        for g in basis:
            supp = {str(s) for s in g.free_symbols} & (set(fibers) | {uvar})
            if v in supp and supp <= {v, uvar}:
                import sympy as _s

                pv = _s.Poly(g, _s.Symbol(v))
                if pv.degree() == 1:
                    cand = back(g, (v,))
                    if cand is not None and cand.degree(v) == 1:
                        got = cand
                        break
        if got is None:
            return None
        rels[v] = got
    denom = MPoly.const(ring, variables, 1)
    nums = []
    for v in fibers:
        g = rels[v]
        a = g.coeff_of(v, 1).with_vars(variables)
        b = g.coeff_of(v, 0).with_vars(variables)
        denom = denom * a
        nums.append((a, b))
    coords = [denom]
    for i, v in enumerate(fibers):
        a_i, b_i = nums[i]
        num = -b_i
        for j, w in enumerate(fibers):
            if j != i:
                num = num * nums[j][0]
        coords.append(num)
    return f, tuple(coords), uvar


def _critical_parameters(f, coords, must_vanish, signs_family, anchors, context,
                         xvars, uvar, budget):
    """Thom encodings of every parameter value where the fiber structure,
    the Thom data, a sign-family member, or a coordinate denominator can
    change, plus anchor parameter values."""
    x = xvars[0]
    ring = f.ring
    crit_polys = []
    fu = f
    d = fu.degree(uvar)
    lc = fu.coeff_of(uvar, d)
    if not lc.is_const():
        crit_polys.append(lc)
    der = fu
    for _ in range(1, d + 1):
        der = der.deriv(uvar)
        if der.degree(uvar) >= 0 and not der.is_zero():
            r = _resultant_safe(fu, der, uvar, budget)
            if r is not None and not r.is_zero() and r.degree(x) > 0:
                crit_polys.append(r)
    den = coords[0]
    if not den.is_const() and den.degree(uvar) > 0:
        r = _resultant_safe(fu, den, uvar, budget)
        if r is not None and not r.is_zero() and r.degree(x) > 0:
            crit_polys.append(r)
    elif not den.is_const() and den.degree(x) > 0:
        crit_polys.append(den)
    for s in list(signs_family) + list(must_vanish):
        sb = _along_curve(s, coords, xvars, uvar)
        if sb is None:
            continue
        if sb.degree(uvar) > 0:
            r = _resultant_safe(fu, sb, uvar, budget)
        else:
            r = sb
        if r is not None and not r.is_zero() and r.degree(x) > 0:
            crit_polys.append(r)
    out = []
    for cp in crit_polys:
        cp = cp.with_vars(_merge_vars(context.tvars, (x,)))
        try:
            out.extend(thom_encodings(cp, x, context))
        except (ValueError, ArithmeticError):
            continue
    for a in anchors:
        try:
            from .points import coordinate_encoding_cached

            enc = coordinate_encoding_cached(a, 1)
            out.append(ThomEncoding(context, x,
                                    enc.poly.subst({enc.var: MPoly.var(enc.poly.ring, (x,), x)}),
                                    enc.signs))
        except (ValueError, ArithmeticError):
            continue
    return out


def _resultant_safe(a, b, var, budget):
    try:
        return resultant(a, b, var)
    except (ResourceBudgetError, ValueError):
        return None


def _along_curve(s, coords, xvars, uvar):
    """Numerator of s composed with the fiber parametrization."""
    fibers = list(xvars[1:])
    block = [v for v in fibers if v in s.vars and s.degree(v) > 0]
    if not block:
        return s if not s.is_const() else None
    reps = [coords[1 + fibers.index(v)] for v in block]
    return subst_rational(s, block, (coords[0], reps))


def _sorted_unique_encodings(encs):
    out = []
    for e in encs:
        dup = False
        for o in out:
            try:
                if compare_roots(e, o) == 0:
                    dup = True
                    break
            except (ValueError, ArithmeticError):
                continue
        if not dup:
            out.append(e)

    def cmp(a, b):
        return compare_roots(a, b)

    out.sort(key=functools.cmp_to_key(cmp))
    return out


def _sample_between(lo_enc, hi_enc):
    try:
        return rational_between(lo_enc, hi_enc)
    except ResourceBudgetError:
        return None


def _fiber_points(V, signs_family, enc, context, xvars, budget, seed):
    """All basic-set points with parameter value enc (as RURs over context,
    full coordinates)."""
    x = xvars[0]
    rest = xvars[1:]
    tname = f"Tx_{enc.var}_{abs(hash(enc.signs)) % 997}"
    lvl = enc.poly.subst({enc.var: MPoly.var(enc.poly.ring, (tname,), tname)})
    ctx_x = context.extend(tname, lvl, enc.signs)
    sub = {x: MPoly.var(V[0].ring, (tname,), tname)}
    Vx = [p.subst(sub) if x in p.vars else p for p in V]
    Vx = [p for p in Vx if not p.is_zero()]
    out = []
    if not rest:
        pts = []
    else:
        try:
            sols = solve_system(Vx, rest, context=ctx_x, budget=budget, seed=seed)
            pts = [rur_from_raw(s) for s in sols]
        except (SeparationError, ResourceBudgetError, ValueError):
            try:
                pts = sample_components(Vx, context=ctx_x, xvars=rest,
                                        budget=budget, seed=seed)
            except (SeparationError, ResourceBudgetError, ValueError):
                pts = []
    for u in pts:
        qs = []
        ok = True
        for q in signs_family:
            qx = q.subst(sub) if x in q.vars else q
            if rur_sign(u, qx) < 0:
                ok = False
                break
        if not ok:
            continue
        out.append(_with_param_coordinate(u, tname, xvars, context))
    return out


def _with_param_coordinate(u, tname, xvars, context):
    """Prepend the (tower-fixed) parameter value as coordinate 1 and collapse
    back onto the original context."""
    from .points import _collapse_last_level

    ring = u.f.ring
    variables = _merge_vars(u.f.vars, (tname,))
    F = [u.F[0].with_vars(variables)]
    F.append(MPoly.var(ring, variables, tname) * u.F[0].with_vars(variables))
    for g in u.F[1:]:
        F.append(g.with_vars(variables))
    lifted = RealUnivRep(u.base, u.uvar, u.f, u.sigma, tuple(F), tuple(xvars))
    while lifted.base.nlevels > context.nlevels:
        lifted = _collapse_last_level(lifted)
    return lifted


_KIND_GEQ = "geq"
_KIND_ZERO = "zero"
_KIND_DEN = "den"


def _segments_on_interval(f, coords, must_vanish, signs_family, lo_enc, hi_enc,
                          sample, context, xvars, uvar, budget, seed):
    """Branches over one open interval: fiber analysis at the sample value,
    sign filtering, endpoint resolution via a transient infinitesimal."""
    x = xvars[0]
    ring = f.ring
    if sample is None:
        # infinitesimally thin interval: covered by its endpoint fibers
        return []
    f_m = f.subst({x: sample})
    fam = []
    fam_kind = []
    for s in signs_family:
        sb = _along_curve(s, coords, xvars, uvar)
        if sb is not None:
            fam.append(sb.subst({x: sample}) if x in sb.vars else sb)
            fam_kind.append(_KIND_GEQ)
    for p in must_vanish:
        pb = _along_curve(p, coords, xvars, uvar)
        if pb is not None:
            fam.append(pb.subst({x: sample}) if x in pb.vars else pb)
            fam_kind.append(_KIND_ZERO)
    den_m = coords[0].subst({x: sample}) if x in coords[0].vars else coords[0]
    fam.append(den_m)
    fam_kind.append(_KIND_DEN)
    try:
        rows = signs_at_encodings(f_m.with_vars(_merge_vars(context.tvars, (uvar,))),
                                  [g.with_vars(_merge_vars(context.tvars, (uvar,))) for g in fam],
                                  uvar, context)
    except (ValueError, ArithmeticError):
        return []
    out = []
    for enc, fam_signs in rows:
        keep = True
        for kind, sgn in zip(fam_kind, fam_signs):
            if kind == _KIND_ZERO and sgn != 0:
                keep = False
                break
            if kind == _KIND_DEN and sgn == 0:
                keep = False
                break
            if kind == _KIND_GEQ and sgn < 0:
                keep = False
                break
        if not keep:
            continue
        seg = CurveSegmentRep(context, x, uvar, f, enc.signs, tuple(coords),
                              tuple(xvars), lo=lo_enc, hi=hi_enc)
        seg.lo_point = _endpoint_limit(seg, lo_enc, +1, context, budget)
        seg.hi_point = _endpoint_limit(seg, hi_enc, -1, context, budget)
        out.append(seg)
    return out


_ENDPOINT_CACHE = {}


def _endpoint_limit(seg, enc, direction, context, budget):
    """The endpoint point of a branch: evaluate the branch at a +/- mu for a
    fresh innermost infinitesimal mu and take the limit mu -> 0.

    The shifted-fiber Thom enumeration is cached per (fiber polynomial,
    endpoint, direction) since every branch of the same piece shares it."""
    if enc is None:
        return None
    mu_idx = max(max_symbol_index(context), max_symbol_index(seg.f),
                 max_symbol_index(list(seg.coords)), max_symbol_index(enc.poly), 0) + 1
    mu = extra_symbol(f"inf{mu_idx}", mu_idx)
    x = seg.param_var
    tname = f"Te_{abs(hash(enc.signs)) % 9973}_{abs(hash(enc.poly)) % 9973}"
    ring = ERING
    lvl = enc.poly.to_ering().subst({enc.var: MPoly.var(ERING, (tname,), tname)}) \
        if enc.poly.ring is QRING else enc.poly.subst({enc.var: MPoly.var(ERING, (tname,), tname)})
    key = (hash(seg.f), hash(enc.poly), enc.signs, direction,
           tuple(hash(g) for g in seg.coords), context.key())
    cached = _ENDPOINT_CACHE.get(key)
    if cached is not None and cached[0] == (seg.f, enc.poly):
        e_ctx, shift, f_shift, coords_shift, encs = cached[1]
    else:
        e_ctx = _to_ering_context(context).extend(tname, lvl, enc.signs)
        shift = MPoly.const(ERING, (tname,), 0) + MPoly.var(ERING, (tname,), tname) \
            + MPoly.const(ERING, (tname,), InfElem.sym(mu) * direction)
        f_e = seg.f.to_ering() if seg.f.ring is QRING else seg.f
        f_shift = f_e.subst({x: shift})
        coords_e = [g.to_ering() if g.ring is QRING else g for g in seg.coords]
        coords_shift = [g.subst({x: shift}) if x in g.vars else g for g in coords_e]
        try:
            encs = thom_encodings(f_shift.with_vars(_merge_vars(e_ctx.tvars, (seg.uvar,))),
                                  seg.uvar, e_ctx)
        except (ValueError, ArithmeticError):
            return None
        _ENDPOINT_CACHE[key] = ((seg.f, enc.poly), (e_ctx, shift, f_shift, coords_shift, encs))
    target = None
    for cand in encs:
        L = max(len(cand.signs), len(seg.rho))
        cw = tuple(cand.signs) + (0,) * (L - len(cand.signs))
        tw = tuple(seg.rho) + (0,) * (L - len(seg.rho))
        if cw == tw:
            target = cand
            break
    if target is None:
        return None
    variables = _merge_vars(e_ctx.tvars, (seg.uvar,))
    den = coords_shift[0].with_vars(variables)
    F = [den, shift.with_vars(variables) * den]
    for g in coords_shift[1:]:
        F.append(g.with_vars(variables))
    u = RealUnivRep(e_ctx, seg.uvar, target.poly, target.signs, tuple(F), seg.xvars)
    try:
        lim = limit_point(u, mu_idx)
    except (ValueError, ArithmeticError):
        return None
    return lim


def _to_ering_context(ctx):
    if ctx.ring is ERING:
        return ctx
    out = TriangularContext(ERING)
    for v, p, s in ctx.levels:
        out = out.extend(v, p.to_ering(), s)
    return out


def limit_curve(pieces: CurvePiece, drop_from: int, budget=DEFAULT_BUDGET):
    """Limits of curve pieces: endpoints and vertices through the limit of a
    bounded point; segments whose endpoints collapse are emitted as vertices.

    eta-free input is returned unchanged (idempotence)."""
    if drop_from is None:
        return pieces
    segments = []
    vertices = []
    for u in pieces.vertices:
        lim = _limit_rur(u, drop_from)
        if lim is not None:
            vertices.append(lim)
    for seg in pieces.segments:
        if not _segment_has_symbols(seg, drop_from):
            segments.append(seg)
            continue
        lo = _limit_rur(seg.lo_point, drop_from) if seg.lo_point else None
        hi = _limit_rur(seg.hi_point, drop_from) if seg.hi_point else None
        f0 = _drop_poly(seg.f, drop_from)
        coords0 = tuple(_drop_poly(g, drop_from) for g in seg.coords)
        lo_enc = _limit_encoding(seg.lo, drop_from) if seg.lo else None
        hi_enc = _limit_encoding(seg.hi, drop_from) if seg.hi else None
        collapsed = False
        if lo_enc is not None and hi_enc is not None:
            try:
                if compare_roots(lo_enc, hi_enc) == 0:
                    collapsed = True
            except (ValueError, ArithmeticError):
                collapsed = False
        if collapsed or f0.is_zero() or f0.degree(seg.uvar) == 0:
            for pt in (lo, hi):
                if pt is not None:
                    vertices.append(pt)
            continue
        new = CurveSegmentRep(_limit_context(seg.context, drop_from), seg.param_var,
                              seg.uvar, f0, seg.rho, coords0, seg.xvars,
                              lo=lo_enc, hi=hi_enc)
        new.lo_point = lo
        new.hi_point = hi
        segments.append(new)
    return CurvePiece(segments, vertices)


def _segment_has_symbols(seg, drop_from):
    return (max_symbol_index(seg.f) >= drop_from
            or any(max_symbol_index(g) >= drop_from for g in seg.coords)
            or (seg.lo_point is not None and max_symbol_index(seg.lo_point) >= drop_from)
            or (seg.hi_point is not None and max_symbol_index(seg.hi_point) >= drop_from))


def _limit_rur(u, drop_from):
    if u is None:
        return None
    if max_symbol_index(u) < drop_from:
        return u
    try:
        return limit_point(u, drop_from)
    except (ValueError, ArithmeticError):
        return None


def _limit_encoding(enc, drop_from):
    from .points import limit_thom

    if enc is None:
        return None
    if max_symbol_index(enc.poly) < drop_from and max_symbol_index(enc.context) < drop_from:
        return enc
    try:
        return limit_thom(enc, drop_from)
    except (ValueError, ArithmeticError):
        return None


def _limit_context(ctx, drop_from):
    if max_symbol_index(ctx) < drop_from:
        return ctx
    raise ValueError("cannot take the limit of a context carrying dropped symbols")


def _drop_poly(p, drop_from):
    from .points import drop_symbols, eta_content_normalize

    if p.ring is not ERING:
        return p
    return drop_symbols(eta_content_normalize(p), drop_from)
