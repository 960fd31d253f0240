"""Final assembly: per-leaf curve extraction, limits, the roadmap graph, the
bounded and general top-level algorithms, and connectivity queries."""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .curves import CurvePiece, CurveSegmentRep, curve_segments, limit_curve
from .errors import ResourceBudgetError, SeparationError
from .infring import QQ, InfElem, extra_symbol, log_signs, zeta
from .mpoly import ERING, QRING, MPoly
from .points import (
    RealUnivRep,
    coordinate_encoding_cached,
    dedupe_points,
    flatten_rur,
    max_symbol_index,
    rur_from_raw,
    rur_sign,
    sample_components,
)
from .realroots import TriangularContext, compare_roots
from .solve import DEFAULT_BUDGET, solve_system
from .tree import build_tree


@dataclass
class RoadmapGraph:
    k: int
    xvars: tuple
    vertices: list  # RealUnivRep, eta-free
    edges: list  # (segment, lo_vid, hi_vid)
    anchor_ids: list
    parent: list = field(default_factory=list)
    eps_rays: list = field(default_factory=list)

    def _find(self, i):
        while self.parent[i] != i:
            self.parent[i] = self.parent[self.parent[i]]
            i = self.parent[i]
        return i

    def _union(self, a, b):
        ra, rb = self._find(a), self._find(b)
        if ra != rb:
            self.parent[max(ra, rb)] = min(ra, rb)

    def components(self):
        groups = {}
        for i in range(len(self.vertices)):
            groups.setdefault(self._find(i), []).append(i)
        return [sorted(v) for _r, v in sorted(groups.items())]

    def component_count(self):
        return len(self.components())


def _to_ering_rur(u: RealUnivRep) -> RealUnivRep:
    if u.f.ring is ERING:
        return u
    return RealUnivRep(TriangularContext(ERING), u.uvar, u.f.to_ering(), u.sigma,
                       tuple(g.to_ering() for g in u.F), u.xvars)


def _vertex_key_equal(a: RealUnivRep, b: RealUnivRep) -> bool:
    if a.k != b.k:
        return False
    if (a.f.ring is ERING) != (b.f.ring is ERING):
        a = _to_ering_rur(a)
        b = _to_ering_rur(b)
    for i in range(1, a.k + 1):
        ea = coordinate_encoding_cached(a, i)
        eb = coordinate_encoding_cached(b, i)
        try:
            if compare_roots(ea, eb) != 0:
                return False
        except (ValueError, ArithmeticError):
            return False
    return True


def _canonicalize(u: RealUnivRep) -> RealUnivRep:
    """Flatten the tower and map eta-free data back to the rationals so
    vertices from different pipelines share one coefficient ring."""
    u = flatten_rur(u)
    if u.f.ring is ERING:
        try:
            f2 = u.f.to_qring()
            F2 = tuple(g.to_qring() for g in u.F)
            return RealUnivRep(TriangularContext(QRING), u.uvar, f2, u.sigma, F2, u.xvars)
        except (ValueError, ArithmeticError):
            return u
    return u


class _VertexTable:
    def __init__(self):
        self.vertices = []

    def add(self, u: RealUnivRep):
        u = _canonicalize(u)
        for i, v in enumerate(self.vertices):
            if _vertex_key_equal(u, v):
                return i
        self.vertices.append(u)
        return len(self.vertices) - 1


def assemble_graph(pieces, anchors, xvars):
    """Glue curve pieces into a roadmap graph: vertices are deduplicated by
    exact coordinate comparison, edges join segment endpoint vertices."""
    table = _VertexTable()
    edges = []
    anchor_ids = []
    for piece in pieces:
        for u in piece.vertices:
            table.add(u)
    for a in anchors:
        anchor_ids.append(table.add(a))
    for piece in pieces:
        for seg in piece.segments:
            lo_id = table.add(seg.lo_point) if seg.lo_point is not None else None
            hi_id = table.add(seg.hi_point) if seg.hi_point is not None else None
            edges.append((seg, lo_id, hi_id))
    g = RoadmapGraph(len(xvars), tuple(xvars), table.vertices, edges, anchor_ids)
    g.parent = list(range(len(g.vertices)))
    for seg, lo_id, hi_id in edges:
        if lo_id is not None and hi_id is not None:
            g._union(lo_id, hi_id)
    return g


def roadmap_bounded(P, A, kprime=None, budget=DEFAULT_BUDGET, seed=0):
    """Divide-and-conquer roadmap of a bounded algebraic set: one tree per
    input point (one tree with no points when A is empty), curve segments on
    every leaf, limits, and the glued graph containing every point of A."""
    system = P if isinstance(P, list) else [P]
    xvars = tuple(system[0].vars)
    k = len(xvars)
    if kprime is None:
        kprime = max(k - 1, 1)
    trees = []
    if kprime <= 1:
        # depth-0 recursion: the per-point trees all share the root basic
        # set, so their leaf union equals one tree carrying every anchor
        # (the additivity of Tree(V, A) in A)
        trees.append(build_tree(system, list(A), kprime, xvars=xvars,
                                budget=budget, seed=seed))
    elif A:
        for a in A:
            trees.append(build_tree(system, [a], kprime, xvars=xvars,
                                    budget=budget, seed=seed))
    else:
        trees.append(build_tree(system, [], kprime, xvars=xvars,
                                budget=budget, seed=seed))
    pieces = []
    for tree in trees:
        for leaf in tree.leaves():
            anchors = list(leaf.A)
            piece = curve_segments(leaf.P, leaf.Q, leaf.base, leaf.xvars,
                                   anchors=anchors, budget=budget, seed=seed)
            piece = limit_curve(piece, zeta(1).global_index, budget=budget)
            pieces.append(piece)
    return assemble_graph(pieces, list(A), xvars)


def cauchy_bound(F):
    """c(F) = (sum_{i>=q} |a_i/a_q|)^(-1) where q is the lowest nonzero
    index: F has no root in (0, c(F)].

    Accepts a univariate MPoly, an InfElem in one symbol, or a tuple of
    (exponent, coefficient) pairs."""
    coeffs = {}
    if isinstance(F, MPoly):
        used = [v for v in F.vars if F.degree(v) > 0]
        if len(used) > 1:
            raise ValueError("cauchy_bound needs a univariate input")
        if not used:
            coeffs[0] = F.const_value() if not F.is_zero() else None
            if coeffs[0] is None:
                raise ValueError("cauchy_bound of zero")
        else:
            v = used[0]
            for e in range(F.degree(v) + 1):
                c = F.coeff_of(v, e)
                if not c.is_zero():
                    coeffs[e] = c.const_value()
    elif isinstance(F, InfElem):
        idxs = F.support_indices()
        if len(idxs) > 1:
            raise ValueError("cauchy_bound needs a univariate input")
        if not idxs:
            if F.is_zero():
                raise ValueError("cauchy_bound of zero")
            coeffs[0] = F.rational_value()
        else:
            i = next(iter(idxs))
            for e in range(F.degree_in(i) + 1):
                c = F.coeff_of(i, e)
                if not c.is_zero():
                    coeffs[e] = c.rational_value()
    else:
        for e, c in F:
            if c != 0:
                coeffs[e] = QQ(c)
    if not coeffs:
        raise ValueError("cauchy_bound of zero")
    q = min(coeffs)
    aq = abs(QQ(coeffs[q]))
    total = sum(abs(QQ(c)) / aq for c in coeffs.values())
    return 1 / total


def roadmap_general(P, A=(), kprime=None, budget=DEFAULT_BUDGET, seed=0):
    """Roadmap of a general (possibly unbounded or empty) algebraic set:
    intersect with an infinitesimal-radius sphere, run the bounded algorithm
    over D[eps], substitute the Cauchy bound of every sign-queried
    eps-polynomial, project out the extra coordinate, and keep the sphere
    boundary points as outward parameter rays."""
    system = P if isinstance(P, list) else [P]
    xvars = tuple(system[0].vars)
    k = len(xvars)
    newv = "Xu_"
    allv = xvars + (newv,)
    e0 = extra_symbol("e0", 0)
    eps_el = InfElem.sym(e0)
    ring = ERING
    sph = MPoly.zero(ring, allv)
    for v in allv:
        sph = sph + MPoly.var(ring, allv, v, 2)
    sph = sph.scale(eps_el * eps_el) - MPoly.const(ring, allv, 1)
    # the lifted variety (the paper's P_eps = P^2 + (eps^2 |X|^2 - 1)^2) is
    # carried as a defining system: identical zero set, workable ideal
    lifted_system = [p.to_ering().with_vars(allv) for p in system] + [sph]
    A_eps = _lift_points(system, A, sph, allv, budget, seed)
    if kprime is None:
        kprime = max(k - 1, 1)
    with log_signs(e0) as record:
        graph_eps = roadmap_bounded(lifted_system, A_eps, kprime=kprime,
                                    budget=budget, seed=seed)
        bounds = []
        for coeffs in record:
            try:
                bounds.append(cauchy_bound(coeffs))
            except ValueError:
                continue
    a_val = min(bounds) if bounds else QQ(1, 2)
    rays = _sphere_boundary_vertices(graph_eps, sph)
    graph = _substitute_and_project(graph_eps, e0.global_index, a_val, xvars)
    graph.eps_rays = [{"vertex": vid, "eps_range": ("0", _qstr(a_val))} for vid in rays]
    return graph


def _lift_points(system, A, sph, allv, budget, seed):
    """A_eps: the points of the lifted variety above each input point (the
    extra coordinate solves the infinitesimal-radius sphere equation)."""
    out = []
    newv = allv[-1]
    for a in A:
        e_ctx = _ering_ctx(a.extended_context())
        den2 = (a.F[0].to_ering() if a.F[0].ring is QRING else a.F[0])
        den2 = den2 * den2
        num = MPoly.zero(ERING, _mv(den2.vars, (newv,)))
        for i, v in enumerate(a.xvars, start=1):
            g = a.F[i].to_ering() if a.F[i].ring is QRING else a.F[i]
            num = num + (g * g).with_vars(_mv(num.vars, g.vars))
        num = num + MPoly.var(ERING, num.vars, newv) ** 2 * den2.with_vars(num.vars)
        eps2 = MPoly.const(ERING, num.vars, InfElem.sym(extra_symbol("e0", 0)) ** 2)
        eq = eps2 * num - den2.with_vars(num.vars)
        try:
            sols = solve_system([eq], (newv,), context=e_ctx, budget=budget, seed=seed)
        except (SeparationError, ResourceBudgetError):
            sols = []
        for s in sols:
            lifted = rur_from_raw(s)
            out.append(_combine_coords(a, lifted, allv))
    return dedupe_points(out)


def _combine_coords(a, lifted, allv):
    """Lifted representation: the new root variable fixes the extra
    coordinate; the original coordinates ride along through the base."""
    from .points import _collapse_last_level

    ring = ERING
    variables = _mv(lifted.f.vars, a.F[0].vars)
    a_den = (a.F[0].to_ering() if a.F[0].ring is QRING else a.F[0]).with_vars(variables)
    l_den = lifted.F[0].with_vars(variables)
    F = [a_den * l_den]
    for i in range(1, len(a.F)):
        g = (a.F[i].to_ering() if a.F[i].ring is QRING else a.F[i]).with_vars(variables)
        F.append(g * l_den)
    F.append(lifted.F[1].with_vars(variables) * a_den)
    u = RealUnivRep(lifted.base, lifted.uvar, lifted.f, lifted.sigma, tuple(F), allv)
    while u.base.nlevels > 0:
        u = _collapse_last_level(u)
    return u


def _ering_ctx(ctx):
    if ctx.ring is ERING:
        return ctx
    out = TriangularContext(ERING)
    for v, p, s in ctx.levels:
        out = out.extend(v, p.to_ering(), s)
    return out


def _mv(a, b):
    return tuple(dict.fromkeys(list(a) + list(b)))


def _sphere_boundary_vertices(graph, sph):
    out = []
    for vid, u in enumerate(graph.vertices):
        try:
            if rur_sign(u, sph.with_vars(_mv(sph.vars, u.xvars))) == 0:
                out.append(vid)
        except (ValueError, ArithmeticError, ZeroDivisionError):
            continue
    return out


def _subst_poly(p, idx, value):
    if p.ring is QRING:
        return p
    return p.map_coeffs(lambda c: c.subst_symbol(idx, value)).to_qring()


def _substitute_and_project(graph, idx, value, xvars):
    """eps := value in every datum, drop the lifted coordinate, re-glue."""
    k = len(xvars)
    table = _VertexTable()
    vid_map = {}
    for old_id, u in enumerate(graph.vertices):
        f2 = _subst_poly(u.f, idx, value)
        F2 = tuple(_subst_poly(g, idx, value) for g in u.F[: k + 1])
        nu = RealUnivRep(TriangularContext(QRING), u.uvar, f2, u.sigma, F2, tuple(xvars))
        vid_map[old_id] = table.add(nu)
    edges = []
    for seg, lo, hi in graph.edges:
        f2 = _subst_poly(seg.f, idx, value)
        coords2 = tuple(_subst_poly(g, idx, value) for g in seg.coords[: k])
        nseg = CurveSegmentRep(TriangularContext(QRING), seg.param_var, seg.uvar,
                               f2, seg.rho, coords2, tuple(xvars),
                               lo=None, hi=None)
        nseg.lo_point = table.vertices[vid_map[lo]] if lo is not None else None
        nseg.hi_point = table.vertices[vid_map[hi]] if hi is not None else None
        edges.append((nseg, vid_map.get(lo), vid_map.get(hi)))
    g = RoadmapGraph(k, tuple(xvars), table.vertices, edges,
                     [vid_map[i] for i in graph.anchor_ids])
    g.parent = list(range(len(g.vertices)))
    for _seg, lo, hi in edges:
        if lo is not None and hi is not None:
            g._union(lo, hi)
    return g


def connectivity(graph: RoadmapGraph, u1: RealUnivRep, u2: RealUnivRep):
    """Whether u1 and u2 lie in the same component of the roadmap; on
    success also returns the vertex/edge path."""
    id1 = _locate(graph, u1)
    id2 = _locate(graph, u2)
    if id1 is None or id2 is None:
        raise ValueError("point not anchored; rebuild with point in A")
    if graph._find(id1) != graph._find(id2):
        return False, []
    if id1 == id2:
        return True, []
    adj = {}
    for eid, (seg, lo, hi) in enumerate(graph.edges):
        if lo is not None and hi is not None:
            adj.setdefault(lo, []).append((hi, eid))
            adj.setdefault(hi, []).append((lo, eid))
    from collections import deque

    prev = {id1: None}
    dq = deque([id1])
    while dq:
        cur = dq.popleft()
        if cur == id2:
            break
        for nxt, eid in adj.get(cur, []):
            if nxt not in prev:
                prev[nxt] = (cur, eid)
                dq.append(nxt)
    if id2 not in prev:
        return False, []
    path = []
    cur = id2
    while prev[cur] is not None:
        parent, eid = prev[cur]
        path.append(("edge", eid))
        path.append(("vertex", parent))
        cur = parent
    path.reverse()
    return True, [("vertex", id2)] if not path else path + [("vertex", id2)]


def _locate(graph, u):
    uu = flatten_rur(u)
    for i, v in enumerate(graph.vertices):
        if _vertex_key_equal(uu, v):
            return i
    return None


# ---------------------------------------------------------------------------
# serialization


def _qstr(q):
    q = QQ(q)
    return f"{q.numerator}/{q.denominator}"


def _coeff_json(c):
    if isinstance(c, InfElem):
        return [[list(m), _qstr(v)] for m, v in sorted(c.terms.items())]
    return _qstr(c)


def _poly_json(p):
    terms = sorted(p.terms.items())
    return {"vars": list(p.vars),
            "terms": [[list(m), _coeff_json(c)] for m, c in terms]}


def _rur_json(u):
    return {
        "uvar": u.uvar,
        "f": _poly_json(u.f),
        "signs": list(u.sigma),
        "F": [_poly_json(g) for g in u.F],
        "xvars": list(u.xvars),
    }


def graph_to_json(graph: RoadmapGraph):
    segs = []
    for seg, lo, hi in graph.edges:
        segs.append({
            "u": [_poly_json(seg.f)] + [_poly_json(g) for g in seg.coords],
            "rho": list(seg.rho),
            "endpoints": [lo, hi],
            "param_var": seg.param_var,
        })
    data = {
        "variables": graph.k,
        "vertices": [_rur_json(v) for v in graph.vertices],
        "segments": segs,
        "components": graph.components(),
        "anchors": graph.anchor_ids,
    }
    if graph.eps_rays:
        data["eps_rays"] = graph.eps_rays
    return data


def graph_to_json_str(graph):
    return json.dumps(graph_to_json(graph), sort_keys=True, separators=(",", ":"))


def load_components_from_json(text):
    data = json.loads(text)
    return len(data["components"])