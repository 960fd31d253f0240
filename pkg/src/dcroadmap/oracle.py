"""Independent brute-force ground truth for tests: mesh-based connectivity,
slice components, a numeric Lagrange critical-point enumerator, and exact
interval-based real-root isolation (test oracle only; never a primary path)."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .infring import QQ
from .mpoly import MPoly, QRING


@dataclass
class MeshConfig:
    box: QQ = QQ(2)
    h: QQ = QQ(1, 100)
    tau: QQ = QQ(1, 20)
    max_cells: int = 4_000_000


class UnionFind:
    def __init__(self, n):
        self.parent = list(range(n))

    def find(self, i):
        while self.parent[i] != i:
            self.parent[i] = self.parent[self.parent[i]]
            i = self.parent[i]
        return i

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[max(ra, rb)] = min(ra, rb)


def _poly_to_numpy_eval(P, variables):
    pos = {v: i for i, v in enumerate(variables)}
    terms = []
    for m, c in P.terms.items():
        sparse = tuple((pos[P.vars[i]], e) for i, e in enumerate(m) if e)
        terms.append((sparse, float(Fraction(int(c.numerator), int(c.denominator)))))

    def ev(grids):
        acc = np.zeros_like(grids[0], dtype=float)
        for sparse, c in terms:
            t = np.full_like(grids[0], c, dtype=float)
            for i, e in sparse:
                t = t * grids[i] ** e
            acc = acc + t
        return acc

    return ev


def grid_components(P, cfg: MeshConfig = None):
    """Union-find components of {|P| <= tau} over cell centers of a uniform
    grid on [-R, R]^k with 2k-neighborhood adjacency.

    Exact rational evaluation is used for membership (float evaluation is a
    prefilter); returns (count, labeled point cloud)."""
    cfg = cfg or MeshConfig()
    variables = [v for v in P.vars if P.degree(v) > 0]
    k = len(variables)
    if k == 0:
        return (0, []) if P.ring.sign(P.const_value()) != 0 else (1, [tuple()])
    if k > 3:
        raise ValueError("grid oracle supports k <= 3")
    R = QQ(cfg.box)
    h = QQ(cfg.h)
    n = int((2 * R) / h)
    if n ** k > cfg.max_cells:
        raise MemoryError("grid resolution exceeds the cell budget")
    centers = [R * (-1) + h * (i + QQ(1, 2)) for i in range(n)]
    centers_f = np.array([float(Fraction(int(c.numerator), int(c.denominator)))
                          for c in centers])
    ev = _poly_to_numpy_eval(P, variables)
    tau_f = float(Fraction(int(QQ(cfg.tau).numerator), int(QQ(cfg.tau).denominator)))
    grids = np.meshgrid(*([centers_f] * k), indexing="ij")
    vals = np.abs(ev(grids))
    # float prefilter with a safety margin, exact confirmation at the margin
    sure_in = vals <= tau_f * 0.98
    boundary = (vals > tau_f * 0.98) & (vals <= tau_f * 1.02)
    mask = sure_in.copy()
    if boundary.any():
        idxs = np.argwhere(boundary)
        for idx in idxs:
            assign = {variables[i]: centers[idx[i]] for i in range(k)}
            val = P.eval_rational(assign)
            if abs(val) <= QQ(cfg.tau):
                mask[tuple(idx)] = True
    labels = -np.ones(mask.shape, dtype=np.int64)
    cells = np.argwhere(mask)
    index_of = {tuple(c): i for i, c in enumerate(map(tuple, cells))}
    uf = UnionFind(len(cells))
    for ci, cell in enumerate(map(tuple, cells)):
        for dim in range(k):
            nb = list(cell)
            nb[dim] += 1
            nb = tuple(nb)
            if nb in index_of:
                uf.union(ci, index_of[nb])
    roots = {}
    cloud = []
    for ci, cell in enumerate(map(tuple, cells)):
        r = uf.find(ci)
        roots.setdefault(r, len(roots))
        pt = tuple(float(centers_f[cell[i]]) for i in range(k))
        cloud.append((pt, roots[r]))
    return len(roots), cloud


def fiber_components(P, coord_var, value, cfg: MeshConfig = None):
    """grid_components of the slice P(coord = value)."""
    sliced = P.subst({coord_var: QQ(value)})
    if sliced.is_zero():
        raise ValueError("slice polynomial is identically zero")
    return grid_components(sliced, cfg)[0]


def lagrange_brute(system, G, n_starts=400, box=3.0, seed=0, tol=1e-12):
    """Numeric corroboration of critical points: multi-start damped Newton on
    the square Lagrange system (lambda-scale eliminated), deduplicated."""
    variables = list(G.vars)
    k = len(variables)
    m = len(system)
    rng = np.random.default_rng(seed)

    def fload(p):
        return _poly_to_numpy_eval_point(p, variables + [f"lam{j}" for j in range(m + 1)])

    from .critloci import crit_system

    eqs, lam_vars = crit_system(system, G, 0, variables)
    allv = variables + list(lam_vars)
    fns = [_poly_to_numpy_eval_point(e.with_vars(tuple(allv)), allv) for e in eqs]
    grads = [[_poly_to_numpy_eval_point(e.with_vars(tuple(allv)).deriv(v), allv) for v in allv]
             for e in eqs]
    n = len(allv)
    found = []
    for _ in range(n_starts):
        x = rng.uniform(-box, box, size=n)
        lam_norm = np.linalg.norm(x[k:])
        if lam_norm > 0:
            x[k:] /= lam_norm
        converged = False
        for _it in range(80):
            F = np.array([f(x) for f in fns])
            if not np.all(np.isfinite(F)):
                break
            if np.linalg.norm(F) < tol:
                converged = True
                break
            J = np.array([[g(x) for g in row] for row in grads])
            try:
                step, *_ = np.linalg.lstsq(J, -F, rcond=None)
            except np.linalg.LinAlgError:
                break
            t = 1.0
            base = np.linalg.norm(F)
            while t > 1e-6:
                xn = x + t * step
                Fn = np.array([f(xn) for f in fns])
                if np.all(np.isfinite(Fn)) and np.linalg.norm(Fn) < base:
                    break
                t /= 2
            else:
                break
            x = x + t * step
        if converged:
            pt = tuple(x[:k])
            if not any(np.linalg.norm(np.array(pt) - np.array(q)) < 1e-6 for q in found):
                found.append(pt)
    return sorted(found)


def _poly_to_numpy_eval_point(P, variables):
    terms = [(m, float(Fraction(int(c.numerator), int(c.denominator))))
             for m, c in P.terms.items()]
    pos = [variables.index(v) for v in P.vars]

    def ev(x):
        acc = 0.0
        for m, c in terms:
            t = c
            for i, e in enumerate(m):
                if e:
                    t *= x[pos[i]] ** e
            acc += t
        return acc

    return ev


# ---------------------------------------------------------------------------
# exact interval root isolation (independent cross-check for tests)


def isolate_real_roots(coeffs):
    """Isolating rational intervals for the distinct real roots of the
    univariate polynomial with rational coefficient list (index = degree),
    via Sturm sequences and exact bisection."""
    cs = [QQ(c) for c in coeffs]
    while cs and cs[-1] == 0:
        cs.pop()
    if not cs or len(cs) == 1:
        return []
    # squarefree reduction over QQ
    import sympy

    x = sympy.Symbol("x")
    p = sympy.Poly(sum(sympy.Rational(int(c.numerator), int(c.denominator)) * x ** i
                       for i, c in enumerate(cs)), x)
    p = p.quo(p.gcd(p.diff(x)))
    cs = [QQ(0)] * (p.degree() + 1)
    for (e,), c in p.terms():
        cs[e] = QQ(int(sympy.Rational(c).p), int(sympy.Rational(c).q))

    def poly_eval(v):
        acc = QQ(0)
        for c in reversed(cs):
            acc = acc * v + c
        return acc

    chain = [cs[:], [QQ(i) * cs[i] for i in range(1, len(cs))]]
    while True:
        a, b = chain[-2], chain[-1]
        if not any(c != 0 for c in b):
            chain.pop()
            break
        # remainder of a by b
        r = a[:]
        while len(r) >= len(b) and any(c != 0 for c in r):
            while r and r[-1] == 0:
                r.pop()
            if len(r) < len(b):
                break
            f = r[-1] / b[-1]
            off = len(r) - len(b)
            for i in range(len(b)):
                r[off + i] -= f * b[i]
            r.pop()
        chain.append([-c for c in r] if r else [QQ(0)])

    def variations(v):
        signs = []
        for c in chain:
            while c and c[-1] == 0:
                c = c[:-1]
            if not c:
                continue
            acc = QQ(0)
            for q in reversed(c):
                acc = acc * v + q
            if acc != 0:
                signs.append(1 if acc > 0 else -1)
        out = 0
        for i in range(1, len(signs)):
            if signs[i] != signs[i - 1]:
                out += 1
        return out

    bound = QQ(1) + max(abs(c) / abs(cs[-1]) for c in cs)
    roots = []
    stack = [(-bound, bound)]
    while stack:
        a, b = stack.pop()
        n = variations(a) - variations(b)
        if n == 0:
            continue
        if n == 1:
            # refine until the interval contains no root of the derivative
            # chain conflicts; an isolating interval for a simple root
            roots.append((a, b))
            continue
        mid = (a + b) / 2
        if poly_eval(mid) == 0:
            roots.append((mid, mid))
            eps = (b - a) / (4 * n)
            stack.append((a, mid - eps))
            stack.append((mid + eps, b))
        else:
            stack.append((a, mid))
            stack.append((mid, b))
    roots.sort()
    return roots
