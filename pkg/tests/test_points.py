import pytest

from dcroadmap.infring import QQ, InfElem, eps, zeta
from dcroadmap.mpoly import ERING, QRING, MPoly, parse_poly
from dcroadmap.realroots import ThomEncoding, TriangularContext, thom_encodings
from dcroadmap.points import (
    RealUnivRep,
    dedupe_points,
    flatten_rur,
    limit_point,
    limit_thom,
    project_rur,
    rational_between,
    rur_coordinate_encoding,
    rur_from_raw,
    rur_sign,
    sample_components,
)

X = ("X",)
XY = ("x", "y")


def P(t, v=XY):
    return parse_poly(t, v)


def mk_rational_rur(values, xvars=("x", "y")):
    """RUR of a rational point: root of U - 0 with constant coordinates."""
    ring = QRING
    uv = "U9"
    variables = (uv,)
    f = MPoly.var(ring, variables, uv)
    one = MPoly.const(ring, variables, 1)
    F = (one,) + tuple(MPoly.const(ring, variables, QQ(v)) for v in values)
    return RealUnivRep(TriangularContext(ring), uv, f, (0, 1), F, tuple(xvars))


def test_project_rur():
    u = mk_rational_rur([1, 2, 3], ("x", "y", "z"))
    assert project_rur(u, 3) is not u and project_rur(u, 3).F == u.F
    p1 = project_rur(u, 1)
    assert len(p1.F) == 2 and p1.xvars == ("x",)
    p0 = project_rur(u, 0)
    assert len(p0.F) == 1
    with pytest.raises(ValueError):
        project_rur(u, 5)


def test_rur_sign():
    u = mk_rational_rur([QQ(1, 2), QQ(-1, 3)])
    assert rur_sign(u, P("x")) == 1
    assert rur_sign(u, P("y")) == -1
    assert rur_sign(u, P("2*x - 1")) == 0
    assert rur_sign(u, P("x^2 + y^2 - 1")) == -1


def test_rational_between():
    encs = thom_encodings(parse_poly("X^2 - 2", X), "X")
    q = rational_between(encs[0], encs[1])
    assert -2 < q < 2
    assert q * q != 2


def test_limit_thom_spec_examples():
    e1 = InfElem.sym(eps(1))
    one = InfElem.const(1)
    ctx = TriangularContext(ERING)
    # f = (X - e1)(X - 2): roots e1 and 2
    f = MPoly(ERING, X, {(2,): one, (1,): -(InfElem.const(2) + e1), (0,): 2 * e1})
    encs = thom_encodings(f, "X", ctx)
    j = eps(1).global_index
    lim0 = limit_thom(encs[0], j)
    lim2 = limit_thom(encs[1], j)
    # limits are roots 0 and 2 of the limit polynomial X(X - 2)
    z = limit_root_value(lim0)
    assert z == 0
    assert limit_root_value(lim2) == 2
    # f = X^2 - e1: both roots collapse to the double root 0 of X^2
    g = MPoly(ERING, X, {(2,): one, (0,): -e1})
    for enc in thom_encodings(g, "X", ctx):
        lim = limit_thom(enc, j)
        assert lim.signs == (0, 0, 1)


def limit_root_value(enc):
    """Rational value of a degree-1-root encoding (test helper)."""
    p = enc.poly
    var = enc.var
    # find the rational root among candidates by sign tests
    for cand in range(-10, 11):
        shifted = p.subst({var: MPoly.const(p.ring, p.vars, QQ(cand))})
        ctx = enc.context
        v = shifted.with_vars(ctx.tvars) if ctx.nlevels else shifted
        sgn = ctx.sign_mpoly(v) if ctx.nlevels else (
            p.ring.sign(v.const_value()) if v.is_const() else None)
        if sgn == 0:
            from dcroadmap.points import _linear_sign_at

            if _linear_sign_at(enc, QQ(cand)) == 0:
                return cand
    raise AssertionError("no small rational root matched")


def test_limit_thom_unbounded_root():
    z1 = InfElem.sym(zeta(1))
    one = InfElem.const(1)
    ctx = TriangularContext(ERING)
    # z1*X - 1 has the single root 1/z1, unbounded as z1 -> 0
    f = MPoly(ERING, X, {(1,): z1, (0,): -one})
    enc = thom_encodings(f, "X", ctx)[0]
    assert limit_thom(enc, zeta(1).global_index) is None


def test_limit_point_spec_examples():
    e1 = InfElem.sym(eps(1))
    one = InfElem.const(1)
    j = eps(1).global_index
    uv = "U5"
    V = (uv,)
    # point (e1, 1) as RUR over the root of U - e1
    f = MPoly(ERING, V, {(1,): one, (0,): -e1})
    F = (MPoly.const(ERING, V, 1), MPoly.var(ERING, V, uv), MPoly.const(ERING, V, 1))
    u = RealUnivRep(TriangularContext(ERING), uv, f, (0, 1), F, ("x", "y"))
    lim = limit_point(u, j)
    assert lim is not None
    assert rur_sign(lim, P("x")) == 0
    assert rur_sign(lim, P("y - 1")) == 0
    # eta-free input: idempotence
    u2 = mk_rational_rur([3, 4])
    lim2 = limit_point(RealUnivRep(TriangularContext(ERING), u2.uvar, u2.f.to_ering(),
                                   u2.sigma, tuple(g.to_ering() for g in u2.F), u2.xvars), j)
    assert rur_sign(lim2, P("x - 3").to_ering()) == 0
    assert rur_sign(lim2, P("y - 4").to_ering()) == 0


def test_limit_point_sqrt2_perturbed():
    # point (sqrt2 + e1^2, -e1) -> (sqrt2, 0)
    e1 = InfElem.sym(eps(1))
    one = InfElem.const(1)
    j = eps(1).global_index
    uv = "U6"
    V = (uv,)
    # root x of (U - e1^2)^2 - 2 : x = sqrt2 + e1^2 is a root of U^2 - 2 shifted
    shift = MPoly(ERING, V, {(1,): one, (0,): -e1 * e1})
    f = shift * shift - MPoly.const(ERING, V, 2)
    encs = thom_encodings(f, uv, TriangularContext(ERING))
    pos = encs[1]
    F = (MPoly.const(ERING, V, 1), MPoly.var(ERING, V, uv), MPoly.const(ERING, V, -e1))
    u = RealUnivRep(TriangularContext(ERING), uv, f, pos.signs, F, ("x", "y"))
    lim = limit_point(u, j)
    assert lim is not None
    assert rur_sign(lim, P("x^2 - 2").to_ering()) == 0
    assert rur_sign(lim, P("y").to_ering()) == 0


def test_sample_components_single_point_variety():
    sams = sample_components([P("x^2 + y^2")])
    assert len(sams) == 1
    u = sams[0]
    assert rur_sign(u, P("x")) == 0
    assert rur_sign(u, P("y")) == 0


def test_sample_components_empty_variety():
    assert sample_components([P("x^2 + y^2 + 1")]) == []


def test_sample_components_two_circles():
    p = P("(x^2 + y^2 - 1)*((x - 4)^2 + y^2 - 1)")
    sams = sample_components([p])
    assert len(sams) >= 2
    on_left = on_right = 0
    for u in sams:
        assert rur_sign(u, p) == 0
        if rur_sign(u, P("x - 2")) < 0:
            on_left += 1
        else:
            on_right += 1
    assert on_left >= 1 and on_right >= 1


def test_sample_components_assume_finite():
    sams = sample_components([P("x^2 + y^2 - 1"), P("y")], assume_finite=True)
    assert len(sams) == 2


def test_flatten_rur_two_levels():
    ctx0 = TriangularContext(QRING)
    f1 = parse_poly("T1^2 - 2", ("T1",))
    enc1 = thom_encodings(f1, "T1")[1]
    ctx1 = ctx0.extend("T1", enc1.poly, enc1.signs)
    uv = "U7"
    tv = ("T1", uv)
    f = parse_poly(f"{uv}^2 - T1", tv)
    encs = thom_encodings(f, uv, ctx1)
    root = encs[1]  # 2^(1/4)
    one = MPoly.const(QRING, tv, 1)
    F = (one, MPoly.var(QRING, tv, uv))
    u = RealUnivRep(ctx1, uv, f, root.signs, F, ("x",))
    flat = flatten_rur(u)
    assert flat.base.nlevels == 0
    # point coordinate x = 2^(1/4)
    assert rur_sign(flat, parse_poly("x^4 - 2", ("x",))) == 0
    assert rur_sign(flat, parse_poly("x", ("x",))) == 1


def test_rur_coordinate_encoding():
    sams = sample_components([P("x^2 + y^2 - 1"), P("x - y")], assume_finite=True)
    assert len(sams) == 2
    for u in sams:
        cx = rur_coordinate_encoding(u, 1)
        # coordinate is +- 1/sqrt(2): 2*Y^2 - 1 = 0
        ctxp = cx.context.extend(cx.var, cx.poly, cx.signs)
        val = parse_poly("2*Y_^2 - 1", ("Y_",)).with_vars(ctxp.tvars)
        assert ctxp.sign_mpoly(val) == 0
