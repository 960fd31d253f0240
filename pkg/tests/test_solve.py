from dcroadmap.infring import QQ, InfElem, eps
from dcroadmap.mpoly import ERING, QRING, MPoly, parse_poly
from dcroadmap.realroots import TriangularContext, thom_encodings, triangular_sign
from dcroadmap.solve import solve_system

XY = ("x", "y")


def P(t, v=XY):
    return parse_poly(t, v)


def _eval_coords(sol):
    """Coordinates of a solution as (denominator sign-checked) pairs for
    verification through triangular_sign."""
    ctx_plus = sol.context.extend(sol.uvar, sol.eliminant, sol.signs)
    return ctx_plus


def test_circle_line_intersection():
    sols = solve_system([P("x^2 + y^2 - 1"), P("x - y")], XY)
    assert len(sols) == 2
    for s in sols:
        ctx_plus = _eval_coords(s)
        # check x == y and x^2 + y^2 == 1 via the coordinates
        num = s.coords[0] - s.coords[1]
        assert ctx_plus.sign_mpoly(num.with_vars(ctx_plus.tvars)) == 0
        lhs = s.coords[0] ** 2 + s.coords[1] ** 2 - s.denom ** 2
        assert ctx_plus.sign_mpoly(lhs.with_vars(ctx_plus.tvars)) == 0


def test_multiple_root_isolated_point():
    sols = solve_system([P("x^2 + y^2")], XY)
    assert len(sols) == 1
    s = sols[0]
    ctx_plus = _eval_coords(s)
    assert ctx_plus.sign_mpoly(s.coords[0].with_vars(ctx_plus.tvars)) == 0
    assert ctx_plus.sign_mpoly(s.coords[1].with_vars(ctx_plus.tvars)) == 0


def test_empty_variety():
    assert solve_system([P("x^2 + y^2 + 1")], XY) == []


def test_factor_split():
    sols = solve_system([P("(x - 1)*(x - 2)"), P("y - x")], XY)
    assert len(sols) == 2
    values = set()
    for s in sols:
        ctx_plus = _eval_coords(s)
        for q in (1, 2):
            num = s.coords[0] - s.denom.scale(QQ(q))
            if ctx_plus.sign_mpoly(num.with_vars(ctx_plus.tvars)) == 0:
                values.add(q)
    assert values == {1, 2}


def test_solve_over_triangular_context():
    ctx0 = TriangularContext(QRING)
    f = parse_poly("T1^2 - 2", ("T1",))
    enc = thom_encodings(f, "T1")[1]
    ctx = ctx0.extend("T1", enc.poly, enc.signs)
    sys_vars = ("T1", "x", "y")
    system = [parse_poly("x - T1", sys_vars), parse_poly("y^2 - x", sys_vars)]
    sols = solve_system(system, ("x", "y"), context=ctx)
    assert len(sols) == 2  # y = +-2^(1/4)
    for s in sols:
        ctx_plus = s.context.extend(s.uvar, s.eliminant, s.signs)
        num = s.coords[1] ** 4 - 2 * s.denom ** 4
        assert ctx_plus.sign_mpoly(num.with_vars(ctx_plus.tvars)) == 0


def test_solve_with_infinitesimal_coefficients():
    e1 = InfElem.sym(eps(1))
    p = MPoly(ERING, XY, {(2, 0): InfElem.const(1), (0, 0): -e1})
    q = MPoly(ERING, XY, {(0, 1): InfElem.const(1)})  # y = 0
    sols = solve_system([p, q], XY)
    assert len(sols) == 2


def test_three_vars_zero_dim():
    v = ("x", "y", "z")
    system = [parse_poly("x^2 + y^2 + z^2 - 1", v),
              parse_poly("y", v),
              parse_poly("z", v)]
    sols = solve_system(system, v)
    assert len(sols) == 2  # (+-1, 0, 0)
