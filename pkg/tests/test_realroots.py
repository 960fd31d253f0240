import random

import pytest

from dcroadmap.errors import EmptyEncodingError
from dcroadmap.infring import InfElem, eps
from dcroadmap.mpoly import ERING, QRING, MPoly, parse_poly
from dcroadmap.realroots import (
    TriangularContext,
    compare_roots,
    sign_determination,
    signs_at_encodings,
    tarski_query_mpoly,
    thom_encodings,
    triangular_sign,
)

X = ("X",)


def P(text):
    return parse_poly(text, X)


def test_tarski_query_examples():
    assert tarski_query_mpoly(P("X^2 - 2"), P("1"), "X") == 2
    assert tarski_query_mpoly(P("X^2 - 2"), P("X"), "X") == 0
    assert tarski_query_mpoly(P("X^3 - X"), P("X + 2"), "X") == 3


def test_tarski_query_zero_p():
    with pytest.raises(ValueError):
        tarski_query_mpoly(MPoly.zero(QRING, X), P("1"), "X")


def test_tarski_query_multiplicity_counts_once():
    assert tarski_query_mpoly(P("(X - 1)^2"), P("1"), "X") == 1
    assert tarski_query_mpoly(P("(X - 1)^2*(X + 3)"), P("X"), "X") == 0


def test_thom_encodings_sqrt2():
    encs = thom_encodings(P("X^2 - 2"), "X")
    assert len(encs) == 2
    assert encs[0].signs == (0, -1, 1)
    assert encs[1].signs == (0, 1, 1)


def test_sign_determination_examples():
    p = P("(X - 1)^2")
    rows = sign_determination(p, [P("X - 1")], "X")
    assert rows == [(0,)]
    # signs of X^2 - eps1 at roots -1, 0, 1 of X^3 - X over the inf ring
    e1 = InfElem.sym(eps(1))
    p3 = parse_poly("X^3 - X", X).to_ering()
    q = MPoly(ERING, X, {(2,): InfElem.const(1), (0,): -e1})
    rows = sign_determination(p3, [q], "X")
    assert rows == [(1,), (-1,), (1,)]


def test_sign_determination_count_matches_tarski():
    rng = random.Random(17)
    for _ in range(30):
        deg = rng.randint(1, 8)
        coeffs = [rng.randint(-9, 9) for _ in range(deg)] + [rng.choice([1, -1, 2])]
        p = MPoly(QRING, X, {(i,): c for i, c in enumerate(coeffs) if c})
        if p.is_zero() or p.degree("X") == 0:
            continue
        n = tarski_query_mpoly(p, P("1"), "X")
        encs = thom_encodings(p, "X")
        assert len(encs) == n
        assert len({e.signs for e in encs}) == n


def test_compare_roots_same_poly():
    encs = thom_encodings(P("X^2 - 2"), "X")
    assert compare_roots(encs[0], encs[1]) == -1
    assert compare_roots(encs[1], encs[0]) == 1
    assert compare_roots(encs[0], encs[0]) == 0


def test_compare_roots_cross_poly():
    sqrt2 = thom_encodings(P("X^2 - 2"), "X")[1]
    three_halves = thom_encodings(P("2*X - 3"), "X")[0]
    assert compare_roots(sqrt2, three_halves) == -1
    assert compare_roots(three_halves, sqrt2) == 1
    one_a = thom_encodings(P("X - 1"), "X")[0]
    one_b = thom_encodings(P("X^2 - 1"), "X")[1]
    assert compare_roots(one_a, one_b) == 0


def test_compare_roots_ordering_random():
    rng = random.Random(23)
    for _ in range(40):
        a = rng.randint(-8, 8)
        b = rng.randint(-8, 8)
        if a == b:
            continue
        ea = thom_encodings(parse_poly(f"X - {a}" if a >= 0 else f"X + {-a}", X), "X")[0]
        pb = parse_poly(f"(X - {b})*(X^2 + 1)" if b >= 0 else f"(X + {-b})*(X^2 + 1)", X)
        eb = thom_encodings(pb, "X")[0]
        want = -1 if a < b else 1
        assert compare_roots(ea, eb) == want


def test_triangular_sign_level1():
    ctx0 = TriangularContext(QRING)
    t = ("T1",)
    f = parse_poly("T1^2 - 2", t)
    enc = thom_encodings(f, "T1")[1]  # sqrt 2
    ctx = ctx0.extend("T1", enc.poly, enc.signs)
    assert triangular_sign(parse_poly("T1^2 - 1", t), ctx) == 1
    assert triangular_sign(parse_poly("T1^2 - 2", t), ctx) == 0
    assert triangular_sign(parse_poly("T1 - 2", t), ctx) == -1


def test_triangular_sign_level2():
    ctx0 = TriangularContext(QRING)
    t1 = ("T1",)
    f1 = parse_poly("T1^2 - 2", t1)
    enc1 = thom_encodings(f1, "T1")[1]
    ctx1 = ctx0.extend("T1", enc1.poly, enc1.signs)
    t12 = ("T1", "T2")
    f2 = parse_poly("T2^2 - T1", t12)
    encs2 = thom_encodings(f2, "T2", ctx1)
    assert len(encs2) == 2
    pos = encs2[1]
    ctx2 = ctx1.extend("T2", pos.poly, pos.signs)
    # theta2 = 2^(1/4): T2^4 - 2 vanishes
    assert triangular_sign(parse_poly("T2^4 - 2", t12), ctx2) == 0
    assert triangular_sign(parse_poly("T2 - 2", t12), ctx2) == -1
    assert triangular_sign(parse_poly("T2^4 - 1", t12), ctx2) == 1


def test_triangular_sign_inconsistent_encoding():
    ctx0 = TriangularContext(QRING)
    t = ("T1",)
    f = parse_poly("T1^2 + 1", t)
    ctx = ctx0.extend("T1", f, (0, 1, 1))
    with pytest.raises((EmptyEncodingError, ValueError)):
        triangular_sign(parse_poly("T1 - 1", t), ctx)


def test_signs_at_encodings_family_alignment():
    p = P("X^3 - X")
    rows = signs_at_encodings(p, [P("X + 2"), P("X")], "X")
    assert [fam for _enc, fam in rows] == [(1, -1), (1, 0), (1, 1)]


def test_infelem_coefficient_tarski():
    # over D[eta]: the polynomial X^2 - e1 has two real roots
    e1 = InfElem.sym(eps(1))
    p = MPoly(ERING, X, {(2,): InfElem.const(1), (0,): -e1})
    assert tarski_query_mpoly(p, parse_poly("1", X).to_ering(), "X") == 2
    encs = thom_encodings(p, "X")
    assert [e.signs for e in encs] == [(0, -1, 1), (0, 1, 1)]


def test_guard_value_stability():
    # specializing eps := 10^-40 must reproduce sign vectors for generic data
    from dcroadmap.infring import QQ

    e1 = InfElem.sym(eps(1))
    p = MPoly(ERING, X, {(3,): InfElem.const(1), (1,): -(InfElem.const(1) + e1), (0,): e1})
    fam = [MPoly(ERING, X, {(1,): InfElem.const(1), (0,): e1})]
    rows_sym = sign_determination(p, fam, "X")
    guard = QQ(1, 10 ** 40)
    pg = parse_poly("X^3 - X", X) + MPoly(QRING, X, {(1,): -guard, (0,): guard})
    fg = [parse_poly("X", X) + MPoly.const(QRING, X, guard)]
    rows_g = sign_determination(pg, fg, "X")
    assert rows_sym == rows_g
