import random

import numpy as np
import pytest

from agsep import linalg
from agsep.agcodes import (
    EvalCodeSpec,
    LemmaExhausted,
    NotInSpaceError,
    bad_points,
    build_code,
    build_intersecting,
    construct_pair,
    count_bad_points,
    evaluate_phi,
    find_point_double,
    find_point_simple,
    first_points,
    main_divisor_search,
    product_compat_check,
    random_admissible,
    xing_check,
)
from agsep.codes import check_intersecting, check_mutually_intersecting
from agsep.curves import (
    INFINITY,
    Divisor,
    FunctionRep,
    evaluate,
    hermitian,
    l_dim,
    projective_line,
    random_divisor,
    riemann_roch_basis,
)
from agsep.gf import field_new
from oracles import PolyField, naive_mutual, naive_span

H2, H3 = hermitian(2), hermitian(3)


def vandermonde_oracle(F, k):
    P = PolyField(F.p, F.modulus)
    return np.array([[P.pow(a, j) for a in range(F.q)] for j in range(k)], dtype=np.int64)


@pytest.mark.parametrize("pk", [(2, 2), (2, 3), (2, 4), (3, 2)])
def test_reed_solomon_row_space(pk):
    F = field_new(*pk)
    X = projective_line(F)
    pts = X.affine_points
    for m in range(F.q - 1):
        code = build_code(EvalCodeSpec(X, pts, Divisor.point(X, INFINITY, m)))
        assert code.k == m + 1
        assert linalg.row_space_equal(F, code.body, vandermonde_oracle(F, m + 1))


def test_reed_solomon_intersecting_iff_2m_below_n():
    F = field_new(2, 3)
    X = projective_line(F)
    n = F.q
    for m in range(n - 1):
        code = build_code(EvalCodeSpec(X, X.affine_points, Divisor.point(X, INFINITY, m)))
        assert check_intersecting(code).passed == (2 * m < n)


# -- the twisted evaluation map ----------------------------------------------------------

def test_twist_with_double_points_of_G():
    X = H2
    P = X.affine_points[2]
    fib = X.fiber(P.x)
    # h/(x-a)^2 has double poles on the fibre; t = x - a, so t^2 f = h there
    y = FunctionRep.y(X)
    f = y * FunctionRep.make(X, {(0, 0): 1}, [(("x", P.x), 2)])
    D = Divisor.of(X, {Q: 2 for Q in fib}) + Divisor.point(X, INFINITY, 3)
    spec = EvalCodeSpec(X, X.points, D)
    word = evaluate_phi(spec, f)
    for Q in fib:
        assert word[X.point_index[Q]] == Q.y
    for Q in X.affine_points:
        if Q not in fib:
            assert word[X.point_index[Q]] == evaluate(f, Q)


def test_twist_with_negative_multiplicity():
    X = H3
    P = X.affine_points[4]
    # (x-a)*y vanishes on the fibre; D = -P asks for t^-1 f, i.e. y(P)
    f = FunctionRep.from_factors(X, 1, [(("x", P.x), 1)]) * FunctionRep.y(X)
    D = Divisor.point(X, P, -1) + Divisor.point(X, INFINITY, 8)
    spec = EvalCodeSpec(X, X.affine_points, D)
    assert evaluate_phi(spec, f)[X.point_index[P]] == P.y


def test_twist_at_infinity_reads_the_exact_pole_order_coefficient():
    X = H2
    c = 3
    f = FunctionRep.make(X, {(0, 1): c, (1, 0): 1, (0, 0): 2})  # c*y + x + 2, pole order 3
    spec = EvalCodeSpec(X, X.points, Divisor.point(X, INFINITY, 3))
    assert evaluate_phi(spec, f)[-1] == c
    spec4 = EvalCodeSpec(X, X.points, Divisor.point(X, INFINITY, 4))
    assert evaluate_phi(spec4, f)[-1] == 0
    with pytest.raises(NotInSpaceError):
        evaluate_phi(EvalCodeSpec(X, X.points, Divisor.point(X, INFINITY, 2)), f)


def test_not_in_space_at_affine_point():
    X = H2
    P = X.affine_points[0]
    f = FunctionRep.make(X, {(0, 0): 1}, [(("x", P.x), 1)])
    with pytest.raises(NotInSpaceError):
        evaluate_phi(EvalCodeSpec(X, X.points, Divisor(X)), f)


@pytest.mark.parametrize("X", [H2, H3, projective_line(field_new(2, 3))], ids=["h2", "h3", "line8"])
def test_batched_build_matches_per_function_route(X):
    rng = random.Random(41)
    for _ in range(8):
        n = rng.randint(X.genus + 1, len(X.points))
        pts = tuple(sorted(rng.sample(X.points, n), key=lambda P: P.sort_key()))
        D = random_divisor(X, rng, rng.randint(0, n + X.genus), spread=2)
        spec = EvalCodeSpec(X, pts, D)
        code = build_code(spec)
        rows = np.array([evaluate_phi(spec, f) for f in riemann_roch_basis(X, D)]).reshape(-1, n)
        assert linalg.rank(X.field, rows) == code.k
        assert linalg.row_space_equal(X.field, rows, code.body)
        # kernel of the evaluation map is L(D - G)
        assert code.k == l_dim(X, D) - l_dim(X, D - spec.G)


def test_product_compatibility_with_overlap():
    X = H3
    rng = random.Random(43)
    for _ in range(10):
        D = random_divisor(X, rng, rng.randint(3, 7)) + Divisor.point(X, X.points[0], 2)
        Dp = random_divisor(X, rng, rng.randint(3, 7))
        f = riemann_roch_basis(X, D)[-1]
        fp = riemann_roch_basis(X, Dp)[-1]
        spec = EvalCodeSpec(X, X.points, D)
        assert product_compat_check(spec, spec.with_divisor(Dp), f, fp)


def test_spec_validation():
    X = H2
    with pytest.raises(ValueError):
        EvalCodeSpec(X, (X.points[0], X.points[0]), Divisor(X))
    with pytest.raises(ValueError):
        EvalCodeSpec(X, X.points, Divisor(H3))
    with pytest.raises(ValueError):
        first_points(X, 10)


# -- certificate -----------------------------------------------------------------------

def test_xing_certificate_and_degree_guard():
    X = H2
    G = X.points
    spec = EvalCodeSpec(X, G, Divisor.point(X, G[0], 4))
    cert = xing_check(spec)
    assert cert.certified and cert.l2DG == 0 and cert.deg2DG == -1
    assert set(cert.to_json()) == {"certified", "l2DG", "degD", "deg2DG", "n"}
    # D = G - P: deg 2D - G = n - 2 >= 2g - 1, so the space is nonzero
    Dbig = Divisor.sum_of(X, G) - Divisor.point(X, G[0])
    cert = xing_check(spec.with_divisor(Dbig))
    assert not cert.certified and cert.l2DG == len(G) - 2 + 1 - X.genus
    with pytest.raises(ValueError):
        xing_check(spec.with_divisor(Divisor.sum_of(X, G)))


def test_certified_codes_are_intersecting_exhaustively():
    X = H2
    rng = random.Random(47)
    hits = 0
    for _ in range(25):
        D = random_divisor(X, rng, rng.randint(1, 5), spread=2)
        spec = EvalCodeSpec(X, X.points, D)
        if xing_check(spec).certified:
            hits += 1
            code = build_code(spec)
            if code.k:
                assert check_intersecting(code).passed
    assert hits > 0


# -- point searches ----------------------------------------------------------------------

def test_find_point_simple_and_double():
    X = H3
    rng = random.Random(53)
    for _ in range(5):
        A = random_admissible(X, rng, X.genus - 2)
        P = find_point_simple(X, A)
        assert l_dim(X, A + Divisor.point(X, P)) == 0
        bad = bad_points(X, A, "single")
        assert P not in bad and len(bad) <= X.genus
        B = random_admissible(X, rng, X.genus - 3)
        Q = find_point_double(X, B)
        assert l_dim(X, B + Divisor.point(X, Q, 2)) == 0
        assert count_bad_points(X, B, "double") <= 4 * X.genus


def test_bad_points_of_minus_a_point():
    X = H3
    P = X.points[0]
    # A = -P: bad points for l(A + Q) > 0 are exactly Q = P
    assert bad_points(X, Divisor.point(X, P, -1), "single") == [P]


def test_search_preconditions():
    X = H3
    with pytest.raises(ValueError):
        find_point_simple(X, Divisor.point(X, X.points[0], X.genus - 1))
    with pytest.raises(ValueError):
        find_point_double(X, Divisor(X))  # l(0) = 1
    with pytest.raises(LemmaExhausted):
        find_point_simple(X, Divisor.point(X, X.points[0], -1), candidates=[X.points[0]])
    with pytest.raises(ValueError):
        count_bad_points(X, Divisor.point(X, X.points[0], -1), "triple")


def test_parallel_scan_agrees():
    X = H3
    A = Divisor.point(X, X.points[3], -2) + Divisor.point(X, INFINITY, 1)
    assert bad_points(X, A, "single", workers=4) == bad_points(X, A, "single")


# -- constructions ---------------------------------------------------------------------

def test_construct_pair_on_gf4():
    X = H2
    n, g = len(X.points), X.genus
    for m in range(g, n):
        pr = construct_pair(X, X.points, m)
        assert pr.D.degree == m and pr.D_prime.degree == n + g - 1 - m
        assert l_dim(X, pr.D + pr.D_prime - Divisor.sum_of(X, X.points)) == 0
        assert pr.C.k >= m + 1 - g and pr.C_prime.k >= n - m
        assert check_mutually_intersecting(pr.C, pr.C_prime, mode="pairs").passed
    with pytest.raises(ValueError):
        construct_pair(X, X.points, 0)


def test_construct_pair_against_naive_span():
    X = projective_line(field_new(2, 2))
    pts = X.affine_points
    pr = construct_pair(X, pts, 1)
    words = [naive_span(c.body.tolist(), X.field.mul, X.field.add, 4) for c in (pr.C, pr.C_prime)]
    assert naive_mutual(*words)
    assert check_mutually_intersecting(pr.C, pr.C_prime, mode="split").passed


def test_main_divisor_search_degree_and_window():
    X = H3
    D = main_divisor_search(X, X.points)
    n, g = len(X.points), X.genus
    assert D.degree == (n + g - 1) // 2
    A = 2 * D - Divisor.sum_of(X, X.points)
    assert g - 2 <= A.degree < g and l_dim(X, A) == 0


def test_build_intersecting_small_cases():
    res = build_intersecting(H2, 9)
    assert (res.code.n, res.code.k) == (9, 4) and res.certificate.certified
    assert check_intersecting(res.code).passed
    line = projective_line(field_new(2, 3))
    res = build_intersecting(line)
    assert res.code.n == 9 and res.code.k == 5
    assert check_intersecting(res.code).passed
    with pytest.raises(ValueError):
        build_intersecting(H2, 1)
