import json
import random

import numpy as np
import pytest

from agsep.curves import (
    INFINITY,
    Curve,
    CurvePoint,
    Divisor,
    FunctionRep,
    PrecisionError,
    ZeroFunctionError,
    canonical_divisor,
    clearing_factors,
    curve_from_json,
    divisor_of,
    evaluate,
    hermitian,
    l_dim,
    local_expansion,
    projective_line,
    random_divisor,
    riemann_roch_basis,
    valuation,
)
from agsep import linalg
from agsep.curves.functions import local_xy, ser_pow
from agsep.gf import FieldError, field_new
from oracles import HERMITIAN_POINTS, PolyField, hermitian_l_multiple_of_infinity, hermitian_points, line_l

H2, H3 = hermitian(2), hermitian(3)
LINE4 = projective_line(field_new(2, 2))
CURVES = {"line4": LINE4, "h2": H2, "h3": H3}


@pytest.fixture(params=list(CURVES), ids=list(CURVES))
def X(request):
    return CURVES[request.param]


# -- points ----------------------------------------------------------------------

@pytest.mark.parametrize("q0", [2, 3, 4])
def test_hermitian_points_against_oracle(q0):
    X = hermitian(q0)
    assert len(X.points) == HERMITIAN_POINTS[q0] == q0 ** 3 + 1
    F = X.field
    expected = hermitian_points(PolyField(F.p, F.modulus), q0)
    assert [(P.x, P.y) for P in X.affine_points] == sorted(expected)
    assert X.points[-1] is INFINITY
    assert X.genus == q0 * (q0 - 1) // 2


def test_line_points():
    assert len(LINE4.points) == 5 and LINE4.genus == 0
    assert [P.x for P in LINE4.affine_points] == [0, 1, 2, 3]


def test_fibres_partition_affine_points():
    X = H3
    seen = []
    for a in range(X.field.q):
        fib = X.fiber(a)
        assert len(fib) == X.q0
        seen.extend(fib)
    assert sorted(seen, key=lambda P: P.sort_key()) == list(X.affine_points)


def test_curve_validation():
    with pytest.raises(ValueError):
        Curve("hermitian", field_new(2, 3), 2)
    with pytest.raises(ValueError):
        Curve("cubic", field_new(2, 2))
    with pytest.raises(FieldError):
        hermitian(6)
    assert curve_from_json(H3.describe()) == H3
    assert curve_from_json({"kind": "p1", "p": 2, "k": 2}) == LINE4
    assert not H2.contains(CurvePoint(1, 0))


# -- local structure ------------------------------------------------------------------

@pytest.mark.parametrize("q0", [2, 3])
def test_newton_residual_vanishes(q0):
    X = hermitian(q0)
    F = X.field
    N = 12
    for P in X.affine_points:
        xs, ys = local_xy(X, P, N)
        lhs = [F.add(a, b) for a, b in zip(ser_pow(F, list(ys), q0, N), ys)]
        rhs = ser_pow(F, list(xs), q0 + 1, N)
        assert lhs == rhs, P
        assert xs[0] == P.x and ys[0] == P.y


def test_valuations_at_infinity():
    for X in (H2, H3):
        q0 = X.q0
        assert valuation(FunctionRep.x(X), INFINITY) == -q0
        assert valuation(FunctionRep.y(X), INFINITY) == -(q0 + 1)
    assert valuation(FunctionRep.x(LINE4), INFINITY) == -1


def test_divisors_of_lines():
    X = H3
    for P in X.affine_points[::5]:
        tan = FunctionRep.from_factors(X, 1, [(("tan", (P.x, P.y)), 1)])
        assert divisor_of(tan) == {P: X.q0 + 1, INFINITY: -(X.q0 + 1)}
        xa = FunctionRep.from_factors(X, 1, [(("x", P.x), 1)])
        expect = {Q: 1 for Q in X.fiber(P.x)}
        expect[INFINITY] = -X.q0
        assert divisor_of(xa) == expect


def test_local_expansion_of_uniformizer():
    for X in (LINE4, H2, H3):
        for P in X.affine_points[:6]:
            t = FunctionRep.from_factors(X, 1, [(("x", P.x), 1)])
            s = local_expansion(t, P, 3)
            assert s.valuation == 1 and s.coeffs[0] == 1
            assert s.coefficient(1) == 1 and s.coefficient(0) == 0


def test_local_expansion_errors():
    with pytest.raises(ZeroFunctionError):
        local_expansion(FunctionRep.constant(H2, 0), H2.points[0], 2)
    with pytest.raises(ValueError):
        local_expansion(FunctionRep.x(H2), H2.points[0], 0)
    assert issubclass(PrecisionError, ArithmeticError)


def _random_factor_function(X, rng):
    def fac():
        P = rng.choice(X.affine_points)
        if X.is_line or rng.random() < 0.5:
            return (("x", P.x), rng.randint(1, 3))
        return (("tan", (P.x, P.y)), rng.randint(1, 2))
    num = [fac() for _ in range(rng.randint(0, 3))]
    den = [fac() for _ in range(rng.randint(0, 3))]
    return FunctionRep.from_factors(X, rng.randrange(1, X.field.q), num, den), num, den


def test_principal_divisors_have_degree_zero(X):
    rng = random.Random(3)
    for _ in range(25):
        f, num, den = _random_factor_function(X, rng)
        div = divisor_of(f)
        assert sum(div.values()) == 0
        # cross-check against the factor-wise divisors
        expect = Divisor(X)
        for sign, facs in ((1, num), (-1, den)):
            for fac, e in facs:
                g = FunctionRep.from_factors(X, 1, [(fac, 1)])
                expect = expect + Divisor.of(X, divisor_of(g)) * (sign * e)
        assert Divisor.of(X, div) == expect


def test_evaluate_coordinates(X):
    x = FunctionRep.x(X)
    for P in X.affine_points:
        assert evaluate(x, P) == P.x
        if not X.is_line:
            assert evaluate(FunctionRep.y(X), P) == P.y
    with pytest.raises(ValueError):
        evaluate(x, INFINITY)


def test_function_field_identities():
    X = H2
    F = X.field
    x, y = FunctionRep.x(X), FunctionRep.y(X)
    # y^2 + y = x^3 on the curve
    assert (y * y + y).equals(x * x * x)
    inv = FunctionRep.make(X, {(0, 0): 1}, [(("x", 1), 1)])
    xm1 = x - FunctionRep.constant(X, 1)
    assert (xm1 * inv).equals(FunctionRep.constant(X, 1))
    assert (x * F.neg(1) + x).is_zero()


# -- Riemann-Roch -------------------------------------------------------------------

def test_riemann_roch_identity(X):
    rng = random.Random(17)
    g = X.genus
    K = canonical_divisor(X)
    assert K.degree == 2 * g - 2 and l_dim(X, K) == g
    for _ in range(40):
        D = random_divisor(X, rng, rng.randint(-3, 3 * g + 5))
        assert l_dim(X, D) - l_dim(X, K - D) == D.degree + 1 - g, D
        if D.degree >= 2 * g - 1:
            assert l_dim(X, D) == D.degree + 1 - g


@pytest.mark.parametrize("q0", [2, 3, 4])
def test_l_of_multiples_of_infinity_matches_semigroup(q0):
    X = hermitian(q0)
    for m in range(-2, 3 * X.genus + 6):
        assert l_dim(X, Divisor.point(X, INFINITY, m)) == hermitian_l_multiple_of_infinity(q0, m), m


def test_line_dimension_closed_form():
    rng = random.Random(5)
    for _ in range(50):
        D = random_divisor(LINE4, rng, rng.randint(-4, 6))
        assert l_dim(LINE4, D) == line_l(D.degree)


def test_monotone_in_one_point_steps(X):
    rng = random.Random(23)
    for _ in range(30):
        D = random_divisor(X, rng, rng.randint(-2, 2 * X.genus + 2))
        P = rng.choice(X.points)
        a, b = l_dim(X, D), l_dim(X, D + Divisor.point(X, P))
        assert a <= b <= a + 1


def test_extra_denominator_does_not_change_dimension(X):
    rng = random.Random(29)
    for _ in range(20):
        D = random_divisor(X, rng, rng.randint(0, 2 * X.genus + 3))
        a = rng.randrange(X.field.q)
        assert l_dim(X, D, [(("x", a), 2)]) == l_dim(X, D)


def test_basis_elements_lie_in_the_space(X):
    rng = random.Random(31)
    for _ in range(12):
        D = random_divisor(X, rng, rng.randint(0, 2 * X.genus + 3), spread=2)
        basis = riemann_roch_basis(X, D)
        assert len(basis) == l_dim(X, D)
        for f in basis:
            div = Divisor.of(X, divisor_of(f))
            assert (div + D).support == tuple((P, m) for P, m in (div + D).support if m > 0)
        # shared denominator, so independence is rank of the numerators
        if basis:
            assert len({f.den for f in basis}) == 1
            monos = sorted({m for f in basis for m, _ in f.num})
            M = np.array([[f.numerator.get(m, 0) for m in monos] for f in basis])
            assert linalg.rank(X.field, M) == len(basis)


def test_clearing_prefers_cheaper_denominator():
    X = H3
    P = X.affine_points[0]
    # one point with multiplicity 4: a tangent line (weight 4) beats (x-a)^4 (weight 12)
    facs = clearing_factors(X, Divisor.point(X, P, 4))
    assert facs == [(("tan", (P.x, P.y)), 1)]
    fib = X.fiber(P.x)
    D = Divisor.of(X, {Q: 1 for Q in fib})
    assert clearing_factors(X, D) == [(("x", P.x), 1)]


# -- divisors ---------------------------------------------------------------------------

def test_divisor_arithmetic_and_json():
    X = H2
    P, Q = X.points[0], X.points[1]
    D = Divisor.of(X, {P: 2, Q: -1, INFINITY: 3})
    assert D.degree == 4 and D[P] == 2 and D[X.points[2]] == 0
    assert (D - D).is_zero() and (2 * D).degree == 8 and (-D).degree == -4
    E = Divisor.of(X, {P: 2, INFINITY: 3})
    assert Divisor.point(X, P) <= E and not E <= Divisor.point(X, P)
    assert not Divisor.point(X, P) <= D
    blob = json.loads(json.dumps(D.to_json()))
    assert Divisor.from_json(blob) == D
    assert blob["support"][-1] == {"point": "inf", "mult": 3}
    with pytest.raises(ValueError):
        Divisor.point(X, CurvePoint(1, 0))
    with pytest.raises(ValueError):
        D + Divisor.point(H3, H3.points[0])


def test_point_json_round_trip():
    for P in H3.points[:4] + (INFINITY,) + LINE4.points[:2]:
        assert CurvePoint.from_json(P.to_json()) == P
    with pytest.raises(ValueError):
        CurvePoint.from_json([1, 2, 3])


def test_random_divisor_is_seeded_and_has_degree():
    a = random_divisor(H3, random.Random(1), 5)
    b = random_divisor(H3, random.Random(1), 5)
    assert a == b and a.degree == 5
