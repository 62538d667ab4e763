import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ambient_jets.jets import JetScalar, NotAUnit, SpecMismatch, base_spec, chart_spec
from ambient_jets.rationals import QQ


def random_jet(spec, rng, hom=0, maxterms=6):
    monos = spec.monomials()
    terms = []
    for _ in range(maxterms):
        exps = rng.choice(monos)
        terms.append((exps, QQ(rng.randint(-3, 3))))
    return JetScalar.from_terms(spec, terms, hom)


def test_product_truncation():
    sp = base_spec(1, 3)
    one = JetScalar.constant(sp, 1)
    x = JetScalar.variable(sp, "x1")
    assert (one + x) * (one - x) == one - x * x


def test_rho_weight_two_truncation():
    cs = chart_spec(1, 3)
    rho = JetScalar.variable(cs, "rho")
    assert (rho * rho).is_zero()


def test_mul_commutative_associative():
    rng = random.Random(5)
    sp = base_spec(2, 3)
    for _ in range(10):
        a, b, c = (random_jet(sp, rng) for _ in range(3))
        assert a * b == b * a
        assert (a * b) * c == a * (b * c)


def brute_product(spec, a, b):
    """Coefficient-by-coefficient convolution oracle."""
    out = {}
    for ea, ca in a.items():
        for eb, cb in b.items():
            e = tuple(x + y for x, y in zip(ea, eb))
            if sum(x * w for x, w in zip(e, spec.weights)) > spec.order:
                continue
            out[e] = out.get(e, QQ(0)) + ca * cb
    return JetScalar.from_terms(spec, out.items())


def test_mul_against_bruteforce():
    rng = random.Random(17)
    sp = chart_spec(2, 4)
    for _ in range(10):
        a, b = random_jet(sp, rng), random_jet(sp, rng)
        assert a * b == brute_product(sp, a, b)


def test_derive_basic():
    sp = base_spec(2, 4)
    x = JetScalar.variable(sp, "x1")
    assert (x * x).derive("x1") == JetScalar.monomial(sp.with_order(3), (1, 0), QQ(2))
    cs = chart_spec(1, 4)
    rho = JetScalar.variable(cs, "rho")
    assert (rho * rho).derive("rho") == rho.scale(QQ(2)).truncate(2)


def test_partials_commute():
    rng = random.Random(23)
    sp = base_spec(3, 4)
    for _ in range(5):
        f = random_jet(sp, rng)
        assert f.derive("x1").derive("x2") == f.derive("x2").derive("x1")


def test_derive_drops_order():
    cs = chart_spec(2, 5)
    f = JetScalar.variable(cs, "rho")
    assert f.derive("rho").spec.order == 3
    assert f.derive("x1").spec.order == 4


def test_invert_geometric():
    sp = base_spec(1, 4)
    one = JetScalar.constant(sp, 1)
    x = JetScalar.variable(sp, "x1")
    inv = (one + x).invert()
    expect = JetScalar.from_terms(sp, [((k,), QQ((-1) ** k)) for k in range(5)])
    assert inv == expect


def test_invert_constant():
    sp = base_spec(1, 2)
    two = JetScalar.constant(sp, 2)
    assert two.invert() == JetScalar.constant(sp, QQ(1, 2))


def test_invert_random_unit():
    rng = random.Random(31)
    sp = chart_spec(2, 4)
    one = JetScalar.constant(sp, 1)
    for _ in range(8):
        f = random_jet(sp, rng) + one + JetScalar.constant(sp, rng.randint(1, 3))
        if not f.constant_term():
            continue
        assert f * f.invert() == JetScalar.constant(sp, 1)


def test_invert_nonunit_raises():
    sp = base_spec(1, 3)
    with pytest.raises(NotAUnit):
        JetScalar.variable(sp, "x1").invert()


def test_spec_mismatch_raises():
    a = JetScalar.variable(base_spec(1, 3), "x1")
    b = JetScalar.variable(base_spec(2, 3), "x1")
    with pytest.raises(SpecMismatch):
        a + b


def test_homogeneity_adds_under_mul():
    cs = chart_spec(1, 3)
    a = JetScalar.constant(cs, 2, hom=2)
    b = JetScalar.variable(cs, "rho", hom=-1)
    assert (a * b).hom == 1
    with pytest.raises(SpecMismatch):
        a + b


def test_derive_t():
    cs = chart_spec(1, 3)
    f = JetScalar.constant(cs, 3, hom=2)
    ft = f.derive_t()
    assert ft.hom == 1 and ft.constant_term() == 6


@st.composite
def jets3(draw):
    sp = chart_spec(2, 3)
    monos = sp.monomials()
    n = draw(st.integers(1, 4))
    items = [
        (draw(st.sampled_from(monos)), QQ(draw(st.integers(-2, 2)))) for _ in range(n)
    ]
    return JetScalar.from_terms(sp, items)


@settings(max_examples=40, deadline=None)
@given(jets3(), jets3())
def test_leibniz(f, g):
    lhs = (f * g).derive("x1")
    rhs = f.derive("x1") * g + f * g.derive("x1")
    assert lhs == rhs


@settings(max_examples=30, deadline=None)
@given(jets3(), jets3())
def test_truncation_coherence(f, g):
    n = 2
    lhs = (f.truncate(n) * g.truncate(n)).truncate(n)
    rhs = (f * g).truncate(n)
    assert lhs == rhs


def test_var_coefficient_and_restrict():
    cs = chart_spec(2, 4)
    x = JetScalar.variable(cs, "x1")
    rho = JetScalar.variable(cs, "rho")
    f = x * rho + rho.scale(QQ(3)) + x
    c1 = f.var_coefficient("rho", 1)
    assert c1 == (x + JetScalar.constant(cs, 3)).truncate(2)
    assert f.restrict_zero("rho") == x.truncate(4)
    assert f.shift_var("x1", 1).var_coefficient("rho", 1).coefficient((2, 0)) == 1
