import random

import pytest

from ambient_jets.jets import JetScalar, base_spec
from ambient_jets.rationals import QQ, Dual, epsilon_part
from ambient_jets.riemann import (
    CurvatureList,
    MetricJet,
    NotAMetricJet,
    bach,
    check_curvature_relations,
    christoffel,
    conformal_metric,
    constant_curvature_metric,
    cotton,
    covariant_derivative,
    curvature,
    curvature_list,
    ricci,
    scalar_curvature,
    schouten,
    weyl,
)
from ambient_jets.tensors import ConstTensor, ReferenceForm, TensorJet, full_trace_rows


def random_metric(n, order, seed, nterms=3, maxdeg=None):
    rng = random.Random(seed)
    spec = base_spec(n, order)
    cap = maxdeg or order - 1
    monos = [e for e in spec.monomials() if 1 <= sum(e) <= cap]
    comps = {}
    for i in range(n):
        for j in range(i, n):
            terms = [(rng.choice(monos), QQ(rng.randint(-2, 2))) for _ in range(nterms)]
            jet = JetScalar.from_terms(spec, terms)
            if i == j:
                jet = jet + JetScalar.constant(spec, 1)
            comps[(i, j)] = jet
    return MetricJet.from_components(n, spec, comps)


def test_flat_christoffel_and_curvature():
    g = MetricJet.flat(4, 3)
    gamma, _ = christoffel(g)
    assert gamma == {}
    assert curvature(g).is_zero()


def test_conformal_christoffel_leading_order():
    n = 3
    spec = base_spec(n, 3)
    # g = (1 + 2 phi) h with phi linear
    phi = JetScalar.from_terms(spec, [((1, 0, 0), QQ(1)), ((0, 1, 0), QQ(-2))])
    comps = {
        (i, i): JetScalar.constant(spec, 1) + phi.scale(QQ(2)) for i in range(n)
    }
    g = MetricJet.from_components(n, spec, comps)
    gamma, _ = christoffel(g)
    dphi = [phi.derive(spec.names[a]).constant_term() for a in range(n)]
    for k in range(n):
        for i in range(n):
            for j in range(i, n):
                got = gamma.get((k, i, j))
                got0 = got.constant_term() if got else QQ(0)
                want = QQ(0)
                if k == i:
                    want += dphi[j]
                if k == j:
                    want += dphi[i]
                if i == j:
                    want -= dphi[k]
                assert got0 == want


def test_metric_compatibility_random():
    for seed in (3, 5):
        g = random_metric(3, 3, seed)
        assert covariant_derivative(g.as_tensor(), g).is_zero()


def test_hessian_symmetry_on_scalars():
    g = random_metric(3, 4, 11)
    spec = g.spec
    f = JetScalar.from_terms(
        spec, [((2, 0, 0), QQ(1)), ((0, 1, 1), QQ(-3)), ((1, 0, 0), QQ(2))]
    )
    T = TensorJet(3, 0, spec, {(): f})
    D2 = covariant_derivative(covariant_derivative(T, g), g)
    for i in range(3):
        for j in range(3):
            assert D2.get((i, j)) == D2.get((j, i))


def test_nabla_constant_scalar_zero():
    g = random_metric(3, 3, 7)
    T = TensorJet(3, 0, g.spec, {(): JetScalar.constant(g.spec, 5)})
    assert covariant_derivative(T, g).is_zero()


def test_sphere_curvature_and_ricci():
    for n, K in ((3, 1), (4, 2)):
        g = constant_curvature_metric(n, 4, K)
        R = curvature(g)
        d = g.form.diag()
        for i in range(n):
            for j in range(n):
                for k in range(n):
                    for l in range(n):
                        want = QQ(K) * (
                            (d[i] if (i == k and j == l) else QQ(0))
                            - (d[i] if (i == l and j == k) else QQ(0))
                        )
                        assert R.get((i, j, k, l)).constant_term() == want
        ric = ricci(g)
        for i in range(n):
            assert ric.get((i, i)).constant_term() == (n - 1) * K
        assert scalar_curvature(g).constant_term() == n * (n - 1) * K


def test_curvature_symmetries_random():
    g = random_metric(3, 4, 13)
    R = curvature(g)
    n = 3
    for i in range(n):
        for j in range(n):
            for k in range(n):
                for l in range(n):
                    assert R.get((i, j, k, l)) == -R.get((j, i, k, l))
                    assert R.get((i, j, k, l)) == -R.get((i, j, l, k))
                    assert R.get((i, j, k, l)) == R.get((k, l, i, j))
    # first Bianchi on the jet, not just at the origin
    from ambient_jets.tensors import antisymmetrize

    assert antisymmetrize(R, (1, 2, 3)).is_zero()


def test_schouten_of_sphere():
    n, K = 4, 3
    g = constant_curvature_metric(n, 3, K)
    P = schouten(g)
    for i in range(n):
        assert P.get((i, i)).constant_term() == QQ(K, 2)


def test_weyl_conformally_flat_vanishes():
    spec = base_spec(4, 3)
    phi = JetScalar.from_terms(
        spec, [((1, 0, 0, 0), QQ(1)), ((0, 0, 1, 1), QQ(2)), ((0, 2, 0, 0), QQ(-1))]
    )
    g = conformal_metric(4, 3, phi)
    assert weyl(g).is_zero()


def test_cotton_conformally_flat_vanishes_n3():
    spec = base_spec(3, 4)
    phi = JetScalar.from_terms(
        spec, [((1, 0, 0), QQ(1)), ((0, 1, 1), QQ(2)), ((0, 0, 2), QQ(-1))]
    )
    g = conformal_metric(3, 4, phi)
    assert cotton(g).is_zero()


def test_bach_symmetric_tracefree_and_conformally_flat_zero():
    spec = base_spec(4, 4)
    phi = JetScalar.from_terms(
        spec, [((1, 0, 0, 0), QQ(1)), ((0, 1, 0, 1), QQ(-2))]
    )
    g = conformal_metric(4, 4, phi)
    assert bach(g).is_zero()
    g2 = random_metric(4, 4, 17, nterms=2, maxdeg=2)
    B = bach(g2)
    const_tr = sum(
        (B.get((i, i)).constant_term() for i in range(4)), QQ(0)
    )
    assert const_tr == 0
    for i in range(4):
        for j in range(4):
            assert B.get((i, j)).constant_term() == B.get((j, i)).constant_term()


def test_curvature_list_flat_zero():
    lst = curvature_list(MetricJet.flat(3, 4), 2)
    assert all(e.is_zero() for e in lst.entries)


def test_curvature_list_constant_curvature():
    g = constant_curvature_metric(3, 4, 2)
    lst = curvature_list(g, 1)
    assert not lst.entry(0).is_zero()
    assert lst.entry(1).is_zero()  # locally symmetric space


def test_relations_on_random_list():
    g = random_metric(3, 4, 19)
    lst = curvature_list(g, 2)
    rep = check_curvature_relations(lst, g.form)
    assert rep and all(row[-1] for row in rep)


def test_relations_detect_violation():
    g = random_metric(3, 4, 23)
    lst = curvature_list(g, 2)
    bad = ConstTensor(3, 5)
    bad.set_((0, 1, 0, 1, 2), QQ(1))  # violates second Bianchi antisymmetrization
    broken = CurvatureList(3, [lst.entry(0), lst.entry(1) + bad, lst.entry(2)])
    rep = check_curvature_relations(broken, g.form)
    failed = [row for row in rep if not row[-1]]
    assert any(row[0] == "second-bianchi" for row in failed)


def test_linearized_naturality_under_gauge_directions():
    # h + eps * (Lie_V h) for quadratic V is flat to first order, so every
    # curvature entry must have vanishing eps-part.
    n, seed = 3, 29
    rng = random.Random(seed)
    spec = base_spec(n, 4)
    quad = [e for e in spec.monomials() if sum(e) == 2]
    V = [
        JetScalar.from_terms(spec, [(rng.choice(quad), QQ(rng.randint(-2, 2))) for _ in range(2)])
        for _ in range(n)
    ]
    comps = {}
    for i in range(n):
        for j in range(i, n):
            lie = V[j].derive(spec.names[i]) + V[i].derive(spec.names[j])
            eps = lie.map_coefficients(lambda c: Dual(QQ(0), c))
            base = JetScalar.constant(spec, 1) if i == j else JetScalar.zero(spec)
            comps[(i, j)] = base + eps.truncate(spec.order)
    g = MetricJet.from_components(n, spec, comps)
    lst = curvature_list(g, 2)
    for e in lst.entries:
        for v in e.vals.values():
            assert epsilon_part(v) == 0


def test_not_a_metric_jet():
    spec = base_spec(2, 2)
    with pytest.raises(NotAMetricJet):
        MetricJet.from_components(
            2, spec, {(0, 0): JetScalar.constant(spec, 2), (1, 1): JetScalar.constant(spec, 1)}
        )
