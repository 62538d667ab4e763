import random
from itertools import product

import pytest

from ambient_jets.jets import JetScalar, base_spec
from ambient_jets.linalg import QMatrix, rank
from ambient_jets.rationals import QQ, ZERO
from ambient_jets.tensors import (
    ConstTensor,
    ReferenceForm,
    SymmetryError,
    TensorJet,
    antisymmetrize,
    contract,
    exchange_violation,
    form_inverse,
    full_trace_rows,
    move_index,
    trace_free_part,
    young_project,
    young_project_values,
)


def const_tensorjet(dim, rank_, spec, vals):
    comps = {idx: JetScalar.constant(spec, c) for idx, c in vals.items() if c}
    return TensorJet.from_components(dim, rank_, spec, comps)


def random_const(dim, rank_, spec, rng, nnz=6):
    vals = {}
    for _ in range(nnz):
        idx = tuple(rng.randrange(dim) for _ in range(rank_))
        vals[idx] = QQ(rng.randint(-3, 3))
    return const_tensorjet(dim, rank_, spec, vals)


SP = base_spec(1, 0)


def test_young_11_is_symmetrization():
    t = const_tensorjet(3, 2, SP, {(0, 1): QQ(1)})
    p = young_project(t, 1, 1)
    assert p.get((0, 1)).constant_term() == QQ(1, 2)
    assert p.get((1, 0)).constant_term() == QQ(1, 2)


def test_young_idempotent_on_symmetric_input():
    rng = random.Random(2)
    for dim in (3, 4):
        t = random_const(dim, 4, SP, rng)
        p = young_project(t, 2, 2)
        assert young_project(p, 2, 2) == p


def test_young_idempotent_various_types():
    rng = random.Random(9)
    for r, s, dim in [(1, 0, 3), (2, 0, 4), (2, 1, 4), (3, 2, 5), (2, 2, 6)]:
        t = random_const(dim, r + s, SP, rng)
        p = young_project(t, r, s)
        assert young_project(p, r, s) == p


def test_exchange_identity_on_projection():
    rng = random.Random(4)
    for r, s, dim in [(2, 2, 4), (2, 1, 3), (3, 1, 4)]:
        t = random_const(dim, r + s, SP, rng)
        p = young_project(t, r, s)
        assert exchange_violation(p, r, s).is_zero()


def projector_rank(dim, r, s):
    """Rank of the (r, s) projector on full tensor index space."""
    idxs = list(product(range(dim), repeat=r + s))
    pos = {ix: i for i, ix in enumerate(idxs)}
    rows = []
    for ix in idxs:
        out = young_project_values({ix: QQ(1)}, dim, r, s)
        rows.append([out.get(j, ZERO) for j in idxs])
    return rank(QMatrix.from_rows(rows))


def test_dim_lambda_rs():
    # two-column dimension formula C(d,r)C(d,s) - C(d,r+1)C(d,s-1)
    from math import comb

    assert projector_rank(4, 2, 2) == 20
    assert projector_rank(3, 2, 1) == comb(3, 2) * comb(3, 1) - comb(3, 3)
    for d, r in [(4, 2), (5, 3)]:
        assert projector_rank(d, r, 0) == comb(d, r)


def test_dim_lambda22_tracefree_n4():
    # project, then impose vanishing of the single independent trace
    dim = 4
    form = ReferenceForm.euclidean(dim)
    idxs = list(product(range(dim), repeat=4))
    rows = []
    hinv = form_inverse(form.h_matrix())
    for ix in idxs:
        out = young_project_values({ix: QQ(1)}, dim, 2, 2)
        rows.append([out.get(j, ZERO) for j in idxs])
    m = QMatrix.from_rows(rows)
    from ambient_jets.linalg import rref

    rk = rref(m.transpose())[1]
    assert rk == 20
    # trace map composed with the projector has rank 10, leaving 10 trace-free
    trace_rows = []
    for ix in idxs:
        out = young_project_values({ix: QQ(1)}, dim, 2, 2)
        tr = {}
        for idx, c in out.items():
            g = hinv[idx[0]][idx[2]]
            if g:
                key = (idx[1], idx[3])
                tr[key] = tr.get(key, ZERO) + c * g
        trace_rows.append([tr.get((a, b), ZERO) for a in range(dim) for b in range(dim)])
    tr_rank = rank(QMatrix.from_rows(trace_rows))
    assert rk - tr_rank == 10


def test_trace_free_of_form_is_zero():
    n = 4
    form = ReferenceForm.euclidean(n)
    h = const_tensorjet(n, 2, SP, {(i, i): QQ(1) for i in range(n)})
    tf = trace_free_part(h, 1, 1, form)
    assert tf.is_zero()


def test_trace_free_idempotent_and_traceless():
    rng = random.Random(12)
    n = 4
    form = ReferenceForm.euclidean(n)
    t = young_project(random_const(n, 2, SP, rng), 1, 1)
    tf = trace_free_part(t, 1, 1, form)
    assert trace_free_part(tf, 1, 1, form) == tf
    for row in full_trace_rows(tf, form):
        assert row.is_zero()


def test_trace_free_weyl_type_unchanged():
    rng = random.Random(21)
    n = 4
    form = ReferenceForm.euclidean(n)
    t = young_project(random_const(n, 4, SP, rng), 2, 2)
    tf = trace_free_part(t, 2, 2, form)
    assert trace_free_part(tf, 2, 2, form) == tf
    hinv = form_inverse(form.h_matrix())
    assert contract(tf, 0, 2, hinv).is_zero()


def test_contract_h_with_h_gives_n():
    n = 5
    form = ReferenceForm.euclidean(n)
    h = const_tensorjet(n, 2, SP, {(i, i): QQ(1) for i in range(n)})
    hinv = form_inverse(form.h_matrix())
    c = contract(h, 0, 1, hinv)
    assert c.get(()).constant_term() == n


def test_raise_lower_roundtrip():
    rng = random.Random(31)
    n = 4
    form = ReferenceForm(3, 1)
    t = random_const(n, 2, SP, rng)
    m = form.h_matrix()
    mi = form_inverse(m)
    assert move_index(move_index(t, 0, mi), 0, m) == t


def test_ambient_form_inverse_is_corner():
    form = ReferenceForm.euclidean(3)
    m = form.ambient_matrix()
    mi = form_inverse(m)
    assert mi == m  # corner block with euclidean middle is involutive
    d = len(m)
    for i in range(d):
        for j in range(d):
            s = sum((mi[i][k] * m[k][j] for k in range(d)), ZERO)
            assert s == (QQ(1) if i == j else ZERO)


def test_rank_mismatch_raises():
    t = const_tensorjet(3, 2, SP, {(0, 1): QQ(1)})
    with pytest.raises(SymmetryError):
        young_project(t, 2, 1)
